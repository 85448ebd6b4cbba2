//! Sparse multivariate polynomials over `Q` with named variables.
//!
//! A [`MultiPoly`] owns an ordered variable universe ([`VarSet`]) and a map
//! from exponent vectors to nonzero rational coefficients. Two polynomials
//! compare equal iff their term maps agree after aligning universes, so
//! values built over different universes still behave as elements of one
//! big polynomial ring.

mod div;
mod order;
mod parse;

pub use div::{factor_multiplicity, gcd_poly, squarefree_part};
pub use order::{CompiledOrder, MonomialOrder};
pub use parse::ParseError;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Errors from point evaluation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` occurs in the polynomial but is not bound")]
    UnboundVariable(String),
}

/// An ordered list of distinct variable names shared by polynomials.
#[derive(Clone, Debug, Eq)]
pub struct VarSet(Arc<[String]>);

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl VarSet {
    /// Builds a universe from names; duplicates are a caller bug.
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for n in &names {
            assert!(seen.insert(n.clone()), "duplicate variable `{n}` in universe");
        }
        VarSet(names.into())
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Union preserving `self`'s order, then new names of `other` in order.
    /// Also returns index maps from each input universe into the union.
    pub fn union(&self, other: &VarSet) -> (VarSet, Vec<usize>, Vec<usize>) {
        if self == other {
            let id: Vec<usize> = (0..self.len()).collect();
            return (self.clone(), id.clone(), id);
        }
        let mut names: Vec<String> = self.0.to_vec();
        let map_a: Vec<usize> = (0..self.len()).collect();
        let mut map_b = Vec::with_capacity(other.len());
        for n in other.0.iter() {
            match names.iter().position(|m| m == n) {
                Some(i) => map_b.push(i),
                None => {
                    names.push(n.clone());
                    map_b.push(names.len() - 1);
                }
            }
        }
        (VarSet(names.into()), map_a, map_b)
    }
}

/// Exponent vector aligned with the owning polynomial's universe.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn identity(n_vars: usize) -> Self {
        Monomial(vec![0; n_vars].into())
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps.into())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if self.divides(other) {
            Some(Monomial(
                other
                    .0
                    .iter()
                    .zip(self.0.iter())
                    .map(|(b, a)| b - a)
                    .collect(),
            ))
        } else {
            None
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }
}

/// Sparse multivariate polynomial over `Q`.
#[derive(Clone, Debug)]
pub struct MultiPoly {
    vars: VarSet,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        let (a, b) = MultiPoly::aligned(self, other);
        a.terms == b.terms
    }
}

impl Eq for MultiPoly {}

impl MultiPoly {
    pub fn zero(vars: &VarSet) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &VarSet, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::identity(vars.len()), c);
        }
        MultiPoly {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, BigRational::one())
    }

    pub fn from_int(vars: &VarSet, n: i64) -> Self {
        Self::constant(vars, BigRational::from_integer(BigInt::from(n)))
    }

    /// The variable `name` as a polynomial; `None` if not in the universe.
    pub fn var(vars: &VarSet, name: &str) -> Option<Self> {
        let i = vars.index_of(name)?;
        let mut exps = vec![0u32; vars.len()];
        exps[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::from_exponents(exps), BigRational::one());
        Some(MultiPoly {
            vars: vars.clone(),
            terms,
        })
    }

    pub fn from_terms<I>(vars: &VarSet, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            debug_assert_eq!(m.exponents().len(), vars.len());
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_identity)
    }

    /// The value of a constant polynomial; `None` if non-constant.
    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Re-expresses the polynomial over `new_vars` via `map[i]` = new index
    /// of old variable `i`.
    fn remap(&self, new_vars: &VarSet, map: &[usize]) -> MultiPoly {
        let mut out = MultiPoly::zero(new_vars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; new_vars.len()];
            for (i, &e) in m.exponents().iter().enumerate() {
                exps[map[i]] = e;
            }
            out.terms.insert(Monomial::from_exponents(exps), c.clone());
        }
        out
    }

    /// Brings two polynomials onto a common universe.
    pub fn aligned(a: &MultiPoly, b: &MultiPoly) -> (MultiPoly, MultiPoly) {
        if a.vars == b.vars {
            return (a.clone(), b.clone());
        }
        let (u, ma, mb) = a.vars.union(&b.vars);
        (a.remap(&u, &ma), b.remap(&u, &mb))
    }

    /// Re-expresses over `vars`, which must contain every variable that
    /// occurs with a positive exponent.
    pub fn with_universe(&self, vars: &VarSet) -> MultiPoly {
        if self.vars == *vars {
            return self.clone();
        }
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| match vars.index_of(n) {
                Some(j) => j,
                None => {
                    assert!(
                        self.terms.keys().all(|m| m.exponent(i) == 0),
                        "variable `{n}` occurs but is absent from the target universe"
                    );
                    0
                }
            })
            .collect();
        // Occurring vars map injectively; vanished ones may collide at 0.
        let mut out = MultiPoly::zero(vars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; vars.len()];
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    exps[map[i]] = e;
                }
            }
            out.terms.insert(Monomial::from_exponents(exps), c.clone());
        }
        out
    }

    /// The universe restricted to variables that actually occur.
    pub fn shrunk_universe(&self) -> MultiPoly {
        let used: Vec<String> = self
            .vars
            .names()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.terms.keys().any(|m| m.exponent(*i) > 0))
            .map(|(_, n)| n.clone())
            .collect();
        self.with_universe(&VarSet::new(used))
    }

    // ---- arithmetic -------------------------------------------------------

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let (mut a, b) = MultiPoly::aligned(self, other);
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        a
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let (a, b) = MultiPoly::aligned(self, other);
        let mut out = MultiPoly::zero(&a.vars);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut result = MultiPoly::one(&self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    // ---- degrees and coefficients -----------------------------------------

    /// Degree in the variable at universe position `i`; `-1` for zero.
    pub fn degree_at(&self, i: usize) -> i64 {
        self.terms
            .keys()
            .map(|m| m.exponent(i) as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Degree in `v`; `-1` for the zero polynomial, `0` if `v` is absent.
    pub fn degree(&self, v: &str) -> i64 {
        match self.vars.index_of(v) {
            Some(i) => self.degree_at(i),
            None => {
                if self.is_zero() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.total_degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// The polynomial coefficient of `v^k` (with `v` struck out).
    pub fn coeff_of(&self, v: &str, k: u32) -> MultiPoly {
        let Some(i) = self.vars.index_of(v) else {
            return if k == 0 {
                self.clone()
            } else {
                MultiPoly::zero(&self.vars)
            };
        };
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            if m.exponent(i) == k {
                let mut exps = m.exponents().to_vec();
                exps[i] = 0;
                out.terms.insert(Monomial::from_exponents(exps), c.clone());
            }
        }
        out
    }

    /// Leading coefficient with respect to `v` (the polynomial coefficient
    /// of `v^{deg(p, v)}`); panics on the zero polynomial.
    pub fn lcoeff(&self, v: &str) -> MultiPoly {
        assert!(!self.is_zero(), "lcoeff of the zero polynomial");
        let d = self.degree(v);
        self.coeff_of(v, d as u32)
    }

    /// True iff all terms share the same total degree in the given subset.
    /// The zero polynomial is homogeneous.
    pub fn is_homogeneous(&self, subset: &[&str]) -> bool {
        let idx: Vec<usize> = subset
            .iter()
            .filter_map(|v| self.vars.index_of(v))
            .collect();
        let mut seen: Option<u32> = None;
        for m in self.terms.keys() {
            let d: u32 = idx.iter().map(|&i| m.exponent(i)).sum();
            match seen {
                None => seen = Some(d),
                Some(s) if s != d => return false,
                _ => {}
            }
        }
        true
    }

    pub fn partial(&self, v: &str) -> MultiPoly {
        let Some(i) = self.vars.index_of(v) else {
            return MultiPoly::zero(&self.vars);
        };
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e > 0 {
                let mut exps = m.exponents().to_vec();
                exps[i] = e - 1;
                out.add_term(
                    Monomial::from_exponents(exps),
                    c * BigRational::from_integer(BigInt::from(e)),
                );
            }
        }
        out
    }

    // ---- substitution and evaluation --------------------------------------

    /// Simultaneous substitution of polynomials for variables. Unbound
    /// variables are untouched; the result lives on the union universe.
    pub fn substitute(&self, bindings: &BTreeMap<String, MultiPoly>) -> MultiPoly {
        if bindings.is_empty() {
            return self.clone();
        }
        // Build the union of all universes involved.
        let mut universe = self.vars.clone();
        for val in bindings.values() {
            let (u, _, _) = universe.union(&val.vars);
            universe = u;
        }
        let base = self.with_universe(&universe);
        let bound: Vec<Option<MultiPoly>> = universe
            .names()
            .iter()
            .map(|n| bindings.get(n).map(|p| p.with_universe(&universe)))
            .collect();
        // Per-variable power cache, grown on demand.
        let mut powers: Vec<Vec<MultiPoly>> = bound
            .iter()
            .map(|b| match b {
                Some(p) => vec![MultiPoly::one(&universe), p.clone()],
                None => Vec::new(),
            })
            .collect();
        let mut out = MultiPoly::zero(&universe);
        for (m, c) in &base.terms {
            let mut acc = MultiPoly::constant(&universe, c.clone());
            let mut residual = vec![0u32; universe.len()];
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &bound[i] {
                    None => residual[i] = e,
                    Some(_) => {
                        while powers[i].len() <= e as usize {
                            let next = powers[i].last().unwrap().mul(&powers[i][1]);
                            powers[i].push(next);
                        }
                        acc = acc.mul(&powers[i][e as usize]);
                    }
                }
            }
            let shift = Monomial::from_exponents(residual);
            for (m2, c2) in acc.terms {
                out.add_term(m2.mul(&shift), c2);
            }
        }
        out
    }

    /// Substitution of rational values for some variables.
    pub fn substitute_values(&self, values: &BTreeMap<String, BigRational>) -> MultiPoly {
        let bindings: BTreeMap<String, MultiPoly> = values
            .iter()
            .map(|(k, v)| (k.clone(), MultiPoly::constant(&self.vars, v.clone())))
            .collect();
        self.substitute(&bindings)
    }

    /// Exact evaluation; every occurring variable must be bound. A missing
    /// binding is reported for the first occurring variable in universe
    /// order.
    pub fn eval_point(&self, point: &BTreeMap<String, BigRational>) -> Result<BigRational, EvalError> {
        let vals: Vec<Option<&BigRational>> = self
            .vars
            .names()
            .iter()
            .map(|n| point.get(n))
            .collect();
        for (i, v) in vals.iter().enumerate() {
            if v.is_none() && self.terms.keys().any(|m| m.exponent(i) > 0) {
                return Err(EvalError::UnboundVariable(self.vars.names()[i].clone()));
            }
        }
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut acc = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = vals[i].expect("unbound variables rejected above");
                let mut pw = v.clone();
                let mut k = e - 1;
                while k > 0 {
                    pw *= v;
                    k -= 1;
                }
                acc *= pw;
            }
            total += acc;
        }
        Ok(total)
    }

    // ---- normalization -----------------------------------------------------

    /// Positive rational `c` such that `self = c * P` with `P` primitive
    /// over `Z` (coprime integer coefficients). Zero for the zero polynomial.
    pub fn rational_content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        BigRational::new(num_gcd, den_lcm)
    }

    /// Leading coefficient under descending grevlex on the universe order.
    pub fn grevlex_leading_coeff(&self) -> Option<&BigRational> {
        let ord = MonomialOrder::grevlex(self.vars.names().to_vec());
        let cmp = ord.compile(&self.vars);
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| cmp.cmp(a, b))
            .map(|(_, c)| c)
    }

    /// Primitive over `Z` with positive grevlex-leading coefficient.
    pub fn normalized(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.rational_content();
        if self.grevlex_leading_coeff().unwrap().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Scaled so that the leading coefficient in `v` is 1.
    pub fn monic_in(&self, v: &str) -> MultiPoly {
        assert!(!self.is_zero(), "monic_in on the zero polynomial");
        let lc = self.lcoeff(v);
        let c = lc
            .constant_value()
            .expect("monic_in requires a constant leading coefficient");
        self.scale(&c.recip())
    }

    /// Leading term under a compiled order.
    pub fn leading_term(&self, cmp: &CompiledOrder) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().max_by(|(a, _), (b, _)| cmp.cmp(a, b))
    }

    /// Terms sorted descending under a compiled order.
    pub fn sorted_terms(&self, cmp: &CompiledOrder) -> Vec<(Monomial, BigRational)> {
        let mut v: Vec<(Monomial, BigRational)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        v.sort_unstable_by(|(a, _), (b, _)| cmp.cmp(b, a));
        v
    }
}

impl fmt::Display for MultiPoly {
    /// Prints terms in descending grevlex order over the universe order,
    /// in the same grammar the parser accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let ord = MonomialOrder::grevlex(self.vars.names().to_vec());
        let cmp = ord.compile(&self.vars);
        let terms = self.sorted_terms(&cmp);
        for (k, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let mut first = true;
            if !mag.is_one() || m.is_identity() {
                if mag.denom().is_one() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "{}/{}", mag.numer(), mag.denom())?;
                }
                first = false;
            }
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", self.vars.names()[i])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Parses `text` over the given universe. See the module grammar: integers,
/// rational literals `a/b`, identifiers, `+ - * ^`, parentheses; implicit
/// multiplication is rejected.
pub fn parse_poly(text: &str, universe: &VarSet) -> Result<MultiPoly, ParseError> {
    parse::parse(text, universe)
}

#[cfg(test)]
mod tests;
