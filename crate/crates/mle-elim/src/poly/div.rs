//! Division, GCD, squarefree parts, and factor multiplicities.
//!
//! The multivariate GCD is a primitive-part pseudo-remainder sequence
//! recursing on a main variable chosen as the variable of lowest max
//! degree among those common to both inputs. This is the performance-
//! sensitive hot spot of the crate; adequate at desk scale.

use super::{MonomialOrder, Monomial, MultiPoly, VarSet};
use num_traits::{One, Zero};

impl MultiPoly {
    /// Division with remainder by a single divisor under grevlex on the
    /// common universe. The remainder contains no term divisible by the
    /// divisor's leading term, so it is zero iff `d` divides `self`.
    pub fn div_rem(&self, d: &MultiPoly) -> (MultiPoly, MultiPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let (mut r, d) = MultiPoly::aligned(self, d);
        let ord = MonomialOrder::grevlex(d.vars.names().to_vec());
        let cmp = ord.compile(&d.vars);
        let (dm, dc) = {
            let (m, c) = d.leading_term(&cmp).unwrap();
            (m.clone(), c.clone())
        };
        let mut q = MultiPoly::zero(&d.vars);
        let mut rem = MultiPoly::zero(&d.vars);
        while let Some((m, c)) = r.leading_term(&cmp).map(|(m, c)| (m.clone(), c.clone())) {
            match dm.div(&m) {
                Some(shift) => {
                    let coef = &c / &dc;
                    q.add_term(shift.clone(), coef.clone());
                    // r -= coef * shift * d
                    for (m2, c2) in &d.terms {
                        r.add_term(m2.mul(&shift), -(&coef * c2));
                    }
                }
                None => {
                    rem.add_term(m.clone(), c.clone());
                    r.terms.remove(&m);
                }
            }
        }
        (q, rem)
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    pub fn divisible_by(&self, d: &MultiPoly) -> bool {
        self.div_rem(d).1.is_zero()
    }

    /// Coefficient array of `self` in `v`; index `k` holds the (v-free)
    /// coefficient of `v^k`.
    pub(crate) fn coeff_vec(&self, v: &str) -> Vec<MultiPoly> {
        let d = self.degree(v);
        if d < 0 {
            return Vec::new();
        }
        (0..=d as u32).map(|k| self.coeff_of(v, k)).collect()
    }

    pub(crate) fn from_coeff_vec(vars: &VarSet, coeffs: &[MultiPoly], v: &str) -> MultiPoly {
        let i = vars.index_of(v).expect("main variable not in universe");
        let mut out = MultiPoly::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            let c = c.with_universe(vars);
            for (m, coef) in &c.terms {
                let mut exps = m.exponents().to_vec();
                exps[i] += k as u32;
                out.add_term(Monomial::from_exponents(exps), coef.clone());
            }
        }
        out
    }
}

/// Greatest common divisor, normalized primitive over `Z` with positive
/// grevlex-leading coefficient. `gcd(a, 0)` is the normalization of `a`.
pub fn gcd_poly(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let (a, b) = MultiPoly::aligned(a, b);
    gcd_inner(&a, &b).normalized()
}

fn gcd_debug() -> bool {
    static FLAG: std::sync::OnceLock<bool> = std::sync::OnceLock::new();
    *FLAG.get_or_init(|| std::env::var("MLE_GCD_DEBUG").is_ok())
}

fn gcd_inner(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if gcd_debug() {
        eprintln!(
            "gcd_inner: a terms={} tdeg={} | b terms={} tdeg={}",
            a.num_terms(),
            a.total_degree(),
            b.num_terms(),
            b.total_degree()
        );
    }
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(a.vars());
    }
    // Variables occurring in both, with the smaller of the two max-degrees.
    let mut common: Vec<(usize, i64)> = Vec::new();
    for i in 0..a.vars().len() {
        let da = a.degree_at(i);
        let db = b.degree_at(i);
        if da > 0 && db > 0 {
            common.push((i, da.max(db)));
        }
    }
    if common.is_empty() {
        // Divisors of a polynomial only involve its variables, so a common
        // divisor here is constant.
        return MultiPoly::one(a.vars());
    }
    common.sort_by_key(|&(_, d)| d);
    let v = a.vars().names()[common[0].0].clone();

    let ca = a.coeff_vec(&v);
    let cb = b.coeff_vec(&v);
    let cont_a = content_of(&ca);
    let cont_b = content_of(&cb);
    let pa: Vec<MultiPoly> = ca.iter().map(|c| c.div_exact(&cont_a).unwrap()).collect();
    let pb: Vec<MultiPoly> = cb.iter().map(|c| c.div_exact(&cont_b).unwrap()).collect();
    let cont_gcd = gcd_inner(&cont_a, &cont_b);

    let pp = prs_gcd(pa, pb);
    let g = MultiPoly::from_coeff_vec(a.vars(), &pp, &v);
    g.mul(&cont_gcd)
}

/// GCD of the coefficient list (the content w.r.t. the main variable).
fn content_of(coeffs: &[MultiPoly]) -> MultiPoly {
    let mut acc = MultiPoly::zero(coeffs[0].vars());
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        acc = gcd_inner(&acc, c);
        if acc.is_constant() && !acc.is_zero() {
            return MultiPoly::one(acc.vars());
        }
    }
    acc.normalized()
}

/// Primitive pseudo-remainder sequence on coefficient arrays; inputs are
/// primitive w.r.t. the main variable, output is the primitive GCD.
fn prs_gcd(f: Vec<MultiPoly>, g: Vec<MultiPoly>) -> Vec<MultiPoly> {
    let (mut f, mut g) = if f.len() >= g.len() { (f, g) } else { (g, f) };
    loop {
        if g.is_empty() {
            return primitive_part(f);
        }
        if g.len() == 1 {
            // A nonzero main-variable-free remainder: primitive inputs have
            // a constant GCD.
            let one = MultiPoly::one(g[0].vars());
            return vec![one];
        }
        let r = prem(&f, &g);
        if gcd_debug() {
            let sz: usize = r.iter().map(|c| c.num_terms()).sum();
            eprintln!("  prem -> len {} total_terms {}", r.len(), sz);
        }
        f = g;
        g = primitive_part(r);
    }
}

fn primitive_part(coeffs: Vec<MultiPoly>) -> Vec<MultiPoly> {
    let mut coeffs = coeffs;
    while coeffs.last().is_some_and(MultiPoly::is_zero) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        return coeffs;
    }
    let cont = content_of(&coeffs);
    if !cont.is_constant() {
        coeffs = coeffs
            .iter()
            .map(|p| p.div_exact(&cont).unwrap())
            .collect();
    }
    // Strip the rational content too; without this, pseudo-remainder
    // coefficients grow exponentially along the sequence.
    let mut num_gcd = num_bigint::BigInt::zero();
    let mut den_lcm = num_bigint::BigInt::one();
    for p in &coeffs {
        for (_, c) in p.terms() {
            num_gcd = num_integer::Integer::gcd(&num_gcd, c.numer());
            den_lcm = num_integer::Integer::lcm(&den_lcm, c.denom());
        }
    }
    let scale = num_rational::BigRational::new(den_lcm, num_gcd);
    if !scale.is_one() {
        coeffs = coeffs.iter().map(|p| p.scale(&scale)).collect();
    }
    coeffs
}

/// Pseudo-remainder: repeatedly scales by the divisor's leading coefficient
/// so every cancellation is coefficient-exact.
fn prem(f: &[MultiPoly], g: &[MultiPoly]) -> Vec<MultiPoly> {
    let dg = g.len() - 1;
    let lg = &g[dg];
    let mut r: Vec<MultiPoly> = f.to_vec();
    while r.len() > dg {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        let shift = dr - dg;
        for c in r.iter_mut() {
            *c = c.mul(lg);
        }
        for k in 0..=dg {
            r[k + shift] = r[k + shift].sub(&lr.mul(&g[k]));
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        while r.last().is_some_and(MultiPoly::is_zero) {
            r.pop();
        }
    }
    r
}

/// `p` divided by the GCD of `p` and all its first partial derivatives;
/// normalized. The result has no repeated irreducible factor.
pub fn squarefree_part(p: &MultiPoly) -> MultiPoly {
    assert!(!p.is_zero(), "squarefree_part of the zero polynomial");
    if p.is_constant() {
        return MultiPoly::one(p.vars());
    }
    let mut d = p.normalized();
    for v in p.vars().names().to_vec() {
        if p.degree(&v) <= 0 {
            continue;
        }
        d = gcd_poly(&d, &p.partial(&v));
        if d.is_constant() {
            return p.normalized();
        }
    }
    p.div_exact(&d)
        .expect("gcd with partials divides the polynomial")
        .normalized()
}

/// Largest `k` with `f^k` dividing `p` exactly, and the exact cofactor
/// `p / f^k` (not re-normalized, so `f^k * cofactor == p` holds verbatim).
pub fn factor_multiplicity(p: &MultiPoly, f: &MultiPoly) -> (u32, MultiPoly) {
    assert!(!p.is_zero(), "factor_multiplicity of the zero polynomial");
    assert!(!f.is_constant(), "factor must be nonconstant");
    let mut k = 0u32;
    let mut cof = p.clone();
    while let Some(q) = cof.div_exact(f) {
        cof = q;
        k += 1;
    }
    (k, cof)
}
