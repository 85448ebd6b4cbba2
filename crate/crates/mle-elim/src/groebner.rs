//! Buchberger's algorithm, block-order elimination, and radical generators
//! of principal elimination ideals.
//!
//! The engine works fraction-free over `Z`: every basis element is kept
//! integer-primitive with a positive leading coefficient, S-polynomials and
//! reduction steps are cross-scaled by leading coefficients instead of
//! dividing, and content is stripped as coefficients grow. Pairs are managed
//! with the Gebauer-Möller criteria and selected smallest-total-degree
//! first. A pair budget turns runaway computations into a `ResourceLimit`
//! error instead of a hang.

use crate::poly::{
    squarefree_part, CompiledOrder, Monomial, MonomialOrder, MultiPoly, VarSet,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GbError {
    #[error("pair reduction budget of {budget} exceeded")]
    ResourceLimit { budget: u64 },
    #[error("elimination ideal is not principal ({generators} generators)")]
    NonPrincipal { generators: usize },
    #[error("elimination ideal is zero")]
    ZeroIdeal,
}

/// Budgets for a Gröbner basis run.
#[derive(Debug, Clone, Copy)]
pub struct GbConfig {
    /// Maximum number of S-polynomial reductions per call.
    pub pair_budget: u64,
}

impl Default for GbConfig {
    fn default() -> Self {
        GbConfig {
            pair_budget: 200_000,
        }
    }
}

/// A Gröbner basis together with the order it was computed under.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub generators: Vec<MultiPoly>,
    pub order: MonomialOrder,
    pub reduced: bool,
}

fn debug_enabled() -> bool {
    static FLAG: std::sync::OnceLock<bool> = std::sync::OnceLock::new();
    *FLAG.get_or_init(|| std::env::var("MLE_GB_DEBUG").is_ok())
}

/// Internal term-list polynomial over `Z`, sorted descending under the
/// run's order, primitive with positive leading coefficient.
#[derive(Clone)]
struct Gp {
    terms: Vec<(Monomial, BigInt)>,
}

impl Gp {
    fn from_poly(p: &MultiPoly, cmp: &CompiledOrder) -> Gp {
        let sorted = p.sorted_terms(cmp);
        // Clear denominators up front; primitivity comes from the strip.
        let mut den_lcm = BigInt::one();
        for (_, c) in &sorted {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut gp = Gp {
            terms: sorted
                .into_iter()
                .map(|(m, c)| {
                    let scaled = c * BigRational::from_integer(den_lcm.clone());
                    debug_assert!(scaled.denom().is_one());
                    (m, scaled.numer().clone())
                })
                .collect(),
        };
        gp.normalize_content();
        gp
    }

    fn to_poly_monic(&self, vars: &VarSet) -> MultiPoly {
        let lc = BigRational::from_integer(self.terms[0].1.clone());
        MultiPoly::from_terms(
            vars,
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), BigRational::from_integer(c.clone()) / &lc)),
        )
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lt(&self) -> &(Monomial, BigInt) {
        &self.terms[0]
    }

    /// Strips integer content and fixes the leading sign.
    fn normalize_content(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let mut content = BigInt::zero();
        for (_, c) in &self.terms {
            content = content.gcd(c);
            if content.is_one() {
                break;
            }
        }
        if self.terms[0].1.is_negative() {
            content = -content;
        }
        if !content.is_one() {
            for (_, c) in self.terms.iter_mut() {
                *c = &*c / &content;
            }
        }
    }

    fn max_bits(&self) -> u64 {
        self.terms.iter().map(|(_, c)| c.bits()).max().unwrap_or(0)
    }
}

/// `ca * a - cb * shift * b`, merging sorted term lists over `Z`.
fn lin_comb(
    a: &[(Monomial, BigInt)],
    ca: &BigInt,
    cb: &BigInt,
    shift: &Monomial,
    b: &Gp,
    cmp: &CompiledOrder,
) -> Gp {
    let mut out = Vec::with_capacity(a.len() + b.terms.len());
    let mut i = 0;
    let mut j = 0;
    while i < a.len() && j < b.terms.len() {
        let bm = b.terms[j].0.mul(shift);
        match cmp.cmp(&a[i].0, &bm) {
            Ordering::Greater => {
                out.push((a[i].0.clone(), &a[i].1 * ca));
                i += 1;
            }
            Ordering::Less => {
                out.push((bm, -(&b.terms[j].1 * cb)));
                j += 1;
            }
            Ordering::Equal => {
                let c = &a[i].1 * ca - &b.terms[j].1 * cb;
                if !c.is_zero() {
                    out.push((a[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    while i < a.len() {
        out.push((a[i].0.clone(), &a[i].1 * ca));
        i += 1;
    }
    while j < b.terms.len() {
        out.push((b.terms[j].0.mul(shift), -(&b.terms[j].1 * cb)));
        j += 1;
    }
    Gp { terms: out }
}

/// Among basis elements whose leading term divides `m`, the one with the
/// fewest terms (keeps the tails from snowballing).
fn find_reducer<'a>(m: &Monomial, basis: &'a [Gp], active: &[bool]) -> Option<&'a Gp> {
    basis
        .iter()
        .zip(active)
        .filter(|(g, a)| **a && g.lt().0.divides(m))
        .map(|(g, _)| g)
        .min_by_key(|g| g.terms.len())
}

/// Top-reduction: rewrites only while the leading term is divisible,
/// cross-scaling by leading coefficients (no fractions).
fn top_reduce(f: Gp, basis: &[Gp], active: &[bool], cmp: &CompiledOrder) -> Gp {
    let mut cur = f;
    let mut steps = 0usize;
    while !cur.is_zero() {
        let (m, c) = cur.lt().clone();
        let Some(g) = find_reducer(&m, basis, active) else {
            return cur;
        };
        let gc = &g.lt().1;
        let d = c.gcd(gc);
        let shift = g.lt().0.div(&m).unwrap();
        cur = lin_comb(&cur.terms, &(gc / &d), &(c / &d), &shift, g, cmp);
        steps += 1;
        if steps % 8 == 0 || cur.max_bits() > 4096 {
            cur.normalize_content();
        }
    }
    cur
}

/// Full normal form of `f` modulo the active part of `basis`: no remaining
/// term is divisible by any active leading term. Fraction-free: the result
/// is a positive integer multiple of the monic normal form.
fn reduce(f: Gp, basis: &[Gp], active: &[bool], cmp: &CompiledOrder) -> Gp {
    let mut cur = f;
    let mut start = 0;
    let mut steps = 0usize;
    while start < cur.terms.len() {
        let (m, c) = cur.terms[start].clone();
        match find_reducer(&m, basis, active) {
            Some(g) => {
                let gc = &g.lt().1;
                let d = c.gcd(gc);
                let shift = g.lt().0.div(&m).unwrap();
                // Scale the confirmed prefix by the same factor so the whole
                // polynomial stays one consistent multiple.
                let scale = gc / &d;
                let mut merged = lin_comb(&cur.terms[start..], &scale, &(c / &d), &shift, g, cmp);
                let mut head: Vec<(Monomial, BigInt)> = cur.terms[..start]
                    .iter()
                    .map(|(m, c)| (m.clone(), c * &scale))
                    .collect();
                head.append(&mut merged.terms);
                cur = Gp { terms: head };
                steps += 1;
                if steps % 8 == 0 || cur.max_bits() > 4096 {
                    cur.normalize_content();
                }
                // The prefix stays irreducible under scaling.
            }
            None => {
                start += 1;
            }
        }
    }
    cur.normalize_content();
    cur
}

struct PairEntry {
    key: Vec<u32>,
    lcm: Monomial,
    coprime: bool,
    i: usize,
    j: usize,
}

/// Gebauer-Möller pair update: prunes old pairs superseded by the new
/// element (B criterion) and thins the new pairs (M and F criteria).
fn update_pairs(pairs: &mut Vec<PairEntry>, basis: &[Gp], t: usize, cmp: &CompiledOrder) {
    let lt_t = basis[t].lt().0.clone();
    pairs.retain(|p| {
        !(lt_t.divides(&p.lcm)
            && basis[p.i].lt().0.lcm(&lt_t) != p.lcm
            && basis[p.j].lt().0.lcm(&lt_t) != p.lcm)
    });
    struct Cand {
        lcm: Monomial,
        coprime: bool,
        i: usize,
    }
    let mut cand: Vec<Cand> = (0..t)
        .map(|i| {
            let lt_i = &basis[i].lt().0;
            let lcm = lt_i.lcm(&lt_t);
            let coprime = lcm == lt_i.mul(&lt_t);
            Cand { lcm, coprime, i }
        })
        .collect();
    // M criterion: drop candidates whose lcm is a strict multiple of
    // another candidate's lcm.
    let keep: Vec<bool> = (0..cand.len())
        .map(|a| {
            !(0..cand.len()).any(|b| {
                a != b
                    && cand[b].lcm.divides(&cand[a].lcm)
                    && (cand[b].lcm != cand[a].lcm || b < a)
            })
        })
        .collect();
    let mut idx = 0;
    cand.retain(|_| {
        let k = keep[idx];
        idx += 1;
        k
    });
    // F criterion: one representative per lcm class; a coprime member
    // discharges the whole class.
    cand.sort_by(|a, b| a.lcm.cmp(&b.lcm).then(a.i.cmp(&b.i)));
    let mut pos = 0;
    while pos < cand.len() {
        let mut end = pos + 1;
        while end < cand.len() && cand[end].lcm == cand[pos].lcm {
            end += 1;
        }
        let class = &cand[pos..end];
        let rep = class.iter().find(|c| c.coprime).unwrap_or(&class[0]);
        pairs.push(PairEntry {
            key: cmp.key(&rep.lcm),
            lcm: rep.lcm.clone(),
            coprime: rep.coprime,
            i: rep.i,
            j: t,
        });
        pos = end;
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens` under `order`.
pub fn buchberger(
    gens: &[MultiPoly],
    order: &MonomialOrder,
    cfg: &GbConfig,
) -> Result<GroebnerBasis, GbError> {
    assert!(!gens.is_empty(), "buchberger requires at least one generator");
    let vars = common_universe(gens);
    let cmp = order.compile(&vars);

    let mut basis: Vec<Gp> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pairs: Vec<PairEntry> = Vec::new();
    let add_element = |basis: &mut Vec<Gp>,
                           active: &mut Vec<bool>,
                           pairs: &mut Vec<PairEntry>,
                           gp: Gp| {
        basis.push(gp);
        active.push(true);
        let t = basis.len() - 1;
        // Elements whose leading term the newcomer divides stop reducing
        // and stop breeding pairs; their queued pairs are covered by the
        // Gebauer-Möller criteria through the newcomer.
        let lt_t = basis[t].lt().0.clone();
        for (k, a) in active.iter_mut().enumerate().take(t) {
            if *a && lt_t.divides(&basis[k].lt().0) {
                *a = false;
            }
        }
        update_pairs(pairs, basis, t, &cmp);
    };

    for g in gens {
        let gp = Gp::from_poly(&g.with_universe(&vars), &cmp);
        let gp = reduce(gp, &basis, &active, &cmp);
        if !gp.is_zero() {
            add_element(&mut basis, &mut active, &mut pairs, gp);
        }
    }
    assert!(!basis.is_empty(), "buchberger requires a nonzero generator");

    let mut budget = cfg.pair_budget;
    while !pairs.is_empty() {
        // Degree-first selection: smallest total degree of the lcm, then
        // the order key, then indices (deterministic). Plain order-minimal
        // selection degrades badly on elimination orders.
        let best = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.lcm
                    .total_degree()
                    .cmp(&b.lcm.total_degree())
                    .then_with(|| a.key.cmp(&b.key))
                    .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
            })
            .map(|(k, _)| k)
            .unwrap();
        let PairEntry {
            lcm, coprime, i, j, ..
        } = pairs.swap_remove(best);
        if coprime {
            continue;
        }
        if budget == 0 {
            return Err(GbError::ResourceLimit {
                budget: cfg.pair_budget,
            });
        }
        budget -= 1;
        // Fraction-free S-polynomial.
        let (ci, cj) = (basis[i].lt().1.clone(), basis[j].lt().1.clone());
        let d = ci.gcd(&cj);
        let shift_i = basis[i].lt().0.div(&lcm).unwrap();
        let shift_j = basis[j].lt().0.div(&lcm).unwrap();
        let scaled_i: Vec<(Monomial, BigInt)> = basis[i]
            .terms
            .iter()
            .map(|(m, c)| (m.mul(&shift_i), c * (&cj / &d)))
            .collect();
        let spoly = lin_comb(
            &scaled_i,
            &BigInt::one(),
            &(&ci / &d),
            &shift_j,
            &basis[j],
            &cmp,
        );
        let red = top_reduce(spoly, &basis, &active, &cmp);
        if !red.is_zero() {
            // Tail-reduce once: the element is about to serve as a reducer
            // many times over, so keeping it in normal form pays for itself.
            let mut red = reduce(red, &basis, &active, &cmp);
            red.normalize_content();
            if debug_enabled() {
                eprintln!(
                    "gb: basis {} pairs {} new lt deg {} terms {} bits {}",
                    basis.len(),
                    pairs.len(),
                    red.lt().0.total_degree(),
                    red.terms.len(),
                    red.max_bits()
                );
            }
            add_element(&mut basis, &mut active, &mut pairs, red);
        }
    }

    // Inter-reduce to the unique reduced basis: drop generators whose
    // leading term is divisible by another's, then fully reduce tails.
    let mut keep: Vec<Gp> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let dominated = basis.iter().enumerate().any(|(k, h)| {
            k != i
                && h.lt().0.divides(&g.lt().0)
                && (h.lt().0 != g.lt().0 || k < i)
        });
        if !dominated {
            keep.push(g.clone());
        }
    }
    let all_active = vec![true; keep.len()];
    let mut reduced: Vec<Gp> = Vec::new();
    for i in 0..keep.len() {
        let mut others = keep.clone();
        others.remove(i);
        let mut flags = all_active.clone();
        flags.pop();
        let r = reduce(keep[i].clone(), &others, &flags, &cmp);
        debug_assert!(!r.is_zero());
        reduced.push(r);
    }
    reduced.sort_by(|a, b| cmp.cmp(&a.lt().0, &b.lt().0));
    Ok(GroebnerBasis {
        generators: reduced.iter().map(|g| g.to_poly_monic(&vars)).collect(),
        order: order.clone(),
        reduced: true,
    })
}

/// Normal form of `p` modulo a basis (zero iff `p` is in the ideal when the
/// basis is a Gröbner basis under its order). Scaled monic: the leading
/// coefficient of a nonzero normal form is 1.
pub fn normal_form(p: &MultiPoly, gb: &GroebnerBasis) -> MultiPoly {
    let mut gens = gb.generators.clone();
    gens.push(p.clone());
    let vars = common_universe(&gens);
    let cmp = gb.order.compile(&vars);
    let basis: Vec<Gp> = gb
        .generators
        .iter()
        .map(|g| Gp::from_poly(&g.with_universe(&vars), &cmp))
        .collect();
    let active = vec![true; basis.len()];
    let red = reduce(
        Gp::from_poly(&p.with_universe(&vars), &cmp),
        &basis,
        &active,
        &cmp,
    );
    if red.is_zero() {
        MultiPoly::zero(&vars)
    } else {
        red.to_poly_monic(&vars)
    }
}

fn common_universe(gens: &[MultiPoly]) -> VarSet {
    let mut vars = gens[0].vars().clone();
    for g in &gens[1..] {
        let (u, _, _) = vars.union(g.vars());
        vars = u;
    }
    vars
}

/// Gröbner basis of `<gens> ∩ Q[keep]` under a block order with the kept
/// variables lowest (grevlex inside each block). Outputs are restricted to
/// the kept universe.
pub fn eliminate_vars(
    gens: &[MultiPoly],
    keep: &[&str],
    cfg: &GbConfig,
) -> Result<Vec<MultiPoly>, GbError> {
    let vars = common_universe(gens);
    for k in keep {
        assert!(
            vars.index_of(k).is_some(),
            "kept variable `{k}` not in the ambient universe"
        );
    }
    let high: Vec<String> = vars
        .names()
        .iter()
        .filter(|n| !keep.contains(&n.as_str()))
        .cloned()
        .collect();
    let low: Vec<String> = vars
        .names()
        .iter()
        .filter(|n| keep.contains(&n.as_str()))
        .cloned()
        .collect();
    let order = MonomialOrder::elimination(high.clone(), low.clone());
    let gb = buchberger(gens, &order, cfg)?;
    let high_idx: Vec<usize> = high.iter().map(|n| vars.index_of(n).unwrap()).collect();
    let keep_universe = VarSet::new(low);
    let mut out = Vec::new();
    for g in &gb.generators {
        let g = g.with_universe(&vars);
        let in_subring = g
            .terms()
            .all(|(m, _)| high_idx.iter().all(|&i| m.exponent(i) == 0));
        if in_subring {
            out.push(g.with_universe(&keep_universe));
        }
    }
    Ok(out)
}

/// Staged elimination: drops the variable groups in `stages` one Gröbner
/// run at a time, then finishes on `keep`. Set-theoretically exact, since
/// the stage outputs are Gröbner bases of the intermediate elimination
/// ideals; dramatically faster than one big block order on likelihood
/// systems (multipliers first, then probability variables).
pub fn eliminate_vars_staged(
    gens: &[MultiPoly],
    stages: &[Vec<String>],
    keep: &[&str],
    cfg: &GbConfig,
) -> Result<Vec<MultiPoly>, GbError> {
    let mut cur: Vec<MultiPoly> = gens.to_vec();
    for stage in stages {
        if cur.is_empty() {
            return Ok(Vec::new());
        }
        let present = common_universe(&cur);
        let keep_now: Vec<String> = present
            .names()
            .iter()
            .filter(|n| !stage.contains(n))
            .cloned()
            .collect();
        let keep_refs: Vec<&str> = keep_now.iter().map(String::as_str).collect();
        cur = eliminate_vars(&cur, &keep_refs, cfg)?;
    }
    if cur.is_empty() {
        return Ok(Vec::new());
    }
    eliminate_vars(&cur, keep, cfg)
}

/// The squarefree generator of `sqrt(<gens> ∩ Q[keep])` for a principal,
/// nonzero elimination ideal. Univariate outputs are monic; multivariate
/// outputs are primitive over `Z` with positive leading coefficient.
pub fn radical_elim_generator(
    gens: &[MultiPoly],
    keep: &[&str],
    cfg: &GbConfig,
) -> Result<MultiPoly, GbError> {
    let elim = eliminate_vars(gens, keep, cfg)?;
    radical_from_elimination(elim, keep)
}

/// Staged variant of [`radical_elim_generator`].
pub fn radical_elim_generator_staged(
    gens: &[MultiPoly],
    stages: &[Vec<String>],
    keep: &[&str],
    cfg: &GbConfig,
) -> Result<MultiPoly, GbError> {
    let elim = eliminate_vars_staged(gens, stages, keep, cfg)?;
    radical_from_elimination(elim, keep)
}

fn radical_from_elimination(elim: Vec<MultiPoly>, keep: &[&str]) -> Result<MultiPoly, GbError> {
    match elim.len() {
        0 => Err(GbError::ZeroIdeal),
        1 => {
            let g = squarefree_part(&elim[0]);
            if keep.len() == 1 {
                Ok(g.monic_in(keep[0]))
            } else {
                Ok(g.normalized())
            }
        }
        n => Err(GbError::NonPrincipal { generators: n }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn vs(names: &[&str]) -> VarSet {
        VarSet::new(names.iter().copied())
    }

    fn p(s: &str, v: &VarSet) -> MultiPoly {
        parse_poly(s, v).unwrap()
    }

    fn cfg() -> GbConfig {
        GbConfig::default()
    }

    #[test]
    fn containment_collapses_to_smaller_generator() {
        let v = vs(&["p0"]);
        let gens = [p("p0 - 1", &v), p("p0^2 - 1", &v)];
        let gb = buchberger(&gens, &MonomialOrder::lex(vec!["p0"]), &cfg()).unwrap();
        assert_eq!(gb.generators, vec![p("p0 - 1", &v)]);
    }

    #[test]
    fn parabola_implicitization() {
        // {x - t, y - t^2} under lex with t highest: the reduced basis
        // contains the implicit equation x^2 - y, verified against the
        // parametrization.
        let v = vs(&["t", "x", "y"]);
        let gens = [p("x - t", &v), p("y - t^2", &v)];
        let gb = buchberger(&gens, &MonomialOrder::lex(vec!["t", "x", "y"]), &cfg()).unwrap();
        let implicit = p("x^2 - y", &v);
        assert!(gb
            .generators
            .iter()
            .any(|g| *g == implicit || *g == implicit.neg()));
        // Substituting x = t, y = t^2 kills it.
        let mut b = std::collections::BTreeMap::new();
        b.insert("x".to_string(), p("t", &v));
        b.insert("y".to_string(), p("t^2", &v));
        assert!(implicit.substitute(&b).is_zero());
    }

    #[test]
    fn buchberger_is_idempotent_and_correct() {
        let v = vs(&["x", "y", "z"]);
        let gens = [
            p("x^2 + y^2 + z^2 - 1", &v),
            p("x*y - z", &v),
            p("x - y + z", &v),
        ];
        let order = MonomialOrder::grevlex(vec!["x", "y", "z"]);
        let gb = buchberger(&gens, &order, &cfg()).unwrap();
        // Inputs reduce to zero.
        for g in &gens {
            assert!(normal_form(g, &gb).is_zero());
        }
        // Every S-polynomial of output pairs reduces to zero.
        let vars = gb.generators[0].vars().clone();
        let cmpo = order.compile(&vars);
        for i in 0..gb.generators.len() {
            for j in i + 1..gb.generators.len() {
                let gi = &gb.generators[i];
                let gj = &gb.generators[j];
                let (mi, ci) = gi.leading_term(&cmpo).unwrap();
                let (mj, cj) = gj.leading_term(&cmpo).unwrap();
                let lcm = mi.lcm(mj);
                let si = MultiPoly::from_terms(
                    &vars,
                    [(mi.div(&lcm).unwrap(), BigRational::one() / ci)],
                );
                let sj = MultiPoly::from_terms(
                    &vars,
                    [(mj.div(&lcm).unwrap(), BigRational::one() / cj)],
                );
                let spoly = gi.mul(&si).sub(&gj.mul(&sj));
                assert!(normal_form(&spoly, &gb).is_zero());
            }
        }
        // Recomputing on the output returns an equal basis.
        let gb2 = buchberger(&gb.generators, &order, &cfg()).unwrap();
        assert_eq!(gb2.generators, gb.generators);
    }

    #[test]
    fn eliminate_keep_all_is_full_basis() {
        let v = vs(&["x", "y"]);
        let gens = [p("x^2 - y", &v), p("x*y - 1", &v)];
        let full = buchberger(
            &gens,
            &MonomialOrder::elimination(Vec::<String>::new(), vec!["x", "y"]),
            &cfg(),
        )
        .unwrap();
        let kept = eliminate_vars(&gens, &["x", "y"], &cfg()).unwrap();
        assert_eq!(kept.len(), full.generators.len());
    }

    #[test]
    fn eliminate_dominant_projection_is_empty() {
        let v = vs(&["x", "y"]);
        let gens = [p("y - x^2", &v)];
        let kept = eliminate_vars(&gens, &["x"], &cfg()).unwrap();
        assert!(kept.is_empty());
        assert_eq!(
            radical_elim_generator(&gens, &["x"], &cfg()),
            Err(GbError::ZeroIdeal)
        );
    }

    #[test]
    fn elimination_outputs_lie_in_subring_and_ideal() {
        let v = vs(&["t", "x", "y"]);
        let gens = [p("x - t^2", &v), p("y - t^3", &v)];
        let kept = eliminate_vars(&gens, &["x", "y"], &cfg()).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].degree("t"), 0);
        // Membership: reduces to zero modulo a full basis.
        let order = MonomialOrder::elimination(vec!["t"], vec!["x", "y"]);
        let gb = buchberger(&gens, &order, &cfg()).unwrap();
        assert!(normal_form(&kept[0].with_universe(&v), &gb).is_zero());
        // The cuspidal cubic: x^3 - y^2.
        assert_eq!(kept[0], p("x^3 - y^2", &vs(&["x", "y"])));
    }

    #[test]
    fn budget_exhaustion_raises_resource_limit() {
        let v = vs(&["x", "y", "z"]);
        let gens = [
            p("x^3*y^2 - z^4 + x", &v),
            p("y^3*z - x^2 + y", &v),
            p("z^3*x - y^2 + z", &v),
        ];
        let tiny = GbConfig { pair_budget: 2 };
        match buchberger(&gens, &MonomialOrder::lex(vec!["x", "y", "z"]), &tiny) {
            Err(GbError::ResourceLimit { budget: 2 }) => {}
            other => panic!("expected ResourceLimit, got {other:?}"),
        }
    }

    #[test]
    fn radical_generator_strips_multiplicity() {
        let v = vs(&["x", "y"]);
        let gens = [p("(x - y)^2", &v)];
        let g = radical_elim_generator(&gens, &["x", "y"], &cfg()).unwrap();
        assert_eq!(g, p("x - y", &v));
    }

    #[test]
    fn univariate_radical_generator_is_monic() {
        let v = vs(&["x", "y"]);
        let gens = [p("2*x^2 - 2", &v), p("y", &v)];
        let g = radical_elim_generator(&gens, &["x"], &cfg()).unwrap();
        assert_eq!(g, p("x^2 - 1", &vs(&["x"])));
    }

    #[test]
    fn normal_form_detects_membership() {
        let v = vs(&["x", "y"]);
        let gens = [p("x^2 - y", &v), p("y^2 - 1", &v)];
        let order = MonomialOrder::grevlex(vec!["x", "y"]);
        let gb = buchberger(&gens, &order, &cfg()).unwrap();
        let member = p("(x^2 - y)*(x + 3) + (y^2 - 1)*y", &v);
        assert!(normal_form(&member, &gb).is_zero());
        assert!(!normal_form(&p("x + 1", &v), &gb).is_zero());
    }
}
