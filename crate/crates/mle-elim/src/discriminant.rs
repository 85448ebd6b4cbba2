//! Discriminants of univariate-in-`p0` polynomials with parametric
//! coefficients.
//!
//! The resultant route builds the Sylvester matrix of `p` and `dp/dv` and
//! divides the Bareiss determinant by the leading coefficient, with the
//! sign `(-1)^{N(N-1)/2}`; this matches the GKZ convention and the weight
//! identities `sum phi_k = 2N - 2` and `sum (N-k) phi_k = N(N-1)`. The
//! structured route evaluates the cached generic `D_N` at the tilde
//! coefficients and multiplies by `S(u)^{(N - 2(t-l-d))(N-1)}`.

use crate::interpolate::StructureConstants;
use crate::linalg::det_exact;
use crate::poly::{MultiPoly, VarSet};
use std::collections::HashMap;
use std::sync::Mutex;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiscrError {
    #[error("leading coefficient does not divide the resultant")]
    DivisionFailure,
    #[error("structure constants are inconsistent with the polynomial: {0}")]
    StructureViolation(String),
}

/// Resultant of `p` and `q` with respect to `v`, by Sylvester determinant.
pub fn resultant(p: &MultiPoly, q: &MultiPoly, v: &str) -> MultiPoly {
    let (p, q) = MultiPoly::aligned(p, q);
    let n = p.degree(v);
    let m = q.degree(v);
    assert!(n >= 0 && m >= 0, "resultant of a zero polynomial");
    let vars = p.vars().clone();
    if n == 0 {
        return p.pow(m as u32);
    }
    if m == 0 {
        return q.pow(n as u32);
    }
    let (n, m) = (n as usize, m as usize);
    let pc: Vec<MultiPoly> = (0..=n).rev().map(|k| p.coeff_of(v, k as u32)).collect();
    let qc: Vec<MultiPoly> = (0..=m).rev().map(|k| q.coeff_of(v, k as u32)).collect();
    let size = n + m;
    let zero = MultiPoly::zero(&vars);
    let mut rows = vec![vec![zero; size]; size];
    for i in 0..m {
        for (j, c) in pc.iter().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..n {
        for (j, c) in qc.iter().enumerate() {
            rows[m + i][i + j] = c.clone();
        }
    }
    det_exact(&rows)
}

/// `(-1)^{N(N-1)/2} * Res_v(p, dp/dv) / lcoeff(p, v)`, exact.
pub fn discr_resultant(p: &MultiPoly, v: &str) -> Result<MultiPoly, DiscrError> {
    let n = p.degree(v);
    assert!(n >= 1, "discriminant needs degree >= 1 in `{v}`");
    let dp = p.partial(v);
    let res = resultant(p, &dp, v);
    let lc = p.lcoeff(v);
    let quo = res.div_exact(&lc).ok_or(DiscrError::DivisionFailure)?;
    if (n * (n - 1) / 2) % 2 == 1 {
        Ok(quo.neg())
    } else {
        Ok(quo)
    }
}

/// The generic discriminant `D_N(c_0..c_N)`, weight-checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericDiscriminant {
    pub n: usize,
    /// Polynomial in fresh symbols `c0..cN`.
    pub poly: MultiPoly,
}

static DISCRIMINANT_CACHE: Mutex<Option<HashMap<usize, GenericDiscriminant>>> = Mutex::new(None);

/// `D_N` computed once per process from the generic degree-`N` polynomial.
pub fn generic_discriminant(n: usize) -> GenericDiscriminant {
    assert!(n >= 1, "generic discriminant needs N >= 1");
    let mut guard = DISCRIMINANT_CACHE.lock().unwrap();
    let cache = guard.get_or_insert_with(HashMap::new);
    if let Some(d) = cache.get(&n) {
        return d.clone();
    }
    let d = compute_generic_discriminant(n);
    cache.insert(n, d.clone());
    d
}

fn compute_generic_discriminant(n: usize) -> GenericDiscriminant {
    let mut names: Vec<String> = (0..=n).map(|k| format!("c{k}")).collect();
    names.push("z".to_string());
    let vars = VarSet::new(names);
    let z = MultiPoly::var(&vars, "z").unwrap();
    let mut f = MultiPoly::zero(&vars);
    for k in 0..=n {
        let ck = MultiPoly::var(&vars, &format!("c{k}")).unwrap();
        f = f.add(&ck.mul(&z.pow(k as u32)));
    }
    let poly = discr_resultant(&f, "z")
        .expect("generic leading coefficient divides its resultant")
        .shrunk_universe();
    let d = GenericDiscriminant { n, poly };
    assert!(
        check_gkz_weights(&d),
        "generic discriminant failed the GKZ weight identities"
    );
    d
}

/// Both weight identities, term by term.
pub fn check_gkz_weights(d: &GenericDiscriminant) -> bool {
    let n = d.n;
    let vars = d.poly.vars();
    let idx: Vec<Option<usize>> = (0..=n).map(|k| vars.index_of(&format!("c{k}"))).collect();
    d.poly.terms().all(|(m, _)| {
        let mut total = 0i64;
        let mut weighted = 0i64;
        for (k, pos) in idx.iter().enumerate() {
            let e = pos.map(|i| m.exponent(i)).unwrap_or(0) as i64;
            total += e;
            weighted += (n as i64 - k as i64) * e;
        }
        total == 2 * n as i64 - 2 && weighted == (n * (n - 1)) as i64
    })
}

/// The tilde coefficients of the structure theorem:
/// `~B_k * S^{k - (t-l-d)} = coeff(E_f, p0^k)` as an identity, with the
/// `S`-power placed on whichever side keeps the exponent non-negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TildeCoefficients {
    pub coeffs: Vec<MultiPoly>,
}

pub fn tilde_coefficients(
    e_f: &MultiPoly,
    sc: &StructureConstants,
) -> Result<TildeCoefficients, DiscrError> {
    let v = sc.first_unknown.as_str();
    let n = e_f.degree(v);
    if n != sc.n as i64 {
        return Err(DiscrError::StructureViolation(format!(
            "deg(E_f, {v}) = {n} but structure constants say N = {}",
            sc.n
        )));
    }
    let s_u = sum_of_data_over(e_f.vars(), &sc.parameters);
    let shift = sc.t as i64 - sc.l as i64 - sc.delta as i64;
    let mut coeffs = Vec::with_capacity(sc.n as usize + 1);
    for k in 0..=sc.n as i64 {
        let a_k = e_f.coeff_of(v, k as u32);
        let e = k - shift;
        let b_k = if e <= 0 {
            a_k.mul(&s_u.pow((-e) as u32))
        } else if a_k.is_zero() {
            a_k
        } else {
            a_k.div_exact(&s_u.pow(e as u32)).ok_or_else(|| {
                DiscrError::StructureViolation(format!(
                    "S(u)^{e} does not divide coeff(E_f, {v}^{k})"
                ))
            })?
        };
        coeffs.push(b_k);
    }
    Ok(TildeCoefficients { coeffs })
}

/// The `S(u)` exponent of the structured formula: `(N - 2(t-l-d))(N-1)`.
pub fn s_exponent(n: i64, t: i64, l: i64, delta: i64) -> i64 {
    (n - 2 * (t - l - delta)) * (n - 1)
}

/// `S(u)^{(N-2(t-l-d))(N-1)} * D_N(~B_0..~B_N)`; equals
/// `discr_resultant(E_f, p0)` exactly.
pub fn structured_discriminant(
    e_f: &MultiPoly,
    sc: &StructureConstants,
) -> Result<MultiPoly, DiscrError> {
    let tb = tilde_coefficients(e_f, sc)?;
    let n = sc.n as usize;
    if n == 1 {
        // Degree-one polynomials have discriminant 1.
        return Ok(MultiPoly::one(e_f.vars()));
    }
    let d_n = generic_discriminant(n);
    let s_u = sum_of_data_over(e_f.vars(), &sc.parameters);
    // Evaluate D_N at the tilde coefficients term by term.
    let cvars = d_n.poly.vars().clone();
    let cidx: Vec<Option<usize>> = (0..=n).map(|k| cvars.index_of(&format!("c{k}"))).collect();
    let mut acc = MultiPoly::zero(e_f.vars());
    for (m, coef) in d_n.poly.terms() {
        let mut term = MultiPoly::constant(e_f.vars(), coef.clone());
        for (k, pos) in cidx.iter().enumerate() {
            let e = pos.map(|i| m.exponent(i)).unwrap_or(0);
            if e > 0 {
                if term.is_zero() {
                    break;
                }
                term = term.mul(&tb.coeffs[k].pow(e));
            }
        }
        acc = acc.add(&term);
    }
    let exp = s_exponent(sc.n as i64, sc.t as i64, sc.l as i64, sc.delta as i64);
    if exp >= 0 {
        Ok(s_u.pow(exp as u32).mul(&acc))
    } else if acc.is_zero() {
        Ok(acc)
    } else {
        acc.div_exact(&s_u.pow((-exp) as u32)).ok_or_else(|| {
            DiscrError::StructureViolation(format!(
                "S(u)^{} does not divide D_N at the tilde coefficients",
                -exp
            ))
        })
    }
}

fn sum_of_data_over(vars: &VarSet, parameters: &[String]) -> MultiPoly {
    let mut all = vars.clone();
    for p in parameters {
        if all.index_of(p).is_none() {
            let (u, _, _) = all.union(&VarSet::new([p.clone()]));
            all = u;
        }
    }
    let mut s = MultiPoly::zero(&all);
    for p in parameters {
        s = s.add(&MultiPoly::var(&all, p).unwrap());
    }
    s
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

    #[test]
    fn quadratic_discriminant() {
        let v = vs(&["a", "b", "c", "v"]);
        let f = p("a*v^2 + b*v + c", &v);
        let d = discr_resultant(&f, "v").unwrap();
        assert_eq!(d, p("b^2 - 4*a*c", &v));
    }

    #[test]
    fn generic_cubic_discriminant_matches_d3() {
        let v = vs(&["c0", "c1", "c2", "c3", "v"]);
        let f = p("c3*v^3 + c2*v^2 + c1*v + c0", &v);
        let d = discr_resultant(&f, "v").unwrap();
        assert_eq!(
            d,
            p(
                "-27*c0^2*c3^2 + 18*c0*c1*c2*c3 - 4*c0*c2^3 - 4*c1^3*c3 + c1^2*c2^2",
                &v
            )
        );
    }

    #[test]
    fn double_root_discriminant_vanishes() {
        let v = vs(&["v"]);
        let f = p("(v - 1)^2", &v);
        assert!(discr_resultant(&f, "v").unwrap().is_zero());
    }

    #[test]
    fn generic_discriminants_cached_and_weighted() {
        let d2 = generic_discriminant(2);
        let c = vs(&["c0", "c1", "c2"]);
        assert_eq!(d2.poly, p("c1^2 - 4*c0*c2", &c));
        let d3 = generic_discriminant(3);
        let c3 = vs(&["c0", "c1", "c2", "c3"]);
        assert_eq!(
            d3.poly,
            p(
                "-27*c0^2*c3^2 + 18*c0*c1*c2*c3 - 4*c0*c2^3 - 4*c1^3*c3 + c1^2*c2^2",
                &c3
            )
        );
        for n in 2..=5 {
            assert!(check_gkz_weights(&generic_discriminant(n)), "N = {n}");
        }
        // Cache returns the identical value.
        assert_eq!(generic_discriminant(3), d3);
    }

    #[test]
    fn resultant_of_coprime_is_nonzero_and_of_common_root_zero() {
        let v = vs(&["v"]);
        let a = p("v^2 + 1", &v);
        let b = p("v - 3", &v);
        assert!(!resultant(&a, &b, "v").is_zero());
        let c = p("(v - 3)*(v + 5)", &v);
        assert!(resultant(&c, &b, "v").is_zero());
    }
}
