//! The probabilistic elimination pipeline.
//!
//! Instead of one big symbolic Gröbner basis, the generator `E_f` of
//! `sqrt(<f> ∩ Q[u, p0])` is recovered from many small eliminations of
//! specialized systems:
//!
//! 1. degree bookkeeping (`degrees`): ML-degree `N`, the `S(u)`-factor
//!    multiplicities `alpha_i` of each coefficient, and per-parameter
//!    degree bounds `L` and `Omega`;
//! 2. the leading coefficient `A_N = S^{alpha_N} R_N` by interpolating
//!    `R_N` from univariate slices (`leading_coefficient`);
//! 3. the remaining `A_i = S^{alpha_i} R_i` by interpolating `R_i` from
//!    fully specialized monic eliminants (`coefficients`).
//!
//! Every stage validates its samples and resamples on degeneracy; a final
//! fresh specialization must match the assembled polynomial exactly before
//! the result is marked verified. Sample points come from a seeded ChaCha8
//! stream, are pre-generated per stage, and are joined by index, so a seed
//! determines the result bit for bit regardless of task parallelism.

use crate::groebner::{radical_elim_generator_staged, GbConfig, GbError};
use crate::linalg::{solve_exact, LinalgError, RatMatrix};
use crate::models::{likelihood_system, scaled_system, LagrangeSystem, ModelError, ModelSpec};
use crate::poly::{factor_multiplicity, MonomialOrder, Monomial, MultiPoly, VarSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("ML-degree disagrees across parameter specializations ({0} vs {1})")]
    InconsistentDegrees(i64, i64),
    #[error("degree bookkeeping stayed unstable across retries; the system does not look general zero-dimensional")]
    NotGeneralZeroDimensional,
    #[error("S-factor multiplicity {found} at a sample, expected {expected}")]
    UnexpectedMultiplicity { expected: u32, found: u32 },
    #[error("specialized eliminant degree {found} dropped below N = {expected}")]
    DegreeDrop { expected: u32, found: u32 },
    #[error("interpolation matrix stayed singular across retries")]
    SingularSamples,
    #[error("verification sample disagreed with the interpolated polynomial")]
    VerificationFailed,
    #[error("assumption (A1) failed even after reparameterization")]
    AssumptionA1Violated,
    #[error("structure constants disagreed across independent specializations")]
    InconsistentStructure,
}

impl From<LinalgError> for PipelineError {
    fn from(_: LinalgError) -> Self {
        PipelineError::SingularSamples
    }
}

fn is_fatal(e: &PipelineError) -> bool {
    matches!(
        e,
        PipelineError::Gb(GbError::ResourceLimit { .. })
            | PipelineError::Gb(GbError::NonPrincipal { .. })
            | PipelineError::Model(_)
    )
}

/// Knobs of the probabilistic pipeline.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Seed of the ChaCha8 sample stream.
    pub seed: u64,
    /// Retries per stage before a degeneracy error becomes fatal.
    pub retries: u32,
    pub gb: GbConfig,
    /// Sample points are integers drawn uniformly from this range.
    pub sample_range: (i64, i64),
    /// Fan sample eliminations out across threads.
    pub parallel: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            retries: 5,
            gb: GbConfig::default(),
            sample_range: (1, 10_000),
            parallel: true,
        }
    }
}

/// Output of the degree stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    /// ML-degree `N = deg(E_f, p0)`.
    pub n: u32,
    /// `alpha[i]` = multiplicity of `S(u)` in `coeff(E_f, p0^i)`, length `N+1`.
    pub alpha: Vec<u32>,
    /// `l[j] = deg(lcoeff(E_f, p0), u_j)`, length `n+1`.
    pub l: Vec<i64>,
    /// `omega[i][j] = deg(coeff(E_f, p0^i), u_j)`, `N` rows, `-1` for a zero
    /// coefficient.
    pub omega: Vec<Vec<i64>>,
}

impl DegreeProfile {
    /// Reads the profile off an explicit polynomial (used to describe
    /// direct-elimination results and back-mapped outputs).
    pub fn of_polynomial(e_f: &MultiPoly, parameters: &[String], first_unknown: &str) -> Self {
        let n = e_f.degree(first_unknown).max(0) as u32;
        let s_u = sum_over(e_f.vars(), parameters);
        let mut alpha = Vec::with_capacity(n as usize + 1);
        for i in 0..=n {
            let c = e_f.coeff_of(first_unknown, i);
            if c.is_zero() {
                alpha.push(0);
            } else {
                alpha.push(factor_multiplicity(&c, &s_u).0);
            }
        }
        let lc = e_f.lcoeff(first_unknown);
        let l: Vec<i64> = parameters.iter().map(|u| lc.degree(u)).collect();
        let omega: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let c = e_f.coeff_of(first_unknown, i);
                parameters.iter().map(|u| c.degree(u)).collect()
            })
            .collect();
        DegreeProfile { n, alpha, l, omega }
    }
}

/// `(N, t, l, delta)` of the structure theorem, plus enough context to
/// evaluate the structured discriminant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    pub n: u32,
    pub t: u32,
    pub l: u32,
    pub delta: u32,
    pub parameters: Vec<String>,
    pub first_unknown: String,
    /// The specialized cofactor `C(u_0)` observed during detection,
    /// normalized; degree > 0 flags a nontrivial `C(u)`.
    pub c_spec: MultiPoly,
}

impl StructureConstants {
    pub fn c_degree(&self) -> i64 {
        self.c_spec.total_degree()
    }
}

/// The assembled eliminant and its provenance.
#[derive(Debug, Clone)]
pub struct EliminationResult {
    pub e_f: MultiPoly,
    pub profile: DegreeProfile,
    pub seed: u64,
    pub samples_used: u64,
    pub verified: bool,
}

fn sum_over(vars: &VarSet, parameters: &[String]) -> MultiPoly {
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

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A fully specialized monic radical eliminant in the first unknown
/// (Algorithm "Intersect"). `expected_n` guards against degenerate samples.
pub fn intersect(
    sys: &LagrangeSystem,
    b: &[BigRational],
    expected_n: Option<u32>,
    gb: &GbConfig,
) -> Result<MultiPoly, PipelineError> {
    assert_eq!(b.len(), sys.parameters.len());
    let values: BTreeMap<String, BigRational> = sys
        .parameters
        .iter()
        .cloned()
        .zip(b.iter().cloned())
        .collect();
    let gens = sys.specialize_with_hint(&values);
    let g = radical_elim_generator_staged(&gens, &sys.elimination_stages(), &[sys.first_unknown()], gb)?;
    if let Some(n) = expected_n {
        let found = g.degree(sys.first_unknown()).max(0) as u32;
        if found != n {
            return Err(PipelineError::DegreeDrop { expected: n, found });
        }
    }
    Ok(g)
}

/// One leading-coefficient sample (Algorithm "IntersectForLC"): specialize
/// `u_1..u_n` at `b`, divide `lcoeff(g, p0)` by `(u_0 + sum b)^{alpha_N}`,
/// and return the monic quotient in `u_0`.
pub fn intersect_for_lc(
    sys: &LagrangeSystem,
    b: &[BigRational],
    alpha_n: u32,
    gb: &GbConfig,
) -> Result<MultiPoly, PipelineError> {
    let u0 = sys.parameters[0].clone();
    assert_eq!(b.len(), sys.parameters.len() - 1);
    let values: BTreeMap<String, BigRational> = sys.parameters[1..]
        .iter()
        .cloned()
        .zip(b.iter().cloned())
        .collect();
    let gens = sys.specialize_with_hint(&values);
    let g = radical_elim_generator_staged(
        &gens,
        &sys.elimination_stages(),
        &[u0.as_str(), sys.first_unknown()],
        gb,
    )?;
    let lc = g.lcoeff(sys.first_unknown());
    let vars = lc.vars().clone();
    let sum_b: BigRational = b.iter().cloned().fold(BigRational::zero(), |a, x| a + x);
    let shifted = MultiPoly::var(&vars, &u0)
        .unwrap()
        .add(&MultiPoly::constant(&vars, sum_b));
    let (mult, cof) = if lc.is_constant() {
        (0, lc.clone())
    } else {
        factor_multiplicity(&lc, &shifted)
    };
    if mult != alpha_n {
        return Err(PipelineError::UnexpectedMultiplicity {
            expected: alpha_n,
            found: mult,
        });
    }
    Ok(cof.monic_in(&u0))
}

/// All exponent vectors with the given total and per-variable bounds,
/// returned in descending grevlex order (fixed for reproducibility).
fn enumerate_monomials(nvars: usize, total: i64, bounds: &[i64]) -> Vec<Monomial> {
    let mut out = Vec::new();
    if total < 0 {
        return out;
    }
    fn go(
        pos: usize,
        remaining: i64,
        bounds: &[i64],
        cur: &mut Vec<u32>,
        out: &mut Vec<Monomial>,
    ) {
        if pos == bounds.len() {
            if remaining == 0 {
                out.push(Monomial::from_exponents(cur.clone()));
            }
            return;
        }
        let cap = bounds[pos].min(remaining);
        if cap < 0 {
            return;
        }
        for e in 0..=cap {
            cur[pos] = e as u32;
            go(pos + 1, remaining - e, bounds, cur, out);
        }
        cur[pos] = 0;
    }
    let mut cur = vec![0u32; nvars];
    go(0, total, bounds, &mut cur, &mut out);
    let names: Vec<String> = (0..nvars).map(|i| format!("v{i}")).collect();
    let vs = VarSet::new(names.clone());
    let cmp = MonomialOrder::grevlex(names).compile(&vs);
    out.sort_by(|a, b| cmp.cmp(b, a));
    out
}

fn eval_monomial(m: &Monomial, b: &[BigRational]) -> BigRational {
    let mut acc = BigRational::one();
    for (i, &e) in m.exponents().iter().enumerate() {
        for _ in 0..e {
            acc *= &b[i];
        }
    }
    acc
}

fn monomial_to_poly(m: &Monomial, vars: &VarSet, var_names: &[String]) -> MultiPoly {
    let mut exps = vec![0u32; vars.len()];
    for (i, &e) in m.exponents().iter().enumerate() {
        if e > 0 {
            exps[vars.index_of(&var_names[i]).unwrap()] = e;
        }
    }
    MultiPoly::from_terms(vars, [(Monomial::from_exponents(exps), BigRational::one())])
}

/// Applies the `(A2)` normalization: scale so that the `u_0`-leading
/// coefficient of `lcoeff(E_f, p0)` becomes 1. Falls back to the primitive
/// normalization when that coefficient is not constant (A1 violated).
pub fn normalize_a2(e_f: &MultiPoly, u0: &str, first_unknown: &str) -> MultiPoly {
    let a_n = e_f.lcoeff(first_unknown);
    let d0 = a_n.degree(u0);
    if d0 < 0 {
        return e_f.normalized();
    }
    match a_n.coeff_of(u0, d0 as u32).constant_value() {
        Some(c) if !c.is_zero() => e_f.scale(&c.recip()),
        _ => e_f.normalized(),
    }
}

/// Driver object owning the seeded sample stream.
pub struct Pipeline<'a> {
    sys: &'a LagrangeSystem,
    cfg: PipelineConfig,
    rng: ChaCha8Rng,
    samples_used: u64,
}

impl<'a> Pipeline<'a> {
    pub fn new(sys: &'a LagrangeSystem, cfg: PipelineConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Pipeline {
            sys,
            cfg,
            rng,
            samples_used: 0,
        }
    }

    pub fn samples_used(&self) -> u64 {
        self.samples_used
    }

    fn draw_point(&mut self, len: usize) -> Vec<BigRational> {
        let (lo, hi) = self.cfg.sample_range;
        (0..len).map(|_| rat(self.rng.gen_range(lo..=hi))).collect()
    }

    /// Runs `f` over the batch, in parallel when configured; results are
    /// joined by input index.
    fn batch<T, R, F>(&self, inputs: &[T], f: F) -> Vec<Result<R, PipelineError>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Result<R, PipelineError> + Sync,
    {
        if self.cfg.parallel {
            inputs.par_iter().map(&f).collect()
        } else {
            inputs.iter().map(&f).collect()
        }
    }

    /// Algorithm "Degrees": one bivariate elimination per parameter.
    pub fn degrees(&mut self) -> Result<DegreeProfile, PipelineError> {
        self.degrees_of(self.sys)
    }

    fn degrees_of(&mut self, sys: &LagrangeSystem) -> Result<DegreeProfile, PipelineError> {
        let nu = sys.parameters.len();
        let p0 = sys.first_unknown().to_string();
        let gb = self.cfg.gb;
        let mut last_err = PipelineError::NotGeneralZeroDimensional;
        for _ in 0..=self.cfg.retries {
            let draws: Vec<(usize, Vec<BigRational>)> =
                (0..nu).map(|j| (j, self.draw_point(nu - 1))).collect();
            self.samples_used += nu as u64;
            let results = self.batch(&draws, |(j, b)| {
                let keep_u = sys.parameters[*j].clone();
                let values: BTreeMap<String, BigRational> = sys
                    .parameters
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| k != j)
                    .map(|(k, u)| {
                        let bi = if k < *j { k } else { k - 1 };
                        (u.clone(), b[bi].clone())
                    })
                    .collect();
                let gens = sys.specialize_with_hint(&values);
                radical_elim_generator_staged(
                    &gens,
                    &sys.elimination_stages(),
                    &[keep_u.as_str(), p0.as_str()],
                    &gb,
                )
                .map_err(PipelineError::from)
            });
            let mut gs: Vec<MultiPoly> = Vec::with_capacity(nu);
            let mut round_err: Option<PipelineError> = None;
            for r in results {
                match r {
                    Ok(g) => gs.push(g),
                    Err(e) if is_fatal(&e) => return Err(e),
                    Err(e) => {
                        round_err = Some(e);
                        break;
                    }
                }
            }
            if let Some(e) = round_err {
                last_err = e;
                continue;
            }
            let n0 = gs[0].degree(&p0);
            if n0 < 1 {
                last_err = PipelineError::NotGeneralZeroDimensional;
                continue;
            }
            if let Some(bad) = gs[1..].iter().map(|g| g.degree(&p0)).find(|&d| d != n0) {
                last_err = PipelineError::InconsistentDegrees(n0, bad);
                continue;
            }
            let n = n0 as u32;
            // alpha from the j = 0 run: multiplicity of u_0 + sum(b) in each
            // coefficient of the bivariate eliminant.
            let g0 = &gs[0];
            let sum_b: BigRational = draws[0]
                .1
                .iter()
                .cloned()
                .fold(BigRational::zero(), |a, x| a + x);
            let vars0 = g0.vars().clone();
            let shifted = MultiPoly::var(&vars0, &sys.parameters[0])
                .unwrap()
                .add(&MultiPoly::constant(&vars0, sum_b));
            let mut alpha = Vec::with_capacity(n as usize + 1);
            for i in 0..=n {
                let c = g0.coeff_of(&p0, i);
                if c.is_zero() || c.is_constant() {
                    alpha.push(0);
                } else {
                    alpha.push(factor_multiplicity(&c, &shifted).0);
                }
            }
            let mut l = Vec::with_capacity(nu);
            let mut omega = vec![Vec::with_capacity(nu); n as usize];
            for (j, g) in gs.iter().enumerate() {
                let uj = &sys.parameters[j];
                l.push(g.lcoeff(&p0).degree(uj));
                for (i, row) in omega.iter_mut().enumerate() {
                    row.push(g.coeff_of(&p0, i as u32).degree(uj));
                }
            }
            return Ok(DegreeProfile { n, alpha, l, omega });
        }
        // Persistent degree instability is the heuristic signal that the
        // system is not general zero-dimensional.
        match last_err {
            PipelineError::InconsistentDegrees(_, _) => {
                Err(PipelineError::NotGeneralZeroDimensional)
            }
            e => Err(e),
        }
    }

    /// Algorithm "LeadingCoefficient".
    pub fn leading_coefficient(
        &mut self,
        profile: &DegreeProfile,
    ) -> Result<MultiPoly, PipelineError> {
        self.leading_coefficient_of(self.sys, profile)
    }

    fn leading_coefficient_of(
        &mut self,
        sys: &LagrangeSystem,
        profile: &DegreeProfile,
    ) -> Result<MultiPoly, PipelineError> {
        let params = sys.parameters.clone();
        let uvars = VarSet::new(params.clone());
        let alpha_n = *profile.alpha.last().unwrap();
        let s_u = sum_over(&uvars, &params);
        let d = profile.l[0] - alpha_n as i64;
        if d < 0 {
            return Err(PipelineError::NotGeneralZeroDimensional);
        }
        let u0 = MultiPoly::var(&uvars, &params[0]).unwrap();
        if d == 0 {
            // (A2): R_N = 1, the leading coefficient is the bare S-power.
            return Ok(s_u.pow(alpha_n));
        }
        let bounds: Vec<i64> = profile.l[1..]
            .iter()
            .map(|l| (l - alpha_n as i64).max(0))
            .collect();
        let slots: Vec<Vec<Monomial>> = (0..d)
            .map(|i| enumerate_monomials(params.len() - 1, d - i, &bounds))
            .collect();
        let t = slots.iter().map(Vec::len).max().unwrap_or(0);

        let mut last_err = PipelineError::SingularSamples;
        'round: for _ in 0..=self.cfg.retries {
            let samples = match self.collect_lc_samples(sys, t, alpha_n, d) {
                Ok(s) => s,
                Err(e) if is_fatal(&e) => return Err(e),
                Err(e) => {
                    last_err = e;
                    continue 'round;
                }
            };
            let mut acc = u0.pow(d as u32);
            for (i, slot) in slots.iter().enumerate() {
                let ti = slot.len();
                if ti == 0 {
                    continue;
                }
                let mut entries = Vec::with_capacity(ti * ti);
                let mut rhs = Vec::with_capacity(ti);
                for (b, q) in samples.iter().take(ti) {
                    for mono in slot {
                        entries.push(eval_monomial(mono, b));
                    }
                    rhs.push(
                        q.coeff_of(&params[0], i as u32)
                            .constant_value()
                            .expect("sampled quotient is univariate"),
                    );
                }
                let mat = RatMatrix::new(ti, ti, entries);
                let coeffs = match solve_exact(&mat, &rhs) {
                    Ok(c) => c,
                    Err(LinalgError::SingularMatrix) => {
                        last_err = PipelineError::SingularSamples;
                        continue 'round;
                    }
                };
                let mut ci = MultiPoly::zero(&uvars);
                for (c, mono) in coeffs.iter().zip(slot) {
                    if !c.is_zero() {
                        let mp = monomial_to_poly(mono, &uvars, &params[1..]);
                        ci = ci.add(&mp.scale(c));
                    }
                }
                acc = acc.add(&ci.mul(&u0.pow(i as u32)));
            }
            return Ok(s_u.pow(alpha_n).mul(&acc));
        }
        Err(last_err)
    }

    /// Draws and validates `t` leading-coefficient samples, redrawing
    /// degenerate ones by index.
    fn collect_lc_samples(
        &mut self,
        sys: &LagrangeSystem,
        t: usize,
        alpha_n: u32,
        d: i64,
    ) -> Result<Vec<(Vec<BigRational>, MultiPoly)>, PipelineError> {
        let nu = sys.parameters.len();
        let gb = self.cfg.gb;
        let u0 = sys.parameters[0].clone();
        let mut out: Vec<Option<(Vec<BigRational>, MultiPoly)>> = vec![None; t];
        let mut last_err = PipelineError::UnexpectedMultiplicity {
            expected: alpha_n,
            found: u32::MAX,
        };
        for _ in 0..=self.cfg.retries {
            let missing: Vec<usize> = (0..t).filter(|&k| out[k].is_none()).collect();
            if missing.is_empty() {
                return Ok(out.into_iter().map(Option::unwrap).collect());
            }
            let draws: Vec<(usize, Vec<BigRational>)> = missing
                .iter()
                .map(|&k| (k, self.draw_point(nu - 1)))
                .collect();
            self.samples_used += draws.len() as u64;
            let results = self.batch(&draws, |(_, b)| intersect_for_lc(sys, b, alpha_n, &gb));
            for ((k, b), r) in draws.into_iter().zip(results) {
                match r {
                    Ok(q) if q.degree(&u0) == d => out[k] = Some((b, q)),
                    Ok(q) => {
                        last_err = PipelineError::DegreeDrop {
                            expected: d as u32,
                            found: q.degree(&u0).max(0) as u32,
                        }
                    }
                    Err(e) if is_fatal(&e) => return Err(e),
                    Err(e) => last_err = e,
                }
            }
        }
        Err(last_err)
    }

    /// Algorithm "Coefficients".
    pub fn coefficients(
        &mut self,
        a_n: &MultiPoly,
        profile: &DegreeProfile,
    ) -> Result<Vec<MultiPoly>, PipelineError> {
        self.coefficients_of(self.sys, a_n, profile)
    }

    fn coefficients_of(
        &mut self,
        sys: &LagrangeSystem,
        a_n: &MultiPoly,
        profile: &DegreeProfile,
    ) -> Result<Vec<MultiPoly>, PipelineError> {
        let params = sys.parameters.clone();
        let uvars = VarSet::new(params.clone());
        let s_u = sum_over(&uvars, &params);
        let p0 = sys.first_unknown().to_string();
        let n = profile.n;
        let d_total = a_n.total_degree();
        let slots: Vec<Vec<Monomial>> = (0..n as usize)
            .map(|i| {
                let bounds: Vec<i64> = profile.omega[i]
                    .iter()
                    .map(|w| w - profile.alpha[i] as i64)
                    .collect();
                enumerate_monomials(params.len(), d_total - profile.alpha[i] as i64, &bounds)
            })
            .collect();
        let t = slots.iter().map(Vec::len).max().unwrap_or(0);

        let mut last_err = PipelineError::SingularSamples;
        'round: for _ in 0..=self.cfg.retries {
            let samples = match self.collect_full_samples(sys, t, n, a_n) {
                Ok(s) => s,
                Err(e) if is_fatal(&e) => return Err(e),
                Err(e) => {
                    last_err = e;
                    continue 'round;
                }
            };
            let mut out = Vec::with_capacity(n as usize);
            for (i, slot) in slots.iter().enumerate() {
                let ti = slot.len();
                if ti == 0 {
                    out.push(MultiPoly::zero(&uvars));
                    continue;
                }
                let alpha_i = profile.alpha[i];
                let mut entries = Vec::with_capacity(ti * ti);
                let mut rhs = Vec::with_capacity(ti);
                for (b, g) in samples.iter().take(ti) {
                    let point: BTreeMap<String, BigRational> =
                        params.iter().cloned().zip(b.iter().cloned()).collect();
                    let a_n_b = a_n.eval_point(&point).expect("A_N is a u-polynomial");
                    let s_b: BigRational =
                        b.iter().cloned().fold(BigRational::zero(), |a, x| a + x);
                    let mut scale = BigRational::one() / a_n_b;
                    for _ in 0..alpha_i {
                        scale *= &s_b;
                    }
                    for mono in slot {
                        entries.push(eval_monomial(mono, b) * &scale);
                    }
                    rhs.push(
                        g.coeff_of(&p0, i as u32)
                            .constant_value()
                            .expect("sampled eliminant is univariate"),
                    );
                }
                let mat = RatMatrix::new(ti, ti, entries);
                let coeffs = match solve_exact(&mat, &rhs) {
                    Ok(c) => c,
                    Err(LinalgError::SingularMatrix) => {
                        last_err = PipelineError::SingularSamples;
                        continue 'round;
                    }
                };
                let mut ri = MultiPoly::zero(&uvars);
                for (c, mono) in coeffs.iter().zip(slot) {
                    if !c.is_zero() {
                        let mp = monomial_to_poly(mono, &uvars, &params);
                        ri = ri.add(&mp.scale(c));
                    }
                }
                out.push(s_u.pow(alpha_i).mul(&ri));
            }
            return Ok(out);
        }
        Err(last_err)
    }

    /// Draws and validates `t` full specializations, rejecting points where
    /// `A_N` vanishes (the divide-by-zero guard) or the degree drops.
    fn collect_full_samples(
        &mut self,
        sys: &LagrangeSystem,
        t: usize,
        n: u32,
        a_n: &MultiPoly,
    ) -> Result<Vec<(Vec<BigRational>, MultiPoly)>, PipelineError> {
        let nu = sys.parameters.len();
        let gb = self.cfg.gb;
        let params = sys.parameters.clone();
        let mut out: Vec<Option<(Vec<BigRational>, MultiPoly)>> = vec![None; t];
        let mut last_err = PipelineError::DegreeDrop {
            expected: n,
            found: 0,
        };
        for _ in 0..=self.cfg.retries {
            let missing: Vec<usize> = (0..t).filter(|&k| out[k].is_none()).collect();
            if missing.is_empty() {
                return Ok(out.into_iter().map(Option::unwrap).collect());
            }
            let mut draws: Vec<(usize, Vec<BigRational>)> = Vec::with_capacity(missing.len());
            for &k in &missing {
                let mut b = self.draw_point(nu);
                for _ in 0..64 {
                    let point: BTreeMap<String, BigRational> =
                        params.iter().cloned().zip(b.iter().cloned()).collect();
                    if !a_n.eval_point(&point).unwrap().is_zero() {
                        break;
                    }
                    b = self.draw_point(nu);
                }
                draws.push((k, b));
            }
            self.samples_used += draws.len() as u64;
            let results = self.batch(&draws, |(_, b)| intersect(sys, b, Some(n), &gb));
            for ((k, b), r) in draws.into_iter().zip(results) {
                match r {
                    Ok(g) => out[k] = Some((b, g)),
                    Err(e) if is_fatal(&e) => return Err(e),
                    Err(e) => last_err = e,
                }
            }
        }
        Err(last_err)
    }

    /// Checks assumption (A1): the sampled total degree of
    /// `lcoeff(E_f, p0)` must equal its `u_0`-degree `L(1)`. The total
    /// degree is read off a specialization `u_j -> c_j T + e_j` along a
    /// fresh affine line. (A line through the origin would be degenerate:
    /// by homogeneity the whole eliminant picks up a global `T`-power that
    /// the radical strips away.)
    pub fn ensure_assumption_a1(
        &mut self,
        profile: &DegreeProfile,
    ) -> Result<bool, PipelineError> {
        self.ensure_assumption_a1_of(self.sys, profile)
    }

    fn ensure_assumption_a1_of(
        &mut self,
        sys: &LagrangeSystem,
        profile: &DegreeProfile,
    ) -> Result<bool, PipelineError> {
        let gb = self.cfg.gb;
        let p0 = sys.first_unknown().to_string();
        let universe = sys.universe();
        let mut tname = "t".to_string();
        while universe.index_of(&tname).is_some() {
            tname.push('_');
        }
        let tvars = VarSet::new([tname.clone()]);
        let tvar = MultiPoly::var(&tvars, &tname).unwrap();
        let mut last_err = PipelineError::NotGeneralZeroDimensional;
        for _ in 0..=self.cfg.retries {
            let c = self.draw_point(sys.parameters.len());
            let e = self.draw_point(sys.parameters.len());
            self.samples_used += 1;
            let bindings: BTreeMap<String, MultiPoly> = sys
                .parameters
                .iter()
                .zip(c.iter().zip(&e))
                .map(|(u, (cj, ej))| {
                    let line = tvar
                        .scale(cj)
                        .add(&MultiPoly::constant(&tvars, ej.clone()));
                    (u.clone(), line)
                })
                .collect();
            let mut gens: Vec<MultiPoly> = sys
                .equations
                .iter()
                .map(|f| f.substitute(&bindings))
                .collect();
            if let Some(h) = sys.multiplier_hint() {
                gens.push(h.substitute(&bindings));
            }
            match radical_elim_generator_staged(
                &gens,
                &sys.elimination_stages(),
                &[tname.as_str(), p0.as_str()],
                &gb,
            ) {
                Ok(g) => {
                    if g.degree(&p0) != profile.n as i64 {
                        last_err = PipelineError::InconsistentDegrees(
                            profile.n as i64,
                            g.degree(&p0),
                        );
                        continue;
                    }
                    let total = g.lcoeff(&p0).degree(&tname);
                    if total < profile.l[0] {
                        // Degenerate line: the top coefficient vanished.
                        last_err = PipelineError::DegreeDrop {
                            expected: profile.l[0].max(0) as u32,
                            found: total.max(0) as u32,
                        };
                        continue;
                    }
                    return Ok(total == profile.l[0]);
                }
                Err(e) => {
                    let e = PipelineError::from(e);
                    if is_fatal(&e) {
                        return Err(e);
                    }
                    last_err = e;
                }
            }
        }
        Err(last_err)
    }

    /// Invertible parameter change `v_0 = u_0`, `v_j = b_j u_j + u_0` used
    /// when (A1) fails; returns the transformed system and the inverse
    /// substitution for back-mapping results.
    pub fn reparameterize(&mut self) -> (LagrangeSystem, BTreeMap<String, MultiPoly>) {
        let b = self.draw_point(self.sys.parameters.len() - 1);
        reparameterize_with(self.sys, &b)
    }

    /// Algorithm "Main": degrees, leading coefficient, coefficients,
    /// assembly, and a fresh verification sample. Falls back to a
    /// reparameterized system when (A1) fails.
    pub fn run(&mut self) -> Result<EliminationResult, PipelineError> {
        let mut a1_failed_finally = false;
        for _ in 0..=self.cfg.retries {
            let profile = self.degrees()?;
            let (result, back) = if self.ensure_assumption_a1(&profile)? {
                (self.assemble(self.sys, &profile)?, None)
            } else {
                let (tsys, back) = self.reparameterize();
                let tprofile = self.degrees_of(&tsys)?;
                if !self.ensure_assumption_a1_of(&tsys, &tprofile)? {
                    a1_failed_finally = true;
                    continue;
                }
                (self.assemble(&tsys, &tprofile)?, Some(back))
            };
            // Back-map a reparameterized result into the original
            // parameters and re-normalize.
            let e_f = match &back {
                None => result,
                Some(bindings) => {
                    let mapped = result.substitute(bindings);
                    normalize_a2(
                        &mapped,
                        &self.sys.parameters[0],
                        self.sys.first_unknown(),
                    )
                }
            };
            // Verification: one extra fresh fully specialized sample must
            // match the assembled polynomial exactly.
            if self.verify(&e_f)? {
                let profile = DegreeProfile::of_polynomial(
                    &e_f,
                    &self.sys.parameters,
                    self.sys.first_unknown(),
                );
                return Ok(EliminationResult {
                    e_f,
                    profile,
                    seed: self.cfg.seed,
                    samples_used: self.samples_used,
                    verified: true,
                });
            }
        }
        if a1_failed_finally {
            Err(PipelineError::AssumptionA1Violated)
        } else {
            Err(PipelineError::VerificationFailed)
        }
    }

    fn assemble(
        &mut self,
        sys: &LagrangeSystem,
        profile: &DegreeProfile,
    ) -> Result<MultiPoly, PipelineError> {
        let a_n = self.leading_coefficient_of(sys, profile)?;
        let lower = self.coefficients_of(sys, &a_n, profile)?;
        let mut names = sys.parameters.clone();
        names.push(sys.first_unknown().to_string());
        let vars = VarSet::new(names);
        let p0 = MultiPoly::var(&vars, sys.first_unknown()).unwrap();
        let mut e_f = a_n.with_universe(&vars).mul(&p0.pow(profile.n));
        for (i, a_i) in lower.iter().enumerate() {
            if !a_i.is_zero() {
                e_f = e_f.add(&a_i.with_universe(&vars).mul(&p0.pow(i as u32)));
            }
        }
        Ok(e_f)
    }

    fn verify(&mut self, e_f: &MultiPoly) -> Result<bool, PipelineError> {
        let sys = self.sys;
        let params = sys.parameters.clone();
        let p0 = sys.first_unknown().to_string();
        let n = e_f.degree(&p0);
        if n < 1 {
            return Ok(false);
        }
        let gb = self.cfg.gb;
        for _ in 0..=self.cfg.retries {
            let b = self.draw_point(params.len());
            let point: BTreeMap<String, BigRational> =
                params.iter().cloned().zip(b.iter().cloned()).collect();
            let spec = e_f.substitute_values(&point);
            if spec.degree(&p0) != n {
                continue;
            }
            self.samples_used += 1;
            match intersect(sys, &b, Some(n as u32), &gb) {
                Ok(g) => return Ok(spec.monic_in(&p0) == g),
                Err(e) if is_fatal(&e) => return Err(e),
                Err(_) => continue,
            }
        }
        Ok(false)
    }
}

/// The parameter change with explicit scalars; kept separate so tests can
/// exercise the identity roundtrip.
pub fn reparameterize_with(
    sys: &LagrangeSystem,
    b: &[BigRational],
) -> (LagrangeSystem, BTreeMap<String, MultiPoly>) {
    assert_eq!(b.len(), sys.parameters.len() - 1);
    let uvars = VarSet::new(sys.parameters.clone());
    let u0 = MultiPoly::var(&uvars, &sys.parameters[0]).unwrap();
    // Forward: old u_j = (v_j - v_0) / b_j, reusing the same names.
    let mut forward: BTreeMap<String, MultiPoly> = BTreeMap::new();
    let mut back: BTreeMap<String, MultiPoly> = BTreeMap::new();
    for (j, uj) in sys.parameters.iter().enumerate().skip(1) {
        let vj = MultiPoly::var(&uvars, uj).unwrap();
        forward.insert(
            uj.clone(),
            vj.sub(&u0).scale(&(BigRational::one() / &b[j - 1])),
        );
        back.insert(uj.clone(), vj.scale(&b[j - 1]).add(&u0));
    }
    let equations: Vec<MultiPoly> = sys
        .equations
        .iter()
        .map(|f| f.substitute(&forward))
        .collect();
    (
        LagrangeSystem {
            equations,
            parameters: sys.parameters.clone(),
            prob_unknowns: sys.prob_unknowns.clone(),
            multipliers: sys.multipliers.clone(),
            source: sys.source.clone(),
        },
        back,
    )
}

/// Computes `(N, t, l, delta)` by the worked-example procedure: specialize
/// `u_1..u_n` in both the plain and the scaled system at the same point,
/// compare `G*(x0 -> (u0 + sum b) p0)` against `g*`, and read the factor
/// multiplicities off. Two independent specializations must agree.
pub fn structure_constants(
    m: &ModelSpec,
    cfg: &PipelineConfig,
) -> Result<StructureConstants, PipelineError> {
    let fsys = likelihood_system(m)?;
    let ssys = scaled_system(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo, hi) = cfg.sample_range;
    let nu = fsys.parameters.len();
    let mut rounds: Vec<StructureConstants> = Vec::new();
    let mut attempts = 0;
    while rounds.len() < 2 {
        if attempts > cfg.retries + 2 {
            return Err(PipelineError::InconsistentStructure);
        }
        attempts += 1;
        let b: Vec<BigRational> = (0..nu - 1).map(|_| rat(rng.gen_range(lo..=hi))).collect();
        match structure_round(&fsys, &ssys, &b, &cfg.gb) {
            Ok(sc) => rounds.push(sc),
            Err(e) if is_fatal(&e) => return Err(e),
            Err(_) => continue,
        }
        if rounds.len() == 2 {
            let (a, b2) = (&rounds[0], &rounds[1]);
            if (a.n, a.t, a.l, a.delta) != (b2.n, b2.t, b2.l, b2.delta) {
                // Disagreement: drop both and resample.
                rounds.clear();
                attempts += 1;
            }
        }
    }
    Ok(rounds.swap_remove(0))
}

fn structure_round(
    fsys: &LagrangeSystem,
    ssys: &crate::models::ScaledSystem,
    b: &[BigRational],
    gb: &GbConfig,
) -> Result<StructureConstants, PipelineError> {
    let u0 = fsys.parameters[0].clone();
    let p0 = fsys.first_unknown().to_string();
    let x0 = ssys.first_unknown().to_string();
    let fvals: BTreeMap<String, BigRational> = fsys.parameters[1..]
        .iter()
        .cloned()
        .zip(b.iter().cloned())
        .collect();
    let g_star = radical_elim_generator_staged(
        &fsys.specialize_with_hint(&fvals),
        &fsys.elimination_stages(),
        &[u0.as_str(), p0.as_str()],
        gb,
    )?;
    let g_big = radical_elim_generator_staged(
        &ssys.specialize_with_hint(&fvals),
        &ssys.elimination_stages(),
        &[u0.as_str(), x0.as_str()],
        gb,
    )?;
    let n = g_star.degree(&p0);
    if n < 1 || g_big.degree(&x0) != n {
        return Err(PipelineError::DegreeDrop {
            expected: n.max(0) as u32,
            found: g_big.degree(&x0).max(0) as u32,
        });
    }
    // Substitute x0 -> (u0 + sum b) * p0.
    let joint = VarSet::new([u0.clone(), p0.clone()]);
    let sum_b: BigRational = b.iter().cloned().fold(BigRational::zero(), |a, x| a + x);
    let shifted = MultiPoly::var(&joint, &u0)
        .unwrap()
        .add(&MultiPoly::constant(&joint, sum_b));
    let mut bind = BTreeMap::new();
    bind.insert(
        x0.clone(),
        shifted.mul(&MultiPoly::var(&joint, &p0).unwrap()),
    );
    let h = g_big.substitute(&bind);
    // h = c * C_spec(u0) * (u0 + sum b)^{t - l} * g_star.
    let l = if g_star.divisible_by(&shifted) { 1u32 } else { 0 };
    let delta = if g_big
        .divisible_by(&shifted.with_universe(&VarSet::new([u0.clone(), x0.clone()])))
    {
        1u32
    } else {
        0
    };
    let quotient = h
        .div_exact(&g_star)
        .ok_or(PipelineError::InconsistentStructure)?;
    let (t_minus_l, c_spec) = if quotient.is_constant() {
        (0u32, quotient.clone())
    } else {
        factor_multiplicity(&quotient, &shifted)
    };
    let t = t_minus_l + l;
    if t == 0 {
        // The structure theorem promises t > 0; treat as a bad sample.
        return Err(PipelineError::InconsistentStructure);
    }
    if !c_spec.is_constant() && c_spec.divisible_by(&shifted) {
        return Err(PipelineError::InconsistentStructure);
    }
    Ok(StructureConstants {
        n: n as u32,
        t,
        l,
        delta,
        parameters: fsys.parameters.clone(),
        first_unknown: p0,
        c_spec: c_spec.normalized(),
    })
}

#[cfg(test)]
mod tests;
