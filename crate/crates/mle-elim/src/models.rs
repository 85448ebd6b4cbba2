//! Algebraic statistical models, their Lagrange and scaled likelihood
//! systems, and the built-in model corpus.
//!
//! A model is a list of homogeneous invariants `g_1..g_s` in named
//! probability variables. The Lagrange system couples each probability
//! variable to a data parameter `u_i` and a multiplier block `lam_j`; the
//! scaled system substitutes `x_j = S(u) * p_j` with `S(u) = u_0 + ... + u_n`
//! and clears denominators.

use crate::linalg::det_exact;
use crate::poly::{parse_poly, MultiPoly, ParseError, VarSet};
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("invariant {index} is not homogeneous in the probability variables")]
    NonHomogeneousInvariant { index: usize },
    #[error("invariant {index} is zero")]
    ZeroInvariant { index: usize },
    #[error("model needs at least one invariant")]
    NoInvariants,
    #[error("unknown builtin model `{0}`")]
    UnknownModel(String),
    #[error("model file line {line}: {msg}")]
    FileFormat { line: usize, msg: String },
    #[error("model file line {line}: {source}")]
    InvariantParse { line: usize, source: ParseError },
    #[error("model is flagged heavy; pass --allow-heavy to run it")]
    HeavyModel,
}

/// A statistical model: named unknowns `p_0..p_n` and homogeneous
/// invariants over them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub name: String,
    /// Probability variable names; index 0 is the distinguished unknown.
    pub unknowns: Vec<String>,
    pub invariants: Vec<MultiPoly>,
    /// Multi-hour models are shipped as data but gated off by default.
    pub heavy: bool,
}

impl ModelSpec {
    /// Builds and validates a model from invariant strings.
    pub fn new(
        name: &str,
        unknowns: &[&str],
        invariant_texts: &[&str],
        heavy: bool,
    ) -> Result<ModelSpec, ModelError> {
        let pvars = VarSet::new(unknowns.iter().copied());
        let mut invariants = Vec::new();
        for (i, text) in invariant_texts.iter().enumerate() {
            let g = parse_poly(text, &pvars).map_err(|source| ModelError::InvariantParse {
                line: i + 1,
                source,
            })?;
            invariants.push(g);
        }
        let spec = ModelSpec {
            name: name.to_string(),
            unknowns: unknowns.iter().map(|s| s.to_string()).collect(),
            invariants,
            heavy,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.invariants.is_empty() {
            return Err(ModelError::NoInvariants);
        }
        let names: Vec<&str> = self.unknowns.iter().map(String::as_str).collect();
        for (i, g) in self.invariants.iter().enumerate() {
            if g.is_zero() {
                return Err(ModelError::ZeroInvariant { index: i + 1 });
            }
            if !g.is_homogeneous(&names) {
                return Err(ModelError::NonHomogeneousInvariant { index: i + 1 });
            }
        }
        Ok(())
    }

    /// `n` from the paper's indexing: `n + 1` probability variables.
    pub fn n(&self) -> usize {
        self.unknowns.len() - 1
    }

    pub fn s(&self) -> usize {
        self.invariants.len()
    }

    pub fn parameters(&self) -> Vec<String> {
        (0..self.unknowns.len()).map(|i| format!("u{i}")).collect()
    }

    pub fn multipliers(&self) -> Vec<String> {
        (1..=self.s() + 1).map(|j| format!("lam{j}")).collect()
    }

    pub fn scaled_unknowns(&self) -> Vec<String> {
        (0..self.unknowns.len()).map(|i| format!("x{i}")).collect()
    }
}

/// The Lagrange likelihood equations `f_0..f_{n+s+1}` of a model.
#[derive(Debug, Clone)]
pub struct LagrangeSystem {
    pub equations: Vec<MultiPoly>,
    pub parameters: Vec<String>,
    pub prob_unknowns: Vec<String>,
    pub multipliers: Vec<String>,
    pub source: Option<ModelSpec>,
}

impl LagrangeSystem {
    /// All unknowns in elimination-relevant order: probabilities then
    /// multipliers.
    pub fn unknowns(&self) -> Vec<String> {
        let mut v = self.prob_unknowns.clone();
        v.extend(self.multipliers.iter().cloned());
        v
    }

    /// The distinguished first unknown (the paper's `p_0`).
    pub fn first_unknown(&self) -> &str {
        &self.prob_unknowns[0]
    }

    pub fn universe(&self) -> VarSet {
        let mut names = self.parameters.clone();
        names.extend(self.prob_unknowns.iter().cloned());
        names.extend(self.multipliers.iter().cloned());
        VarSet::new(names)
    }

    /// Assembles a synthetic system from raw parts; used by the
    /// reparameterization fallback and by plant-and-recover tests.
    pub fn from_parts(
        equations: Vec<MultiPoly>,
        parameters: Vec<String>,
        prob_unknowns: Vec<String>,
        multipliers: Vec<String>,
    ) -> LagrangeSystem {
        LagrangeSystem {
            equations,
            parameters,
            prob_unknowns,
            multipliers,
            source: None,
        }
    }

    /// `S(u) = u_0 + ... + u_n` over this system's universe.
    pub fn sum_of_data(&self) -> MultiPoly {
        let vars = self.universe();
        let mut s = MultiPoly::zero(&vars);
        for u in &self.parameters {
            s = s.add(&MultiPoly::var(&vars, u).unwrap());
        }
        s
    }

    /// An extra generator that never changes the ideal: by Euler's identity
    /// on the homogeneous invariants,
    /// `sum_i f_i - lam_1 f_last - sum_j deg(g_j) lam_{j+1} f_{n+j}`
    /// collapses to `lam_1 - S(u)`. Handing this combination to the Gröbner
    /// engine removes a multiplier up front and speeds elimination up
    /// considerably. Only available for model-built systems.
    pub fn multiplier_hint(&self) -> Option<MultiPoly> {
        let m = self.source.as_ref()?;
        let vars = self.universe();
        let n = m.n();
        let mut h = MultiPoly::zero(&vars);
        for eq in &self.equations[..=n] {
            h = h.add(eq);
        }
        let lam1 = MultiPoly::var(&vars, &self.multipliers[0]).unwrap();
        h = h.sub(&lam1.mul(self.equations.last().unwrap()));
        for (j, g) in m.invariants.iter().enumerate() {
            let lam = MultiPoly::var(&vars, &self.multipliers[j + 1]).unwrap();
            let dj = MultiPoly::from_int(&vars, g.total_degree());
            h = h.sub(&dj.mul(&lam).mul(&self.equations[n + 1 + j]));
        }
        debug_assert_eq!(h, lam1.sub(&self.sum_of_data()));
        Some(h)
    }

    /// Specializes a subset of the parameters to rational values.
    pub fn specialize(&self, values: &BTreeMap<String, BigRational>) -> Vec<MultiPoly> {
        self.equations
            .iter()
            .map(|f| f.substitute_values(values))
            .collect()
    }

    /// Specialized equations plus the multiplier hint when available.
    pub fn specialize_with_hint(&self, values: &BTreeMap<String, BigRational>) -> Vec<MultiPoly> {
        let mut gens = self.specialize(values);
        if let Some(h) = self.multiplier_hint() {
            gens.push(h.substitute_values(values));
        }
        gens
    }

    /// Elimination staging for this system: multipliers first, then the
    /// probability variables other than `p_0`.
    pub fn elimination_stages(&self) -> Vec<Vec<String>> {
        vec![
            self.multipliers.clone(),
            self.prob_unknowns[1..].to_vec(),
        ]
    }
}

/// The scaled likelihood equations `F_0..F_{n+s+1}`.
#[derive(Debug, Clone)]
pub struct ScaledSystem {
    pub equations: Vec<MultiPoly>,
    pub parameters: Vec<String>,
    pub scaled_unknowns: Vec<String>,
    pub multipliers: Vec<String>,
    /// `d = max_j deg(g_j)`.
    pub d: u32,
    pub source: ModelSpec,
}

impl ScaledSystem {
    pub fn first_unknown(&self) -> &str {
        &self.scaled_unknowns[0]
    }

    pub fn universe(&self) -> VarSet {
        let mut names = self.parameters.clone();
        names.extend(self.scaled_unknowns.iter().cloned());
        names.extend(self.multipliers.iter().cloned());
        VarSet::new(names)
    }

    pub fn specialize(&self, values: &BTreeMap<String, BigRational>) -> Vec<MultiPoly> {
        self.equations
            .iter()
            .map(|f| f.substitute_values(values))
            .collect()
    }

    /// The scaled analogue of the multiplier identity:
    /// `S(u)^d (lam_1 - S(u))` as an explicit combination of the `F_i`.
    pub fn multiplier_hint(&self) -> MultiPoly {
        let m = &self.source;
        let vars = self.universe();
        let n = m.n();
        let mut s_u = MultiPoly::zero(&vars);
        for u in &self.parameters {
            s_u = s_u.add(&MultiPoly::var(&vars, u).unwrap());
        }
        let mut h = MultiPoly::zero(&vars);
        for eq in &self.equations[..=n] {
            h = h.add(eq);
        }
        let lam1 = MultiPoly::var(&vars, &self.multipliers[0]).unwrap();
        h = h.sub(
            &s_u.pow(self.d - 1)
                .mul(&lam1)
                .mul(self.equations.last().unwrap()),
        );
        for (j, g) in m.invariants.iter().enumerate() {
            let dj = g.total_degree() as u32;
            let lam = MultiPoly::var(&vars, &self.multipliers[j + 1]).unwrap();
            let coef = s_u
                .pow(self.d - dj)
                .scale(&BigRational::from_integer(num_bigint::BigInt::from(dj)));
            h = h.sub(&coef.mul(&lam).mul(&self.equations[n + 1 + j]));
        }
        debug_assert_eq!(h, s_u.pow(self.d).mul(&lam1.sub(&s_u)));
        h
    }

    pub fn specialize_with_hint(&self, values: &BTreeMap<String, BigRational>) -> Vec<MultiPoly> {
        let mut gens = self.specialize(values);
        gens.push(self.multiplier_hint().substitute_values(values));
        gens
    }

    /// Elimination staging: multipliers first, then the scaled variables
    /// other than `x_0`.
    pub fn elimination_stages(&self) -> Vec<Vec<String>> {
        vec![
            self.multipliers.clone(),
            self.scaled_unknowns[1..].to_vec(),
        ]
    }
}

/// The system of Lagrange likelihood equations:
/// `f_i = p_i (lam_1 + sum_j dg_j/dp_i lam_{j+1}) - u_i` for each
/// probability variable, then the invariants verbatim, then
/// `p_0 + ... + p_n - 1`.
pub fn likelihood_system(m: &ModelSpec) -> Result<LagrangeSystem, ModelError> {
    m.validate()?;
    let parameters = m.parameters();
    let multipliers = m.multipliers();
    let mut names = parameters.clone();
    names.extend(m.unknowns.iter().cloned());
    names.extend(multipliers.iter().cloned());
    let vars = VarSet::new(names);

    let invs: Vec<MultiPoly> = m.invariants.iter().map(|g| g.with_universe(&vars)).collect();
    let mut equations = Vec::with_capacity(m.n() + m.s() + 2);
    for (i, p_name) in m.unknowns.iter().enumerate() {
        let p = MultiPoly::var(&vars, p_name).unwrap();
        let u = MultiPoly::var(&vars, &parameters[i]).unwrap();
        let mut bracket = MultiPoly::var(&vars, &multipliers[0]).unwrap();
        for (j, g) in invs.iter().enumerate() {
            let lam = MultiPoly::var(&vars, &multipliers[j + 1]).unwrap();
            bracket = bracket.add(&g.partial(p_name).mul(&lam));
        }
        equations.push(p.mul(&bracket).sub(&u));
    }
    equations.extend(invs.iter().cloned());
    let mut simplex = MultiPoly::from_int(&vars, -1);
    for p_name in &m.unknowns {
        simplex = simplex.add(&MultiPoly::var(&vars, p_name).unwrap());
    }
    equations.push(simplex);

    Ok(LagrangeSystem {
        equations,
        parameters,
        prob_unknowns: m.unknowns.clone(),
        multipliers,
        source: Some(m.clone()),
    })
}

/// The scaled system: numerators of `f_i` under `p_j -> x_j / S(u)`,
/// cleared by the exact powers of `S(u)`:
/// `F_i = S^{d-1} x_i lam_1 + sum_j S^{d-deg g_j} x_i (dg_j/dp_i)(x) lam_{j+1} - S^d u_i`,
/// the invariants evaluated at `x`, and `x_0 + ... + x_n - S(u)`.
pub fn scaled_system(m: &ModelSpec) -> Result<ScaledSystem, ModelError> {
    m.validate()?;
    let parameters = m.parameters();
    let multipliers = m.multipliers();
    let xs = m.scaled_unknowns();
    let mut names = parameters.clone();
    names.extend(xs.iter().cloned());
    names.extend(multipliers.iter().cloned());
    let vars = VarSet::new(names);

    let mut s_u = MultiPoly::zero(&vars);
    for u in &parameters {
        s_u = s_u.add(&MultiPoly::var(&vars, u).unwrap());
    }
    // Rename p-variables to x-variables in each invariant.
    let to_x: BTreeMap<String, MultiPoly> = m
        .unknowns
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), MultiPoly::var(&vars, &xs[i]).unwrap()))
        .collect();
    let degs: Vec<u32> = m.invariants.iter().map(|g| g.total_degree() as u32).collect();
    let d = *degs.iter().max().unwrap();
    let invs_x: Vec<MultiPoly> = m
        .invariants
        .iter()
        .map(|g| g.substitute(&to_x).with_universe(&vars))
        .collect();

    let mut equations = Vec::with_capacity(m.n() + m.s() + 2);
    for (i, p_name) in m.unknowns.iter().enumerate() {
        let x = MultiPoly::var(&vars, &xs[i]).unwrap();
        let u = MultiPoly::var(&vars, &parameters[i]).unwrap();
        let lam1 = MultiPoly::var(&vars, &multipliers[0]).unwrap();
        let mut eq = s_u.pow(d - 1).mul(&x).mul(&lam1);
        for (j, g) in m.invariants.iter().enumerate() {
            let lam = MultiPoly::var(&vars, &multipliers[j + 1]).unwrap();
            let dg_x = g.partial(p_name).substitute(&to_x).with_universe(&vars);
            eq = eq.add(&s_u.pow(d - degs[j]).mul(&x).mul(&dg_x).mul(&lam));
        }
        eq = eq.sub(&s_u.pow(d).mul(&u));
        equations.push(eq);
    }
    equations.extend(invs_x.iter().cloned());
    let mut tail = s_u.neg();
    for x_name in &xs {
        tail = tail.add(&MultiPoly::var(&vars, x_name).unwrap());
    }
    equations.push(tail);

    Ok(ScaledSystem {
        equations,
        parameters,
        scaled_unknowns: xs,
        multipliers,
        d,
        source: m.clone(),
    })
}

/// Determinant of the Jacobian of the system with respect to
/// `(p_0..p_n, lam_1..lam_{s+1})`.
pub fn jacobian_det(sys: &LagrangeSystem) -> MultiPoly {
    let cols: Vec<String> = sys.unknowns();
    let rows: Vec<Vec<MultiPoly>> = sys
        .equations
        .iter()
        .map(|f| cols.iter().map(|v| f.partial(v)).collect())
        .collect();
    det_exact(&rows)
}

/// The built-in corpus: the worked examples plus the appendix models.
/// Heavy entries take hours to days at full scale and are only data here.
pub fn builtin_models() -> Vec<ModelSpec> {
    let m = |name: &str, unknowns: &[&str], invs: &[&str], heavy: bool| {
        ModelSpec::new(name, unknowns, invs, heavy).expect("builtin model must validate")
    };
    vec![
        m(
            "die",
            &["p0", "p1", "p2", "p3"],
            &["p0 + 2*p1 + 3*p2 - 4*p3"],
            false,
        ),
        m("coin", &["p0", "p1"], &["p0 - p1"], false),
        m(
            "random_censoring",
            &["p0", "p1", "p2", "p12"],
            &["2*p0*p1*p2 + p1^2*p2 + p1*p2^2 - p0^2*p12 + p1*p2*p12"],
            false,
        ),
        m(
            "3x3_zero_diagonal",
            &["p12", "p13", "p21", "p23", "p31", "p32"],
            &["p12*p23*p31 + p13*p21*p32"],
            false,
        ),
        m(
            "grassmannian_2_4",
            &["p12", "p13", "p14", "p23", "p24", "p34"],
            &["p12*p34 - p13*p24 + p14*p23"],
            false,
        ),
        m(
            "3x3_symmetric",
            &["p11", "p12", "p13", "p22", "p23", "p33"],
            &["8*p11*p22*p33 - 2*p11*p23^2 - 2*p12^2*p33 + 2*p12*p13*p23 - 2*p13^2*p22"],
            true,
        ),
        m(
            "bernoulli_3x3",
            &["p0", "p1", "p2", "p3", "p4"],
            &["288*p0*p2*p4 - 108*p0*p3^2 - 108*p1^2*p4 + 36*p1*p2*p3 - 8*p2^3"],
            true,
        ),
        m(
            "3x3_matrix",
            &["p00", "p01", "p02", "p10", "p11", "p12", "p20", "p21", "p22"],
            &["p00*p11*p22 - p00*p12*p21 - p01*p10*p22 + p01*p12*p20 + p02*p10*p21 - p02*p11*p20"],
            true,
        ),
        // Jukes-Cantor: q-coordinates expanded into p-coordinates.
        m(
            "jukes_cantor",
            &["p123", "pdis", "p12", "p13", "p23"],
            &[&jukes_cantor_invariant()],
            true,
        ),
        m(
            "fourier_pair",
            &["p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8"],
            &[
                &hadamard_product_invariant(1, 6, 0, 7),
                &hadamard_product_invariant(2, 5, 4, 3),
            ],
            true,
        ),
        m(
            "p_comb",
            &["p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8"],
            &[
                &hadamard_difference_invariant(2, 4),
                &hadamard_difference_invariant(1, 4),
                &hadamard_difference_invariant(3, 5),
                &hadamard_product_invariant(4, 6, 0, 7),
            ],
            true,
        ),
    ]
}

/// Looks up a builtin model by name.
pub fn builtin_model(name: &str) -> Result<ModelSpec, ModelError> {
    builtin_models()
        .into_iter()
        .find(|m| m.name == name)
        .ok_or_else(|| ModelError::UnknownModel(name.to_string()))
}

/// `q_k = sum_j (-1)^{<k, j>} p_{j+1}` over 3-bit indices: the signed sums
/// behind the phylogenetic appendix models.
fn hadamard_coordinate(k: usize) -> String {
    let mut out = String::new();
    for j in 0..8 {
        let bits = (k & j).count_ones();
        let sign = if bits % 2 == 0 { '+' } else { '-' };
        if j == 0 {
            if sign == '-' {
                out.push('-');
            }
        } else {
            out.push(' ');
            out.push(sign);
            out.push(' ');
        }
        let _ = write!(out, "p{}", j + 1);
    }
    out
}

/// `q_a q_b - q_c q_d` in p-coordinates.
fn hadamard_product_invariant(a: usize, b: usize, c: usize, d: usize) -> String {
    format!(
        "({})*({}) - ({})*({})",
        hadamard_coordinate(a),
        hadamard_coordinate(b),
        hadamard_coordinate(c),
        hadamard_coordinate(d)
    )
}

/// `q_a - q_b` in p-coordinates.
fn hadamard_difference_invariant(a: usize, b: usize) -> String {
    format!("({}) - ({})", hadamard_coordinate(a), hadamard_coordinate(b))
}

/// The Jukes-Cantor invariant `q000 q111^2 - q011 q101 q110` with the q's
/// written in (p123, pdis, p12, p13, p23).
fn jukes_cantor_invariant() -> String {
    let q111 = "(p123 + 1/3*pdis - 1/3*p12 - 1/3*p13 - 1/3*p23)";
    let q110 = "(p123 - 1/3*pdis + p12 - 1/3*p13 - 1/3*p23)";
    let q101 = "(p123 - 1/3*pdis - 1/3*p12 + p13 - 1/3*p23)";
    let q011 = "(p123 - 1/3*pdis - 1/3*p12 - 1/3*p13 + p23)";
    let q000 = "(p123 + pdis + p12 + p13 + p23)";
    format!("{q000}*{q111}^2 - {q011}*{q101}*{q110}")
}

// ---- model file format ------------------------------------------------------

/// Canonical text form: `name`, optional `heavy`, `unknowns`, `invariants`.
pub fn format_model(m: &ModelSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name = \"{}\"", m.name);
    if m.heavy {
        let _ = writeln!(out, "heavy = true");
    }
    let _ = writeln!(out, "unknowns = [{}]", m.unknowns.join(", "));
    let invs: Vec<String> = m.invariants.iter().map(|g| format!("\"{g}\"")).collect();
    let _ = writeln!(out, "invariants = [{}]", invs.join(", "));
    out
}

/// Parses the line-oriented model format; `#` starts a comment.
pub fn parse_model_file(text: &str) -> Result<ModelSpec, ModelError> {
    let mut name: Option<String> = None;
    let mut heavy = false;
    let mut unknowns: Option<Vec<String>> = None;
    let mut invariant_texts: Option<(usize, Vec<String>)> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let (key, value) = line.split_once('=').ok_or(ModelError::FileFormat {
            line: lineno,
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "name" => {
                name = Some(unquote(value).ok_or(ModelError::FileFormat {
                    line: lineno,
                    msg: "name must be a quoted string".into(),
                })?);
            }
            "heavy" => {
                heavy = match value {
                    "true" => true,
                    "false" => false,
                    _ => {
                        return Err(ModelError::FileFormat {
                            line: lineno,
                            msg: "heavy must be true or false".into(),
                        })
                    }
                };
            }
            "unknowns" => {
                let inner = bracketed(value).ok_or(ModelError::FileFormat {
                    line: lineno,
                    msg: "unknowns must be a [..] list".into(),
                })?;
                let names: Vec<String> = inner
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                if names.is_empty() {
                    return Err(ModelError::FileFormat {
                        line: lineno,
                        msg: "unknowns list is empty".into(),
                    });
                }
                unknowns = Some(names);
            }
            "invariants" => {
                let inner = bracketed(value).ok_or(ModelError::FileFormat {
                    line: lineno,
                    msg: "invariants must be a [..] list".into(),
                })?;
                let mut texts = Vec::new();
                for piece in split_quoted(inner).ok_or(ModelError::FileFormat {
                    line: lineno,
                    msg: "invariants must be quoted strings".into(),
                })? {
                    texts.push(piece);
                }
                invariant_texts = Some((lineno, texts));
            }
            other => {
                return Err(ModelError::FileFormat {
                    line: lineno,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
    }

    let name = name.ok_or(ModelError::FileFormat {
        line: 0,
        msg: "missing `name`".into(),
    })?;
    let unknowns = unknowns.ok_or(ModelError::FileFormat {
        line: 0,
        msg: "missing `unknowns`".into(),
    })?;
    let (inv_line, texts) = invariant_texts.ok_or(ModelError::FileFormat {
        line: 0,
        msg: "missing `invariants`".into(),
    })?;
    let unames: Vec<&str> = unknowns.iter().map(String::as_str).collect();
    let itexts: Vec<&str> = texts.iter().map(String::as_str).collect();
    ModelSpec::new(&name, &unames, &itexts, heavy).map_err(|e| match e {
        ModelError::InvariantParse { source, .. } => ModelError::InvariantParse {
            line: inv_line,
            source,
        },
        other => other,
    })
}

fn unquote(s: &str) -> Option<String> {
    let s = s.trim();
    if s.len() >= 2 && s.starts_with('"') && s.ends_with('"') {
        Some(s[1..s.len() - 1].to_string())
    } else {
        None
    }
}

fn bracketed(s: &str) -> Option<&str> {
    let s = s.trim();
    if s.starts_with('[') && s.ends_with(']') {
        Some(&s[1..s.len() - 1])
    } else {
        None
    }
}

/// Splits `"a", "b", ...` into the unquoted pieces.
fn split_quoted(s: &str) -> Option<Vec<String>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        if !rest.starts_with('"') {
            return None;
        }
        let end = rest[1..].find('"')? + 1;
        out.push(rest[1..end].to_string());
        rest = rest[end + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
        } else if !rest.is_empty() {
            return None;
        }
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

/// Scale factor identity exponents: substituting `x_j -> S(u) p_j` into
/// `F_i` returns `S^{e_i} f_i`; used by consistency tests.
pub fn scaling_exponent(m: &ModelSpec, i: usize) -> u32 {
    let d = m
        .invariants
        .iter()
        .map(|g| g.total_degree() as u32)
        .max()
        .unwrap_or(1);
    let n = m.n();
    let s = m.s();
    if i <= n {
        d
    } else if i <= n + s {
        m.invariants[i - n - 1].total_degree() as u32
    } else {
        1
    }
}

/// Rename map from scaled `x_j` to `S(u) * p_j` over a joint universe.
pub fn unscale_bindings(m: &ModelSpec) -> BTreeMap<String, MultiPoly> {
    let mut names = m.parameters();
    names.extend(m.unknowns.iter().cloned());
    let vars = VarSet::new(names);
    let mut s_u = MultiPoly::zero(&vars);
    for u in m.parameters() {
        s_u = s_u.add(&MultiPoly::var(&vars, &u).unwrap());
    }
    m.scaled_unknowns()
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let p = MultiPoly::var(&vars, &m.unknowns[j]).unwrap();
            (x.clone(), s_u.mul(&p))
        })
        .collect()
}

/// `S(u)` over just the parameter universe of a model.
pub fn sum_of_data(m: &ModelSpec) -> MultiPoly {
    let vars = VarSet::new(m.parameters());
    let mut s = MultiPoly::zero(&vars);
    for u in m.parameters() {
        s = s.add(&MultiPoly::var(&vars, &u).unwrap());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn die_system_matches_worked_example() {
        let m = builtin_model("die").unwrap();
        let sys = likelihood_system(&m).unwrap();
        assert_eq!(sys.equations.len(), 6);
        let vars = sys.universe();
        let p = |s: &str| parse_poly(s, &vars).unwrap();
        assert_eq!(sys.equations[0], p("p0*lam1 + p0*lam2 - u0"));
        assert_eq!(sys.equations[1], p("p1*lam1 + 2*p1*lam2 - u1"));
        assert_eq!(sys.equations[2], p("p2*lam1 + 3*p2*lam2 - u2"));
        assert_eq!(sys.equations[3], p("p3*lam1 - 4*p3*lam2 - u3"));
        assert_eq!(sys.equations[4], p("p0 + 2*p1 + 3*p2 - 4*p3"));
        assert_eq!(sys.equations[5], p("p0 + p1 + p2 + p3 - 1"));
    }

    #[test]
    fn die_scaled_system_matches_worked_example() {
        let m = builtin_model("die").unwrap();
        let sys = scaled_system(&m).unwrap();
        assert_eq!(sys.d, 1);
        let vars = sys.universe();
        let p = |s: &str| parse_poly(s, &vars).unwrap();
        let s_u = "(u0 + u1 + u2 + u3)";
        assert_eq!(sys.equations[0], p(&format!("x0*lam1 + x0*lam2 - {s_u}*u0")));
        assert_eq!(sys.equations[3], p(&format!("x3*lam1 - 4*x3*lam2 - {s_u}*u3")));
        assert_eq!(sys.equations[4], p("x0 + 2*x1 + 3*x2 - 4*x3"));
        assert_eq!(sys.equations[5], p(&format!("x0 + x1 + x2 + x3 - {s_u}")));
    }

    #[test]
    fn coin_systems() {
        let m = builtin_model("coin").unwrap();
        let f = likelihood_system(&m).unwrap();
        assert_eq!(f.equations.len(), 4);
        let vars = f.universe();
        let p = |s: &str| parse_poly(s, &vars).unwrap();
        assert_eq!(f.equations[0], p("p0*lam1 + p0*lam2 - u0"));
        assert_eq!(f.equations[1], p("p1*lam1 - p1*lam2 - u1"));
        let sf = scaled_system(&m).unwrap();
        let svars = sf.universe();
        let sp = |s: &str| parse_poly(s, &svars).unwrap();
        // Numerator semantics: the multiplier term keeps its x-factor.
        assert_eq!(sf.equations[0], sp("x0*lam1 + x0*lam2 - (u0 + u1)*u0"));
        assert_eq!(sf.equations[3], sp("x0 + x1 - (u0 + u1)"));
    }

    #[test]
    fn equation_count_and_verbatim_tail_for_all_builtins() {
        for m in builtin_models() {
            let sys = likelihood_system(&m).unwrap();
            assert_eq!(sys.equations.len(), m.n() + m.s() + 2, "{}", m.name);
            // Invariants verbatim in the middle block.
            for (j, g) in m.invariants.iter().enumerate() {
                assert_eq!(&sys.equations[m.n() + 1 + j], g, "{}", m.name);
            }
            // Simplex tail.
            let vars = sys.universe();
            let mut tail = MultiPoly::from_int(&vars, -1);
            for p in &m.unknowns {
                tail = tail.add(&MultiPoly::var(&vars, p).unwrap());
            }
            assert_eq!(*sys.equations.last().unwrap(), tail, "{}", m.name);
        }
    }

    #[test]
    fn scaling_consistency_for_all_builtins() {
        // substitute(F_i, x_j -> S(u) p_j) == S^{e_i} * f_i for every i.
        for m in builtin_models() {
            let f = likelihood_system(&m).unwrap();
            let sf = scaled_system(&m).unwrap();
            let bindings = unscale_bindings(&m);
            let s_u = sum_of_data(&m);
            for (i, fi_scaled) in sf.equations.iter().enumerate() {
                let lhs = fi_scaled.substitute(&bindings);
                let rhs = s_u.pow(scaling_exponent(&m, i)).mul(&f.equations[i]);
                assert_eq!(lhs, rhs, "{} equation {}", m.name, i);
            }
        }
    }

    #[test]
    fn random_censoring_lookup() {
        let m = builtin_model("random_censoring").unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(m.s(), 1);
        let pv = VarSet::new(m.unknowns.iter().cloned());
        let want =
            parse_poly("2*p0*p1*p2 + p1^2*p2 + p1*p2^2 - p0^2*p12 + p1*p2*p12", &pv).unwrap();
        assert_eq!(m.invariants[0], want);
        let sys = likelihood_system(&m).unwrap();
        assert_eq!(sys.equations.len(), 6);
    }

    #[test]
    fn grassmannian_lookup() {
        let m = builtin_model("grassmannian_2_4").unwrap();
        assert_eq!(m.unknowns.len(), 6);
        assert!(!m.heavy);
    }

    #[test]
    fn heavy_flags() {
        let heavy: Vec<String> = builtin_models()
            .into_iter()
            .filter(|m| m.heavy)
            .map(|m| m.name)
            .collect();
        assert_eq!(
            heavy,
            vec![
                "3x3_symmetric",
                "bernoulli_3x3",
                "3x3_matrix",
                "jukes_cantor",
                "fourier_pair",
                "p_comb"
            ]
        );
    }

    #[test]
    fn nonhomogeneous_invariant_is_rejected() {
        let err = ModelSpec::new("bad", &["p0", "p1"], &["p0^2 - p1"], false);
        assert_eq!(err, Err(ModelError::NonHomogeneousInvariant { index: 1 }));
    }

    #[test]
    fn model_file_roundtrip_bit_exact() {
        for m in builtin_models() {
            let text = format_model(&m);
            let back = parse_model_file(&text).unwrap();
            assert_eq!(back, m, "{}", m.name);
            assert_eq!(format_model(&back), text, "{}", m.name);
        }
    }

    #[test]
    fn model_file_accepts_comments_and_rejects_garbage() {
        let good = "# a die\nname = \"die\"\nunknowns = [p0, p1]\ninvariants = [\"p0 - p1\"]\n";
        let m = parse_model_file(good).unwrap();
        assert_eq!(m.name, "die");
        assert!(!m.heavy);
        let bad = "name = \"x\"\nunknowns = [p0]\ninvariants = [\"p0 +\"]\n";
        assert!(matches!(
            parse_model_file(bad),
            Err(ModelError::InvariantParse { .. })
        ));
        let bad2 = "name = \"x\"\nwat = 1\n";
        assert!(matches!(
            parse_model_file(bad2),
            Err(ModelError::FileFormat { line: 2, .. })
        ));
    }

    #[test]
    fn jacobian_of_toy_linear_system_is_constant() {
        // {p0 - u0, p0 + p1 - 1} style system has a constant Jacobian.
        let vars = VarSet::new(["u0", "p0", "p1"]);
        let p = |s: &str| parse_poly(s, &vars).unwrap();
        let sys = LagrangeSystem::from_parts(
            vec![p("p0 - u0"), p("p0 + p1 - 1")],
            vec!["u0".into()],
            vec!["p0".into(), "p1".into()],
            vec![],
        );
        let j = jacobian_det(&sys);
        assert!(j.is_constant() && !j.is_zero());
    }

    #[test]
    fn die_jacobian_matches_cofactor_expansion() {
        let m = builtin_model("die").unwrap();
        let sys = likelihood_system(&m).unwrap();
        let j = jacobian_det(&sys);
        // Independent route: recursive cofactor expansion.
        fn cofactor_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
            let n = m.len();
            if n == 1 {
                return m[0][0].clone();
            }
            let vars = m[0][0].vars().clone();
            let mut acc = MultiPoly::zero(&vars);
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MultiPoly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][j].mul(&cofactor_det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
        let cols = sys.unknowns();
        let rows: Vec<Vec<MultiPoly>> = sys
            .equations
            .iter()
            .map(|f| cols.iter().map(|v| f.partial(v)).collect())
            .collect();
        assert_eq!(j, cofactor_det(&rows));
        assert!(j.total_degree() >= 1);
    }
}
