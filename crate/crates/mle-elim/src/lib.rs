//! Exact computer algebra for Lagrange likelihood equations.
//!
//! This crate builds the critical-point equation systems of algebraic
//! statistical models, computes the generator `E_f` of the radical
//! elimination ideal `sqrt(<f> ∩ Q[u, p0])` either by direct Gröbner
//! elimination or by a structure-exploiting probabilistic interpolation,
//! and computes `discr(E_f; p0)` either from a Sylvester resultant or
//! from the structured product formula driven by the factor `S(u) = Σ u_k`.
//!
//! All arithmetic is exact over `Q` (arbitrary-precision rationals).

pub mod discriminant;
pub mod groebner;
pub mod interpolate;
pub mod linalg;
pub mod models;
pub mod poly;

pub use num_rational::BigRational;

pub use discriminant::{
    discr_resultant, generic_discriminant, resultant, s_exponent, structured_discriminant,
    tilde_coefficients, DiscrError, GenericDiscriminant, TildeCoefficients,
};
pub use groebner::{
    buchberger, eliminate_vars, radical_elim_generator, GbConfig, GbError, GroebnerBasis,
};
pub use interpolate::{
    DegreeProfile, EliminationResult, Pipeline, PipelineConfig, PipelineError, StructureConstants,
};
pub use linalg::{det_exact, solve_exact, LinalgError, RatMatrix};
pub use models::{
    builtin_models, likelihood_system, scaled_system, LagrangeSystem, ModelError, ModelSpec,
    ScaledSystem,
};
pub use poly::{
    factor_multiplicity, gcd_poly, squarefree_part, EvalError, MonomialOrder, MultiPoly,
    ParseError, VarSet,
};
