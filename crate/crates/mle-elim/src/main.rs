//! Command-line surface: model ingestion, pipeline orchestration, and
//! serialization.
//!
//! Polynomials print in the same grammar the parser accepts, so outputs can
//! be piped back in. Timing goes to stderr only; stdout is a pure function
//! of (model, command, method, seed), which keeps runs byte-reproducible.

use clap::{Args, Parser, Subcommand, ValueEnum};
use mle_elim::groebner::GbError;
use mle_elim::interpolate::{
    normalize_a2, structure_constants, DegreeProfile, Pipeline, PipelineConfig, PipelineError,
};
use mle_elim::models::{
    builtin_model, likelihood_system, parse_model_file, scaled_system, ModelError, ModelSpec,
};
use mle_elim::poly::MultiPoly;
use mle_elim::{discriminant, groebner};
use serde::Serialize;
use std::process::ExitCode;
use std::time::Instant;

const SEED_ENV: &str = "MLE_ELIM_SEED";

#[derive(Parser)]
#[command(
    name = "mle-elim",
    about = "Exact elimination ideals and discriminants of likelihood equations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Lagrange (or scaled) likelihood equations of a model.
    Equations(EquationsArgs),
    /// Compute the radical elimination generator E_f.
    Eliminate(EliminateArgs),
    /// Compute the structure constants (N, t, l, delta).
    Structure(CommonArgs),
    /// Compute discr(E_f; p0) by resultant or by the structured formula.
    Discriminant(DiscriminantArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Builtin model name (see the README for the corpus).
    #[arg(long, conflicts_with = "model_file")]
    model: Option<String>,
    /// Path to a model file.
    #[arg(long)]
    model_file: Option<String>,
    /// Seed of the sample stream; falls back to MLE_ELIM_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Pair-reduction budget per Groebner call.
    #[arg(long, default_value_t = 200_000)]
    gb_budget: u64,
    /// Retry budget per pipeline stage.
    #[arg(long, default_value_t = 5)]
    retries: u32,
    /// Run models flagged heavy (hours to days at full scale).
    #[arg(long, default_value_t = false)]
    allow_heavy: bool,
}

#[derive(Args)]
struct EquationsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Print the scaled system F instead of f.
    #[arg(long, default_value_t = false)]
    scaled: bool,
}

#[derive(Args)]
struct EliminateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = ElimMethod::Interpolate)]
    method: ElimMethod,
}

#[derive(Args)]
struct DiscriminantArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = DiscrMethod::Structured)]
    method: DiscrMethod,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ElimMethod {
    Groebner,
    Interpolate,
}

impl ElimMethod {
    fn name(self) -> &'static str {
        match self {
            ElimMethod::Groebner => "groebner",
            ElimMethod::Interpolate => "interpolate",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiscrMethod {
    Resultant,
    Structured,
}

impl DiscrMethod {
    fn name(self) -> &'static str {
        match self {
            DiscrMethod::Resultant => "resultant",
            DiscrMethod::Structured => "structured",
        }
    }
}

/// Exit codes: 2 model errors, 3 resource limit, 4 verification failure,
/// 5 non-principal elimination ideal.
fn exit_code_for(err: &CliError) -> u8 {
    match err {
        CliError::Model(_) => 2,
        CliError::Pipeline(PipelineError::Gb(GbError::ResourceLimit { .. })) => 3,
        CliError::Pipeline(PipelineError::VerificationFailed) => 4,
        CliError::Pipeline(PipelineError::Gb(GbError::NonPrincipal { .. })) => 5,
        CliError::Gb(GbError::ResourceLimit { .. }) => 3,
        CliError::Gb(GbError::NonPrincipal { .. }) => 5,
        CliError::Gb(GbError::ZeroIdeal) => 5,
        CliError::Pipeline(_) => 1,
        CliError::Io(_) => 2,
        CliError::Discr(_) => 1,
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("{0}")]
    Pipeline(#[from] PipelineError),
    #[error("{0}")]
    Gb(#[from] GbError),
    #[error("{0}")]
    Discr(#[from] discriminant::DiscrError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match cli.command {
        Command::Equations(args) => cmd_equations(&args),
        Command::Eliminate(args) => cmd_eliminate(&args),
        Command::Structure(args) => cmd_structure(&args),
        Command::Discriminant(args) => cmd_discriminant(&args),
    };
    eprintln!("time_ms: {}", started.elapsed().as_millis());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn resolve_seed(args: &CommonArgs) -> u64 {
    args.seed
        .or_else(|| std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

fn resolve_model(args: &CommonArgs) -> Result<ModelSpec, CliError> {
    let m = match (&args.model, &args.model_file) {
        (Some(name), None) => builtin_model(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            parse_model_file(&text)?
        }
        _ => builtin_model("")?, // UnknownModel("") -> usage error, exit 2
    };
    if m.heavy && !args.allow_heavy {
        return Err(CliError::Model(ModelError::HeavyModel));
    }
    Ok(m)
}

fn pipeline_config(args: &CommonArgs) -> PipelineConfig {
    PipelineConfig {
        seed: resolve_seed(args),
        retries: args.retries,
        gb: groebner::GbConfig {
            pair_budget: args.gb_budget,
        },
        ..PipelineConfig::default()
    }
}

#[derive(Serialize)]
struct EquationsOut {
    name: String,
    parameters: Vec<String>,
    unknowns: Vec<String>,
    equations: Vec<String>,
}

fn cmd_equations(args: &EquationsArgs) -> Result<(), CliError> {
    let m = resolve_model(&args.common)?;
    let (out, prefix) = if args.scaled {
        let sys = scaled_system(&m)?;
        let mut unknowns = sys.scaled_unknowns.clone();
        unknowns.extend(sys.multipliers.iter().cloned());
        (
            EquationsOut {
                name: m.name.clone(),
                parameters: sys.parameters.clone(),
                unknowns,
                equations: sys.equations.iter().map(|f| f.to_string()).collect(),
            },
            "F",
        )
    } else {
        let sys = likelihood_system(&m)?;
        let mut unknowns = sys.prob_unknowns.clone();
        unknowns.extend(sys.multipliers.iter().cloned());
        (
            EquationsOut {
                name: m.name.clone(),
                parameters: sys.parameters.clone(),
                unknowns,
                equations: sys.equations.iter().map(|f| f.to_string()).collect(),
            },
            "f",
        )
    };
    match args.common.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
        Format::Text => {
            println!("model: {}", out.name);
            println!("parameters: {}", out.parameters.join(" "));
            println!("unknowns: {}", out.unknowns.join(" "));
            for (i, eq) in out.equations.iter().enumerate() {
                println!("{prefix}{i} = {eq}");
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct EliminateOut {
    model: String,
    method: String,
    seed: u64,
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "E_f")]
    e_f: String,
    alpha: Vec<u32>,
    #[serde(rename = "L")]
    l: Vec<i64>,
    #[serde(rename = "Omega")]
    omega: Vec<Vec<i64>>,
    samples_used: u64,
    verified: bool,
}

/// Shared by `eliminate` and `discriminant`: E_f under (A2) normalization.
fn compute_e_f(
    m: &ModelSpec,
    method: ElimMethod,
    cfg: &PipelineConfig,
) -> Result<(MultiPoly, DegreeProfile, u64, bool), CliError> {
    let sys = likelihood_system(m)?;
    match method {
        ElimMethod::Interpolate => {
            let mut pipe = Pipeline::new(&sys, cfg.clone());
            let r = pipe.run()?;
            Ok((r.e_f, r.profile, r.samples_used, r.verified))
        }
        ElimMethod::Groebner => {
            let mut keep: Vec<&str> = sys.parameters.iter().map(String::as_str).collect();
            keep.push(sys.first_unknown());
            let mut gens = sys.equations.clone();
            if let Some(h) = sys.multiplier_hint() {
                gens.push(h);
            }
            let g = groebner::radical_elim_generator_staged(
                &gens,
                &sys.elimination_stages(),
                &keep,
                &cfg.gb,
            )?;
            let e_f = normalize_a2(&g, &sys.parameters[0], sys.first_unknown());
            let profile =
                DegreeProfile::of_polynomial(&e_f, &sys.parameters, sys.first_unknown());
            Ok((e_f, profile, 0, true))
        }
    }
}

fn cmd_eliminate(args: &EliminateArgs) -> Result<(), CliError> {
    let m = resolve_model(&args.common)?;
    let cfg = pipeline_config(&args.common);
    let (e_f, profile, samples_used, verified) = compute_e_f(&m, args.method, &cfg)?;
    let out = EliminateOut {
        model: m.name.clone(),
        method: args.method.name().to_string(),
        seed: cfg.seed,
        n: profile.n,
        e_f: e_f.to_string(),
        alpha: profile.alpha.clone(),
        l: profile.l.clone(),
        omega: profile.omega.clone(),
        samples_used,
        verified,
    };
    match args.common.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
        Format::Text => {
            println!("model: {}", out.model);
            println!("method: {}", out.method);
            println!("seed: {}", out.seed);
            println!("N: {}", out.n);
            println!("E_f = {}", out.e_f);
            println!("alpha: {:?}", out.alpha);
            println!("L: {:?}", out.l);
            println!("Omega: {:?}", out.omega);
            println!("samples_used: {}", out.samples_used);
            println!("verified: {}", out.verified);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StructureOut {
    model: String,
    seed: u64,
    #[serde(rename = "N")]
    n: u32,
    t: u32,
    l: u32,
    delta: u32,
    c_degree: i64,
}

fn cmd_structure(args: &CommonArgs) -> Result<(), CliError> {
    let m = resolve_model(args)?;
    let cfg = pipeline_config(args);
    let sc = structure_constants(&m, &cfg)?;
    let out = StructureOut {
        model: m.name.clone(),
        seed: cfg.seed,
        n: sc.n,
        t: sc.t,
        l: sc.l,
        delta: sc.delta,
        c_degree: sc.c_degree(),
    };
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
        Format::Text => {
            println!("model: {}", out.model);
            println!("seed: {}", out.seed);
            println!("N: {}", out.n);
            println!("t: {}", out.t);
            println!("l: {}", out.l);
            println!("delta: {}", out.delta);
            println!("C_degree: {}", out.c_degree);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DiscriminantOut {
    model: String,
    method: String,
    seed: u64,
    #[serde(rename = "N")]
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_exponent: Option<i64>,
    discriminant: String,
}

fn cmd_discriminant(args: &DiscriminantArgs) -> Result<(), CliError> {
    let m = resolve_model(&args.common)?;
    let cfg = pipeline_config(&args.common);
    let (e_f, profile, _, _) = compute_e_f(&m, ElimMethod::Interpolate, &cfg)?;
    let sys = likelihood_system(&m)?;
    let p0 = sys.first_unknown();
    let (poly, s_exp) = match args.method {
        DiscrMethod::Resultant => (discriminant::discr_resultant(&e_f, p0)?, None),
        DiscrMethod::Structured => {
            let sc = structure_constants(&m, &cfg)?;
            let exp = discriminant::s_exponent(
                sc.n as i64,
                sc.t as i64,
                sc.l as i64,
                sc.delta as i64,
            );
            (discriminant::structured_discriminant(&e_f, &sc)?, Some(exp))
        }
    };
    let out = DiscriminantOut {
        model: m.name.clone(),
        method: args.method.name().to_string(),
        seed: cfg.seed,
        n: profile.n,
        s_exponent: s_exp,
        discriminant: poly.to_string(),
    };
    match args.common.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
        Format::Text => {
            println!("model: {}", out.model);
            println!("method: {}", out.method);
            println!("seed: {}", out.seed);
            println!("N: {}", out.n);
            if let Some(e) = out.s_exponent {
                println!("s_exponent: {e}");
            }
            println!("discriminant = {}", out.discriminant);
        }
    }
    Ok(())
}
