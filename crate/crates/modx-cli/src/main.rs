//! Thin command-line adapter over the modx library: every numeric result
//! comes from a library call, this file only parses flags and serializes.

use clap::{Args, Parser, Subcommand, ValueEnum};
use modx::apps::convolution::convolution_experiment;
use modx::apps::primes::{
    erdos_kac_compare, erdos_kac_params, euler_expansion, CountKind, EulerKind, FactorCounts,
};
use modx::apps::sums::independent_sum_expansion;
use modx::bounds::{
    bound_newpars, bound_th0, bound_th0_prime, bound_th0_tv, bound_th2, BoundInputs,
};
use modx::charlier::{build_nu, NuSpec};
use modx::families::{
    general_params_solver, poisson_mean_match, translated_poisson_params, BesselFamily,
    PoissonFamily,
};
use modx::{Error, SignedMeasure};
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "modx", version, about = "Poisson-Charlier expansion toolkit")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output_format: OutputFormat,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    /// Seed for randomized corpora; recorded for reproducibility.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Poisson,
    Bessel,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Omega,
    BigOmega,
}

impl From<KindArg> for CountKind {
    fn from(k: KindArg) -> CountKind {
        match k {
            KindArg::Omega => CountKind::Omega,
            KindArg::BigOmega => CountKind::BigOmega,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a Poisson-Charlier measure nu_r and dump it.
    Expand(ExpandArgs),
    /// Evaluate one of the explicit error bounds.
    Bounds(BoundsArgs),
    /// Solve for translated-Poisson (or general-family) parameters.
    Translate(TranslateArgs),
    /// Convolution experiment: Poisson plus a heavy-tailed summand.
    ConvolveDemo(ConvolveArgs),
    /// Independent-sum expansion for i.i.d. Bernoulli summands.
    SumsDemo(SumsArgs),
    /// Prime-divisor counts: sieve, limit constants, comparison.
    #[command(subcommand)]
    Primes(PrimesCommand),
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Poisson)]
    family: FamilyArg,
    #[arg(long)]
    lambda: f64,
    /// Expansion coefficients a~_1, a~_2, ... (repeatable).
    #[arg(long = "atilde", num_args = 0.., value_delimiter = ',')]
    a_tilde: Vec<f64>,
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Single-term inversion bound.
    Th0 {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma_chi: f64,
    },
    /// Multi-term variant with slack.
    Th0Prime {
        /// gamma_m terms, zipped with --t.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        gamma: Vec<f64>,
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        #[arg(long, default_value_t = PI)]
        theta0: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma_chi: f64,
    },
    /// Smooth total-variation bound.
    Th0Tv {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        gamma3: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma_chi: f64,
    },
    /// Parameter-change bounds.
    NewPars {
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        a: Vec<f64>,
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        a_prime: Vec<f64>,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        lambda_prime: Option<f64>,
    },
    /// Total-variation expansion bound.
    Th2 {
        #[arg(long)]
        k_plus_g: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        a_bar: f64,
    },
}

#[derive(Args)]
struct BoundsArgs {
    #[command(subcommand)]
    which: BoundsCommand,
}

#[derive(Args)]
struct TranslateArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Poisson)]
    family: FamilyArg,
    /// Poisson route: base mean plus first (and optionally second)
    /// expansion coefficients in the theta basis.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    a1: Option<f64>,
    #[arg(long)]
    a2: Option<f64>,
    /// General route: match these target moments directly.
    #[arg(long)]
    mean: Option<f64>,
    #[arg(long)]
    var: Option<f64>,
}

#[derive(Args)]
struct ConvolveArgs {
    #[arg(long, default_value_t = 4)]
    s: u32,
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [4.0, 16.0, 64.0, 256.0])]
    lambdas: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    r: usize,
}

#[derive(Args)]
struct SumsArgs {
    /// Number of i.i.d. Bernoulli(p) summands.
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 2)]
    r: usize,
}

#[derive(Subcommand)]
enum PrimesCommand {
    /// Sieve factor counts and report summary statistics (and fill the
    /// cache when MODX_CACHE_DIR is set).
    Sieve {
        #[arg(long)]
        n_max: u64,
    },
    /// Euler-product expansion coefficients and translated parameters.
    Constants {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
    },
    /// Empirical counts against the approximating measures.
    Compare {
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
}

#[derive(Serialize)]
struct SieveSummary {
    n_max: u64,
    max_omega: u8,
    max_big_omega: u8,
    mean_omega: f64,
    mean_big_omega: f64,
}

#[derive(Serialize)]
struct ConstantsOut {
    kind: &'static str,
    cutoff: u64,
    b1: f64,
    a1: f64,
    a2: f64,
    x: f64,
    m: i64,
    p: f64,
    offset: f64,
    coeffs: Vec<f64>,
    tail_error: f64,
}

enum Rendered {
    Json(serde_json::Value),
    Measure(SignedMeasure),
}

fn run(cli: &Cli) -> Result<Rendered, Error> {
    let json = |v: serde_json::Value| Ok(Rendered::Json(v));
    match &cli.command {
        Command::Expand(a) => {
            match a.family {
                FamilyArg::Poisson => {}
                FamilyArg::Bessel => {
                    return Err(Error::InvalidInput(
                        "expand only supports the poisson family".into(),
                    ))
                }
            }
            if a.lambda <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "lambda must be positive, got {}",
                    a.lambda
                )));
            }
            let nu = build_nu(&NuSpec { lambda: a.lambda, a_tilde: a.a_tilde.clone() })?;
            Ok(Rendered::Measure(nu))
        }
        Command::Bounds(b) => {
            let report = match &b.which {
                BoundsCommand::Th0 { gamma, t, rho, gamma_chi } => {
                    let mut inputs = BoundInputs::single(*gamma, *t, *rho);
                    inputs.gamma_chi = *gamma_chi;
                    bound_th0(&inputs)?
                }
                BoundsCommand::Th0Prime {
                    gamma,
                    t,
                    rho,
                    epsilon,
                    eta,
                    theta0,
                    gamma_chi,
                } => {
                    if gamma.len() != t.len() {
                        return Err(Error::InvalidInput(
                            "--gamma and --t must have the same length".into(),
                        ));
                    }
                    let inputs = BoundInputs {
                        gamma_terms: gamma.iter().copied().zip(t.iter().copied()).collect(),
                        rho: *rho,
                        epsilon: *epsilon,
                        eta: *eta,
                        theta0: *theta0,
                        gamma_chi: *gamma_chi,
                        gamma3: 0.0,
                    };
                    bound_th0_prime(&inputs)?
                }
                BoundsCommand::Th0Tv { gamma, t, rho, gamma3, gamma_chi } => {
                    let mut inputs = BoundInputs::single(*gamma, *t, *rho);
                    inputs.gamma3 = *gamma3;
                    inputs.gamma_chi = *gamma_chi;
                    bound_th0_tv(&inputs)?
                }
                BoundsCommand::NewPars { a, a_prime, lambda, lambda_prime } => {
                    let rep = bound_newpars(a, a_prime, *lambda, *lambda_prime)?;
                    return json(serde_json::to_value(rep).unwrap());
                }
                BoundsCommand::Th2 { k_plus_g, lambda, t, r, a_bar } => {
                    bound_th2(*k_plus_g, *lambda, *t, *r, *a_bar)?
                }
            };
            json(serde_json::to_value(report).unwrap())
        }
        Command::Translate(a) => {
            let params = match (a.lambda, a.mean, a.var) {
                (Some(lambda), None, None) => {
                    let a1 = a.a1.ok_or_else(|| {
                        Error::InvalidInput("--a1 is required with --lambda".into())
                    })?;
                    match a.a2 {
                        None => poisson_mean_match(lambda, a1)?,
                        Some(a2) => translated_poisson_params(lambda, a1, a2)?,
                    }
                }
                (None, Some(mean), Some(var)) => match a.family {
                    FamilyArg::Poisson => general_params_solver(&PoissonFamily, mean, var)?,
                    FamilyArg::Bessel => general_params_solver(&BesselFamily, mean, var)?,
                },
                _ => {
                    return Err(Error::InvalidInput(
                        "supply either --lambda with --a1 [--a2], or --mean with --var".into(),
                    ))
                }
            };
            json(serde_json::to_value(params).unwrap())
        }
        Command::ConvolveDemo(a) => {
            let report = convolution_experiment(a.s, &a.lambdas, a.r)?;
            json(serde_json::to_value(report).unwrap())
        }
        Command::SumsDemo(a) => {
            if !(0.0..=1.0).contains(&a.p) {
                return Err(Error::InvalidInput(format!(
                    "p must lie in [0, 1], got {}",
                    a.p
                )));
            }
            let b = SignedMeasure::new(0, vec![1.0 - a.p, a.p], 0.0);
            let pmfs = vec![b; a.n];
            let nu = independent_sum_expansion(&pmfs, a.r)?;
            Ok(Rendered::Measure(nu))
        }
        Command::Primes(p) => match p {
            PrimesCommand::Sieve { n_max } => {
                let fc = FactorCounts::load_or_sieve(*n_max)?;
                let n = *n_max as f64;
                let summary = SieveSummary {
                    n_max: *n_max,
                    max_omega: fc.omega[1..].iter().copied().max().unwrap(),
                    max_big_omega: fc.big_omega[1..].iter().copied().max().unwrap(),
                    mean_omega: fc.omega[1..].iter().map(|&w| w as f64).sum::<f64>() / n,
                    mean_big_omega: fc.big_omega[1..].iter().map(|&w| w as f64).sum::<f64>() / n,
                };
                json(serde_json::to_value(summary).unwrap())
            }
            PrimesCommand::Constants { kind, cutoff } => {
                let ck: CountKind = (*kind).into();
                let ek = erdos_kac_params(ck, *cutoff)?;
                let euler_kind = match ck {
                    CountKind::Omega => EulerKind::Phi1,
                    CountKind::BigOmega => EulerKind::Phi2,
                };
                let e = euler_expansion(euler_kind, 4, *cutoff)?;
                let out = ConstantsOut {
                    kind: match ck {
                        CountKind::Omega => "omega",
                        CountKind::BigOmega => "big_omega",
                    },
                    cutoff: *cutoff,
                    b1: ek.b1,
                    a1: ek.a1,
                    a2: ek.a2,
                    x: ek.x,
                    m: ek.params.m,
                    p: ek.params.p,
                    offset: ek.params.lambda_prime,
                    coeffs: e.coeffs,
                    tail_error: e.tail_error,
                };
                json(serde_json::to_value(out).unwrap())
            }
            PrimesCommand::Compare { n_max, r, kind } => {
                let report = erdos_kac_compare(*n_max, *r, (*kind).into())?;
                json(serde_json::to_value(report).unwrap())
            }
        },
    }
}

fn flatten_csv(value: &serde_json::Value) -> String {
    // generic key,value dump; arrays expand to key[i] rows
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut String) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, vv) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, vv, out);
                }
            }
            serde_json::Value::Array(items) => {
                for (i, vv) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), vv, out);
                }
            }
            _ => {
                out.push_str(prefix);
                out.push(',');
                out.push_str(&v.to_string());
                out.push('\n');
            }
        }
    }
    let mut out = String::from("key,value\n");
    walk("", value, &mut out);
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rendered = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::InvalidInput(_) | Error::OutOfRegime(_) => ExitCode::from(2),
                Error::Io(_) => ExitCode::from(1),
            };
        }
    };
    let text = match (&rendered, cli.output_format) {
        (Rendered::Measure(m), OutputFormat::Csv) => m.to_csv(),
        (Rendered::Measure(m), OutputFormat::Json) => {
            serde_json::to_string_pretty(m).unwrap() + "\n"
        }
        (Rendered::Json(v), OutputFormat::Json) => serde_json::to_string_pretty(v).unwrap() + "\n",
        (Rendered::Json(v), OutputFormat::Csv) => flatten_csv(v),
    };
    match &cli.output {
        None => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Some(path) => match std::fs::File::create(path).and_then(|mut f| f.write_all(text.as_bytes())) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
