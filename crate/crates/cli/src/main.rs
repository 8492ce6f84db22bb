mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use commands::annuli::AnnuliConfig;
use commands::compare::{CompareLloglConfig, MultilinearConfig, VectorConfig};
use commands::counterexample::CounterexampleConfig;
use commands::maximal::MaximalConfig;
use commands::norms::NormsConfig;
use commands::rubio::RubioCmdConfig;
use commands::weights::WeightsConfig;
use commands::Experiment;
use error::CliError;
use mixweak::experiments::sweep::SweepConfig;

/// Experiments on mixed weighted weak-type inequalities for maximal operators.
///
/// Every command reads an optional JSON config (unknown keys are rejected),
/// applies its flags and `--set key=value` overrides, and writes
/// `<command>.json`, CSV tables and two-column plot files into `--out`.
/// Exit status: 0 on success, 2 on invalid input, 3 on numeric failure.
#[derive(Debug, Parser)]
#[command(name = "mixweak", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file; missing keys take the command defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Seed for every random draw of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override a config key (dotted paths allowed); the value is read as JSON when it parses.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Print the effective config as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hardy-Littlewood maximal function of a step function and its weak L^1 norm.
    Maximal {
        /// Function descriptor, e.g. `indicator:-1,1`.
        #[arg(long)]
        f: Option<String>,
        /// Step-function CSV input instead of a descriptor.
        #[arg(long, value_name = "FILE")]
        input: Option<String>,
        /// `uncentered_grid_aligned` or `centered`.
        #[arg(long)]
        kind: Option<String>,
    },
    /// A_1, A_p, reverse Hölder and Fujii-Wilson constants; the A_1 bound for u w^ε.
    Weights {
        /// Weight descriptor, e.g. `power:-0.5`.
        #[arg(long)]
        w: Option<String>,
        /// `all`, `dyadic` or `windowed:L`.
        #[arg(long)]
        family: Option<String>,
    },
    /// Weak-L^p and Lorentz L^{p,1} norms, weak-type Hölder, one mixed weak-type evaluation.
    Norms {
        #[arg(long)]
        f: Option<String>,
        /// Exponent of the weak and Lorentz norms.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Rubio de Francia majorant: empirical operator bound and properties of the series.
    Rubio {
        /// λ > 1 in the auxiliary weight u v1^{1/(λδ)}.
        #[arg(long)]
        lambda: Option<f64>,
        /// Lorentz exponent of L^{q,1}(uv) for the operator bound.
        #[arg(long)]
        q: Option<f64>,
        /// Extra random probe functions drawn from `--seed`.
        #[arg(long)]
        random_h: Option<usize>,
    },
    /// Staircase/hat counterexample to the weak-type bound with M f on the left.
    Counterexample {
        /// Largest staircase index; at least 100.
        #[arg(long)]
        k_max: Option<u64>,
    },
    /// Mixed weak-type ratio sweep for v = |x|^{-r} and T = M(f v)/v.
    Sweep {
        /// Exponent r (repeatable).
        #[arg(long = "r")]
        r: Vec<f64>,
        /// Weight u descriptor (repeatable).
        #[arg(long = "u")]
        u: Vec<String>,
        /// Function f descriptor (repeatable).
        #[arg(long = "f")]
        f: Vec<String>,
        /// Truncation radius R (repeatable).
        #[arg(long)]
        radius: Vec<f64>,
        /// Origin gap ε (repeatable).
        #[arg(long)]
        eps: Vec<f64>,
        /// dx halvings relative to ε (repeatable).
        #[arg(long)]
        halvings: Vec<u32>,
    },
    /// Dyadic-annulus decomposition used for power weights.
    Annuli {
        #[arg(long)]
        f: Option<String>,
        /// Exponent of v = |x|^{-r}.
        #[arg(long)]
        r: Option<f64>,
    },
    /// M(Mf) against the L log L maximal function.
    CompareLlogl {
        #[arg(long)]
        family: Option<String>,
    },
    /// Vector-valued (ℓ^q) mixed weak-type inequality.
    Vector {
        #[arg(long)]
        q: Option<f64>,
        /// Exponent of v = |x|^{-r}.
        #[arg(long)]
        r: Option<f64>,
    },
    /// Bilinear maximal operator through the pointwise product bound and weak Hölder.
    Multilinear {
        /// Exponent of v = |x|^{-r}.
        #[arg(long)]
        r: Option<f64>,
    },
}

fn push<T: serde::Serialize>(flags: &mut Vec<(String, Value)>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        flags.push((key.to_string(), json!(v)));
    }
}

fn push_list<T: serde::Serialize>(flags: &mut Vec<(String, Value)>, key: &str, v: Vec<T>) {
    if !v.is_empty() {
        flags.push((key.to_string(), json!(v)));
    }
}

fn execute<T: Experiment>(cli: &Cli, mut overrides: Vec<(String, Value)>) -> Result<(), CliError> {
    if let Some(seed) = cli.seed {
        overrides.push(("seed".into(), json!(seed)));
    }
    for s in &cli.set {
        overrides.push(config::parse_override(s)?);
    }
    let cfg: T = config::load(cli.config.as_deref(), &overrides)?;
    if cli.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(());
    }
    let mut out = output::Output::new(&cli.out, T::NAME, &cfg, cfg.seed())?;
    let summary = cfg.run(&mut out)?;
    println!("{} {} files={}", T::NAME, summary, out.files());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let mut fl = Vec::new();
    match &cli.command {
        Command::Maximal { f, input, kind } => {
            push(&mut fl, "f", f.clone());
            push(&mut fl, "input", input.clone());
            push(&mut fl, "kind", kind.clone());
            execute::<MaximalConfig>(cli, fl)
        }
        Command::Weights { w, family } => {
            push(&mut fl, "w", w.clone());
            push(&mut fl, "family", family.clone());
            execute::<WeightsConfig>(cli, fl)
        }
        Command::Norms { f, p } => {
            push(&mut fl, "f", f.clone());
            push(&mut fl, "p", *p);
            execute::<NormsConfig>(cli, fl)
        }
        Command::Rubio { lambda, q, random_h } => {
            push(&mut fl, "lambda", *lambda);
            push(&mut fl, "q", *q);
            push(&mut fl, "random_h", *random_h);
            execute::<RubioCmdConfig>(cli, fl)
        }
        Command::Counterexample { k_max } => {
            push(&mut fl, "k_max", *k_max);
            execute::<CounterexampleConfig>(cli, fl)
        }
        Command::Sweep { r, u, f, radius, eps, halvings } => {
            push_list(&mut fl, "r_values", r.clone());
            push_list(&mut fl, "u", u.clone());
            push_list(&mut fl, "f", f.clone());
            push_list(&mut fl, "radii", radius.clone());
            push_list(&mut fl, "origin_gaps", eps.clone());
            push_list(&mut fl, "dx_halvings", halvings.clone());
            execute::<SweepConfig>(cli, fl)
        }
        Command::Annuli { f, r } => {
            push(&mut fl, "f", f.clone());
            push(&mut fl, "r", *r);
            execute::<AnnuliConfig>(cli, fl)
        }
        Command::CompareLlogl { family } => {
            push(&mut fl, "family", family.clone());
            execute::<CompareLloglConfig>(cli, fl)
        }
        Command::Vector { q, r } => {
            push(&mut fl, "q", *q);
            push(&mut fl, "r", *r);
            execute::<VectorConfig>(cli, fl)
        }
        Command::Multilinear { r } => {
            push(&mut fl, "r", *r);
            execute::<MultilinearConfig>(cli, fl)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mixweak: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
