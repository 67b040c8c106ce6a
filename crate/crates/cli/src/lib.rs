//! Command-line driver: each subcommand runs one verification pipeline from
//! `gal-core` and writes a versioned JSON report.
//!
//! Exit codes: 0 when the verification passes, 1 when it fails, 2 on usage
//! errors, unparsable input or an exceeded word budget.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub(crate) fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gal",
    version,
    about = "Finite and matricial approximations of two non-hopfian matrix groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Maximal number of words any enumeration may visit.
    #[arg(long, global = true, env = "GAL_BUDGET", default_value_t = DEFAULT_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sabotage {
    /// Replace every character by the trivial one (microstates-k).
    TrivialChars,
    /// Force the LEF degree to 1 (lef, sofic).
    SmallN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupArg {
    G0,
    K0,
    Heis,
}

#[derive(Debug, Args)]
struct GroupSet {
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Marked set file, one element literal per line.
    #[arg(long)]
    marked_set: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel witness of the shift and preimages on a ball of G.
    Nonhopf {
        #[command(flatten)]
        set: GroupSet,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// LEF witness on a ball of G.
    Lef {
        #[command(flatten)]
        set: GroupSet,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long)]
        sabotage: Option<Sabotage>,
    },
    /// Sofic check of the left-regular action of the LEF quotient.
    Sofic {
        #[command(flatten)]
        set: GroupSet,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long)]
        sabotage: Option<Sabotage>,
    },
    /// Permutation microstates for G from one finite quotient.
    MicrostatesG {
        #[command(flatten)]
        set: GroupSet,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Twisted group algebra microstates for K.
    MicrostatesK {
        #[command(flatten)]
        set: GroupSet,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        sabotage: Option<Sabotage>,
    },
    /// Characters of Z/q approximating those of Z/p^k.
    CharApprox {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Cocycle identity on random triples.
    CocycleCheck {
        #[arg(long, value_enum, default_value_t = GroupArg::G0)]
        group: GroupArg,
        /// fp | laurent | cyclo:m | zmod:q | zinvp; defaults by group.
        #[arg(long)]
        ring: Option<String>,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Marked-group distance between G and its LEF quotient.
    MarkedDist {
        #[command(flatten)]
        set: GroupSet,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
}

/// Echo of the configuration, included in every report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marked_set: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sabotage: Option<Sabotage>,
    pub budget: u64,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub config: RunConfig,
    pub passed: bool,
    pub details: serde_json::Value,
}

fn check_prime(p: u64) -> Result<(), CliError> {
    if gal_core::rings::is_prime(p) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--p must be prime, got {p}")))
    }
}

fn check_eps(eps: f64, zero_allowed: bool) -> Result<(), CliError> {
    let ok = eps.is_finite() && eps < 1.0 && (eps > 0.0 || (zero_allowed && eps == 0.0));
    if ok {
        Ok(())
    } else if zero_allowed {
        Err(CliError::Usage(format!("--eps must lie in [0, 1), got {eps}")))
    } else {
        Err(CliError::Usage(format!("--eps must lie in (0, 1), got {eps}")))
    }
}

fn check_sabotage(s: Option<Sabotage>, allowed: Sabotage, command: &str) -> Result<(), CliError> {
    match s {
        Some(x) if x != allowed => Err(CliError::Usage(format!(
            "--sabotage {} does not apply to {command}",
            x.to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default()
        ))),
        _ => Ok(()),
    }
}

fn execute(cli: Cli) -> Result<Report, CliError> {
    let mut config = RunConfig {
        budget: cli.budget,
        seed: cli.seed,
        ..RunConfig::default()
    };
    let budget = cli.budget as u128;
    let set_echo = |config: &mut RunConfig, set: &GroupSet| -> Result<(), CliError> {
        check_prime(set.p)?;
        config.p = Some(set.p);
        config.marked_set = set.marked_set.as_ref().map(|p| p.display().to_string());
        Ok(())
    };
    let outcome = match cli.command {
        Command::Nonhopf { set, radius } => {
            config.subcommand = "nonhopf".into();
            set_echo(&mut config, &set)?;
            config.radius = Some(radius);
            commands::nonhopf(&set, radius, budget)?
        }
        Command::Lef { set, radius, sabotage } => {
            config.subcommand = "lef".into();
            set_echo(&mut config, &set)?;
            check_sabotage(sabotage, Sabotage::SmallN, "lef")?;
            config.radius = Some(radius);
            config.sabotage = sabotage;
            commands::lef(&set, radius, sabotage.is_some(), budget)?
        }
        Command::Sofic {
            set,
            radius,
            eps,
            sabotage,
        } => {
            config.subcommand = "sofic".into();
            set_echo(&mut config, &set)?;
            check_eps(eps, true)?;
            check_sabotage(sabotage, Sabotage::SmallN, "sofic")?;
            config.radius = Some(radius);
            config.eps = Some(eps);
            config.sabotage = sabotage;
            commands::sofic(&set, radius, eps, sabotage.is_some(), budget)?
        }
        Command::MicrostatesG { set, n, eps } => {
            config.subcommand = "microstates-g".into();
            set_echo(&mut config, &set)?;
            check_eps(eps, true)?;
            config.n = Some(n);
            config.eps = Some(eps);
            commands::microstates_g(&set, n, eps, budget)?
        }
        Command::MicrostatesK { set, n, eps, sabotage } => {
            config.subcommand = "microstates-k".into();
            set_echo(&mut config, &set)?;
            check_eps(eps, false)?;
            check_sabotage(sabotage, Sabotage::TrivialChars, "microstates-k")?;
            config.n = Some(n);
            config.eps = Some(eps);
            config.sabotage = sabotage;
            commands::microstates_k(&set, n, eps, sabotage.is_some(), budget)?
        }
        Command::CharApprox { p, k, eps } => {
            config.subcommand = "char-approx".into();
            check_prime(p)?;
            check_eps(eps, false)?;
            config.p = Some(p);
            config.k = Some(k);
            config.eps = Some(eps);
            commands::char_approx(p, k, eps)?
        }
        Command::CocycleCheck {
            group,
            ring,
            p,
            samples,
        } => {
            config.subcommand = "cocycle-check".into();
            let ring = ring.unwrap_or_else(|| commands::default_ring(group).to_string());
            config.group = Some(group);
            config.ring = Some(ring.clone());
            config.p = Some(p);
            config.samples = Some(samples);
            commands::cocycle_check(group, &ring, p, samples, cli.seed)?
        }
        Command::MarkedDist { set, radius } => {
            config.subcommand = "marked-dist".into();
            set_echo(&mut config, &set)?;
            config.radius = Some(radius);
            commands::marked_dist(&set, radius, budget)?
        }
    };
    Ok(Report {
        schema: SCHEMA_VERSION,
        config,
        passed: outcome.passed,
        details: outcome.details,
    })
}

fn emit(report: &Report, out: Option<&PathBuf>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(CliError::input)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = cli.out.clone();
    let start = Instant::now();
    let result = execute(cli).and_then(|report| emit(&report, out.as_ref()).map(|_| report));
    match result {
        Ok(report) => {
            eprintln!(
                "gal {}: {} in {:.3} s",
                report.config.subcommand,
                if report.passed { "passed" } else { "FAILED" },
                start.elapsed().as_secs_f64()
            );
            if report.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("gal: error: {e}");
            2
        }
    }
}
