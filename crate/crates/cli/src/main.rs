//! `bdp`: boundary classification, spectra, hitting laws, strong stationary
//! times and separation for birth-death chains.

// `!(x > 0.0)` guards are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use bdp_core::rates::classify_boundary;
use bdp_core::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use config::{parse_state, RunConfig, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "bdp",
    version,
    about = "Hitting times, spectra and strong stationary times of birth-death chains"
)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write reports into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Gallery name or path to a chain JSON file.
    #[arg(long, global = true)]
    chain: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumKind {
    /// Pick from the boundary class.
    Auto,
    Exit,
    Entrance,
    Ergodic,
    /// Finite window `0..n` absorbed at `n`.
    Absorbed,
    /// Finite window `n+1..=N` absorbed at `n`, reflecting at `N`.
    Reflected,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary classification with series certificates.
    Classify,
    /// Eigenvalues of truncations or their limits.
    Spectrum {
        #[arg(long, value_enum, default_value_t = SpectrumKind::Auto)]
        kind: SpectrumKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "big-n")]
        big_n: Option<usize>,
        /// Number of limit eigenvalues (chosen from the tail criterion by default).
        #[arg(long)]
        count: Option<usize>,
    },
    /// Laplace transform, moments and (for finite laws) density of a passage time.
    Hitting {
        /// Start state, or `inf`.
        #[arg(long, value_parser = parse_state)]
        i: Option<State>,
        /// Target state, or `inf`.
        #[arg(long, value_parser = parse_state)]
        n: Option<State>,
        /// Reflect at this state (finite downward passage).
        #[arg(long = "big-n")]
        big_n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        s: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Strong stationary time law, duality checks and moment bounds.
    Sst {
        #[arg(long = "l-max")]
        l_max: Option<u32>,
        /// MGF arguments as fractions of 1/E tau.
        #[arg(long, value_delimiter = ',')]
        lambda: Option<Vec<f64>>,
        /// Window for the intertwining residual.
        #[arg(long, default_value_t = 50)]
        window: usize,
    },
    /// Separation curves against the strong stationary time tail.
    Separation {
        #[arg(long = "big-n")]
        big_n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        states: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Monte Carlo passage or life-time samples.
    Simulate {
        #[arg(long)]
        i: Option<usize>,
        #[arg(long, value_parser = parse_state)]
        n: Option<State>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        s: Option<Vec<f64>>,
        /// Keep the raw sample in this binary file.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Every cross-identity on the gallery, as a pass/fail matrix.
    Verify,
    /// List gallery chains.
    Gallery,
}

/// Exit codes: 0 ok, 2 configuration, 3 undetermined, 4 precondition refused,
/// 5 identity violation.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::InvalidRates(_) | Error::Json(_) | Error::Io(_) => 2,
        Error::Undetermined(_) => 3,
        Error::Refused { .. } | Error::ClassMismatch { .. } | Error::InfiniteLaw(_) => 4,
        Error::IdentityViolation { .. }
        | Error::NonMonotone { .. }
        | Error::GapCollapse { .. }
        | Error::Bisection { .. } => 5,
    }
}

/// A command's result: the JSON payload, an optional CSV rendering, extra
/// CSV files for `--out`, and an exit code for soft failures.
pub struct Report {
    pub payload: Value,
    pub csv: Option<String>,
    pub extra_csv: Vec<(String, String)>,
    pub code: u8,
}

impl Report {
    pub fn json(payload: Value) -> Self {
        Self {
            payload,
            csv: None,
            extra_csv: Vec::new(),
            code: 0,
        }
    }
}

/// Writes to stdout; a closed pipe (`bdp ... | head`) is not an error.
fn say(text: &str) -> std::io::Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r,
    }
}

fn emit(
    name: &str,
    chain: &str,
    report: &Report,
    format: Format,
    out: Option<&PathBuf>,
) -> std::io::Result<()> {
    let mut doc = json!({ "schema": 1, "command": name, "chain": chain });
    if let (Value::Object(d), Value::Object(p)) = (&mut doc, &report.payload) {
        d.extend(p.clone());
    }
    let text = serde_json::to_string_pretty(&doc).expect("report serializes");
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{name}.json")), &text)?;
            if let Some(csv) = &report.csv {
                std::fs::write(dir.join(format!("{name}.csv")), csv)?;
            }
            for (file, csv) in &report.extra_csv {
                std::fs::write(dir.join(file), csv)?;
            }
            say(&format!("{}\n", dir.join(format!("{name}.json")).display()))?;
        }
        None => match (format, &report.csv) {
            (Format::Csv, Some(csv)) => say(csv)?,
            _ => say(&format!("{text}\n"))?,
        },
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, (Error, Option<Value>)> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| (e, None))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| (Error::InvalidArgument(e.to_string()), None))?;
    }
    if let Command::Gallery = cli.command {
        let names: Vec<_> = bdp_core::gallery::all()
            .into_iter()
            .map(|(n, c)| json!({ "name": n, "description": c.description() }))
            .collect();
        let report = Report::json(json!({ "chains": names }));
        emit("gallery", "", &report, cli.format, cli.out.as_ref()).map_err(|e| (e.into(), None))?;
        return Ok(0);
    }
    if let Command::Verify = cli.command {
        let report = verify::run(&cfg);
        emit("verify", "gallery", &report, cli.format, cli.out.as_ref())
            .map_err(|e| (e.into(), None))?;
        return Ok(report.code);
    }
    let chain = cfg
        .resolve_chain(cli.chain.as_deref())
        .map_err(|e| (e, None))?;
    let (name, result) = match cli.command {
        Command::Classify => ("classify", commands::classify(&chain, &cfg)),
        Command::Spectrum {
            kind,
            n,
            big_n,
            count,
        } => (
            "spectrum",
            commands::spectrum(&chain, &cfg, kind, n.or(cfg.n), big_n.or(cfg.big_n), count),
        ),
        Command::Hitting { i, n, big_n, s, t } => {
            let i = i
                .map(|s| s.0)
                .unwrap_or(if cfg.from_infinity == Some(true) {
                    None
                } else {
                    Some(cfg.i.unwrap_or(0))
                });
            let n = n.map(|s| s.0).or_else(|| {
                if cfg.to_infinity == Some(true) {
                    Some(None)
                } else {
                    cfg.n.map(Some)
                }
            });
            let s = s.or_else(|| cfg.s_grid.clone());
            let t = t.or_else(|| cfg.t_grid.clone());
            (
                "hitting",
                commands::hitting(&chain, &cfg, i, n, big_n.or(cfg.big_n), s, t),
            )
        }
        Command::Sst {
            l_max,
            lambda,
            window,
        } => (
            "sst",
            commands::sst(
                &chain,
                &cfg,
                l_max.or(cfg.l_max),
                lambda.or_else(|| cfg.lambda_fractions.clone()),
                window,
            ),
        ),
        Command::Separation { big_n, states, t } => (
            "separation",
            commands::separation(
                &chain,
                &cfg,
                big_n.or(cfg.big_n),
                states.or_else(|| cfg.states.clone()),
                t.or_else(|| cfg.t_grid.clone()),
            ),
        ),
        Command::Simulate {
            i,
            n,
            samples,
            s,
            store,
        } => {
            let i = i.or(cfg.i).unwrap_or(0);
            let n = n.map(|s| s.0).or_else(|| {
                if cfg.to_infinity == Some(true) {
                    Some(None)
                } else {
                    cfg.n.map(Some)
                }
            });
            (
                "simulate",
                commands::simulate(
                    &chain,
                    &cfg,
                    i,
                    n,
                    samples.or(cfg.samples),
                    s.or_else(|| cfg.s_grid.clone()),
                    store,
                ),
            )
        }
        Command::Verify | Command::Gallery => unreachable!(),
    };
    match result {
        Ok(report) => {
            emit(
                name,
                chain.description(),
                &report,
                cli.format,
                cli.out.as_ref(),
            )
            .map_err(|e| (e.into(), None))?;
            if report.code != 0 {
                eprintln!("{name}: some checks failed (exit {})", report.code);
            }
            Ok(report.code)
        }
        Err(e) => {
            let detail = matches!(
                e,
                Error::Refused { .. } | Error::ClassMismatch { .. } | Error::Undetermined(_)
            )
            .then(|| {
                json!({
                    "schema": 1,
                    "command": name,
                    "chain": chain.description(),
                    "refused": e.to_string(),
                    "classification": classify_boundary(&chain, &cfg.policy()),
                })
            });
            Err((e, detail))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err((e, detail)) => {
            if let Some(d) = detail {
                let _ = say(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&d).expect("report serializes")
                ));
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
