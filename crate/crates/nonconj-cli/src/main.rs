use clap::{Parser, Subcommand};
use nonconj_cli::config::ConfigError;
use nonconj_cli::runner::{plan, ConvergenceStatus};
use nonconj_cli::{parse_config, run_scenario, sweep, table, ScenarioConfig, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nonconj", version, about = "Thermodynamic ledgers for non-conjugate subsystem decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its ledger as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output file; defaults to the config's "output" key, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario for every value of one axis.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Axis name; defaults to the config's sweep section.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// List model kinds and their keys.
    Models,
    /// Validate a config and print the run plan without propagating.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<ScenarioConfig, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_CONFIG as u8)
    })?;
    parse_config(&text).map_err(|errs: Vec<ConfigError>| {
        for e in &errs {
            eprintln!("config error: {e}");
        }
        ExitCode::from(EXIT_CONFIG as u8)
    })
}

fn runtime(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_RUNTIME as u8)
}

fn main() -> ExitCode {
    faer::set_global_parallelism(faer::Par::Seq);
    let cli = Cli::parse();
    match cli.command {
        Command::Models => {
            print!("{}", nonconj_cli::models_help());
            ExitCode::from(EXIT_OK as u8)
        }
        Command::Check { config } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match plan(&cfg) {
                Ok(p) => {
                    println!("config ok");
                    print!("{p}");
                    ExitCode::from(EXIT_OK as u8)
                }
                Err(nonconj_cli::RunError::Model(e @ nonconj::Error::InvalidParameter(_))) => {
                    eprintln!("config error: {e}");
                    ExitCode::from(EXIT_CONFIG as u8)
                }
                Err(e) => runtime(e),
            }
        }
        Command::Run { config, out } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let result = match run_scenario(&cfg) {
                Ok(r) => r,
                Err(e) => return runtime(e),
            };
            for w in &result.ledger.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("convergence: {}", result.convergence.summary());
            let target = out.or_else(|| cfg.output.as_ref().map(PathBuf::from));
            match target {
                Some(p) => {
                    if let Err(e) = table::emit_table(&result, &p) {
                        return runtime(format!("cannot write {}: {e}", p.display()));
                    }
                }
                None => print!("{}", table::render(&result)),
            }
            if cfg.convergence.require && result.convergence.status == ConvergenceStatus::Unconverged {
                return runtime("convergence gate failed; output flagged unconverged");
            }
            ExitCode::from(EXIT_OK as u8)
        }
        Command::Sweep { config, axis, values, out } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let (axis, values) = match (axis, values, &cfg.sweep) {
                (Some(a), Some(v), _) => (a, v),
                (a, v, Some(s)) => (a.unwrap_or_else(|| s.axis.clone()), v.unwrap_or_else(|| s.values.clone())),
                _ => {
                    eprintln!("config error: sweep needs --axis and --values or a sweep section in the config");
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            };
            if !nonconj_cli::config::sweep_axes(cfg.model).contains(&axis.as_str()) {
                eprintln!("config error: unknown sweep axis '{axis}' for model {}", cfg.model.as_str());
                return ExitCode::from(EXIT_CONFIG as u8);
            }
            let results = match sweep::run_sweep(&cfg, &axis, &values) {
                Ok(r) => r,
                Err(e) => return runtime(e),
            };
            if let Err(e) = sweep::write_sweep(&out, &axis, &results) {
                return runtime(format!("cannot write {}: {e}", out.display()));
            }
            let unconverged = results.iter().any(|(_, r)| r.convergence.status == ConvergenceStatus::Unconverged);
            if cfg.convergence.require && unconverged {
                return runtime("convergence gate failed for at least one sweep point");
            }
            ExitCode::from(EXIT_OK as u8)
        }
    }
}
