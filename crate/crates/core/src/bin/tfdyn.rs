use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;
use tfdyn::scenario::{self, SweepConfig};
use tfdyn::Error;

#[derive(Parser)]
#[command(
    name = "tfdyn",
    version,
    about = "Entanglement dynamics of a dissipative two-mode system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Logarithmic negativity over the time grid.
    SweepNegativity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantum mutual information over the time grid.
    SweepMutualinfo {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the fast paths against truncated Fock-space oracles.
    OracleValidate {
        #[arg(long)]
        truncation: usize,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the short-time mean fields.
    DeltaEvolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &Path) -> tfdyn::Result<SweepConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    SweepConfig::from_json(&text)
}

fn write_out(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> tfdyn::Result<()> {
    let io_err = |e: std::io::Error| Error::Config(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    f(&mut w).and_then(|_| w.flush()).map_err(io_err)
}

fn run(cmd: Command) -> tfdyn::Result<bool> {
    match cmd {
        Command::SweepNegativity { config, out } => {
            let cfg = load_config(&config)?;
            let rows = scenario::run_negativity_sweep(&cfg)?;
            info!("{} rows", rows.len());
            write_out(&out, |w| scenario::write_sweep_csv(w, "sweep-negativity", &cfg, &rows))?;
        }
        Command::SweepMutualinfo { config, out } => {
            let cfg = load_config(&config)?;
            let rows = scenario::run_mutualinfo_sweep(&cfg)?;
            info!("{} rows", rows.len());
            write_out(&out, |w| scenario::write_sweep_csv(w, "sweep-mutualinfo", &cfg, &rows))?;
        }
        Command::DeltaEvolve { config, out } => {
            let cfg = load_config(&config)?;
            let rows = scenario::run_delta_evolution(&cfg)?;
            write_out(&out, |w| scenario::write_delta_csv(w, &cfg, &rows))?;
        }
        Command::OracleValidate {
            truncation,
            r,
            seed,
            out,
        } => {
            let report = scenario::run_oracle_validation(truncation, r, seed)?;
            for (name, check) in &report {
                info!(
                    "{name}: residual {:e} (threshold {:e})",
                    check.residual, check.threshold
                );
            }
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            write_out(&out, |w| writeln!(w, "{json}"))?;
            return Ok(report.values().all(|c| c.pass));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("tfdyn: oracle checks failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("tfdyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
