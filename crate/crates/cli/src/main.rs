use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use detlab_cli::config::{apply_entries, parse_config_text};
use detlab_cli::{run, Command as RunCommand, ExperimentConfig};

/// Determinant-rigidity laboratory: batch experiments over laminates,
/// moment systems and grid probes, emitting CSV/JSON.
#[derive(Parser)]
#[command(name = "detlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Args, Default)]
struct CommonFlags {
    /// Optional key-value config file; flags win on conflict.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Integrand label: quad, cosh, quartic (quartic-pure for hpcheck).
    #[arg(long)]
    integrand: Option<String>,
    /// Seed for all stochastic sampling in the run.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid sizes, comma separated (recover/stationarity).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    /// Oscillation counts, comma separated (laminate/rigidity).
    #[arg(long, value_delimiter = ',')]
    nosc: Option<Vec<usize>>,
    /// Tolerance override (phase classification).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Laminate construction sweep: sup deviation, phase fractions, det error.
    Laminate {
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Lifted-laminate rigidity sweep: fiber residual and determinant errors.
    Rigidity {
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Two-atom moment search over h-levels.
    Moments {
        #[command(flatten)]
        common: CommonFlags,
        /// Levels of h to probe, comma separated.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
        /// Weight-grid resolution of the t sweep.
        #[arg(long)]
        weight_grid: Option<usize>,
    },
    /// Least-squares recovery of the curl multiplier over a grid sweep.
    Recover {
        #[command(flatten)]
        common: CommonFlags,
        /// Built-in map name (affine, shear, nonconst-det) or field file path.
        #[arg(long)]
        map: Option<String>,
    },
    /// Stationarity classification (h-field gradient norm, fiber roots).
    Stationarity {
        #[command(flatten)]
        common: CommonFlags,
        /// Built-in map name (affine, shear, nonconst-det) or field file path.
        #[arg(long)]
        map: Option<String>,
    },
    /// Integrand hypothesis check over an interval.
    Hpcheck {
        #[command(flatten)]
        common: CommonFlags,
        /// Sampling interval, as 'lo,hi'.
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        /// Number of sample points.
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, String> {
    let (command, common) = match &cli.command {
        CliCommand::Laminate { common } => (RunCommand::Laminate, common),
        CliCommand::Rigidity { common } => (RunCommand::Rigidity, common),
        CliCommand::Moments { common, .. } => (RunCommand::Moments, common),
        CliCommand::Recover { common, .. } => (RunCommand::Recover, common),
        CliCommand::Stationarity { common, .. } => (RunCommand::Stationarity, common),
        CliCommand::Hpcheck { common, .. } => (RunCommand::Hpcheck, common),
    };

    let mut cfg = ExperimentConfig {
        command,
        ..ExperimentConfig::default()
    };

    // Config file first, flags second: flags win on conflict.
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config '{}': {e}", path.display()))?;
        let entries = parse_config_text(&text)?;
        apply_entries(&mut cfg, &entries)?;
    }
    if let Some(v) = &common.integrand {
        cfg.integrand = v.clone();
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = &common.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = &common.grid {
        cfg.grids = v.clone();
    }
    if let Some(v) = &common.nosc {
        cfg.n_osc = v.clone();
    }
    if let Some(v) = common.tol {
        cfg.tol = Some(v);
    }

    match &cli.command {
        CliCommand::Moments {
            levels,
            weight_grid,
            ..
        } => {
            if let Some(v) = levels {
                cfg.levels = v.clone();
            }
            if let Some(v) = weight_grid {
                cfg.weight_grid = *v;
            }
        }
        CliCommand::Recover { map, .. } | CliCommand::Stationarity { map, .. } => {
            if let Some(v) = map {
                cfg.map = v.clone();
            }
        }
        CliCommand::Hpcheck {
            interval, samples, ..
        } => {
            if let Some(v) = interval {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                let parsed: Option<(f64, f64)> = match parts.as_slice() {
                    [lo, hi] => lo.parse().ok().zip(hi.parse().ok()),
                    _ => None,
                };
                cfg.interval =
                    parsed.ok_or_else(|| format!("--interval: expected 'lo,hi', found '{v}'"))?;
            }
            if let Some(v) = samples {
                cfg.samples = *v;
            }
        }
        _ => {}
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are successful exits; real parse errors are
            // config errors (exit 1).
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match build_config(cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("detlab: {msg}");
            return ExitCode::from(1);
        }
    };
    match run(&cfg) {
        Ok(output) => {
            if let Some(path) = &cfg.out {
                if let Err(e) = std::fs::write(path, &output) {
                    eprintln!("detlab: cannot write '{}': {e}", path.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{output}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("detlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
