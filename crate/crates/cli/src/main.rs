use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use critnls_core::groundstate::DEFAULT_QUAD_TOL;
use critnls_core::harness::{
    emit_report, read_trajectory_csv, run_dichotomy_sweep, run_experiment, virial_check, write_trajectory_csv,
    Consistency,
};
use critnls_core::variational::{classify_report, ThresholdPair};
use critnls_core::{Dimension, ExperimentConfig, GroundStateProfile, SideCondition};

#[derive(Parser)]
#[command(
    name = "critnls",
    version,
    about = "Radial energy-critical focusing NLS simulator and threshold harness"
)]
struct Cli {
    /// Spatial dimension (3, 4 or 5); overrides the config file for evolve and sweeps.
    #[arg(long, global = true)]
    dim: Option<u32>,
    /// Directory for output files whose path is relative or unspecified.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Relative tolerance of the ground-state quadrature.
    #[arg(long, global = true, default_value_t = DEFAULT_QUAD_TOL)]
    quad_tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the sharp constants of W as JSON.
    GroundState,
    /// Place a threshold pair (energy, gradSq) relative to W.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        energy: f64,
        #[arg(long)]
        gradsq: f64,
        #[arg(long, default_value = "none")]
        side_condition: SideCondition,
    },
    /// Run one experiment; writes a trajectory CSV and a summary JSON.
    Evolve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one experiment per amplitude and check the dichotomy.
    DichotomySweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated amplitudes.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        amplitudes: Vec<f64>,
    },
    /// Residual statistics of the virial identities recorded in a trajectory CSV.
    VirialCheck {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long = "R")]
        radius: f64,
    },
}

impl Cli {
    fn dimension(&self) -> Result<Dimension> {
        let n = self.dim.context("--dim is required for this subcommand")?;
        Ok(Dimension::new(n)?)
    }

    fn profile(&self, dim: Dimension) -> Result<GroundStateProfile> {
        Ok(GroundStateProfile::compute(dim, self.quad_tol)?)
    }

    fn load_config(&self, path: &Path) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(n) = self.dim {
            cfg.dim = Dimension::new(n)?;
            cfg.validate()?;
        }
        Ok(cfg)
    }

    fn output_path(&self, configured: Option<&Path>, default_name: &str) -> Result<PathBuf> {
        let base = self.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        let path = match configured {
            Some(p) if p.is_absolute() => p.to_path_buf(),
            Some(p) => base.join(p),
            None => base.join(default_name),
        };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        Ok(path)
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::GroundState => {
            let profile = cli.profile(cli.dimension()?)?;
            print_json(&profile)?;
        }
        Command::Classify {
            energy,
            gradsq,
            side_condition,
        } => {
            let profile = cli.profile(cli.dimension()?)?;
            let pair = ThresholdPair {
                energy: *energy,
                grad_sq: *gradsq,
            };
            print_json(&classify_report(pair, &profile, *side_condition)?)?;
        }
        Command::Evolve { config } => {
            let cfg = cli.load_config(config)?;
            let profile = cli.profile(cfg.dim)?;
            let outcome = run_experiment(&cfg, &profile)?;
            let trajectory = cli.output_path(cfg.outputs.trajectory.as_deref(), "trajectory.csv")?;
            write_trajectory_csv(&outcome.record, &trajectory)?;
            let summary_path = cli.output_path(cfg.outputs.summary.as_deref(), "summary.json")?;
            let summary = serde_json::to_string_pretty(&outcome.summary(&cfg, &profile))?;
            std::fs::write(&summary_path, format!("{summary}\n"))
                .with_context(|| format!("writing {}", summary_path.display()))?;
            println!("{summary}");
        }
        Command::DichotomySweep { config, amplitudes } => {
            let cfg = cli.load_config(config)?;
            let profile = cli.profile(cfg.dim)?;
            let report = run_dichotomy_sweep(&cfg, amplitudes, &profile)?;
            let path = cli.output_path(cfg.outputs.report.as_deref(), "report.csv")?;
            emit_report(&report, &path)?;
            print_json(&serde_json::json!({
                "report": path,
                "rows": report.rows.len(),
                "consistent": report.count(Consistency::Consistent),
                "inconsistent": report.count(Consistency::Inconsistent),
                "noClaim": report.count(Consistency::NoClaim),
            }))?;
            if !report.all_consistent() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::VirialCheck { trajectory, radius } => {
            if !(radius.is_finite() && *radius > 0.0) {
                bail!("--R must be positive, got {radius}");
            }
            let table = read_trajectory_csv(trajectory)?;
            print_json(&virial_check(&table, *radius)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
