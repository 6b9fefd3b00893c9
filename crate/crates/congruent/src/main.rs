use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use congruent_core::{distinctness_check, Flavor, QuadraticSphereFunction, SphereFunction};
use serde::Serialize;

use congruent::config::{parse_config, ConfigError, RunConfig};
use congruent::harness::{self, HarnessError, Parameters, RunReport, DISTINCTNESS_SAMPLES};
use congruent::{mesh, output};

#[derive(Parser)]
#[command(
    name = "congruent",
    version,
    about = "Certify convex bodies K != ±L with congruent sections and projections"
)]
struct Cli {
    /// Override the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core). Does not change any output.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the body parameters and the distinctness gaps.
    Construct {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Dimension for the standard axes (n, n-1, ..., 1) when no config is given.
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Run the configured suites; exit code 0 iff all pass.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write the boundary of K, L or the base ellipsoid E (n = 3) as an OFF mesh.
    ExportMesh {
        #[arg(long, value_enum)]
        body: BodyChoice,
        #[arg(long, default_value_t = 3)]
        level: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the suites and write the JSON report and the residual table.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BodyChoice {
    #[value(name = "K")]
    K,
    #[value(name = "L")]
    L,
    #[value(name = "E")]
    E,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Harness(HarnessError),
    #[error(transparent)]
    Output(#[from] output::OutputError),
    #[error(transparent)]
    Mesh(#[from] mesh::MeshError),
    #[error("cannot write report: {0}")]
    Stdout(std::io::Error),
    #[error("some suites failed")]
    SuiteFailure,
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(c) => CliError::Config(c),
            other => CliError::Harness(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

fn load_config(path: Option<&Path>, n: usize, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let mut config = match path {
        Some(p) => parse_config(p)?,
        None => {
            let c = RunConfig::standard(n);
            c.validate()?;
            c
        }
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

#[derive(Serialize)]
struct Gaps {
    flavor: &'static str,
    d_id: f64,
    d_neg: f64,
}

#[derive(Serialize)]
struct Construction {
    parameters: Parameters,
    distinctness: Vec<Gaps>,
}

fn construct(config: &RunConfig) -> Result<(), CliError> {
    let resolved = harness::resolve(config)?;
    let distinctness = [Flavor::Radial, Flavor::Support]
        .into_iter()
        .map(|flavor| {
            let (k, l) = resolved.pair(flavor);
            let (d_id, d_neg) = distinctness_check(&k, &l, DISTINCTNESS_SAMPLES);
            Gaps {
                flavor: flavor.name(),
                d_id,
                d_neg,
            }
        })
        .collect();
    let out = Construction {
        parameters: resolved.parameters(),
        distinctness,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializable")
    );
    Ok(())
}

fn summarize(report: &RunReport) {
    for s in &report.suites {
        let status = if s.pass { "PASS" } else { "FAIL" };
        let residual = s
            .max_residual
            .map(|r| format!(" max residual {r:e}"))
            .unwrap_or_default();
        eprintln!(
            "{:<14} {status}{residual} ({} failures, {:.2} s)",
            s.suite.name(),
            s.failures.len(),
            s.wall_time.as_secs_f64()
        );
    }
}

fn run_and_write(
    config: &RunConfig,
    jobs: usize,
    out: Option<&Path>,
    csv: Option<&Path>,
) -> Result<(), CliError> {
    let report = harness::run(config, jobs)?;
    summarize(&report);
    match out {
        Some(p) => output::emit_report(&report, p)?,
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(output::report_json(&report).as_bytes())
                .map_err(CliError::Stdout)?;
        }
    }
    if let Some(p) = csv {
        output::emit_residuals_csv(&report, p)?;
    }
    if report.pass {
        Ok(())
    } else {
        Err(CliError::SuiteFailure)
    }
}

fn export(config: &RunConfig, body: BodyChoice, level: u32, out: &Path) -> Result<(), CliError> {
    let resolved = harness::resolve(config)?;
    let (k, l) = resolved.pair(Flavor::Radial);
    match body {
        BodyChoice::K => mesh::export_mesh(&k, "K", level, out)?,
        BodyChoice::L => mesh::export_mesh(&l, "L", level, out)?,
        BodyChoice::E => {
            let e: &dyn SphereFunction = &QuadraticSphereFunction::radial(resolved.ellipsoid);
            mesh::export_mesh(e, "E", level, out)?
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Construct { config, n } => {
            load_config(config.as_deref(), *n, cli.seed).and_then(|c| construct(&c))
        }
        Command::Verify { config, out, csv } => load_config(Some(config), 3, cli.seed)
            .and_then(|c| run_and_write(&c, cli.jobs, out.as_deref(), csv.as_deref())),
        Command::ExportMesh {
            body,
            level,
            out,
            config,
        } => {
            load_config(config.as_deref(), 3, cli.seed).and_then(|c| export(&c, *body, *level, out))
        }
        Command::Report {
            out,
            csv,
            config,
            n,
        } => load_config(config.as_deref(), *n, cli.seed)
            .and_then(|c| run_and_write(&c, cli.jobs, Some(out), Some(csv))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
