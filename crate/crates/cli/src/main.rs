//! `ceda`: categorical exploratory data analysis from the command line.

mod commands;
mod config;
mod error;
mod ingest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ceda::genlab::ExampleId;
use clap::{Args, Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "ceda",
    version,
    about = "Categorical exploratory data analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw one of the simulation studies and write it as CSV.
    Simulate {
        #[arg(long)]
        example: ExampleId,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Fit categorization schemes, or replay stored ones with --replay.
    Bins {
        #[arg(long)]
        replay: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Entropy report for each requested subset.
    Measure(Common),
    /// Mimic null bands and the confirmation verdict per subset.
    Null(Common),
    /// Mutual information over a ladder of cluster counts on both axes.
    Grid(Common),
    /// Full subset ledger and major-factor report.
    Select(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    input: Option<PathBuf>,
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Response column(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    response: Vec<String>,
    /// Covariate columns, comma separated; defaults to every other column.
    #[arg(long, value_delimiter = ',')]
    covariates: Vec<String>,
    /// Subset to report, comma separated; repeatable.
    #[arg(long = "subset")]
    subsets: Vec<String>,
    #[arg(long)]
    max_order: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn resolve(&self) -> CliResult<RunConfig> {
        let mut c = RunConfig::load(self.config.as_deref())?;
        if self.input.is_some() {
            c.input.clone_from(&self.input);
        }
        if !self.response.is_empty() {
            c.response.clone_from(&self.response);
        }
        if !self.covariates.is_empty() {
            c.covariates.clone_from(&self.covariates);
        }
        if !self.subsets.is_empty() {
            c.subsets = self
                .subsets
                .iter()
                .map(|s| s.split(',').map(|m| m.trim().to_owned()).collect())
                .collect();
        }
        if let Some(v) = self.max_order {
            c.max_order = v;
        }
        if let Some(v) = self.replicates {
            c.replicates = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.format {
            c.format = v;
        }
        c.validate()?;
        if c.replicates < 1000 {
            log::warn!(
                "{} replicates give coarse 95% bands; 1000 or more is recommended",
                c.replicates
            );
        }
        Ok(c)
    }
}

fn init_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn load(config: &RunConfig) -> CliResult<ceda::Dataset<f64>> {
    let path = config
        .input
        .as_deref()
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    log::info!("reading {}", path.display());
    ingest::ingest_csv(path, config)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let (common, text) = match cli.command {
        Command::Simulate { example, n, common } => {
            let c = common.resolve()?;
            init_threads(common.threads)?;
            (common, commands::simulate(example, n, &c)?)
        }
        Command::Bins { replay, common } => {
            let c = common.resolve()?;
            init_threads(common.threads)?;
            let d = load(&c)?;
            let text = match replay {
                Some(path) => {
                    let raw = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                    let file: commands::SchemeFile = serde_json::from_str(&raw)
                        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                    commands::bins_replay(&d, &file)?
                }
                None => commands::bins_emit(&d, &c)?,
            };
            (common, text)
        }
        Command::Measure(common) => analysis(common, commands::measure)?,
        Command::Null(common) => analysis(common, commands::null)?,
        Command::Grid(common) => analysis(common, commands::grid)?,
        Command::Select(common) => analysis(common, commands::select)?,
    };
    emit(common.out.as_deref(), &text)
}

fn analysis(
    common: Common,
    body: fn(&ceda::Dataset<f64>, &RunConfig) -> CliResult<String>,
) -> CliResult<(Common, String)> {
    let c = common.resolve()?;
    init_threads(common.threads)?;
    let d = load(&c)?;
    let text = body(&d, &c)?;
    Ok((common, text))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            e.exit_code()
        }
    }
}
