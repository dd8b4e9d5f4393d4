//! Command-line driver: configuration, figure tables and output.

pub mod config;
pub mod figures;
pub mod output;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use crate::error::WalkError;
use config::{validate_entries, ConfigErrors, ExperimentConfig, ProblemKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Generate figure data for coined quantum walks on the hypercube.
///
/// Flags override values from `--config`.
#[derive(Debug, Parser, Default)]
#[command(name = "hyperwalk", version)]
pub struct Args {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// pi_x, hamming_profile, tvd_coherent, mixing_vs_n, tvd_decoherent, mixing_vs_p or mixing_vs_n_deco.
    #[arg(long)]
    pub figure: Option<String>,
    /// coherent, decoherent, closed_form or sweep (must match the figure).
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    /// Link-break probability.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long = "t-max")]
    pub t_max: Option<String>,
    /// Mixing threshold; repeat for several.
    #[arg(long)]
    pub epsilon: Vec<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Comma-separated dimensions for sweeps over n.
    #[arg(long)]
    pub ns: Option<String>,
    /// Comma-separated break probabilities for sweeps over p.
    #[arg(long)]
    pub ps: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Worker threads for sweeps and ensembles.
    #[arg(long)]
    pub jobs: Option<String>,
}

impl Args {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut put = |k: &'static str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((k, v.clone()));
            }
        };
        put("figure", &self.figure);
        put("mode", &self.mode);
        put("n", &self.n);
        put("p", &self.p);
        put("t_max", &self.t_max);
        put("trials", &self.trials);
        put("seed", &self.seed);
        put("ns", &self.ns);
        put("ps", &self.ps);
        put("format", &self.format);
        put("jobs", &self.jobs);
        if let Some(out_path) = &self.out {
            out.push(("out", out_path.to_string_lossy().into_owned()));
        }
        if !self.epsilon.is_empty() {
            out.push(("epsilon", self.epsilon.join(",")));
        }
        out
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigErrors),
    Io { context: String, source: std::io::Error },
    Walk(WalkError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(e) => match e.kind() {
                ProblemKind::Config => EXIT_CONFIG,
                ProblemKind::Resource => EXIT_RESOURCE,
            },
            CliError::Io { .. } => EXIT_INTERNAL,
            CliError::Walk(WalkError::ResourceLimit(_)) => EXIT_RESOURCE,
            CliError::Walk(_) => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Io { context, source } => write!(f, "{context}: {source}"),
            CliError::Walk(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        CliError::Walk(e)
    }
}

/// Reads the config file (if any), applies flag overrides and validates.
pub fn resolve_config(args: &Args) -> Result<ExperimentConfig, CliError> {
    let mut entries = BTreeMap::new();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(ConfigErrors(vec![config::Problem {
                kind: ProblemKind::Config,
                field: "config".into(),
                message: format!("cannot read {}: {e}", path.display()),
            }]))
        })?;
        entries = config::parse_entries(&text).map_err(CliError::Config)?;
    }
    for (k, v) in args.overrides() {
        entries.insert(k.to_string(), v);
    }
    validate_entries(&entries).map_err(CliError::Config)
}

/// Runs one configuration and returns the rendered output.
pub fn execute(config: &ExperimentConfig) -> Result<String, CliError> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Walk(WalkError::ResourceLimit(e.to_string())))?;
    let table = pool.install(|| figures::generate(config))?;
    let meta = output::Metadata::new(config, start.elapsed().as_secs_f64());
    Ok(output::render(&table, &meta, config.format))
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let config = resolve_config(args)?;
    let text = execute(&config)?;
    match &config.out {
        Some(path) => output::write_atomic(path, &text).map_err(|source| CliError::Io {
            context: format!("writing {}", path.display()),
            source,
        }),
        None => {
            use std::io::Write;
            std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    context: "writing standard output".into(),
                    source,
                })
        }
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("hyperwalk: {e}");
            e.exit_code()
        }
    }
}
