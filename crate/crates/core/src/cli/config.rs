//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value` (or `key: value`); `#` starts a comment. List
//! values are comma separated. Command-line flags are merged on top of the
//! file before validation, so every problem in the merged set is reported at once.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::decoherence::{EnsembleConfig, MAX_ENSEMBLE_AMPLITUDES};
use crate::metrics::MAX_HORIZON;
use crate::spectral::MAX_CLOSED_N;
use crate::walk::{state_dimension_cap, MAX_N_ENV};

/// Largest `n` for which `pi_x` writes one row per vertex.
pub const MAX_PI_X_N: usize = 20;

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_N: usize = 8;
pub const DEFAULT_P: f64 = 0.1;

pub const KNOWN_KEYS: &[&str] = &[
    "figure", "mode", "n", "t_max", "p", "epsilon", "trials", "seed", "ns", "ps", "out", "format", "jobs",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Coherent,
    Decoherent,
    ClosedForm,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Coherent => "coherent",
            Mode::Decoherent => "decoherent",
            Mode::ClosedForm => "closed_form",
            Mode::Sweep => "sweep",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "coherent" => Mode::Coherent,
            "decoherent" => Mode::Decoherent,
            "closed_form" => Mode::ClosedForm,
            "sweep" => Mode::Sweep,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Limiting distribution per vertex.
    PiX,
    /// Limiting probability per Hamming weight against the binomial profile.
    HammingProfile,
    /// Coherent distance curves (time-averaged and instantaneous).
    TvdCoherent,
    /// Coherent mixing times against dimension.
    MixingVsN,
    /// Ensemble distance curves for several break probabilities.
    TvdDecoherent,
    /// Decoherent mixing time against break probability.
    MixingVsP,
    /// Decoherent mixing time against dimension, with the coherent one alongside.
    MixingVsNDeco,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::PiX,
        FigureId::HammingProfile,
        FigureId::TvdCoherent,
        FigureId::MixingVsN,
        FigureId::TvdDecoherent,
        FigureId::MixingVsP,
        FigureId::MixingVsNDeco,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::PiX => "pi_x",
            FigureId::HammingProfile => "hamming_profile",
            FigureId::TvdCoherent => "tvd_coherent",
            FigureId::MixingVsN => "mixing_vs_n",
            FigureId::TvdDecoherent => "tvd_decoherent",
            FigureId::MixingVsP => "mixing_vs_p",
            FigureId::MixingVsNDeco => "mixing_vs_n_deco",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn mode(self) -> Mode {
        match self {
            FigureId::PiX | FigureId::HammingProfile => Mode::ClosedForm,
            FigureId::TvdCoherent => Mode::Coherent,
            FigureId::TvdDecoherent => Mode::Decoherent,
            FigureId::MixingVsN | FigureId::MixingVsP | FigureId::MixingVsNDeco => Mode::Sweep,
        }
    }

    fn uses_n_axis(self) -> bool {
        matches!(self, FigureId::MixingVsN | FigureId::MixingVsNDeco)
    }

    fn uses_p_axis(self) -> bool {
        matches!(
            self,
            FigureId::TvdDecoherent | FigureId::MixingVsP | FigureId::MixingVsNDeco
        )
    }

    fn uses_noise(self) -> bool {
        self.uses_p_axis()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Config,
    Resource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub kind: ProblemKind,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ProblemKind::Config => "config",
            ProblemKind::Resource => "resource",
        };
        write!(f, "{tag} error in `{}`: {}", self.field, self.message)
    }
}

/// Every problem found while validating a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<Problem>);

impl ConfigErrors {
    /// Config problems take precedence over resource problems.
    pub fn kind(&self) -> ProblemKind {
        if self.0.iter().any(|p| p.kind == ProblemKind::Config) {
            ProblemKind::Config
        } else {
            ProblemKind::Resource
        }
    }

    pub fn mentions(&self, field: &str) -> bool {
        self.0.iter().any(|p| p.field == field)
    }
}

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub figure: FigureId,
    pub mode: Mode,
    pub n: usize,
    pub t_max: Option<usize>,
    pub p: f64,
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub ns: Vec<usize>,
    pub ps: Vec<f64>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    /// Horizon for a run at dimension `n`.
    pub fn horizon(&self, n: usize) -> usize {
        self.t_max.unwrap_or(match self.figure {
            FigureId::TvdCoherent => 10_000,
            _ => 200 * n,
        })
    }

    pub fn ensemble(&self, n: usize, p: f64) -> EnsembleConfig {
        EnsembleConfig::new(n, p, self.horizon(n), self.trials, self.seed)
    }

    /// Canonical `key = value` lines, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut out = vec![
            ("figure".to_string(), self.figure.name().to_string()),
            ("mode".to_string(), self.mode.name().to_string()),
            ("n".to_string(), self.n.to_string()),
            (
                "t_max".to_string(),
                self.t_max.map_or("default".to_string(), |t| t.to_string()),
            ),
            ("p".to_string(), self.p.to_string()),
            ("epsilon".to_string(), list(&self.epsilons)),
            ("trials".to_string(), self.trials.to_string()),
            ("seed".to_string(), self.seed.to_string()),
        ];
        if !self.ns.is_empty() {
            let ns = self.ns.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            out.push(("ns".to_string(), ns));
        }
        if !self.ps.is_empty() {
            out.push(("ps".to_string(), list(&self.ps)));
        }
        out
    }
}

/// Parses `key = value` lines. Duplicate keys keep the last value.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, ConfigErrors> {
    let mut map = BTreeMap::new();
    let mut problems = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let split = line.find(['=', ':']);
        match split {
            Some(idx) => {
                let key = line[..idx].trim().replace('-', "_");
                let value = line[idx + 1..].trim().to_string();
                if key.is_empty() {
                    problems.push(config_problem("line", format!("line {}: empty key", lineno + 1)));
                } else {
                    map.insert(key, value);
                }
            }
            None => problems.push(config_problem(
                "line",
                format!("line {}: expected `key = value`, got `{line}`", lineno + 1),
            )),
        }
    }
    if problems.is_empty() {
        Ok(map)
    } else {
        Err(ConfigErrors(problems))
    }
}

/// Parses and validates a configuration file's text.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig, ConfigErrors> {
    validate_entries(&parse_entries(raw)?)
}

fn config_problem(field: &str, message: impl Into<String>) -> Problem {
    Problem {
        kind: ProblemKind::Config,
        field: field.to_string(),
        message: message.into(),
    }
}

fn resource_problem(field: &str, message: impl Into<String>) -> Problem {
    Problem {
        kind: ProblemKind::Resource,
        field: field.to_string(),
        message: message.into(),
    }
}

struct Fields<'a> {
    map: &'a BTreeMap<String, String>,
    problems: Vec<Problem>,
}

impl Fields<'_> {
    fn scalar<T: std::str::FromStr>(&mut self, key: &str) -> Option<T> {
        let raw = self.map.get(key)?;
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.problems.push(config_problem(key, format!("cannot parse `{raw}`")));
                None
            }
        }
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str) -> Option<Vec<T>> {
        let raw = self.map.get(key)?;
        let mut out = Vec::new();
        for item in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.parse::<T>() {
                Ok(v) => out.push(v),
                Err(_) => {
                    self.problems
                        .push(config_problem(key, format!("cannot parse list item `{item}`")));
                    return None;
                }
            }
        }
        if out.is_empty() {
            self.problems.push(config_problem(key, "empty list"));
            return None;
        }
        Some(out)
    }

    fn push(&mut self, p: Problem) {
        self.problems.push(p);
    }
}

/// Validates merged entries, collecting every problem.
pub fn validate_entries(map: &BTreeMap<String, String>) -> Result<ExperimentConfig, ConfigErrors> {
    let mut f = Fields {
        map,
        problems: Vec::new(),
    };
    for key in map.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            f.push(config_problem(key, "unknown key"));
        }
    }

    let figure = match map.get("figure") {
        None => {
            f.push(config_problem("figure", "required"));
            None
        }
        Some(raw) => {
            let fig = FigureId::parse(raw);
            if fig.is_none() {
                let known: Vec<_> = FigureId::ALL.iter().map(|f| f.name()).collect();
                f.push(config_problem(
                    "figure",
                    format!("unknown figure `{raw}` (expected one of {})", known.join(", ")),
                ));
            }
            fig
        }
    };

    let mode = match map.get("mode") {
        None => None,
        Some(raw) => {
            let m = Mode::parse(raw);
            if m.is_none() {
                f.push(config_problem("mode", format!("unknown mode `{raw}`")));
            }
            m
        }
    };

    let format = match map.get("format").map(String::as_str) {
        None | Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => {
            f.push(config_problem("format", format!("unknown format `{other}`")));
            OutputFormat::Csv
        }
    };

    let n = f.scalar::<usize>("n").unwrap_or(DEFAULT_N);
    let t_max = f.scalar::<usize>("t_max");
    let p = f.scalar::<f64>("p").unwrap_or(DEFAULT_P);
    let epsilons = f.list::<f64>("epsilon");
    let trials = f.scalar::<usize>("trials").unwrap_or(DEFAULT_TRIALS);
    let seed = f.scalar::<u64>("seed").unwrap_or(DEFAULT_SEED);
    let ns = f.list::<usize>("ns");
    let ps = f.list::<f64>("ps");
    let jobs = f.scalar::<usize>("jobs");
    let out = map.get("out").map(PathBuf::from);

    if !(0.0..=1.0).contains(&p) {
        f.push(config_problem("p", format!("{p} out of range [0, 1]")));
    }
    if let Some(ps) = &ps {
        for &q in ps {
            if !(0.0..=1.0).contains(&q) {
                f.push(config_problem("ps", format!("{q} out of range [0, 1]")));
            }
        }
    }
    if let Some(eps) = &epsilons {
        for &e in eps {
            if !(e > 0.0 && e <= 2.0) {
                f.push(config_problem("epsilon", format!("{e} out of range (0, 2]")));
            }
        }
    }
    if trials == 0 {
        f.push(config_problem("trials", "must be at least 1"));
    }
    if jobs == Some(0) {
        f.push(config_problem("jobs", "must be at least 1"));
    }
    match t_max {
        Some(0) => f.push(config_problem("t_max", "must be at least 1")),
        Some(t) if t > MAX_HORIZON => f.push(resource_problem(
            "t_max",
            format!("{t} exceeds the horizon limit {MAX_HORIZON}"),
        )),
        _ => {}
    }

    let Some(figure) = figure else {
        return Err(ConfigErrors(f.problems));
    };

    if let Some(m) = mode {
        if m != figure.mode() {
            f.push(config_problem(
                "mode",
                format!(
                    "figure `{}` runs in mode `{}`, not `{}`",
                    figure.name(),
                    figure.mode().name(),
                    m.name()
                ),
            ));
        }
    }
    if ns.is_some() && !figure.uses_n_axis() {
        f.push(config_problem(
            "ns",
            format!("figure `{}` has no dimension axis", figure.name()),
        ));
    }
    if ps.is_some() && !figure.uses_p_axis() {
        f.push(config_problem(
            "ps",
            format!("figure `{}` has no break-probability axis", figure.name()),
        ));
    }

    let ns = ns.unwrap_or_else(|| match figure {
        FigureId::MixingVsN => (4..=10).collect(),
        FigureId::MixingVsNDeco => (4..=9).collect(),
        _ => Vec::new(),
    });
    let ps = ps.unwrap_or_else(|| match figure {
        FigureId::MixingVsP => vec![0.02, 0.05, 0.1, 0.2, 0.3, 0.4],
        FigureId::TvdDecoherent => vec![0.0, 0.02, 0.05, 0.1, 0.2],
        FigureId::MixingVsNDeco => vec![p],
        _ => Vec::new(),
    });
    let epsilons = epsilons.unwrap_or_else(|| match figure {
        FigureId::MixingVsN => vec![0.4, 0.2, 0.1],
        _ => vec![0.4],
    });

    // dimension checks, per mode
    let dims: Vec<usize> = if figure.uses_n_axis() { ns.clone() } else { vec![n] };
    let cap = state_dimension_cap();
    for &d in &dims {
        let field = if figure.uses_n_axis() { "ns" } else { "n" };
        if d < 2 {
            f.push(config_problem(field, format!("dimension {d} must be at least 2")));
            continue;
        }
        match figure {
            FigureId::HammingProfile => {
                if d > MAX_CLOSED_N {
                    f.push(resource_problem(
                        field,
                        format!("closed form supports n <= {MAX_CLOSED_N}"),
                    ));
                }
            }
            FigureId::PiX => {
                if d > MAX_PI_X_N {
                    f.push(resource_problem(
                        field,
                        format!("pi_x writes 2^n rows; n <= {MAX_PI_X_N} (use hamming_profile)"),
                    ));
                }
            }
            _ => {
                if d > cap {
                    f.push(resource_problem(
                        field,
                        format!("state-vector modes are capped at n = {cap} (override with {MAX_N_ENV})"),
                    ));
                } else if figure.uses_noise() {
                    let amps = trials.saturating_mul(d << d);
                    if amps > MAX_ENSEMBLE_AMPLITUDES {
                        f.push(resource_problem(
                            "trials",
                            format!("{trials} trials at n = {d} exceed the ensemble memory limit"),
                        ));
                    }
                }
            }
        }
    }

    if f.problems.is_empty() {
        Ok(ExperimentConfig {
            figure,
            mode: figure.mode(),
            n,
            t_max,
            p,
            epsilons,
            trials,
            seed,
            ns,
            ps,
            out,
            format,
            jobs,
        })
    } else {
        Err(ConfigErrors(f.problems))
    }
}
