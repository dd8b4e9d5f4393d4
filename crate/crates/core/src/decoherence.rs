//! Broken-link noise: each step every hypercube edge is independently broken
//! with probability `p`, and amplitude that would cross a broken edge stays put.
//!
//! Every trial is a pure-state unitary evolution. The ensemble runs all trials
//! in lockstep and sums their position distributions in trial order, so the
//! result does not depend on how many threads evolve the trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distribution::Distribution;
use crate::error::{Result, WalkError};
use crate::metrics::{check_epsilon, CesaroAverage, MixingResult, MAX_HORIZON};
use crate::walk::{check_state_dimension, CoinMatrix, Walk, WalkerState};

/// Set of broken edges. Edge `{x, x ⊕ e_j}` is stored once, under its lower
/// endpoint (the one with bit `j` clear) and direction `j`, so both endpoints
/// always agree on its state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMask {
    n: usize,
    bits: Vec<u64>,
}

impl EdgeMask {
    /// No broken links.
    pub fn closed(n: usize) -> Self {
        let edges = edge_count(n);
        Self {
            n,
            bits: vec![0; edges.div_ceil(64)],
        }
    }

    /// Every link broken.
    pub fn broken(n: usize) -> Self {
        let mut mask = Self::closed(n);
        mask.fill_all();
        mask
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n · 2^{n-1}`.
    pub fn edge_count(&self) -> usize {
        edge_count(self.n)
    }

    /// True when no link is broken.
    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn broken_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Canonical index of the edge leaving `vertex` along direction `dir`.
    pub fn edge_index(&self, vertex: usize, dir: usize) -> usize {
        let low = vertex & ((1usize << dir) - 1);
        let high = (vertex >> (dir + 1)) << dir;
        (dir << (self.n - 1)) | high | low
    }

    fn edge_endpoint(&self, index: usize) -> (usize, usize) {
        let dir = index >> (self.n - 1);
        let rest = index & ((1usize << (self.n - 1)) - 1);
        let low = rest & ((1usize << dir) - 1);
        let high = (rest >> dir) << (dir + 1);
        (high | low, dir)
    }

    pub fn is_broken(&self, vertex: usize, dir: usize) -> bool {
        let idx = self.edge_index(vertex, dir);
        (self.bits[idx / 64] >> (idx % 64)) & 1 == 1
    }

    pub fn set_broken(&mut self, vertex: usize, dir: usize, broken: bool) {
        let idx = self.edge_index(vertex, dir);
        if broken {
            self.bits[idx / 64] |= 1 << (idx % 64);
        } else {
            self.bits[idx / 64] &= !(1 << (idx % 64));
        }
    }

    /// Broken edges as `(lower endpoint, direction)`.
    pub fn iter_broken(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.iter().enumerate().flat_map(move |(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(self.edge_endpoint(w * 64 + b))
            })
        })
    }

    /// Per-vertex bitmask of directions whose link is broken.
    pub fn blocked_directions(&self) -> Vec<u32> {
        let mut blocked = vec![0u32; 1 << self.n];
        for (x, dir) in self.iter_broken() {
            blocked[x] |= 1 << dir;
            blocked[x | (1 << dir)] |= 1 << dir;
        }
        blocked
    }

    fn clear(&mut self) {
        self.bits.iter_mut().for_each(|w| *w = 0);
    }

    fn fill_all(&mut self) {
        let edges = self.edge_count();
        self.bits.iter_mut().for_each(|w| *w = u64::MAX);
        let tail = edges % 64;
        if tail != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last = (1u64 << tail) - 1;
            }
        }
    }

    fn flip(&mut self, idx: usize) {
        self.bits[idx / 64] ^= 1 << (idx % 64);
    }

    /// Redraws every edge independently: broken with probability `p`.
    pub fn resample<R: Rng + ?Sized>(&mut self, p: f64, rng: &mut R) -> Result<()> {
        check_probability(p)?;
        self.clear();
        if p == 0.0 {
            return Ok(());
        }
        if p == 1.0 {
            self.fill_all();
            return Ok(());
        }
        // Jump between successes with geometric gaps; draw the rarer outcome.
        let edges = self.edge_count();
        let invert = p > 0.5;
        let q = if invert { 1.0 - p } else { p };
        let log_miss = (-q).ln_1p();
        let mut idx = 0usize;
        loop {
            let u: f64 = rng.random();
            let gap = ((-u).ln_1p() / log_miss).floor();
            if gap >= (edges - idx) as f64 {
                break;
            }
            idx += gap as usize;
            self.flip(idx);
            idx += 1;
            if idx >= edges {
                break;
            }
        }
        if invert {
            for w in self.bits.iter_mut() {
                *w = !*w;
            }
            let tail = edges % 64;
            if tail != 0 {
                if let Some(last) = self.bits.last_mut() {
                    *last &= (1u64 << tail) - 1;
                }
            }
        }
        Ok(())
    }
}

fn edge_count(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        n << (n - 1)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(WalkError::OutOfRange {
            name: "p",
            value: p,
            expected: "0 <= p <= 1",
        });
    }
    Ok(())
}

/// Independent mask with each edge broken with probability `p`.
pub fn sample_mask<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<EdgeMask> {
    let mut mask = EdgeMask::closed(n);
    mask.resample(p, rng)?;
    Ok(mask)
}

/// Generator for the mask of `step` in `trial`: a ChaCha8 stream per trial,
/// with each step starting at its own fixed word offset.
pub fn step_rng(seed: u64, trial: u64, step: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.set_word_pos(u128::from(step) << 32);
    rng
}

/// Starting state of each trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialCondition {
    /// Localized at vertex 0, uniform over the coin register.
    Symmetric,
    /// A single basis state `|coin, vertex⟩`.
    Basis { coin: usize, vertex: usize },
}

impl InitialCondition {
    pub fn state(self, n: usize) -> Result<WalkerState> {
        match self {
            InitialCondition::Symmetric => WalkerState::symmetric(n),
            InitialCondition::Basis { coin, vertex } => WalkerState::basis(n, coin, vertex),
        }
    }
}

/// Number of trial groups used for batch-means error estimates.
pub const ERROR_GROUPS: usize = 8;

/// Largest `trials · n · 2^n` amplitude count held by a lockstep ensemble.
pub const MAX_ENSEMBLE_AMPLITUDES: usize = 1 << 25;

/// Largest `(t_max + 1) · 2^n` for a stored per-step history.
pub const MAX_HISTORY_ENTRIES: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub n: usize,
    pub p: f64,
    pub t_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub initial: InitialCondition,
}

impl EnsembleConfig {
    pub fn new(n: usize, p: f64, t_max: usize, trials: usize, seed: u64) -> Self {
        Self {
            n,
            p,
            t_max,
            trials,
            seed,
            initial: InitialCondition::Symmetric,
        }
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_state_dimension(self.n)?;
        check_probability(self.p)?;
        if self.trials == 0 {
            return Err(WalkError::OutOfRange {
                name: "trials",
                value: 0.0,
                expected: "trials >= 1",
            });
        }
        if self.t_max == 0 {
            return Err(WalkError::OutOfRange {
                name: "t_max",
                value: 0.0,
                expected: "t_max >= 1",
            });
        }
        if self.t_max > MAX_HORIZON {
            return Err(WalkError::ResourceLimit(format!(
                "t_max={} exceeds {MAX_HORIZON}",
                self.t_max
            )));
        }
        let amplitudes = self.trials.saturating_mul(self.n << self.n);
        if amplitudes > MAX_ENSEMBLE_AMPLITUDES {
            return Err(WalkError::ResourceLimit(format!(
                "{} trials at n={} need {amplitudes} amplitudes (limit {MAX_ENSEMBLE_AMPLITUDES})",
                self.trials, self.n
            )));
        }
        Ok(())
    }
}

/// Sums of the trials' position distributions at one step, overall and per
/// error group (trial `i` belongs to group `i mod groups`).
#[derive(Debug, Clone)]
pub struct EnsembleAccumulator {
    n: usize,
    sums: Vec<f64>,
    group_sums: Vec<Vec<f64>>,
    group_counts: Vec<usize>,
    trials: usize,
}

impl EnsembleAccumulator {
    pub fn new(n: usize, groups: usize) -> Self {
        let groups = groups.max(1);
        Self {
            n,
            sums: vec![0.0; 1 << n],
            group_sums: vec![vec![0.0; 1 << n]; groups],
            group_counts: vec![0; groups],
            trials: 0,
        }
    }

    pub fn clear(&mut self) {
        self.sums.iter_mut().for_each(|s| *s = 0.0);
        self.group_sums
            .iter_mut()
            .for_each(|g| g.iter_mut().for_each(|s| *s = 0.0));
        self.group_counts.iter_mut().for_each(|c| *c = 0);
        self.trials = 0;
    }

    pub fn add(&mut self, trial: usize, probs: &[f64]) {
        let g = trial % self.group_sums.len();
        for ((s, gs), p) in self.sums.iter_mut().zip(self.group_sums[g].iter_mut()).zip(probs) {
            *s += p;
            *gs += p;
        }
        self.group_counts[g] += 1;
        self.trials += 1;
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    /// Ensemble-averaged position distribution.
    pub fn mean(&self) -> Result<Distribution> {
        mean_of(self.n, &self.sums, self.trials)
    }

    /// Averages of the non-empty error groups.
    pub fn group_means(&self) -> Result<Vec<Distribution>> {
        self.group_sums
            .iter()
            .zip(&self.group_counts)
            .filter(|(_, &c)| c > 0)
            .map(|(s, &c)| mean_of(self.n, s, c))
            .collect()
    }
}

fn mean_of(n: usize, sums: &[f64], count: usize) -> Result<Distribution> {
    if count == 0 {
        return Err(WalkError::HistoryTooShort {
            requested: 1,
            available: 0,
        });
    }
    let inv = 1.0 / count as f64;
    Distribution::new(n, sums.iter().map(|s| s * inv).collect())
}

/// All trials of a broken-link ensemble, evolved in lockstep.
#[derive(Debug)]
pub struct Ensemble {
    config: EnsembleConfig,
    trials: Vec<Trial>,
    acc: EnsembleAccumulator,
    time: usize,
}

#[derive(Debug)]
struct Trial {
    walk: Walk,
    mask: EdgeMask,
    probs: Vec<f64>,
}

impl Ensemble {
    pub fn new(config: EnsembleConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n;
        let coin = CoinMatrix::grover(n)?;
        let start = config.initial.state(n)?;
        let trials = (0..config.trials)
            .map(|_| {
                Ok(Trial {
                    walk: Walk::new(start.clone(), coin.clone())?,
                    mask: EdgeMask::closed(n),
                    probs: vec![0.0; 1 << n],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut ensemble = Self {
            acc: EnsembleAccumulator::new(n, ERROR_GROUPS.min(config.trials)),
            config,
            trials,
            time: 0,
        };
        ensemble.accumulate();
        Ok(ensemble)
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Sums over trials at the current step.
    pub fn accumulator(&self) -> &EnsembleAccumulator {
        &self.acc
    }

    /// State of one trial.
    pub fn trial_state(&self, trial: usize) -> Option<&WalkerState> {
        self.trials.get(trial).map(|t| t.walk.state())
    }

    /// Advances every trial by one step, each with a fresh mask.
    pub fn advance(&mut self) -> Result<()> {
        let EnsembleConfig { p, seed, .. } = self.config;
        let step = self.time as u64;
        self.trials
            .par_iter_mut()
            .enumerate()
            .try_for_each(|(i, trial)| -> Result<()> {
                if p > 0.0 {
                    let mut rng = step_rng(seed, i as u64, step);
                    trial.mask.resample(p, &mut rng)?;
                }
                trial.walk.advance(Some(&trial.mask))?;
                trial.walk.position_probs_into(&mut trial.probs);
                Ok(())
            })?;
        self.time += 1;
        self.accumulate();
        Ok(())
    }

    fn accumulate(&mut self) {
        if self.time == 0 {
            for trial in &mut self.trials {
                trial.walk.position_probs_into(&mut trial.probs);
            }
        }
        self.acc.clear();
        for (i, trial) in self.trials.iter().enumerate() {
            self.acc.add(i, &trial.probs);
        }
    }
}

/// Trial-averaged position distribution at every step `0..=t_max`.
pub fn run_decoherent(config: &EnsembleConfig) -> Result<Vec<Distribution>> {
    config.validate()?;
    let entries = (config.t_max + 1).saturating_mul(1 << config.n);
    if entries > MAX_HISTORY_ENTRIES {
        return Err(WalkError::ResourceLimit(format!(
            "history of {entries} probabilities exceeds {MAX_HISTORY_ENTRIES}"
        )));
    }
    let mut ensemble = Ensemble::new(config.clone())?;
    let mut history = Vec::with_capacity(config.t_max + 1);
    history.push(ensemble.accumulator().mean()?);
    for _ in 0..config.t_max {
        ensemble.advance()?;
        history.push(ensemble.accumulator().mean()?);
    }
    Ok(history)
}

/// Distance per step with a batch-means standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct TvdCurve {
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Distance curves of the ensemble against each reference, for both the
/// time-averaged distribution (`average`) and the instantaneous one.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherentCurves {
    pub average: Vec<TvdCurve>,
    pub instantaneous: Vec<TvdCurve>,
}

fn mean_and_stderr(xs: &[f64]) -> f64 {
    let g = xs.len();
    if g < 2 {
        return f64::NAN;
    }
    let m = xs.iter().sum::<f64>() / g as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (g - 1) as f64;
    (var / g as f64).sqrt()
}

/// Streams the ensemble and records distances to `references` at every step.
///
/// Average curves follow the coherent convention: entry `T` is the distance
/// of the mean of steps `0..T`, and entry 0 repeats entry 1.
pub fn decoherent_tvd_curves(config: &EnsembleConfig, references: &[&Distribution]) -> Result<DecoherentCurves> {
    let n = config.n;
    for r in references {
        if r.n() != n {
            return Err(WalkError::DimensionMismatch {
                what: "reference",
                expected: n,
                found: r.n(),
            });
        }
    }
    let mut ensemble = Ensemble::new(config.clone())?;
    let groups = ensemble.accumulator().group_counts.len();
    let mut avg = CesaroAverage::new(n);
    let mut group_avgs = vec![CesaroAverage::new(n); groups];
    let empty = || TvdCurve {
        values: Vec::with_capacity(config.t_max + 1),
        stderr: Vec::with_capacity(config.t_max + 1),
    };
    let mut average: Vec<TvdCurve> = references.iter().map(|_| empty()).collect();
    let mut instantaneous: Vec<TvdCurve> = references.iter().map(|_| empty()).collect();
    let mut mean = vec![0.0; 1 << n];
    let mut group_buf: Vec<Vec<f64>> = vec![vec![0.0; 1 << n]; groups];
    let mut scratch = Vec::with_capacity(groups);

    for t in 0..=config.t_max {
        if t > 0 {
            ensemble.advance()?;
        }
        let acc = ensemble.accumulator();
        let inv = 1.0 / acc.trials as f64;
        mean.iter_mut().zip(&acc.sums).for_each(|(m, s)| *m = s * inv);
        for ((buf, sums), &count) in group_buf.iter_mut().zip(&acc.group_sums).zip(&acc.group_counts) {
            let inv = 1.0 / count as f64;
            buf.iter_mut().zip(sums).for_each(|(m, s)| *m = s * inv);
        }

        for (curve, r) in instantaneous.iter_mut().zip(references) {
            curve.values.push(crate::metrics::tvd_slices(&mean, r.probs()));
            scratch.clear();
            scratch.extend(group_buf.iter().map(|g| crate::metrics::tvd_slices(g, r.probs())));
            curve.stderr.push(mean_and_stderr(&scratch));
        }

        if t < config.t_max {
            avg.push(&mean);
            group_avgs.iter_mut().zip(&group_buf).for_each(|(a, g)| a.push(g));
            for (curve, r) in average.iter_mut().zip(references) {
                let d = avg.tvd_to(r.probs());
                scratch.clear();
                scratch.extend(group_avgs.iter().map(|a| a.tvd_to(r.probs())));
                let se = mean_and_stderr(&scratch);
                if t == 0 {
                    curve.values.push(d);
                    curve.stderr.push(se);
                }
                curve.values.push(d);
                curve.stderr.push(se);
            }
        }
    }
    Ok(DecoherentCurves { average, instantaneous })
}

/// Average mixing times to the uniform distribution for several thresholds
/// from one ensemble run.
pub fn decoherent_mixing_times(config: &EnsembleConfig, epsilons: &[f64]) -> Result<Vec<MixingResult>> {
    for &e in epsilons {
        check_epsilon(e)?;
    }
    let uniform = Distribution::uniform(config.n);
    let curves = decoherent_tvd_curves(config, &[&uniform])?;
    let curve = &curves.average[0].values;
    epsilons
        .iter()
        .map(|&e| MixingResult::from_average_curve(curve.clone(), e))
        .collect()
}

/// Average mixing time of the broken-link ensemble to the uniform distribution.
pub fn decoherent_mixing_time(
    n: usize,
    p: f64,
    epsilon: f64,
    trials: usize,
    t_max: usize,
    seed: u64,
) -> Result<MixingResult> {
    let config = EnsembleConfig::new(n, p, t_max, trials, seed);
    decoherent_mixing_times(&config, &[epsilon]).map(|mut v| v.remove(0))
}
