//! Distances between distributions and mixing times of the walk.
//!
//! Distances use the unnormalized convention `‖A - B‖ = Σ_x |A(x) - B(x)|`,
//! so they range over `[0, 2]`.

use crate::distribution::Distribution;
use crate::error::{Result, WalkError};
use crate::spectral::{omega, stationary_pi_closed};
use crate::walk::Walk;

/// Longest horizon a mixing-time search will run.
pub const MAX_HORIZON: usize = 10_000_000;

/// Default search horizon for dimension `n`.
pub fn default_t_max(n: usize) -> usize {
    200 * n
}

pub fn tvd(a: &Distribution, b: &Distribution) -> Result<f64> {
    if a.len() != b.len() {
        return Err(WalkError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(tvd_slices(a.probs(), b.probs()))
}

pub(crate) fn tvd_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Cesàro mean of the first `t` distributions of `history`.
pub fn time_averaged(history: &[Distribution], t: usize) -> Result<Distribution> {
    if t == 0 {
        return Err(WalkError::OutOfRange {
            name: "T",
            value: 0.0,
            expected: "T >= 1",
        });
    }
    if t > history.len() {
        return Err(WalkError::HistoryTooShort {
            requested: t,
            available: history.len(),
        });
    }
    let n = history[0].n();
    let mut avg = CesaroAverage::new(n);
    for d in &history[..t] {
        if d.n() != n {
            return Err(WalkError::DimensionMismatch {
                what: "history entry",
                expected: n,
                found: d.n(),
            });
        }
        avg.push(d.probs());
    }
    avg.mean()
}

/// Running time average of distributions.
#[derive(Debug, Clone)]
pub struct CesaroAverage {
    n: usize,
    sums: Vec<f64>,
    count: usize,
}

impl CesaroAverage {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            sums: vec![0.0; 1 << n],
            count: 0,
        }
    }

    pub fn push(&mut self, probs: &[f64]) {
        debug_assert_eq!(probs.len(), self.sums.len());
        self.sums.iter_mut().zip(probs).for_each(|(s, p)| *s += p);
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Distance of the current average to `reference`, without allocating.
    pub fn tvd_to(&self, reference: &[f64]) -> f64 {
        let inv = 1.0 / self.count as f64;
        self.sums.iter().zip(reference).map(|(s, r)| (s * inv - r).abs()).sum()
    }

    pub fn mean(&self) -> Result<Distribution> {
        if self.count == 0 {
            return Err(WalkError::HistoryTooShort {
                requested: 1,
                available: 0,
            });
        }
        let inv = 1.0 / self.count as f64;
        Distribution::new(self.n, self.sums.iter().map(|s| s * inv).collect())
    }
}

/// Outcome of a mixing-time search.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingResult {
    pub epsilon: f64,
    /// `None` when the threshold is not met within the horizon.
    pub time: Option<usize>,
    /// Last step examined; an average mixing time is certified only up to here.
    pub horizon: usize,
    /// Distance per step, indexed `0..=horizon`.
    pub tvd_curve: Vec<f64>,
}

impl MixingResult {
    /// Smallest `T` with `curve[t] <= ε` for every `t` in `T..=horizon`,
    /// found by scanning back to the last exceedance.
    pub fn from_average_curve(curve: Vec<f64>, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        let horizon = curve.len().saturating_sub(1);
        let time = match curve.iter().rposition(|&d| d > epsilon) {
            None => Some(0),
            Some(last) if last == horizon => None,
            Some(last) => Some(last + 1),
        };
        Ok(Self {
            epsilon,
            time,
            horizon,
            tvd_curve: curve,
        })
    }

    /// First `t` with `curve[t] <= ε`.
    pub fn from_instantaneous_curve(curve: Vec<f64>, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        let horizon = curve.len().saturating_sub(1);
        let time = curve.iter().position(|&d| d <= epsilon);
        Ok(Self {
            epsilon,
            time,
            horizon,
            tvd_curve: curve,
        })
    }
}

pub fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(WalkError::OutOfRange {
            name: "epsilon",
            value: epsilon,
            expected: "0 < epsilon <= 2",
        });
    }
    Ok(())
}

fn check_horizon(t_max: usize) -> Result<()> {
    if t_max == 0 {
        return Err(WalkError::OutOfRange {
            name: "t_max",
            value: 0.0,
            expected: "t_max >= 1",
        });
    }
    if t_max > MAX_HORIZON {
        return Err(WalkError::ResourceLimit(format!("t_max={t_max} exceeds {MAX_HORIZON}")));
    }
    Ok(())
}

/// `‖P̄_T - reference‖` for `T = 1..=t_max` of the coherent walk from the
/// symmetric start. Entry 0 repeats entry 1 (the empty average is taken to be `P_0`).
pub fn coherent_average_tvd_curve(n: usize, reference: &Distribution, t_max: usize) -> Result<Vec<f64>> {
    coherent_average_tvd_curves(n, &[reference], t_max).map(|mut v| v.remove(0))
}

/// As [`coherent_average_tvd_curve`] against several references from one run.
pub fn coherent_average_tvd_curves(n: usize, references: &[&Distribution], t_max: usize) -> Result<Vec<Vec<f64>>> {
    check_horizon(t_max)?;
    for r in references {
        if r.n() != n {
            return Err(WalkError::DimensionMismatch {
                what: "reference",
                expected: n,
                found: r.n(),
            });
        }
    }
    let mut walk = Walk::grover_symmetric(n)?;
    let mut probs = vec![0.0; 1 << n];
    let mut avg = CesaroAverage::new(n);
    let mut curves = vec![Vec::with_capacity(t_max + 1); references.len()];
    for t in 1..=t_max {
        walk.position_probs_into(&mut probs);
        avg.push(&probs);
        for (curve, r) in curves.iter_mut().zip(references) {
            let d = avg.tvd_to(r.probs());
            if t == 1 {
                curve.push(d);
            }
            curve.push(d);
        }
        if t < t_max {
            walk.advance(None)?;
        }
    }
    Ok(curves)
}

/// Average mixing time of the coherent walk from the symmetric start.
pub fn average_mixing_time(n: usize, epsilon: f64, reference: &Distribution, t_max: usize) -> Result<MixingResult> {
    check_epsilon(epsilon)?;
    let curve = coherent_average_tvd_curve(n, reference, t_max)?;
    MixingResult::from_average_curve(curve, epsilon)
}

/// Reference for instantaneous mixing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// The coherent limiting distribution `π`.
    Stationary,
    Uniform,
}

impl ReferenceKind {
    pub fn distribution(self, n: usize) -> Result<Distribution> {
        match self {
            ReferenceKind::Stationary => stationary_pi_closed(n),
            ReferenceKind::Uniform => Ok(Distribution::uniform(n)),
        }
    }
}

/// Reference conditioned on each parity class: index 0 for even `|x|`, 1 for odd.
pub fn parity_references(reference: &Distribution) -> Result<[Distribution; 2]> {
    Ok([reference.restricted_to_parity(0)?, reference.restricted_to_parity(1)?])
}

/// `‖P_t - reference_{t mod 2}‖` for `t = 0..=t_max`, where the reference is
/// restricted to the parity class the walker occupies at step `t`.
pub fn coherent_instantaneous_tvd_curve(n: usize, reference: &Distribution, t_max: usize) -> Result<Vec<f64>> {
    check_horizon(t_max)?;
    let refs = parity_references(reference)?;
    let mut walk = Walk::grover_symmetric(n)?;
    let mut probs = vec![0.0; 1 << n];
    let mut curve = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        walk.position_probs_into(&mut probs);
        curve.push(tvd_slices(&probs, refs[t % 2].probs()));
        if t < t_max {
            walk.advance(None)?;
        }
    }
    Ok(curve)
}

/// First step at which the coherent walk is `ε`-close to the parity-adjusted reference.
pub fn instantaneous_mixing_time(n: usize, epsilon: f64, kind: ReferenceKind, t_max: usize) -> Result<MixingResult> {
    check_epsilon(epsilon)?;
    let reference = kind.distribution(n)?;
    let curve = coherent_instantaneous_tvd_curve(n, &reference, t_max)?;
    MixingResult::from_instantaneous_curve(curve, epsilon)
}

/// Upper bound on `‖P̄_T - π‖` with eigenvalue gap `Δ = 2/√n`:
/// `(π √n / 2T) · (1 + ln(n 2^{n-1}))`.
pub fn aharonov_bound(n: usize, t: usize) -> f64 {
    let nf = n as f64;
    let log_term = 1.0 + nf.ln() + (nf - 1.0) * std::f64::consts::LN_2;
    std::f64::consts::PI * nf.sqrt() / (2.0 * t as f64) * log_term
}

/// `min_{1 <= |k| <= n-1} |e^{iω_k} - 1|`, evaluated numerically.
pub fn min_phase_gap(n: usize) -> Result<f64> {
    (1..n)
        .map(|h| omega(n, h).map(|w| (num_complex::Complex64::from_polar(1.0, w) - 1.0).norm()))
        .try_fold(f64::INFINITY, |acc, g| g.map(|g| acc.min(g)))
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(WalkError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}
