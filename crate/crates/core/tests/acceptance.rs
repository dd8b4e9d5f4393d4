//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report prints in order. Exits
//! non-zero when any criterion fails.

use std::time::Instant;

use hyperwalk::decoherence::{decoherent_mixing_times, decoherent_tvd_curves, step_rng};
use hyperwalk::metrics::{coherent_average_tvd_curve, coherent_instantaneous_tvd_curve, linear_fit, MixingResult};
use hyperwalk::spectral::{count_distinct, stationary_pi_by_weight};
use hyperwalk::{
    aharonov_bound, grover_coin, initial_state_uniform_full, instantaneous_mixing_time, run_decoherent, sample_mask,
    stationary_pi_closed, stationary_pi_spectral, step, Distribution, EdgeMask, EnsembleConfig, InitialCondition,
    ReferenceKind, Walk, WalkerState,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

const SEED: u64 = 2024;
const TRIALS: usize = 200;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

/// Closed form agrees with the spectral double sum.
fn closed_vs_spectral() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let closed = stationary_pi_closed(n).map_err(fail)?;
        let spectral = stationary_pi_spectral(n).map_err(fail)?;
        for (a, b) in closed.probs().iter().zip(spectral.probs()) {
            worst = worst.max((a - b).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-10 && secs < 60.0,
        format!("max |closed - spectral| = {worst:.2e} over n=2..8 in {secs:.2}s"),
    )
}

/// Limiting probability at the origin.
fn origin_probability() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=12 {
        let nf = n as f64;
        let gamma_expr = 0.25f64.powi(n as i32)
            + (ln_gamma(nf + 0.5) - ln_gamma(nf)).exp() / (2.0 * std::f64::consts::PI.sqrt() * nf);
        let closed = stationary_pi_closed(n).map_err(fail)?.probs()[0];
        worst = worst.max((closed - gamma_expr).abs());
    }
    let n3 = stationary_pi_closed(3).map_err(fail)?.probs()[0];
    check(
        worst <= 1e-12 && (n3 - 11.0 / 64.0).abs() <= 1e-15,
        format!("max deviation {worst:.2e} over n=2..12; n=3 gives {n3}"),
    )
}

/// Maximum of `curve` over `[lo, hi)`.
fn window_max(curve: &[f64], lo: usize, hi: usize) -> f64 {
    curve[lo..hi.min(curve.len())].iter().copied().fold(0.0, f64::max)
}

/// Time-averaged distance to `π` decays like `1/T` and is small by `T = 10^4`.
fn simulation_vs_analytic() -> Outcome {
    let n = 8;
    let pi = stationary_pi_closed(n).map_err(fail)?;
    let curve = coherent_average_tvd_curve(n, &pi, 10_000).map_err(fail)?;
    let final_value = curve[10_000];
    // envelope over dyadic windows [T, 2T)
    let starts: Vec<usize> = (0..10).map(|i| 10 << i).collect();
    let xs: Vec<f64> = starts.iter().map(|&t| (t as f64).ln()).collect();
    let ys: Vec<f64> = starts.iter().map(|&t| window_max(&curve, t, 2 * t).ln()).collect();
    let fit = linear_fit(&xs, &ys).map_err(fail)?;
    check(
        final_value < 0.02 && (-1.25..=-0.75).contains(&fit.slope),
        format!(
            "TVD(T=10^4) = {final_value:.2e}; envelope log-log slope {:.3} (R² {:.3}) over T=10..10240",
            fit.slope, fit.r_squared
        ),
    )
}

/// Time-averaged distance never exceeds the eigenvalue-gap bound.
fn bound_dominance() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    let mut violations = 0;
    for n in 3..=10 {
        let pi = stationary_pi_closed(n).map_err(fail)?;
        let curve = coherent_average_tvd_curve(n, &pi, 10_000).map_err(fail)?;
        for (t, &d) in curve.iter().enumerate().skip(1) {
            let ratio = d / aharonov_bound(n, t);
            worst_ratio = worst_ratio.max(ratio);
            if ratio > 1.0 {
                violations += 1;
            }
        }
    }
    check(
        violations == 0,
        format!("{violations} violations for n=3..10, T=1..10^4; max TVD/bound = {worst_ratio:.3}"),
    )
}

fn coherent_mixing(n: usize, epsilons: &[f64]) -> Result<Vec<Option<usize>>, String> {
    let pi = stationary_pi_closed(n).map_err(fail)?;
    let curve = coherent_average_tvd_curve(n, &pi, 200 * n).map_err(fail)?;
    epsilons
        .iter()
        .map(|&e| {
            MixingResult::from_average_curve(curve.clone(), e)
                .map(|m| m.time)
                .map_err(fail)
        })
        .collect()
}

/// Average mixing time grows linearly in `n` and in `1/ε`.
fn mixing_scaling() -> Outcome {
    let ns: Vec<usize> = (4..=10).collect();
    let mut ms = Vec::new();
    for &n in &ns {
        ms.push(coherent_mixing(n, &[0.2])?[0].ok_or(format!("no mixing time at n={n}"))? as f64);
    }
    let fit_n = linear_fit(&ns.iter().map(|&n| n as f64).collect::<Vec<_>>(), &ms).map_err(fail)?;
    let eps = [0.4, 0.3, 0.2, 0.15, 0.1];
    let me: Vec<f64> = coherent_mixing(8, &eps)?
        .into_iter()
        .map(|m| m.map_or(f64::NAN, |t| t as f64))
        .collect();
    let inv: Vec<f64> = eps.iter().map(|e| 1.0 / e).collect();
    let fit_e = linear_fit(&inv, &me).map_err(fail)?;
    check(
        fit_n.r_squared > 0.95 && fit_e.r_squared > 0.95,
        format!(
            "M_0.2(n=4..10) = {ms:?}, R² {:.3}; M_ε(n=8) vs 1/ε = {me:?}, R² {:.3}",
            fit_n.r_squared, fit_e.r_squared
        ),
    )
}

/// Instantaneous mixing to the parity-adjusted uniform distribution has slope near `π/4`.
fn instantaneous_uniform() -> Outcome {
    let ns: Vec<usize> = (4..=10).collect();
    let mut times = Vec::new();
    for &n in &ns {
        let m = instantaneous_mixing_time(n, 0.3, ReferenceKind::Uniform, 200 * n).map_err(fail)?;
        times.push(m.time.ok_or(format!("no instantaneous time at n={n}"))? as f64);
    }
    let fit = linear_fit(&ns.iter().map(|&n| n as f64).collect::<Vec<_>>(), &times).map_err(fail)?;
    let target = std::f64::consts::FRAC_PI_4;
    check(
        (fit.slope - target).abs() <= 0.15 * target,
        format!(
            "I_0.3(n=4..10) = {times:?}; slope {:.3} vs π/4 = {target:.3} ± 15%",
            fit.slope
        ),
    )
}

/// No instantaneous mixing to the parity-adjusted limiting distribution.
fn instantaneous_nonexistence() -> Outcome {
    let n = 8;
    let t_max = 200 * n;
    let pi = stationary_pi_closed(n).map_err(fail)?;
    let curve = coherent_instantaneous_tvd_curve(n, &pi, t_max).map_err(fail)?;
    let minima: Vec<(usize, f64)> = (1..t_max)
        .filter(|&t| curve[t] <= curve[t - 1] && curve[t] <= curve[t + 1])
        .map(|t| (t, curve[t]))
        .collect();
    let lowest = minima
        .iter()
        .copied()
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let first = curve.iter().position(|&d| d <= 0.2);
    check(
        first.is_none() && lowest.1 > 0.2,
        format!(
            "first t with TVD <= 0.2: {first:?}; lowest local minimum {:.4} at t={} (t_max={t_max})",
            lowest.1, lowest.0
        ),
    )
}

/// Broken-link ensemble becomes uniform on a time scale `~1/p`.
fn decoherent_uniformization() -> Outcome {
    let (n, p, t_max) = (8, 0.05, 2000);
    let u = Distribution::uniform(n);
    let starts = [
        InitialCondition::Symmetric,
        InitialCondition::Basis {
            coin: 3,
            vertex: 0b1011_0101,
        },
    ];
    let mut finals = Vec::new();
    let mut averages = Vec::new();
    let mut detail = Vec::new();
    let mut ok = true;
    for start in starts {
        let cfg = EnsembleConfig::new(n, p, t_max, TRIALS, SEED).with_initial(start);
        let curve = decoherent_tvd_curves(&cfg, &[&u])
            .map_err(fail)?
            .average
            .remove(0)
            .values;
        let crossing = (1..curve.len()).find(|&t| curve[t] < 0.5);
        let in_window = crossing.is_some_and(|t| (1.0 / (3.0 * p)..=3.0 / p).contains(&(t as f64)));
        let samples = [curve[100], curve[400], curve[1600]];
        let decaying = samples.windows(2).all(|w| w[1] < w[0]);
        ok &= in_window && decaying && curve[t_max] < 0.05;
        detail.push(format!(
            "{start:?}: crossing {crossing:?}, TVD at 100/400/1600/2000 = {:.4}/{:.4}/{:.4}/{:.4}",
            samples[0], samples[1], samples[2], curve[t_max]
        ));
        finals.push(curve[t_max]);
        let history = run_decoherent(&cfg).map_err(fail)?;
        let mut avg = vec![0.0; 1 << n];
        for d in &history[..t_max] {
            avg.iter_mut().zip(d.probs()).for_each(|(a, v)| *a += v / t_max as f64);
        }
        averages.push(avg);
    }
    let between: f64 = averages[0].iter().zip(&averages[1]).map(|(a, b)| (a - b).abs()).sum();
    ok &= between < 0.05;
    detail.push(format!("TVD between the two limits {between:.4}"));
    check(ok, detail.join("; "))
}

/// Decoherent mixing time is smallest at the grid point nearest `p = 0.1`.
fn critical_rate() -> Outcome {
    let n = 8;
    let ps = [0.02, 0.05, 0.1, 0.2, 0.3, 0.4];
    let mut times = Vec::new();
    for &p in &ps {
        let cfg = EnsembleConfig::new(n, p, 200 * n, TRIALS, SEED);
        let m = decoherent_mixing_times(&cfg, &[0.4]).map_err(fail)?.remove(0);
        times.push(m.time.unwrap_or(usize::MAX));
    }
    let best = *times.iter().min().unwrap_or(&usize::MAX);
    check(
        times[2] == best && best != usize::MAX,
        format!("M_0.4 for p={ps:?}: {times:?} (seed {SEED}, {TRIALS} trials)"),
    )
}

/// Decoherent mixing is slower than coherent mixing and grows like a power of `n`.
fn decoherent_vs_coherent() -> Outcome {
    let ns: Vec<usize> = (4..=9).collect();
    let mut deco = Vec::new();
    let mut coh = Vec::new();
    for &n in &ns {
        let cfg = EnsembleConfig::new(n, 0.1, 200 * n, TRIALS, SEED);
        let m = decoherent_mixing_times(&cfg, &[0.4]).map_err(fail)?.remove(0);
        deco.push(m.time.ok_or(format!("no decoherent time at n={n}"))?);
        coh.push(coherent_mixing(n, &[0.4])?[0].ok_or(format!("no coherent time at n={n}"))?);
    }
    let ordered = deco.iter().zip(&coh).all(|(d, c)| d > c);
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = deco.iter().map(|&m| (m as f64).ln()).collect();
    let fit = linear_fit(&xs, &ys).map_err(fail)?;
    check(
        ordered && (2.0..=2.7).contains(&fit.slope),
        format!(
            "n=4..9 decoherent {deco:?} vs coherent {coh:?}; exponent {:.3} (R² {:.3})",
            fit.slope, fit.r_squared
        ),
    )
}

fn random_state(n: usize, seed: u64) -> WalkerState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps: Vec<Complex64> = (0..n << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|z| *z /= norm);
    WalkerState::from_amplitudes(n, amps).expect("normalized")
}

/// Unitarity, parity, symmetry, fixed point and determinism.
fn property_suites() -> Outcome {
    let mut problems = Vec::new();

    let n = 6;
    let coin = grover_coin(n).map_err(fail)?;
    let mut state = random_state(n, 1);
    let mut drift: f64 = 0.0;
    for s in 0..10_000u64 {
        let p = (s % 101) as f64 / 100.0;
        let mask = sample_mask(n, p, &mut step_rng(SEED, 0, s)).map_err(fail)?;
        state = step(&state, &coin, &mask).map_err(fail)?;
        drift = drift.max((state.norm_sqr() - 1.0).abs());
    }
    if drift >= 1e-10 {
        problems.push(format!("norm drift {drift:.2e}"));
    }

    for n in 2..=8 {
        let mut walk = Walk::grover_symmetric(n).map_err(fail)?;
        for t in 0..=4 * n {
            let p = walk.state().position_distribution();
            let off = p
                .probs()
                .iter()
                .enumerate()
                .any(|(x, &v)| (x.count_ones() as usize) % 2 != t % 2 && v != 0.0);
            if off {
                problems.push(format!("parity violated at n={n} t={t}"));
            }
            walk.advance(None).map_err(fail)?;
        }
    }

    for n in 3..=12 {
        let pi = stationary_pi_closed(n).map_err(fail)?;
        let distinct = count_distinct(&stationary_pi_by_weight(n).map_err(fail)?, 1e-9);
        if pi.hamming_spread() > 1e-12 || distinct != 1 + n / 2 {
            problems.push(format!(
                "n={n}: spread {:.1e}, {distinct} distinct values",
                pi.hamming_spread()
            ));
        }
    }

    for n in 2..=8 {
        let u = initial_state_uniform_full(n).map_err(fail)?;
        let next = step(&u, &grover_coin(n).map_err(fail)?, &EdgeMask::closed(n)).map_err(fail)?;
        let moved = u
            .amplitudes()
            .iter()
            .zip(next.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if moved > 1e-15 {
            problems.push(format!("uniform state moved by {moved:.1e} at n={n}"));
        }
    }

    let cfg = EnsembleConfig::new(7, 0.1, 100, 32, SEED);
    let a = run_decoherent(&cfg).map_err(fail)?;
    let b = run_decoherent(&cfg).map_err(fail)?;
    let identical = a
        .iter()
        .zip(&b)
        .all(|(x, y)| x.probs().iter().zip(y.probs()).all(|(u, v)| u.to_bits() == v.to_bits()));
    if !identical {
        problems.push("reruns differ".into());
    }

    let summary = format!("norm drift {drift:.1e} over 10^4 masks; parity, symmetry, fixed point, determinism checked");
    if problems.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; problems: {}", problems.join(", ")))
    }
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("closed form matches spectral sum", closed_vs_spectral),
        ("origin probability", origin_probability),
        ("simulation vs analytic limit", simulation_vs_analytic),
        ("bound dominance", bound_dominance),
        ("mixing time scaling", mixing_scaling),
        ("instantaneous uniform mixing", instantaneous_uniform),
        ("no instantaneous mixing to the limit", instantaneous_nonexistence),
        ("decoherent uniformization", decoherent_uniformization),
        ("critical decoherence rate", critical_rate),
        ("decoherent vs coherent ordering", decoherent_vs_coherent),
        ("property suites", property_suites),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} criterion {:>2} {name} [{secs:.1}s]: {detail}", i + 1);
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!(
            "acceptance: {} of {} criteria failed: {failed:?}",
            failed.len(),
            criteria.len()
        );
        std::process::exit(1);
    }
}
