//! Fourier-space eigensystem of the Grover walk and its limiting distribution.
//!
//! The walk is diagonal in the characters of `Z_2^n`. On the block labelled
//! `k` it acts on the coin register as `U_k(i, j) = (-1)^{k_i} C_ij`, whose
//! only eigenvalues that matter for the symmetric start are `e^{±iω_k}` with
//! `cos ω_k = 1 - 2|k|/n`.
//!
//! Two independent routes to the limiting distribution `π` are provided:
//! [`stationary_pi_spectral`] sums over pairs of equal-weight Fourier labels
//! and works for any vertex, while [`stationary_pi_closed`] evaluates a
//! combinatorial sum once per Hamming weight and scales to `n = 64`.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::distribution::Distribution;
use crate::error::{Result, WalkError};

/// Largest `n` for the `O(4^n n)` Fourier-pair evaluation.
pub const MAX_SPECTRAL_N: usize = 10;

/// Largest `n` for the per-weight combinatorial evaluation.
pub const MAX_CLOSED_N: usize = 64;

/// Largest `n` for which a per-weight result is expanded to every vertex.
pub const MAX_BROADCAST_N: usize = 24;

fn check_range(n: usize, max: usize) -> Result<()> {
    if !(2..=max).contains(&n) {
        return Err(WalkError::InvalidDimension {
            n,
            reason: format!("supported range is 2..={max}"),
        });
    }
    Ok(())
}

/// Phase `ω` with `cos ω = 1 - 2·weight/n`, in `[0, π]`.
pub fn omega(n: usize, weight: usize) -> Result<f64> {
    if n == 0 {
        return Err(WalkError::InvalidDimension {
            n,
            reason: "need n >= 1".into(),
        });
    }
    if weight > n {
        return Err(WalkError::WeightOutOfRange { weight, n });
    }
    // clamp guards acos against 1 + ulp
    Ok((1.0 - 2.0 * weight as f64 / n as f64).clamp(-1.0, 1.0).acos())
}

/// Coefficient `α_j(k)` of the eigenvector of `U_k` with eigenvalue `e^{iω_k}`.
pub fn alpha(n: usize, k: usize, j: usize) -> Result<Complex64> {
    if j >= n {
        return Err(WalkError::CoinIndexOutOfRange { index: j, n });
    }
    if k >> n != 0 {
        return Err(WalkError::OutOfRange {
            name: "k",
            value: k as f64,
            expected: "k < 2^n",
        });
    }
    let weight = k.count_ones() as usize;
    if weight == 0 || weight == n {
        return Err(WalkError::DegenerateWeight { weight, n });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(if (k >> j) & 1 == 1 {
        Complex64::new(s / (weight as f64).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, -s / ((n - weight) as f64).sqrt())
    })
}

/// The full eigenvector `Σ_j α_j(k) |j⟩`.
pub fn eigenvector(n: usize, k: usize) -> Result<Vec<Complex64>> {
    (0..n).map(|j| alpha(n, k, j)).collect()
}

/// Row-major matrix of the Fourier block `U_k(i, j) = (-1)^{k_i} (2/n - δ_ij)`.
pub fn fourier_block(n: usize, k: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        let sign = if (k >> i) & 1 == 1 { -1.0 } else { 1.0 };
        for j in 0..n {
            let c = 2.0 / n as f64 - if i == j { 1.0 } else { 0.0 };
            m[i * n + j] = sign * c;
        }
    }
    m
}

/// Phases per Hamming weight plus access to the eigenvector coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    n: usize,
    omegas: Vec<f64>,
}

impl SpectralData {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(WalkError::InvalidDimension {
                n,
                reason: "need n >= 2".into(),
            });
        }
        let omegas = (0..=n).map(|h| omega(n, h)).collect::<Result<_>>()?;
        Ok(Self { n, omegas })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ω` indexed by Hamming weight `0..=n`.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn omega(&self, weight: usize) -> f64 {
        self.omegas[weight]
    }

    pub fn alpha(&self, k: usize, j: usize) -> Result<Complex64> {
        alpha(self.n, k, j)
    }
}

/// In-place unnormalized fast Walsh–Hadamard butterfly.
pub fn fwht_in_place(values: &mut [Complex64]) -> Result<()> {
    let len = values.len();
    if !len.is_power_of_two() {
        return Err(WalkError::NotPowerOfTwo { len });
    }
    let mut half = 1;
    while half < len {
        for block in values.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*a + *b, *a - *b);
                *a = s;
                *b = d;
            }
        }
        half *= 2;
    }
    Ok(())
}

/// Unitary Fourier transform on `Z_2^n`:
/// `out[k] = 2^{-n/2} Σ_x (-1)^{k·x} values[x]`. It is its own inverse.
pub fn walsh_hadamard(values: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = values.to_vec();
    fwht_in_place(&mut out)?;
    let scale = 1.0 / (out.len() as f64).sqrt();
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(out)
}

/// Limiting distribution from the sum over equal-weight Fourier label pairs.
///
/// `π(x) = 2/4^n + 4^{-n} Σ_{|k|=|k'|∉{0,n}} (-1)^{(k⊕k')·x} ⟨ν(k)|ν(k')⟩` with
/// overlap `[n (k·k') + |k|(n-2|k|)] / [2|k|(n-|k|)]`. Since `k·k'` splits over
/// coordinates, the pair sum factorizes per vertex into squares of the
/// weight-class character sums `A_w(x) = Σ_{|k|=w} (-1)^{k·x}` and
/// `B_{w,j}(x) = Σ_{|k|=w, k_j=1} (-1)^{k·x}`, giving `O(4^n n)` total work.
pub fn stationary_pi_spectral(n: usize) -> Result<Distribution> {
    check_range(n, MAX_SPECTRAL_N)?;
    let size = 1usize << n;
    let nf = n as f64;
    let norm = 1.0 / (size as f64 * size as f64);
    let mut a = vec![0i64; n + 1];
    let mut b = vec![0i64; (n + 1) * n];
    let probs = (0..size)
        .map(|x| {
            a.iter_mut().for_each(|v| *v = 0);
            b.iter_mut().for_each(|v| *v = 0);
            for k in 0..size {
                let w = k.count_ones() as usize;
                let sign = if (k & x).count_ones() & 1 == 0 { 1 } else { -1 };
                a[w] += sign;
                let row = &mut b[w * n..(w + 1) * n];
                let mut bits = k;
                while bits != 0 {
                    row[bits.trailing_zeros() as usize] += sign;
                    bits &= bits - 1;
                }
            }
            let mut acc = 0.0;
            for w in 1..n {
                let wf = w as f64;
                let b_sq: f64 = b[w * n..(w + 1) * n].iter().map(|&v| (v * v) as f64).sum();
                let a_sq = (a[w] * a[w]) as f64;
                acc += (nf * b_sq + wf * (nf - 2.0 * wf) * a_sq) / (2.0 * wf * (nf - wf));
            }
            (2.0 + acc) * norm
        })
        .collect();
    Distribution::new(n, probs)
}

/// `C(top, bottom)` as `f64`, zero unless `top >= bottom >= 0`.
struct Binomials {
    rows: Vec<Vec<f64>>,
}

impl Binomials {
    fn new(max: usize) -> Self {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(max + 1);
        for top in 0..=max {
            let mut row = vec![1.0; top + 1];
            for bottom in 1..top {
                row[bottom] = rows[top - 1][bottom - 1] + rows[top - 1][bottom];
            }
            rows.push(row);
        }
        Self { rows }
    }

    #[inline]
    fn get(&self, top: i64, bottom: i64) -> f64 {
        if bottom < 0 || top < bottom {
            return 0.0;
        }
        self.rows[top as usize][bottom as usize]
    }
}

/// `π` for a vertex of Hamming weight `weight`, from the five-fold
/// combinatorial sum (`i` = weight of the Fourier labels, `j` = their overlap).
fn pi_closed_at_weight(n: usize, weight: usize, binom: &Binomials) -> f64 {
    let n_i = n as i64;
    let w = weight as i64;
    let mut total = 0.0;
    for i in 1..n_i {
        let denom = 2.0 * (i * (n_i - i)) as f64;
        for m in 0..=w.min(i) {
            let outer = binom.get(n_i - w, i - m) * binom.get(w, m);
            if outer == 0.0 {
                continue;
            }
            for p in 0..=m {
                let c_mp = binom.get(m, p);
                // C(i-m, j-p) vanishes outside p <= j <= p + i - m
                for j in p..=(p + i - m).min(i) {
                    let c_j = binom.get(i - m, j - p);
                    let weight_ij = (i * (n_i - 2 * i) + n_i * j) as f64 / denom;
                    // C(w-m, l-m+p) vanishes outside m-p <= l <= w-p
                    let mut inner = 0.0;
                    for l in (m - p)..=(w - p) {
                        let term = binom.get(w - m, l - m + p) * binom.get(n_i - w - i + m, i - j - l + m - p);
                        if l % 2 == 0 {
                            inner += term;
                        } else {
                            inner -= term;
                        }
                    }
                    total += outer * c_mp * c_j * weight_ij * inner;
                }
            }
        }
    }
    let four_n = 4f64.powi(n as i32);
    (2.0 + total) / four_n
}

/// Per-vertex limiting probability for each Hamming weight `0..=n`.
pub fn stationary_pi_by_weight(n: usize) -> Result<Vec<f64>> {
    check_range(n, MAX_CLOSED_N)?;
    let binom = Binomials::new(2 * n);
    // π(x) = π(complement of x), so only half the weights need the sum
    let mut values = vec![0.0; n + 1];
    for h in 0..=n / 2 {
        let v = pi_closed_at_weight(n, h, &binom);
        values[h] = v;
        values[n - h] = v;
    }
    for (h, v) in values.iter_mut().enumerate() {
        if *v < -crate::distribution::NEGATIVE_CLAMP {
            return Err(WalkError::NegativeProbability { index: h, value: *v });
        }
        *v = v.max(0.0);
    }
    Ok(values)
}

/// Limiting distribution over all `2^n` vertices via the per-weight sum.
pub fn stationary_pi_closed(n: usize) -> Result<Distribution> {
    check_range(n, MAX_CLOSED_N)?;
    if n > MAX_BROADCAST_N {
        return Err(WalkError::ResourceLimit(format!(
            "expanding to 2^{n} vertices exceeds n<={MAX_BROADCAST_N}; use stationary_pi_by_weight"
        )));
    }
    Distribution::from_weight_values(n, &stationary_pi_by_weight(n)?)
}

/// `π(0) = 4^{-n} + Γ(n + 1/2) / (2 √π n Γ(n))`.
pub fn pi_at_origin(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(WalkError::InvalidDimension {
            n,
            reason: "need n >= 2".into(),
        });
    }
    let nf = n as f64;
    let log_ratio = ln_gamma(nf + 0.5) - ln_gamma(nf) - (2.0 * std::f64::consts::PI.sqrt() * nf).ln();
    Ok(4f64.powf(-nf) + log_ratio.exp())
}

/// Large-`n` approximation `π(0) ≈ 1/√(2π(2n+1))`.
pub fn pi_at_origin_asymptotic(n: usize) -> f64 {
    1.0 / (2.0 * std::f64::consts::PI * (2 * n + 1) as f64).sqrt()
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probability of Hamming weight `h` from per-vertex values:
/// `p(h) = C(n, h) · value[h]`.
pub fn hamming_profile_from_weights(per_weight: &[f64]) -> Vec<f64> {
    let n = per_weight.len().saturating_sub(1);
    per_weight
        .iter()
        .enumerate()
        .map(|(h, v)| binomial_f64(n, h) * v)
        .collect()
}

/// Hamming-weight profile of a distribution that depends only on `|x|`
/// (checked to 1e-10).
pub fn hamming_profile(pi: &Distribution) -> Result<Vec<f64>> {
    Ok(hamming_profile_from_weights(&pi.weight_values(1e-10)?))
}

/// `C(n, h) / 2^n`, the profile of the uniform distribution.
pub fn binomial_profile(n: usize) -> Vec<f64> {
    let scale = 0.5f64.powi(n as i32);
    (0..=n).map(|h| binomial_f64(n, h) * scale).collect()
}

/// Number of distinct values in `values` up to relative tolerance `rel`.
pub fn count_distinct(values: &[f64], rel: f64) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut last: Option<f64> = None;
    for v in sorted {
        match last {
            Some(prev) if (v - prev).abs() <= rel * v.abs().max(prev.abs()) => {}
            _ => {
                count += 1;
                last = Some(v);
            }
        }
    }
    count
}
