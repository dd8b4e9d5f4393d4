//! Probability vectors over the vertices of the hypercube.

use crate::error::{Result, WalkError};

/// Entries above this (in magnitude) negative value are treated as round-off and clamped.
pub const NEGATIVE_CLAMP: f64 = 1e-14;

/// Allowed deviation of the total mass from one.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// A probability distribution over the `2^n` vertices of the `n`-cube.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    n: usize,
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates `probs` as a distribution on the `n`-cube.
    ///
    /// Negative entries no smaller than `-1e-14` are clamped to zero; anything
    /// more negative is rejected, as is a total mass further than `1e-10` from one.
    pub fn new(n: usize, mut probs: Vec<f64>) -> Result<Self> {
        check_len(n, probs.len())?;
        for (index, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -NEGATIVE_CLAMP {
                return Err(WalkError::NegativeProbability { index, value: *p });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOLERANCE {
            return Err(WalkError::NotNormalized { sum });
        }
        Ok(Self { n, probs })
    }

    /// Wraps a vector that is nonnegative and normalized by construction.
    pub(crate) fn from_raw(n: usize, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), 1usize << n);
        Self { n, probs }
    }

    pub fn uniform(n: usize) -> Self {
        let size = 1usize << n;
        Self::from_raw(n, vec![1.0 / size as f64; size])
    }

    pub fn point_mass(n: usize, vertex: usize) -> Result<Self> {
        let size = 1usize << n;
        if vertex >= size {
            return Err(WalkError::OutOfRange {
                name: "vertex",
                value: vertex as f64,
                expected: "vertex < 2^n",
            });
        }
        let mut probs = vec![0.0; size];
        probs[vertex] = 1.0;
        Ok(Self::from_raw(n, probs))
    }

    /// Builds a distribution that depends only on Hamming weight from its
    /// per-vertex values `per_weight[h]`, `h = 0..=n`.
    pub fn from_weight_values(n: usize, per_weight: &[f64]) -> Result<Self> {
        if per_weight.len() != n + 1 {
            return Err(WalkError::LengthMismatch {
                left: per_weight.len(),
                right: n + 1,
            });
        }
        let probs = (0..1usize << n).map(|x| per_weight[x.count_ones() as usize]).collect();
        Self::new(n, probs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Conditions the distribution on the vertices whose Hamming weight has
    /// the given parity and renormalizes.
    pub fn restricted_to_parity(&self, parity: usize) -> Result<Self> {
        let parity = parity & 1;
        let mut probs: Vec<f64> = self
            .probs
            .iter()
            .enumerate()
            .map(|(x, &p)| {
                if (x.count_ones() as usize) & 1 == parity {
                    p
                } else {
                    0.0
                }
            })
            .collect();
        let mass: f64 = probs.iter().sum();
        if mass <= 0.0 {
            return Err(WalkError::NotNormalized { sum: mass });
        }
        probs.iter_mut().for_each(|p| *p /= mass);
        Ok(Self::from_raw(self.n, probs))
    }

    /// Largest spread of values within a Hamming-weight class.
    pub fn hamming_spread(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.n + 1];
        let mut hi = vec![f64::NEG_INFINITY; self.n + 1];
        for (x, &p) in self.probs.iter().enumerate() {
            let h = x.count_ones() as usize;
            lo[h] = lo[h].min(p);
            hi[h] = hi[h].max(p);
        }
        lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max)
    }

    /// One representative value per Hamming weight, if the distribution is
    /// symmetric to within `tol`.
    pub fn weight_values(&self, tol: f64) -> Result<Vec<f64>> {
        let spread = self.hamming_spread();
        if spread > tol {
            return Err(WalkError::NotHammingSymmetric { spread });
        }
        // vertex (1 << h) - 1 has weight h
        Ok((0..=self.n).map(|h| self.probs[(1usize << h) - 1]).collect())
    }
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if n >= usize::BITS as usize - 1 || len != 1usize << n {
        return Err(WalkError::LengthMismatch {
            left: len,
            right: 1usize.checked_shl(n as u32).unwrap_or(0),
        });
    }
    Ok(())
}
