//! Coined walker state on the `n`-cube and the one-step evolution `S ∘ (C ⊗ I)`.
//!
//! Vertices are the integers `0..2^n`; bit `j` of a vertex is its `j`-th
//! coordinate, so the neighbour across direction `j` is `x ^ (1 << j)`.
//! Amplitudes are stored vertex-major: `amps[x * n + j]` is `ψ_{j,x}`, which
//! keeps the coin register of each vertex contiguous for the coin pass.

use num_complex::Complex64;

use crate::decoherence::EdgeMask;
use crate::distribution::Distribution;
use crate::error::{Result, WalkError};

/// Default largest dimension for which a full state vector is allocated.
pub const DEFAULT_MAX_STATE_N: usize = 16;

/// Environment variable that raises the state-vector dimension cap.
pub const MAX_N_ENV: &str = "HYPERWALK_MAX_N";

const HARD_MAX_STATE_N: usize = 30;

/// Current state-vector dimension cap, honouring `HYPERWALK_MAX_N`.
pub fn state_dimension_cap() -> usize {
    std::env::var(MAX_N_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|v| v.clamp(2, HARD_MAX_STATE_N))
        .unwrap_or(DEFAULT_MAX_STATE_N)
}

pub(crate) fn check_state_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(WalkError::InvalidDimension {
            n,
            reason: "need n >= 2".into(),
        });
    }
    let cap = state_dimension_cap();
    if n > cap {
        return Err(WalkError::ResourceLimit(format!(
            "state vector for n={n} exceeds the cap n<={cap} (set {MAX_N_ENV} to override)"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CoinKind {
    Grover,
    Dense,
}

/// A real unitary `n × n` coin acting on the direction register.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinMatrix {
    n: usize,
    entries: Vec<f64>,
    kind: CoinKind,
}

impl CoinMatrix {
    /// The Grover coin `C_ij = 2/n - δ_ij`.
    pub fn grover(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(WalkError::InvalidDimension {
                n,
                reason: "the Grover coin needs n >= 2".into(),
            });
        }
        let off = 2.0 / n as f64;
        let entries = (0..n * n)
            .map(|idx| if idx / n == idx % n { off - 1.0 } else { off })
            .collect();
        Ok(Self {
            n,
            entries,
            kind: CoinKind::Grover,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let entries = (0..n * n)
            .map(|idx| if idx / n == idx % n { 1.0 } else { 0.0 })
            .collect();
        Self::from_entries(n, entries)
    }

    /// A dense coin from row-major entries; rejected unless `C Cᵀ = I` to 1e-12.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(WalkError::InvalidDimension {
                n,
                reason: "empty coin".into(),
            });
        }
        if entries.len() != n * n {
            return Err(WalkError::LengthMismatch {
                left: entries.len(),
                right: n * n,
            });
        }
        let coin = Self {
            n,
            entries,
            kind: CoinKind::Dense,
        };
        let deviation = coin.unitarity_deviation();
        if deviation > 1e-12 {
            return Err(WalkError::NotUnitary { deviation });
        }
        Ok(coin)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_grover(&self) -> bool {
        self.kind == CoinKind::Grover
    }

    /// Largest elementwise deviation of `C Cᵀ` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for k in 0..n {
                let dot: f64 = (0..n).map(|j| self.entry(i, j) * self.entry(k, j)).sum();
                let target = if i == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Applies the coin to one vertex's coin register in place.
    pub fn apply(&self, register: &mut [Complex64]) {
        debug_assert_eq!(register.len(), self.n);
        match self.kind {
            CoinKind::Grover => {
                let scaled = register.iter().sum::<Complex64>() * (2.0 / self.n as f64);
                register.iter_mut().for_each(|a| *a = scaled - *a);
            }
            CoinKind::Dense => {
                let input = register.to_vec();
                for (i, out) in register.iter_mut().enumerate() {
                    let row = &self.entries[i * self.n..(i + 1) * self.n];
                    *out = row.iter().zip(&input).map(|(c, a)| a * c).sum();
                }
            }
        }
    }
}

/// Grover coin for dimension `n` (`n >= 2`).
pub fn grover_coin(n: usize) -> Result<CoinMatrix> {
    CoinMatrix::grover(n)
}

/// Amplitudes `ψ_{j,x}` of a walker on the `n`-cube.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    n: usize,
    amps: Vec<Complex64>,
}

impl WalkerState {
    /// Symmetric start: localized at vertex 0, uniform over the coin register.
    pub fn symmetric(n: usize) -> Result<Self> {
        check_state_dimension(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); n << n];
        let a = 1.0 / (n as f64).sqrt();
        amps[..n].iter_mut().for_each(|v| *v = Complex64::new(a, 0.0));
        Ok(Self { n, amps })
    }

    /// Uniform superposition over every `(j, x)`; an eigenstate of the
    /// coherent step with eigenvalue 1.
    pub fn uniform_full(n: usize) -> Result<Self> {
        check_state_dimension(n)?;
        let a = 1.0 / ((n << n) as f64).sqrt();
        Ok(Self {
            n,
            amps: vec![Complex64::new(a, 0.0); n << n],
        })
    }

    /// The basis state `|coin, vertex⟩`.
    pub fn basis(n: usize, coin: usize, vertex: usize) -> Result<Self> {
        check_state_dimension(n)?;
        if coin >= n {
            return Err(WalkError::CoinIndexOutOfRange { index: coin, n });
        }
        if vertex >= 1 << n {
            return Err(WalkError::OutOfRange {
                name: "vertex",
                value: vertex as f64,
                expected: "vertex < 2^n",
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n << n];
        amps[vertex * n + coin] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Builds a state from vertex-major amplitudes; the norm must be 1 to 1e-10.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_state_dimension(n)?;
        if amps.len() != n << n {
            return Err(WalkError::LengthMismatch {
                left: amps.len(),
                right: n << n,
            });
        }
        let state = Self { n, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(WalkError::NotNormalized { sum: norm });
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        1 << self.n
    }

    /// `ψ_{coin,vertex}`.
    pub fn amplitude(&self, coin: usize, vertex: usize) -> Complex64 {
        self.amps[vertex * self.n + coin]
    }

    /// Vertex-major amplitudes.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `P(x) = Σ_j |ψ_{j,x}|²`.
    pub fn position_distribution(&self) -> Distribution {
        let probs = self
            .amps
            .chunks_exact(self.n)
            .map(|reg| reg.iter().map(|a| a.norm_sqr()).sum())
            .collect();
        Distribution::from_raw(self.n, probs)
    }

    /// Writes `P(x)` into `out` without allocating.
    pub(crate) fn position_probs_into(&self, out: &mut [f64]) {
        for (p, reg) in out.iter_mut().zip(self.amps.chunks_exact(self.n)) {
            *p = reg.iter().map(|a| a.norm_sqr()).sum();
        }
    }
}

pub fn initial_state_symmetric(n: usize) -> Result<WalkerState> {
    WalkerState::symmetric(n)
}

pub fn initial_state_uniform_full(n: usize) -> Result<WalkerState> {
    WalkerState::uniform_full(n)
}

pub fn position_distribution(state: &WalkerState) -> Distribution {
    state.position_distribution()
}

/// One step of the walk: coin on every vertex, then the (possibly broken) shift.
///
/// Component-wise `ψ'_{i,x} = Σ_j C_ij ψ_{j, x ⊕ e'_i(x)}` where `e'_i(x)` is
/// `e_i` across an intact link and `0` across a broken one.
pub fn step(state: &WalkerState, coin: &CoinMatrix, mask: &EdgeMask) -> Result<WalkerState> {
    let mut out = state.clone();
    let mut scratch = Vec::new();
    step_into(state, coin, Some(mask), &mut out, &mut scratch)?;
    Ok(out)
}

/// Coherent step (no broken links).
pub fn step_coherent(state: &WalkerState, coin: &CoinMatrix) -> Result<WalkerState> {
    let mut out = state.clone();
    let mut scratch = Vec::new();
    step_into(state, coin, None, &mut out, &mut scratch)?;
    Ok(out)
}

fn check_compatible(state: &WalkerState, coin: &CoinMatrix, mask: Option<&EdgeMask>) -> Result<()> {
    if coin.n() != state.n {
        return Err(WalkError::DimensionMismatch {
            what: "coin",
            expected: state.n,
            found: coin.n(),
        });
    }
    if let Some(mask) = mask {
        if mask.n() != state.n {
            return Err(WalkError::DimensionMismatch {
                what: "edge mask",
                expected: state.n,
                found: mask.n(),
            });
        }
    }
    Ok(())
}

/// Allocation-free step. `scratch` is resized as needed and may be reused
/// across calls.
pub(crate) fn step_into(
    state: &WalkerState,
    coin: &CoinMatrix,
    mask: Option<&EdgeMask>,
    out: &mut WalkerState,
    scratch: &mut Vec<Complex64>,
) -> Result<()> {
    check_compatible(state, coin, mask)?;
    let n = state.n;
    out.n = n;
    out.amps.resize(state.amps.len(), Complex64::new(0.0, 0.0));

    // Directions whose link is broken at each vertex; 0 everywhere for a coherent step.
    let blocked: Option<Vec<u32>> = mask.filter(|m| !m.is_empty()).map(EdgeMask::blocked_directions);

    // Coin pass. For the Grover coin only the per-vertex register sum is needed.
    if coin.is_grover() {
        let scale = 2.0 / n as f64;
        scratch.clear();
        scratch.extend(
            state
                .amps
                .chunks_exact(n)
                .map(|reg| reg.iter().sum::<Complex64>() * scale),
        );
        let sums = &*scratch;
        for (x, reg) in out.amps.chunks_exact_mut(n).enumerate() {
            let open = blocked.as_ref().map_or(u32::MAX, |b| !b[x]);
            for (i, a) in reg.iter_mut().enumerate() {
                let src = x ^ ((1usize << i) & open as usize);
                *a = sums[src] - state.amps[src * n + i];
            }
        }
    } else {
        scratch.clear();
        scratch.extend_from_slice(&state.amps);
        scratch.chunks_exact_mut(n).for_each(|reg| coin.apply(reg));
        let mixed = &*scratch;
        for (x, reg) in out.amps.chunks_exact_mut(n).enumerate() {
            let open = blocked.as_ref().map_or(u32::MAX, |b| !b[x]);
            for (i, a) in reg.iter_mut().enumerate() {
                let src = x ^ ((1usize << i) & open as usize);
                *a = mixed[src * n + i];
            }
        }
    }
    Ok(())
}

/// A walker evolving in place, with reusable buffers.
#[derive(Debug, Clone)]
pub struct Walk {
    coin: CoinMatrix,
    state: WalkerState,
    next: WalkerState,
    scratch: Vec<Complex64>,
    time: usize,
}

impl Walk {
    pub fn new(state: WalkerState, coin: CoinMatrix) -> Result<Self> {
        check_compatible(&state, &coin, None)?;
        Ok(Self {
            next: state.clone(),
            coin,
            state,
            scratch: Vec::new(),
            time: 0,
        })
    }

    /// Grover walk from the symmetric start.
    pub fn grover_symmetric(n: usize) -> Result<Self> {
        Self::new(WalkerState::symmetric(n)?, CoinMatrix::grover(n)?)
    }

    pub fn state(&self) -> &WalkerState {
        &self.state
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn n(&self) -> usize {
        self.state.n
    }

    /// Advances one step; `None` means every link is intact.
    pub fn advance(&mut self, mask: Option<&EdgeMask>) -> Result<()> {
        step_into(&self.state, &self.coin, mask, &mut self.next, &mut self.scratch)?;
        std::mem::swap(&mut self.state, &mut self.next);
        self.time += 1;
        Ok(())
    }

    pub fn position_probs_into(&self, out: &mut [f64]) {
        self.state.position_probs_into(out);
    }

    pub fn into_state(self) -> WalkerState {
        self.state
    }
}
