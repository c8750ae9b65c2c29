//! The continuous-time Poisson channel and its binary-slot discretization.
//!
//! The physical channel takes a waveform `λ: [0,T] → [0,A]` and emits a
//! Poisson counting process of intensity `λ(t) + λ0`. Slicing `[0,T]`
//! into `n` slots of width `Δ = T/n`, keeping per-slot increments, and
//! clipping increments ≥ 2 to 0 degrades it onto a binary asymmetric
//! channel with crossovers
//!
//! ```text
//! a = sAΔ·e^{−sAΔ}          (input 0: only dark-current counts)
//! b = (1+s)AΔ·e^{−(1+s)AΔ}  (input 1: signal plus dark current)
//! ```
//!
//! where `s = λ0/A`. For `s = 0` the discrete channel is a Z-channel
//! (`a = 0`). The chain waveform-encode → Poisson → slot increments →
//! clip reproduces exactly that channel on each slot, which is what the
//! simulator's chain-identity test checks.

use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// --- domain types --------------------------------------------------------

/// Physical channel constants: dark current `λ0`, peak power `A`, duty
/// `σ` (average-power fraction), and horizon `T` in seconds.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PoissonChannelParams {
    pub lambda0: f64,
    pub peak_a: f64,
    pub sigma: f64,
    pub horizon: f64,
}

impl PoissonChannelParams {
    pub fn new(lambda0: f64, peak_a: f64, sigma: f64, horizon: f64) -> Result<Self> {
        if !(lambda0 >= 0.0 && lambda0.is_finite()) {
            return Err(Error::Domain(format!("dark current {lambda0} must be ≥ 0")));
        }
        if !(peak_a > 0.0 && peak_a.is_finite()) {
            return Err(Error::Domain(format!("peak power {peak_a} must be > 0")));
        }
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::Domain(format!("duty {sigma} must be in (0,1]")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon {horizon} must be > 0")));
        }
        Ok(Self { lambda0, peak_a, sigma, horizon })
    }

    /// Dark-current to peak-power ratio `s = λ0/A`.
    pub fn s(&self) -> f64 {
        self.lambda0 / self.peak_a
    }

    /// Same channel with a different horizon.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.lambda0, self.peak_a, self.sigma, horizon)
    }
}

/// Binary asymmetric channel from slotting the Poisson channel:
/// `W(1|0) = a`, `W(1|1) = b`, with `0 ≤ a < b < 1`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DiscretizedChannel {
    pub n: usize,
    pub slot_width: f64,
    pub a: f64,
    pub b: f64,
}

impl DiscretizedChannel {
    /// Build from explicit crossovers (tests and generic binary-channel
    /// uses); `discretize` is the physical constructor.
    pub fn from_crossovers(n: usize, slot_width: f64, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("need at least one slot".into()));
        }
        if !(a >= 0.0 && a < 1.0 && b > 0.0 && b < 1.0 && a < b) {
            return Err(Error::DegenerateChannel(format!(
                "crossovers must satisfy 0 ≤ a < b < 1, got a={a}, b={b}"
            )));
        }
        Ok(Self { n, slot_width, a, b })
    }

    /// `[log(1−a), log a, log(1−b), log b]`, the per-slot-type scores
    /// used by every likelihood computation. `log 0 = −∞` when `a = 0`.
    pub fn log_probs(&self) -> [f64; 4] {
        [
            (1.0 - self.a).ln(),
            self.a.ln(),
            (1.0 - self.b).ln(),
            self.b.ln(),
        ]
    }

    /// Output 1-probability `r = (1−p)a + pb` under a Bernoulli(p) input.
    pub fn output_one_prob(&self, p: f64) -> f64 {
        (1.0 - p) * self.a + p * self.b
    }
}

/// Slot-aligned piecewise-constant input waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    /// `(start, end, level)` pieces, contiguous over `[0, T]`.
    pieces: Vec<(f64, f64, f64)>,
}

impl Waveform {
    /// Pieces must tile `[0, params.horizon]` in order, with levels in
    /// `[0, A]` and average power at most `σA`.
    pub fn new(pieces: Vec<(f64, f64, f64)>, params: &PoissonChannelParams) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Domain("waveform needs at least one piece".into()));
        }
        let t = params.horizon;
        let tol = 1e-9 * t.max(1.0);
        if pieces[0].0.abs() > tol {
            return Err(Error::Domain("waveform must start at 0".into()));
        }
        let mut energy = 0.0;
        for (i, &(start, end, level)) in pieces.iter().enumerate() {
            if !(end > start) {
                return Err(Error::Domain(format!("piece {i} has end ≤ start")));
            }
            if i > 0 && (start - pieces[i - 1].1).abs() > tol {
                return Err(Error::Domain(format!("gap before piece {i}")));
            }
            if !(level >= 0.0 && level <= params.peak_a * (1.0 + 1e-12)) {
                return Err(Error::Domain(format!(
                    "piece {i} level {level} outside [0, {}]",
                    params.peak_a
                )));
            }
            energy += level * (end - start);
        }
        if (pieces.last().unwrap().1 - t).abs() > tol {
            return Err(Error::Domain("waveform must end at the horizon".into()));
        }
        if energy > params.sigma * params.peak_a * t * (1.0 + 1e-9) {
            return Err(Error::Domain(format!(
                "average power {} exceeds σA = {}",
                energy / t,
                params.sigma * params.peak_a
            )));
        }
        Ok(Self { pieces })
    }

    pub fn pieces(&self) -> &[(f64, f64, f64)] {
        &self.pieces
    }

    pub fn duration(&self) -> f64 {
        self.pieces.last().map(|p| p.1).unwrap_or(0.0)
    }
}

/// One realization of the output counting process: the ascending jump
/// times in `(0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingPath {
    jump_times: Vec<f64>,
}

impl CountingPath {
    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn num_jumps(&self) -> usize {
        self.jump_times.len()
    }
}

/// A length-n binary word; codewords additionally satisfy the weight cap
/// `N(1|x) ≤ ⌊nσ⌋`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryWord {
    bits: Vec<u8>,
}

impl BinaryWord {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Domain("word bits must be 0 or 1".into()));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn weight(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }
}

/// The weight cap `⌊nσ⌋` shared by codebooks, bounds, and simulation.
pub fn weight_cap(n: usize, sigma: f64) -> u64 {
    (n as f64 * sigma).floor() as u64
}

// --- operations ----------------------------------------------------------

/// Slot the channel into `n` slices of width `Δ = T/n`.
pub fn discretize(params: &PoissonChannelParams, n: usize) -> Result<DiscretizedChannel> {
    if n == 0 {
        return Err(Error::Domain("need at least one slot".into()));
    }
    let s = params.s();
    let a_peak = params.peak_a;
    let delta = params.horizon / n as f64;
    let a = s * a_peak * delta * (-s * a_peak * delta).exp();
    let b = (1.0 + s) * a_peak * delta * (-(1.0 + s) * a_peak * delta).exp();
    if !(b > a) {
        return Err(Error::DegenerateChannel(format!(
            "slot width {delta} too coarse: a={a} ≥ b={b} (need Δ < log((1+s)/s)/A)"
        )));
    }
    DiscretizedChannel::from_crossovers(n, delta, a, b)
}

/// Sample the counting process of intensity `λ(t) + λ0` on the
/// waveform's support. Per constant piece the count is drawn by inverse
/// transform on the Poisson law (splitting long pieces so each chunk has
/// small mean) and jump times are placed uniformly, which is exact for a
/// homogeneous piece.
pub fn sample_poisson_path(waveform: &Waveform, lambda0: f64, seed: u64) -> CountingPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_poisson_path_with(waveform, lambda0, &mut rng)
}

/// As [`sample_poisson_path`] but drawing from a caller-owned generator,
/// so simulations can derive independent per-trial streams.
pub fn sample_poisson_path_with(
    waveform: &Waveform,
    lambda0: f64,
    rng: &mut ChaCha8Rng,
) -> CountingPath {
    let mut jumps: Vec<f64> = Vec::new();
    for &(start, end, level) in waveform.pieces() {
        let intensity = level + lambda0;
        if intensity <= 0.0 {
            continue;
        }
        let mean_total = intensity * (end - start);
        // Keep each chunk's mean small so the pmf walk stays short and
        // well-conditioned; Poisson additivity makes the split exact.
        let chunks = (mean_total / 8.0).ceil().max(1.0) as usize;
        let chunk_len = (end - start) / chunks as f64;
        for c in 0..chunks {
            let lo = start + c as f64 * chunk_len;
            let hi = if c + 1 == chunks { end } else { lo + chunk_len };
            let count = poisson_inverse_transform(intensity * (hi - lo), rng);
            let base = jumps.len();
            for _ in 0..count {
                // u ∈ [0,1) mapped so the draw lies in (lo, hi].
                let u: f64 = rng.random();
                jumps.push(hi - (hi - lo) * u);
            }
            jumps[base..].sort_unstable_by(f64::total_cmp);
        }
    }
    // Ties have probability zero but the ascending-strictly invariant is
    // kept hard: nudge any exact duplicate up by one ulp.
    for i in 1..jumps.len() {
        if jumps[i] <= jumps[i - 1] {
            jumps[i] = jumps[i - 1].next_up();
        }
    }
    CountingPath { jump_times: jumps }
}

fn poisson_inverse_transform(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut pmf = (-mean).exp();
    let mut cdf = pmf;
    // u < 1, and the walk covers all but ~1e-16 of the mass well before
    // the iteration cap for the small means produced by chunking.
    while u >= cdf && k < 400 {
        k += 1;
        pmf *= mean / k as f64;
        cdf += pmf;
    }
    k
}

/// Channel U of the degradation chain: slot-aligned on/off keying, level
/// `x_i·A` on slot `i`.
pub fn encode_waveform(word: &BinaryWord, params: &PoissonChannelParams) -> Result<Waveform> {
    let n = word.len();
    if n == 0 {
        return Err(Error::Domain("cannot encode an empty word".into()));
    }
    let cap = weight_cap(n, params.sigma);
    if word.weight() > cap {
        return Err(Error::WeightViolation(format!(
            "weight {} exceeds ⌊nσ⌋ = {cap}",
            word.weight()
        )));
    }
    let t = params.horizon;
    let pieces = (0..n)
        .map(|i| {
            let start = i as f64 * t / n as f64;
            let end = (i + 1) as f64 * t / n as f64;
            (start, end, f64::from(word.bits()[i]) * params.peak_a)
        })
        .collect();
    Waveform::new(pieces, params)
}

/// Channels V1 and V2 of the degradation chain: per-slot increments
/// `ŷ_i = ν(iΔ) − ν((i−1)Δ)`, then `ŷ_i ≥ 2` clipped to `y_i = 0`.
pub fn degrade_path(path: &CountingPath, n: usize, t: f64) -> BinaryWord {
    let mut counts = vec![0u32; n];
    for &tau in path.jump_times() {
        // Slot i covers ((i−1)Δ, iΔ]; τ ∈ (0, T] maps to ⌈τn/T⌉.
        let slot = (tau * n as f64 / t).ceil() as usize;
        let slot = slot.clamp(1, n);
        counts[slot - 1] += 1;
    }
    let bits = counts.iter().map(|&c| u8::from(c == 1)).collect();
    BinaryWord { bits }
}

/// Log-likelihood `Σ_i log W(y_i|x_i)` of the n-fold product channel,
/// computed from the joint slot-type counts only.
pub fn product_channel_logprob(
    channel: &DiscretizedChannel,
    x: &BinaryWord,
    y: &BinaryWord,
) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    let mut counts = [0u64; 4];
    for (&xi, &yi) in x.bits().iter().zip(y.bits()) {
        counts[(2 * xi + yi) as usize] += 1;
    }
    Ok(word_log_likelihood(&channel.log_probs(), counts))
}

/// `Σ counts[t]·logs[t]` over the four slot types `(x,y)` in the fixed
/// order 00, 01, 10, 11, skipping zero counts so `0·(−∞)` never forms.
///
/// Every likelihood in the crate funnels through this one expression;
/// that makes tie sets in maximum-likelihood comparisons bitwise
/// identical between the word-level and sufficient-statistic paths.
pub fn word_log_likelihood(logs: &[f64; 4], counts: [u64; 4]) -> f64 {
    let mut total = 0.0;
    for t in 0..4 {
        if counts[t] > 0 {
            total += counts[t] as f64 * logs[t];
        }
    }
    total
}

// --- tests ---------------------------------------------------------------
