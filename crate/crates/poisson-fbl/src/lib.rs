//! Finite-blocklength coding limits of the continuous-time Poisson channel.
//!
//! The channel accepts waveforms `λ: [0,T] → [0,A]` under an average-power
//! constraint `(1/T)∫λ ≤ σA` and outputs a Poisson counting process of
//! intensity `λ(t) + λ0`. This crate computes how many messages a code of
//! horizon `T` and error tolerance `ε` can carry over that channel:
//!
//! * [`asymptotics`] — closed-form capacity `C*`, dispersion `V*`, third
//!   moment `Ξ*`, and the normal approximation `T·C* + √(T·V*)·Φ⁻¹(ε)`.
//! * [`achievability`] — the random-coding union bound with a cost
//!   constraint, evaluated exactly, via sufficient statistics, or by Monte
//!   Carlo, plus the concentration constants that turn it into a
//!   closed-form achievable `log M`.
//! * [`converse`] — a symbol-wise meta-converse against a mixture output
//!   distribution, evaluated exactly per input type or through Chebyshev /
//!   Berry–Esseen relaxations.
//! * [`channel_model`] — the continuous channel, its sampler, and the
//!   binary-slot discretization the bounds are computed on.
//! * [`simulator`] — random codebooks, ML decoding, and Monte Carlo error
//!   estimation over both the discrete and the continuous channel.
//! * [`info_measures`] — binary divergences, the information-spectrum
//!   divergence, and the Gaussian/binomial kernels everything else uses.
//! * [`harness`] — experiment configuration, sweeps, and CSV/JSON reports.
//!
//! Every bound here is a true bound at finite `T`: enumeration tails are
//! truncated pessimistically, and any "sufficiently large T" precondition
//! is checked and reported rather than assumed.
//!
//! # Example
//!
//! ```
//! use poisson_fbl::channel_model::PoissonChannelParams;
//! use poisson_fbl::asymptotics;
//!
//! // Noiseless photon channel (no dark current), unit peak power.
//! let params = PoissonChannelParams::new(0.0, 1.0, 1.0, 100.0).unwrap();
//! let first = asymptotics::first_order(&params);
//! assert!((first.c_star - 1.0 / std::f64::consts::E).abs() < 1e-12);
//! ```

pub mod achievability;
pub mod asymptotics;
pub mod channel_model;
pub mod converse;
pub mod harness;
pub mod info_measures;
pub mod simulator;

/// Errors shared by every module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Discretization produced a channel with crossovers out of order.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),
    /// A codeword exceeds the weight cap ⌊nσ⌋.
    #[error("weight violation: {0}")]
    WeightViolation(String),
    /// An exact enumeration was requested beyond its size budget.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A "sufficiently large T" style precondition failed; the message
    /// names the failing condition.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    /// Two sequences that must have equal length do not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
