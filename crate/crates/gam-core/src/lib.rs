//! Golden-angle constellation shaping toolkit.
//!
//! Constellations place point `n` at radius `r_n` and phase `2π·φ·n`, where
//! `φ = (3−√5)/2` is the fractional golden ratio. Tuning the radial law gives
//! geometric shaping, tuning the per-point probabilities gives probabilistic
//! shaping, and both can be optimized against a mutual-information objective
//! for an AWGN channel under an SNR equality (and optional PAPR) constraint.
//!
//! The crate is organized as:
//!
//! * [`constellation`] — the point/probability data model, golden-angle phase
//!   law, power/PAPR/entropy accounting, and the JSON persistence format.
//! * [`schemes`] — closed-form generators: disc (uniform annulus), high-rate
//!   geometric bell, entropy-constrained probabilistic bell, the geometric-pmf
//!   disc family, and QAM/PSK baselines.
//! * [`metrics`] — AWGN channel model, mutual information by grid quadrature
//!   and by Monte-Carlo sampling, analytic and simulated symbol error rates.
//! * [`optimize`] — the five MI-maximization formulations (G1, G2, P1, P2,
//!   GP1) with exact SNR-equality feasibility and optional PAPR caps.
//! * [`report`] — the CSV row schema shared by the CLI commands.
//!
//! Monte-Carlo estimators and quadrature grids evaluate in fixed-size blocks
//! that are reduced in index order, so results are byte-identical for a given
//! seed no matter how many worker threads run them (see [`parallel`]).

pub mod constellation;
pub mod error;
pub mod metrics;
pub mod optimize;
pub mod parallel;
pub mod report;
pub mod schemes;

pub use constellation::{
    build_constellation, golden_angle_phase, Constellation, ConstellationPoint, PowerBudget,
};
pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
