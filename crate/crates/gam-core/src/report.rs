//! Result-row schema for CSV export.
//!
//! One row per (scheme, size, SNR, method) cell. MI-only rows leave the SER
//! columns empty and vice versa; `seed` and `k_mc` are 0 for deterministic
//! (quadrature/analytic) methods.

use serde::{Deserialize, Serialize};

/// Column order of the canonical results CSV.
pub const CSV_COLUMNS: [&str; 12] = [
    "snr_db",
    "scheme",
    "n_points",
    "mi_bits",
    "mi_stderr",
    "method",
    "entropy_bits",
    "papr_db",
    "ser",
    "ser_stderr",
    "seed",
    "k_mc",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub snr_db: f64,
    pub scheme: String,
    pub n_points: u64,
    pub mi_bits: Option<f64>,
    pub mi_stderr: Option<f64>,
    pub method: String,
    pub entropy_bits: f64,
    pub papr_db: f64,
    pub ser: Option<f64>,
    pub ser_stderr: Option<f64>,
    pub seed: u64,
    pub k_mc: u64,
}

impl ResultRow {
    /// Key identifying a sweep cell; used to skip rows already present when
    /// resuming an interrupted sweep.
    pub fn resume_key(&self) -> String {
        format!(
            "{}|{}|{:.6}|{}|{}",
            self.scheme, self.n_points, self.snr_db, self.method, self.seed
        )
    }
}
