//! AWGN channel model and performance metrics.
//!
//! The channel is complex AWGN with total noise variance σ² (each quadrature
//! carries σ²/2). Mutual information comes either from grid quadrature of the
//! Gaussian-mixture output entropy or from a Monte-Carlo estimator; symbol
//! error rates come from closed-form approximations or simulation with a MAP
//! detector.

mod mixture;
pub(crate) mod quadrature;

pub mod mi;
pub mod ser;

pub use mi::{mi_monte_carlo, mi_quadrature};
pub use mixture::MixtureEval;
pub use quadrature::QuadratureGrid;
pub use ser::{q_function, ser_disc_analytic, ser_gb_analytic, ser_monte_carlo};

use num_complex::Complex64;
use rand::Rng;

use crate::constellation::Constellation;
use crate::error::Error;
use crate::Result;

/// AWGN channel bookkeeping: noise variance σ² and the SNR `S = P̄/σ²` tied
/// to a specific constellation's average power.
#[derive(Debug, Clone, Copy)]
pub struct AwgnChannel {
    noise_var: f64,
    snr: f64,
}

impl AwgnChannel {
    /// Channel at a given linear SNR for this constellation: `σ² = P̄/S`.
    pub fn from_snr(c: &Constellation, snr: f64) -> Result<Self> {
        if !(snr > 0.0) || !snr.is_finite() {
            return Err(Error::invalid(format!("snr must be positive, got {snr}")));
        }
        let power = c.average_power();
        if power <= 0.0 {
            return Err(Error::ZeroPower);
        }
        Ok(AwgnChannel {
            noise_var: power / snr,
            snr,
        })
    }

    /// Channel at a given SNR in dB (`S = 10^{dB/10}`).
    pub fn from_snr_db(c: &Constellation, snr_db: f64) -> Result<Self> {
        Self::from_snr(c, 10f64.powf(snr_db / 10.0))
    }

    /// Channel with an explicit noise variance; the SNR is derived from the
    /// constellation's average power.
    pub fn from_noise_var(c: &Constellation, noise_var: f64) -> Result<Self> {
        if !(noise_var > 0.0) || !noise_var.is_finite() {
            return Err(Error::invalid(format!(
                "noise variance must be positive, got {noise_var}"
            )));
        }
        let power = c.average_power();
        if power <= 0.0 {
            return Err(Error::ZeroPower);
        }
        Ok(AwgnChannel {
            noise_var,
            snr: power / noise_var,
        })
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr.log10()
    }

    /// Draw one complex noise sample: each quadrature is N(0, σ²/2).
    pub fn sample_noise<R: Rng>(&self, rng: &mut R) -> Complex64 {
        let (z1, z2) = standard_normal_pair(rng);
        Complex64::new(z1, z2) * (self.noise_var / 2.0).sqrt()
    }
}

/// Two independent standard normals by Box–Muller. Uses exactly two uniform
/// draws, which keeps per-sample RNG consumption fixed for the deterministic
/// block scheme.
pub(crate) fn standard_normal_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    // 1−u1 ∈ (0, 1], so the log never sees zero.
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    (r * t.cos(), r * t.sin())
}

/// How a mutual-information estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiMethod {
    Quadrature,
    MonteCarlo,
}

impl std::fmt::Display for MiMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MiMethod::Quadrature => write!(f, "quadrature"),
            MiMethod::MonteCarlo => write!(f, "monte_carlo"),
        }
    }
}

/// Mutual information estimate in bits with its provenance.
#[derive(Debug, Clone, Copy)]
pub struct MiEstimate {
    /// Estimated mutual information in bits (clamped at 0).
    pub bits: f64,
    pub method: MiMethod,
    /// Standard error of the estimate; 0 for quadrature.
    pub std_err_bits: f64,
    /// Number of Monte-Carlo samples; 0 for quadrature.
    pub samples: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{gen_disc, DiscSpec};
    use crate::PowerBudget;
    use rand::SeedableRng;

    #[test]
    fn channel_ties_snr_to_power() {
        let c = gen_disc(DiscSpec::new(1, 16, PowerBudget::new(2.0).unwrap()).unwrap()).unwrap();
        let ch = AwgnChannel::from_snr(&c, 10.0).unwrap();
        assert!((ch.noise_var() - 0.2).abs() < 1e-12);
        assert!((c.average_power() / ch.noise_var() - ch.snr()).abs() < 1e-9);
        let ch2 = AwgnChannel::from_noise_var(&c, 0.2).unwrap();
        assert!((ch2.snr() - 10.0).abs() < 1e-9);
        let ch3 = AwgnChannel::from_snr_db(&c, 10.0).unwrap();
        assert!((ch3.snr() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn noise_sampler_statistics() {
        let c = gen_disc(DiscSpec::new(1, 4, PowerBudget::new(1.0).unwrap()).unwrap()).unwrap();
        let sigma2 = 0.37;
        let ch = AwgnChannel::from_noise_var(&c, sigma2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = 1_000_000;
        let (mut pw, mut cross, mut re_sq, mut im_sq) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let w = ch.sample_noise(&mut rng);
            pw += w.norm_sqr();
            cross += w.re * w.im;
            re_sq += w.re * w.re;
            im_sq += w.im * w.im;
        }
        let var = pw / n as f64;
        assert!(
            (var - sigma2).abs() < 0.01 * sigma2,
            "empirical variance {var} vs {sigma2}"
        );
        let rho = (cross / n as f64) / ((re_sq / n as f64).sqrt() * (im_sq / n as f64).sqrt());
        assert!(rho.abs() < 0.01, "quadrature correlation {rho}");
    }
}
