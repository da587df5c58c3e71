//! Symbol error rates: closed-form approximations and MAP-detected
//! simulation.
//!
//! The closed forms model each decision region as a square whose area is the
//! annular area increment between consecutive radii; they are low-SNR
//! approximations and are compared against simulation in the tests.

use num_complex::Complex64;

use super::mi::{block_rng, PmfSampler, MC_BLOCK};
use super::mixture::MixtureEval;
use super::{standard_normal_pair, AwgnChannel};
use crate::constellation::Constellation;
use crate::error::Error;
use crate::parallel;
use crate::Result;

/// Gaussian tail probability `Q(x) = erfc(x/√2)/2`, computed through `erfc`
/// for stability at large arguments.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Closed-form SER of the regular disc constellation with `N` points:
/// `1 − (1 − 2Q(√(πS/(N+1))))²`.
pub fn ser_disc_analytic(n_points: u64, snr: f64) -> f64 {
    let arg = (std::f64::consts::PI * snr / (n_points as f64 + 1.0)).sqrt();
    let q = q_function(arg);
    (1.0 - (1.0 - 2.0 * q) * (1.0 - 2.0 * q)).clamp(0.0, 1.0)
}

/// Closed-form SER of the high-rate geometric bell with `N` points:
/// the per-point square-cell model `(1/N)·Σ_n [4Q(f_n) − 4Q(f_n)²]` with
/// `f_n = √(S·N·π·ln((N−n)/(N−n−1)) / (2(N·lnN − ln N!)))`. The outermost
/// point has an unbounded cell and contributes zero.
pub fn ser_gb_analytic(n_points: u64, snr: f64) -> f64 {
    let n = n_points as f64;
    let denom = 2.0 * (n * n.ln() - libm::lgamma(n + 1.0));
    let mut sum = 0.0;
    for k in 0..n_points {
        let remaining = n - k as f64;
        let ratio = (remaining / (remaining - 1.0)).ln();
        if !ratio.is_finite() {
            continue;
        }
        let f = (snr * n * std::f64::consts::PI * ratio / denom).sqrt();
        let q = q_function(f);
        sum += 4.0 * q - 4.0 * q * q;
    }
    (sum / n).clamp(0.0, 1.0)
}

/// Simulated SER with MAP detection (`argmax_n p_n·p(y|x_n)`, which reduces
/// to minimum distance for uniform pmfs). Returns the error fraction and its
/// standard error. Deterministic for a given `(seed, k_mc)` at any worker
/// count.
pub fn ser_monte_carlo(
    c: &Constellation,
    channel: &AwgnChannel,
    k_mc: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if k_mc < 1 {
        return Err(Error::invalid("k_mc must be >= 1"));
    }
    c.validate()?;
    let sigma2 = channel.noise_var();
    let eval = MixtureEval::new(c, sigma2);
    let sampler = PmfSampler::new(c);
    let noise_scale = (sigma2 / 2.0).sqrt();
    let n_blocks = k_mc.div_ceil(MC_BLOCK);

    let partials = parallel::map_blocks(n_blocks as usize, |b| {
        let b = b as u64;
        let count = MC_BLOCK.min(k_mc - b * MC_BLOCK);
        let mut rng = block_rng(seed, b);
        let mut scratch = eval.scratch();
        let mut errors = 0u64;
        for _ in 0..count {
            let tx = sampler.draw(&mut rng);
            let (z1, z2) = standard_normal_pair(&mut rng);
            let y = c.points()[tx].amplitude + Complex64::new(z1, z2) * noise_scale;
            if eval.map_detect(&mut scratch, y) != tx {
                errors += 1;
            }
        }
        errors
    });

    let errors: u64 = partials.iter().sum();
    let p = errors as f64 / k_mc as f64;
    let std_err = (p * (1.0 - p) / k_mc as f64).sqrt();
    Ok((p, std_err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::Constellation;
    use crate::schemes::{gen_disc, DiscSpec};
    use crate::PowerBudget;

    #[test]
    fn q_function_anchors() {
        assert_eq!(q_function(0.0), 0.5);
        assert!(q_function(f64::INFINITY) < 1e-300);
        assert!((q_function(f64::NEG_INFINITY) - 1.0).abs() < 1e-15);
        // Normal-table anchor: Q(1.2816) ≈ 0.1000.
        assert!((q_function(1.2816) - 0.1).abs() < 1e-4);
        assert!(q_function(1.0) > q_function(1.1));
    }

    #[test]
    fn disc_analytic_values_and_monotonicity() {
        // Direct evaluation at N=256, S=100.
        let v = ser_disc_analytic(256, 100.0);
        assert!((v - 0.46548).abs() < 1e-4, "{v}");
        assert!(ser_disc_analytic(256, 1e9) < 1e-12);
        let mut prev = 1.0;
        for k in 0..20 {
            let s = 10f64.powf(k as f64 / 4.0);
            let v = ser_disc_analytic(256, s);
            assert!(v <= prev + 1e-15, "not monotone at S={s}");
            prev = v;
        }
    }

    #[test]
    fn gb_analytic_bounds() {
        assert!(ser_gb_analytic(256, 1e9) < 1e-9);
        for &s in &[0.1, 1.0, 10.0, 100.0] {
            let v = ser_gb_analytic(256, s);
            assert!((0.0..=1.0).contains(&v));
        }
        // Each summand must itself be a probability.
        let n = 64u64;
        for k in 0..n - 1 {
            let rem = (n - k) as f64;
            let ratio = (rem / (rem - 1.0)).ln();
            let f = (10.0 * n as f64 * std::f64::consts::PI * ratio
                / (2.0 * (n as f64 * (n as f64).ln() - libm::lgamma(n as f64 + 1.0))))
                .sqrt();
            let q = q_function(f);
            let term = 4.0 * q - 4.0 * q * q;
            assert!((0.0..=1.0).contains(&term));
        }
    }

    #[test]
    fn zero_noise_gives_zero_errors() {
        let c = gen_disc(DiscSpec::new(1, 16, PowerBudget::new(1.0).unwrap()).unwrap()).unwrap();
        let ch = AwgnChannel::from_noise_var(&c, 1e-12).unwrap();
        let (ser, _) = ser_monte_carlo(&c, &ch, 10_000, 5).unwrap();
        assert_eq!(ser, 0.0);
    }

    #[test]
    fn bpsk_matches_classic_q_formula() {
        // Two antipodal equiprobable points: SER = Q(√(2S)).
        let pts = [
            num_complex::Complex64::new(-1.0, 0.0),
            num_complex::Complex64::new(1.0, 0.0),
        ];
        let c = Constellation::from_points(&pts, &[0.5, 0.5], 0, "custom").unwrap();
        let snr = 4.0;
        let ch = AwgnChannel::from_snr(&c, snr).unwrap();
        let k = 400_000;
        let (ser, std_err) = ser_monte_carlo(&c, &ch, k, 9).unwrap();
        let expect = q_function((2.0 * snr).sqrt());
        assert!(
            (ser - expect).abs() < 3.0 * std_err.max(1e-5),
            "ser {ser} expect {expect} stderr {std_err}"
        );
    }

    #[test]
    fn ser_monte_carlo_is_deterministic() {
        let c = gen_disc(DiscSpec::new(1, 64, PowerBudget::new(1.0).unwrap()).unwrap()).unwrap();
        let ch = AwgnChannel::from_snr_db(&c, 18.0).unwrap();
        let (a, _) = ser_monte_carlo(&c, &ch, 30_000, 12).unwrap();
        let (b, _) = ser_monte_carlo(&c, &ch, 30_000, 12).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
