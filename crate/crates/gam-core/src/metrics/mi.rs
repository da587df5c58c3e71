//! Mutual information estimators.
//!
//! `I(Y;X) = h(Y) − h(W)` with `h(W) = log₂(πeσ²)` for complex AWGN. The
//! output entropy `h(Y)` is either integrated on a refining midpoint grid
//! (deterministic) or estimated by Monte-Carlo sampling of
//! `log₂(p(y|x)/Σ_n p(y|x_n)p_n)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mixture::MixtureEval;
use super::quadrature::{output_entropy_bits, QuadratureGrid};
use super::{standard_normal_pair, AwgnChannel, MiEstimate, MiMethod};
use crate::constellation::Constellation;
use crate::error::Error;
use crate::parallel;
use crate::Result;

/// Samples per Monte-Carlo block. Fixed so that the (seed, block) → stream
/// mapping, and therefore every estimate, is independent of worker count.
pub(crate) const MC_BLOCK: u64 = 8192;

/// Noise entropy `h(W) = log₂(πeσ²)` in bits.
pub fn noise_entropy_bits(sigma2: f64) -> f64 {
    (std::f64::consts::PI * std::f64::consts::E * sigma2).log2()
}

/// Mutual information by grid quadrature of the output entropy.
///
/// The domain is a square reaching 8σ beyond the outermost point. Starting
/// from a σ/3 spacing, the grid is halved (so every accepted estimate used a
/// spacing of σ/6 or finer) until two successive refinements agree within
/// `tol` bits; the Richardson-extrapolated value is returned. Four
/// refinements without convergence signal that `tol` is too tight.
pub fn mi_quadrature(c: &Constellation, channel: &AwgnChannel, tol: f64) -> Result<MiEstimate> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    c.validate()?;
    let sigma2 = channel.noise_var();
    let eval = MixtureEval::new(c, sigma2);
    let mut grid = QuadratureGrid::for_constellation(c, sigma2, 3.0, 8.0);
    let mut prev = output_entropy_bits(&eval, &grid);
    let mut change = f64::INFINITY;
    for _ in 0..4 {
        grid = grid.refined();
        let cur = output_entropy_bits(&eval, &grid);
        change = (cur - prev).abs();
        if change < tol {
            // Midpoint rule is second order: one Richardson step.
            let h = cur + (cur - prev) / 3.0;
            let bits = (h - noise_entropy_bits(sigma2)).max(0.0);
            return Ok(MiEstimate {
                bits,
                method: MiMethod::Quadrature,
                std_err_bits: 0.0,
                samples: 0,
            });
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged {
        achieved: change,
        tol,
    })
}

/// Mutual information by Monte-Carlo estimation.
///
/// Draws `x` from the pmf and `y = x + w`, then averages
/// `log₂(p(y|x) / Σ_n p(y|x_n) p_n)`. The sample index space is split into
/// fixed blocks, each with its own counter-seeded stream, so the estimate is
/// byte-identical for a given `(seed, k_mc)` at any worker count.
pub fn mi_monte_carlo(
    c: &Constellation,
    channel: &AwgnChannel,
    k_mc: u64,
    seed: u64,
) -> Result<MiEstimate> {
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
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..count {
            let tx = sampler.draw(&mut rng);
            let (z1, z2) = standard_normal_pair(&mut rng);
            let y = c.points()[tx].amplitude + Complex64::new(z1, z2) * noise_scale;
            let v = eval.mi_sample_bits(&mut scratch, y, tx);
            sum += v;
            sum_sq += v * v;
        }
        (sum, sum_sq)
    });

    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0, 0.0), |(s, q), &(bs, bq)| (s + bs, q + bq));
    let k = k_mc as f64;
    let mean = sum / k;
    let std_err = if k_mc > 1 {
        let var = ((sum_sq - sum * sum / k) / (k - 1.0)).max(0.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    Ok(MiEstimate {
        bits: mean,
        method: MiMethod::MonteCarlo,
        std_err_bits: std_err,
        samples: k_mc,
    })
}

pub(crate) fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Inverse-CDF sampler over the constellation pmf.
pub(crate) struct PmfSampler {
    cdf: Vec<f64>,
    last: usize,
}

impl PmfSampler {
    pub fn new(c: &Constellation) -> Self {
        let mut cdf = Vec::with_capacity(c.len());
        let mut acc = 0.0;
        let mut last = 0;
        for (k, p) in c.points().iter().enumerate() {
            acc += p.probability;
            cdf.push(acc);
            if p.probability > 0.0 {
                last = k;
            }
        }
        PmfSampler { cdf, last }
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::build_constellation;
    use crate::schemes::{gen_disc, gen_gb_hr, DiscSpec};
    use crate::PowerBudget;

    #[test]
    fn single_point_has_zero_mi() {
        let c = build_constellation(&[1.0], &[1.0], 0, "custom").unwrap();
        let ch = AwgnChannel::from_snr(&c, 5.0).unwrap();
        let est = mi_quadrature(&c, &ch, 1e-4).unwrap();
        assert!(est.bits.abs() < 1e-4, "MI {}", est.bits);
        assert_eq!(est.method, MiMethod::Quadrature);
        assert_eq!(est.std_err_bits, 0.0);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let c = gen_disc(DiscSpec::new(1, 16, PowerBudget::new(1.0).unwrap()).unwrap()).unwrap();
        let ch = AwgnChannel::from_snr(&c, 10.0).unwrap();
        let a = mi_monte_carlo(&c, &ch, 20_000, 7).unwrap();
        let b = mi_monte_carlo(&c, &ch, 20_000, 7).unwrap();
        assert_eq!(a.bits.to_bits(), b.bits.to_bits());
        assert_eq!(a.std_err_bits.to_bits(), b.std_err_bits.to_bits());
        let d = mi_monte_carlo(&c, &ch, 20_000, 8).unwrap();
        assert_ne!(a.bits.to_bits(), d.bits.to_bits());
    }

    #[test]
    fn monte_carlo_near_zero_at_tiny_snr() {
        let c = gen_gb_hr(8, PowerBudget::new(1.0).unwrap()).unwrap();
        let ch = AwgnChannel::from_snr(&c, 1e-4).unwrap();
        let est = mi_monte_carlo(&c, &ch, 100_000, 3).unwrap();
        assert!(est.bits.abs() < 0.01, "MI {}", est.bits);
    }

    #[test]
    fn high_snr_saturates_at_entropy() {
        let c = gen_gb_hr(16, PowerBudget::new(1.0).unwrap()).unwrap();
        let ch = AwgnChannel::from_snr(&c, 1e4).unwrap();
        let est = mi_monte_carlo(&c, &ch, 200_000, 11).unwrap();
        assert!((est.bits - c.entropy_bits()).abs() < 0.01, "MI {}", est.bits);
    }

    #[test]
    fn estimator_respects_entropy_and_capacity_bounds() {
        let c = gen_disc(DiscSpec::new(1, 8, PowerBudget::new(1.0).unwrap()).unwrap()).unwrap();
        for snr in [0.5, 4.0, 40.0] {
            let ch = AwgnChannel::from_snr(&c, snr).unwrap();
            let est = mi_quadrature(&c, &ch, 1e-4).unwrap();
            assert!(est.bits <= c.entropy_bits() + 1e-3);
            assert!(est.bits <= (1.0 + snr).log2() + 1e-2);
        }
    }

    #[test]
    fn too_tight_tolerance_reports_non_convergence() {
        let c = gen_disc(DiscSpec::new(1, 4, PowerBudget::new(1.0).unwrap()).unwrap()).unwrap();
        let ch = AwgnChannel::from_snr(&c, 4.0).unwrap();
        let err = mi_quadrature(&c, &ch, 1e-18).unwrap_err();
        assert!(err.is_numerical());
    }

    #[test]
    fn pmf_sampler_skips_zero_probability() {
        let pts = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        let c = Constellation::from_points(&pts, &[0.5, 0.0, 0.5], 0, "custom").unwrap();
        let sampler = PmfSampler::new(&c);
        let mut rng = block_rng(1, 0);
        for _ in 0..1000 {
            assert_ne!(sampler.draw(&mut rng), 1);
        }
    }
}
