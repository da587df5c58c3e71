//! Closed-form constellation generators.
//!
//! * [`gen_disc`] — uniform-density disc or annulus, radii `∝ √n` over an
//!   index window `[n_low, n_high]`, uniform probabilities.
//! * [`gen_gb_hr`] — high-rate geometric bell: inverse-sampled approximation
//!   of a complex Gaussian, radii `∝ √(ln(N/(N−n)))`.
//! * [`gen_pb_se`] — probabilistic bell with a geometric pmf that meets an
//!   entropy target at minimum SNR (disc geometry, radii `∝ √n`).
//! * [`gen_geometric_pmf_disc`] — the one-parameter geometric-pmf family on
//!   disc geometry, interpolating between a bell pmf (ξ→0) and the uniform
//!   disc (ξ=1).
//! * [`gen_qam`] / [`gen_psk`] — square-grid and constant-magnitude baselines.

use crate::constellation::{build_constellation, Constellation, PowerBudget};
use crate::error::Error;
use crate::Result;
use num_complex::Complex64;

/// Index window and power budget for the (generalized) disc scheme.
///
/// `n_low = 1` is the regular disc; raising `n_low` hollows the disc into an
/// annulus, trading entropy-per-point density for lower PAPR.
#[derive(Debug, Clone, Copy)]
pub struct DiscSpec {
    n_low: u64,
    n_high: u64,
    power: PowerBudget,
}

impl DiscSpec {
    pub fn new(n_low: u64, n_high: u64, power: PowerBudget) -> Result<Self> {
        if n_low < 1 {
            return Err(Error::invalid("n_low must be >= 1"));
        }
        if n_high < n_low {
            return Err(Error::invalid(format!(
                "n_high ({n_high}) must be >= n_low ({n_low})"
            )));
        }
        Ok(DiscSpec {
            n_low,
            n_high,
            power,
        })
    }

    pub fn n_low(&self) -> u64 {
        self.n_low
    }

    pub fn n_high(&self) -> u64 {
        self.n_high
    }

    pub fn n_points(&self) -> u64 {
        self.n_high - self.n_low + 1
    }

    pub fn power(&self) -> PowerBudget {
        self.power
    }

    /// Radial scale: `c² = 2·P̄·N / (N_h(N_h+1) − N_l(N_l−1))`, the closed
    /// form of the average-power constraint over `Σ n` on the index window.
    pub fn radial_scale(&self) -> f64 {
        let nh = self.n_high as f64;
        let nl = self.n_low as f64;
        let n = self.n_points() as f64;
        (2.0 * self.power.value() * n / (nh * (nh + 1.0) - nl * (nl - 1.0))).sqrt()
    }
}

/// Generate the (generalized) disc constellation: radii `c·√n` for
/// `n = n_low..=n_high`, uniform probabilities, average power exactly the
/// budget.
pub fn gen_disc(spec: DiscSpec) -> Result<Constellation> {
    let c = spec.radial_scale();
    let radii: Vec<f64> = (spec.n_low..=spec.n_high)
        .map(|n| c * (n as f64).sqrt())
        .collect();
    let probs = vec![1.0; radii.len()];
    let tag = if spec.n_low == 1 {
        "disc"
    } else {
        "disc-generalized"
    };
    build_constellation(&radii, &probs, spec.n_low as i64, tag)
}

/// Generate the high-rate geometric bell: radii
/// `c·√(ln(N/(N−n)))` for `n = 0..N−1` with `c² = N·P̄/(N·lnN − ln N!)`,
/// uniform probabilities. The innermost radius is exactly 0.
///
/// `ln N!` goes through the log-gamma function, so sizes of 2^20 points and
/// beyond generate without overflow.
pub fn gen_gb_hr(n_points: u64, power: PowerBudget) -> Result<Constellation> {
    if n_points < 2 {
        return Err(Error::invalid("n_points must be >= 2"));
    }
    let n = n_points as f64;
    let ln_n_factorial = libm::lgamma(n + 1.0);
    let c = (n * power.value() / (n * n.ln() - ln_n_factorial)).sqrt();
    let radii: Vec<f64> = (0..n_points)
        .map(|k| {
            // ln(N/(N−k)) = −ln(1 − k/N), stable for k ≪ N.
            let t = -(-(k as f64) / n).ln_1p();
            c * t.sqrt()
        })
        .collect();
    let probs = vec![1.0; radii.len()];
    build_constellation(&radii, &probs, 0, "gb-hr")
}

/// Geometric pmf `p_n = ((1−ξ)/(1−ξ^N))·ξ^{n−1}` for `n = 1..=N`, with the
/// removable singularity at ξ=1 handled as the uniform pmf.
pub fn geometric_pmf(n_points: u64, xi: f64) -> Result<Vec<f64>> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::invalid(format!("xi must be in (0, 1], got {xi}")));
    }
    let n = n_points as f64;
    if xi == 1.0 {
        return Ok(vec![1.0 / n; n_points as usize]);
    }
    let ln_xi = xi.ln();
    // 1 − ξ^N without cancellation for ξ near 1.
    let one_minus_xi_n = -f64::exp_m1(n * ln_xi);
    let ln_head = (1.0 - xi).ln() - one_minus_xi_n.ln();
    Ok((0..n_points)
        .map(|k| (ln_head + k as f64 * ln_xi).exp())
        .collect())
}

/// Entropy in nats of the geometric pmf as a function of ξ, the closed form
/// `−ln((1−ξ)/(1−ξ^N)) + (Nξ^N/(1−ξ^N) − ξ/(1−ξ))·ln ξ`.
///
/// Continuous and strictly increasing on (0,1), from 0 to ln N.
pub fn geometric_pmf_entropy_nats(xi: f64, n_points: u64) -> f64 {
    let n = n_points as f64;
    if xi >= 1.0 {
        return n.ln();
    }
    let ln_xi = xi.ln();
    let one_minus_xi_n = -f64::exp_m1(n * ln_xi);
    let xi_n = (n * ln_xi).exp();
    let head = (1.0 - xi) / one_minus_xi_n;
    -head.ln() + (n * xi_n / one_minus_xi_n - xi / (1.0 - xi)) * ln_xi
}

/// Solution of the entropy equation for the probabilistic bell scheme.
#[derive(Debug, Clone, Copy)]
pub struct PbseSolution {
    /// Geometric pmf ratio in (0, 1).
    pub xi: f64,
    /// Radial scale for unit average power, `√(1/E[n])`.
    pub c_pbse: f64,
    /// Entropy of the pmf in nats.
    pub entropy_nats: f64,
}

/// Solve `H(ξ, N) = target` for ξ by bisection on (0, 1).
///
/// The entropy is continuous and strictly increasing in ξ, so bisection with
/// a 200-iteration cap pins ξ to machine width.
pub fn solve_xi_for_entropy(n_points: u64, target_entropy_nats: f64) -> Result<PbseSolution> {
    if n_points < 2 {
        return Err(Error::invalid("n_points must be >= 2"));
    }
    let ln_n = (n_points as f64).ln();
    if !(target_entropy_nats > 0.0 && target_entropy_nats < ln_n) {
        return Err(Error::invalid(format!(
            "target entropy {target_entropy_nats} nats outside (0, ln N = {ln_n})"
        )));
    }
    let mut lo = 1e-12_f64;
    let mut hi = 1.0 - 1e-12;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if geometric_pmf_entropy_nats(mid, n_points) < target_entropy_nats {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xi = 0.5 * (lo + hi);
    let probs = geometric_pmf(n_points, xi)?;
    let mean_index: f64 = probs
        .iter()
        .enumerate()
        .map(|(k, &p)| (k + 1) as f64 * p)
        .sum();
    Ok(PbseSolution {
        xi,
        c_pbse: (1.0 / mean_index).sqrt(),
        entropy_nats: geometric_pmf_entropy_nats(xi, n_points),
    })
}

/// Generate the entropy-constrained probabilistic bell: disc geometry
/// `r_n = c·√n` with the geometric pmf whose entropy equals
/// `target_entropy_bits`, at the given average power.
pub fn gen_pb_se(
    n_points: u64,
    target_entropy_bits: f64,
    power: PowerBudget,
) -> Result<Constellation> {
    let target_nats = target_entropy_bits * std::f64::consts::LN_2;
    let sol = solve_xi_for_entropy(n_points, target_nats)?;
    let c = power.value().sqrt() * sol.c_pbse;
    let radii: Vec<f64> = (1..=n_points).map(|n| c * (n as f64).sqrt()).collect();
    let probs = geometric_pmf(n_points, sol.xi)?;
    build_constellation(&radii, &probs, 1, "pb-se")
}

/// Generate the geometric-pmf disc family member for a given ξ ∈ (0, 1]:
/// radii `c·√n`, geometric pmf, with `c` chosen so the SNR equality
/// `Σ p_n c² n / σ² = S` holds exactly. At ξ=1 this is the uniform disc.
pub fn gen_geometric_pmf_disc(
    n_points: u64,
    xi: f64,
    snr: f64,
    noise_var: f64,
) -> Result<Constellation> {
    if n_points < 1 {
        return Err(Error::invalid("n_points must be >= 1"));
    }
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::invalid(format!("snr must be positive, got {snr}")));
    }
    if !(noise_var > 0.0) || !noise_var.is_finite() {
        return Err(Error::invalid(format!(
            "noise_var must be positive, got {noise_var}"
        )));
    }
    let probs = geometric_pmf(n_points, xi)?;
    let mean_index: f64 = probs
        .iter()
        .enumerate()
        .map(|(k, &p)| (k + 1) as f64 * p)
        .sum();
    let c = (snr * noise_var / mean_index).sqrt();
    let radii: Vec<f64> = (1..=n_points).map(|n| c * (n as f64).sqrt()).collect();
    build_constellation(&radii, &probs, 1, "pb-xi")
}

/// Square QAM on the odd-integer grid `±1, ±3, …` scaled to the power budget,
/// uniform probabilities. Symbol-level only (no bit labeling).
pub fn gen_qam(m_side: u64, power: PowerBudget) -> Result<Constellation> {
    if m_side < 2 || m_side % 2 != 0 {
        return Err(Error::invalid(format!(
            "QAM side must be even and >= 2, got {m_side}"
        )));
    }
    let m = m_side as i64;
    // Per-axis mean square of {±1, ±3, …, ±(m−1)} is (m²−1)/3.
    let a = (3.0 * power.value() / (2.0 * (m * m - 1) as f64)).sqrt();
    let mut amplitudes = Vec::with_capacity((m * m) as usize);
    for i in 0..m {
        for q in 0..m {
            let re = (2 * i - (m - 1)) as f64 * a;
            let im = (2 * q - (m - 1)) as f64 * a;
            amplitudes.push(Complex64::new(re, im));
        }
    }
    let probs = vec![1.0; amplitudes.len()];
    Constellation::from_points(&amplitudes, &probs, 0, "qam")
}

/// Uniform PSK on a circle of radius `√P̄`.
pub fn gen_psk(n_points: u64, power: PowerBudget) -> Result<Constellation> {
    if n_points < 1 {
        return Err(Error::invalid("n_points must be >= 1"));
    }
    let r = power.value().sqrt();
    let amplitudes: Vec<Complex64> = (0..n_points)
        .map(|k| {
            Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n_points as f64)
        })
        .collect();
    let probs = vec![1.0; amplitudes.len()];
    Constellation::from_points(&amplitudes, &probs, 0, "psk")
}

/// Index pairs `(n, N+1−n)` for the constant-magnitude two-symbol code on the
/// regular disc (`n_low = 1`). Each pair's summed power is exactly `2·P̄`
/// because `c²·(n + n′) = c²·(N+1) = 2·P̄`.
pub fn pair_code_indices(n_points: u64) -> Vec<(u64, u64)> {
    (1..=n_points).map(|n| (n, n_points + 1 - n)).collect()
}

/// Per-symbol peak-to-average power ratio of the two-symbol code,
/// `2N/(N+1)`: the peak single-symbol power `c²N` over the average `P̄`.
pub fn pair_code_peak_to_average(n_points: u64) -> f64 {
    2.0 * n_points as f64 / (n_points as f64 + 1.0)
}
