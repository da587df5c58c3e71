//! Midpoint-rule grids for integrating functionals of the mixture density.
//!
//! Grids are squares centered on the origin, truncated at the outermost
//! constellation point plus a noise-tail margin. Rows are evaluated as
//! independent blocks and reduced in row order (see [`crate::parallel`]).

use num_complex::Complex64;

use super::mixture::MixtureEval;
use crate::constellation::Constellation;
use crate::parallel;

/// A square midpoint-rule grid: `n × n` cells of side `step` covering
/// `[−half, half]²`.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureGrid {
    half: f64,
    step: f64,
    n: usize,
}

impl QuadratureGrid {
    /// Grid covering every constellation point plus `pad_sigmas` noise
    /// standard deviations, with spacing `σ/spacing_div`.
    pub fn for_constellation(
        c: &Constellation,
        sigma2: f64,
        spacing_div: f64,
        pad_sigmas: f64,
    ) -> Self {
        let rmax = c
            .points()
            .iter()
            .map(|p| p.amplitude.norm())
            .fold(0.0, f64::max);
        Self::for_radius(rmax, sigma2, spacing_div, pad_sigmas)
    }

    pub fn for_radius(rmax: f64, sigma2: f64, spacing_div: f64, pad_sigmas: f64) -> Self {
        let sigma = sigma2.sqrt();
        let half = rmax + pad_sigmas * sigma;
        let target = sigma / spacing_div;
        let n = ((2.0 * half) / target).ceil() as usize;
        let n = n.max(8);
        QuadratureGrid {
            half,
            step: 2.0 * half / n as f64,
            n,
        }
    }

    /// Same coverage at half the spacing.
    pub fn refined(&self) -> Self {
        QuadratureGrid {
            half: self.half,
            step: self.step / 2.0,
            n: self.n * 2,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn half_width(&self) -> f64 {
        self.half
    }

    pub fn cells(&self) -> usize {
        self.n * self.n
    }

    fn coord(&self, index: usize) -> f64 {
        -self.half + (index as f64 + 0.5) * self.step
    }
}

/// Differential entropy `h(Y) = −∬ f_Y log₂ f_Y` over the grid, in bits.
pub fn output_entropy_bits(eval: &MixtureEval, grid: &QuadratureGrid) -> f64 {
    let rows = parallel::map_blocks(grid.n, |j| {
        let mut scratch = eval.scratch();
        let im = grid.coord(j);
        let mut acc = 0.0;
        for i in 0..grid.n {
            let y = Complex64::new(grid.coord(i), im);
            let lnf = eval.ln_pdf_with(&mut scratch, y);
            let f = lnf.exp();
            if f > 0.0 {
                acc += f * lnf;
            }
        }
        acc
    });
    let total: f64 = rows.iter().sum();
    -total * grid.step * grid.step / std::f64::consts::LN_2
}

/// Entropy of the channel output for a constellation at a given noise level,
/// on a caller-supplied grid. This is the deterministic primitive behind both
/// the adaptive estimator and the optimizer objectives.
pub fn constellation_output_entropy_bits(
    c: &Constellation,
    sigma2: f64,
    grid: &QuadratureGrid,
) -> f64 {
    let eval = MixtureEval::new(c, sigma2);
    output_entropy_bits(&eval, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::build_constellation;

    #[test]
    fn single_gaussian_entropy_is_exact() {
        // h(Y) for a single point is the noise entropy log₂(πeσ²).
        let c = build_constellation(&[0.0], &[1.0], 0, "custom").unwrap();
        let sigma2 = 0.4;
        let grid = QuadratureGrid::for_constellation(&c, sigma2, 4.0, 8.0);
        let h = constellation_output_entropy_bits(&c, sigma2, &grid);
        let expect = (std::f64::consts::PI * std::f64::consts::E * sigma2).log2();
        assert!((h - expect).abs() < 1e-6, "h {h} expect {expect}");
    }

    #[test]
    fn refinement_changes_little_on_smooth_integrand() {
        let c = build_constellation(&[0.0, 1.0], &[0.5, 0.5], 0, "custom").unwrap();
        let sigma2 = 0.2;
        let g0 = QuadratureGrid::for_constellation(&c, sigma2, 3.0, 8.0);
        let g1 = g0.refined();
        let h0 = constellation_output_entropy_bits(&c, sigma2, &g0);
        let h1 = constellation_output_entropy_bits(&c, sigma2, &g1);
        assert!((h0 - h1).abs() < 1e-6);
    }
}
