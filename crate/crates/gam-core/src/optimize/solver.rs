//! Dense BFGS minimizer with finite-difference gradients.
//!
//! The shaping objectives eliminate their constraints (cumulative squares for
//! radius ordering, logits for the simplex, uniform rescale for the SNR
//! equality), leaving smooth unconstrained problems in at most a few dozen
//! variables. Objectives are deterministic, so central differences with a
//! small relative step give near-exact gradients.

pub(crate) struct SolverOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub f_tol: f64,
    pub fd_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iters: 150,
            grad_tol: 1e-6,
            f_tol: 1e-11,
            fd_step: 1e-5,
        }
    }
}

pub(crate) struct SolverOutcome {
    pub x: Vec<f64>,
    /// Final objective value (the minimized function).
    pub value: f64,
    /// Objective at the start and after each accepted step (monotone
    /// non-increasing by construction of the line search).
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize `f` from `x0`. Non-finite objective values are treated as
/// rejected points by the line search, so objectives may return NaN/∞ on
/// infeasible parameters as long as `x0` itself is feasible.
pub(crate) fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &SolverOptions,
) -> SolverOutcome {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    assert!(fx.is_finite(), "objective is not finite at the start point");
    let mut trace = vec![fx];
    let mut grad = fd_gradient(&mut f, &x, opts.fd_step);
    // Inverse-Hessian estimate, rescaled on the first curvature pair.
    let mut h = Matrix::identity(n);
    let mut first_update = true;
    let mut iterations = 0;
    let mut converged = false;
    let mut small_steps = 0;

    while iterations < opts.max_iters {
        if inf_norm(&grad) < opts.grad_tol {
            converged = true;
            break;
        }
        let mut dir = h.neg_mul(&grad);
        let mut slope = dot(&grad, &dir);
        if !(slope < 0.0) {
            // Curvature estimate went bad; restart from steepest descent.
            h = Matrix::identity(n);
            first_update = true;
            dir = grad.iter().map(|g| -g).collect();
            slope = dot(&grad, &dir);
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let xt: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + alpha * di).collect();
            let ft = f(&xt);
            if ft.is_finite() && ft <= fx + 1e-4 * alpha * slope {
                accepted = Some((xt, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xt, ft)) = accepted else {
            // No descent along this direction at any tried step length.
            converged = inf_norm(&grad) < 1e3 * opts.grad_tol;
            break;
        };

        let gt = fd_gradient(&mut f, &xt, opts.fd_step);
        let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gt.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if first_update {
                h.scale(sy / dot(&y, &y));
                first_update = false;
            }
            h.bfgs_update(&s, &y, sy);
        }

        let improvement = fx - ft;
        x = xt;
        fx = ft;
        grad = gt;
        trace.push(fx);
        iterations += 1;
        if improvement < opts.f_tol * (1.0 + fx.abs()) {
            small_steps += 1;
            if small_steps >= 2 {
                converged = true;
                break;
            }
        } else {
            small_steps = 0;
        }
    }

    SolverOutcome {
        x,
        value: fx,
        trace,
        iterations,
        converged,
    }
}

fn fd_gradient<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], rel_step: f64) -> Vec<f64> {
    let mut xt = x.to_vec();
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let h = rel_step * (1.0 + x[i].abs());
        xt[i] = x[i] + h;
        let fp = f(&xt);
        xt[i] = x[i] - h;
        let fm = f(&xt);
        xt[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Dense symmetric matrix for the inverse-Hessian estimate (dimension ≤ 64).
struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { n, data }
    }

    fn scale(&mut self, factor: f64) {
        for v in &mut self.data {
            *v *= factor;
        }
    }

    /// `−H·g`
    fn neg_mul(&self, g: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| -dot(&self.data[i * self.n..(i + 1) * self.n], g))
            .collect()
    }

    /// `H ← (I − ρsyᵀ)H(I − ρysᵀ) + ρssᵀ` with `ρ = 1/(yᵀs)`.
    fn bfgs_update(&mut self, s: &[f64], y: &[f64], sy: f64) {
        let n = self.n;
        let rho = 1.0 / sy;
        let hy: Vec<f64> = (0..n)
            .map(|i| dot(&self.data[i * n..(i + 1) * n], y))
            .collect();
        let yhy = dot(y, &hy);
        for i in 0..n {
            for j in 0..n {
                self.data[i * n + j] += rho * rho * yhy * s[i] * s[j] + rho * s[i] * s[j]
                    - rho * (s[i] * hy[j] + hy[i] * s[j]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic_exactly() {
        // f(x) = Σ (i+1)·(x_i − i)²
        let f = |x: &[f64]| -> f64 {
            x.iter()
                .enumerate()
                .map(|(i, &v)| (i + 1) as f64 * (v - i as f64).powi(2))
                .sum()
        };
        let out = minimize(f, &[5.0, -3.0, 0.7, 9.0], &SolverOptions::default());
        assert!(out.converged);
        for (i, v) in out.x.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-5, "x[{i}] = {v}");
        }
    }

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64]| -> f64 {
            100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
        };
        let out = minimize(
            f,
            &[-1.2, 1.0],
            &SolverOptions {
                max_iters: 500,
                ..Default::default()
            },
        );
        assert!(out.value < 1e-8, "f = {}", out.value);
        assert!((out.x[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn trace_is_monotone_non_increasing() {
        let f = |x: &[f64]| -> f64 { x[0].powi(4) + x[1] * x[1] + (x[0] * x[1] - 1.0).powi(2) };
        let out = minimize(f, &[2.0, -2.0], &SolverOptions::default());
        for w in out.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite_regions() {
        // Objective is NaN for x < 0; the line search must stay feasible.
        let f = |x: &[f64]| -> f64 {
            if x[0] <= 0.0 {
                f64::NAN
            } else {
                x[0].ln().powi(2)
            }
        };
        let out = minimize(f, &[5.0], &SolverOptions::default());
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-4);
    }
}
