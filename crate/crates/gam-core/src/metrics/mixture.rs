//! Gaussian-mixture channel-output density with spatial pruning.
//!
//! The channel output density is `f_Y(y) = (1/πσ²) Σ p_n e^{−|y−x_n|²/σ²}`.
//! Everything here works in the log domain through log-sum-exp, so densities
//! far below the f64 underflow threshold still have an exactly-representable
//! log form.
//!
//! For large constellations, components are indexed by a uniform cell grid:
//! a query walks outward ring by ring to find the nearest component, then
//! gathers every component whose squared distance is within `T·σ²` of the
//! nearest. `T` is chosen from the pmf's log-probability spread so that both
//! the mixture density (relative error < 1e-18) and the MAP argmax are exact
//! with respect to the unpruned computation.

use num_complex::Complex64;

use crate::constellation::Constellation;

/// Terms more than this many nats below the leading one are dropped; e^-46
/// is ~1e-20, far below accumulation error.
const LOG_DROP: f64 = 46.0;
/// Below this component count a linear scan beats the cell index.
const BRUTE_FORCE_LIMIT: usize = 48;

pub struct MixtureEval {
    sigma2: f64,
    /// ln(1/(πσ²)), the conditional-density normalizer.
    ln_norm: f64,
    pts: Vec<Complex64>,
    ln_p: Vec<f64>,
    /// Component index -> position in the source constellation.
    orig_index: Vec<usize>,
    /// Position in the source constellation -> component index (zero
    /// probability points have no component).
    slot: Vec<Option<u32>>,
    bins: Option<Bins>,
    /// Gather window: components with d² ≤ dmin² + gather_cut·σ² participate.
    gather_cut: f64,
}

struct Bins {
    x0: f64,
    y0: f64,
    cell: f64,
    ncx: usize,
    ncy: usize,
    /// CSR layout: components of cell `c` are `items[start[c]..start[c+1]]`.
    start: Vec<u32>,
    items: Vec<u32>,
}

/// Reusable gather buffer; create one per worker.
#[derive(Default)]
pub struct Scratch {
    hits: Vec<(u32, f64)>,
}

impl MixtureEval {
    pub fn new(c: &Constellation, sigma2: f64) -> Self {
        assert!(sigma2 > 0.0, "noise variance must be positive");
        let mut pts = Vec::new();
        let mut ln_p = Vec::new();
        let mut orig_index = Vec::new();
        let mut slot = vec![None; c.len()];
        for (k, p) in c.points().iter().enumerate() {
            if p.probability > 0.0 {
                slot[k] = Some(pts.len() as u32);
                pts.push(p.amplitude);
                ln_p.push(p.probability.ln());
                orig_index.push(k);
            }
        }
        assert!(!pts.is_empty(), "all probabilities are zero");
        let lp_max = ln_p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lp_min = ln_p.iter().cloned().fold(f64::INFINITY, f64::min);
        let gather_cut = (lp_max - lp_min).min(745.0) + LOG_DROP;
        let bins = Bins::build(&pts, sigma2.sqrt());
        MixtureEval {
            sigma2,
            ln_norm: -(std::f64::consts::PI * sigma2).ln(),
            pts,
            ln_p,
            orig_index,
            slot,
            bins,
            gather_cut,
        }
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn scratch(&self) -> Scratch {
        Scratch::default()
    }

    /// Natural log of the mixture density `f_Y(y)`.
    pub fn ln_pdf(&self, y: Complex64) -> f64 {
        self.ln_pdf_with(&mut Scratch::default(), y)
    }

    /// Mixture density `f_Y(y)`; underflows to 0 where the log form is below
    /// roughly −745.
    pub fn pdf(&self, y: Complex64) -> f64 {
        self.ln_pdf(y).exp()
    }

    pub fn ln_pdf_with(&self, scratch: &mut Scratch, y: Complex64) -> f64 {
        self.gather(scratch, y);
        let inv_s2 = 1.0 / self.sigma2;
        let mut m = f64::NEG_INFINITY;
        for &(i, d2) in &scratch.hits {
            let a = self.ln_p[i as usize] - d2 * inv_s2;
            if a > m {
                m = a;
            }
        }
        let mut sum = 0.0;
        for &(i, d2) in &scratch.hits {
            let a = self.ln_p[i as usize] - d2 * inv_s2;
            if a >= m - LOG_DROP {
                sum += (a - m).exp();
            }
        }
        self.ln_norm + m + sum.ln()
    }

    /// One Monte-Carlo MI sample in bits:
    /// `log₂( p(y|x_tx) / Σ_n p(y|x_n) p_n )` for the transmitted position.
    pub fn mi_sample_bits(&self, scratch: &mut Scratch, y: Complex64, tx_position: usize) -> f64 {
        let comp = self.slot[tx_position].expect("transmitted point has zero probability");
        let d2 = (y - self.pts[comp as usize]).norm_sqr();
        let ln_cond = self.ln_norm - d2 / self.sigma2;
        (ln_cond - self.ln_pdf_with(scratch, y)) / std::f64::consts::LN_2
    }

    /// MAP detection: the constellation position maximizing
    /// `p_n · p(y|x_n)`. Ties break toward the lowest position.
    pub fn map_detect(&self, scratch: &mut Scratch, y: Complex64) -> usize {
        self.gather(scratch, y);
        let inv_s2 = 1.0 / self.sigma2;
        let mut best = f64::NEG_INFINITY;
        let mut best_orig = usize::MAX;
        for &(i, d2) in &scratch.hits {
            let score = self.ln_p[i as usize] - d2 * inv_s2;
            let orig = self.orig_index[i as usize];
            if score > best || (score == best && orig < best_orig) {
                best = score;
                best_orig = orig;
            }
        }
        best_orig
    }

    /// Collect `(component, d²)` pairs covering every term that can matter:
    /// all components with `d² ≤ dmin² + gather_cut·σ²`.
    fn gather(&self, scratch: &mut Scratch, y: Complex64) {
        scratch.hits.clear();
        let Some(bins) = &self.bins else {
            for (i, pt) in self.pts.iter().enumerate() {
                scratch.hits.push((i as u32, (y - pt).norm_sqr()));
            }
            return;
        };

        let vcx = ((y.re - bins.x0) / bins.cell).floor() as i64;
        let vcy = ((y.im - bins.y0) / bins.cell).floor() as i64;
        let max_ring = bins.max_ring(vcx, vcy);
        let window = self.gather_cut * self.sigma2;
        let mut dmin2 = f64::INFINITY;

        let mut ring = 0i64;
        while ring <= max_ring {
            // Any component in this ring is at least (ring−1)·cell away.
            let lower = (ring - 1).max(0) as f64 * bins.cell;
            if dmin2.is_finite() && lower * lower > dmin2 + window {
                break;
            }
            bins.for_ring(vcx, vcy, ring, |comp| {
                let d2 = (y - self.pts[comp as usize]).norm_sqr();
                if d2 < dmin2 {
                    dmin2 = d2;
                }
                scratch.hits.push((comp, d2));
            });
            ring += 1;
        }
        // Drop over-gathered entries now that dmin² is final.
        let cut = dmin2 + window;
        scratch.hits.retain(|&(_, d2)| d2 <= cut);
    }
}

impl Bins {
    fn build(pts: &[Complex64], sigma: f64) -> Option<Bins> {
        if pts.len() <= BRUTE_FORCE_LIMIT {
            return None;
        }
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in pts {
            xmin = xmin.min(p.re);
            xmax = xmax.max(p.re);
            ymin = ymin.min(p.im);
            ymax = ymax.max(p.im);
        }
        let extent = (xmax - xmin).max(ymax - ymin);
        if extent < 6.0 * sigma {
            // Noise blankets the whole constellation; pruning cannot help.
            return None;
        }
        let cell = (3.0 * sigma).max(extent / 256.0);
        let ncx = ((xmax - xmin) / cell) as usize + 1;
        let ncy = ((ymax - ymin) / cell) as usize + 1;
        let mut counts = vec![0u32; ncx * ncy + 1];
        let cell_of = |p: &Complex64| -> usize {
            let cx = (((p.re - xmin) / cell) as usize).min(ncx - 1);
            let cy = (((p.im - ymin) / cell) as usize).min(ncy - 1);
            cy * ncx + cx
        };
        for p in pts {
            counts[cell_of(p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let start = counts;
        let mut cursor = start.clone();
        let mut items = vec![0u32; pts.len()];
        for (i, p) in pts.iter().enumerate() {
            let c = cell_of(p);
            items[cursor[c] as usize] = i as u32;
            cursor[c] += 1;
        }
        Some(Bins {
            x0: xmin,
            y0: ymin,
            cell,
            ncx,
            ncy,
            start,
            items,
        })
    }

    /// Largest Chebyshev cell distance from `(vcx, vcy)` to any grid cell.
    fn max_ring(&self, vcx: i64, vcy: i64) -> i64 {
        let dx = (0 - vcx).max(vcx - (self.ncx as i64 - 1)).max(0) + self.ncx as i64;
        let dy = (0 - vcy).max(vcy - (self.ncy as i64 - 1)).max(0) + self.ncy as i64;
        dx.max(dy)
    }

    /// Visit all components in cells at Chebyshev distance `ring` from the
    /// (possibly out-of-grid) virtual cell, in a fixed deterministic order.
    fn for_ring(&self, vcx: i64, vcy: i64, ring: i64, mut visit: impl FnMut(u32)) {
        let mut cell = |cx: i64, cy: i64| {
            if cx < 0 || cy < 0 || cx >= self.ncx as i64 || cy >= self.ncy as i64 {
                return;
            }
            let c = cy as usize * self.ncx + cx as usize;
            for &comp in &self.items[self.start[c] as usize..self.start[c + 1] as usize] {
                visit(comp);
            }
        };
        if ring == 0 {
            cell(vcx, vcy);
            return;
        }
        for cx in (vcx - ring)..=(vcx + ring) {
            cell(cx, vcy - ring);
            cell(cx, vcy + ring);
        }
        for cy in (vcy - ring + 1)..=(vcy + ring - 1) {
            cell(vcx - ring, cy);
            cell(vcx + ring, cy);
        }
    }
}
