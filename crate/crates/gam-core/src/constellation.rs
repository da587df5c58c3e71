//! Constellation data model and golden-angle phase law.
//!
//! A [`Constellation`] is an ordered list of complex points with per-point
//! probabilities. Golden-angle schemes place the point at list position `k`
//! at phase `2π·φ·(index_offset + k)` with `φ = (3−√5)/2`; the radial law and
//! the probabilities are what distinguish the schemes.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Fractional golden ratio `(3−√5)/2 ≈ 0.381966`. One golden-angle turn is
/// `2π·φ ≈ 137.5°`.
pub fn golden_ratio_fraction() -> f64 {
    (3.0 - 5.0_f64.sqrt()) / 2.0
}

/// Phase of the `n`th golden-angle point: `(2π·φ·n) mod 2π`, in `[0, 2π)`.
///
/// The reduction happens on the fractional part of `n·φ` before multiplying
/// by `2π`, which keeps the phase error flat in `n` up to indices around 10^6.
pub fn golden_angle_phase(n: i64) -> f64 {
    let frac = (n as f64 * golden_ratio_fraction()).rem_euclid(1.0);
    TAU * frac
}

/// Average-power budget in linear units, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerBudget(f64);

impl PowerBudget {
    pub fn new(avg_power: f64) -> Result<Self> {
        if !avg_power.is_finite() {
            return Err(Error::NonFinite("average power"));
        }
        if avg_power <= 0.0 {
            return Err(Error::ZeroPower);
        }
        Ok(PowerBudget(avg_power))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// One constellation point: a complex amplitude and its probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstellationPoint {
    pub amplitude: Complex64,
    pub probability: f64,
}

/// Ordered constellation points with probabilities, a scheme tag, and the
/// index of the first point on the golden-angle spiral.
///
/// Invariants (enforced on construction and on load):
/// * probabilities are non-negative and sum to 1 within 1e-12,
/// * all coordinates are finite,
/// * for golden-angle scheme tags: radii are non-decreasing with list
///   position and the phase of position `k` matches
///   [`golden_angle_phase`]`(index_offset + k)` within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<ConstellationPoint>,
    scheme: String,
    index_offset: i64,
}

/// Scheme tags whose geometry must follow the golden-angle phase law.
/// Reference schemes (`qam`, `psk`) and free-form tags are exempt.
const GOLDEN_ANGLE_SCHEMES: &[&str] = &[
    "disc",
    "disc-generalized",
    "gb-hr",
    "pb-se",
    "pb-xi",
    "g1",
    "g2",
    "p1",
    "p2",
    "gp1",
];

/// Tolerance below which a probability vector counts as already normalized.
const PROB_SUM_TOL: f64 = 1e-12;
const PHASE_TOL: f64 = 1e-12;

/// Assemble a golden-angle constellation from a radial law and probabilities.
///
/// Point `k` gets amplitude `radii[k]·e^{i·phase(index_offset + k)}`.
/// Probabilities are normalized to sum exactly to 1, so closed forms with
/// rounding error never fail validation.
pub fn build_constellation(
    radii: &[f64],
    probs: &[f64],
    index_offset: i64,
    scheme: &str,
) -> Result<Constellation> {
    if radii.is_empty() {
        return Err(Error::Empty);
    }
    if radii.len() != probs.len() {
        return Err(Error::LengthMismatch {
            radii: radii.len(),
            probs: probs.len(),
        });
    }
    for (k, &r) in radii.iter().enumerate() {
        if !r.is_finite() {
            return Err(Error::NonFinite("radius"));
        }
        if r < 0.0 {
            return Err(Error::NegativeRadius {
                position: k,
                value: r,
            });
        }
        if k > 0 && r < radii[k - 1] {
            return Err(Error::DecreasingRadii { position: k });
        }
    }
    let probs = normalize_probs(probs)?;
    let points = radii
        .iter()
        .zip(probs)
        .enumerate()
        .map(|(k, (&r, p))| {
            let phase = golden_angle_phase(index_offset + k as i64);
            ConstellationPoint {
                amplitude: Complex64::from_polar(r, phase),
                probability: p,
            }
        })
        .collect();
    let c = Constellation {
        points,
        scheme: scheme.to_string(),
        index_offset,
    };
    c.validate()?;
    Ok(c)
}

/// Neumaier-compensated sum; constellations can have 2^20 points, where a
/// plain sum already loses the 1e-12 probability-mass invariant.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn normalize_probs(probs: &[f64]) -> Result<Vec<f64>> {
    for (k, &p) in probs.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NonFinite("probability"));
        }
        if p < 0.0 {
            return Err(Error::NegativeProbability {
                position: k,
                value: p,
            });
        }
    }
    let sum = compensated_sum(probs.iter().copied());
    if sum <= 0.0 {
        return Err(Error::ZeroProbabilityMass);
    }
    if (sum - 1.0).abs() <= PROB_SUM_TOL {
        return Ok(probs.to_vec());
    }
    Ok(probs.iter().map(|&p| p / sum).collect())
}

impl Constellation {
    /// Build from explicit complex points (used by the QAM/PSK baselines and
    /// by tests that need arbitrary geometry). Probabilities are normalized;
    /// golden-angle geometry checks apply only when `scheme` is one of the
    /// golden-angle tags.
    pub fn from_points(
        amplitudes: &[Complex64],
        probs: &[f64],
        index_offset: i64,
        scheme: &str,
    ) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty);
        }
        if amplitudes.len() != probs.len() {
            return Err(Error::LengthMismatch {
                radii: amplitudes.len(),
                probs: probs.len(),
            });
        }
        let probs = normalize_probs(probs)?;
        let points = amplitudes
            .iter()
            .zip(probs)
            .map(|(&amplitude, probability)| ConstellationPoint {
                amplitude,
                probability,
            })
            .collect();
        let c = Constellation {
            points,
            scheme: scheme.to_string(),
            index_offset,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn points(&self) -> &[ConstellationPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn index_offset(&self) -> i64 {
        self.index_offset
    }

    /// Whether this constellation's tag binds it to the golden-angle phase law.
    pub fn is_golden_angle_scheme(&self) -> bool {
        GOLDEN_ANGLE_SCHEMES.contains(&self.scheme.as_str())
    }

    pub fn radii(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.amplitude.norm()).collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.probability).collect()
    }

    /// Average power `Σ p_n |x_n|²`.
    pub fn average_power(&self) -> f64 {
        compensated_sum(
            self.points
                .iter()
                .map(|p| p.probability * p.amplitude.norm_sqr()),
        )
    }

    /// Peak-to-average power ratio `max_n |x_n|² / average_power`,
    /// dimensionless (1.0 for any constant-magnitude constellation).
    pub fn papr(&self) -> Result<f64> {
        let avg = self.average_power();
        if avg <= 0.0 {
            return Err(Error::ZeroPower);
        }
        let peak = self
            .points
            .iter()
            .map(|p| p.amplitude.norm_sqr())
            .fold(0.0, f64::max);
        Ok(peak / avg)
    }

    /// Entropy `−Σ p_n log₂ p_n` in bits; zero-probability points contribute 0.
    pub fn entropy_bits(&self) -> f64 {
        -compensated_sum(
            self.points
                .iter()
                .filter(|p| p.probability > 0.0)
                .map(|p| p.probability * p.probability.log2()),
        )
    }

    /// Mean `Σ p_n x_n`. Golden-angle constellations have a small nonzero
    /// mean; it is reported here and never silently subtracted.
    pub fn mean(&self) -> Complex64 {
        Complex64::new(
            compensated_sum(self.points.iter().map(|p| p.amplitude.re * p.probability)),
            compensated_sum(self.points.iter().map(|p| p.amplitude.im * p.probability)),
        )
    }

    /// Uniformly scale all radii so the average power equals `target`.
    /// Probabilities and phases are unchanged.
    pub fn rescale_to_power(&self, target: PowerBudget) -> Result<Self> {
        let current = self.average_power();
        if current <= 0.0 {
            return Err(Error::ZeroPower);
        }
        let factor = (target.value() / current).sqrt();
        let points = self
            .points
            .iter()
            .map(|p| ConstellationPoint {
                amplitude: p.amplitude * factor,
                probability: p.probability,
            })
            .collect();
        Ok(Constellation {
            points,
            scheme: self.scheme.clone(),
            index_offset: self.index_offset,
        })
    }

    /// Check all invariants; errors name the first violated one.
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Empty);
        }
        for (k, p) in self.points.iter().enumerate() {
            if !p.amplitude.re.is_finite() || !p.amplitude.im.is_finite() {
                return Err(Error::NonFinite("amplitude"));
            }
            if !p.probability.is_finite() {
                return Err(Error::NonFinite("probability"));
            }
            if p.probability < 0.0 {
                return Err(Error::NegativeProbability {
                    position: k,
                    value: p.probability,
                });
            }
        }
        let sum = compensated_sum(self.points.iter().map(|p| p.probability));
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::Validation(format!(
                "probabilities sum to {sum:.17} (expected 1 within {PROB_SUM_TOL:e})"
            )));
        }
        if self.is_golden_angle_scheme() {
            self.validate_golden_angle_geometry()?;
        }
        Ok(())
    }

    fn validate_golden_angle_geometry(&self) -> Result<()> {
        let mut prev_r = 0.0_f64;
        for (k, p) in self.points.iter().enumerate() {
            let r = p.amplitude.norm();
            // Allow a relative slack of one part in 1e12 for round-tripped data.
            if k > 0 && r < prev_r - 1e-12 * prev_r.max(1.0) {
                return Err(Error::Validation(format!(
                    "radius decreases at position {k} for golden-angle scheme '{}'",
                    self.scheme
                )));
            }
            prev_r = r;
            if r > 0.0 {
                let expected = golden_angle_phase(self.index_offset + k as i64);
                let actual = p.amplitude.arg().rem_euclid(TAU);
                let mut delta = (actual - expected).abs();
                if delta > std::f64::consts::PI {
                    delta = TAU - delta;
                }
                if delta > PHASE_TOL {
                    return Err(Error::Validation(format!(
                        "phase at position {k} deviates from the golden-angle law by {delta:.3e} rad"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Serialize to the canonical JSON document.
    pub fn to_json_string(&self) -> Result<String> {
        let record = ConstellationRecord {
            scheme: self.scheme.clone(),
            index_offset: self.index_offset,
            avg_power: self.average_power(),
            points: self
                .points
                .iter()
                .map(|p| PointRecord {
                    re: p.amplitude.re,
                    im: p.amplitude.im,
                    p: p.probability,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&record)?)
    }

    /// Parse and validate the canonical JSON document.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let record: ConstellationRecord = serde_json::from_str(s)?;
        let c = Constellation {
            points: record
                .points
                .iter()
                .map(|p| ConstellationPoint {
                    amplitude: Complex64::new(p.re, p.im),
                    probability: p.p,
                })
                .collect(),
            scheme: record.scheme,
            index_offset: record.index_offset,
        };
        c.validate()?;
        let power = c.average_power();
        let declared = record.avg_power;
        if !declared.is_finite() || (power - declared).abs() > 1e-9 * power.max(1.0) {
            return Err(Error::Validation(format!(
                "declared avg_power {declared} disagrees with computed {power}"
            )));
        }
        Ok(c)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }
}

/// Canonical persistence schema:
/// `{"scheme", "index_offset", "avg_power", "points": [{"re","im","p"}, …]}`.
/// Doubles round-trip exactly through serde_json's shortest representation.
#[derive(Serialize, Deserialize)]
struct ConstellationRecord {
    scheme: String,
    index_offset: i64,
    avg_power: f64,
    points: Vec<PointRecord>,
}

#[derive(Serialize, Deserialize)]
struct PointRecord {
    re: f64,
    im: f64,
    p: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_angle_phase_values() {
        assert_eq!(golden_angle_phase(0), 0.0);
        // One step is 137.5077° ≈ 2.399963 rad.
        assert!((golden_angle_phase(1) - 2.399963).abs() < 1e-6);
        assert!((golden_angle_phase(1).to_degrees() - 137.5077).abs() < 1e-4);
        // Two steps, reduced mod 2π.
        assert!((golden_angle_phase(2) - 4.799926).abs() < 1e-6);
        for n in [-5_i64, -1, 0, 3, 1_000_000] {
            let ph = golden_angle_phase(n);
            assert!((0.0..TAU).contains(&ph), "phase {ph} out of range at n={n}");
        }
    }

    #[test]
    fn build_single_point_at_offset_one() {
        let c = build_constellation(&[1.0], &[1.0], 1, "disc").unwrap();
        let p = c.points()[0];
        assert!((p.amplitude.arg().rem_euclid(TAU) - golden_angle_phase(1)).abs() < 1e-15);
        assert!((p.amplitude.norm() - 1.0).abs() < 1e-15);
        assert_eq!(p.probability, 1.0);
    }

    #[test]
    fn build_normalizes_probabilities() {
        let c = build_constellation(&[1.0, 2.0], &[2.0, 2.0], 1, "disc").unwrap();
        assert_eq!(c.probabilities(), vec![0.5, 0.5]);
    }

    #[test]
    fn build_two_equal_radii_points() {
        let c = build_constellation(&[1.0, 1.0], &[0.5, 0.5], 0, "custom").unwrap();
        let a = c.points()[0].amplitude;
        let b = c.points()[1].amplitude;
        let mut sep = (b.arg() - a.arg()).rem_euclid(TAU);
        if sep > std::f64::consts::PI {
            sep = TAU - sep;
        }
        // Separated by one golden angle (137.5° < 180°, no wrap).
        assert!((sep - golden_angle_phase(1)).abs() < 1e-12);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            build_constellation(&[1.0, 2.0], &[1.0], 0, "x"),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            build_constellation(&[-1.0], &[1.0], 0, "x"),
            Err(Error::NegativeRadius { .. })
        ));
        assert!(matches!(
            build_constellation(&[2.0, 1.0], &[0.5, 0.5], 0, "x"),
            Err(Error::DecreasingRadii { position: 1 })
        ));
        assert!(matches!(
            build_constellation(&[1.0, 2.0], &[0.0, 0.0], 0, "x"),
            Err(Error::ZeroProbabilityMass)
        ));
        assert!(matches!(
            build_constellation(&[], &[], 0, "x"),
            Err(Error::Empty)
        ));
    }

    #[test]
    fn average_power_single_point() {
        let c = build_constellation(&[2.0], &[1.0], 0, "x").unwrap();
        assert!((c.average_power() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn rescale_round_trip() {
        // Regular disc with N=8 at unit power: r_n = √(2n/9).
        let radii: Vec<f64> = (1..=8).map(|n| (2.0 * n as f64 / 9.0).sqrt()).collect();
        let probs = vec![0.125; 8];
        let c = build_constellation(&radii, &probs, 1, "disc").unwrap();
        let up = c.rescale_to_power(PowerBudget::new(4.0).unwrap()).unwrap();
        assert!((up.average_power() - 4.0).abs() < 1e-12 * 4.0);
        for (a, b) in c.radii().iter().zip(up.radii()) {
            assert!((b - 2.0 * a).abs() < 1e-12);
        }
        let back = up.rescale_to_power(PowerBudget::new(c.average_power()).unwrap()).unwrap();
        for (a, b) in c.radii().iter().zip(back.radii()) {
            assert!((a - b).abs() < 1e-12);
        }
        // Identity at the target.
        let same = c.rescale_to_power(PowerBudget::new(c.average_power()).unwrap()).unwrap();
        for (a, b) in c.radii().iter().zip(same.radii()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn papr_all_equal_radii_is_one() {
        let c = build_constellation(&[1.5, 1.5, 1.5], &[1.0, 1.0, 1.0], 0, "custom").unwrap();
        assert!((c.papr().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_uniform_and_degenerate() {
        let c = build_constellation(&vec![1.0; 16], &vec![1.0; 16], 0, "custom").unwrap();
        assert!((c.entropy_bits() - 4.0).abs() < 1e-12);
        let mut probs = vec![0.0; 8];
        probs[0] = 1.0;
        let d = build_constellation(&vec![1.0; 8], &probs, 0, "custom").unwrap();
        assert_eq!(d.entropy_bits(), 0.0);
    }

    #[test]
    fn mean_of_antipodal_pair_is_zero() {
        let pts = [Complex64::new(1.0, 0.5), Complex64::new(-1.0, -0.5)];
        let c = Constellation::from_points(&pts, &[0.5, 0.5], 0, "custom").unwrap();
        assert!(c.mean().norm() < 1e-15);
        let single = build_constellation(&[2.0], &[1.0], 3, "x").unwrap();
        assert!((single.mean() - single.points()[0].amplitude).norm() < 1e-15);
    }

    #[test]
    fn validation_rejects_phase_violation() {
        let pts = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.2)];
        let err = Constellation::from_points(&pts, &[0.5, 0.5], 1, "disc");
        assert!(matches!(err, Err(Error::Validation(_))));
        // Same geometry with a non-golden-angle tag passes.
        assert!(Constellation::from_points(&pts, &[0.5, 0.5], 1, "custom").is_ok());
    }

    #[test]
    fn json_round_trip_preserves_bits() {
        let radii: Vec<f64> = (1..=5).map(|n| (n as f64 / 3.0).sqrt()).collect();
        let probs: Vec<f64> = (1..=5).map(|n| n as f64).collect();
        let c = build_constellation(&radii, &probs, 1, "disc").unwrap();
        let text = c.to_json_string().unwrap();
        let back = Constellation::from_json_str(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn json_rejects_inconsistent_power() {
        let c = build_constellation(&[1.0], &[1.0], 0, "x").unwrap();
        let text = c.to_json_string().unwrap().replace("\"avg_power\": 1.0", "\"avg_power\": 2.0");
        assert!(matches!(
            Constellation::from_json_str(&text),
            Err(Error::Validation(_))
        ));
    }
}
