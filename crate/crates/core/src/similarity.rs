//! Colour similarity and distance measures over RGB triples.
//!
//! Ten measures are supported. Seven behave as distances (zero for identical
//! inputs, growing with dissimilarity) and three as similarities (one for
//! identical inputs). [`signed_difference`] folds both families into a single
//! convention: fresh algae score near zero, aging algae increasingly negative.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An RGB colour as real-valued channels, normally within `[0, 255]`.
pub type Rgb = [f64; 3];

#[derive(Debug, Error, PartialEq)]
pub enum SimilarityError {
    /// The measure is undefined for the given inputs (zero vector for
    /// cosine/tanimoto, constant vector for pearson).
    #[error("measure undefined for input: {0}")]
    UndefinedMeasure(&'static str),
    /// Minkowski exponent below 1 breaks the triangle inequality.
    #[error("minkowski exponent must be >= 1, got {0}")]
    InvalidP(f64),
}

/// Measure selection, carrying the per-measure parameters.
///
/// `Kulczynski` divides by `min(a_i, b_i)` per channel; a pure-green control
/// patch zeroes two of those denominators, so values below `epsilon` are
/// replaced by `epsilon` and results against such inputs are large sentinel
/// magnitudes rather than errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    Euclidean,
    Manhattan,
    Cosine,
    Pearson,
    Hamming { quantization: u32 },
    BrayCurtis,
    Minkowski { p: f64 },
    Wasserstein,
    Tanimoto,
    Kulczynski { epsilon: f64 },
}

pub const DEFAULT_MINKOWSKI_P: f64 = 3.0;
pub const DEFAULT_HAMMING_QUANTIZATION: u32 = 1;
pub const DEFAULT_KULCZYNSKI_EPSILON: f64 = 1e-9;

/// The ten measures with their default parameters, in presentation order.
pub const ALL_MEASURES: [MeasureKind; 10] = [
    MeasureKind::Euclidean,
    MeasureKind::Manhattan,
    MeasureKind::Cosine,
    MeasureKind::Pearson,
    MeasureKind::Hamming {
        quantization: DEFAULT_HAMMING_QUANTIZATION,
    },
    MeasureKind::BrayCurtis,
    MeasureKind::Minkowski {
        p: DEFAULT_MINKOWSKI_P,
    },
    MeasureKind::Wasserstein,
    MeasureKind::Tanimoto,
    MeasureKind::Kulczynski {
        epsilon: DEFAULT_KULCZYNSKI_EPSILON,
    },
];

impl MeasureKind {
    /// Parse one of the ten lowercase measure names, with default parameters.
    pub fn from_name(name: &str) -> Option<Self> {
        ALL_MEASURES.iter().copied().find(|m| m.name() == name)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeasureKind::Euclidean => "euclidean",
            MeasureKind::Manhattan => "manhattan",
            MeasureKind::Cosine => "cosine",
            MeasureKind::Pearson => "pearson",
            MeasureKind::Hamming { .. } => "hamming",
            MeasureKind::BrayCurtis => "bray_curtis",
            MeasureKind::Minkowski { .. } => "minkowski",
            MeasureKind::Wasserstein => "wasserstein",
            MeasureKind::Tanimoto => "tanimoto",
            MeasureKind::Kulczynski { .. } => "kulczynski",
        }
    }

    /// Distance measures grow with dissimilarity; the other three
    /// (cosine, pearson, tanimoto) peak at 1 for identical inputs.
    pub fn is_distance(&self) -> bool {
        !matches!(
            self,
            MeasureKind::Cosine | MeasureKind::Pearson | MeasureKind::Tanimoto
        )
    }
}

/// A test-vs-control comparison folded onto a common orientation:
/// zero for fresh algae, increasingly negative as the culture ages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedDifference {
    pub value: f64,
    pub measure: MeasureKind,
}

fn dot(a: &Rgb, b: &Rgb) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm_sq(a: &Rgb) -> f64 {
    dot(a, a)
}

/// Evaluate `kind` on a pair of RGB triples.
pub fn measure(a: &Rgb, b: &Rgb, kind: MeasureKind) -> Result<f64, SimilarityError> {
    match kind {
        MeasureKind::Euclidean => Ok(norm_sq(&sub(a, b)).sqrt()),
        MeasureKind::Manhattan => Ok(sub(a, b).iter().map(|d| d.abs()).sum()),
        MeasureKind::Cosine => {
            let (na, nb) = (norm_sq(a), norm_sq(b));
            if na == 0.0 || nb == 0.0 {
                return Err(SimilarityError::UndefinedMeasure("zero vector for cosine"));
            }
            Ok(dot(a, b) / (na * nb).sqrt())
        }
        MeasureKind::Pearson => pearson(a, b),
        MeasureKind::Hamming { quantization } => {
            let q = quantization.max(1) as f64;
            let buckets = |v: &Rgb| v.map(|c| (c / q).round());
            let (qa, qb) = (buckets(a), buckets(b));
            Ok((0..3).filter(|&i| qa[i] != qb[i]).count() as f64)
        }
        MeasureKind::BrayCurtis => {
            let num: f64 = sub(a, b).iter().map(|d| d.abs()).sum();
            let den: f64 = (0..3).map(|i| a[i] + b[i]).sum();
            // Both all-zero: identical inputs, distance 0.
            Ok(if den == 0.0 { 0.0 } else { num / den })
        }
        MeasureKind::Minkowski { p } => {
            if p < 1.0 {
                return Err(SimilarityError::InvalidP(p));
            }
            let s: f64 = sub(a, b).iter().map(|d| d.abs().powf(p)).sum();
            Ok(s.powf(1.0 / p))
        }
        MeasureKind::Wasserstein => {
            // Each triple is read as an empirical distribution of its three
            // channel values; the 1D W1 distance is the mean absolute
            // difference of sorted values. Channel permutations are invisible
            // to this measure.
            let sorted = |v: &Rgb| {
                let mut s = *v;
                s.sort_by(|x, y| x.total_cmp(y));
                s
            };
            let (sa, sb) = (sorted(a), sorted(b));
            Ok((0..3).map(|i| (sa[i] - sb[i]).abs()).sum::<f64>() / 3.0)
        }
        MeasureKind::Tanimoto => {
            let d = dot(a, b);
            let den = norm_sq(a) + norm_sq(b) - d;
            if den == 0.0 {
                return Err(SimilarityError::UndefinedMeasure(
                    "zero vectors for tanimoto",
                ));
            }
            Ok(d / den)
        }
        MeasureKind::Kulczynski { epsilon } => {
            let eps = if epsilon > 0.0 {
                epsilon
            } else {
                DEFAULT_KULCZYNSKI_EPSILON
            };
            let s: f64 = (0..3)
                .map(|i| (a[i] - b[i]).abs() / a[i].min(b[i]).max(eps))
                .sum();
            Ok(s / 3.0)
        }
    }
}

fn sub(a: &Rgb, b: &Rgb) -> Rgb {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn pearson(a: &Rgb, b: &Rgb) -> Result<f64, SimilarityError> {
    let mean = |v: &Rgb| (v[0] + v[1] + v[2]) / 3.0;
    let (ma, mb) = (mean(a), mean(b));
    let ca = a.map(|x| x - ma);
    let cb = b.map(|x| x - mb);
    let (va, vb) = (norm_sq(&ca), norm_sq(&cb));
    if va == 0.0 || vb == 0.0 {
        return Err(SimilarityError::UndefinedMeasure(
            "constant vector for pearson",
        ));
    }
    Ok(dot(&ca, &cb) / (va * vb).sqrt())
}

/// Compare a test colour against the control colour under `kind`.
///
/// Distance-type measures are negated; similarity-type measures report
/// `s - 1`. Either way identical inputs give 0 and aging drives the value
/// negative with `|value|` growing with dissimilarity.
pub fn signed_difference(
    test: &Rgb,
    control: &Rgb,
    kind: MeasureKind,
) -> Result<SignedDifference, SimilarityError> {
    let m = measure(test, control, kind)?;
    let value = if kind.is_distance() { -m } else { m - 1.0 };
    Ok(SignedDifference {
        value,
        measure: kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GREEN: Rgb = [0.0, 255.0, 0.0];
    const RED: Rgb = [255.0, 0.0, 0.0];

    #[test]
    fn euclidean_two_channel_swap() {
        let d = measure(&GREEN, &RED, MeasureKind::Euclidean).unwrap();
        assert!((d - 255.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn manhattan_and_hamming() {
        assert_eq!(measure(&GREEN, &RED, MeasureKind::Manhattan).unwrap(), 510.0);
        let h = MeasureKind::Hamming { quantization: 1 };
        // B channel equal in both colours.
        assert_eq!(measure(&GREEN, &RED, h).unwrap(), 2.0);
    }

    #[test]
    fn cosine_parallel_and_orthogonal() {
        assert_eq!(measure(&GREEN, &GREEN, MeasureKind::Cosine).unwrap(), 1.0);
        assert_eq!(measure(&GREEN, &RED, MeasureKind::Cosine).unwrap(), 0.0);
    }

    #[test]
    fn bray_curtis_disjoint_supports() {
        assert_eq!(measure(&GREEN, &RED, MeasureKind::BrayCurtis).unwrap(), 1.0);
    }

    #[test]
    fn tanimoto_identity() {
        assert_eq!(measure(&GREEN, &GREEN, MeasureKind::Tanimoto).unwrap(), 1.0);
    }

    #[test]
    fn wasserstein_blind_to_channel_permutation() {
        // Sorted multisets are both {0, 0, 255}: equal distributions.
        assert_eq!(measure(&GREEN, &RED, MeasureKind::Wasserstein).unwrap(), 0.0);
        // Oracle: discrete CDFs over support {0, 255} are identical.
        let cdf_steps = |v: &Rgb, x: f64| v.iter().filter(|&&c| c <= x).count() as f64 / 3.0;
        for x in [0.0, 127.0, 255.0] {
            assert_eq!(cdf_steps(&GREEN, x), cdf_steps(&RED, x));
        }
    }

    #[test]
    fn minkowski_reduces_to_manhattan_and_euclidean() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a: Rgb = [(); 3].map(|_| rng.random_range(0.0..255.0));
            let b: Rgb = [(); 3].map(|_| rng.random_range(0.0..255.0));
            let m1 = measure(&a, &b, MeasureKind::Minkowski { p: 1.0 }).unwrap();
            let m2 = measure(&a, &b, MeasureKind::Minkowski { p: 2.0 }).unwrap();
            assert!((m1 - measure(&a, &b, MeasureKind::Manhattan).unwrap()).abs() < 1e-9);
            assert!((m2 - measure(&a, &b, MeasureKind::Euclidean).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn minkowski_rejects_p_below_one() {
        assert_eq!(
            measure(&GREEN, &RED, MeasureKind::Minkowski { p: 0.5 }),
            Err(SimilarityError::InvalidP(0.5))
        );
    }

    #[test]
    fn kulczynski_guard_keeps_result_finite() {
        let k = MeasureKind::Kulczynski { epsilon: 1e-9 };
        let v = measure(&[10.0, 250.0, 5.0], &GREEN, k).unwrap();
        assert!(v.is_finite());
        // Two channels divide by the epsilon sentinel.
        let expected = (10.0 / 1e-9 + 5.0 / 250.0 + 5.0 / 1e-9) / 3.0;
        assert!((v - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn undefined_inputs_are_rejected() {
        let zero: Rgb = [0.0; 3];
        assert!(measure(&zero, &GREEN, MeasureKind::Cosine).is_err());
        assert!(measure(&zero, &zero, MeasureKind::Tanimoto).is_err());
        assert!(measure(&[7.0; 3], &GREEN, MeasureKind::Pearson).is_err());
    }

    #[test]
    fn signed_difference_convention() {
        let d = signed_difference(&GREEN, &GREEN, MeasureKind::Euclidean).unwrap();
        assert_eq!(d.value, 0.0);
        let d = signed_difference(&[200.0, 30.0, 30.0], &GREEN, MeasureKind::Euclidean).unwrap();
        assert!(d.value < 0.0);
        let d = signed_difference(&GREEN, &GREEN, MeasureKind::Cosine).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn names_round_trip() {
        for m in ALL_MEASURES {
            assert_eq!(MeasureKind::from_name(m.name()), Some(m));
        }
        assert_eq!(MeasureKind::from_name("chebyshev"), None);
    }
}
