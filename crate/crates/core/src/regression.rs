//! Polynomial least-squares fitting of signed colour difference against
//! culture age, model inversion for age estimation, and replacement alerts.
//!
//! Degrees are capped at 3. Fitting solves the normal equations on a scaled
//! day variable (days divided by the largest day magnitude) for conditioning
//! and rescales the coefficients back to raw days.
//!
//! Two correlation figures appear here and they are not the same thing:
//! [`RegressionModel::pearson_rho`] is the correlation between day and the
//! observed difference (negative for an aging culture), while [`goodness`]
//! correlates predicted against observed values (positive for a good fit).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::similarity::MeasureKind;

#[derive(Debug, Error, PartialEq)]
pub enum RegressionError {
    #[error("need at least {needed} observations for degree {degree}, got {got}")]
    InsufficientData {
        degree: usize,
        needed: usize,
        got: usize,
    },
    /// Fewer distinct days than coefficients; the normal equations are rank
    /// deficient.
    #[error("singular system: fewer than {needed} distinct day values")]
    SingularSystem { needed: usize },
    /// Correlation statistics are undefined (constant observations or
    /// constant predictions). When the predictions are constant at the mean
    /// of the observations, R-squared is still well defined and equals 0;
    /// it is carried in the error for callers that want it.
    #[error("goodness of fit undefined: {reason}")]
    UndefinedGoodness {
        reason: &'static str,
        r_squared: Option<f64>,
    },
    /// The observed difference is never attained by the model inside its day
    /// domain; extrapolation is refused.
    #[error("no day in [{lo}, {hi}] reproduces difference {observed}")]
    OutOfRange { observed: f64, lo: f64, hi: f64 },
}

/// A fitted polynomial `difference = p(day)` with its fitting-set statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub measure: MeasureKind,
    pub degree: usize,
    /// Ascending powers: `c0 + c1 d + ... + c_degree d^degree`.
    pub coefficients: Vec<f64>,
    /// `[day_min, day_max]` of the fitting set; inversion stays inside it.
    pub day_domain: [f64; 2],
    /// Pearson correlation between day and observed difference.
    #[serde(rename = "rho")]
    pub pearson_rho: f64,
    /// `1 - SS_res / SS_tot` on the fitting set.
    #[serde(rename = "r2")]
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Goodness {
    /// Pearson correlation between predicted and observed differences.
    pub pearson_rho: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeEstimate {
    pub day: f64,
    /// The model attains the observed difference more than once in-domain;
    /// `day` is then the smallest such root.
    pub multiple_roots: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlertMode {
    ByDifference,
    ByEstimatedDay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlertPolicy {
    /// On `|difference|` in `by_difference` mode, on estimated day otherwise.
    pub threshold: f64,
    pub mode: AlertMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlertDecision {
    pub alert: bool,
    pub estimated_day: Option<f64>,
    pub message: String,
}

impl RegressionModel {
    pub fn predict(&self, day: f64) -> f64 {
        // Horner evaluation.
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * day + c)
    }
}

/// Pearson correlation of two equal-length slices, `None` if either side is
/// constant or fewer than two points are given.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation with average ranks on ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    pearson(&ranks(x), &ranks(y))
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        // 1-based average rank over the tie run [i, j].
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Ordinary least-squares polynomial fit of `(day, signed_difference)` pairs.
pub fn fit(
    observations: &[(f64, f64)],
    degree: usize,
    measure: MeasureKind,
) -> Result<RegressionModel, RegressionError> {
    assert!((1..=3).contains(&degree), "degree must be 1, 2, or 3");
    let needed = degree + 1;
    if observations.len() < needed {
        return Err(RegressionError::InsufficientData {
            degree,
            needed,
            got: observations.len(),
        });
    }
    let mut distinct: Vec<f64> = observations.iter().map(|o| o.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < needed {
        return Err(RegressionError::SingularSystem { needed });
    }

    let scale = observations
        .iter()
        .map(|o| o.0.abs())
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let n = needed;
    let mut ata = DMatrix::<f64>::zeros(n, n);
    let mut aty = DVector::<f64>::zeros(n);
    for &(day, y) in observations {
        let t = day / scale;
        let mut powers = [1.0; 4];
        for k in 1..n {
            powers[k] = powers[k - 1] * t;
        }
        for r in 0..n {
            aty[r] += powers[r] * y;
            for c in 0..n {
                ata[(r, c)] += powers[r] * powers[c];
            }
        }
    }
    let solved = ata
        .lu()
        .solve(&aty)
        .filter(|b| b.iter().all(|c| c.is_finite()))
        .ok_or(RegressionError::SingularSystem { needed })?;
    let coefficients: Vec<f64> = solved
        .iter()
        .enumerate()
        .map(|(k, &b)| b / scale.powi(k as i32))
        .collect();

    let days: Vec<f64> = observations.iter().map(|o| o.0).collect();
    let ys: Vec<f64> = observations.iter().map(|o| o.1).collect();
    let day_domain = [
        days.iter().copied().fold(f64::INFINITY, f64::min),
        days.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    ];
    let mut model = RegressionModel {
        measure,
        degree,
        coefficients,
        day_domain,
        pearson_rho: 0.0,
        r_squared: 0.0,
    };
    model.pearson_rho = pearson(&days, &ys).ok_or(RegressionError::UndefinedGoodness {
        reason: "constant observations",
        r_squared: None,
    })?;
    model.r_squared = r_squared_on(&model, observations).expect("non-constant observations");
    Ok(model)
}

fn r_squared_on(model: &RegressionModel, observations: &[(f64, f64)]) -> Option<f64> {
    let n = observations.len() as f64;
    let mean_y = observations.iter().map(|o| o.1).sum::<f64>() / n;
    let ss_tot: f64 = observations.iter().map(|o| (o.1 - mean_y).powi(2)).sum();
    if ss_tot == 0.0 {
        return None;
    }
    let ss_res: f64 = observations
        .iter()
        .map(|o| (o.1 - model.predict(o.0)).powi(2))
        .sum();
    // Clamp tiny negative excursions from cancellation.
    Some((1.0 - ss_res / ss_tot).clamp(0.0, 1.0))
}

/// Fit quality of `model` on `observations`: correlation of predicted vs
/// observed plus R-squared.
pub fn goodness(
    model: &RegressionModel,
    observations: &[(f64, f64)],
) -> Result<Goodness, RegressionError> {
    let r_squared = r_squared_on(model, observations).ok_or({
        RegressionError::UndefinedGoodness {
            reason: "constant observations",
            r_squared: None,
        }
    })?;
    let predicted: Vec<f64> = observations.iter().map(|o| model.predict(o.0)).collect();
    let observed: Vec<f64> = observations.iter().map(|o| o.1).collect();
    let pearson_rho =
        pearson(&predicted, &observed).ok_or(RegressionError::UndefinedGoodness {
            reason: "constant predictions",
            r_squared: Some(r_squared),
        })?;
    Ok(Goodness {
        pearson_rho,
        r_squared,
    })
}

/// Invert the model: find the day inside `day_domain` whose predicted
/// difference equals `observed_difference`.
///
/// The domain is scanned on a fine grid for bracketing intervals, each
/// refined by bisection to 1e-9 days. With several in-domain roots the
/// smallest is returned and `multiple_roots` set.
pub fn estimate_age(
    model: &RegressionModel,
    observed_difference: f64,
) -> Result<AgeEstimate, RegressionError> {
    let [lo, hi] = model.day_domain;
    let f = |d: f64| model.predict(d) - observed_difference;
    const STEPS: usize = 4096;
    let width = hi - lo;
    let mut roots: Vec<f64> = Vec::new();
    let mut prev_d = lo;
    let mut prev_f = f(lo);
    if prev_f == 0.0 {
        roots.push(lo);
    }
    for i in 1..=STEPS {
        let d = if i == STEPS {
            hi
        } else {
            lo + width * i as f64 / STEPS as f64
        };
        let fd = f(d);
        if fd == 0.0 {
            roots.push(d);
        } else if prev_f != 0.0 && (prev_f < 0.0) != (fd < 0.0) {
            roots.push(bisect(&f, prev_d, d));
        }
        prev_d = d;
        prev_f = fd;
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    match roots.first() {
        None => Err(RegressionError::OutOfRange {
            observed: observed_difference,
            lo,
            hi,
        }),
        Some(&day) => Ok(AgeEstimate {
            day,
            multiple_roots: roots.len() > 1,
        }),
    }
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo < 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (flo < 0.0) != (fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// Decide whether the observation warrants a replacement alert.
///
/// `by_difference` compares `|observed_difference|` against the threshold and
/// attaches an age estimate when one exists; `by_estimated_day` requires the
/// inversion to succeed and compares the estimated day.
pub fn check_alert(
    policy: &AlertPolicy,
    model: &RegressionModel,
    observed_difference: f64,
) -> Result<AlertDecision, RegressionError> {
    assert!(policy.threshold > 0.0, "alert threshold must be positive");
    match policy.mode {
        AlertMode::ByDifference => {
            let alert = observed_difference.abs() >= policy.threshold;
            let estimated_day = estimate_age(model, observed_difference).ok().map(|e| e.day);
            let message = if alert {
                format!(
                    "|difference| {:.3} >= threshold {:.3}: replace algae",
                    observed_difference.abs(),
                    policy.threshold
                )
            } else {
                format!(
                    "|difference| {:.3} below threshold {:.3}: culture healthy",
                    observed_difference.abs(),
                    policy.threshold
                )
            };
            Ok(AlertDecision {
                alert,
                estimated_day,
                message,
            })
        }
        AlertMode::ByEstimatedDay => {
            let estimate = estimate_age(model, observed_difference)?;
            let alert = estimate.day >= policy.threshold;
            let message = if alert {
                format!(
                    "estimated age {:.2} days >= threshold {:.2}: replace algae",
                    estimate.day, policy.threshold
                )
            } else {
                format!(
                    "estimated age {:.2} days below threshold {:.2}: culture healthy",
                    estimate.day, policy.threshold
                )
            };
            Ok(AlertDecision {
                alert,
                estimated_day: Some(estimate.day),
                message,
            })
        }
    }
}

/// Pick the best of several fitted models: highest R-squared, with a lower
/// degree winning whenever it comes within 0.01 of the best.
pub fn select_model(models: &[RegressionModel]) -> Option<&RegressionModel> {
    let best_r2 = models
        .iter()
        .map(|m| m.r_squared)
        .fold(f64::NEG_INFINITY, f64::max);
    models
        .iter()
        .filter(|m| m.r_squared >= best_r2 - 0.01)
        .min_by(|a, b| {
            a.degree
                .cmp(&b.degree)
                .then(b.r_squared.total_cmp(&a.r_squared))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    const M: MeasureKind = MeasureKind::Euclidean;

    #[test]
    fn exact_line() {
        let obs = [(0.0, 0.0), (1.0, -2.0), (2.0, -4.0)];
        let m = fit(&obs, 1, M).unwrap();
        assert!((m.coefficients[0]).abs() < 1e-9);
        assert!((m.coefficients[1] + 2.0).abs() < 1e-9);
        assert!((m.pearson_rho + 1.0).abs() < 1e-12);
        assert!((m.r_squared - 1.0).abs() < 1e-12);
        // Fit quality correlates predicted with observed: +1 on an exact fit.
        let g = goodness(&m, &obs).unwrap();
        assert!((g.pearson_rho - 1.0).abs() < 1e-12);
        assert!((g.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nested_model_recovers_zero_high_coefficient() {
        let obs = [(0.0, 0.0), (1.0, -2.0), (2.0, -4.0), (3.0, -6.0)];
        let m = fit(&obs, 2, M).unwrap();
        assert!(m.coefficients[2].abs() < 1e-9);
    }

    #[test]
    fn noisy_quadratic_recovery() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        for seed in 0..20u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let noise = Normal::new(0.0, 0.5).unwrap();
            let obs: Vec<(f64, f64)> = (0..=30)
                .map(|d| {
                    let d = d as f64;
                    (d, -0.1 * d * d + noise.sample(&mut rng))
                })
                .collect();
            let m = fit(&obs, 2, M).unwrap();
            assert!(
                (-0.13..=-0.07).contains(&m.coefficients[2]),
                "seed {seed}: c2 = {}",
                m.coefficients[2]
            );
        }
    }

    #[test]
    fn insufficient_and_singular() {
        assert_eq!(
            fit(&[(0.0, 0.0), (1.0, 1.0)], 2, M),
            Err(RegressionError::InsufficientData {
                degree: 2,
                needed: 3,
                got: 2
            })
        );
        let same_day = [(5.0, 0.0), (5.0, -1.0), (5.0, -2.0)];
        assert_eq!(
            fit(&same_day, 1, M),
            Err(RegressionError::SingularSystem { needed: 2 })
        );
    }

    #[test]
    fn goodness_constant_predictions() {
        // Symmetric V shape: the best line is flat at the mean, so R² is 0
        // and the prediction-observation correlation is undefined.
        let obs = [(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)];
        let m = fit(&obs, 1, M).unwrap();
        assert!(m.coefficients[1].abs() < 1e-9);
        match goodness(&m, &obs) {
            Err(RegressionError::UndefinedGoodness { r_squared, .. }) => {
                assert!((r_squared.unwrap() - 0.0).abs() < 1e-12);
            }
            other => panic!("expected UndefinedGoodness, got {other:?}"),
        }
    }

    #[test]
    fn goodness_constant_observations() {
        let m = fit(&[(0.0, 0.0), (1.0, -1.0)], 1, M).unwrap();
        let constant = [(0.0, -3.0), (1.0, -3.0)];
        assert!(matches!(
            goodness(&m, &constant),
            Err(RegressionError::UndefinedGoodness {
                reason: "constant observations",
                ..
            })
        ));
    }

    #[test]
    fn anticorrelated_goodness() {
        // Model predicting the negation of zero-mean observations.
        let obs = [(0.0, -1.0), (1.0, 0.0), (2.0, 1.0)];
        let m = RegressionModel {
            measure: M,
            degree: 1,
            coefficients: vec![1.0, -1.0],
            day_domain: [0.0, 2.0],
            pearson_rho: 0.0,
            r_squared: 0.0,
        };
        let g = goodness(&m, &obs);
        match g {
            Ok(g) => assert!((g.pearson_rho + 1.0).abs() < 1e-12),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn estimate_age_linear_and_quadratic() {
        let linear = fit(&[(0.0, 0.0), (5.0, -10.0), (10.0, -20.0)], 1, M).unwrap();
        let e = estimate_age(&linear, -5.0).unwrap();
        assert!((e.day - 2.5).abs() < 1e-7);
        assert!(!e.multiple_roots);

        let quad = fit(&[(0.0, 0.0), (5.0, -2.5), (10.0, -10.0)], 2, M).unwrap();
        let e = estimate_age(&quad, -2.5).unwrap();
        assert!((e.day - 5.0).abs() < 1e-7);

        assert!(matches!(
            estimate_age(&quad, 1.0),
            Err(RegressionError::OutOfRange { .. })
        ));
    }

    #[test]
    fn estimate_age_multiple_roots_takes_smallest() {
        // Parabola dipping and returning: -(d-1)(d-3) = -d^2 + 4d - 3.
        let m = RegressionModel {
            measure: M,
            degree: 2,
            coefficients: vec![-3.0, 4.0, -1.0],
            day_domain: [0.0, 4.0],
            pearson_rho: 0.0,
            r_squared: 0.0,
        };
        let e = estimate_age(&m, 0.0).unwrap();
        assert!((e.day - 1.0).abs() < 1e-7);
        assert!(e.multiple_roots);
    }

    #[test]
    fn alerts() {
        let model = fit(&[(0.0, 0.0), (15.0, -150.0), (30.0, -300.0)], 1, M).unwrap();
        let by_diff = AlertPolicy {
            threshold: 100.0,
            mode: AlertMode::ByDifference,
        };
        assert!(!check_alert(&by_diff, &model, -3.0).unwrap().alert);
        assert!(check_alert(&by_diff, &model, -150.0).unwrap().alert);

        let by_day = AlertPolicy {
            threshold: 20.0,
            mode: AlertMode::ByEstimatedDay,
        };
        let d = check_alert(&by_day, &model, -250.0).unwrap();
        assert!(d.alert);
        assert!((d.estimated_day.unwrap() - 25.0).abs() < 1e-6);
    }

    #[test]
    fn selection_prefers_parsimony_within_window() {
        let mk = |degree: usize, r2: f64| RegressionModel {
            measure: M,
            degree,
            coefficients: vec![0.0; degree + 1],
            day_domain: [0.0, 1.0],
            pearson_rho: 0.0,
            r_squared: r2,
        };
        let models = vec![mk(1, 0.991), mk(2, 0.998), mk(3, 0.999)];
        assert_eq!(select_model(&models).unwrap().degree, 1);
        let models = vec![mk(1, 0.85), mk(2, 0.998), mk(3, 0.999)];
        assert_eq!(select_model(&models).unwrap().degree, 2);
    }

    #[test]
    fn coefficients_stable_under_reordering() {
        let mut obs = vec![
            (0.0, -0.3),
            (3.0, -2.9),
            (6.0, -7.1),
            (9.0, -13.2),
            (12.0, -20.8),
        ];
        let a = fit(&obs, 2, M).unwrap();
        obs.reverse();
        obs.swap(1, 3);
        let b = fit(&obs, 2, M).unwrap();
        for (ca, cb) in a.coefficients.iter().zip(&b.coefficients) {
            assert!((ca - cb).abs() < 1e-9);
        }
    }

    #[test]
    fn degree_nesting_r_squared() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let obs: Vec<(f64, f64)> = (0..12)
                .map(|d| (d as f64, rng.random_range(-10.0..0.0)))
                .collect();
            let r: Vec<f64> = (1..=3)
                .map(|deg| fit(&obs, deg, M).unwrap().r_squared)
                .collect();
            assert!(r[1] >= r[0] - 1e-9, "quadratic {} < linear {}", r[1], r[0]);
            assert!(r[2] >= r[1] - 1e-9, "cubic {} < quadratic {}", r[2], r[1]);
        }
    }

    #[test]
    fn round_trip_inversion_on_monotone_fit() {
        let obs: Vec<(f64, f64)> = (0..=30).map(|d| (d as f64, -0.25 * d as f64)).collect();
        let m = fit(&obs, 1, M).unwrap();
        for i in 0..=20 {
            let d_star = 30.0 * i as f64 / 20.0;
            let e = estimate_age(&m, m.predict(d_star)).unwrap();
            assert!((e.day - d_star).abs() < 1e-6, "d* {d_star} -> {}", e.day);
        }
    }

    #[test]
    fn spearman_ranks_with_ties() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [10.0, 20.0, 30.0, 40.0];
        assert!((spearman(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let y_desc = [4.0, 3.0, 2.0, 1.0];
        assert!((spearman(&x, &y_desc).unwrap() + 1.0).abs() < 1e-12);
        // Ties get average ranks and keep the statistic defined.
        let y_tied = [1.0, 1.0, 2.0, 3.0];
        assert!(spearman(&x, &y_tied).unwrap() > 0.9);
    }

    #[test]
    fn model_json_round_trip() {
        let m = fit(&[(0.0, 0.0), (1.0, -2.0), (2.0, -4.0)], 1, M).unwrap();
        let js = serde_json::to_string(&m).unwrap();
        assert!(js.contains("\"rho\""));
        assert!(js.contains("\"r2\""));
        let back: RegressionModel = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
    }
}
