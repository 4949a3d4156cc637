use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use thiserror::Error;

use crate::detect::Status;

/// Below this many samples the mean interval uses Student's t.
pub const NORMAL_APPROX_MIN: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    Normal,
    StudentT,
    /// A single sample; the interval collapses to the point.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Aggregate of one battery. Query statistics cover Found trials only;
/// censored trials are counted, never averaged in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: usize,
    pub found: usize,
    pub exhausted: usize,
    pub budget_exceeded: usize,
    pub invalid_witnesses: usize,
    pub samples: Vec<u64>,
    /// `None` when there were no trials.
    pub success_rate: Option<f64>,
    pub success_ci95: Option<Interval>,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub ci95: Option<Interval>,
    pub ci_method: Option<CiMethod>,
}

impl TrialStats {
    /// `outcomes` holds `(status, queries, witness valid)` per trial.
    pub fn from_outcomes(outcomes: impl IntoIterator<Item = (Status, u64, bool)>) -> Self {
        let mut s = TrialStats {
            trials: 0,
            found: 0,
            exhausted: 0,
            budget_exceeded: 0,
            invalid_witnesses: 0,
            samples: Vec::new(),
            success_rate: None,
            success_ci95: None,
            mean: None,
            stderr: None,
            ci95: None,
            ci_method: None,
        };
        for (status, q, valid) in outcomes {
            s.trials += 1;
            match status {
                Status::Found if valid => {
                    s.found += 1;
                    s.samples.push(q);
                }
                Status::Found => s.invalid_witnesses += 1,
                Status::Exhausted => s.exhausted += 1,
                Status::BudgetExceeded => s.budget_exceeded += 1,
            }
        }
        if s.trials > 0 {
            s.success_rate = Some(s.found as f64 / s.trials as f64);
            s.success_ci95 = Some(wilson(s.found as u64, s.trials as u64, 0.95));
        }
        if let Some(m) = MeanSummary::of(&s.samples) {
            s.mean = Some(m.mean);
            s.stderr = Some(m.stderr);
            s.ci95 = Some(m.ci95);
            s.ci_method = Some(m.method);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSummary {
    pub mean: f64,
    pub stderr: f64,
    pub ci95: Interval,
    pub method: CiMethod,
}

impl MeanSummary {
    pub fn of(samples: &[u64]) -> Option<Self> {
        let k = samples.len();
        if k == 0 {
            return None;
        }
        let kf = k as f64;
        let mean = samples.iter().map(|&x| x as f64).sum::<f64>() / kf;
        if k == 1 {
            return Some(MeanSummary {
                mean,
                stderr: 0.0,
                ci95: Interval { lo: mean, hi: mean },
                method: CiMethod::Degenerate,
            });
        }
        let var = samples.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (kf - 1.0);
        let stderr = (var / kf).sqrt();
        let (q, method) = if k >= NORMAL_APPROX_MIN {
            (normal_quantile(0.975), CiMethod::Normal)
        } else {
            let t = StudentsT::new(0.0, 1.0, kf - 1.0).expect("positive degrees of freedom");
            (t.inverse_cdf(0.975), CiMethod::StudentT)
        };
        Some(MeanSummary {
            mean,
            stderr,
            ci95: Interval {
                lo: mean - q * stderr,
                hi: mean + q * stderr,
            },
            method,
        })
    }
}

fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(p)
}

/// Wilson score interval for `successes` out of `trials` at two-sided
/// `confidence`.
pub fn wilson(successes: u64, trials: u64, confidence: f64) -> Interval {
    assert!(trials > 0 && successes <= trials);
    let z = normal_quantile(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        lo: if successes == 0 { 0.0 } else { (center - half).max(0.0) },
        hi: if successes == trials { 1.0 } else { (center + half).min(1.0) },
    }
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r2: f64,
    pub points: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("x values span a factor of {span:.3}; at least 4 (two octaves) is required")]
    NarrowSpread { span: f64 },
    #[error("all x values coincide")]
    Degenerate,
    #[error("non-positive value in a log-log fit")]
    NonPositive,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit, FitError> {
    let k = points.len();
    if k < 2 {
        return Err(FitError::TooFewPoints { need: 2, got: k });
    }
    let kf = k as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / kf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= f64::EPSILON * kf * mx.abs().max(1.0) {
        return Err(FitError::Degenerate);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let slope_stderr = if k > 2 {
        (sse / (kf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        r2,
        points: k,
    })
}

/// Growth exponent: least squares on `(ln n, ln y)`. Needs three points
/// spanning at least two octaves of `n`.
pub fn slope_fit(points: &[(f64, f64)]) -> Result<LinearFit, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints {
            need: 3,
            got: points.len(),
        });
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(FitError::NonPositive);
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi / lo < 4.0 {
        return Err(FitError::NarrowSpread { span: hi / lo });
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    linear_fit(&logs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let pts: Vec<(f64, f64)> = (10..=18).step_by(2).map(|e| {
            let n = (1u64 << e) as f64;
            (n, n.powf(0.75))
        }).collect();
        let fit = slope_fit(&pts).unwrap();
        assert!((fit.slope - 0.75).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-9);
        let pts: Vec<(f64, f64)> = [1e3, 1e4, 1e5].iter().map(|&n| (n, 7.0 * n)).collect();
        let fit = slope_fit(&pts).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn fit_preconditions() {
        assert!(matches!(slope_fit(&[(1.0, 1.0), (8.0, 2.0)]), Err(FitError::TooFewPoints { .. })));
        assert!(matches!(
            slope_fit(&[(10.0, 1.0), (12.0, 2.0), (15.0, 3.0)]),
            Err(FitError::NarrowSpread { .. })
        ));
    }

    #[test]
    fn empty_and_single() {
        let s = TrialStats::from_outcomes(std::iter::empty());
        assert_eq!((s.trials, s.success_rate, s.mean), (0, None, None));
        let s = TrialStats::from_outcomes([(Status::Found, 17, true)]);
        assert_eq!(s.mean, Some(17.0));
        assert!(s.ci95.unwrap().contains(17.0));
    }

    #[test]
    fn wilson_reference_values() {
        // 81/263 at 95%: (0.2553, 0.3662), a textbook example
        let w = wilson(81, 263, 0.95);
        assert!((w.lo - 0.2553).abs() < 5e-4 && (w.hi - 0.3662).abs() < 5e-4, "{w:?}");
        let w = wilson(0, 10, 0.95);
        assert_eq!(w.lo, 0.0);
    }
}
