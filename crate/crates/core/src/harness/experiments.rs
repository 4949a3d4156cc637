//! Batteries that compare a certificate-holding detector with a
//! certificate-free one: across numbers of scales at fixed `n`, or across
//! `n` as growth exponents.

use log::warn;
use serde::{Deserialize, Serialize};

use super::registry::{DetectorSpec, GeneratorSpec};
use super::report::{config_hash, ResultRow};
use super::stats::{linear_fit, slope_fit, LinearFit, TrialStats};
use super::trials::{run_trials, TrialConfig, TrialRun};
use super::HarnessError;
use crate::detect::WalkMemory;
use crate::gen::ScaleParams;
use crate::rng::derive_seed;

/// Stated in every report header.
pub const ASSUMPTIONS: [&str; 3] = [
    "each trial relabels its instance with a fresh uniform permutation; every detector here is \
     label-symmetric, so the maximum over relabelings equals the average measured",
    "query means are over trials that found a witness; exhausted and budget-censored trials are \
     counted separately",
    "the certificate column is the cost of one specific certificate algorithm and so only bounds \
     the certificate complexity from above",
];

fn fifty() -> f64 {
    50.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationConfig {
    pub n: usize,
    /// Scale parameters; `i_max` is replaced by `i_min + s - 1` for each `s`.
    pub params: ScaleParams,
    pub scale_counts: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub memory: WalkMemory,
    /// The certificate-free budget, in multiples of the certificate mean.
    #[serde(default = "fifty")]
    pub budget_factor: f64,
    #[serde(default = "yes")]
    pub fresh_instance_per_trial: bool,
    /// Split the trials evenly over the possible good scales instead of
    /// drawing the good scale per instance. The target (the mean over a
    /// uniform good scale) is unchanged; the sampling noise of the scale mix
    /// is removed.
    #[serde(default)]
    pub stratified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub s: usize,
    pub i_min: u32,
    pub i_max: u32,
    pub cert_mean: f64,
    pub nocert_mean: f64,
    pub ratio: f64,
    pub nocert_budget: u64,
    pub cert: TrialStats,
    pub nocert: TrialStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub at: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub config_hash: String,
    pub assumptions: Vec<String>,
    pub n: usize,
    pub rows: Vec<SeparationRow>,
    /// Ratio against `s`.
    pub fit: Option<LinearFit>,
    pub skipped: Vec<Skipped>,
    #[serde(skip)]
    pub results: Vec<ResultRow>,
}

fn rows_of(hash: &str, run: &TrialRun, gen: &GeneratorSpec, det: &DetectorSpec, s: usize) -> Vec<ResultRow> {
    run.records
        .iter()
        .map(|r| ResultRow {
            config_hash: hash.to_string(),
            generator: gen.id().to_string(),
            detector: det.id().to_string(),
            n: gen.n(),
            s,
            trial: r.trial,
            seed: r.seed,
            status: r.status,
            queries: r.queries,
        })
        .collect()
}

/// One battery of `cfg.trials` runs, stratified over the good scale if asked.
fn run_battery(
    cfg: &SeparationConfig,
    generator: &GeneratorSpec,
    detector: &DetectorSpec,
    budget: Option<u64>,
) -> Result<TrialRun, HarnessError> {
    let base = TrialConfig {
        generator: generator.clone(),
        detector: detector.clone(),
        trials: cfg.trials,
        seed: cfg.seed,
        budget,
        fresh_instance_per_trial: cfg.fresh_instance_per_trial,
        corrupt: false,
    };
    let GeneratorSpec::CollisionFn { n, params } = generator else {
        unreachable!("separation batteries use the collision construction")
    };
    if !cfg.stratified {
        return run_trials(&base);
    }
    let per = cfg.trials.div_ceil(params.num_scales());
    let mut records = Vec::new();
    for t in params.scales() {
        let mut p = params.clone();
        p.good_index = Some(t);
        let tc = TrialConfig {
            generator: GeneratorSpec::CollisionFn { n: *n, params: p },
            trials: per,
            seed: derive_seed(cfg.seed, t as u64),
            ..base.clone()
        };
        for mut r in run_trials(&tc)?.records {
            r.trial = records.len();
            records.push(r);
        }
    }
    Ok(TrialRun::from_records(records))
}

/// For each `s`, runs the certificate search (told the good scale) and the
/// multi-scale search (told only the window) on the same seeded instances
/// and relabelings, and fits their mean-cost ratio against `s`.
pub fn separation_experiment(cfg: &SeparationConfig) -> Result<SeparationReport, HarnessError> {
    let hash = config_hash(cfg);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut results = Vec::new();
    for &s in &cfg.scale_counts {
        if s == 0 {
            skipped.push(Skipped {
                at: s,
                reason: "zero scales".into(),
            });
            continue;
        }
        let mut params = cfg.params.clone();
        params.i_max = params.i_min + s as u32 - 1;
        let generator = GeneratorSpec::CollisionFn { n: cfg.n, params };
        let cert_det = DetectorSpec::CertCollision { memory: cfg.memory };
        let cert = match run_battery(cfg, &generator, &cert_det, None) {
            Ok(run) => run,
            Err(HarnessError::Gen(e)) => {
                warn!("s = {s} skipped: {e}");
                skipped.push(Skipped {
                    at: s,
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let Some(cert_mean) = cert.stats.mean else {
            skipped.push(Skipped {
                at: s,
                reason: "the certificate search never succeeded".into(),
            });
            continue;
        };
        let budget = (cfg.budget_factor * cert_mean).ceil() as u64;
        let multi_det = DetectorSpec::Multiscale {
            i_min: cfg.params.i_min,
            i_max: cfg.params.i_min + s as u32 - 1,
            memory: cfg.memory,
        };
        let multi = run_battery(cfg, &generator, &multi_det, Some(budget))?;
        let Some(nocert_mean) = multi.stats.mean else {
            skipped.push(Skipped {
                at: s,
                reason: "the multi-scale search never succeeded within budget".into(),
            });
            continue;
        };
        results.extend(rows_of(&hash, &cert, &generator, &cert_det, s));
        results.extend(rows_of(&hash, &multi, &generator, &multi_det, s));
        rows.push(SeparationRow {
            s,
            i_min: cfg.params.i_min,
            i_max: cfg.params.i_min + s as u32 - 1,
            cert_mean,
            nocert_mean,
            ratio: nocert_mean / cert_mean,
            nocert_budget: budget,
            cert: cert.stats,
            nocert: multi.stats,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.s as f64, r.ratio)).collect();
    Ok(SeparationReport {
        config_hash: hash,
        assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
        n: cfg.n,
        rows,
        fit: linear_fit(&pts).ok(),
        skipped,
        results,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeConfig {
    /// The construction; its `n` is replaced by each entry of `sizes`.
    pub generator: GeneratorSpec,
    /// Certificate detector first, baseline second, by convention.
    pub detectors: Vec<DetectorSpec>,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default = "yes")]
    pub fresh_instance_per_trial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub n: usize,
    pub detector: String,
    pub mean: Option<f64>,
    pub stats: TrialStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeSeries {
    pub detector: String,
    pub fit: Option<LinearFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub n: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub config_hash: String,
    pub assumptions: Vec<String>,
    pub rows: Vec<SlopeRow>,
    pub series: Vec<SlopeSeries>,
    /// Last detector's mean over the first detector's, per size.
    pub ratios: Vec<RatioPoint>,
    pub skipped: Vec<Skipped>,
    #[serde(skip)]
    pub results: Vec<ResultRow>,
}

/// Mean cost of each detector at each size, with log-log slopes.
pub fn slope_experiment(cfg: &SlopeConfig) -> Result<SlopeReport, HarnessError> {
    let hash = config_hash(cfg);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut results = Vec::new();
    for &n in &cfg.sizes {
        let generator = cfg.generator.with_n(n);
        let mut at_n = Vec::new();
        for det in &cfg.detectors {
            let tc = TrialConfig {
                generator: generator.clone(),
                detector: det.clone(),
                trials: cfg.trials,
                seed: cfg.seed,
                budget: cfg.budget,
                fresh_instance_per_trial: cfg.fresh_instance_per_trial,
                corrupt: false,
            };
            match run_trials(&tc) {
                Ok(run) => {
                    results.extend(rows_of(&hash, &run, &generator, det, 1));
                    at_n.push(SlopeRow {
                        n,
                        detector: det.id().to_string(),
                        mean: run.stats.mean,
                        stats: run.stats,
                    });
                }
                Err(HarnessError::Gen(e)) => {
                    warn!("n = {n} skipped: {e}");
                    skipped.push(Skipped {
                        at: n,
                        reason: e.to_string(),
                    });
                    at_n.clear();
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        rows.extend(at_n);
    }
    let series = cfg
        .detectors
        .iter()
        .map(|det| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.detector == det.id())
                .filter_map(|r| r.mean.map(|m| (r.n as f64, m)))
                .collect();
            match slope_fit(&pts) {
                Ok(fit) => SlopeSeries {
                    detector: det.id().to_string(),
                    fit: Some(fit),
                    fit_error: None,
                },
                Err(e) => SlopeSeries {
                    detector: det.id().to_string(),
                    fit: None,
                    fit_error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut ratios = Vec::new();
    if let (Some(first), Some(last)) = (cfg.detectors.first(), cfg.detectors.last()) {
        for &n in &cfg.sizes {
            let mean_of = |id: &str| rows.iter().find(|r| r.n == n && r.detector == id).and_then(|r| r.mean);
            if let (Some(a), Some(b)) = (mean_of(first.id()), mean_of(last.id())) {
                ratios.push(RatioPoint { n, ratio: b / a });
            }
        }
    }
    Ok(SlopeReport {
        config_hash: hash,
        assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
        rows,
        series,
        ratios,
        skipped,
        results,
    })
}

/// A battery file: either experiment, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Battery {
    Separation(SeparationConfig),
    Slope(SlopeConfig),
    /// A single generator and detector pair.
    Trials(TrialConfig),
}
