use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::registry::{corrupt_certificate, DetectorSpec, GeneratorSpec};
use super::stats::TrialStats;
use super::HarnessError;
use crate::detect::Status;
use crate::meta::Certificate;
use crate::oracle::{CountedOracle, Instance, Model, Relabeling, Witness};
use crate::rng::{derive_seed, rng_from_seed, stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub generator: GeneratorSpec,
    pub detector: DetectorSpec,
    pub trials: usize,
    pub seed: u64,
    /// Per-trial query cap.
    #[serde(default)]
    pub budget: Option<u64>,
    /// Draw a new instance for every trial instead of relabeling one.
    #[serde(default)]
    pub fresh_instance_per_trial: bool,
    /// Hand the detector a corrupted certificate.
    #[serde(default)]
    pub corrupt: bool,
}

/// One detector run. The witness is reported in the instance's own labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub instance_seed: u64,
    pub status: Status,
    pub queries: u64,
    pub attempts: u64,
    pub witness: Option<Witness>,
    /// False only for a Found witness that fails validation.
    pub valid: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counters: BTreeMap<String, u64>,
    /// Not serialized, so that result files stay reproducible.
    #[serde(skip)]
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRun {
    pub records: Vec<TrialRecord>,
    pub stats: TrialStats,
}

impl TrialRun {
    pub(crate) fn from_records(records: Vec<TrialRecord>) -> Self {
        let stats = TrialStats::from_outcomes(records.iter().map(|r| (r.status, r.queries, r.valid)));
        TrialRun { records, stats }
    }
}

/// Seed of trial `i` under `master`; trial `i` can be rerun on its own.
pub fn trial_seed(master: u64, i: usize) -> u64 {
    derive_seed(derive_seed(master, stream::TRIAL), i as u64)
}

/// Runs `detector` once against `inst` behind a fresh uniformly random
/// relabeling (and, for graphs, a fresh neighbor order), all drawn from
/// `seed`. The witness is mapped back and validated against `inst`.
pub fn run_once(
    inst: &Instance,
    cert: &Certificate,
    detector: &DetectorSpec,
    seed: u64,
    budget: Option<u64>,
    corrupt: bool,
) -> Result<TrialRecord, HarnessError> {
    detector.check(inst.model(), cert)?;
    let n = inst.n();
    let cert = if corrupt {
        corrupt_certificate(cert, n, seed)
    } else {
        cert.clone()
    };
    let relabel = Relabeling::random(n, derive_seed(seed, stream::RELABEL));
    let mut oracle = CountedOracle::new(inst).with_relabeling(&relabel);
    if inst.model() == Model::Graph {
        oracle = oracle.with_neighbor_order(derive_seed(seed, stream::NEIGHBOR_ORDER));
    }
    let mut rng = rng_from_seed(derive_seed(seed, stream::DETECTOR));
    let clock = Instant::now();
    let out = detector.run(&mut oracle, &cert, budget, &mut rng);
    let wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    assert_eq!(
        out.queries,
        oracle.transcript().len() as u64,
        "{} misreported its query count",
        detector.id()
    );
    let witness = out
        .witness
        .map(|w| w.mapped(|v| relabel.to_internal(v)));
    let valid = match (&witness, inst) {
        (None, _) => true,
        (Some(w), Instance::Function(f)) => w.validate_function(f).is_ok(),
        (Some(w), Instance::Graph(g)) => w.validate_graph(g).is_ok(),
    };
    Ok(TrialRecord {
        trial: 0,
        seed,
        instance_seed: 0,
        status: out.status,
        queries: out.queries,
        attempts: out.attempts,
        witness,
        valid,
        counters: out.counters,
        wall_ms,
    })
}

/// `trials` runs on one fixed instance, each under its own relabeling.
pub fn run_trials_on(
    inst: &Instance,
    cert: &Certificate,
    detector: &DetectorSpec,
    trials: usize,
    master: u64,
    budget: Option<u64>,
    corrupt: bool,
) -> Result<TrialRun, HarnessError> {
    detector.check(inst.model(), cert)?;
    let records = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = run_once(inst, cert, detector, trial_seed(master, i), budget, corrupt)?;
            r.trial = i;
            Ok(r)
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(TrialRun::from_records(records))
}

/// Executes a battery. Trials run in parallel; results come back in trial
/// order, so the output depends only on the configuration.
pub fn run_trials(config: &TrialConfig) -> Result<TrialRun, HarnessError> {
    let det = &config.detector;
    if det.model() != config.generator.model() {
        return Err(HarnessError::ModelMismatch {
            detector: det.id().to_string(),
            model: config.generator.model(),
        });
    }
    if config.trials == 0 {
        return Ok(TrialRun::from_records(Vec::new()));
    }
    if !config.fresh_instance_per_trial {
        let iseed = derive_seed(config.seed, stream::INSTANCE);
        let g = config.generator.generate(iseed)?;
        let mut run = run_trials_on(
            &g.instance,
            &g.certificate,
            det,
            config.trials,
            config.seed,
            config.budget,
            config.corrupt,
        )?;
        for r in &mut run.records {
            r.instance_seed = iseed;
        }
        return Ok(run);
    }
    let records = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(config.seed, i);
            let iseed = derive_seed(seed, stream::INSTANCE);
            let g = config.generator.generate(iseed)?;
            let mut r = run_once(&g.instance, &g.certificate, det, seed, config.budget, config.corrupt)?;
            r.trial = i;
            r.instance_seed = iseed;
            Ok(r)
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(TrialRun::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{ProbeTarget, WalkMemory};
    use crate::gen::ScaleParams;

    fn collision_config(trials: usize) -> TrialConfig {
        TrialConfig {
            generator: GeneratorSpec::CollisionFn {
                n: 1 << 12,
                params: ScaleParams::new(3, 6),
            },
            detector: DetectorSpec::CertCollision {
                memory: WalkMemory::PerWalk,
            },
            trials,
            seed: 11,
            budget: None,
            fresh_instance_per_trial: false,
            corrupt: false,
        }
    }

    #[test]
    fn zero_trials_flags_undefined_rate() {
        let run = run_trials(&collision_config(0)).unwrap();
        assert_eq!(run.stats.trials, 0);
        assert!(run.stats.success_rate.is_none());
    }

    #[test]
    fn same_seed_same_bytes() {
        let mut c = collision_config(24);
        let a = serde_json::to_string(&run_trials(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&run_trials(&c).unwrap()).unwrap();
        assert_eq!(a, b);
        c.fresh_instance_per_trial = true;
        let a = serde_json::to_string(&run_trials(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&run_trials(&c).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trial_rerun_in_isolation() {
        let c = collision_config(8);
        let run = run_trials(&c).unwrap();
        let g = c.generator.generate(run.records[5].instance_seed).unwrap();
        let r = run_once(&g.instance, &g.certificate, &c.detector, trial_seed(c.seed, 5), None, false).unwrap();
        assert_eq!((r.status, r.queries), (run.records[5].status, run.records[5].queries));
    }

    #[test]
    fn model_mismatch_is_a_config_error() {
        let mut c = collision_config(3);
        c.detector = DetectorSpec::UniformProbe {
            target: ProbeTarget::Star { k: 4 },
        };
        assert!(matches!(run_trials(&c), Err(HarnessError::ModelMismatch { .. })));
    }
}
