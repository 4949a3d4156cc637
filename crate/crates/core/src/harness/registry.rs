//! String-addressable generators and detectors, so batteries can be written
//! as JSON and driven from the command line.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::detect::{
    cert_claw_search, cert_collision_search, cert_fixedpoint_search, cert_star_search,
    cert_starpath_search, edge_wedge_search, multiscale_collision_search, path_k_search,
    uniform_probe_baseline, EdgeTarget, FixedPointSearch, ProbeTarget, SearchOutcome, WalkMemory,
};
use crate::gen::{
    gen_claw_graph, gen_collision_function, gen_fixedpoint_function, gen_star_graph,
    gen_starpath_graph, primes_in_window, FixedPointParams, FunctionPattern, GenError, Generated,
    GraphPattern, ScaleParams,
};
use crate::meta::{Certificate, Structure, StructureKind, StructureMeta};
use crate::oracle::{CountedOracle, FunctionAccess, FunctionInstance, Instance, Model};
use crate::rng::{derive_seed, rng_from_seed, stream, Rng};

/// Serializes a type through its `Display` / `FromStr` pair.
mod via_str {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    CollisionFn {
        n: usize,
        #[serde(flatten)]
        params: ScaleParams,
    },
    ClawGraph {
        n: usize,
        #[serde(flatten)]
        params: ScaleParams,
    },
    Fixedpoint {
        n: usize,
        #[serde(flatten)]
        params: FixedPointParams,
    },
    Star {
        n: usize,
        #[serde(rename = "H", with = "via_str")]
        pattern: GraphPattern,
    },
    Starpath {
        n: usize,
        k: usize,
    },
    /// Uniformly random function. The certificate only names a path length.
    RandomFn {
        n: usize,
        #[serde(default = "one")]
        k: u32,
    },
    Identity {
        n: usize,
        #[serde(default = "one")]
        k: u32,
    },
}

impl GeneratorSpec {
    pub fn id(&self) -> &'static str {
        match self {
            GeneratorSpec::CollisionFn { .. } => "collision-fn",
            GeneratorSpec::ClawGraph { .. } => "claw-graph",
            GeneratorSpec::Fixedpoint { .. } => "fixedpoint",
            GeneratorSpec::Star { .. } => "star",
            GeneratorSpec::Starpath { .. } => "starpath",
            GeneratorSpec::RandomFn { .. } => "random-fn",
            GeneratorSpec::Identity { .. } => "identity",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            GeneratorSpec::CollisionFn { n, .. }
            | GeneratorSpec::ClawGraph { n, .. }
            | GeneratorSpec::Fixedpoint { n, .. }
            | GeneratorSpec::Star { n, .. }
            | GeneratorSpec::Starpath { n, .. }
            | GeneratorSpec::RandomFn { n, .. }
            | GeneratorSpec::Identity { n, .. } => n,
        }
    }

    /// The same construction at another size.
    pub fn with_n(&self, size: usize) -> Self {
        let mut g = self.clone();
        match &mut g {
            GeneratorSpec::CollisionFn { n, .. }
            | GeneratorSpec::ClawGraph { n, .. }
            | GeneratorSpec::Fixedpoint { n, .. }
            | GeneratorSpec::Star { n, .. }
            | GeneratorSpec::Starpath { n, .. }
            | GeneratorSpec::RandomFn { n, .. }
            | GeneratorSpec::Identity { n, .. } => *n = size,
        }
        g
    }

    pub fn model(&self) -> Model {
        match self {
            GeneratorSpec::CollisionFn { .. }
            | GeneratorSpec::Fixedpoint { .. }
            | GeneratorSpec::RandomFn { .. }
            | GeneratorSpec::Identity { .. } => Model::Function,
            _ => Model::Graph,
        }
    }

    /// Number of scales, for the multi-scale constructions.
    pub fn num_scales(&self) -> Option<usize> {
        match self {
            GeneratorSpec::CollisionFn { params, .. } | GeneratorSpec::ClawGraph { params, .. } => {
                Some(params.num_scales())
            }
            _ => None,
        }
    }

    pub fn generate(&self, seed: u64) -> Result<Generated, GenError> {
        match self {
            GeneratorSpec::CollisionFn { n, params } => gen_collision_function(*n, params, seed),
            GeneratorSpec::ClawGraph { n, params } => gen_claw_graph(*n, params, seed),
            GeneratorSpec::Fixedpoint { n, params } => gen_fixedpoint_function(*n, params, seed),
            GeneratorSpec::Star { n, pattern } => gen_star_graph(*n, *pattern, seed),
            GeneratorSpec::Starpath { n, k } => gen_starpath_graph(*n, *k, seed),
            GeneratorSpec::RandomFn { n, k } => Ok(random_function(*n, *k, seed)),
            GeneratorSpec::Identity { n, k } => {
                let mut meta = StructureMeta::new("identity");
                meta.structures.push(Structure::new(
                    StructureKind::Isolated,
                    (0..*n as u32).collect(),
                ));
                let f = FunctionInstance::identity(*n).with_meta(meta);
                Ok(Generated {
                    instance: Instance::Function(f),
                    certificate: Certificate::PathLength { k: *k },
                })
            }
        }
    }
}

/// Uniform random function. Its metadata lists each cycle in order and
/// gathers the remaining tree elements, unordered, in one `Feeder` entry.
fn random_function(n: usize, k: u32, seed: u64) -> Generated {
    let mut rng = rng_from_seed(derive_seed(seed, stream::INSTANCE));
    let succ: Vec<u32> = (0..n).map(|_| rng.gen_range(0..n as u32)).collect();
    let mut f = FunctionInstance::new(succ).expect("values lie in [0, n)");
    let mut on_cycle = vec![false; n];
    let mut state = vec![0u8; n];
    let mut meta = StructureMeta::new("random-fn");
    for s in 0..n {
        let mut path = Vec::new();
        let mut x = s;
        while state[x] == 0 {
            state[x] = 1;
            path.push(x);
            x = f.f(x);
        }
        if state[x] == 1 {
            let from = path.iter().position(|&y| y == x).unwrap();
            let cyc: Vec<u32> = path[from..].iter().map(|&y| y as u32).collect();
            for &y in &cyc {
                on_cycle[y as usize] = true;
            }
            meta.structures.push(Structure::new(StructureKind::Cycle, cyc));
        }
        for y in path {
            state[y] = 2;
        }
    }
    let trees: Vec<u32> = (0..n as u32).filter(|&x| !on_cycle[x as usize]).collect();
    if !trees.is_empty() {
        meta.structures.push(Structure::new(StructureKind::Feeder, trees));
    }
    f = f.with_meta(meta);
    Generated {
        instance: Instance::Function(f),
        certificate: Certificate::PathLength { k },
    }
}

fn default_c() -> f64 {
    1.0
}

fn fixed_point_pattern() -> FunctionPattern {
    FunctionPattern::fixed_point()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "detector", rename_all = "kebab-case")]
pub enum DetectorSpec {
    CertCollision {
        #[serde(default)]
        memory: WalkMemory,
    },
    Multiscale {
        i_min: u32,
        i_max: u32,
        #[serde(default)]
        memory: WalkMemory,
    },
    CertClaw,
    CertFixedpoint {
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "fixed_point_pattern", with = "via_str")]
        pattern: FunctionPattern,
    },
    CertStar,
    CertStarpath {
        k: usize,
    },
    UniformProbe {
        #[serde(flatten)]
        target: ProbeTarget,
    },
    PathK {
        k: usize,
    },
    EdgeWedge {
        target: EdgeTarget,
    },
}

impl DetectorSpec {
    pub fn id(&self) -> &'static str {
        match self {
            DetectorSpec::CertCollision { .. } => "cert-collision",
            DetectorSpec::Multiscale { .. } => "multiscale",
            DetectorSpec::CertClaw => "cert-claw",
            DetectorSpec::CertFixedpoint { .. } => "cert-fixedpoint",
            DetectorSpec::CertStar => "cert-star",
            DetectorSpec::CertStarpath { .. } => "cert-starpath",
            DetectorSpec::UniformProbe { .. } => "uniform-probe",
            DetectorSpec::PathK { .. } => "path-k",
            DetectorSpec::EdgeWedge { .. } => "edge-wedge",
        }
    }

    pub fn model(&self) -> Model {
        match self {
            DetectorSpec::CertCollision { .. }
            | DetectorSpec::Multiscale { .. }
            | DetectorSpec::CertFixedpoint { .. }
            | DetectorSpec::PathK { .. } => Model::Function,
            DetectorSpec::UniformProbe { target } if target.is_function_target() => Model::Function,
            _ => Model::Graph,
        }
    }

    /// Whether the detector reads the certificate at all.
    pub fn uses_certificate(&self) -> bool {
        matches!(
            self,
            DetectorSpec::CertCollision { .. }
                | DetectorSpec::CertClaw
                | DetectorSpec::CertFixedpoint { .. }
                | DetectorSpec::CertStar
                | DetectorSpec::CertStarpath { .. }
        )
    }

    /// Rejects detectors that cannot run on `model` or cannot read `cert`.
    pub fn check(&self, model: Model, cert: &Certificate) -> Result<(), HarnessError> {
        if self.model() != model {
            return Err(HarnessError::ModelMismatch {
                detector: self.id().to_string(),
                model,
            });
        }
        let ok = match self {
            DetectorSpec::CertCollision { .. } => matches!(cert, Certificate::CollisionScale { .. }),
            DetectorSpec::CertClaw => matches!(cert, Certificate::ClawScale { .. }),
            DetectorSpec::CertFixedpoint { .. } => matches!(cert, Certificate::FixedPointPrimes { .. }),
            DetectorSpec::CertStar => matches!(cert, Certificate::StarDegrees { .. }),
            DetectorSpec::CertStarpath { .. } => matches!(cert, Certificate::BackboneIndex { .. }),
            _ => true,
        };
        if !ok {
            return Err(HarnessError::Config(format!(
                "{} cannot read a {} certificate",
                self.id(),
                cert.kind_name()
            )));
        }
        Ok(())
    }

    /// Runs once. Call [`check`](Self::check) first; a certificate of the
    /// wrong kind panics here.
    pub fn run(
        &self,
        o: &mut CountedOracle<'_>,
        cert: &Certificate,
        budget: Option<u64>,
        rng: &mut Rng,
    ) -> SearchOutcome {
        use Certificate as C;
        match (self, cert) {
            (DetectorSpec::CertCollision { memory }, C::CollisionScale { t }) => {
                cert_collision_search(o, *t, budget, *memory, rng)
            }
            (DetectorSpec::Multiscale { i_min, i_max, memory }, _) => {
                multiscale_collision_search(o, *i_min, *i_max, budget, *memory, rng)
            }
            (DetectorSpec::CertClaw, C::ClawScale { t }) => cert_claw_search(o, *t, budget, rng),
            (DetectorSpec::CertFixedpoint { c, pattern }, C::FixedPointPrimes { primes }) => {
                let params = FixedPointSearch::with_constant(FunctionAccess::n(o), *c);
                cert_fixedpoint_search(o, primes, pattern, params, budget, rng)
            }
            (DetectorSpec::CertStar, C::StarDegrees { degrees }) => {
                cert_star_search(o, degrees, budget, rng)
            }
            (DetectorSpec::CertStarpath { k }, C::BackboneIndex { index }) => {
                cert_starpath_search(o, *index, *k, budget, rng)
            }
            (DetectorSpec::UniformProbe { target }, _) => uniform_probe_baseline(o, target, budget, rng),
            (DetectorSpec::PathK { k }, _) => path_k_search(o, *k, budget, rng),
            (DetectorSpec::EdgeWedge { target }, _) => edge_wedge_search(o, *target, budget, rng),
            (d, c) => panic!("{} cannot read a {} certificate", d.id(), c.kind_name()),
        }
    }
}

/// A certificate of the same kind with wrong content, drawn from `seed`.
/// Used to check that a lying hint never produces an invalid witness.
pub fn corrupt_certificate(cert: &Certificate, n: usize, seed: u64) -> Certificate {
    let mut rng = rng_from_seed(derive_seed(seed, stream::CORRUPT));
    let log_n = (usize::BITS - n.max(2).leading_zeros() - 1).max(2);
    let other = |rng: &mut Rng, v: u32, lo: u32, hi: u32| -> u32 {
        if hi <= lo {
            return lo;
        }
        loop {
            let x = rng.gen_range(lo..=hi);
            if x != v {
                return x;
            }
        }
    };
    match cert {
        Certificate::CollisionScale { t } => Certificate::CollisionScale {
            t: other(&mut rng, *t, 1, log_n),
        },
        Certificate::ClawScale { t } => Certificate::ClawScale {
            t: other(&mut rng, *t, 1, log_n),
        },
        Certificate::FixedPointPrimes { primes } => {
            let q = (n as f64).powf(0.25);
            let mut pool: Vec<u32> = primes_in_window(1.0, 2.0 * q + 3.0)
                .into_iter()
                .map(|p| p as u32)
                .filter(|p| !primes.contains(p))
                .collect();
            pool.shuffle(&mut rng);
            pool.truncate(primes.len().max(1));
            pool.sort_unstable();
            Certificate::FixedPointPrimes { primes: pool }
        }
        Certificate::StarDegrees { degrees } => {
            let max = degrees.iter().copied().max().unwrap_or(4) + 4;
            let mut out: Vec<u32> = degrees.iter().map(|&d| other(&mut rng, d, 2, max)).collect();
            if out.is_empty() {
                out.push(rng.gen_range(2..=max));
            }
            Certificate::StarDegrees { degrees: out }
        }
        Certificate::BackboneIndex { index } => {
            let m = (n as f64).sqrt() as u32;
            Certificate::BackboneIndex {
                index: other(&mut rng, *index, 0, m + 1),
            }
        }
        Certificate::PathLength { k } => Certificate::PathLength {
            k: other(&mut rng, *k, 1, log_n),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_round_trip_through_json() {
        let g: GeneratorSpec = serde_json::from_str(
            r#"{"construction":"star","n":4096,"H":"triangle"}"#,
        )
        .unwrap();
        assert_eq!(
            g,
            GeneratorSpec::Star {
                n: 4096,
                pattern: GraphPattern::Clique(3)
            }
        );
        let d: DetectorSpec =
            serde_json::from_str(r#"{"detector":"uniform-probe","target":"star","k":4}"#).unwrap();
        assert_eq!(
            d,
            DetectorSpec::UniformProbe {
                target: ProbeTarget::Star { k: 4 }
            }
        );
        for d in [
            DetectorSpec::CertCollision {
                memory: WalkMemory::Shared,
            },
            DetectorSpec::CertFixedpoint {
                c: 2.0,
                pattern: FunctionPattern::three_collision(),
            },
            DetectorSpec::EdgeWedge {
                target: EdgeTarget::Wedge,
            },
        ] {
            let text = serde_json::to_string(&d).unwrap();
            assert_eq!(serde_json::from_str::<DetectorSpec>(&text).unwrap(), d);
        }
        let g = GeneratorSpec::CollisionFn {
            n: 1 << 12,
            params: ScaleParams::new(3, 6),
        };
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<GeneratorSpec>(&text).unwrap(), g);
    }

    #[test]
    fn mismatches_are_reported() {
        let d = DetectorSpec::CertStar;
        let cert = Certificate::CollisionScale { t: 3 };
        assert!(matches!(
            d.check(Model::Function, &cert),
            Err(HarnessError::ModelMismatch { .. })
        ));
        assert!(matches!(d.check(Model::Graph, &cert), Err(HarnessError::Config(_))));
    }

    #[test]
    fn corruption_changes_content_not_kind() {
        let certs = [
            Certificate::CollisionScale { t: 5 },
            Certificate::FixedPointPrimes { primes: vec![5, 7] },
            Certificate::StarDegrees { degrees: vec![6, 7, 8] },
            Certificate::BackboneIndex { index: 10 },
        ];
        for c in certs {
            for seed in 0..20 {
                let bad = corrupt_certificate(&c, 1 << 12, seed);
                assert_eq!(bad.kind_name(), c.kind_name());
                assert_ne!(bad, c);
            }
        }
    }

    #[test]
    fn random_function_partition() {
        let g = GeneratorSpec::RandomFn { n: 500, k: 3 }.generate(4).unwrap();
        g.meta().check_partition(500).unwrap();
    }
}
