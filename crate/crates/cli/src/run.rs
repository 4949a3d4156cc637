use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use qsep::detect::{EdgeTarget, ProbeTarget, Status, WalkMemory};
use qsep::gen::FunctionPattern;
use qsep::harness::{config_hash, run_once, DetectorSpec};
use qsep::oracle::io::{read_instance, read_json, CertificateFile};
use qsep::{Certificate, Witness};
use serde::Serialize;
use serde_json::json;

use crate::exit::{write_json, Failure, Outcome};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorId {
    CertCollision,
    Multiscale,
    CertClaw,
    CertFixedpoint,
    CertStar,
    CertStarpath,
    UniformProbe,
    PathK,
    EdgeWedge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    FixedPoint,
    Pattern,
    Star,
    Clique,
    Edge,
    Wedge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MemoryArg {
    PerWalk,
    Shared,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Instance file written by `gen`.
    #[arg(long)]
    instance: PathBuf,
    /// Certificate file (default: the instance's `.cert.json` sibling).
    #[arg(long)]
    cert: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "detector_config")]
    detector: Option<DetectorId>,
    /// JSON detector description, instead of `--detector` and its flags.
    #[arg(long, conflicts_with = "detector")]
    detector_config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "per-walk")]
    memory: MemoryArg,
    #[arg(long)]
    i_min: Option<u32>,
    #[arg(long)]
    i_max: Option<u32>,
    /// Star size or path length, depending on the detector.
    #[arg(long)]
    k: Option<usize>,
    /// Constant in the fixed-point search parameters.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    pattern: Option<FunctionPattern>,
    /// Target of `uniform-probe` and `edge-wedge`.
    #[arg(long, value_enum)]
    target: Option<TargetArg>,
    /// Clique size for `--target clique`.
    #[arg(long)]
    h: Option<usize>,
    /// Hard query cap.
    #[arg(long)]
    budget: Option<u64>,
    /// Hand the detector a corrupted certificate of the same kind.
    #[arg(long)]
    corrupt_cert: bool,
    /// Record file (default: `<stem>.<detector>.run.json`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct RunRecord<'a> {
    config_hash: String,
    detector: &'a str,
    detector_spec: &'a DetectorSpec,
    instance_ref: String,
    instance_hash: &'a str,
    seed: u64,
    budget: Option<u64>,
    corrupt_cert: bool,
    status: Status,
    queries: u64,
    attempts: u64,
    witness: Option<&'a Witness>,
    valid: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    counters: &'a BTreeMap<String, u64>,
}

fn need<T>(v: Option<T>, flag: &str, det: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::infeasible(format!("{det} needs {flag}")))
}

impl RunArgs {
    fn spec(&self, ctx: &Ctx) -> Result<DetectorSpec, Failure> {
        if let Some(p) = &self.detector_config {
            let v: serde_json::Value = read_json(&ctx.path(p))?;
            return serde_json::from_value(v).map_err(|e| Failure::infeasible(format!("{}: {e}", p.display())));
        }
        let memory = match self.memory {
            MemoryArg::PerWalk => WalkMemory::PerWalk,
            MemoryArg::Shared => WalkMemory::Shared,
        };
        let id = self.detector.expect("clap enforces --detector");
        Ok(match id {
            DetectorId::CertCollision => DetectorSpec::CertCollision { memory },
            DetectorId::Multiscale => DetectorSpec::Multiscale {
                i_min: need(self.i_min, "--i-min", "multiscale")?,
                i_max: need(self.i_max, "--i-max", "multiscale")?,
                memory,
            },
            DetectorId::CertClaw => DetectorSpec::CertClaw,
            DetectorId::CertFixedpoint => DetectorSpec::CertFixedpoint {
                c: self.c,
                pattern: self.pattern.clone().unwrap_or_else(FunctionPattern::fixed_point),
            },
            DetectorId::CertStar => DetectorSpec::CertStar,
            DetectorId::CertStarpath => DetectorSpec::CertStarpath { k: self.k.unwrap_or(4) },
            DetectorId::PathK => DetectorSpec::PathK {
                k: need(self.k, "--k", "path-k")?,
            },
            DetectorId::UniformProbe => {
                let target = match need(self.target, "--target", "uniform-probe")? {
                    TargetArg::FixedPoint => ProbeTarget::FixedPoint,
                    TargetArg::Pattern => ProbeTarget::Pattern {
                        pattern: need(self.pattern.clone(), "--pattern", "uniform-probe")?,
                    },
                    TargetArg::Star => ProbeTarget::Star {
                        k: need(self.k, "--k", "uniform-probe")?,
                    },
                    TargetArg::Clique => ProbeTarget::Clique {
                        h: need(self.h, "--h", "uniform-probe")?,
                    },
                    TargetArg::Edge | TargetArg::Wedge => {
                        return Err(Failure::infeasible("uniform-probe targets are fixed-point, pattern, star or clique"))
                    }
                };
                DetectorSpec::UniformProbe { target }
            }
            DetectorId::EdgeWedge => DetectorSpec::EdgeWedge {
                target: match self.target {
                    Some(TargetArg::Wedge) => EdgeTarget::Wedge,
                    Some(TargetArg::Edge) | None => EdgeTarget::Edge,
                    Some(_) => return Err(Failure::infeasible("edge-wedge targets are edge or wedge")),
                },
            },
        })
    }
}

fn stem(instance: &Path) -> String {
    let name = instance.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    name.strip_suffix(".instance.json")
        .or_else(|| name.strip_suffix(".json"))
        .unwrap_or(&name)
        .to_string()
}

fn sibling(instance: &Path, suffix: &str) -> PathBuf {
    instance.with_file_name(format!("{}{suffix}", stem(instance)))
}

pub fn run(ctx: &Ctx, args: RunArgs) -> Outcome {
    let det = args.spec(ctx)?;
    let (header, inst) = read_instance(&ctx.path(&args.instance))?;
    let cert_path = args.cert.clone().unwrap_or_else(|| sibling(&args.instance, ".cert.json"));
    let cert = match read_json::<CertificateFile>(&ctx.path(&cert_path)) {
        Ok(f) => f.certificate,
        // Certificate-free detectors never look at it.
        Err(_) if !det.uses_certificate() => Certificate::PathLength { k: 1 },
        Err(e) => return Err(e.into()),
    };
    det.check(inst.model(), &cert).map_err(|e| Failure::Mismatch(e.to_string()))?;

    let rec = run_once(&inst, &cert, &det, ctx.seed, args.budget, args.corrupt_cert)?;
    let record = RunRecord {
        config_hash: config_hash(&json!({
            "detector": &det,
            "instance": &header.config_hash,
            "seed": ctx.seed,
            "budget": args.budget,
            "corrupt_cert": args.corrupt_cert,
        })),
        detector: det.id(),
        detector_spec: &det,
        instance_ref: args.instance.display().to_string(),
        instance_hash: &header.config_hash,
        seed: ctx.seed,
        budget: args.budget,
        corrupt_cert: args.corrupt_cert,
        status: rec.status,
        queries: rec.queries,
        attempts: rec.attempts,
        witness: rec.witness.as_ref(),
        valid: rec.valid,
        counters: &rec.counters,
    };
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| sibling(&args.instance, &format!(".{}.run.json", det.id())));
    write_json(&ctx.path(&out), &record)?;

    println!("detector={}", det.id());
    println!("status={}", rec.status.as_str());
    println!("queries={}", rec.queries);
    println!("attempts={}", rec.attempts);
    match &rec.witness {
        Some(w) => println!("witness={}", serde_json::to_string(w).expect("plain data")),
        None => println!("witness=none"),
    }
    println!("valid={}", rec.valid);
    println!("wall_ms={:.3}", rec.wall_ms);
    println!("wrote={}", out.display());
    if !rec.valid {
        return Err(Failure::Verify("the detector reported an invalid witness".into()));
    }
    Ok(())
}
