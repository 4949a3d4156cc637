use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qsep::gen::{CycleCount, Filler, FixedPointParams, FunctionPattern, GraphPattern, Rho, ScaleParams};
use qsep::harness::{config_hash, GeneratorSpec};
use qsep::oracle::io::{read_json, CertificateFile, InstanceFile, InstanceHeader, MetaFile};
use qsep::StructureMeta;
use serde_json::json;

use crate::exit::{write_json, Failure, Outcome};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    CollisionFn,
    ClawGraph,
    Fixedpoint,
    Star,
    Starpath,
    RandomFn,
    Identity,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, required_unless_present = "config")]
    construction: Option<Construction>,
    #[arg(long, required_unless_present = "config")]
    n: Option<usize>,
    /// Scale window `a..b` (inclusive) for the multi-scale constructions.
    #[arg(long, value_parser = parse_scales)]
    scales: Option<(u32, u32)>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// A number in (0, 1] or `auto`.
    #[arg(long)]
    rho: Option<Rho>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Star size for starpath, path length for random-fn and identity.
    #[arg(long)]
    k: Option<usize>,
    /// Planted graph pattern: `triangle`, `clique:h` or `none`.
    #[arg(long = "H")]
    h: Option<GraphPattern>,
    #[arg(long, value_enum)]
    filler: Option<FillerArg>,
    /// Grow the prime window until enough primes exist.
    #[arg(long)]
    widen: bool,
    /// `formula`, `fill`, or an exact count.
    #[arg(long)]
    cycles: Option<String>,
    /// Function pattern: `fixed-point`, `3-collision` or `edges:a-b,...`.
    #[arg(long)]
    pattern: Option<FunctionPattern>,
    /// Prime window `lo,hi`.
    #[arg(long, value_parser = parse_window)]
    prime_window: Option<(f64, f64)>,
    #[arg(long)]
    good_index: Option<u32>,
    #[arg(long)]
    witness_count: Option<usize>,
    /// Do not keep one path per scale when the formula gives zero.
    #[arg(long)]
    no_clamp: bool,
    /// JSON parameter file; a `seed` field there overrides `--seed`.
    #[arg(long, conflicts_with = "construction")]
    config: Option<PathBuf>,
    /// File stem for the outputs (default: the construction id).
    #[arg(long)]
    name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FillerArg {
    FixedPoints,
    Cycles,
}

fn parse_scales(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or("expected a..b")?;
    let a = a.trim().parse().map_err(|_| format!("bad scale '{a}'"))?;
    let b = b.trim().parse().map_err(|_| format!("bad scale '{b}'"))?;
    Ok((a, b))
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo = a.trim().parse().map_err(|_| format!("bad bound '{a}'"))?;
    let hi = b.trim().parse().map_err(|_| format!("bad bound '{b}'"))?;
    Ok((lo, hi))
}

fn parse_cycles(s: &str) -> Result<CycleCount, Failure> {
    match s {
        "formula" => Ok(CycleCount::Formula),
        "fill" => Ok(CycleCount::Fill),
        _ => s
            .parse()
            .map(CycleCount::Exact)
            .map_err(|_| Failure::infeasible(format!("--cycles takes formula, fill or a count, got '{s}'"))),
    }
}

impl GenArgs {
    fn scale_params(&self) -> Result<ScaleParams, Failure> {
        let (a, b) = self
            .scales
            .ok_or_else(|| Failure::infeasible("this construction needs --scales a..b"))?;
        let mut p = ScaleParams::new(a, b);
        if let Some(c) = self.c {
            p.c = c;
        }
        if let Some(beta) = self.beta {
            p.beta = beta;
        }
        if let Some(gamma) = self.gamma {
            p.gamma = gamma;
        }
        if let Some(rho) = self.rho {
            p.rho = rho;
        }
        if let Some(f) = self.filler {
            p.filler = match f {
                FillerArg::FixedPoints => Filler::FixedPoints,
                FillerArg::Cycles => Filler::Cycles,
            };
        }
        p.good_index = self.good_index;
        p.witness_count = self.witness_count;
        p.clamp_paths = !self.no_clamp;
        Ok(p)
    }

    fn spec(&self) -> Result<GeneratorSpec, Failure> {
        let n = self.n.expect("clap enforces --n");
        let k = self.k;
        Ok(match self.construction.expect("clap enforces --construction") {
            Construction::CollisionFn => GeneratorSpec::CollisionFn {
                n,
                params: self.scale_params()?,
            },
            Construction::ClawGraph => GeneratorSpec::ClawGraph {
                n,
                params: self.scale_params()?,
            },
            Construction::Fixedpoint => {
                let mut p = FixedPointParams::default();
                if let Some(a) = self.alpha {
                    p.alpha = a;
                }
                if let Some(c) = &self.cycles {
                    p.cycles = parse_cycles(c)?;
                }
                if let Some(pat) = &self.pattern {
                    p.pattern = pat.clone();
                }
                p.prime_window = self.prime_window;
                p.widen = self.widen;
                GeneratorSpec::Fixedpoint { n, params: p }
            }
            Construction::Star => GeneratorSpec::Star {
                n,
                pattern: self.h.unwrap_or(GraphPattern::Clique(3)),
            },
            Construction::Starpath => GeneratorSpec::Starpath { n, k: k.unwrap_or(4) },
            Construction::RandomFn => GeneratorSpec::RandomFn {
                n,
                k: k.unwrap_or(1) as u32,
            },
            Construction::Identity => GeneratorSpec::Identity {
                n,
                k: k.unwrap_or(1) as u32,
            },
        })
    }
}

/// The generator and seed named by a parameter file.
fn from_config(ctx: &Ctx, path: &std::path::Path) -> Result<(GeneratorSpec, u64), Failure> {
    let mut v: serde_json::Value = read_json(&ctx.path(path))?;
    let seed = v
        .as_object_mut()
        .and_then(|o| o.remove("seed"))
        .and_then(|s| s.as_u64())
        .unwrap_or(ctx.seed);
    let spec = serde_json::from_value(v)
        .map_err(|e| Failure::infeasible(format!("{}: {e}", path.display())))?;
    Ok((spec, seed))
}

fn capacity_line(meta: &StructureMeta, n: usize) -> Option<String> {
    let notes = &meta.notes;
    let i_min = notes.get("i_min")?.as_u64()?;
    let a = notes.get("a")?.as_array()?;
    let paths: u64 = a
        .iter()
        .enumerate()
        .map(|(j, x)| x.as_u64().unwrap_or(0) << (i_min + j as u64))
        .sum();
    Some(format!(
        "capacity paths={paths} overhead={} usage={} n={n} rho={}",
        notes.get("overhead")?,
        notes.get("usage")?,
        notes.get("rho")?
    ))
}

pub fn run(ctx: &Ctx, args: GenArgs) -> Outcome {
    let (spec, seed) = match &args.config {
        Some(p) => from_config(ctx, p)?,
        None => (args.spec()?, ctx.seed),
    };
    let g = spec.generate(seed)?;
    let hash = config_hash(&json!({ "generator": &spec, "seed": seed }));
    let name = args.name.clone().unwrap_or_else(|| spec.id().to_string());
    let meta = g.meta().clone();

    let header = InstanceHeader {
        model: g.instance.model(),
        n: spec.n(),
        seed,
        construction: spec.id().to_string(),
        parameters: serde_json::to_value(&spec).expect("specs are plain data"),
        config_hash: hash.clone(),
    };
    let files = [
        format!("{name}.instance.json"),
        format!("{name}.cert.json"),
        format!("{name}.meta.json"),
    ];
    write_json(&ctx.path(files[0].as_ref()), &InstanceFile::from_instance(header, &g.instance))?;
    write_json(
        &ctx.path(files[1].as_ref()),
        &CertificateFile {
            config_hash: hash.clone(),
            certificate: g.certificate.clone(),
        },
    )?;
    write_json(
        &ctx.path(files[2].as_ref()),
        &MetaFile {
            ground_truth: true,
            config_hash: hash.clone(),
            meta: meta.clone(),
        },
    )?;

    println!("construction={}", spec.id());
    println!("n={}", spec.n());
    println!("seed={seed}");
    println!("config_hash={hash}");
    if let Some(t) = meta.good_index {
        println!("good_index={t}");
    }
    println!("witnesses={}", meta.witnesses.len());
    if let Some(line) = capacity_line(&meta, spec.n()) {
        println!("{line}");
    }
    for (k, v) in &meta.notes {
        println!("note.{k}={v}");
    }
    println!("certificate={}", serde_json::to_string(&g.certificate).expect("plain data"));
    for f in &files {
        println!("wrote={f}");
    }
    Ok(())
}
