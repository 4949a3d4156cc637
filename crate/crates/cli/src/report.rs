use std::path::PathBuf;

use clap::Args;
use qsep::harness::{read_results_csv, TrialStats};
use serde::Serialize;

use crate::exit::{write_json, Outcome};
use crate::Ctx;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A results CSV written by `bench`.
    #[arg(long)]
    results: PathBuf,
    /// Summary file (default: `<csv stem>.summary.json`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Group {
    generator: String,
    detector: String,
    n: usize,
    s: usize,
    stats: TrialStats,
}

#[derive(Debug, Serialize)]
struct Ratio {
    n: usize,
    s: usize,
    numerator: String,
    denominator: String,
    ratio: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    config_hash: Vec<String>,
    groups: Vec<Group>,
    ratios: Vec<Ratio>,
}

/// Groups rows by (generator, detector, n, s) in order of first appearance.
/// Where exactly two detectors share an (n, s) cell, the later one's mean
/// over the earlier one's is reported as a ratio.
pub fn run(ctx: &Ctx, args: ReportArgs) -> Outcome {
    let rows = read_results_csv(&ctx.path(&args.results))?;
    let mut keys: Vec<(String, String, usize, usize)> = Vec::new();
    let mut hashes: Vec<String> = Vec::new();
    for r in &rows {
        let k = (r.generator.clone(), r.detector.clone(), r.n, r.s);
        if !keys.contains(&k) {
            keys.push(k);
        }
        if !hashes.contains(&r.config_hash) {
            hashes.push(r.config_hash.clone());
        }
    }
    let groups: Vec<Group> = keys
        .into_iter()
        .map(|(generator, detector, n, s)| {
            let stats = TrialStats::from_outcomes(
                rows.iter()
                    .filter(|r| r.generator == generator && r.detector == detector && r.n == n && r.s == s)
                    .map(|r| (r.status, r.queries, true)),
            );
            Group {
                generator,
                detector,
                n,
                s,
                stats,
            }
        })
        .collect();
    let mut ratios = Vec::new();
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for g in &groups {
        if !cells.contains(&(g.n, g.s)) {
            cells.push((g.n, g.s));
        }
    }
    for (n, s) in cells {
        let cell: Vec<&Group> = groups.iter().filter(|g| g.n == n && g.s == s).collect();
        if let [a, b] = cell[..] {
            if let (Some(ma), Some(mb)) = (a.stats.mean, b.stats.mean) {
                ratios.push(Ratio {
                    n,
                    s,
                    numerator: b.detector.clone(),
                    denominator: a.detector.clone(),
                    ratio: mb / ma,
                });
            }
        }
    }
    for g in &groups {
        println!(
            "group generator={} detector={} n={} s={} trials={} found={} mean={}",
            g.generator,
            g.detector,
            g.n,
            g.s,
            g.stats.trials,
            g.stats.found,
            g.stats.mean.map_or("none".into(), |m| format!("{m:.3}"))
        );
    }
    for r in &ratios {
        println!("ratio n={} s={} {}/{}={:.6}", r.n, r.s, r.numerator, r.denominator, r.ratio);
    }
    let out = args.out.clone().unwrap_or_else(|| {
        let f = args.results.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let stem = f.strip_suffix(".results.csv").or_else(|| f.strip_suffix(".csv")).unwrap_or(&f);
        args.results.with_file_name(format!("{stem}.summary.json"))
    });
    write_json(
        &ctx.path(&out),
        &Summary {
            config_hash: hashes,
            groups,
            ratios,
        },
    )?;
    println!("wrote={}", out.display());
    Ok(())
}
