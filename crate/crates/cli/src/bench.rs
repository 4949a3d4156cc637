use std::path::PathBuf;

use clap::Args;
use qsep::harness::{
    config_hash, run_trials, separation_chart, separation_experiment, slope_chart, slope_experiment,
    write_results_csv, Battery, LineChart, ResultRow, Series, TrialConfig, TrialStats, ASSUMPTIONS,
};
use qsep::oracle::io::read_json;
use serde::Serialize;

use crate::exit::{write_text, Failure, Outcome};
use crate::Ctx;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Battery file: `{"kind": "separation" | "slope" | "trials", ...}`.
    #[arg(long)]
    battery: PathBuf,
    /// Also write an SVG chart.
    #[arg(long)]
    plot: bool,
    /// Treat skipped rows and invalid witnesses as failures.
    #[arg(long)]
    strict: bool,
    /// File stem for the outputs (default: the battery file's stem).
    #[arg(long)]
    name: Option<String>,
}

#[derive(Debug, Serialize)]
struct TrialsReport<'a> {
    config_hash: String,
    assumptions: Vec<&'static str>,
    generator: &'static str,
    detector: &'static str,
    n: usize,
    stats: &'a TrialStats,
}

/// Problems that are warnings unless `--strict`.
#[derive(Default)]
struct Warnings {
    skipped: Vec<String>,
    invalid: Vec<String>,
}

impl Warnings {
    fn check_stats(&mut self, label: &str, s: &TrialStats) {
        if s.invalid_witnesses > 0 {
            self.invalid.push(format!("{label}: {} invalid witnesses", s.invalid_witnesses));
        }
    }
}

fn trials_battery(cfg: &TrialConfig) -> Result<(String, Vec<ResultRow>, String, Warnings), Failure> {
    let hash = config_hash(cfg);
    let run = run_trials(cfg)?;
    let s = cfg.generator.num_scales().unwrap_or(1);
    let rows = run
        .records
        .iter()
        .map(|r| ResultRow {
            config_hash: hash.clone(),
            generator: cfg.generator.id().into(),
            detector: cfg.detector.id().into(),
            n: cfg.generator.n(),
            s,
            trial: r.trial,
            seed: r.seed,
            status: r.status,
            queries: r.queries,
        })
        .collect();
    let st = &run.stats;
    println!(
        "stats trials={} found={} exhausted={} budget_exceeded={} invalid={} mean={}",
        st.trials,
        st.found,
        st.exhausted,
        st.budget_exceeded,
        st.invalid_witnesses,
        st.mean.map_or("none".into(), |m| format!("{m:.3}"))
    );
    let mut warn = Warnings::default();
    warn.check_stats(cfg.detector.id(), st);
    let report = TrialsReport {
        config_hash: hash,
        assumptions: ASSUMPTIONS.to_vec(),
        generator: cfg.generator.id(),
        detector: cfg.detector.id(),
        n: cfg.generator.n(),
        stats: st,
    };
    let json = serde_json::to_string(&report).expect("plain data");
    let chart = LineChart {
        title: format!("{} on {}", cfg.detector.id(), cfg.generator.id()),
        x_label: "trial".into(),
        y_label: "queries".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            name: cfg.detector.id().into(),
            points: run.records.iter().map(|r| (r.trial as f64, r.queries as f64)).collect(),
        }],
    }
    .render();
    Ok((json, rows, chart, warn))
}

pub fn run(ctx: &Ctx, args: BenchArgs) -> Outcome {
    let battery: Battery = {
        let v: serde_json::Value = read_json(&ctx.path(&args.battery))?;
        serde_json::from_value(v).map_err(|e| Failure::infeasible(format!("{}: {e}", args.battery.display())))?
    };
    let name = args.name.clone().unwrap_or_else(|| {
        let f = args.battery.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        f.strip_suffix(".json").unwrap_or(&f).to_string()
    });

    let (report_json, rows, chart, mut warn) = match &battery {
        Battery::Separation(cfg) => {
            let rep = separation_experiment(cfg)?;
            let mut warn = Warnings::default();
            for r in &rep.rows {
                println!(
                    "row s={} i_min={} i_max={} cert_mean={:.3} nocert_mean={:.3} ratio={:.6} nocert_budget={} censored={}",
                    r.s, r.i_min, r.i_max, r.cert_mean, r.nocert_mean, r.ratio, r.nocert_budget, r.nocert.budget_exceeded
                );
                warn.check_stats(&format!("cert s={}", r.s), &r.cert);
                warn.check_stats(&format!("multiscale s={}", r.s), &r.nocert);
            }
            if let Some(f) = &rep.fit {
                println!("fit slope={:.6} intercept={:.6} r2={:.6}", f.slope, f.intercept, f.r2);
            }
            warn.skipped = rep.skipped.iter().map(|s| format!("s={}: {}", s.at, s.reason)).collect();
            let json = serde_json::to_string(&rep).expect("plain data");
            (json, rep.results.clone(), separation_chart(&rep), warn)
        }
        Battery::Slope(cfg) => {
            let rep = slope_experiment(cfg)?;
            let mut warn = Warnings::default();
            for r in &rep.rows {
                println!(
                    "row n={} detector={} mean={}",
                    r.n,
                    r.detector,
                    r.mean.map_or("none".into(), |m| format!("{m:.3}"))
                );
                warn.check_stats(&format!("{} n={}", r.detector, r.n), &r.stats);
            }
            for s in &rep.series {
                match (&s.fit, &s.fit_error) {
                    (Some(f), _) => println!("series detector={} slope={:.6} r2={:.6}", s.detector, f.slope, f.r2),
                    (None, e) => println!("series detector={} slope=none reason={}", s.detector, e.as_deref().unwrap_or("")),
                }
            }
            for p in &rep.ratios {
                println!("ratio n={} value={:.6}", p.n, p.ratio);
            }
            warn.skipped = rep.skipped.iter().map(|s| format!("n={}: {}", s.at, s.reason)).collect();
            let json = serde_json::to_string(&rep).expect("plain data");
            (json, rep.results.clone(), slope_chart(&rep), warn)
        }
        Battery::Trials(cfg) => trials_battery(cfg)?,
    };

    let csv = format!("{name}.results.csv");
    let report = format!("{name}.report.json");
    write_results_csv(&ctx.path(csv.as_ref()), &rows)?;
    write_text(&ctx.path(report.as_ref()), &(report_json + "\n"))?;
    println!("wrote={csv}");
    println!("wrote={report}");
    if args.plot {
        let svg = format!("{name}.svg");
        write_text(&ctx.path(svg.as_ref()), &chart)?;
        println!("wrote={svg}");
    }
    for w in warn.skipped.iter().chain(&warn.invalid) {
        println!("warning {w}");
    }
    if args.strict {
        if let Some(w) = warn.invalid.drain(..).next() {
            return Err(Failure::Verify(w));
        }
        if let Some(w) = warn.skipped.drain(..).next() {
            return Err(Failure::infeasible(w));
        }
    }
    Ok(())
}
