use std::io::BufWriter;

use clap::Args;
use qsep::adversary::AdversarySession;
use qsep::gen::ScaleParams;
use qsep::harness::{adversary_equivalence, claw_contacts};
use qsep::rng::derive_seed;

use crate::exit::{write_json, Failure, Outcome};
use crate::Ctx;

/// Significance level below which the distributions are declared different.
const ALPHA: f64 = 0.01;

#[derive(Debug, Args)]
pub struct AdversaryArgs {
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    i_min: u32,
    #[arg(long, default_value_t = 6)]
    i_max: u32,
    #[arg(long, default_value_t = 0.3)]
    c: f64,
    /// Queries the fixed strategy spends per session.
    #[arg(long, default_value_t = 200)]
    probes: u64,
    /// Sessions per side.
    #[arg(long, default_value_t = 10_000)]
    sessions: usize,
    /// File stem for the outputs.
    #[arg(long, default_value = "adversary")]
    name: String,
}

pub fn run(ctx: &Ctx, args: AdversaryArgs) -> Outcome {
    let mut params = ScaleParams::new(args.i_min, args.i_max);
    params.c = args.c;
    let rep = adversary_equivalence(args.n, &params, args.probes, args.sessions, ctx.seed)?;

    // Full trace of the first online session, for inspection.
    let mut s = AdversarySession::new(args.n, &params, derive_seed(ctx.seed, 1))?;
    claw_contacts(&mut s, args.probes).map_err(|e| Failure::Verify(e.to_string()))?;
    s.finalize();
    let trace = format!("{}.trace.jsonl", args.name);
    let path = ctx.path(trace.as_ref());
    let file = std::fs::File::create(&path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    s.write_trace_jsonl(BufWriter::new(file))
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;

    let report = format!("{}.report.json", args.name);
    write_json(&ctx.path(report.as_ref()), &rep)?;

    let t = &rep.transcript_test;
    let g = &rep.good_index_test;
    println!("offline_contacts={:?}", rep.offline_contacts);
    println!("online_contacts={:?}", rep.online_contacts);
    println!("transcript chi2={:.4} df={} p={:.6}", t.statistic, t.df, t.p_value);
    println!("good_index_counts={:?}", rep.good_index_counts);
    println!("good_index chi2={:.4} df={} p={:.6}", g.statistic, g.df, g.p_value);
    println!("wrote={trace}");
    println!("wrote={report}");
    if t.p_value <= ALPHA {
        return Err(Failure::Verify(format!("transcript histograms differ (p = {:.6})", t.p_value)));
    }
    if g.p_value <= ALPHA {
        return Err(Failure::Verify(format!("good index is not uniform (p = {:.6})", g.p_value)));
    }
    Ok(())
}
