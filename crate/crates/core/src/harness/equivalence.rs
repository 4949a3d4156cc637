//! Compares the online claw adversary with the offline claw generator under
//! one fixed deterministic probe strategy.

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::HarnessError;
use crate::adversary::AdversarySession;
use crate::gen::{gen_claw_graph, ScaleParams};
use crate::oracle::{CountedOracle, GraphAccess, OracleError};
use crate::rng::derive_seed;

/// Chi-square statistic, degrees of freedom and upper-tail p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

fn chi_tail(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).expect("positive df").sf(statistic)
}

/// Two-sample test that histograms `a` and `b` share one distribution.
/// Bins empty in both samples are ignored.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquare {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let (ka, kb) = ((nb as f64 / na as f64).sqrt(), (na as f64 / nb as f64).sqrt());
    let mut stat = 0.0;
    let mut bins = 0;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        bins += 1;
        stat += (ka * x as f64 - kb * y as f64).powi(2) / (x + y) as f64;
    }
    let df = bins.max(1) - 1;
    ChiSquare {
        statistic: stat,
        df,
        p_value: chi_tail(stat, df),
    }
}

/// Goodness of fit of `counts` to the uniform distribution on its bins.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquare {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let stat = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let df = counts.len().max(1) - 1;
    ChiSquare {
        statistic: stat,
        df,
        p_value: chi_tail(stat, df),
    }
}

/// Number of high-degree answers a transcript may record before the
/// histogram lumps them together.
pub const CONTACT_BINS: usize = 6;

/// The fixed strategy: from starts spread by a multiplicative hash, walk
/// along paths (never straight back) until a dead end, a repeat or the probe
/// limit. Returns how many degree answers were at least 3, i.e. how often
/// the walk met a claw center.
pub fn claw_contacts<G: GraphAccess + ?Sized>(g: &mut G, probes: u64) -> Result<usize, OracleError> {
    let n = g.n() as u64;
    let mut contacts = 0;
    let mut seen = FxHashSet::default();
    let mut j = 0u64;
    let spent = |g: &G| g.count() >= probes;
    while !spent(g) {
        let start = (j.wrapping_mul(0x9E37_79B1) % n) as usize;
        j += 1;
        if !seen.insert(start) {
            continue;
        }
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            if spent(g) {
                return Ok(contacts);
            }
            let d = g.query_degree(cur)?;
            if d >= 3 {
                contacts += 1;
            }
            if d == 0 || spent(g) {
                break;
            }
            let mut next = g.query_neighbor(cur, 0)?;
            if next == prev && d > 1 {
                if spent(g) {
                    return Ok(contacts);
                }
                next = g.query_neighbor(cur, 1)?;
            }
            if !seen.insert(next) {
                break;
            }
            prev = cur;
            cur = next;
        }
    }
    Ok(contacts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub i_min: u32,
    pub i_max: u32,
    pub probes: u64,
    pub sessions: usize,
    /// `contacts[k]`: sessions whose transcript had `k` claw contacts (the
    /// last bin collects `k` and above).
    pub offline_contacts: Vec<u64>,
    pub online_contacts: Vec<u64>,
    pub transcript_test: ChiSquare,
    /// Final good index counts over the scales, online.
    pub good_index_counts: Vec<u64>,
    pub good_index_test: ChiSquare,
}

/// Runs the strategy on `sessions` offline instances and `sessions` online
/// adversaries, seeded from disjoint streams of `seed`.
pub fn adversary_equivalence(
    n: usize,
    params: &ScaleParams,
    probes: u64,
    sessions: usize,
    seed: u64,
) -> Result<EquivalenceReport, HarnessError> {
    let bin = |k: usize| k.min(CONTACT_BINS - 1);
    let offline: Vec<usize> = (0..sessions)
        .into_par_iter()
        .map(|i| {
            let g = gen_claw_graph(n, params, derive_seed(seed, 2 * i as u64))?;
            let mut o = CountedOracle::new(&g.instance);
            Ok(claw_contacts(&mut o, probes).expect("strategy stays in range"))
        })
        .collect::<Result<_, HarnessError>>()?;
    let online: Vec<(usize, u32)> = (0..sessions)
        .into_par_iter()
        .map(|i| {
            let mut s = AdversarySession::new(n, params, derive_seed(seed, 2 * i as u64 + 1))?;
            let k = claw_contacts(&mut s, probes).expect("strategy stays in range");
            s.finalize();
            Ok((k, s.good_index().expect("finalized")))
        })
        .collect::<Result<_, HarnessError>>()?;
    let mut off = vec![0u64; CONTACT_BINS];
    let mut on = vec![0u64; CONTACT_BINS];
    for &k in &offline {
        off[bin(k)] += 1;
    }
    let mut good = vec![0u64; params.num_scales()];
    for &(k, t) in &online {
        on[bin(k)] += 1;
        good[(t - params.i_min) as usize] += 1;
    }
    Ok(EquivalenceReport {
        n,
        i_min: params.i_min,
        i_max: params.i_max,
        probes,
        sessions,
        transcript_test: chi_square_two_sample(&off, &on),
        good_index_test: chi_square_uniform(&good),
        offline_contacts: off,
        online_contacts: on,
        good_index_counts: good,
    })
}
