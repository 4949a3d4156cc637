use std::collections::BTreeMap;

use rand::Rng as _;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use super::matcher::match_in;
use super::{conclude, Budgeted, FnMemo, GraphMemo, LazySampler, SearchOutcome};
use crate::gen::FunctionPattern;
use crate::oracle::{FunctionAccess, GraphAccess, OracleError, Witness, WitnessKind};
use crate::rng::Rng;

/// What the certificate-free prober looks for around each sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "kebab-case")]
pub enum ProbeTarget {
    FixedPoint,
    Pattern { pattern: FunctionPattern },
    /// A vertex of degree at least `k`.
    Star { k: usize },
    Clique { h: usize },
}

impl ProbeTarget {
    pub fn is_function_target(&self) -> bool {
        matches!(self, ProbeTarget::FixedPoint | ProbeTarget::Pattern { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeTarget {
    Edge,
    Wedge,
}

/// Checks `v` and, if `v` is a leaf, its neighbor for degree at least `k`.
pub(crate) fn probe_star<O: GraphAccess + ?Sized>(
    o: &mut O,
    memo: &mut GraphMemo,
    v: usize,
    k: usize,
) -> Result<Option<Witness>, OracleError> {
    let mut c = v;
    let mut d = memo.degree(o, v)?;
    if d == 1 && k > 1 {
        c = memo.neighbor(o, v, 0)?;
        d = memo.degree(o, c)?;
    }
    if d < k {
        return Ok(None);
    }
    let leaves: Vec<usize> = (0..k)
        .map(|i| memo.neighbor(o, c, i))
        .collect::<Result<_, _>>()?;
    Ok(Some(Witness::star(c, &leaves)))
}

/// Vertices of degree above this are not expanded by the local clique check.
const LOCAL_DEGREE_CAP: usize = 16;

fn probe_clique<O: GraphAccess + ?Sized>(
    o: &mut O,
    memo: &mut GraphMemo,
    v: usize,
    h: usize,
) -> Result<Option<Witness>, OracleError> {
    let cap = LOCAL_DEGREE_CAP.max(2 * h);
    let d = memo.degree(o, v)?;
    if d + 1 < h || d > cap {
        return Ok(None);
    }
    let nv = memo.neighbors(o, v)?;
    let mut cands = Vec::new();
    let mut adj: BTreeMap<usize, FxHashSet<usize>> = BTreeMap::new();
    for &u in &nv {
        let du = memo.degree(o, u)?;
        if du + 1 < h || du > cap {
            continue;
        }
        adj.insert(u, memo.neighbors(o, u)?.into_iter().collect());
        cands.push(u);
    }
    let mut cur = vec![v];
    if extend_clique(&cands, &adj, h, 0, &mut cur) {
        let vs = cur.iter().map(|&x| x as u32).collect();
        return Ok(Some(Witness::new(WitnessKind::Clique { h: h as u32 }, vs)));
    }
    Ok(None)
}

fn extend_clique(
    cands: &[usize],
    adj: &BTreeMap<usize, FxHashSet<usize>>,
    h: usize,
    from: usize,
    cur: &mut Vec<usize>,
) -> bool {
    if cur.len() == h {
        return true;
    }
    for j in from..cands.len() {
        let u = cands[j];
        // cur[0] is adjacent to every candidate by construction
        if cur[1..].iter().all(|w| adj[w].contains(&u)) {
            cur.push(u);
            if extend_clique(cands, adj, h, j + 1, cur) {
                return true;
            }
            cur.pop();
        }
    }
    false
}

fn probe_function<O: FunctionAccess + ?Sized>(
    oracle: &mut O,
    target: &ProbeTarget,
    budget: Option<u64>,
    rng: &mut Rng,
) -> SearchOutcome {
    let mut o = Budgeted::function(oracle, budget);
    let mut sampler = LazySampler::new(o.n());
    let mut memo = FnMemo::default();
    let mut attempts = 0;
    let res = (|| {
        while let Some(x) = sampler.next(rng) {
            attempts += 1;
            let (y, _) = memo.step(&mut o, x)?;
            match target {
                ProbeTarget::FixedPoint if y == x => return Ok(Some(Witness::fixed_point(x))),
                ProbeTarget::Pattern { pattern } => {
                    let anchor = [x as u32];
                    let hit = match_in(pattern, &memo.succ, &memo.pre, Some(&anchor), 1);
                    if let Some(img) = hit.first() {
                        return Ok(Some(pattern.witness(img)));
                    }
                }
                _ => {}
            }
        }
        Ok(None)
    })();
    let q = o.count();
    conclude(res, q, attempts, BTreeMap::new())
}

fn probe_graph<O: GraphAccess + ?Sized>(
    oracle: &mut O,
    target: &ProbeTarget,
    budget: Option<u64>,
    rng: &mut Rng,
) -> SearchOutcome {
    let mut o = Budgeted::graph(oracle, budget);
    let mut sampler = LazySampler::new(o.n());
    let mut memo = GraphMemo::default();
    let mut attempts = 0;
    let res = (|| {
        while let Some(v) = sampler.next(rng) {
            attempts += 1;
            let hit = match *target {
                ProbeTarget::Star { k } => probe_star(&mut o, &mut memo, v, k)?,
                ProbeTarget::Clique { h } => probe_clique(&mut o, &mut memo, v, h)?,
                _ => unreachable!(),
            };
            if hit.is_some() {
                return Ok(hit);
            }
        }
        Ok(None)
    })();
    let q = o.count();
    conclude(res, q, attempts, BTreeMap::new())
}

/// Certificate-free baseline: visits elements in uniformly random order
/// without repetition and checks the target locally around each one.
/// Exhausted once every element has been visited.
pub fn uniform_probe_baseline<O: FunctionAccess + GraphAccess + ?Sized>(
    oracle: &mut O,
    target: &ProbeTarget,
    budget: Option<u64>,
    rng: &mut Rng,
) -> SearchOutcome {
    if target.is_function_target() {
        probe_function(oracle, target, budget, rng)
    } else {
        probe_graph(oracle, target, budget, rng)
    }
}

/// Path of `k` steps: walk `k` times from a fresh start (drawn without
/// replacement) and succeed if the `k + 1` elements are distinct. Exhausted
/// once every start has failed.
pub fn path_k_search<O: FunctionAccess + ?Sized>(
    oracle: &mut O,
    k: usize,
    budget: Option<u64>,
    rng: &mut Rng,
) -> SearchOutcome {
    let mut o = Budgeted::function(oracle, budget);
    let mut sampler = LazySampler::new(o.n());
    let mut memo = FnMemo::default();
    let mut attempts = 0;
    let res = (|| {
        'start: while let Some(x) = sampler.next(rng) {
            attempts += 1;
            let mut seq = vec![x as u32];
            let mut seen = FxHashSet::default();
            seen.insert(x as u32);
            let mut cur = x;
            for _ in 0..k {
                let (y, _) = memo.step(&mut o, cur)?;
                if !seen.insert(y as u32) {
                    continue 'start;
                }
                seq.push(y as u32);
                cur = y;
            }
            return Ok(Some(Witness::new(WitnessKind::Path { k: k as u32 }, seq)));
        }
        Ok(None)
    })();
    let q = o.count();
    conclude(res, q, attempts, BTreeMap::new())
}

/// Edge or wedge by uniform sampling with replacement. A leaf sample looks
/// one step further for a wedge centered at its neighbor.
pub fn edge_wedge_search<O: GraphAccess + ?Sized>(
    oracle: &mut O,
    target: EdgeTarget,
    budget: Option<u64>,
    rng: &mut Rng,
) -> SearchOutcome {
    let mut o = Budgeted::graph(oracle, budget);
    let n = o.n();
    let mut attempts = 0;
    let res = (|| loop {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let d = o.query_degree(u)?;
        match (target, d) {
            (_, 0) => {}
            (EdgeTarget::Edge, _) => {
                let w = o.query_neighbor(u, 0)?;
                return Ok(Some(Witness::new(WitnessKind::Edge, vec![u as u32, w as u32])));
            }
            (EdgeTarget::Wedge, 1) => {
                let w = o.query_neighbor(u, 0)?;
                if o.query_degree(w)? >= 2 {
                    let a = o.query_neighbor(w, 0)?;
                    let b = if a == u { o.query_neighbor(w, 1)? } else { a };
                    return Ok(Some(Witness::star(w, &[u, b])));
                }
            }
            (EdgeTarget::Wedge, _) => {
                let a = o.query_neighbor(u, 0)?;
                let b = o.query_neighbor(u, 1)?;
                return Ok(Some(Witness::star(u, &[a, b])));
            }
        }
    })();
    let q = o.count();
    conclude(res, q, attempts, BTreeMap::new())
}
