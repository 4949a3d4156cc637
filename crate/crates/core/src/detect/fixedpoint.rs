use std::collections::BTreeMap;

use rand::Rng as _;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use super::matcher::match_in;
use super::{conclude, Budgeted, FnMemo, SearchOutcome};
use crate::gen::FunctionPattern;
use crate::oracle::{FunctionAccess, OracleError, Witness};
use crate::rng::Rng;

/// Walk counts and lengths for the three-phase search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSearch {
    pub short_walks: usize,
    pub short_len: usize,
    pub long_walks: usize,
    pub long_len: usize,
}

impl FixedPointSearch {
    /// `C√n` short walks of length `C n^{1/4}` and `C n^{1/4}` long walks of
    /// length `C√n`.
    pub fn with_constant(n: usize, c: f64) -> Self {
        let nf = n as f64;
        let q = |x: f64| (c * x).ceil().max(1.0) as usize;
        FixedPointSearch {
            short_walks: q(nf.sqrt()),
            short_len: q(nf.powf(0.25)),
            long_walks: q(nf.powf(0.25)),
            long_len: q(nf.sqrt()),
        }
    }
}

struct State<'m> {
    memo: &'m mut FnMemo,
    pattern: &'m FunctionPattern,
}

impl State<'_> {
    /// Walks at most `len` steps from `start`, stopping at the first repeat.
    /// Returns the visited elements, or the witness if one appeared.
    fn walk<O: FunctionAccess + ?Sized>(
        &mut self,
        o: &mut O,
        start: usize,
        len: usize,
    ) -> Result<Result<Vec<u32>, Witness>, OracleError> {
        let mut seq = vec![start as u32];
        let mut seen = FxHashSet::default();
        seen.insert(start as u32);
        let mut cur = start;
        for _ in 0..len {
            let (y, _) = self.memo.step(o, cur)?;
            if y == cur && self.pattern.is_fixed_point() {
                return Ok(Err(Witness::fixed_point(cur)));
            }
            if !seen.insert(y as u32) {
                break;
            }
            seq.push(y as u32);
            cur = y;
        }
        Ok(Ok(seq))
    }

    fn search_pattern(&self, anchor: &[u32]) -> Option<Witness> {
        if self.pattern.is_fixed_point() {
            return None;
        }
        match_in(self.pattern, &self.memo.succ, &self.memo.pre, Some(anchor), 1)
            .first()
            .map(|img| self.pattern.witness(img))
    }
}

/// Whether some certified prime has three of the positions in one residue
/// class, i.e. three intersections pairwise a multiple of `p` apart.
fn spaced_by_certified(positions: &[u32], primes: &[u32]) -> bool {
    primes.iter().filter(|&&p| p > 0).any(|&p| {
        let mut classes: FxHashMap<u32, u32> = FxHashMap::default();
        positions.iter().any(|&x| {
            let c = classes.entry(x % p).or_insert(0);
            *c += 1;
            *c >= 3
        })
    })
}

/// Certificate-holding search for a pattern planted on prime-spaced feeder
/// cycles. Each round samples short walks, then long walks, then follows
/// every long walk whose short-walk intersections are spaced by a certified
/// prime until it terminates. The pattern is recognised from everything
/// learned so far. Rounds repeat until the budget runs out.
pub fn cert_fixedpoint_search<O: FunctionAccess + ?Sized>(
    oracle: &mut O,
    primes: &[u32],
    pattern: &FunctionPattern,
    params: FixedPointSearch,
    budget: Option<u64>,
    rng: &mut Rng,
) -> SearchOutcome {
    let mut o = Budgeted::function(oracle, budget);
    let n = o.n();
    let mut memo = FnMemo::default();
    let mut st = State {
        memo: &mut memo,
        pattern,
    };
    let mut attempts = 0u64;
    let mut counters: BTreeMap<String, u64> = BTreeMap::new();
    let bump = |counters: &mut BTreeMap<String, u64>, k: &str, by: u64| {
        *counters.entry(k.to_string()).or_insert(0) += by;
    };
    let res = (|| loop {
        if st.memo.succ.len() == n {
            return Ok(None);
        }
        attempts += 1;
        let before = o.count();
        let mut shorts = Vec::with_capacity(params.short_walks);
        for _ in 0..params.short_walks {
            match st.walk(&mut o, rng.gen_range(0..n), params.short_len)? {
                Ok(seq) => shorts.push(seq),
                Err(w) => return Ok(Some(w)),
            }
        }
        let mid = o.count();
        bump(&mut counters, "phase1_queries", mid - before);
        let mut longs = Vec::with_capacity(params.long_walks);
        for _ in 0..params.long_walks {
            match st.walk(&mut o, rng.gen_range(0..n), params.long_len)? {
                Ok(seq) => longs.push(seq),
                Err(w) => return Ok(Some(w)),
            }
        }
        let end = o.count();
        bump(&mut counters, "phase2_queries", end - mid);

        // first element of each short walk inside each long walk
        let mut at: FxHashMap<u32, Vec<(u32, u32)>> = FxHashMap::default();
        for (j, seq) in longs.iter().enumerate() {
            for (pos, &x) in seq.iter().enumerate() {
                at.entry(x).or_default().push((j as u32, pos as u32));
            }
        }
        let mut hits: Vec<FxHashSet<u32>> = vec![FxHashSet::default(); longs.len()];
        for seq in &shorts {
            let mut done = FxHashSet::default();
            for x in seq {
                if let Some(list) = at.get(x) {
                    for &(j, pos) in list {
                        if done.insert(j) {
                            hits[j as usize].insert(pos);
                        }
                    }
                }
            }
        }
        for (j, seq) in longs.iter().enumerate() {
            let positions: Vec<u32> = hits[j].iter().copied().collect();
            if !spaced_by_certified(&positions, primes) {
                continue;
            }
            bump(&mut counters, "follows", 1);
            let b = o.count();
            let last = *seq.last().unwrap() as usize;
            let tail = st.walk(&mut o, last, n)?;
            bump(&mut counters, "phase3_queries", o.count() - b);
            let tail = match tail {
                Ok(t) => t,
                Err(w) => return Ok(Some(w)),
            };
            if let Some(w) = st.search_pattern(&tail) {
                return Ok(Some(w));
            }
            bump(&mut counters, "false_follows", 1);
        }
    })();
    let q = o.count();
    conclude(res, q, attempts, counters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::Status;
    use crate::gen::{gen_fixedpoint_function, FixedPointParams};
    use crate::meta::Certificate;
    use crate::oracle::{CountedOracle, FunctionInstance};
    use crate::rng::rng_from_seed;

    #[test]
    fn residue_rule() {
        assert!(spaced_by_certified(&[1, 8, 15], &[7]));
        assert!(!spaced_by_certified(&[1, 8, 16], &[7]));
        assert!(spaced_by_certified(&[0, 3, 5, 10, 9], &[5, 3]));
        assert!(!spaced_by_certified(&[0, 7], &[7]));
    }

    #[test]
    fn finds_planted_fixed_point() {
        let p = FixedPointParams {
            widen: true,
            ..Default::default()
        };
        let g = gen_fixedpoint_function(1 << 12, &p, 5).unwrap();
        let Certificate::FixedPointPrimes { primes } = g.certificate.clone() else {
            panic!()
        };
        let f = g.instance.as_function().unwrap();
        let mut o = CountedOracle::function(f);
        let mut rng = rng_from_seed(9);
        let s = FixedPointSearch::with_constant(1 << 12, 1.0);
        let out = cert_fixedpoint_search(&mut o, &primes, &p.pattern, s, None, &mut rng);
        assert_eq!(out.status, Status::Found);
        out.witness.unwrap().validate_function(f).unwrap();
        assert_eq!(out.queries, o.transcript().len() as u64);
    }

    #[test]
    fn no_fixed_point_no_witness() {
        let f = FunctionInstance::new((0..256u32).map(|x| (x + 1) % 256).collect()).unwrap();
        let mut o = CountedOracle::function(&f);
        let mut rng = rng_from_seed(1);
        let s = FixedPointSearch::with_constant(256, 1.0);
        let fp = FunctionPattern::fixed_point();
        let out = cert_fixedpoint_search(&mut o, &[2, 3], &fp, s, Some(2000), &mut rng);
        assert_ne!(out.status, Status::Found);
    }
}
