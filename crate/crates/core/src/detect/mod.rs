//! Search algorithms. Every detector sees its input only through
//! [`FunctionAccess`] or [`GraphAccess`] and reports how many queries it
//! spent.

mod baseline;
mod brute;
mod claw;
mod collision;
mod fixedpoint;
mod matcher;
mod star;
mod starpath;

use std::collections::BTreeMap;

use rand::Rng as _;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::oracle::{FunctionAccess, GraphAccess, OracleError, Witness};
use crate::rng::Rng;

pub use baseline::{edge_wedge_search, path_k_search, uniform_probe_baseline, EdgeTarget, ProbeTarget};
pub use brute::{brute_force_find, BruteError, BruteTarget, BRUTE_FORCE_LIMIT};
pub use claw::{claw_attempt, cert_claw_search};
pub use collision::{
    cert_collision_search, collision_attempt, multiscale_collision_search, AttemptResult,
    WalkMemory,
};
pub use fixedpoint::{cert_fixedpoint_search, FixedPointSearch};
pub use matcher::match_pattern;
pub use star::{cert_star_search, locate_good_centers};
pub use starpath::cert_starpath_search;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Found,
    Exhausted,
    BudgetExceeded,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Found => "found",
            Status::Exhausted => "exhausted",
            Status::BudgetExceeded => "budget-exceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub status: Status,
    pub witness: Option<Witness>,
    pub queries: u64,
    pub attempts: u64,
    /// Detector-specific tallies (phase costs, follow counts).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counters: BTreeMap<String, u64>,
}

impl SearchOutcome {
    pub fn found(&self) -> bool {
        self.status == Status::Found
    }
}

/// Turns a detector body's result into an outcome. Only budget exhaustion is
/// an expected oracle error; anything else means the detector asked an
/// ill-formed question.
pub(crate) fn conclude(
    res: Result<Option<Witness>, OracleError>,
    queries: u64,
    attempts: u64,
    counters: BTreeMap<String, u64>,
) -> SearchOutcome {
    let (status, witness) = match res {
        Ok(Some(w)) => (Status::Found, Some(w)),
        Ok(None) => (Status::Exhausted, None),
        Err(OracleError::BudgetExceeded(_)) => (Status::BudgetExceeded, None),
        Err(e) => panic!("detector issued an invalid query: {e}"),
    };
    SearchOutcome {
        status,
        witness,
        queries,
        attempts,
        counters,
    }
}

/// Caps the number of queries a detector may spend on top of any budget the
/// oracle itself enforces.
pub(crate) struct Budgeted<'o, O: ?Sized> {
    inner: &'o mut O,
    start: u64,
    budget: u64,
}

impl<'o, O: ?Sized> Budgeted<'o, O> {
    fn check(&self, used: u64) -> Result<(), OracleError> {
        if used - self.start >= self.budget {
            Err(OracleError::BudgetExceeded(self.budget))
        } else {
            Ok(())
        }
    }
}

impl<'o, O: FunctionAccess + ?Sized> Budgeted<'o, O> {
    pub(crate) fn function(inner: &'o mut O, budget: Option<u64>) -> Self {
        Budgeted {
            start: inner.count(),
            inner,
            budget: budget.unwrap_or(u64::MAX),
        }
    }
}

impl<'o, O: GraphAccess + ?Sized> Budgeted<'o, O> {
    pub(crate) fn graph(inner: &'o mut O, budget: Option<u64>) -> Self {
        Budgeted {
            start: inner.count(),
            inner,
            budget: budget.unwrap_or(u64::MAX),
        }
    }
}

impl<O: FunctionAccess + ?Sized> FunctionAccess for Budgeted<'_, O> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn query_function(&mut self, x: usize) -> Result<usize, OracleError> {
        self.check(self.inner.count())?;
        self.inner.query_function(x)
    }

    fn count(&self) -> u64 {
        self.inner.count() - self.start
    }
}

impl<O: GraphAccess + ?Sized> GraphAccess for Budgeted<'_, O> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn query_degree(&mut self, v: usize) -> Result<usize, OracleError> {
        self.check(self.inner.count())?;
        self.inner.query_degree(v)
    }

    fn query_neighbor(&mut self, v: usize, i: usize) -> Result<usize, OracleError> {
        self.check(self.inner.count())?;
        self.inner.query_neighbor(v, i)
    }

    fn count(&self) -> u64 {
        self.inner.count() - self.start
    }
}

/// Uniform sampling without replacement from `[0, n)` using a sparse
/// Fisher-Yates permutation.
pub(crate) struct LazySampler {
    n: usize,
    drawn: usize,
    swaps: FxHashMap<usize, usize>,
}

impl LazySampler {
    pub(crate) fn new(n: usize) -> Self {
        LazySampler {
            n,
            drawn: 0,
            swaps: FxHashMap::default(),
        }
    }

    pub(crate) fn next(&mut self, rng: &mut Rng) -> Option<usize> {
        if self.drawn == self.n {
            return None;
        }
        let j = rng.gen_range(self.drawn..self.n);
        let vj = *self.swaps.get(&j).unwrap_or(&j);
        let vd = *self.swaps.get(&self.drawn).unwrap_or(&self.drawn);
        self.swaps.insert(j, vd);
        self.drawn += 1;
        Some(vj)
    }
}

/// What a function detector has learned so far: known successors and, for
/// every known value, its known preimages in discovery order.
#[derive(Debug, Default, Clone)]
pub(crate) struct FnMemo {
    pub succ: FxHashMap<u32, u32>,
    pub pre: FxHashMap<u32, Vec<u32>>,
}

impl FnMemo {
    /// `f(x)`, free if already known. The second component reports a
    /// collision certified by a fresh answer.
    pub(crate) fn step<O: FunctionAccess + ?Sized>(
        &mut self,
        o: &mut O,
        x: usize,
    ) -> Result<(usize, Option<Witness>), OracleError> {
        if let Some(&y) = self.succ.get(&(x as u32)) {
            return Ok((y as usize, None));
        }
        let y = o.query_function(x)?;
        self.succ.insert(x as u32, y as u32);
        let known = self.pre.entry(y as u32).or_default();
        let hit = known
            .first()
            .map(|&p| Witness::collision(p as usize, x, y));
        known.push(x as u32);
        Ok((y, hit))
    }
}

/// Cached degree and neighbor answers for graph detectors.
#[derive(Debug, Default, Clone)]
pub(crate) struct GraphMemo {
    deg: FxHashMap<u32, u32>,
    nbr: FxHashMap<(u32, u32), u32>,
}

impl GraphMemo {
    /// How many vertices have a known degree.
    pub(crate) fn degrees_known(&self) -> usize {
        self.deg.len()
    }

    pub(crate) fn degree<O: GraphAccess + ?Sized>(
        &mut self,
        o: &mut O,
        v: usize,
    ) -> Result<usize, OracleError> {
        if let Some(&d) = self.deg.get(&(v as u32)) {
            return Ok(d as usize);
        }
        let d = o.query_degree(v)?;
        self.deg.insert(v as u32, d as u32);
        Ok(d)
    }

    pub(crate) fn neighbor<O: GraphAccess + ?Sized>(
        &mut self,
        o: &mut O,
        v: usize,
        i: usize,
    ) -> Result<usize, OracleError> {
        if let Some(&u) = self.nbr.get(&(v as u32, i as u32)) {
            return Ok(u as usize);
        }
        let u = o.query_neighbor(v, i)?;
        self.nbr.insert((v as u32, i as u32), u as u32);
        Ok(u)
    }

    pub(crate) fn neighbors<O: GraphAccess + ?Sized>(
        &mut self,
        o: &mut O,
        v: usize,
    ) -> Result<Vec<usize>, OracleError> {
        let d = self.degree(o, v)?;
        (0..d).map(|i| self.neighbor(o, v, i)).collect()
    }

    /// The neighbor of a degree-2 vertex `v` other than `prev`.
    pub(crate) fn other<O: GraphAccess + ?Sized>(
        &mut self,
        o: &mut O,
        v: usize,
        prev: usize,
    ) -> Result<usize, OracleError> {
        let a = self.neighbor(o, v, 0)?;
        if a != prev {
            return Ok(a);
        }
        self.neighbor(o, v, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{CountedOracle, FunctionInstance};
    use crate::rng::rng_from_seed;

    #[test]
    fn lazy_sampler_is_a_permutation() {
        let mut s = LazySampler::new(50);
        let mut rng = rng_from_seed(1);
        let mut seen: Vec<usize> = std::iter::from_fn(|| s.next(&mut rng)).collect();
        assert_eq!(seen.len(), 50);
        seen.sort_unstable();
        assert_eq!(seen, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn budget_wrapper_counts_from_its_start() {
        let f = FunctionInstance::identity(8);
        let mut o = CountedOracle::function(&f);
        o.query_function(0).unwrap();
        let mut b = Budgeted::function(&mut o, Some(2));
        b.query_function(1).unwrap();
        b.query_function(2).unwrap();
        assert_eq!(b.query_function(3), Err(OracleError::BudgetExceeded(2)));
        assert_eq!(FunctionAccess::count(&b), 2);
    }

    #[test]
    fn memo_reports_collisions_once_learned() {
        let f = FunctionInstance::new(vec![1, 0, 0]).unwrap();
        let mut o = CountedOracle::function(&f);
        let mut m = FnMemo::default();
        assert_eq!(m.step(&mut o, 1).unwrap(), (0, None));
        let (y, hit) = m.step(&mut o, 2).unwrap();
        assert_eq!(y, 0);
        assert_eq!(hit, Some(Witness::collision(1, 2, 0)));
        m.step(&mut o, 2).unwrap();
        assert_eq!(FunctionAccess::count(&o), 2);
    }
}
