use std::collections::BTreeMap;

use rand::Rng as _;

use super::{conclude, AttemptResult, Budgeted, SearchOutcome};
use crate::oracle::{GraphAccess, OracleError, Witness};
use crate::rng::Rng;

fn claw_at<O: GraphAccess + ?Sized>(o: &mut O, v: usize) -> Result<Witness, OracleError> {
    let leaves = [
        o.query_neighbor(v, 0)?,
        o.query_neighbor(v, 1)?,
        o.query_neighbor(v, 2)?,
    ];
    Ok(Witness::star(v, &leaves))
}

/// One walk from `start`: a vertex of degree at least 3 is a claw center;
/// otherwise follow the path (random direction at a degree-2 start) for at
/// most `cap` moves, stopping at a dead end.
pub fn claw_attempt<O: GraphAccess + ?Sized>(
    o: &mut O,
    start: usize,
    cap: u64,
    rng: &mut Rng,
) -> Result<AttemptResult, OracleError> {
    let before = o.count();
    let done = |o: &O, witness| AttemptResult {
        queries: o.count() - before,
        witness,
    };
    let d = o.query_degree(start)?;
    if d >= 3 {
        let w = claw_at(o, start)?;
        return Ok(done(o, Some(w)));
    }
    if d == 0 {
        return Ok(done(o, None));
    }
    let dir = if d == 2 { rng.gen_range(0..2) } else { 0 };
    let mut prev = start;
    let mut cur = o.query_neighbor(start, dir)?;
    let mut moves = 1;
    loop {
        let d = o.query_degree(cur)?;
        if d >= 3 {
            let w = claw_at(o, cur)?;
            return Ok(done(o, Some(w)));
        }
        if d < 2 || moves >= cap {
            return Ok(done(o, None));
        }
        let a = o.query_neighbor(cur, 0)?;
        let next = if a != prev { a } else { o.query_neighbor(cur, 1)? };
        prev = cur;
        cur = next;
        moves += 1;
    }
}

/// Certificate-holding claw search: repeated [`claw_attempt`]s with cap `2^t`
/// from uniform starts.
pub fn cert_claw_search<O: GraphAccess + ?Sized>(
    oracle: &mut O,
    t: u32,
    budget: Option<u64>,
    rng: &mut Rng,
) -> SearchOutcome {
    let mut o = Budgeted::graph(oracle, budget);
    let n = o.n();
    let cap = 1u64 << t.min(62);
    let mut attempts = 0;
    let res = (|| loop {
        attempts += 1;
        let start = rng.gen_range(0..n);
        if let Some(w) = claw_attempt(&mut o, start, cap, rng)?.witness {
            return Ok(Some(w));
        }
    })();
    let q = o.count();
    conclude(res, q, attempts, BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::Status;
    use crate::oracle::{CountedOracle, GraphInstance};
    use crate::rng::rng_from_seed;

    #[test]
    fn walks_to_the_claw() {
        // path 0-1-2-3 with pendants 4, 5 on 3
        let g = GraphInstance::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (3, 5)]).unwrap();
        let mut rng = rng_from_seed(3);
        let mut o = CountedOracle::graph(&g);
        let r = claw_attempt(&mut o, 0, 8, &mut rng).unwrap();
        r.witness.unwrap().validate_graph(&g).unwrap();
    }

    #[test]
    fn paths_have_no_claws() {
        let g = GraphInstance::from_edges(5, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut rng = rng_from_seed(3);
        let mut o = CountedOracle::graph(&g);
        let out = cert_claw_search(&mut o, 2, Some(300), &mut rng);
        assert_eq!(out.status, Status::BudgetExceeded);
    }
}
