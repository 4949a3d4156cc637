use std::collections::BTreeMap;

use rand::Rng as _;
use rustc_hash::FxHashSet;

use super::{conclude, Budgeted, GraphMemo, SearchOutcome};
use crate::oracle::{GraphAccess, OracleError, Witness, WitnessKind};
use crate::rng::Rng;

/// Samples vertices until a center of every certified degree is known. A
/// degree-1 sample points at its center; a sample whose own degree is
/// certified is taken as a center. Returns the centers in certificate order,
/// or `None` once every degree is known and some certified degree never
/// showed up (repeat samples are free, so the budget alone cannot stop it).
fn locate<O: GraphAccess + ?Sized>(
    o: &mut O,
    memo: &mut GraphMemo,
    degrees: &[u32],
    rng: &mut Rng,
) -> Result<Option<Vec<usize>>, OracleError> {
    let n = o.n();
    let wanted: FxHashSet<u32> = degrees.iter().copied().collect();
    let mut found: BTreeMap<u32, usize> = BTreeMap::new();
    while found.len() < wanted.len() {
        if memo.degrees_known() == n {
            return Ok(None);
        }
        let v = rng.gen_range(0..n);
        let d = memo.degree(o, v)?;
        let c = if d == 1 { memo.neighbor(o, v, 0)? } else { v };
        let dc = memo.degree(o, c)? as u32;
        if wanted.contains(&dc) {
            found.entry(dc).or_insert(c);
        }
    }
    Ok(Some(degrees.iter().map(|d| found[d]).collect()))
}

/// Runs only the center-location phase of [`cert_star_search`]: the good
/// centers, one per certified degree, in certificate order. `None` if the
/// graph has no vertex of some certified degree.
pub fn locate_good_centers<O: GraphAccess + ?Sized>(
    oracle: &mut O,
    degrees: &[u32],
    budget: Option<u64>,
    rng: &mut Rng,
) -> Result<Option<Vec<usize>>, OracleError> {
    let mut o = Budgeted::graph(oracle, budget);
    locate(&mut o, &mut GraphMemo::default(), degrees, rng)
}

/// An `h`-clique among `cands`, using the known neighbor lists.
fn clique_among(cands: &[usize], adj: &BTreeMap<usize, FxHashSet<usize>>, h: usize) -> Option<Vec<usize>> {
    fn grow(
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
            let v = cands[j];
            if cur.iter().all(|u| adj[u].contains(&v)) {
                cur.push(v);
                if grow(cands, adj, h, j + 1, cur) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    let mut cur = Vec::new();
    grow(cands, adj, h, 0, &mut cur).then_some(cur)
}

/// Certificate-holding clique search on the star layout: find the centers
/// whose degrees the certificate lists, collect their leaves of degree at
/// least 2 and look for the clique among them. An empty certificate means
/// nothing is planted, so the search stops at once. Exhausted if the
/// certified centers carry no clique.
pub fn cert_star_search<O: GraphAccess + ?Sized>(
    oracle: &mut O,
    degrees: &[u32],
    budget: Option<u64>,
    rng: &mut Rng,
) -> SearchOutcome {
    let mut o = Budgeted::graph(oracle, budget);
    let h = degrees.len();
    let mut memo = GraphMemo::default();
    let mut counters = BTreeMap::new();
    let res = (|| {
        if h == 0 {
            return Ok(None);
        }
        let Some(centers) = locate(&mut o, &mut memo, degrees, rng)? else {
            return Ok(None);
        };
        counters.insert("locate_queries".to_string(), o.count());
        let mut flagged = Vec::new();
        for &c in &centers {
            for leaf in memo.neighbors(&mut o, c)? {
                if memo.degree(&mut o, leaf)? >= 2 && !flagged.contains(&leaf) {
                    flagged.push(leaf);
                }
            }
        }
        let mut adj = BTreeMap::new();
        for &v in &flagged {
            let nb: FxHashSet<usize> = memo.neighbors(&mut o, v)?.into_iter().collect();
            adj.insert(v, nb);
        }
        Ok(clique_among(&flagged, &adj, h).map(|c| {
            let vs = c.iter().map(|&v| v as u32).collect();
            Witness::new(WitnessKind::Clique { h: h as u32 }, vs)
        }))
    })();
    let q = o.count();
    conclude(res, q, 1, counters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::Status;
    use crate::gen::{gen_star_graph, GraphPattern};
    use crate::meta::Certificate;
    use crate::oracle::CountedOracle;
    use crate::rng::rng_from_seed;

    #[test]
    fn finds_triangle() {
        let g = gen_star_graph(4096, GraphPattern::Clique(3), 4).unwrap();
        let Certificate::StarDegrees { degrees } = g.certificate.clone() else {
            panic!()
        };
        let gr = g.instance.as_graph().unwrap();
        let mut o = CountedOracle::graph(gr);
        let mut rng = rng_from_seed(1);
        let out = cert_star_search(&mut o, &degrees, None, &mut rng);
        assert_eq!(out.status, Status::Found);
        out.witness.unwrap().validate_graph(gr).unwrap();
    }

    #[test]
    fn empty_certificate_costs_nothing() {
        let g = gen_star_graph(1024, GraphPattern::None, 4).unwrap();
        let mut o = CountedOracle::graph(g.instance.as_graph().unwrap());
        let out = cert_star_search(&mut o, &[], None, &mut rng_from_seed(1));
        assert_eq!((out.status, out.queries), (Status::Exhausted, 0));
    }

    #[test]
    fn absent_degree_ends_exhausted() {
        let g = gen_star_graph(256, GraphPattern::Clique(3), 4).unwrap();
        let mut o = CountedOracle::graph(g.instance.as_graph().unwrap());
        let out = cert_star_search(&mut o, &[1000, 1001, 1002], None, &mut rng_from_seed(1));
        assert_eq!(out.status, Status::Exhausted);
        assert!(out.queries >= 256);
    }
}
