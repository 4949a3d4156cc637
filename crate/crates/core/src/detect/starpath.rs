use std::collections::BTreeMap;

use rand::Rng as _;

use super::baseline::probe_star;
use super::{conclude, Budgeted, GraphMemo, SearchOutcome};
use crate::oracle::{GraphAccess, OracleError, Witness};
use crate::rng::Rng;

/// Signals a planted center seen on the way.
enum Nav<T> {
    At(T),
    Star(Witness),
}

struct Walker<'a, O: ?Sized> {
    o: &'a mut O,
    memo: GraphMemo,
    k: usize,
}

impl<O: GraphAccess + ?Sized> Walker<'_, O> {
    /// Degree of `v`, or the star if `v` is heavy enough.
    fn degree(&mut self, v: usize) -> Result<Nav<usize>, OracleError> {
        let d = self.memo.degree(self.o, v)?;
        if d >= self.k {
            let leaves: Vec<usize> = (0..self.k)
                .map(|i| self.memo.neighbor(self.o, v, i))
                .collect::<Result<_, _>>()?;
            return Ok(Nav::Star(Witness::star(v, &leaves)));
        }
        Ok(Nav::At(d))
    }

    /// Neighbors of `v` with their degrees.
    fn around(&mut self, v: usize) -> Result<Nav<Vec<(usize, usize)>>, OracleError> {
        let mut out = Vec::new();
        for w in self.memo.neighbors(self.o, v)? {
            match self.degree(w)? {
                Nav::At(d) => out.push((w, d)),
                Nav::Star(s) => return Ok(Nav::Star(s)),
            }
        }
        Ok(Nav::At(out))
    }

    /// Follows a path of degree-2 vertices from `cur` (arrived from `prev`)
    /// until a vertex of another degree; returns it with its predecessor.
    fn slide(
        &mut self,
        mut prev: usize,
        mut cur: usize,
        cap: usize,
    ) -> Result<Nav<Option<(usize, usize, usize)>>, OracleError> {
        for _ in 0..cap {
            let d = match self.degree(cur)? {
                Nav::At(d) => d,
                Nav::Star(s) => return Ok(Nav::Star(s)),
            };
            if d != 2 {
                return Ok(Nav::At(Some((prev, cur, d))));
            }
            let next = self.memo.other(self.o, cur, prev)?;
            prev = cur;
            cur = next;
        }
        Ok(Nav::At(None))
    }

    /// From a uniform start, some backbone vertex (degree 3).
    fn reach_backbone(&mut self, rng: &mut Rng, cap: usize) -> Result<Nav<Option<usize>>, OracleError> {
        let s = rng.gen_range(0..self.o.n());
        let d = match self.degree(s)? {
            Nav::At(d) => d,
            Nav::Star(w) => return Ok(Nav::Star(w)),
        };
        match d {
            3 => Ok(Nav::At(Some(s))),
            1 | 2 => {
                let first = self.memo.neighbor(self.o, s, rng.gen_range(0..d))?;
                let end = match self.slide(s, first, cap)? {
                    Nav::Star(w) => return Ok(Nav::Star(w)),
                    Nav::At(e) => e,
                };
                match end {
                    Some((_, v, 3)) => Ok(Nav::At(Some(v))),
                    Some((_, _, 1)) if d == 2 => {
                        // bottom of a hanging path: go the other way
                        let back = self.memo.other(self.o, s, first)?;
                        match self.slide(s, back, cap)? {
                            Nav::Star(w) => Ok(Nav::Star(w)),
                            Nav::At(Some((_, v, 3))) => Ok(Nav::At(Some(v))),
                            Nav::At(_) => Ok(Nav::At(None)),
                        }
                    }
                    _ => Ok(Nav::At(None)),
                }
            }
            _ => Ok(Nav::At(None)),
        }
    }
}

/// Which end of the degree-3 stretch `v` is, judging by its neighbors:
/// `Some(1)` for `v_1` (a degree-1 neighbor), `Some(m - 1)` for `v_{m-1}`
/// (two degree-2 neighbors).
fn end_index(nb: &[(usize, usize)], m: usize) -> Option<usize> {
    if nb.iter().any(|&(_, d)| d == 1) {
        Some(1)
    } else if nb.iter().filter(|&&(_, d)| d == 2).count() >= 2 {
        Some(m - 1)
    } else {
        None
    }
}

/// Certificate-holding k-star search on the backbone layout. Reach a
/// backbone vertex, walk the backbone to an end to learn the index, move to
/// the certified column and sweep its hanging path. Any vertex of degree at
/// least `k` met on the way is reported. If the sweep finds nothing the
/// certificate was wrong and the search falls back to uniform probing.
pub fn cert_starpath_search<O: GraphAccess + ?Sized>(
    oracle: &mut O,
    index: u32,
    k: usize,
    budget: Option<u64>,
    rng: &mut Rng,
) -> SearchOutcome {
    let mut o = Budgeted::graph(oracle, budget);
    let n = o.n();
    let m = (n as f64).sqrt().floor() as usize;
    let cap = 4 * m + 8;
    let mut attempts = 0u64;
    let mut counters = BTreeMap::new();
    let mut w = Walker {
        o: &mut o,
        memo: GraphMemo::default(),
        k,
    };
    macro_rules! go {
        ($e:expr) => {
            match $e? {
                Nav::At(x) => x,
                Nav::Star(s) => return Ok(Some(s)),
            }
        };
    }
    let res = (|| {
        // the stretch walked so far, starting at the first backbone vertex
        let (stretch, end) = 'outer: loop {
            attempts += 1;
            if attempts > 64 {
                break 'outer (Vec::new(), None);
            }
            let Some(b) = go!(w.reach_backbone(rng, cap)) else {
                continue;
            };
            let nb = go!(w.around(b));
            if let Some(e) = end_index(&nb, m) {
                break (vec![b], Some(e));
            }
            let dirs: Vec<usize> = nb.iter().filter(|x| x.1 == 3).map(|x| x.0).collect();
            if dirs.len() != 2 {
                continue;
            }
            let mut stretch = vec![b];
            let mut prev = b;
            let mut cur = dirs[rng.gen_range(0..2)];
            for _ in 0..m {
                stretch.push(cur);
                let nb = go!(w.around(cur));
                if let Some(e) = end_index(&nb, m) {
                    break 'outer (stretch, Some(e));
                }
                let Some(&(next, _)) = nb.iter().find(|&&(x, d)| d == 3 && x != prev) else {
                    break;
                };
                prev = cur;
                cur = next;
            }
        };
        counters.insert("navigate_queries".to_string(), w.o.count());
        if let Some(e) = end {
            let (last, e, m) = (stretch.len() as i64 - 1, e as i64, m as i64);
            let idx = |j: usize| if e == 1 { 1 + last - j as i64 } else { e - (last - j as i64) };
            let target = (index as i64).clamp(1, m - 1);
            let mut host = (0..stretch.len())
                .find(|&j| idx(j) == target)
                .map(|j| stretch[j]);
            if host.is_none() {
                // extend past the first vertex, away from the end
                let b = stretch[0];
                let away = stretch.get(1).copied();
                let nb = go!(w.around(b));
                let mut prev = b;
                let mut cur = nb.iter().find(|&&(x, d)| d == 3 && Some(x) != away).map(|x| x.0);
                let mut i = idx(0);
                while let Some(c) = cur {
                    i = if e == 1 { i + 1 } else { i - 1 };
                    if i == target {
                        host = Some(c);
                        break;
                    }
                    if i <= 1 || i >= m - 1 {
                        break;
                    }
                    let nb = go!(w.around(c));
                    cur = nb.iter().find(|&&(x, d)| d == 3 && x != prev).map(|x| x.0);
                    prev = c;
                }
            }
            if let Some(h) = host {
                let nb = go!(w.around(h));
                for (top, d) in nb {
                    if d == 3 {
                        continue;
                    }
                    if d == 2 {
                        go!(w.slide(h, top, n));
                    }
                }
            }
        }
        counters.insert("sweep_queries".to_string(), w.o.count());
        // the hint did not pan out
        loop {
            if w.memo.degrees_known() == n {
                return Ok(None);
            }
            attempts += 1;
            let v = rng.gen_range(0..n);
            if let Some(s) = probe_star(w.o, &mut w.memo, v, k)? {
                return Ok(Some(s));
            }
        }
    })();
    let q = o.count();
    conclude(res, q, attempts, counters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::Status;
    use crate::gen::gen_starpath_graph;
    use crate::meta::Certificate;
    use crate::oracle::CountedOracle;
    use crate::rng::rng_from_seed;

    #[test]
    fn finds_planted_star_cheaply() {
        for seed in 0..20 {
            let g = gen_starpath_graph(4096, 4, seed).unwrap();
            let Certificate::BackboneIndex { index } = g.certificate else {
                panic!()
            };
            let gr = g.instance.as_graph().unwrap();
            let mut o = CountedOracle::graph(gr);
            let out = cert_starpath_search(&mut o, index, 4, None, &mut rng_from_seed(seed));
            assert_eq!(out.status, Status::Found);
            out.witness.unwrap().validate_graph(gr).unwrap();
            assert!(out.queries < 40 * 64, "seed {seed}: {} queries", out.queries);
        }
    }

    #[test]
    fn wrong_index_still_sound() {
        let g = gen_starpath_graph(1024, 4, 3).unwrap();
        let Certificate::BackboneIndex { index } = g.certificate else {
            panic!()
        };
        let gr = g.instance.as_graph().unwrap();
        let wrong = if index == 5 { 20 } else { 5 };
        let mut o = CountedOracle::graph(gr);
        let out = cert_starpath_search(&mut o, wrong, 4, Some(300), &mut rng_from_seed(1));
        if let Some(w) = out.witness {
            w.validate_graph(gr).unwrap();
        }
    }
}
