use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use super::matcher::match_in;
use crate::gen::FunctionPattern;
use crate::oracle::{FunctionInstance, GraphInstance, Instance, Witness, WitnessKind};

/// Largest instance the combinatorial targets will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 1 << 13;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "kebab-case")]
pub enum BruteTarget {
    /// Unordered pairs `{x, y}` with `f(x) = f(y)`.
    Collision,
    FixedPoint,
    /// Simple forward paths of `k` steps, one per start.
    Path { k: usize },
    /// Copies of the pattern, counted up to its automorphisms.
    Pattern { pattern: FunctionPattern },
    Edge,
    /// One witness per vertex of degree at least `k`.
    Star { k: usize },
    Clique { h: usize },
}

impl BruteTarget {
    fn is_function_target(&self) -> bool {
        matches!(
            self,
            BruteTarget::Collision
                | BruteTarget::FixedPoint
                | BruteTarget::Path { .. }
                | BruteTarget::Pattern { .. }
        )
    }

    fn combinatorial(&self) -> bool {
        matches!(self, BruteTarget::Pattern { .. } | BruteTarget::Clique { .. })
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BruteError {
    #[error("n = {n} exceeds the brute-force limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("target does not apply to this instance model")]
    ModelMismatch,
}

/// Every witness of `target` in the raw instance, by exhaustive search.
pub fn brute_force_find(inst: &Instance, target: &BruteTarget) -> Result<Vec<Witness>, BruteError> {
    if target.combinatorial() && inst.n() > BRUTE_FORCE_LIMIT {
        return Err(BruteError::TooLarge {
            n: inst.n(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    match (inst, target.is_function_target()) {
        (Instance::Function(f), true) => Ok(function_witnesses(f, target)),
        (Instance::Graph(g), false) => Ok(graph_witnesses(g, target)),
        _ => Err(BruteError::ModelMismatch),
    }
}

fn function_witnesses(f: &FunctionInstance, target: &BruteTarget) -> Vec<Witness> {
    let n = f.n();
    match target {
        BruteTarget::Collision => {
            let mut pre: Vec<Vec<usize>> = vec![Vec::new(); n];
            for x in 0..n {
                pre[f.f(x)].push(x);
            }
            let mut out = Vec::new();
            for (z, xs) in pre.iter().enumerate() {
                for i in 0..xs.len() {
                    for j in i + 1..xs.len() {
                        out.push(Witness::collision(xs[i], xs[j], z));
                    }
                }
            }
            out
        }
        BruteTarget::FixedPoint => (0..n)
            .filter(|&x| f.f(x) == x)
            .map(Witness::fixed_point)
            .collect(),
        BruteTarget::Path { k } => (0..n)
            .filter_map(|x| {
                let mut seq = vec![x as u32];
                let mut cur = x;
                for _ in 0..*k {
                    cur = f.f(cur);
                    if seq.contains(&(cur as u32)) {
                        return None;
                    }
                    seq.push(cur as u32);
                }
                Some(Witness::new(WitnessKind::Path { k: *k as u32 }, seq))
            })
            .collect(),
        BruteTarget::Pattern { pattern } => {
            let succ: FxHashMap<u32, u32> = (0..n).map(|x| (x as u32, f.f(x) as u32)).collect();
            let mut pre: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
            for x in 0..n {
                pre.entry(f.f(x) as u32).or_default().push(x as u32);
            }
            let mut seen = FxHashSet::default();
            match_in(pattern, &succ, &pre, None, usize::MAX)
                .into_iter()
                .filter(|img| {
                    let mut key: Vec<(u32, u32)> = pattern
                        .edges
                        .iter()
                        .map(|&(a, b)| (img[a as usize], img[b as usize]))
                        .collect();
                    key.sort_unstable();
                    let mut vs = img.clone();
                    vs.sort_unstable();
                    seen.insert((vs, key))
                })
                .map(|img| pattern.witness(&img))
                .collect()
        }
        _ => unreachable!(),
    }
}

fn graph_witnesses(g: &GraphInstance, target: &BruteTarget) -> Vec<Witness> {
    let n = g.n();
    match target {
        BruteTarget::Edge => (0..n)
            .flat_map(|u| {
                g.neighbors(u)
                    .iter()
                    .filter(move |&&v| v as usize > u)
                    .map(move |&v| Witness::new(WitnessKind::Edge, vec![u as u32, v]))
            })
            .collect(),
        BruteTarget::Star { k } => (0..n)
            .filter(|&v| g.degree(v) >= *k && *k >= 1)
            .map(|v| {
                let leaves: Vec<usize> = g.neighbors(v)[..*k].iter().map(|&u| u as usize).collect();
                Witness::star(v, &leaves)
            })
            .collect(),
        BruteTarget::Clique { h } => {
            let mut out = Vec::new();
            let mut cur = Vec::new();
            for v in 0..n {
                cur.push(v as u32);
                cliques_from(g, *h, &mut cur, &mut out);
                cur.pop();
            }
            out
        }
        _ => unreachable!(),
    }
}

/// Extends the increasing clique `cur` by larger neighbors of its last vertex.
fn cliques_from(g: &GraphInstance, h: usize, cur: &mut Vec<u32>, out: &mut Vec<Witness>) {
    if cur.len() == h {
        out.push(Witness::new(WitnessKind::Clique { h: h as u32 }, cur.clone()));
        return;
    }
    let last = *cur.last().unwrap();
    let mut next: Vec<u32> = g
        .neighbors(last as usize)
        .iter()
        .copied()
        .filter(|&u| u > last && cur.iter().all(|&w| g.has_edge(w as usize, u as usize)))
        .collect();
    next.sort_unstable();
    for u in next {
        cur.push(u);
        cliques_from(g, h, cur, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_element_table() {
        let f = Instance::Function(FunctionInstance::new(vec![1, 0, 0]).unwrap());
        let w = brute_force_find(&f, &BruteTarget::Collision).unwrap();
        assert_eq!(w, vec![Witness::collision(1, 2, 0)]);
    }

    #[test]
    fn empty_graph_has_nothing() {
        let g = Instance::Graph(GraphInstance::empty(9));
        for t in [
            BruteTarget::Edge,
            BruteTarget::Star { k: 2 },
            BruteTarget::Star { k: 3 },
            BruteTarget::Clique { h: 3 },
        ] {
            assert!(brute_force_find(&g, &t).unwrap().is_empty());
        }
    }

    #[test]
    fn counts_triangles_and_patterns() {
        let g = GraphInstance::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (1, 3)]).unwrap();
        let w = brute_force_find(&Instance::Graph(g), &BruteTarget::Clique { h: 3 }).unwrap();
        assert_eq!(w.len(), 2);
        // four preimages of 0: C(4,3) three-collisions
        let f = FunctionInstance::new(vec![0, 0, 0, 0, 0, 5]).unwrap();
        let p = FunctionPattern::three_collision();
        let t = BruteTarget::Pattern { pattern: p };
        let w = brute_force_find(&Instance::Function(f.clone()), &t).unwrap();
        // 0 maps to itself, so 0 is excluded as a distinct leaf only when
        // it is the value; preimages of 0 other than 0: {1,2,3,4}
        assert_eq!(w.len(), 4);
        for x in &w {
            x.validate_function(&f).unwrap();
        }
    }

    #[test]
    fn size_guard() {
        let f = Instance::Function(FunctionInstance::identity(BRUTE_FORCE_LIMIT + 1));
        let t = BruteTarget::Pattern {
            pattern: FunctionPattern::fixed_point(),
        };
        assert!(matches!(brute_force_find(&f, &t), Err(BruteError::TooLarge { .. })));
        assert!(brute_force_find(&f, &BruteTarget::FixedPoint).is_ok());
    }
}
