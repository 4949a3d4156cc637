use rustc_hash::{FxHashMap, FxHashSet};

use crate::gen::FunctionPattern;

/// Injective images of `pattern` inside the partial function `succ`: vertex
/// `v` maps to `img[v]` and every pattern edge `(a, b)` has
/// `succ[img[a]] = img[b]`. With `anchor`, only images touching one of the
/// anchor elements are returned. Stops after `limit` images.
pub fn match_pattern(
    pattern: &FunctionPattern,
    succ: &FxHashMap<u32, u32>,
    anchor: Option<&[u32]>,
    limit: usize,
) -> Vec<Vec<u32>> {
    let mut pre: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    for (&x, &y) in succ {
        pre.entry(y).or_default().push(x);
    }
    match_in(pattern, succ, &pre, anchor, limit)
}

/// [`match_pattern`] with the preimage lists supplied by the caller.
pub(crate) fn match_in(
    pattern: &FunctionPattern,
    succ: &FxHashMap<u32, u32>,
    pre: &FxHashMap<u32, Vec<u32>>,
    anchor: Option<&[u32]>,
    limit: usize,
) -> Vec<Vec<u32>> {
    let k = pattern.vertices as usize;
    let mut out = Vec::new();
    let mut seen: FxHashSet<Vec<u32>> = FxHashSet::default();
    let roots: Vec<(u32, Vec<u32>)> = match anchor {
        Some(a) => (0..pattern.vertices).map(|v| (v, a.to_vec())).collect(),
        None => vec![free_root(pattern, succ, pre)],
    };
    for (root, cands) in roots {
        let order = visit_order(pattern, root);
        let mut m = Matcher {
            pattern,
            succ,
            pre,
            order: &order,
            img: vec![u32::MAX; k],
            used: FxHashSet::default(),
            out: &mut out,
            seen: &mut seen,
            limit,
        };
        m.search(0, Some(&cands));
        if out.len() >= limit {
            break;
        }
    }
    out
}

/// The most selective starting vertex and its candidate images.
fn free_root(
    p: &FunctionPattern,
    succ: &FxHashMap<u32, u32>,
    pre: &FxHashMap<u32, Vec<u32>>,
) -> (u32, Vec<u32>) {
    if let Some(&(v, _)) = p.edges.iter().find(|e| e.0 == e.1) {
        let c = succ.iter().filter(|(x, y)| x == y).map(|(&x, _)| x).collect();
        return (v, c);
    }
    let (v, d) = (0..p.vertices)
        .map(|v| (v, p.in_degree(v)))
        .max_by_key(|&(v, d)| (d, std::cmp::Reverse(v)))
        .unwrap();
    if d > 0 {
        let c = pre
            .iter()
            .filter(|(_, xs)| xs.len() >= d)
            .map(|(&y, _)| y)
            .collect();
        return (v, c);
    }
    (v, succ.keys().copied().collect())
}

/// Vertices so that, within each weakly connected component, every vertex
/// after the first shares an edge with an earlier one.
fn visit_order(p: &FunctionPattern, root: u32) -> Vec<u32> {
    let k = p.vertices as usize;
    let mut order = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    let mut starts = std::iter::once(root).chain(0..p.vertices);
    while order.len() < k {
        let s = starts.find(|&v| !placed[v as usize]).unwrap();
        placed[s as usize] = true;
        order.push(s);
        let mut head = order.len() - 1;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &(a, b) in &p.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !placed[y as usize] {
                        placed[y as usize] = true;
                        order.push(y);
                    }
                }
            }
        }
    }
    order
}

struct Matcher<'a> {
    pattern: &'a FunctionPattern,
    succ: &'a FxHashMap<u32, u32>,
    pre: &'a FxHashMap<u32, Vec<u32>>,
    order: &'a [u32],
    img: Vec<u32>,
    used: FxHashSet<u32>,
    out: &'a mut Vec<Vec<u32>>,
    seen: &'a mut FxHashSet<Vec<u32>>,
    limit: usize,
}

impl Matcher<'_> {
    fn candidates(&self, v: u32) -> Option<Vec<u32>> {
        for &(a, b) in &self.pattern.edges {
            if b == v && a != v && self.img[a as usize] != u32::MAX {
                return Some(self.succ.get(&self.img[a as usize]).copied().into_iter().collect());
            }
            if a == v && b != v && self.img[b as usize] != u32::MAX {
                return Some(self.pre.get(&self.img[b as usize]).cloned().unwrap_or_default());
            }
        }
        None
    }

    fn consistent(&self, v: u32) -> bool {
        self.pattern.edges.iter().all(|&(a, b)| {
            if a != v && b != v {
                return true;
            }
            let (ia, ib) = (self.img[a as usize], self.img[b as usize]);
            ia == u32::MAX || ib == u32::MAX || self.succ.get(&ia) == Some(&ib)
        })
    }

    fn search(&mut self, depth: usize, root_cands: Option<&[u32]>) {
        if self.out.len() >= self.limit {
            return;
        }
        if depth == self.order.len() {
            if self.seen.insert(self.img.clone()) {
                self.out.push(self.img.clone());
            }
            return;
        }
        let v = self.order[depth];
        let cands = match self.candidates(v) {
            Some(c) => c,
            None if depth == 0 => root_cands.map(<[u32]>::to_vec).unwrap_or_default(),
            None => self.succ.keys().copied().collect(),
        };
        for c in cands {
            if self.used.contains(&c) {
                continue;
            }
            self.img[v as usize] = c;
            self.used.insert(c);
            if self.consistent(v) {
                self.search(depth + 1, None);
            }
            self.used.remove(&c);
            self.img[v as usize] = u32::MAX;
            if self.out.len() >= self.limit {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(succ: &[u32]) -> FxHashMap<u32, u32> {
        succ.iter().enumerate().map(|(x, &y)| (x as u32, y)).collect()
    }

    #[test]
    fn finds_three_collision() {
        // 0, 1, 2 -> 3; 4 -> 3 too, 5 -> 5
        let succ = table(&[3, 3, 3, 4, 3, 5]);
        let p = FunctionPattern::three_collision();
        let all = match_pattern(&p, &succ, None, usize::MAX);
        // choose 3 of the 4 preimages {0,1,2,4}, in every order: 4 * 6
        assert_eq!(all.len(), 24);
        for img in &all {
            assert_eq!(img[3], 3);
        }
    }

    #[test]
    fn fixed_points() {
        let succ = table(&[0, 2, 1, 3]);
        let p = FunctionPattern::fixed_point();
        let mut all = match_pattern(&p, &succ, None, usize::MAX);
        all.sort();
        assert_eq!(all, vec![vec![0], vec![3]]);
    }

    #[test]
    fn anchored_search_touches_anchor() {
        let succ = table(&[3, 3, 3, 4, 3, 5]);
        let p = FunctionPattern::three_collision();
        let some = match_pattern(&p, &succ, Some(&[4]), usize::MAX);
        assert!(!some.is_empty());
        assert!(some.iter().all(|img| img.contains(&4)));
    }
}
