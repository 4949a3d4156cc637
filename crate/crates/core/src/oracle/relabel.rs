use rand::seq::SliceRandom;

use super::instance::{FunctionInstance, GraphInstance, Instance};
use crate::rng::rng_from_seed;

/// A permutation `σ` of `[n]` from internal labels to visible labels, stored
/// with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl Relabeling {
    pub fn identity(n: usize) -> Self {
        let forward: Vec<u32> = (0..n as u32).collect();
        Relabeling {
            inverse: forward.clone(),
            forward,
        }
    }

    /// Uniform permutation drawn from `seed`.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut forward: Vec<u32> = (0..n as u32).collect();
        forward.shuffle(&mut rng_from_seed(seed));
        Self::from_forward(forward).expect("shuffle yields a permutation")
    }

    pub fn from_forward(forward: Vec<u32>) -> Option<Self> {
        let n = forward.len();
        let mut inverse = vec![u32::MAX; n];
        for (x, &y) in forward.iter().enumerate() {
            let y = y as usize;
            if y >= n || inverse[y] != u32::MAX {
                return None;
            }
            inverse[y] = x as u32;
        }
        Some(Relabeling { forward, inverse })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.forward.len()
    }

    /// Internal label to visible label.
    #[inline]
    pub fn to_visible(&self, x: usize) -> usize {
        self.forward[x] as usize
    }

    /// Visible label to internal label.
    #[inline]
    pub fn to_internal(&self, y: usize) -> usize {
        self.inverse[y] as usize
    }

    pub fn inverse(&self) -> Relabeling {
        Relabeling {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn fixed_points(&self) -> usize {
        self.forward
            .iter()
            .enumerate()
            .filter(|&(x, &y)| x == y as usize)
            .count()
    }

    /// Conjugates `f` by this permutation: the result `g` satisfies
    /// `g(σ(x)) = σ(f(x))`, so cycle type and in-degree profile are kept.
    pub fn apply_function(&self, f: &FunctionInstance) -> FunctionInstance {
        assert_eq!(f.n(), self.n(), "relabeling size mismatch");
        let mut succ = vec![0u32; f.n()];
        for x in 0..f.n() {
            succ[self.to_visible(x)] = self.forward[f.f(x)];
        }
        let mut out = FunctionInstance::new(succ).expect("conjugate of a function is a function");
        if let Some(m) = f.meta() {
            out = out.with_meta(m.mapped(|v| self.forward[v as usize]));
        }
        out
    }

    /// Moves vertex `v`'s list to position `σ(v)`, mapping every entry and
    /// keeping list order.
    pub fn apply_graph(&self, g: &GraphInstance) -> GraphInstance {
        assert_eq!(g.n(), self.n(), "relabeling size mismatch");
        let mut adj = vec![Vec::new(); g.n()];
        for v in 0..g.n() {
            adj[self.to_visible(v)] = g
                .neighbors(v)
                .iter()
                .map(|&u| self.forward[u as usize])
                .collect();
        }
        let mut out = GraphInstance::from_adjacency_unchecked(&adj);
        if let Some(m) = g.meta() {
            out = out.with_meta(m.mapped(|v| self.forward[v as usize]));
        }
        out
    }

    pub fn apply(&self, inst: &Instance) -> Instance {
        match inst {
            Instance::Function(f) => Instance::Function(self.apply_function(f)),
            Instance::Graph(g) => Instance::Graph(self.apply_graph(g)),
        }
    }
}

/// Relabels an instance with a uniformly random permutation drawn from `seed`.
pub fn relabel(inst: &Instance, seed: u64) -> Instance {
    Relabeling::random(inst.n(), seed).apply(inst)
}
