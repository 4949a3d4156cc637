use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::meta::StructureMeta;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance must have at least one element")]
    Empty,
    #[error("succ[{x}] = {value} is outside [0, {n})")]
    SuccessorOutOfRange { x: usize, value: usize, n: usize },
    #[error("vertex {v} lists neighbor {u} outside [0, {n})")]
    NeighborOutOfRange { v: usize, u: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {0}-{1} is not symmetric")]
    Asymmetric(usize, usize),
    #[error("n = {0} exceeds the u32 label space")]
    TooLarge(usize),
}

/// A total function on `[n]`, stored as its successor array.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionInstance {
    succ: Vec<u32>,
    meta: Option<StructureMeta>,
}

impl FunctionInstance {
    pub fn new(succ: Vec<u32>) -> Result<Self, InstanceError> {
        let n = succ.len();
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        if n > u32::MAX as usize {
            return Err(InstanceError::TooLarge(n));
        }
        if let Some((x, &v)) = succ.iter().enumerate().find(|(_, &v)| v as usize >= n) {
            return Err(InstanceError::SuccessorOutOfRange {
                x,
                value: v as usize,
                n,
            });
        }
        Ok(FunctionInstance { succ, meta: None })
    }

    pub fn identity(n: usize) -> Self {
        FunctionInstance {
            succ: (0..n as u32).collect(),
            meta: None,
        }
    }

    pub fn with_meta(mut self, meta: StructureMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn strip_meta(mut self) -> Self {
        self.meta = None;
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.succ.len()
    }

    #[inline]
    pub fn f(&self, x: usize) -> usize {
        self.succ[x] as usize
    }

    pub fn succ(&self) -> &[u32] {
        &self.succ
    }

    pub fn meta(&self) -> Option<&StructureMeta> {
        self.meta.as_ref()
    }

    /// Preimage counts (in-degrees) of every element.
    pub fn in_degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.n()];
        for &y in &self.succ {
            d[y as usize] += 1;
        }
        d
    }

    /// Lengths of all cycles of the functional graph, sorted ascending.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.n();
        // 0 = unvisited, 1 = on current stack, 2 = done
        let mut state = vec![0u8; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if state[s] != 0 {
                continue;
            }
            let mut x = s;
            while state[x] == 0 {
                state[x] = 1;
                stack.push(x);
                x = self.f(x);
            }
            if state[x] == 1 {
                let mut len = 1;
                let mut y = self.f(x);
                while y != x {
                    len += 1;
                    y = self.f(y);
                }
                out.push(len);
            }
            for &y in &stack {
                state[y] = 2;
            }
            stack.clear();
        }
        out.sort_unstable();
        out
    }
}

/// An undirected simple graph in compressed adjacency form. The order of each
/// neighbor list is the construction order; oracles may rotate it.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphInstance {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    meta: Option<StructureMeta>,
}

impl GraphInstance {
    pub fn from_adjacency(adj: Vec<Vec<u32>>) -> Result<Self, InstanceError> {
        let n = adj.len();
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        if n > u32::MAX as usize {
            return Err(InstanceError::TooLarge(n));
        }
        let g = Self::from_adjacency_unchecked(&adj);
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn from_adjacency_unchecked(adj: &[Vec<u32>]) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        let mut targets = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        offsets.push(0);
        for list in adj {
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        GraphInstance {
            offsets,
            targets,
            meta: None,
        }
    }

    /// Builds a graph from an edge list; each vertex's neighbors appear in the
    /// order the edges are listed.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, InstanceError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(InstanceError::NeighborOutOfRange {
                    v: u.min(v),
                    u: u.max(v),
                    n,
                });
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        Self::from_adjacency(adj)
    }

    pub fn empty(n: usize) -> Self {
        GraphInstance {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            meta: None,
        }
    }

    fn validate(&self) -> Result<(), InstanceError> {
        let n = self.n();
        for v in 0..n {
            let list = self.neighbors(v);
            for (j, &u) in list.iter().enumerate() {
                let u = u as usize;
                if u >= n {
                    return Err(InstanceError::NeighborOutOfRange { v, u, n });
                }
                if u == v {
                    return Err(InstanceError::SelfLoop(v));
                }
                if list[..j].contains(&(u as u32)) {
                    return Err(InstanceError::DuplicateEdge(v, u));
                }
                if !self.neighbors(u).contains(&(v as u32)) {
                    return Err(InstanceError::Asymmetric(v, u));
                }
            }
        }
        Ok(())
    }

    pub fn with_meta(mut self, meta: StructureMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn strip_meta(mut self) -> Self {
        self.meta = None;
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n() || v >= self.n() {
            return false;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).contains(&(b as u32))
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn meta(&self) -> Option<&StructureMeta> {
        self.meta.as_ref()
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        (0..self.n()).map(|v| self.neighbors(v).to_vec()).collect()
    }

    /// True iff the graph has no cycle.
    pub fn is_forest(&self) -> bool {
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for v in 0..n {
            for &u in self.neighbors(v) {
                let u = u as usize;
                if u < v {
                    continue;
                }
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                if a == b {
                    return false;
                }
                parent[a] = b;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Function,
    Graph,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Function(FunctionInstance),
    Graph(GraphInstance),
}

impl Instance {
    pub fn n(&self) -> usize {
        match self {
            Instance::Function(f) => f.n(),
            Instance::Graph(g) => g.n(),
        }
    }

    pub fn model(&self) -> Model {
        match self {
            Instance::Function(_) => Model::Function,
            Instance::Graph(_) => Model::Graph,
        }
    }

    pub fn meta(&self) -> Option<&StructureMeta> {
        match self {
            Instance::Function(f) => f.meta(),
            Instance::Graph(g) => g.meta(),
        }
    }

    pub fn as_function(&self) -> Option<&FunctionInstance> {
        match self {
            Instance::Function(f) => Some(f),
            Instance::Graph(_) => None,
        }
    }

    pub fn as_graph(&self) -> Option<&GraphInstance> {
        match self {
            Instance::Graph(g) => Some(g),
            Instance::Function(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_successor() {
        let err = FunctionInstance::new(vec![0, 3, 1]).unwrap_err();
        assert_eq!(
            err,
            InstanceError::SuccessorOutOfRange {
                x: 1,
                value: 3,
                n: 3
            }
        );
    }

    #[test]
    fn graph_validation() {
        assert!(GraphInstance::from_edges(3, &[(0, 1), (1, 2)]).is_ok());
        assert_eq!(
            GraphInstance::from_edges(3, &[(0, 0)]).unwrap_err(),
            InstanceError::SelfLoop(0)
        );
        assert!(matches!(
            GraphInstance::from_edges(3, &[(0, 1), (1, 0)]).unwrap_err(),
            InstanceError::DuplicateEdge(..)
        ));
        assert!(matches!(
            GraphInstance::from_adjacency(vec![vec![1], vec![]]).unwrap_err(),
            InstanceError::Asymmetric(0, 1)
        ));
    }

    #[test]
    fn cycle_lengths_of_rho() {
        // 0 -> 1 -> 2 -> 1, 3 -> 3
        let f = FunctionInstance::new(vec![1, 2, 1, 3]).unwrap();
        assert_eq!(f.cycle_lengths(), vec![1, 2]);
    }

    #[test]
    fn forest_detection() {
        let path = GraphInstance::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(path.is_forest());
        let tri = GraphInstance::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!tri.is_forest());
    }
}
