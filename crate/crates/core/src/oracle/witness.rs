use serde::{Deserialize, Serialize};

use super::instance::{FunctionInstance, GraphInstance};

/// Substructure kinds. Function kinds validate against a successor array,
/// graph kinds against adjacency.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `[x, y, z]` with `x != y` and `f(x) = f(y) = z`.
    Collision,
    /// `[x_1, .., x_k, z]`, distinct preimages of `z`.
    KCollision { k: u32 },
    /// `[x]` with `f(x) = x`.
    FixedPoint,
    /// `[x_0, .., x_k]`, distinct, `f(x_i) = x_{i+1}`.
    Path { k: u32 },
    /// Injective image of a small pattern: `f(v[a]) = v[b]` for every edge.
    Pattern { edges: Vec<(u32, u32)> },
    /// `[u, v]` adjacent.
    Edge,
    /// `[c, a, b]`.
    Wedge,
    /// `[c, l_1, l_2, l_3]`.
    Claw,
    /// `[c, l_1, .., l_k]`.
    KStar { k: u32 },
    /// `h` pairwise adjacent vertices.
    Clique { h: u32 },
    /// Injective image of a small undirected pattern (not necessarily induced).
    Subgraph { edges: Vec<(u32, u32)> },
}

impl WitnessKind {
    pub fn is_function_kind(&self) -> bool {
        matches!(
            self,
            WitnessKind::Collision
                | WitnessKind::KCollision { .. }
                | WitnessKind::FixedPoint
                | WitnessKind::Path { .. }
                | WitnessKind::Pattern { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            WitnessKind::Collision => "collision",
            WitnessKind::KCollision { .. } => "k-collision",
            WitnessKind::FixedPoint => "fixed-point",
            WitnessKind::Path { .. } => "path",
            WitnessKind::Pattern { .. } => "pattern",
            WitnessKind::Edge => "edge",
            WitnessKind::Wedge => "wedge",
            WitnessKind::Claw => "claw",
            WitnessKind::KStar { .. } => "k-star",
            WitnessKind::Clique { .. } => "clique",
            WitnessKind::Subgraph { .. } => "subgraph",
        }
    }

    /// Number of vertices a witness of this kind lists.
    pub fn arity(&self) -> Option<usize> {
        Some(match self {
            WitnessKind::Collision => 3,
            WitnessKind::KCollision { k } => *k as usize + 1,
            WitnessKind::FixedPoint => 1,
            WitnessKind::Path { k } => *k as usize + 1,
            WitnessKind::Edge => 2,
            WitnessKind::Wedge => 3,
            WitnessKind::Claw => 4,
            WitnessKind::KStar { k } => *k as usize + 1,
            WitnessKind::Clique { h } => *h as usize,
            WitnessKind::Pattern { edges } | WitnessKind::Subgraph { edges } => {
                return edges
                    .iter()
                    .map(|&(a, b)| a.max(b) as usize + 1)
                    .max()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    #[serde(flatten)]
    pub kind: WitnessKind,
    pub vertices: Vec<u32>,
}

impl Witness {
    pub fn new(kind: WitnessKind, vertices: Vec<u32>) -> Self {
        Witness { kind, vertices }
    }

    pub fn collision(x: usize, y: usize, z: usize) -> Self {
        Self::new(WitnessKind::Collision, vec![x as u32, y as u32, z as u32])
    }

    pub fn fixed_point(x: usize) -> Self {
        Self::new(WitnessKind::FixedPoint, vec![x as u32])
    }

    pub fn star(center: usize, leaves: &[usize]) -> Self {
        let kind = match leaves.len() {
            2 => WitnessKind::Wedge,
            3 => WitnessKind::Claw,
            k => WitnessKind::KStar { k: k as u32 },
        };
        let mut v = vec![center as u32];
        v.extend(leaves.iter().map(|&l| l as u32));
        Self::new(kind, v)
    }

    pub fn mapped(&self, map: impl Fn(usize) -> usize) -> Witness {
        Witness {
            kind: self.kind.clone(),
            vertices: self
                .vertices
                .iter()
                .map(|&v| map(v as usize) as u32)
                .collect(),
        }
    }

    fn check_shape(&self, n: usize) -> Result<(), String> {
        if let Some(a) = self.kind.arity() {
            if self.vertices.len() != a {
                return Err(format!(
                    "{} witness needs {a} vertices, got {}",
                    self.kind.name(),
                    self.vertices.len()
                ));
            }
        }
        if let Some(&v) = self.vertices.iter().find(|&&v| v as usize >= n) {
            return Err(format!("vertex {v} outside [0, {n})"));
        }
        Ok(())
    }

    fn distinct(vs: &[u32]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(i, v)| !vs[..i].contains(v))
    }

    pub fn validate_function(&self, f: &FunctionInstance) -> Result<(), String> {
        self.check_shape(f.n())?;
        let v: Vec<usize> = self.vertices.iter().map(|&x| x as usize).collect();
        let ok = match &self.kind {
            WitnessKind::Collision => v[0] != v[1] && f.f(v[0]) == v[2] && f.f(v[1]) == v[2],
            WitnessKind::KCollision { k } => {
                let k = *k as usize;
                k >= 2
                    && Self::distinct(&self.vertices[..k])
                    && v[..k].iter().all(|&x| f.f(x) == v[k])
            }
            WitnessKind::FixedPoint => f.f(v[0]) == v[0],
            WitnessKind::Path { .. } => {
                Self::distinct(&self.vertices) && v.windows(2).all(|w| f.f(w[0]) == w[1])
            }
            WitnessKind::Pattern { edges } => {
                Self::distinct(&self.vertices)
                    && edges
                        .iter()
                        .all(|&(a, b)| f.f(v[a as usize]) == v[b as usize])
            }
            other => return Err(format!("{} is not a function witness", other.name())),
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{} witness {:?} does not hold", self.kind.name(), v))
        }
    }

    pub fn validate_graph(&self, g: &GraphInstance) -> Result<(), String> {
        self.check_shape(g.n())?;
        let v: Vec<usize> = self.vertices.iter().map(|&x| x as usize).collect();
        let ok = match &self.kind {
            WitnessKind::Edge => g.has_edge(v[0], v[1]),
            WitnessKind::Wedge | WitnessKind::Claw | WitnessKind::KStar { .. } => {
                Self::distinct(&self.vertices) && v[1..].iter().all(|&l| g.has_edge(v[0], l))
            }
            WitnessKind::Clique { .. } => {
                Self::distinct(&self.vertices)
                    && (0..v.len()).all(|i| (i + 1..v.len()).all(|j| g.has_edge(v[i], v[j])))
            }
            WitnessKind::Subgraph { edges } => {
                Self::distinct(&self.vertices)
                    && edges
                        .iter()
                        .all(|&(a, b)| g.has_edge(v[a as usize], v[b as usize]))
            }
            other => return Err(format!("{} is not a graph witness", other.name())),
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{} witness {:?} does not hold", self.kind.name(), v))
        }
    }
}
