//! Small patterns `H` planted by the polynomial-gap constructions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::oracle::{Witness, WitnessKind};

/// An oriented pattern with out-degree at most one per vertex, i.e. a partial
/// function on `0..vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionPattern {
    pub vertices: u32,
    pub edges: Vec<(u32, u32)>,
}

impl FunctionPattern {
    pub fn fixed_point() -> Self {
        FunctionPattern {
            vertices: 1,
            edges: vec![(0, 0)],
        }
    }

    /// Three preimages of one value.
    pub fn three_collision() -> Self {
        FunctionPattern {
            vertices: 4,
            edges: vec![(0, 3), (1, 3), (2, 3)],
        }
    }

    pub fn new(vertices: u32, edges: Vec<(u32, u32)>) -> Result<Self, String> {
        let p = FunctionPattern { vertices, edges };
        p.validate()?;
        Ok(p)
    }

    pub fn is_fixed_point(&self) -> bool {
        *self == Self::fixed_point()
    }

    pub fn succ(&self, v: u32) -> Option<u32> {
        self.edges.iter().find(|e| e.0 == v).map(|e| e.1)
    }

    pub fn in_degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.1 == v && e.0 != v).count()
    }

    /// Vertices with in-degree zero; a lone fixed point is its own entry.
    pub fn entries(&self) -> Vec<u32> {
        if self.is_fixed_point() {
            return vec![0];
        }
        (0..self.vertices)
            .filter(|&v| !self.edges.iter().any(|e| e.1 == v))
            .collect()
    }

    pub fn sinks(&self) -> Vec<u32> {
        (0..self.vertices).filter(|&v| self.succ(v).is_none()).collect()
    }

    /// Checks the pattern can be planted without accidental copies: every
    /// vertex has out-degree at most one, there is at least one entry, and
    /// the pattern contains a fixed point or a vertex of in-degree three or
    /// more (the feeder paths already create plenty of 2-collisions).
    pub fn validate(&self) -> Result<(), String> {
        if self.vertices == 0 {
            return Err("pattern has no vertices".into());
        }
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if a >= self.vertices || b >= self.vertices {
                return Err(format!("edge {a}->{b} outside 0..{}", self.vertices));
            }
            if self.edges[..k].iter().any(|e| e.0 == a) {
                return Err(format!("vertex {a} has two outgoing edges"));
            }
        }
        if self.entries().is_empty() {
            return Err("pattern has no entry vertex".into());
        }
        let has_fixed = self.edges.iter().any(|e| e.0 == e.1);
        let has_triple = (0..self.vertices).any(|v| {
            self.edges.iter().filter(|e| e.1 == v).count() >= 3
        });
        if !has_fixed && !has_triple {
            return Err("pattern needs a fixed point or a vertex of in-degree at least 3".into());
        }
        Ok(())
    }

    pub fn witness_kind(&self) -> WitnessKind {
        if self.is_fixed_point() {
            WitnessKind::FixedPoint
        } else {
            WitnessKind::Pattern {
                edges: self.edges.clone(),
            }
        }
    }

    pub fn witness(&self, image: &[u32]) -> Witness {
        Witness::new(self.witness_kind(), image.to_vec())
    }

    /// Number of automorphisms, by brute force over all vertex permutations.
    pub fn automorphisms(&self) -> usize {
        let k = self.vertices as usize;
        let mut perm: Vec<u32> = (0..self.vertices).collect();
        let mut count = 0;
        permute(&mut perm, 0, &mut |p| {
            let mut mapped: Vec<(u32, u32)> = self
                .edges
                .iter()
                .map(|&(a, b)| (p[a as usize], p[b as usize]))
                .collect();
            let mut orig = self.edges.clone();
            mapped.sort_unstable();
            orig.sort_unstable();
            if mapped == orig {
                count += 1;
            }
        });
        debug_assert!(k == 0 || count >= 1);
        count
    }
}

fn permute(v: &mut [u32], k: usize, f: &mut dyn FnMut(&[u32])) {
    if k == v.len() {
        f(v);
        return;
    }
    for j in k..v.len() {
        v.swap(k, j);
        permute(v, k + 1, f);
        v.swap(k, j);
    }
}

impl fmt::Display for FunctionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_fixed_point() {
            return write!(f, "fixed-point");
        }
        if *self == Self::three_collision() {
            return write!(f, "3-collision");
        }
        let e: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "edges:{}", e.join(","))
    }
}

impl FromStr for FunctionPattern {
    type Err = String;

    /// `fixed-point`, `3-collision`, or `edges:0-1,1-1`.
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed-point" => return Ok(Self::fixed_point()),
            "3-collision" => return Ok(Self::three_collision()),
            _ => {}
        }
        let body = s
            .strip_prefix("edges:")
            .ok_or_else(|| format!("unknown pattern '{s}'"))?;
        let mut edges = Vec::new();
        for part in body.split(',') {
            let (a, b) = part
                .split_once('-')
                .ok_or_else(|| format!("bad edge '{part}'"))?;
            let a: u32 = a.trim().parse().map_err(|_| format!("bad vertex '{a}'"))?;
            let b: u32 = b.trim().parse().map_err(|_| format!("bad vertex '{b}'"))?;
            edges.push((a, b));
        }
        let vertices = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        Self::new(vertices, edges)
    }
}

/// Graph pattern planted among star leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphPattern {
    None,
    Clique(u32),
}

impl GraphPattern {
    pub fn size(&self) -> usize {
        match self {
            GraphPattern::None => 0,
            GraphPattern::Clique(h) => *h as usize,
        }
    }
}

impl fmt::Display for GraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphPattern::None => write!(f, "none"),
            GraphPattern::Clique(3) => write!(f, "triangle"),
            GraphPattern::Clique(h) => write!(f, "clique:{h}"),
        }
    }
}

impl FromStr for GraphPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(GraphPattern::None),
            "triangle" => Ok(GraphPattern::Clique(3)),
            _ => {
                let h: u32 = s
                    .strip_prefix("clique:")
                    .and_then(|h| h.parse().ok())
                    .ok_or_else(|| format!("unknown graph pattern '{s}'"))?;
                if h < 3 {
                    return Err("cliques need at least 3 vertices".into());
                }
                Ok(GraphPattern::Clique(h))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_and_sinks() {
        let p = FunctionPattern::three_collision();
        assert_eq!(p.entries(), vec![0, 1, 2]);
        assert_eq!(p.sinks(), vec![3]);
        assert_eq!(FunctionPattern::fixed_point().entries(), vec![0]);
    }

    #[test]
    fn rejects_plain_collision() {
        assert!(FunctionPattern::new(3, vec![(0, 2), (1, 2)]).is_err());
        assert!(FunctionPattern::new(2, vec![(0, 1), (0, 0)]).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["fixed-point", "3-collision", "edges:0-1,1-1"] {
            let p: FunctionPattern = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert_eq!("triangle".parse::<GraphPattern>(), Ok(GraphPattern::Clique(3)));
        assert_eq!("clique:4".parse::<GraphPattern>(), Ok(GraphPattern::Clique(4)));
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(FunctionPattern::three_collision().automorphisms(), 6);
        assert_eq!(FunctionPattern::fixed_point().automorphisms(), 1);
    }
}
