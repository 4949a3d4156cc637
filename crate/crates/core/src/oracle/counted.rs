use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::instance::{FunctionInstance, GraphInstance, Instance, Model};
use super::relabel::Relabeling;
use crate::rng::mix64;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    #[error("label {x} outside [0, {n})")]
    Domain { x: usize, n: usize },
    #[error("neighbor index {i} out of range for vertex {v} of degree {degree}")]
    Index { v: usize, i: usize, degree: usize },
    #[error("query budget of {0} exhausted")]
    BudgetExceeded(u64),
    #[error("{query:?} query sent to a {model:?} oracle")]
    ModelMismatch { query: Model, model: Model },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "q", rename_all = "lowercase")]
pub enum Query {
    F { x: u32 },
    Degree { v: u32 },
    Neighbor { v: u32, i: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub query: Query,
    pub answer: u32,
}

/// Forward-only access to a function on `[n]`.
pub trait FunctionAccess {
    fn n(&self) -> usize;
    fn query_function(&mut self, x: usize) -> Result<usize, OracleError>;
    fn count(&self) -> u64;
}

/// Adjacency-list access to a graph on `[n]`.
pub trait GraphAccess {
    fn n(&self) -> usize;
    fn query_degree(&mut self, v: usize) -> Result<usize, OracleError>;
    fn query_neighbor(&mut self, v: usize, i: usize) -> Result<usize, OracleError>;
    fn count(&self) -> u64;
}

#[derive(Debug, Clone, Copy)]
enum Target<'a> {
    Function(&'a FunctionInstance),
    Graph(&'a GraphInstance),
}

/// A single-session query counter in front of an instance. The instance and
/// the relabeling are private; the algorithm sees visible labels only.
#[derive(Debug)]
pub struct CountedOracle<'a> {
    target: Target<'a>,
    relabel: Option<&'a Relabeling>,
    order_seed: Option<u64>,
    budget: Option<u64>,
    transcript: Vec<Exchange>,
}

/// The algorithm-visible surface of a session, suitable for export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleView {
    pub model: Model,
    pub n: usize,
    pub count: u64,
    pub budget: Option<u64>,
    pub transcript: Vec<Exchange>,
}

impl<'a> CountedOracle<'a> {
    pub fn function(f: &'a FunctionInstance) -> Self {
        Self::with_target(Target::Function(f))
    }

    pub fn graph(g: &'a GraphInstance) -> Self {
        Self::with_target(Target::Graph(g))
    }

    pub fn new(inst: &'a Instance) -> Self {
        match inst {
            Instance::Function(f) => Self::function(f),
            Instance::Graph(g) => Self::graph(g),
        }
    }

    fn with_target(target: Target<'a>) -> Self {
        CountedOracle {
            target,
            relabel: None,
            order_seed: None,
            budget: None,
            transcript: Vec::new(),
        }
    }

    /// Answers in the labels of `relabel` applied to the instance, without
    /// materializing the relabeled copy.
    pub fn with_relabeling(mut self, relabel: &'a Relabeling) -> Self {
        assert_eq!(relabel.n(), self.internal_n(), "relabeling size mismatch");
        self.relabel = Some(relabel);
        self
    }

    /// Rotates each neighbor list by a per-vertex offset derived from `seed`.
    /// Without it, lists are served in construction order.
    pub fn with_neighbor_order(mut self, seed: u64) -> Self {
        self.order_seed = Some(seed);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn model(&self) -> Model {
        match self.target {
            Target::Function(_) => Model::Function,
            Target::Graph(_) => Model::Graph,
        }
    }

    fn internal_n(&self) -> usize {
        match self.target {
            Target::Function(f) => f.n(),
            Target::Graph(g) => g.n(),
        }
    }

    pub fn transcript(&self) -> &[Exchange] {
        &self.transcript
    }

    pub fn view(&self) -> OracleView {
        OracleView {
            model: self.model(),
            n: self.internal_n(),
            count: self.transcript.len() as u64,
            budget: self.budget,
            transcript: self.transcript.clone(),
        }
    }

    fn check(&self, x: usize) -> Result<(), OracleError> {
        let n = self.internal_n();
        if x >= n {
            return Err(OracleError::Domain { x, n });
        }
        if let Some(b) = self.budget {
            if self.transcript.len() as u64 >= b {
                return Err(OracleError::BudgetExceeded(b));
            }
        }
        Ok(())
    }

    #[inline]
    fn inward(&self, x: usize) -> usize {
        self.relabel.map_or(x, |r| r.to_internal(x))
    }

    #[inline]
    fn outward(&self, x: usize) -> usize {
        self.relabel.map_or(x, |r| r.to_visible(x))
    }

    fn graph_target(&self, query: Model) -> Result<&'a GraphInstance, OracleError> {
        match self.target {
            Target::Graph(g) => Ok(g),
            Target::Function(_) => Err(OracleError::ModelMismatch {
                query,
                model: Model::Function,
            }),
        }
    }
}

impl FunctionAccess for CountedOracle<'_> {
    fn n(&self) -> usize {
        self.internal_n()
    }

    fn query_function(&mut self, x: usize) -> Result<usize, OracleError> {
        let f = match self.target {
            Target::Function(f) => f,
            Target::Graph(_) => {
                return Err(OracleError::ModelMismatch {
                    query: Model::Function,
                    model: Model::Graph,
                })
            }
        };
        self.check(x)?;
        let y = self.outward(f.f(self.inward(x)));
        self.transcript.push(Exchange {
            query: Query::F { x: x as u32 },
            answer: y as u32,
        });
        Ok(y)
    }

    fn count(&self) -> u64 {
        self.transcript.len() as u64
    }
}

impl GraphAccess for CountedOracle<'_> {
    fn n(&self) -> usize {
        self.internal_n()
    }

    fn query_degree(&mut self, v: usize) -> Result<usize, OracleError> {
        let g = self.graph_target(Model::Graph)?;
        self.check(v)?;
        let d = g.degree(self.inward(v));
        self.transcript.push(Exchange {
            query: Query::Degree { v: v as u32 },
            answer: d as u32,
        });
        Ok(d)
    }

    fn query_neighbor(&mut self, v: usize, i: usize) -> Result<usize, OracleError> {
        let g = self.graph_target(Model::Graph)?;
        self.check(v)?;
        let u = self.inward(v);
        let degree = g.degree(u);
        if i >= degree {
            return Err(OracleError::Index { v, i, degree });
        }
        let j = match self.order_seed {
            Some(s) => (i + (mix64(s ^ mix64(u as u64)) % degree as u64) as usize) % degree,
            None => i,
        };
        let w = self.outward(g.neighbors(u)[j] as usize);
        self.transcript.push(Exchange {
            query: Query::Neighbor {
                v: v as u32,
                i: i as u32,
            },
            answer: w as u32,
        });
        Ok(w)
    }

    fn count(&self) -> u64 {
        self.transcript.len() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_query_counts() {
        let f = FunctionInstance::identity(8);
        let mut o = CountedOracle::function(&f);
        assert_eq!(o.query_function(5), Ok(5));
        assert_eq!(FunctionAccess::count(&o), 1);
    }

    #[test]
    fn three_cycle() {
        let f = FunctionInstance::new(vec![1, 2, 0]).unwrap();
        let mut o = CountedOracle::function(&f);
        assert_eq!(o.query_function(2), Ok(0));
    }

    #[test]
    fn domain_error_does_not_count() {
        let f = FunctionInstance::identity(4);
        let mut o = CountedOracle::function(&f);
        assert_eq!(o.query_function(4), Err(OracleError::Domain { x: 4, n: 4 }));
        assert_eq!(FunctionAccess::count(&o), 0);
    }

    #[test]
    fn repeated_queries_count_twice() {
        let f = FunctionInstance::new(vec![1, 0]).unwrap();
        let mut o = CountedOracle::function(&f);
        o.query_function(0).unwrap();
        o.query_function(0).unwrap();
        assert_eq!(o.transcript().len(), 2);
        assert_eq!(o.transcript()[0], o.transcript()[1]);
    }

    #[test]
    fn budget_stops_queries() {
        let f = FunctionInstance::identity(4);
        let mut o = CountedOracle::function(&f).with_budget(2);
        o.query_function(0).unwrap();
        o.query_function(1).unwrap();
        assert_eq!(o.query_function(2), Err(OracleError::BudgetExceeded(2)));
        assert_eq!(FunctionAccess::count(&o), 2);
    }

    #[test]
    fn graph_basics() {
        let g = GraphInstance::from_edges(2, &[(0, 1)]).unwrap();
        let mut o = CountedOracle::graph(&g);
        assert_eq!(o.query_degree(0), Ok(1));
        assert_eq!(o.query_neighbor(0, 0), Ok(1));
        assert!(matches!(o.query_neighbor(0, 1), Err(OracleError::Index { .. })));
        let e = GraphInstance::empty(5);
        assert_eq!(CountedOracle::graph(&e).query_degree(3), Ok(0));
    }

    #[test]
    fn wedge_neighbors_as_set() {
        let g = GraphInstance::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let mut o = CountedOracle::graph(&g).with_neighbor_order(99);
        let mut ns = vec![o.query_neighbor(1, 0).unwrap(), o.query_neighbor(1, 1).unwrap()];
        ns.sort();
        assert_eq!(ns, vec![0, 2]);
    }

    #[test]
    fn model_mismatch() {
        let f = FunctionInstance::identity(3);
        let mut o = CountedOracle::function(&f);
        assert!(matches!(o.query_degree(0), Err(OracleError::ModelMismatch { .. })));
    }

    #[test]
    fn relabeled_oracle_matches_materialized_copy() {
        let f = FunctionInstance::new(vec![3, 0, 0, 5, 1, 5, 2]).unwrap();
        let s = Relabeling::random(7, 5);
        let g = s.apply_function(&f);
        let mut o = CountedOracle::function(&f).with_relabeling(&s);
        for x in 0..7 {
            assert_eq!(o.query_function(x).unwrap(), g.f(x));
        }
    }
}
