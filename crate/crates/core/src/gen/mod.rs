//! Seeded generators for the hard distributions. Each returns an instance
//! with ground-truth metadata attached, plus the unlabeled certificate.

mod fixedpoint;
mod pattern;
pub mod primes;
mod scales;
mod star;
mod starpath;

use thiserror::Error;

use crate::meta::{Certificate, StructureMeta};
use crate::oracle::Instance;

pub use fixedpoint::{gen_fixedpoint_function, CycleCount, FixedPointParams};
pub use pattern::{FunctionPattern, GraphPattern};
pub use primes::{primes_in_range, primes_in_window};
pub use scales::{
    claw_layout, gen_claw_graph, gen_collision_function, ClawLayout, Filler, Rho, ScaleParams,
    ScalePlan,
};
pub use star::gen_star_graph;
pub use starpath::gen_starpath_graph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("capacity exceeded: {detail} needs {needed} elements but n = {n}")]
    Capacity {
        needed: usize,
        n: usize,
        detail: String,
    },
    #[error("degenerate witness: {0}")]
    DegenerateWitness(String),
    #[error(
        "prime window ({lo:.3}, {hi:.3}) holds {have} primes but {need} are required; \
         enable window widening to grow the upper end"
    )]
    PrimeShortage {
        lo: f64,
        hi: f64,
        have: usize,
        need: usize,
    },
    #[error("invalid parameters: {0}")]
    Param(String),
}

/// A generated instance (metadata attached) and its certificate.
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    pub certificate: Certificate,
}

impl Generated {
    pub fn meta(&self) -> &StructureMeta {
        self.instance
            .meta()
            .expect("generators always attach metadata")
    }
}
