//! A query-complexity laboratory for substructure detection.
//!
//! Instances (functions `f: [n] -> [n]` and undirected graphs) are produced by
//! seeded generators that plant a hidden witness together with an unlabeled
//! hint. Search algorithms only ever see an instance through a
//! [`CountedOracle`](oracle::CountedOracle), which charges one unit per query
//! and records the transcript. The [`harness`] module runs seeded trial
//! batteries, computes exact expectations by enumeration, and measures the
//! gap between hint-holding and hint-free algorithms.

pub mod adversary;
pub mod detect;
pub mod gen;
pub mod harness;
pub mod meta;
pub mod oracle;
pub mod rng;

pub use meta::{Certificate, Structure, StructureKind, StructureMeta};
pub use oracle::{
    CountedOracle, FunctionAccess, FunctionInstance, GraphAccess, GraphInstance, Instance,
    OracleError, Relabeling, Witness, WitnessKind,
};
