//! Instances, relabelings, witnesses and the counted query layer.

mod counted;
pub mod instance;
pub mod io;
mod relabel;
mod witness;

pub use counted::{CountedOracle, Exchange, FunctionAccess, GraphAccess, OracleError, OracleView, Query};
pub use instance::{FunctionInstance, GraphInstance, Instance, InstanceError, Model};
pub use relabel::{relabel, Relabeling};
pub use witness::{Witness, WitnessKind};
