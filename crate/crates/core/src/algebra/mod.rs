//! Substrates, attributes, variables and the task algebra, independent of
//! any possibility oracle.

mod attribute;
mod network;
mod permutation;
mod substrate;
mod task;
mod variable;

pub use attribute::{factorize, AttrRef, Attribute, Body};
pub use network::{validate_network, Edge, Network, Node, Slot};
pub use permutation::Permutation;
pub use substrate::{Substrate, SubstrateKind};
pub use task::{parallel_compose, permutation_task, serial_compose, transpose, Task};
pub use variable::{coarsen, is_sharp, product_variable, State, Variable};
