//! Simulation expressions, their lowering, and pulse schedules.

pub mod expr;
pub mod gates;
pub mod lower;
pub mod schedule;

pub use expr::{effective_hamiltonian, embed_expr, negate, negate_checked, resolve_negations, Node, SimExpr};
pub use gates::{GateLayer, LocalGate};
pub use lower::{local_evolution_layer, lower, TrotterConfig};
pub use schedule::{Block, FlatStep, PulseSchedule, Step};
