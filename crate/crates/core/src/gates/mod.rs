//! Dual-rail gates built from locks and balances.
//!
//! Every gate in the library is a decision tree of balances. The root balance
//! is driven by the clock; the two sides of a balance at depth `d` are locked
//! by the rails of input `d`, so only the side matching the input value can
//! move. The leaves feed merges onto the output rails.

mod dual_rail;
mod library;
mod netlist;
mod sim;
mod table;

use thiserror::Error;

pub use dual_rail::DualRailValue;
pub use library::{build_gate, decision_tree, GateKind};
pub use netlist::{Element, ElementKind, Netlist, NetlistError, Port, RailId};
pub use sim::{SimError, SimState, Simulator};
pub use table::{evaluate, evaluate_reverse, truth_table, TruthTable, MAX_TABLE_INPUTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("forbidden (1,1) rail pair on `{0}`")]
    ForbiddenState(String),
    #[error("schedule violation: {0}")]
    ScheduleViolation(#[from] SimError),
    #[error("netlist is not reversible: {0}")]
    NotReversible(String),
    #[error("unknown port `{0}`")]
    UnknownPort(String),
    #[error("no value given for input `{0}`")]
    MissingInput(String),
    #[error("input `{0}` must be Zero or One")]
    BlankInput(String),
    #[error("{0} inputs exceed the table limit")]
    TooManyInputs(usize),
}
