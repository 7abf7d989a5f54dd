//! Four-phase clocking and the circuits built on it: shift-register chains,
//! a Moore machine, a pipelined ripple-carry adder, and force-isolation
//! analysis.

mod cell;
mod clock;
mod isolation;
mod moore;
mod pipeline;

use thiserror::Error;

use crate::gates::{GateError, NetlistError, SimError};

pub use cell::{
    cell_step, chain_reverse, chain_simulate, chain_simulate_unchecked, CellEvent, ChainMachine,
    ChainRun, ChainTraceStep, ShiftCell, ShiftChain,
};
pub use clock::{
    cam_waveform, trapezoid_profile, validate_clock, Action, ClockProgram, ClockReport, Event,
    EventSchedule, PHASES,
};
pub use isolation::force_isolation;
pub use moore::MooreMachine;
pub use pipeline::{buffer_cell, build_ripple_adder, shift_register_netlist, ClockedRunner, RippleAdder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequentialError {
    #[error("schedule violation: {0}")]
    ScheduleViolation(String),
    #[error("invalid clock: {0}")]
    InvalidClock(String),
    #[error("non-periodic cam profile: {0}")]
    NonPeriodicProfile(String),
    #[error(transparent)]
    Gate(GateError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl From<GateError> for SequentialError {
    fn from(e: GateError) -> Self {
        match e {
            GateError::ScheduleViolation(s) => s.into(),
            GateError::ForbiddenState(_) => SequentialError::ScheduleViolation(e.to_string()),
            e => SequentialError::Gate(e),
        }
    }
}

impl From<SimError> for SequentialError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Netlist(n) => SequentialError::Gate(GateError::Netlist(n)),
            e => SequentialError::ScheduleViolation(e.to_string()),
        }
    }
}

impl From<NetlistError> for SequentialError {
    fn from(e: NetlistError) -> Self {
        SequentialError::Gate(GateError::Netlist(e))
    }
}
