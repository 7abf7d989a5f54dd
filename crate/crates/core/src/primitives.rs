//! Behavioural lock and balance, and their cross-check against the kinematic
//! lock.

use std::fmt;

use thiserror::Error;

use crate::kinematics::{self, KinematicsError, LockGeometry, LockMechanism, SolverOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrimitiveError {
    #[error("lock side {side} cannot rise while the other side is raised")]
    BindingViolation { side: u8 },
    #[error("balance actuated with neither side locked")]
    BothSidesFree,
    #[error("balance actuated with both sides locked")]
    BothSidesLocked,
    #[error("side index {0} is not 0 or 1")]
    InvalidSide(u8),
    #[error("lock cross-check failed in state {state}: {reason}")]
    CrosscheckFailed { state: LockState, reason: String },
}

/// Input state of a lock. `(1, 1)` has no representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LockState {
    #[default]
    Rest,
    /// Input 0 raised, `(1, 0)`.
    Raised0,
    /// Input 1 raised, `(0, 1)`.
    Raised1,
}

impl LockState {
    pub const ALL: [LockState; 3] = [LockState::Rest, LockState::Raised0, LockState::Raised1];

    pub fn inputs(self) -> (u8, u8) {
        match self {
            LockState::Rest => (0, 0),
            LockState::Raised0 => (1, 0),
            LockState::Raised1 => (0, 1),
        }
    }

    pub fn input(self, side: u8) -> u8 {
        let (a, b) = self.inputs();
        if side == 0 {
            a
        } else {
            b
        }
    }

    pub fn from_inputs(input0: u8, input1: u8) -> Result<Self, PrimitiveError> {
        match (input0, input1) {
            (0, 0) => Ok(LockState::Rest),
            (1, 0) => Ok(LockState::Raised0),
            (0, 1) => Ok(LockState::Raised1),
            (1, 1) => Err(PrimitiveError::BindingViolation { side: 1 }),
            (a, _) if a > 1 => Err(PrimitiveError::InvalidSide(a)),
            (_, b) => Err(PrimitiveError::InvalidSide(b)),
        }
    }

    /// Sets one input. Raising is only possible from rest; lowering a side
    /// that is already down is a no-op.
    pub fn set(self, side: u8, value: bool) -> Result<Self, PrimitiveError> {
        if side > 1 {
            return Err(PrimitiveError::InvalidSide(side));
        }
        let raised = if side == 0 {
            LockState::Raised0
        } else {
            LockState::Raised1
        };
        match (self, value) {
            (s, true) if s == raised => Ok(s),
            (LockState::Rest, true) => Ok(raised),
            (_, true) => Err(PrimitiveError::BindingViolation { side }),
            (s, false) if s == raised => Ok(LockState::Rest),
            (s, false) => Ok(s),
        }
    }

    /// A side is locked iff the opposite input is raised.
    pub fn is_locked(self, side: u8) -> bool {
        self.input(1 - side.min(1)) == 1
    }
}

impl fmt::Display for LockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.inputs();
        write!(f, "({a},{b})")
    }
}

pub fn lock_set(state: LockState, side: u8, value: bool) -> Result<LockState, PrimitiveError> {
    state.set(side, value)
}

pub fn lock_is_locked(state: LockState, side: u8) -> bool {
    state.is_locked(side)
}

/// A balance: a three-pivot beam driven at its centre. When the input rises,
/// the side that is not blocked moves and produces its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BalanceState {
    pub input: bool,
    pub side0_locked: bool,
    pub side1_locked: bool,
    pub output0: bool,
    pub output1: bool,
}

impl BalanceState {
    pub fn with_locks(side0_locked: bool, side1_locked: bool) -> Self {
        Self {
            side0_locked,
            side1_locked,
            ..Self::default()
        }
    }

    /// Raises the input. Actuating an already raised balance keeps its side.
    pub fn actuate(self) -> Result<Self, PrimitiveError> {
        if self.input {
            return Ok(self);
        }
        let (output0, output1) = match (self.side0_locked, self.side1_locked) {
            (false, false) => return Err(PrimitiveError::BothSidesFree),
            (true, true) => return Err(PrimitiveError::BothSidesLocked),
            (true, false) => (false, true),
            (false, true) => (true, false),
        };
        Ok(Self {
            input: true,
            output0,
            output1,
            ..self
        })
    }

    /// Lowers the input; both outputs return to zero.
    pub fn release(self) -> Self {
        Self {
            input: false,
            output0: false,
            output1: false,
            ..self
        }
    }

    /// Index of the side that moved, if the balance is actuated.
    pub fn moved_side(&self) -> Option<u8> {
        match (self.output0, self.output1) {
            (true, _) => Some(0),
            (_, true) => Some(1),
            _ => None,
        }
    }
}

pub fn balance_actuate(state: BalanceState) -> Result<BalanceState, PrimitiveError> {
    state.actuate()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckItem {
    pub state: LockState,
    pub check: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CrosscheckReport {
    pub items: Vec<CrosscheckItem>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

const CROSSCHECK_STEPS: usize = 16;

fn angles(state: LockState, theta_on: f64) -> (f64, f64) {
    let (a, b) = state.inputs();
    (a as f64 * theta_on, b as f64 * theta_on)
}

/// Drives the kinematic lock into each behavioural state and checks that the
/// mechanism binds exactly when the behavioural model says a side is locked.
pub fn crosscheck_lock(geom: &LockGeometry) -> Result<CrosscheckReport, PrimitiveError> {
    let fail = |state, reason: String| PrimitiveError::CrosscheckFailed { state, reason };
    geom.validate()
        .map_err(|e| fail(LockState::Rest, e.to_string()))?;
    let opts = SolverOptions::default();
    let lock = LockMechanism::new(geom, true);
    let mech = lock.mechanism();
    let home = kinematics::assemble(mech, &lock.assembled.config, &opts)
        .map_err(|e| fail(LockState::Rest, format!("assembly: {e}")))?;

    let mut report = CrosscheckReport::default();
    for state in LockState::ALL {
        let (t0, t1) = angles(state, geom.theta_on);
        let config = kinematics::drive(mech, &home, &lock.targets(t0, t1), CROSSCHECK_STEPS, &opts)
            .map_err(|e| fail(state, format!("not reachable from rest: {e}")))?;
        report.items.push(CrosscheckItem {
            state,
            check: "reachable from rest".into(),
            passed: true,
        });
        for side in 0..2u8 {
            if state.input(side) == 1 {
                continue;
            }
            let raised = state.set(side, true).unwrap_or(state);
            let (r0, r1) = if side == 0 {
                (geom.theta_on, t1)
            } else {
                (t0, geom.theta_on)
            };
            let attempt = kinematics::drive(mech, &config, &lock.targets(r0, r1), CROSSCHECK_STEPS, &opts);
            let kinematic_locked = match attempt {
                Ok(_) => false,
                Err(KinematicsError::BindingDetected { .. }) => true,
                Err(e) => return Err(fail(state, e.to_string())),
            };
            let behavioural_locked = state.is_locked(side);
            let passed = kinematic_locked == behavioural_locked;
            report.items.push(CrosscheckItem {
                state,
                check: format!(
                    "raising input {side} {} (target {raised})",
                    if behavioural_locked { "binds" } else { "moves" }
                ),
                passed,
            });
            if !passed {
                return Err(fail(
                    state,
                    format!(
                        "input {side}: kinematic locked = {kinematic_locked}, behavioural locked = {behavioural_locked}"
                    ),
                ));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lock_set_examples() {
        assert_eq!(LockState::Rest.set(0, true), Ok(LockState::Raised0));
        assert_eq!(
            LockState::Raised0.set(1, true),
            Err(PrimitiveError::BindingViolation { side: 1 })
        );
        assert_eq!(LockState::Raised0.set(0, false), Ok(LockState::Rest));
        assert_eq!(LockState::Raised1.set(0, false), Ok(LockState::Raised1));
    }

    #[test]
    fn lock_locked_sides() {
        assert!(LockState::Raised0.is_locked(1));
        assert!(!LockState::Raised0.is_locked(0));
        assert!(!LockState::Rest.is_locked(0) && !LockState::Rest.is_locked(1));
        assert!(LockState::Raised1.is_locked(0));
    }

    #[test]
    fn lock_state_machine_is_closed_and_live() {
        for s in LockState::ALL {
            for side in 0..2 {
                for value in [false, true] {
                    if let Ok(next) = s.set(side, value) {
                        assert_ne!(next.inputs(), (1, 1));
                        // rest is always reachable again
                        let back = next.set(0, false).and_then(|n| n.set(1, false)).unwrap();
                        assert_eq!(back, LockState::Rest);
                    }
                }
            }
        }
        assert!(LockState::from_inputs(1, 1).is_err());
    }

    #[test]
    fn balance_examples() {
        let b = BalanceState::with_locks(true, false).actuate().unwrap();
        assert!(b.output1 && !b.output0);
        assert_eq!(
            BalanceState::with_locks(false, false).actuate(),
            Err(PrimitiveError::BothSidesFree)
        );
        assert_eq!(
            BalanceState::with_locks(true, true).actuate(),
            Err(PrimitiveError::BothSidesLocked)
        );
        let r = b.release();
        assert!(!r.output0 && !r.output1 && !r.input);
    }

    #[test]
    fn balance_exhaustive() {
        for bits in 0..8u8 {
            let s0 = bits & 1 != 0;
            let s1 = bits & 2 != 0;
            let input = bits & 4 != 0;
            let b = BalanceState::with_locks(s0, s1);
            let result = if input { b.actuate() } else { Ok(b) };
            match result {
                Ok(out) => {
                    assert!(!(out.output0 && out.output1));
                    if !out.input {
                        assert!(!out.output0 && !out.output1);
                    }
                    assert!(!input || s0 != s1);
                }
                Err(e) => {
                    assert!(input && s0 == s1);
                    assert_eq!(
                        e,
                        if s0 {
                            PrimitiveError::BothSidesLocked
                        } else {
                            PrimitiveError::BothSidesFree
                        }
                    );
                }
            }
        }
    }
}
