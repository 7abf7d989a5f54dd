//! Behavioural shift-register cells and chains.
//!
//! A cell holds its dual-rail input in two holding locks. Holding lock `v`
//! pairs input rail `v` with balance side `1 - v`, so the input value leaves
//! exactly one side free. Raising the cell's clock phase moves that side,
//! which raises the matching rail of the output lock; lowering the phase
//! retracts the output whatever the holding locks still contain.
//!
//! The output rails of a cell are the input rails of the next one, so the
//! next cell's holding locks also constrain this cell's balance. A cell
//! re-raised while its successor holds a value therefore copies that value
//! backward. This is what [`ChainMachine::step_back`] relies on.

use std::collections::VecDeque;

use crate::gates::DualRailValue;
use crate::primitives::{BalanceState, LockState, PrimitiveError};

use super::clock::{validate_clock, Action, ClockProgram, EventSchedule, PHASES};
use super::SequentialError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftCell {
    /// `holding[v]`: side 0 is input rail `v`, side 1 is balance side `1 - v`.
    pub holding: [LockState; 2],
    pub balance: BalanceState,
    pub output: LockState,
    pub phase: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellEvent {
    SetInput(DualRailValue),
    Raise,
    Lower,
}

fn violation(e: PrimitiveError) -> SequentialError {
    SequentialError::ScheduleViolation(e.to_string())
}

impl ShiftCell {
    pub fn new(phase: usize) -> Self {
        Self {
            holding: [LockState::Rest; 2],
            balance: BalanceState::default(),
            output: LockState::Rest,
            phase,
        }
    }

    pub fn input(&self) -> DualRailValue {
        DualRailValue::from_rails(self.holding[0].input(0) == 1, self.holding[1].input(0) == 1)
            .expect("holding locks never carry (1,1)")
    }

    pub fn output_value(&self) -> DualRailValue {
        let (a, b) = self.output.inputs();
        DualRailValue::from_rails(a == 1, b == 1).expect("lock state is never (1,1)")
    }

    pub fn is_blank(&self) -> bool {
        self.input().is_blank() && self.output_value().is_blank()
    }

    pub fn set_input(&self, value: DualRailValue) -> Result<Self, SequentialError> {
        let (r0, r1) = value.rails();
        let mut next = *self;
        // lower first so a change of value never passes through (1,1)
        for (v, up) in [(0, r0), (1, r1)] {
            if !up {
                next.holding[v] = next.holding[v].set(0, false).map_err(violation)?;
            }
        }
        for (v, up) in [(0, r0), (1, r1)] {
            if up {
                next.holding[v] = next.holding[v].set(0, true).map_err(violation)?;
            }
        }
        Ok(next)
    }

    /// Locks on each balance side: side `s` is held by input rail `1 - s`
    /// and, downstream, by a successor holding `1 - s`.
    fn side_locks(&self, downstream: DualRailValue) -> (bool, bool) {
        let held = |s: usize| {
            self.holding[1 - s].is_locked(1)
                || downstream == DualRailValue::from_bool(s == 0)
        };
        (held(0), held(1))
    }

    /// Raises the clock with the successor's current output as extra
    /// constraint. `Ok(None)` means neither side is locked, so the clock
    /// cannot drive the balance and the cell stays as it is.
    pub fn raise_against(&self, downstream: DualRailValue) -> Result<Option<Self>, SequentialError> {
        if self.balance.input {
            return Ok(Some(*self));
        }
        let (l0, l1) = self.side_locks(downstream);
        let balance = BalanceState::with_locks(l0, l1);
        let actuated = match balance.actuate() {
            Ok(b) => b,
            Err(PrimitiveError::BothSidesFree) => return Ok(None),
            Err(e) => return Err(violation(e)),
        };
        let side = actuated.moved_side().expect("actuated balance moved") as usize;
        let mut next = *self;
        next.balance = actuated;
        next.holding[1 - side] = next.holding[1 - side].set(1, true).map_err(violation)?;
        next.output = LockState::Rest.set(side as u8, true).map_err(violation)?;
        Ok(Some(next))
    }

    pub fn lower(&self) -> Self {
        let mut next = *self;
        // lock flags are sampled again at the next raise
        next.balance = BalanceState::default();
        for h in &mut next.holding {
            *h = h.set(1, false).expect("lowering never binds");
        }
        next.output = LockState::Rest;
        next
    }
}

/// One event applied to an isolated cell. Raising an empty cell is a
/// schedule violation: with no input, nothing locks either balance side.
pub fn cell_step(cell: &ShiftCell, event: CellEvent) -> Result<ShiftCell, SequentialError> {
    match event {
        CellEvent::SetInput(v) => cell.set_input(v),
        CellEvent::Lower => Ok(cell.lower()),
        CellEvent::Raise => cell.raise_against(DualRailValue::Blank)?.ok_or_else(|| {
            SequentialError::ScheduleViolation(
                "clock raised on a cell with blank holding locks".into(),
            )
        }),
    }
}

/// Cells in series; cell `k` runs on phase `k mod 4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShiftChain {
    pub cells: Vec<ShiftCell>,
}

impl ShiftChain {
    pub fn new(len: usize) -> Self {
        Self {
            cells: (0..len).map(|k| ShiftCell::new(k % PHASES)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn output(&self) -> DualRailValue {
        self.cells.last().map_or(DualRailValue::Blank, ShiftCell::output_value)
    }

    /// Indices of cells whose output lock is raised.
    pub fn occupied(&self) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&k| !self.cells[k].output_value().is_blank())
            .collect()
    }

    fn set_input(&mut self, v: DualRailValue) -> Result<(), SequentialError> {
        if let Some(c) = self.cells.first_mut() {
            *c = c.set_input(v)?;
        }
        Ok(())
    }

    fn raise_cell(&mut self, k: usize, downstream: DualRailValue) -> Result<(), SequentialError> {
        if let Some(c) = self.cells[k].raise_against(downstream)? {
            self.cells[k] = c;
            let out = c.output_value();
            if k + 1 < self.cells.len() {
                self.cells[k + 1] = self.cells[k + 1].set_input(out)?;
            }
        }
        Ok(())
    }

    fn lower_cell(&mut self, k: usize) -> Result<(), SequentialError> {
        self.cells[k] = self.cells[k].lower();
        if k + 1 < self.cells.len() {
            self.cells[k + 1] = self.cells[k + 1].set_input(DualRailValue::Blank)?;
        }
        Ok(())
    }
}

/// Snapshot after one event.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTraceStep {
    /// Clock position in cycles; decreases while running backward.
    pub time: f64,
    pub action: Action,
    pub reversed: bool,
    pub cells: Vec<ShiftCell>,
}

/// A chain together with its clock position and the environment on both
/// ends: input values still to be fed, values already fed, and values the
/// last cell handed on when it lowered.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMachine {
    pub chain: ShiftChain,
    pub schedule: EventSchedule,
    /// Events executed since the start.
    pub cursor: usize,
    pub pending: VecDeque<DualRailValue>,
    /// Values taken from `pending`; `None` where it was already empty.
    pub fed: Vec<Option<DualRailValue>>,
    pub emitted: Vec<DualRailValue>,
}

impl ChainMachine {
    pub fn new(chain: ShiftChain, program: &ClockProgram, inputs: impl IntoIterator<Item = DualRailValue>) -> Self {
        Self {
            chain,
            schedule: EventSchedule::new(program),
            cursor: 0,
            pending: inputs.into_iter().collect(),
            fed: Vec::new(),
            emitted: Vec::new(),
        }
    }

    fn event_at(&self, index: usize) -> (f64, Action) {
        let n = self.schedule.len();
        let e = self.schedule.events[index % n];
        ((index / n) as f64 + e.time, e.action)
    }

    pub fn time(&self) -> f64 {
        if self.cursor == 0 {
            0.0
        } else {
            self.event_at(self.cursor - 1).0
        }
    }

    fn cells_on(&self, phase: usize) -> Vec<usize> {
        (0..self.chain.len())
            .filter(|&k| self.chain.cells[k].phase == phase)
            .collect()
    }

    fn downstream(&self, k: usize) -> DualRailValue {
        self.chain
            .cells
            .get(k + 1)
            .map_or(DualRailValue::Blank, ShiftCell::output_value)
    }

    pub fn step(&mut self) -> Result<ChainTraceStep, SequentialError> {
        let (time, action) = self.event_at(self.cursor);
        match action {
            Action::SetInput => {
                let v = self.pending.pop_front();
                self.fed.push(v);
                self.chain.set_input(v.unwrap_or_default())?;
            }
            Action::ClearInput => self.chain.set_input(DualRailValue::Blank)?,
            Action::Raise(p) => {
                for k in self.cells_on(p) {
                    let d = self.downstream(k);
                    self.chain.raise_cell(k, d)?;
                }
            }
            Action::Lower(p) => {
                for k in self.cells_on(p) {
                    if k + 1 == self.chain.len() {
                        self.emitted.push(self.chain.cells[k].output_value());
                    }
                    self.chain.lower_cell(k)?;
                }
            }
        }
        self.cursor += 1;
        Ok(ChainTraceStep {
            time,
            action,
            reversed: false,
            cells: self.chain.cells.clone(),
        })
    }

    /// Undoes the most recent event by applying its inverse physically.
    pub fn step_back(&mut self) -> Result<ChainTraceStep, SequentialError> {
        if self.cursor == 0 {
            return Err(SequentialError::InvalidArgument(
                "nothing to reverse at the start of the schedule".into(),
            ));
        }
        let (time, action) = self.event_at(self.cursor - 1);
        match action {
            Action::SetInput => {
                self.chain.set_input(DualRailValue::Blank)?;
                if let Some(v) = self.fed.pop().flatten() {
                    self.pending.push_front(v);
                }
            }
            Action::ClearInput => {
                // the first cell still holds what the input carried
                let v = self.chain.cells.first().map_or(DualRailValue::Blank, |c| c.output_value());
                self.chain.set_input(v)?;
            }
            Action::Raise(p) => {
                for k in self.cells_on(p).into_iter().rev() {
                    self.chain.lower_cell(k)?;
                }
            }
            Action::Lower(p) => {
                for k in self.cells_on(p).into_iter().rev() {
                    let d = if k + 1 == self.chain.len() {
                        self.emitted.pop().unwrap_or_default()
                    } else {
                        self.downstream(k)
                    };
                    self.chain.raise_cell(k, d)?;
                }
            }
        }
        self.cursor -= 1;
        Ok(ChainTraceStep {
            time,
            action: action.inverse(),
            reversed: true,
            cells: self.chain.cells.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRun {
    /// Value taken by the last cell each time it rises, one per cycle.
    pub outputs: Vec<DualRailValue>,
    pub trace: Vec<ChainTraceStep>,
    pub machine: ChainMachine,
}

/// Runs `cycles` full clock cycles feeding one input value per cycle.
pub fn chain_simulate(
    chain: ShiftChain,
    clock: &ClockProgram,
    input_stream: &[DualRailValue],
    cycles: usize,
) -> Result<ChainRun, SequentialError> {
    let report = validate_clock(clock);
    if !report.passed {
        return Err(SequentialError::InvalidClock(report.to_string()));
    }
    chain_simulate_unchecked(chain, clock, input_stream, cycles)
}

/// As [`chain_simulate`] without validating the clock first.
pub fn chain_simulate_unchecked(
    chain: ShiftChain,
    clock: &ClockProgram,
    input_stream: &[DualRailValue],
    cycles: usize,
) -> Result<ChainRun, SequentialError> {
    let last_phase = chain.len().checked_sub(1).map(|k| k % PHASES);
    let mut machine = ChainMachine::new(chain, clock, input_stream.iter().copied());
    let events = cycles * machine.schedule.len();
    let mut trace = Vec::with_capacity(events);
    let mut outputs = Vec::with_capacity(cycles);
    for _ in 0..events {
        let step = machine.step()?;
        if Some(step.action) == last_phase.map(Action::Raise) {
            outputs.push(machine.chain.output());
        }
        trace.push(step);
    }
    Ok(ChainRun {
        outputs,
        trace,
        machine,
    })
}

/// Runs the clock backward for `cycles` cycles from the machine's current
/// position, or until the start of the schedule.
pub fn chain_reverse(machine: &mut ChainMachine, cycles: usize) -> Result<Vec<ChainTraceStep>, SequentialError> {
    let events = (cycles * machine.schedule.len()).min(machine.cursor);
    (0..events).map(|_| machine.step_back()).collect()
}
