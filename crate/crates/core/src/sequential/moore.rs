//! A one-bit memory as a Moore machine: next state = D when WE is set,
//! otherwise the current state; the output is the state.
//!
//! The transition logic runs on phase 0. Its result passes through four
//! state cells on phases 1, 2, 3 and 0 and comes back as the `q` input of the
//! transition logic one cycle later. A `preset` port merged onto that `q`
//! input gives the machine its first state.

use std::collections::BTreeMap;

use crate::gates::{decision_tree, DualRailValue, ElementKind, GateError, Netlist, RailId};

use super::clock::{Action, ClockProgram};
use super::pipeline::{buffer_cell, ClockedRunner};
use super::SequentialError;

pub const STATE_CELLS: usize = 4;

#[derive(Debug, Clone)]
pub struct MooreMachine {
    runner: ClockedRunner,
    preset: Option<bool>,
    q_rails: [RailId; 2],
    state: Option<bool>,
}

fn netlist() -> Result<Netlist, GateError> {
    let t = decision_tree("next", &["d", "we", "q"], &["n"], &|i| vec![if i[1] { i[0] } else { i[2] }]);
    let cell = buffer_cell();
    let mut net = Netlist::new("memory");
    let d = net.add_dual_rail("d")?;
    let we = net.add_dual_rail("we")?;
    let preset = net.add_dual_rail("preset")?;
    net.add_input("d", d)?;
    net.add_input("we", we)?;
    net.add_input("preset", preset)?;
    let q = net.add_dual_rail("q")?;
    let n = net.add_dual_rail("n")?;
    let t_cell = net.add_cell("next")?;
    let bind = BTreeMap::from([
        ("d".to_string(), d),
        ("we".to_string(), we),
        ("q".to_string(), q),
        ("n".to_string(), n),
    ]);
    net.instantiate(&t, "next", &bind, 0, Some(t_cell))?;

    let mut rails = n;
    for k in 1..=STATE_CELLS {
        let name = format!("m{k}");
        let out = net.add_dual_rail(&name)?;
        let id = net.add_cell(&name)?;
        let bind = BTreeMap::from([("a".to_string(), rails), ("x".to_string(), out)]);
        net.instantiate(&cell, &name, &bind, k % 4, Some(id))?;
        rails = out;
    }
    for v in 0..2 {
        net.add_element(
            format!("feedback.{v}"),
            ElementKind::Merge {
                srcs: vec![rails[v], preset[v]],
                dst: q[v],
            },
            0,
            Some(t_cell),
        );
    }
    let state = net.dual_rail(&format!("m{}", STATE_CELLS - 1))?;
    net.add_output("state", state)?;
    Ok(net)
}

impl MooreMachine {
    pub fn new(initial: bool, program: &ClockProgram) -> Result<Self, SequentialError> {
        let net = netlist()?;
        let q_rails = net.dual_rail("q")?;
        Ok(Self {
            runner: ClockedRunner::new(net, program)?,
            preset: Some(initial),
            q_rails,
            state: Some(initial),
        })
    }

    pub fn netlist(&self) -> &Netlist {
        self.runner.simulator().netlist()
    }

    pub fn runner(&self) -> &ClockedRunner {
        &self.runner
    }

    /// The stored bit, as held by the newest state cell.
    pub fn state(&self) -> Option<bool> {
        self.state
    }

    /// One clock cycle with inputs `(d, we)`. Returns the output for the
    /// state the cycle started in.
    pub fn step(&mut self, d: bool, we: bool) -> Result<bool, SequentialError> {
        let mut inputs = BTreeMap::from([
            ("d".to_string(), DualRailValue::from_bool(d)),
            ("we".to_string(), DualRailValue::from_bool(we)),
        ]);
        if let Some(p) = self.preset.take() {
            inputs.insert("preset".into(), DualRailValue::from_bool(p));
        }
        let q_rails = self.q_rails;
        let mut seen = None;
        let outputs = self.runner.run_cycle_with(&inputs, &mut |_, action, sim| {
            if action == Action::Raise(0) {
                seen = Some(sim.read_rails(q_rails)?);
            }
            Ok(())
        })?;
        let output = seen.and_then(DualRailValue::to_bool).ok_or_else(|| {
            SequentialError::ScheduleViolation("state did not reach the transition logic".into())
        })?;
        self.state = outputs["state"].to_bool();
        Ok(output)
    }
}
