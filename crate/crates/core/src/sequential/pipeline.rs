//! Clocked execution of lock/balance netlists, the shift-register netlist and
//! the pipelined ripple-carry adder.

use std::collections::BTreeMap;

use crate::gates::{build_gate, decision_tree, DualRailValue, GateError, GateKind, Netlist, RailId, Simulator};

use super::clock::{validate_clock, Action, ClockProgram, EventSchedule, PHASES};
use super::SequentialError;

/// Drives a netlist through the four-phase event schedule. Input ports are
/// applied at the start of each cycle and withdrawn when phase 3 lowers;
/// outputs are read after the last event of the cycle.
#[derive(Debug, Clone)]
pub struct ClockedRunner {
    sim: Simulator,
    schedule: EventSchedule,
    cycle: usize,
}

pub type Observer<'a> = dyn FnMut(f64, Action, &Simulator) -> Result<(), SequentialError> + 'a;

impl ClockedRunner {
    pub fn new(net: Netlist, program: &ClockProgram) -> Result<Self, SequentialError> {
        let report = validate_clock(program);
        if !report.passed {
            return Err(SequentialError::InvalidClock(report.to_string()));
        }
        Self::unchecked(net, program)
    }

    pub fn unchecked(net: Netlist, program: &ClockProgram) -> Result<Self, SequentialError> {
        let mut sim = Simulator::new(net)?;
        sim.set_blank_idle(true);
        Ok(Self {
            sim,
            schedule: EventSchedule::new(program),
            cycle: 0,
        })
    }

    pub fn simulator(&self) -> &Simulator {
        &self.sim
    }

    pub fn schedule(&self) -> &EventSchedule {
        &self.schedule
    }

    pub fn cycle(&self) -> usize {
        self.cycle
    }

    pub fn run_cycle(
        &mut self,
        inputs: &BTreeMap<String, DualRailValue>,
    ) -> Result<BTreeMap<String, DualRailValue>, SequentialError> {
        self.run_cycle_with(inputs, &mut |_, _, _| Ok(()))
    }

    /// As [`run_cycle`](Self::run_cycle), calling `observe` after every event
    /// with the absolute time in cycles.
    pub fn run_cycle_with(
        &mut self,
        inputs: &BTreeMap<String, DualRailValue>,
        observe: &mut Observer<'_>,
    ) -> Result<BTreeMap<String, DualRailValue>, SequentialError> {
        for name in inputs.keys() {
            if self.sim.netlist().input(name).is_none() {
                return Err(GateError::UnknownPort(name.clone()).into());
            }
        }
        let ports: Vec<String> = self.sim.netlist().inputs().iter().map(|p| p.name.clone()).collect();
        for event in self.schedule.events.clone() {
            match event.action {
                Action::SetInput => {
                    for p in &ports {
                        let v = inputs.get(p).copied().unwrap_or_default();
                        self.sim.set_input(p, v)?;
                    }
                }
                Action::ClearInput => {
                    for p in &ports {
                        self.sim.set_input(p, DualRailValue::Blank)?;
                    }
                }
                Action::Raise(phase) => self.sim.set_clock(phase, true)?,
                Action::Lower(phase) => self.sim.set_clock(phase, false)?,
            }
            observe(self.cycle as f64 + event.time, event.action, &self.sim)?;
        }
        self.cycle += 1;
        let outs: Vec<String> = self.sim.netlist().outputs().iter().map(|p| p.name.clone()).collect();
        outs.into_iter()
            .map(|p| {
                let v = self.sim.read_port(&p)?;
                Ok((p, v))
            })
            .collect()
    }
}

/// One shift-register cell as a netlist: a single balance copying input `a`
/// to output `x` on clock phase 0.
pub fn buffer_cell() -> Netlist {
    decision_tree("cell", &["a"], &["x"], &|i| vec![i[0]])
}

fn place_cell(
    net: &mut Netlist,
    cell: &Netlist,
    name: &str,
    input: [RailId; 2],
    stage: usize,
) -> Result<[RailId; 2], SequentialError> {
    let out = net.add_dual_rail(name).map_err(GateError::from)?;
    let id = net.add_cell(name).map_err(GateError::from)?;
    let bind = BTreeMap::from([("a".to_string(), input), ("x".to_string(), out)]);
    net.instantiate(cell, name, &bind, stage % PHASES, Some(id))
        .map_err(GateError::from)?;
    Ok(out)
}

/// `cells` buffer cells in series between ports `in` and `out`; cell `k`
/// runs on phase `k mod 4`.
pub fn shift_register_netlist(cells: usize) -> Result<Netlist, SequentialError> {
    if cells == 0 {
        return Err(SequentialError::InvalidArgument("a chain needs at least one cell".into()));
    }
    let cell = buffer_cell();
    let mut net = Netlist::new(format!("shift{cells}"));
    let input = net.add_dual_rail("in").map_err(GateError::from)?;
    net.add_input("in", input).map_err(GateError::from)?;
    let mut rails = input;
    for k in 0..cells {
        rails = place_cell(&mut net, &cell, &format!("c{}", k + 1), rails, k)?;
    }
    net.add_output("out", rails).map_err(GateError::from)?;
    Ok(net)
}

/// Pipelined ripple-carry adder. Full adder `i` sits at pipeline stage `i`
/// and runs on phase `i mod 4`; operand bits wait in delay cells until their
/// adder's stage, and each sum bit is delayed to the final stage so that all
/// results leave together on phase 3.
#[derive(Debug, Clone)]
pub struct RippleAdder {
    pub netlist: Netlist,
    pub bits: usize,
    /// Index of the stage the outputs leave from.
    pub output_stage: usize,
    pub delay_cells: usize,
}

impl RippleAdder {
    /// Full clock cycles from applying an addition to reading its result.
    pub fn latency_cycles(&self) -> usize {
        self.output_stage / PHASES + 1
    }

    pub fn operand_inputs(&self, a: u64, b: u64, cin: bool) -> BTreeMap<String, DualRailValue> {
        let mut m = BTreeMap::new();
        for i in 0..self.bits {
            m.insert(format!("a{i}"), DualRailValue::from_bool((a >> i) & 1 == 1));
            m.insert(format!("b{i}"), DualRailValue::from_bool((b >> i) & 1 == 1));
        }
        m.insert("cin".into(), DualRailValue::from_bool(cin));
        m
    }

    /// Decodes `(sum, carry)`; `None` while any output is Blank.
    pub fn decode(&self, outputs: &BTreeMap<String, DualRailValue>) -> Option<(u64, bool)> {
        let mut sum = 0u64;
        for i in 0..self.bits {
            if outputs[&format!("s{i}")].to_bool()? {
                sum |= 1 << i;
            }
        }
        Some((sum, outputs["cout"].to_bool()?))
    }

    /// Streams one addition per cycle and returns the results in order.
    pub fn run_stream(
        &self,
        program: &ClockProgram,
        additions: &[(u64, u64, bool)],
    ) -> Result<Vec<(u64, bool)>, SequentialError> {
        let mut runner = ClockedRunner::new(self.netlist.clone(), program)?;
        let lag = self.latency_cycles() - 1;
        let mut results = Vec::with_capacity(additions.len());
        for c in 0..additions.len() + lag {
            let inputs = additions
                .get(c)
                .map(|&(a, b, cin)| self.operand_inputs(a, b, cin))
                .unwrap_or_default();
            let out = runner.run_cycle(&inputs)?;
            if c >= lag {
                let r = self.decode(&out).ok_or_else(|| {
                    SequentialError::ScheduleViolation(format!("no result at cycle {c}"))
                })?;
                results.push(r);
            }
        }
        Ok(results)
    }
}

pub fn build_ripple_adder(bits: usize) -> Result<RippleAdder, SequentialError> {
    if bits == 0 || bits > 63 {
        return Err(SequentialError::InvalidArgument(format!(
            "adder width {bits} outside 1..=63"
        )));
    }
    let output_stage = PHASES * bits.div_ceil(PHASES) - 1;
    let cell = buffer_cell();
    let fa = build_gate(GateKind::FullAdder);
    let mut net = Netlist::new(format!("adder{bits}"));
    let port = |net: &mut Netlist, name: &str, input: bool| -> Result<[RailId; 2], SequentialError> {
        let r = net.add_dual_rail(name).map_err(GateError::from)?;
        if input {
            net.add_input(name, r).map_err(GateError::from)?;
        }
        Ok(r)
    };
    let mut delay_cells = 0;
    let mut carry = port(&mut net, "cin", true)?;
    let mut sums = Vec::new();
    for i in 0..bits {
        let mut operands = [[RailId(0); 2]; 2];
        for (slot, name) in ["a", "b"].iter().enumerate() {
            let mut r = port(&mut net, &format!("{name}{i}"), true)?;
            for stage in 0..i {
                r = place_cell(&mut net, &cell, &format!("{name}{i}_d{stage}"), r, stage)?;
                delay_cells += 1;
            }
            operands[slot] = r;
        }
        let sum = port(&mut net, &format!("fa{i}.s"), false)?;
        let cout = port(&mut net, &format!("fa{i}.cout"), false)?;
        let id = net.add_cell(format!("fa{i}")).map_err(GateError::from)?;
        let bind = BTreeMap::from([
            ("a".to_string(), operands[0]),
            ("b".to_string(), operands[1]),
            ("cin".to_string(), carry),
            ("s".to_string(), sum),
            ("cout".to_string(), cout),
        ]);
        net.instantiate(&fa, &format!("fa{i}"), &bind, i % PHASES, Some(id))
            .map_err(GateError::from)?;
        sums.push((i, sum));
        carry = cout;
    }
    let mut outputs: Vec<(String, usize, [RailId; 2])> = sums
        .into_iter()
        .map(|(i, r)| (format!("s{i}"), i, r))
        .collect();
    outputs.push(("cout".into(), bits - 1, carry));
    for (name, from, mut r) in outputs {
        for stage in from + 1..=output_stage {
            r = place_cell(&mut net, &cell, &format!("{name}_d{stage}"), r, stage)?;
            delay_cells += 1;
        }
        net.add_output(name, r).map_err(GateError::from)?;
    }
    Ok(RippleAdder {
        netlist: net,
        bits,
        output_stage,
        delay_cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequential::{chain_simulate, ShiftChain};
    use DualRailValue::{One, Zero};

    #[test]
    fn netlist_chain_matches_behavioural_chain() {
        let program = ClockProgram::default();
        let stream = [One, Zero, Zero, One, One, Zero];
        let behavioural = chain_simulate(ShiftChain::new(4), &program, &stream, 8).unwrap();
        let mut runner = ClockedRunner::new(shift_register_netlist(4).unwrap(), &program).unwrap();
        let net = runner.simulator().netlist().clone();
        let cell_outputs: Vec<[RailId; 2]> = (1..=4).map(|k| net.dual_rail(&format!("c{k}")).unwrap()).collect();
        let mut netlist_trace = Vec::new();
        for c in 0..8 {
            let inputs = stream
                .get(c)
                .map(|&v| BTreeMap::from([("in".to_string(), v)]))
                .unwrap_or_default();
            runner
                .run_cycle_with(&inputs, &mut |_, _, sim| {
                    let cells: Vec<DualRailValue> =
                        cell_outputs.iter().map(|&r| sim.read_rails(r).unwrap()).collect();
                    netlist_trace.push(cells);
                    Ok(())
                })
                .unwrap();
        }
        assert_eq!(netlist_trace.len(), behavioural.trace.len());
        for (n, b) in netlist_trace.iter().zip(&behavioural.trace) {
            let bv: Vec<DualRailValue> = b.cells.iter().map(|c| c.output_value()).collect();
            assert_eq!(*n, bv, "at t = {}", b.time);
        }
    }

    #[test]
    fn adder_shape() {
        let adder = build_ripple_adder(8).unwrap();
        assert_eq!(adder.delay_cells, 84);
        assert_eq!(adder.output_stage, 7);
        assert_eq!(adder.latency_cycles(), 2);
        let small = build_ripple_adder(3).unwrap();
        assert_eq!(small.output_stage, 3);
        assert_eq!(small.latency_cycles(), 1);
    }

    #[test]
    fn adder_examples() {
        let adder = build_ripple_adder(8).unwrap();
        let r = adder
            .run_stream(
                &ClockProgram::default(),
                &[(0x0F, 0x01, false), (0xFF, 0xFF, false), (0, 0, false), (0xFF, 0x00, true)],
            )
            .unwrap();
        assert_eq!(r, [(0x10, false), (0xFE, true), (0, false), (0x00, true)]);
    }

    #[test]
    fn adder_latency_is_two_cycles() {
        let adder = build_ripple_adder(8).unwrap();
        let mut runner = ClockedRunner::new(adder.netlist.clone(), &ClockProgram::default()).unwrap();
        let mut first = None;
        for c in 0..4 {
            let inputs = if c == 0 { adder.operand_inputs(0x0F, 0x01, false) } else { BTreeMap::new() };
            let out = runner.run_cycle(&inputs).unwrap();
            if first.is_none() {
                if let Some(r) = adder.decode(&out) {
                    first = Some((c + 1, r));
                }
            }
        }
        assert_eq!(first, Some((2, (0x10, false))));
    }

    #[test]
    fn unknown_input_is_rejected() {
        let mut runner = ClockedRunner::new(shift_register_netlist(1).unwrap(), &ClockProgram::default()).unwrap();
        let bad = BTreeMap::from([("nope".to_string(), One)]);
        assert!(runner.run_cycle(&bad).is_err());
    }
}
