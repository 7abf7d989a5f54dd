use std::collections::{BTreeMap, HashMap};

use super::netlist::Netlist;
use super::sim::Simulator;
use super::{DualRailValue, GateError};

pub const MAX_TABLE_INPUTS: usize = 16;

/// Rows in binary counting order, first input most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub rows: Vec<(Vec<bool>, Vec<bool>)>,
}

impl TruthTable {
    pub fn lookup(&self, inputs: &[bool]) -> Option<&[bool]> {
        self.rows
            .iter()
            .find(|(i, _)| i == inputs)
            .map(|(_, o)| o.as_slice())
    }
}

fn check_inputs(net: &Netlist, inputs: &BTreeMap<String, DualRailValue>) -> Result<(), GateError> {
    for name in inputs.keys() {
        if net.input(name).is_none() {
            return Err(GateError::UnknownPort(name.clone()));
        }
    }
    for p in net.inputs() {
        match inputs.get(&p.name) {
            None => return Err(GateError::MissingInput(p.name.clone())),
            Some(DualRailValue::Blank) => return Err(GateError::BlankInput(p.name.clone())),
            Some(_) => {}
        }
    }
    Ok(())
}

fn run(
    sim: &mut Simulator,
    inputs: &BTreeMap<String, DualRailValue>,
    clock_active: bool,
) -> Result<BTreeMap<String, DualRailValue>, GateError> {
    for (name, v) in inputs {
        sim.set_input(name, *v)?;
    }
    if clock_active {
        let top = sim.netlist().max_phase();
        for phase in 0..=top.unwrap_or(0) {
            sim.set_clock(phase, true)?;
        }
    }
    sim.netlist()
        .outputs()
        .iter()
        .map(|p| Ok((p.name.clone(), sim.read_port(&p.name)?)))
        .collect()
}

/// Sets the inputs, then raises every clock phase in order and reads the
/// outputs. With the clock inactive every output reads Blank.
pub fn evaluate(
    net: &Netlist,
    inputs: &BTreeMap<String, DualRailValue>,
    clock_active: bool,
) -> Result<BTreeMap<String, DualRailValue>, GateError> {
    check_inputs(net, inputs)?;
    let mut sim = Simulator::new(net.clone())?;
    run(&mut sim, inputs, clock_active)
}

pub fn truth_table(net: &Netlist) -> Result<TruthTable, GateError> {
    let n = net.inputs().len();
    if n > MAX_TABLE_INPUTS {
        return Err(GateError::TooManyInputs(n));
    }
    let names: Vec<String> = net.inputs().iter().map(|p| p.name.clone()).collect();
    let outs: Vec<String> = net.outputs().iter().map(|p| p.name.clone()).collect();
    let mut sim = Simulator::new(net.clone())?;
    let mut rows = Vec::with_capacity(1 << n);
    for k in 0..(1usize << n) {
        let bits: Vec<bool> = (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect();
        let inputs: BTreeMap<String, DualRailValue> = names
            .iter()
            .zip(&bits)
            .map(|(p, &b)| (p.clone(), DualRailValue::from_bool(b)))
            .collect();
        sim.reset();
        let result = run(&mut sim, &inputs, true)?;
        let values = outs
            .iter()
            .map(|o| result[o].to_bool().ok_or_else(|| GateError::BlankInput(o.clone())))
            .collect::<Result<Vec<bool>, _>>()?;
        rows.push((bits, values));
    }
    Ok(TruthTable {
        inputs: names,
        outputs: outs,
        rows,
    })
}

/// Recovers the inputs that produce `outputs`. The netlist must map inputs to
/// outputs one-to-one; this is checked on its full truth table.
pub fn evaluate_reverse(
    net: &Netlist,
    outputs: &BTreeMap<String, DualRailValue>,
) -> Result<BTreeMap<String, DualRailValue>, GateError> {
    let table = truth_table(net)?;
    if table.inputs.len() != table.outputs.len() {
        return Err(GateError::NotReversible(format!(
            "{} inputs but {} outputs",
            table.inputs.len(),
            table.outputs.len()
        )));
    }
    let mut inverse: HashMap<&[bool], &[bool]> = HashMap::new();
    for (i, o) in &table.rows {
        if inverse.insert(o, i).is_some() {
            return Err(GateError::NotReversible(format!(
                "output row {o:?} is produced more than once"
            )));
        }
    }
    for name in outputs.keys() {
        if !table.outputs.contains(name) {
            return Err(GateError::UnknownPort(name.clone()));
        }
    }
    let key = table
        .outputs
        .iter()
        .map(|o| match outputs.get(o) {
            None => Err(GateError::MissingInput(o.clone())),
            Some(v) => v.to_bool().ok_or_else(|| GateError::BlankInput(o.clone())),
        })
        .collect::<Result<Vec<bool>, _>>()?;
    let found = inverse[key.as_slice()];
    Ok(table
        .inputs
        .iter()
        .zip(found)
        .map(|(n, &b)| (n.clone(), DualRailValue::from_bool(b)))
        .collect())
}
