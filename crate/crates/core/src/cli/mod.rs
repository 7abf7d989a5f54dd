//! Netlist files, the command-line front end, test-vector runs and SVG
//! rendering.

mod app;
mod build;
pub mod document;
pub mod render;

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use thiserror::Error;

use crate::energy::EnergyError;
use crate::gates::{
    evaluate_reverse, truth_table, DualRailValue, ElementKind, GateError, Netlist, NetlistError, SimError, Simulator,
    TruthTable,
};
use crate::sequential::{
    force_isolation, validate_clock, ChainMachine, ChainTraceStep, ClockProgram, ClockReport, ClockedRunner,
    SequentialError, ShiftChain, PHASES,
};

pub use app::{main_with_args, Cli};
pub use build::build_netlist;
pub use document::{parse, serialize, Document, ParseError, ParseErrorKind, Statement};

/// Longest signal line, in cells, that one push may travel.
pub const ISOLATION_BOUND: usize = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Simulation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Simulation(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Validation(_) => "validation",
            CliError::Simulation(_) => "simulation",
            CliError::Io(_) => "io",
        }
    }

    /// Single-line `error[<category>]: <message>` diagnostic.
    pub fn diagnostic(&self) -> String {
        let msg = self.to_string().replace('\n', "; ");
        format!("error[{}]: {msg}", self.category())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<GateError> for CliError {
    fn from(e: GateError) -> Self {
        match e {
            GateError::ForbiddenState(_) | GateError::ScheduleViolation(_) => CliError::Simulation(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<NetlistError> for CliError {
    fn from(e: NetlistError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Netlist(n) => n.into(),
            e => CliError::Simulation(e.to_string()),
        }
    }
}

impl From<SequentialError> for CliError {
    fn from(e: SequentialError) -> Self {
        match e {
            SequentialError::ScheduleViolation(_) => CliError::Simulation(e.to_string()),
            SequentialError::Gate(g) => g.into(),
            e => CliError::Validation(e.to_string()),
        }
    }
}

impl From<EnergyError> for CliError {
    fn from(e: EnergyError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// One snapshot of every element.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFrame {
    pub t: f64,
    pub event: String,
    pub states: Vec<(String, String)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub frames: Vec<TraceFrame>,
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    t: f64,
    element: &'a str,
    state: &'a str,
}

impl Trace {
    /// One `{"t", "element", "state"}` record per element per frame.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for f in &self.frames {
            for (element, state) in &f.states {
                let rec = TraceRecord { t: f.t, element, state };
                out.push_str(&serde_json::to_string(&rec).expect("trace records serialize"));
                out.push('\n');
            }
        }
        out
    }
}

fn bit(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

/// State of every element: a lock as its two halves, a balance as the side
/// it moved (`-` for none), a copy or merge as its first destination.
pub fn element_states(sim: &Simulator) -> Vec<(String, String)> {
    let net = sim.netlist();
    net.elements()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let state = match &e.kind {
                ElementKind::Lock { halves } => format!("{}{}", bit(sim.rail(halves[0])), bit(sim.rail(halves[1]))),
                ElementKind::Balance { .. } => match sim.state().choices[i] {
                    Some(side) => side.to_string(),
                    None => "-".to_string(),
                },
                ElementKind::Copy { dsts, .. } => bit(sim.rail(dsts[0])).to_string(),
                ElementKind::Merge { dst, .. } => bit(sim.rail(*dst)).to_string(),
            };
            (e.name.clone(), state)
        })
        .collect()
}

fn chain_states(cells: &[crate::sequential::ShiftCell]) -> Vec<(String, String)> {
    cells
        .iter()
        .enumerate()
        .map(|(k, c)| (format!("c{}", k + 1), c.output_value().to_string()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub step: usize,
    pub inputs: BTreeMap<String, DualRailValue>,
    pub outputs: BTreeMap<String, DualRailValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub vector: String,
    pub steps: Vec<StepResult>,
}

/// A parsed document together with its netlist.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub doc: Document,
    pub net: Netlist,
}

impl Loaded {
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let doc = parse(text)?;
        let net = build_netlist(&doc)?;
        Ok(Self { doc, net })
    }

    /// Vector `name`, or the first vector that only sets inputs (outputs when
    /// `outputs` is true).
    fn vector(&self, name: Option<&str>, outputs: bool) -> Result<(String, Vec<(String, Vec<bool>)>), CliError> {
        let found = match name {
            Some(n) => self.doc.vectors().into_iter().find(|(v, _)| *v == n).map(|(n, v)| (n.to_string(), v.to_vec())),
            None => self.vector_names(outputs).first().and_then(|n| self.vector(Some(n), outputs).ok()),
        };
        let what = if outputs { "output" } else { "input" };
        found.ok_or_else(|| CliError::Validation(format!("no {what} vector `{}`", name.unwrap_or("<first>"))))
    }

    /// Names of the vectors that set only input ports (only output ports when
    /// `outputs` is true), in file order.
    pub fn vector_names(&self, outputs: bool) -> Vec<String> {
        self.doc
            .vectors()
            .into_iter()
            .filter(|(_, values)| {
                values.iter().all(|(p, _)| {
                    if outputs {
                        self.net.output(p).is_some()
                    } else {
                        self.net.input(p).is_some()
                    }
                })
            })
            .map(|(n, _)| n.to_string())
            .collect()
    }

    fn clock(&self) -> Result<ClockProgram, CliError> {
        let clock = self.doc.clock().unwrap_or_default();
        let report = validate_clock(&clock);
        if report.passed {
            Ok(clock)
        } else {
            Err(CliError::Validation(format!("invalid clock: {report}")))
        }
    }

    /// Default number of cycles for a stream of `len` values: enough for the
    /// last value to leave the deepest pipeline.
    fn default_cycles(&self, len: usize) -> usize {
        len + self.net.cells().len() / PHASES + 1
    }

    /// Runs vector `name` (the first one when `None`). Combinational
    /// documents evaluate each position of the vector on its own; sequential
    /// ones feed one position per clock cycle.
    pub fn run(&self, name: Option<&str>, cycles: Option<usize>) -> Result<(RunResult, Trace), CliError> {
        let (vector, values) = self.vector(name, false)?;
        for (port, _) in &values {
            if self.net.input(port).is_none() {
                return Err(CliError::Validation(format!("vector `{vector}` sets `{port}`, which is not an input")));
            }
        }
        let len = values.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        if self.doc.is_sequential() {
            self.run_sequential(vector, &values, cycles.unwrap_or_else(|| self.default_cycles(len)))
        } else {
            if values.iter().any(|(_, v)| v.len() != len) {
                return Err(CliError::Validation(format!("ports of vector `{vector}` differ in length")));
            }
            self.run_combinational(vector, &values, len)
        }
    }

    fn row(values: &[(String, Vec<bool>)], i: usize) -> BTreeMap<String, DualRailValue> {
        values
            .iter()
            .map(|(p, v)| (p.clone(), v.get(i).map_or(DualRailValue::Blank, |&b| DualRailValue::from_bool(b))))
            .collect()
    }

    fn run_combinational(
        &self,
        vector: String,
        values: &[(String, Vec<bool>)],
        len: usize,
    ) -> Result<(RunResult, Trace), CliError> {
        for port in self.net.inputs() {
            if !values.iter().any(|(p, _)| *p == port.name) {
                return Err(GateError::MissingInput(port.name.clone()).into());
            }
        }
        let mut sim = Simulator::new(self.net.clone())?;
        let mut trace = Trace::default();
        let mut steps = Vec::new();
        let top = self.net.max_phase();
        for i in 0..len {
            sim.reset();
            let inputs = Self::row(values, i);
            for (p, v) in &inputs {
                sim.set_input(p, *v)?;
            }
            let t0 = i as f64;
            trace.frames.push(TraceFrame {
                t: t0,
                event: "set input".into(),
                states: element_states(&sim),
            });
            for p in 0..=top.unwrap_or(0) {
                if top.is_some() {
                    sim.set_clock(p, true)?;
                }
                trace.frames.push(TraceFrame {
                    t: t0 + 0.2 * (p + 1) as f64,
                    event: format!("raise p{p}"),
                    states: element_states(&sim),
                });
            }
            let outputs = self
                .net
                .outputs()
                .iter()
                .map(|o| Ok((o.name.clone(), sim.read_port(&o.name)?)))
                .collect::<Result<_, GateError>>()?;
            steps.push(StepResult {
                step: i,
                inputs,
                outputs,
            });
        }
        Ok((RunResult { vector, steps }, trace))
    }

    fn run_sequential(
        &self,
        vector: String,
        values: &[(String, Vec<bool>)],
        cycles: usize,
    ) -> Result<(RunResult, Trace), CliError> {
        let mut runner = ClockedRunner::new(self.net.clone(), &self.clock()?)?;
        let mut trace = Trace::default();
        let mut steps = Vec::new();
        for c in 0..cycles {
            let inputs = Self::row(values, c);
            let outputs = runner.run_cycle_with(&inputs, &mut |t, action, sim| {
                trace.frames.push(TraceFrame {
                    t,
                    event: action.to_string(),
                    states: element_states(sim),
                });
                Ok(())
            })?;
            steps.push(StepResult {
                step: c,
                inputs,
                outputs,
            });
        }
        Ok((RunResult { vector, steps }, trace))
    }

    pub fn truth_table(&self) -> Result<TruthTable, CliError> {
        if self.doc.is_sequential() {
            return Err(CliError::Validation("truth tables need a combinational netlist".into()));
        }
        Ok(truth_table(&self.net)?)
    }

    /// The single chain of a document made of one `chain` between its ports.
    fn single_chain(&self) -> Option<(usize, usize)> {
        let mut found = None;
        for s in &self.doc.statements {
            match s {
                Statement::Chain { cells, clock, .. } => {
                    if found.replace((*cells, *clock)).is_some() {
                        return None;
                    }
                }
                Statement::Clock(_)
                | Statement::Geometry(_)
                | Statement::DualRail { .. }
                | Statement::Vector { .. } => {}
                _ => return None,
            }
        }
        found
    }

    fn chain_machine(&self, name: Option<&str>) -> Result<ChainMachine, CliError> {
        let Some((cells, 0)) = self.single_chain() else {
            return Err(CliError::Validation(
                "reversal needs a combinational netlist or a single chain starting on phase 0".into(),
            ));
        };
        let (_, values) = self.vector(name, false)?;
        let stream: Vec<DualRailValue> = match values.as_slice() {
            [(_, bits)] => bits.iter().map(|&b| DualRailValue::from_bool(b)).collect(),
            _ => return Err(CliError::Validation("a chain vector sets exactly one port".into())),
        };
        Ok(ChainMachine::new(ShiftChain::new(cells), &self.clock()?, stream))
    }

    /// Forward `cycles` cycles of the document's chain, then the same number
    /// backward.
    pub fn chain_round_trip(
        &self,
        name: Option<&str>,
        cycles: Option<usize>,
    ) -> Result<ChainRoundTrip, CliError> {
        let mut machine = self.chain_machine(name)?;
        let start = machine.clone();
        let cycles = cycles.unwrap_or_else(|| self.default_cycles(machine.pending.len()));
        let events = cycles * machine.schedule.len();
        let last = machine.chain.len() - 1;
        let mut forward = Vec::with_capacity(events);
        let mut outputs = Vec::new();
        for _ in 0..events {
            let step = machine.step()?;
            if step.action == crate::sequential::Action::Raise(last % PHASES) {
                outputs.push(machine.chain.output());
            }
            forward.push(step);
        }
        let backward = (0..events).map(|_| machine.step_back()).collect::<Result<Vec<_>, _>>()?;
        let restored = machine == start;
        Ok(ChainRoundTrip {
            initial: start.chain.cells,
            forward,
            backward,
            outputs,
            restored,
        })
    }

    /// Recovers inputs from outputs. Combinational documents invert their
    /// truth table per vector position; a single-chain document runs forward
    /// and back and reports whether it returned to its start.
    pub fn reverse(&self, name: Option<&str>, cycles: Option<usize>) -> Result<ReverseResult, CliError> {
        if self.doc.is_sequential() {
            let trip = self.chain_round_trip(name, cycles)?;
            let mut trace = Trace::default();
            for s in trip.forward.iter().chain(&trip.backward) {
                trace.frames.push(TraceFrame {
                    t: s.time,
                    event: if s.reversed { format!("undo {}", s.action.inverse()) } else { s.action.to_string() },
                    states: chain_states(&s.cells),
                });
            }
            return Ok(ReverseResult::Chain { trip, trace });
        }
        let (vector, values) = self.vector(name, true)?;
        for (port, _) in &values {
            if self.net.output(port).is_none() {
                return Err(CliError::Validation(format!("vector `{vector}` sets `{port}`, which is not an output")));
            }
        }
        let len = values.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        let mut steps = Vec::new();
        for i in 0..len {
            let outputs = Self::row(&values, i);
            let inputs = evaluate_reverse(&self.net, &outputs)?;
            steps.push(StepResult {
                step: i,
                inputs,
                outputs,
            });
        }
        Ok(ReverseResult::Table(RunResult { vector, steps }))
    }

    /// Clock validation, structural validation and the force-isolation bound
    /// over a run of the first vector (or blank inputs).
    pub fn check(&self) -> Result<CheckReport, CliError> {
        let clock = self.doc.clock().map(|c| validate_clock(&c));
        let sim = Simulator::new(self.net.clone())?;
        let clock_ok = clock.as_ref().is_none_or(|r| r.passed);
        let mut isolation = force_isolation(&self.net, sim.state());
        if clock_ok {
            let values = self.vector(None, false).map(|(_, v)| v).unwrap_or_default();
            let len = values.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
            if self.doc.is_sequential() {
                let mut runner = ClockedRunner::new(self.net.clone(), &self.clock()?)?;
                for c in 0..self.default_cycles(len) {
                    let inputs: BTreeMap<String, DualRailValue> =
                        Self::row(&values, c).into_iter().filter(|(p, _)| self.net.input(p).is_some()).collect();
                    runner.run_cycle_with(&inputs, &mut |_, _, sim| {
                        isolation = isolation.max(force_isolation(sim.netlist(), sim.state()));
                        Ok(())
                    })?;
                }
            } else if !values.is_empty() && values.iter().all(|(p, _)| self.net.input(p).is_some()) {
                let mut sim = Simulator::new(self.net.clone())?;
                for (p, v) in Self::row(&values, 0) {
                    sim.set_input(&p, v)?;
                }
                isolation = isolation.max(force_isolation(&self.net, sim.state()));
                for p in 0..=self.net.max_phase().unwrap_or(0) {
                    if self.net.max_phase().is_some() {
                        sim.set_clock(p, true)?;
                    }
                    isolation = isolation.max(force_isolation(&self.net, sim.state()));
                }
            }
        }
        Ok(CheckReport {
            clock,
            rails: self.net.rails().len(),
            elements: self.net.elements().len(),
            cells: self.net.cells().len(),
            isolation,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRoundTrip {
    pub initial: Vec<crate::sequential::ShiftCell>,
    pub forward: Vec<ChainTraceStep>,
    pub backward: Vec<ChainTraceStep>,
    /// Value of the last cell each time it rose.
    pub outputs: Vec<DualRailValue>,
    pub restored: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReverseResult {
    Table(RunResult),
    Chain { trip: ChainRoundTrip, trace: Trace },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub clock: Option<ClockReport>,
    pub rails: usize,
    pub elements: usize,
    pub cells: usize,
    pub isolation: usize,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.clock.as_ref().is_none_or(|c| c.passed) && self.isolation <= ISOLATION_BOUND
    }
}
