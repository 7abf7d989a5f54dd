//! Event-driven netlist simulation.
//!
//! External events raise or lower undriven rails (inputs and clocks). Each
//! change propagates through the elements in a fixed topological order.
//!
//! A balance decides which side to move when its input rises. A side is
//! blocked when any rail rigidly attached to it, meaning the side rail and
//! everything reached from it through copies and merges, is half of a lock
//! whose other half is raised. Because the check looks downstream as well as
//! at the balance's own locks, a balance re-raised while its successor still
//! holds a value moves toward that value, which is what lets a chain run
//! backward. A balance keeps its side until its input falls.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use super::netlist::{Element, ElementKind, Netlist, NetlistError, RailId};
use super::{DualRailValue, GateError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("rail `{rail}` cannot rise: its lock partner `{partner}` is raised")]
    BindingViolation { rail: String, partner: String },
    #[error("balance `{element}` actuated with neither side locked")]
    BothSidesFree { element: String },
    #[error("balance `{element}` actuated with both sides locked")]
    BothSidesLocked { element: String },
    #[error("rail `{0}` is driven by an element and cannot be set directly")]
    DrivenRail(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Complete mechanical state: every rail and every balance decision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimState {
    pub rails: Vec<bool>,
    pub choices: Vec<Option<u8>>,
}

#[derive(Debug, Clone)]
pub struct Simulator {
    net: Netlist,
    elements: Arc<Vec<Element>>,
    blank_idle: bool,
    rank: Vec<usize>,
    dependents: Vec<Vec<usize>>,
    driven: Vec<bool>,
    partner: Vec<Option<RailId>>,
    /// Per balance element, the rails rigidly attached to each side.
    closures: Vec<Option<[Vec<RailId>; 2]>>,
    state: SimState,
    queue: BinaryHeap<Reverse<(usize, usize)>>,
    queued: Vec<bool>,
}

impl Simulator {
    pub fn new(net: Netlist) -> Result<Self, SimError> {
        net.validate()?;
        let n_rails = net.rails().len();
        let elements = net.elements();
        let drivers = net.drivers();
        let partner = net.lock_partners();

        let mut dependents = vec![Vec::new(); n_rails];
        for (i, e) in elements.iter().enumerate() {
            for r in e.sources() {
                dependents[r.0].push(i);
            }
        }

        let closures: Vec<Option<[Vec<RailId>; 2]>> = elements
            .iter()
            .map(|e| match &e.kind {
                ElementKind::Balance { sides, .. } => {
                    Some([rigid_closure(&net, sides[0]), rigid_closure(&net, sides[1])])
                }
                _ => None,
            })
            .collect();

        // Dependency edges within one phase: sources, plus for balances the
        // lock partners of their side rails, so a balance decides only after
        // the values locking it have settled.
        let mut succ = vec![Vec::new(); elements.len()];
        let mut indeg = vec![0usize; elements.len()];
        for (b, e) in elements.iter().enumerate() {
            let mut deps: Vec<RailId> = e.sources();
            if let ElementKind::Balance { sides, .. } = &e.kind {
                deps.extend(sides.iter().filter_map(|s| partner[s.0]));
            }
            deps.sort();
            deps.dedup();
            for r in deps {
                if let Some(a) = drivers[r.0] {
                    if a != b && elements[a].phase == e.phase {
                        succ[a].push(b);
                        indeg[b] += 1;
                    }
                }
            }
        }
        let mut rank = vec![usize::MAX; elements.len()];
        let mut ready: BinaryHeap<Reverse<usize>> = (0..elements.len())
            .filter(|&i| indeg[i] == 0)
            .map(Reverse)
            .collect();
        let mut next = 0;
        while let Some(Reverse(a)) = ready.pop() {
            rank[a] = next;
            next += 1;
            for &b in &succ[a] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    ready.push(Reverse(b));
                }
            }
        }
        if let Some(i) = rank.iter().position(|&r| r == usize::MAX) {
            return Err(NetlistError::Cycle {
                phase: elements[i].phase,
                element: elements[i].name.clone(),
            }
            .into());
        }

        let state = SimState {
            rails: vec![false; n_rails],
            choices: vec![None; elements.len()],
        };
        let queued = vec![false; elements.len()];
        Ok(Self {
            driven: drivers.iter().map(Option::is_some).collect(),
            elements: Arc::new(net.elements().to_vec()),
            blank_idle: false,
            net,
            rank,
            dependents,
            partner,
            closures,
            state,
            queue: BinaryHeap::new(),
            queued,
        })
    }

    /// When set, a balance whose sides are both free stays where it is
    /// instead of failing: the clock cannot drive an empty cell.
    pub fn set_blank_idle(&mut self, idle: bool) {
        self.blank_idle = idle;
    }

    pub fn netlist(&self) -> &Netlist {
        &self.net
    }

    pub fn rail(&self, rail: RailId) -> bool {
        self.state.rails[rail.0]
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn snapshot(&self) -> SimState {
        self.state.clone()
    }

    pub fn restore(&mut self, state: SimState) {
        assert_eq!(state.rails.len(), self.state.rails.len());
        assert_eq!(state.choices.len(), self.state.choices.len());
        self.state = state;
    }

    /// Returns every rail to 0 and clears all balance decisions.
    pub fn reset(&mut self) {
        self.state.rails.fill(false);
        self.state.choices.fill(None);
    }

    /// Moves an undriven rail and lets the change settle. After an error the
    /// state is left as it was when the error occurred.
    pub fn set_rail(&mut self, rail: RailId, value: bool) -> Result<(), SimError> {
        if self.driven[rail.0] {
            return Err(SimError::DrivenRail(self.net.rail_name(rail).to_string()));
        }
        self.write(rail, value)?;
        self.settle()
    }

    pub fn set_clock(&mut self, phase: usize, value: bool) -> Result<(), SimError> {
        let rails: Vec<RailId> = self
            .net
            .clocks()
            .iter()
            .filter(|&&(_, p)| p == phase)
            .map(|&(r, _)| r)
            .collect();
        for r in rails {
            self.set_rail(r, value)?;
        }
        Ok(())
    }

    /// Drives an input port. The falling rail moves before the rising one.
    pub fn set_input(&mut self, port: &str, value: DualRailValue) -> Result<(), GateError> {
        let rails = self
            .net
            .input(port)
            .ok_or_else(|| GateError::UnknownPort(port.to_string()))?
            .rails;
        let (v0, v1) = value.rails();
        for (r, v) in [(rails[0], v0), (rails[1], v1)] {
            if !v {
                self.set_rail(r, false)?;
            }
        }
        for (r, v) in [(rails[0], v0), (rails[1], v1)] {
            if v {
                self.set_rail(r, true)?;
            }
        }
        Ok(())
    }

    /// Reads any port, input or output.
    pub fn read_port(&self, port: &str) -> Result<DualRailValue, GateError> {
        let p = self
            .net
            .output(port)
            .or_else(|| self.net.input(port))
            .ok_or_else(|| GateError::UnknownPort(port.to_string()))?;
        self.read_rails(p.rails)
            .map_err(|_| GateError::ForbiddenState(port.to_string()))
    }

    pub fn read_rails(&self, rails: [RailId; 2]) -> Result<DualRailValue, GateError> {
        DualRailValue::from_rails(self.rail(rails[0]), self.rail(rails[1]))
    }

    fn write(&mut self, rail: RailId, value: bool) -> Result<(), SimError> {
        if self.state.rails[rail.0] == value {
            return Ok(());
        }
        if value {
            if let Some(p) = self.partner[rail.0] {
                if self.state.rails[p.0] {
                    return Err(SimError::BindingViolation {
                        rail: self.net.rail_name(rail).to_string(),
                        partner: self.net.rail_name(p).to_string(),
                    });
                }
            }
        }
        self.state.rails[rail.0] = value;
        for &e in &self.dependents[rail.0] {
            if !self.queued[e] {
                self.queued[e] = true;
                self.queue.push(Reverse((self.rank[e], e)));
            }
        }
        Ok(())
    }

    fn settle(&mut self) -> Result<(), SimError> {
        while let Some(Reverse((_, e))) = self.queue.pop() {
            self.queued[e] = false;
            if let Err(err) = self.evaluate(e) {
                for Reverse((_, q)) in self.queue.drain() {
                    self.queued[q] = false;
                }
                return Err(err);
            }
        }
        Ok(())
    }

    fn blocked(&self, element: usize, side: usize) -> bool {
        let closure = &self.closures[element].as_ref().expect("balance closure")[side];
        closure
            .iter()
            .any(|r| self.partner[r.0].is_some_and(|p| self.state.rails[p.0]))
    }

    fn evaluate(&mut self, e: usize) -> Result<(), SimError> {
        let elements = Arc::clone(&self.elements);
        match &elements[e].kind {
            ElementKind::Lock { .. } => Ok(()),
            ElementKind::Copy { src, dsts } => {
                let v = self.state.rails[src.0];
                for &d in dsts {
                    self.write(d, v)?;
                }
                Ok(())
            }
            ElementKind::Merge { srcs, dst } => {
                let v = srcs.iter().any(|s| self.state.rails[s.0]);
                self.write(*dst, v)
            }
            ElementKind::Balance { input, sides } => {
                let (input, sides) = (*input, *sides);
                let up = self.state.rails[input.0];
                match (up, self.state.choices[e]) {
                    (true, None) => {
                        let side = match (self.blocked(e, 0), self.blocked(e, 1)) {
                            (false, false) if self.blank_idle => return Ok(()),
                            (false, false) => {
                                return Err(SimError::BothSidesFree {
                                    element: elements[e].name.clone(),
                                })
                            }
                            (true, true) => {
                                return Err(SimError::BothSidesLocked {
                                    element: elements[e].name.clone(),
                                })
                            }
                            (true, false) => 1,
                            (false, true) => 0,
                        };
                        self.state.choices[e] = Some(side as u8);
                        self.write(sides[side], true)
                    }
                    (false, Some(side)) => {
                        self.state.choices[e] = None;
                        self.write(sides[side as usize], false)
                    }
                    _ => Ok(()),
                }
            }
        }
    }
}

/// The side rail plus every rail reached from it through copies and merges.
fn rigid_closure(net: &Netlist, start: RailId) -> Vec<RailId> {
    let mut seen = vec![false; net.rails().len()];
    let mut out = Vec::new();
    let mut todo = VecDeque::from([start]);
    seen[start.0] = true;
    while let Some(r) = todo.pop_front() {
        out.push(r);
        for e in net.elements() {
            let next: Vec<RailId> = match &e.kind {
                ElementKind::Copy { src, dsts } if *src == r => dsts.clone(),
                ElementKind::Merge { srcs, dst } if srcs.contains(&r) => vec![*dst],
                _ => Vec::new(),
            };
            for n in next {
                if !seen[n.0] {
                    seen[n.0] = true;
                    todo.push_back(n);
                }
            }
        }
    }
    out
}
