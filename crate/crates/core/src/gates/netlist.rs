//! Lock/balance netlists.
//!
//! A netlist is a set of named binary rails (each one a moving link) and the
//! elements that act on them:
//!
//! - a **lock** pairs two rails that may never both be raised;
//! - a **balance** raises one of its two side rails when its input rail rises,
//!   choosing the side that is not blocked by a lock;
//! - a **copy** is a bell-crank fan-out: every destination follows the source;
//! - a **merge** joins mutually exclusive sources onto one destination.
//!
//! Every rail has at most one driving element. Rails without a driver are
//! either input-port rails or clock rails. Elements carry the clock phase they
//! belong to and an optional cell annotation used by force-isolation analysis.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RailId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementKind {
    Lock { halves: [RailId; 2] },
    Balance { input: RailId, sides: [RailId; 2] },
    Copy { src: RailId, dsts: Vec<RailId> },
    Merge { srcs: Vec<RailId>, dst: RailId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub kind: ElementKind,
    pub phase: usize,
    pub cell: Option<usize>,
}

impl Element {
    /// Rails this element moves.
    pub fn driven(&self) -> Vec<RailId> {
        match &self.kind {
            ElementKind::Lock { .. } => Vec::new(),
            ElementKind::Balance { sides, .. } => sides.to_vec(),
            ElementKind::Copy { dsts, .. } => dsts.clone(),
            ElementKind::Merge { dst, .. } => vec![*dst],
        }
    }

    /// Rails whose motion this element follows.
    pub fn sources(&self) -> Vec<RailId> {
        match &self.kind {
            ElementKind::Lock { .. } => Vec::new(),
            ElementKind::Balance { input, .. } => vec![*input],
            ElementKind::Copy { src, .. } => vec![*src],
            ElementKind::Merge { srcs, .. } => srcs.clone(),
        }
    }
}

/// A named dual-rail port: `rails[0]` carries zero, `rails[1]` carries one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub rails: [RailId; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("rail `{rail}`: {reason}")]
    ForbiddenWiring { rail: String, reason: String },
    #[error("combinational cycle in phase {phase} through `{element}`")]
    Cycle { phase: usize, element: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Netlist {
    pub name: String,
    rails: Vec<String>,
    rail_index: HashMap<String, RailId>,
    elements: Vec<Element>,
    inputs: Vec<Port>,
    outputs: Vec<Port>,
    clocks: Vec<(RailId, usize)>,
    cells: Vec<String>,
}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn rails(&self) -> &[String] {
        &self.rails
    }

    pub fn rail_name(&self, rail: RailId) -> &str {
        &self.rails[rail.0]
    }

    pub fn rail(&self, name: &str) -> Result<RailId, NetlistError> {
        self.rail_index
            .get(name)
            .copied()
            .ok_or_else(|| NetlistError::UnknownName(name.to_string()))
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn inputs(&self) -> &[Port] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Port] {
        &self.outputs
    }

    pub fn clocks(&self) -> &[(RailId, usize)] {
        &self.clocks
    }

    pub fn cells(&self) -> &[String] {
        &self.cells
    }

    pub fn input(&self, name: &str) -> Option<&Port> {
        self.inputs.iter().find(|p| p.name == name)
    }

    pub fn output(&self, name: &str) -> Option<&Port> {
        self.outputs.iter().find(|p| p.name == name)
    }

    /// Highest clock phase in use, or `None` for a netlist without clocks.
    pub fn max_phase(&self) -> Option<usize> {
        self.clocks.iter().map(|&(_, p)| p).max()
    }

    pub fn add_rail(&mut self, name: impl Into<String>) -> Result<RailId, NetlistError> {
        let name = name.into();
        if self.rail_index.contains_key(&name) {
            return Err(NetlistError::DuplicateName(name));
        }
        let id = RailId(self.rails.len());
        self.rail_index.insert(name.clone(), id);
        self.rails.push(name);
        Ok(id)
    }

    /// Declares rails `<name>.0` and `<name>.1`.
    pub fn add_dual_rail(&mut self, name: &str) -> Result<[RailId; 2], NetlistError> {
        Ok([
            self.add_rail(format!("{name}.0"))?,
            self.add_rail(format!("{name}.1"))?,
        ])
    }

    pub fn dual_rail(&self, name: &str) -> Result<[RailId; 2], NetlistError> {
        Ok([
            self.rail(&format!("{name}.0"))?,
            self.rail(&format!("{name}.1"))?,
        ])
    }

    pub fn add_cell(&mut self, name: impl Into<String>) -> Result<usize, NetlistError> {
        let name = name.into();
        if self.cells.contains(&name) {
            return Err(NetlistError::DuplicateName(name));
        }
        self.cells.push(name);
        Ok(self.cells.len() - 1)
    }

    pub fn add_element(
        &mut self,
        name: impl Into<String>,
        kind: ElementKind,
        phase: usize,
        cell: Option<usize>,
    ) -> usize {
        self.elements.push(Element {
            name: name.into(),
            kind,
            phase,
            cell,
        });
        self.elements.len() - 1
    }

    pub fn add_input(&mut self, name: impl Into<String>, rails: [RailId; 2]) -> Result<(), NetlistError> {
        let name = name.into();
        if self.input(&name).is_some() || self.output(&name).is_some() {
            return Err(NetlistError::DuplicateName(name));
        }
        self.inputs.push(Port { name, rails });
        Ok(())
    }

    pub fn add_output(&mut self, name: impl Into<String>, rails: [RailId; 2]) -> Result<(), NetlistError> {
        let name = name.into();
        if self.input(&name).is_some() || self.output(&name).is_some() {
            return Err(NetlistError::DuplicateName(name));
        }
        self.outputs.push(Port { name, rails });
        Ok(())
    }

    pub fn add_clock(&mut self, rail: RailId, phase: usize) {
        self.clocks.push((rail, phase));
    }

    /// Returns the clock rail of `phase`, creating `clk<phase>` if needed.
    pub fn clock_rail(&mut self, phase: usize) -> Result<RailId, NetlistError> {
        if let Some(&(r, _)) = self.clocks.iter().find(|&&(_, p)| p == phase) {
            return Ok(r);
        }
        let r = self.add_rail(format!("clk{phase}"))?;
        self.add_clock(r, phase);
        Ok(r)
    }

    /// Exchanges the rails of an output port (logical inversion).
    pub fn swap_output(&mut self, name: &str) -> Result<(), NetlistError> {
        let port = self
            .outputs
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| NetlistError::UnknownName(name.to_string()))?;
        port.rails.swap(0, 1);
        Ok(())
    }

    /// Exchanges the rails of an input port.
    pub fn swap_input(&mut self, name: &str) -> Result<(), NetlistError> {
        let port = self
            .inputs
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| NetlistError::UnknownName(name.to_string()))?;
        port.rails.swap(0, 1);
        Ok(())
    }

    /// Copies `sub` into this netlist. Port rails of `sub` are replaced by the
    /// rails in `bindings`, its clock rails by this netlist's clock of `phase`,
    /// and every other rail and element is renamed `<prefix>/<name>`. All
    /// copied elements run on `phase` and belong to `cell`.
    pub fn instantiate(
        &mut self,
        sub: &Netlist,
        prefix: &str,
        bindings: &BTreeMap<String, [RailId; 2]>,
        phase: usize,
        cell: Option<usize>,
    ) -> Result<(), NetlistError> {
        let mut map: HashMap<RailId, RailId> = HashMap::new();
        for port in sub.inputs.iter().chain(&sub.outputs) {
            let bound = bindings
                .get(&port.name)
                .ok_or_else(|| NetlistError::UnknownName(format!("{prefix}.{}", port.name)))?;
            map.insert(port.rails[0], bound[0]);
            map.insert(port.rails[1], bound[1]);
        }
        for name in bindings.keys() {
            if sub.input(name).is_none() && sub.output(name).is_none() {
                return Err(NetlistError::UnknownName(format!("{prefix}.{name}")));
            }
        }
        if !sub.clocks.is_empty() {
            let clk = self.clock_rail(phase)?;
            for &(r, _) in &sub.clocks {
                map.insert(r, clk);
            }
        }
        for (i, name) in sub.rails.iter().enumerate() {
            if !map.contains_key(&RailId(i)) {
                let r = self.add_rail(format!("{prefix}/{name}"))?;
                map.insert(RailId(i), r);
            }
        }
        let m = |r: &RailId| map[r];
        for e in &sub.elements {
            let kind = match &e.kind {
                ElementKind::Lock { halves } => ElementKind::Lock {
                    halves: [m(&halves[0]), m(&halves[1])],
                },
                ElementKind::Balance { input, sides } => ElementKind::Balance {
                    input: m(input),
                    sides: [m(&sides[0]), m(&sides[1])],
                },
                ElementKind::Copy { src, dsts } => ElementKind::Copy {
                    src: m(src),
                    dsts: dsts.iter().map(m).collect(),
                },
                ElementKind::Merge { srcs, dst } => ElementKind::Merge {
                    srcs: srcs.iter().map(m).collect(),
                    dst: m(dst),
                },
            };
            self.add_element(format!("{prefix}/{}", e.name), kind, phase, cell);
        }
        Ok(())
    }

    /// For every rail, the element that drives it.
    pub fn drivers(&self) -> Vec<Option<usize>> {
        let mut d = vec![None; self.rails.len()];
        for (i, e) in self.elements.iter().enumerate() {
            for r in e.driven() {
                d[r.0] = Some(i);
            }
        }
        d
    }

    /// For every rail, the other half of the lock it belongs to.
    pub fn lock_partners(&self) -> Vec<Option<RailId>> {
        let mut p = vec![None; self.rails.len()];
        for e in &self.elements {
            if let ElementKind::Lock { halves } = e.kind {
                p[halves[0].0] = Some(halves[1]);
                p[halves[1].0] = Some(halves[0]);
            }
        }
        p
    }

    /// Structural checks: single drivers, one lock per rail, undriven source
    /// rails, distinct port rails.
    pub fn validate(&self) -> Result<(), NetlistError> {
        let forbidden = |rail: RailId, reason: &str| NetlistError::ForbiddenWiring {
            rail: self.rails[rail.0].clone(),
            reason: reason.to_string(),
        };
        let mut driver: Vec<Option<usize>> = vec![None; self.rails.len()];
        let mut locked = vec![false; self.rails.len()];
        for (i, e) in self.elements.iter().enumerate() {
            for r in e.driven() {
                if driver[r.0].is_some() {
                    return Err(forbidden(r, "driven by more than one element"));
                }
                driver[r.0] = Some(i);
            }
            if let ElementKind::Lock { halves } = e.kind {
                if halves[0] == halves[1] {
                    return Err(forbidden(halves[0], "lock halves must differ"));
                }
                for h in halves {
                    if locked[h.0] {
                        return Err(forbidden(h, "belongs to more than one lock"));
                    }
                    locked[h.0] = true;
                }
            }
            if let ElementKind::Balance { input, sides } = e.kind {
                if sides[0] == sides[1] || sides.contains(&input) {
                    return Err(forbidden(input, "balance rails must be distinct"));
                }
            }
        }
        for &(r, _) in &self.clocks {
            if driver[r.0].is_some() {
                return Err(forbidden(r, "clock rail driven by an element"));
            }
        }
        let mut seen: HashMap<RailId, &str> = HashMap::new();
        for p in &self.inputs {
            for r in p.rails {
                if driver[r.0].is_some() {
                    return Err(forbidden(r, "input port rail driven by an element"));
                }
            }
        }
        for p in self.inputs.iter().chain(&self.outputs) {
            if p.rails[0] == p.rails[1] {
                return Err(forbidden(p.rails[0], "port rails must be distinct"));
            }
            for r in p.rails {
                if let Some(other) = seen.insert(r, &p.name) {
                    return Err(forbidden(
                        r,
                        &format!("shared by ports `{other}` and `{}`", p.name),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_driver_is_forbidden() {
        let mut n = Netlist::new("t");
        let a = n.add_rail("a").unwrap();
        let b = n.add_rail("b").unwrap();
        let c = n.add_rail("c").unwrap();
        n.add_element("c1", ElementKind::Copy { src: a, dsts: vec![c] }, 0, None);
        n.add_element("c2", ElementKind::Copy { src: b, dsts: vec![c] }, 0, None);
        assert!(matches!(
            n.validate(),
            Err(NetlistError::ForbiddenWiring { .. })
        ));
    }

    #[test]
    fn duplicate_rail_is_rejected() {
        let mut n = Netlist::new("t");
        n.add_rail("a").unwrap();
        assert_eq!(n.add_rail("a"), Err(NetlistError::DuplicateName("a".into())));
    }

    #[test]
    fn rail_in_two_locks_is_forbidden() {
        let mut n = Netlist::new("t");
        let a = n.add_rail("a").unwrap();
        let b = n.add_rail("b").unwrap();
        let c = n.add_rail("c").unwrap();
        n.add_element("l1", ElementKind::Lock { halves: [a, b] }, 0, None);
        n.add_element("l2", ElementKind::Lock { halves: [a, c] }, 0, None);
        assert!(n.validate().is_err());
    }
}
