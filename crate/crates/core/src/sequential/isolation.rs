use std::collections::{BTreeMap, BTreeSet};

use crate::gates::{ElementKind, Netlist, SimState};

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Number of cells along the longest signal line that one push can travel in
/// the given state.
///
/// Rails are joined where an element moves them together: a copy or merge
/// with its source and destination, a balance beam with its input and both
/// sides. Locks never join their halves, clock rails are left out, and a rail
/// whose lock partner is raised cannot move at all. Each rail belongs to the
/// cell of the element that drives it; input-port rails belong to no cell.
///
/// Within one group of joined rails, cell `a` leads to cell `b` when an
/// element of `b` follows a rail of `a` and both rails are in the group. The
/// result is the longest chain of such steps, counted in cells. A cell that
/// feeds two others at once therefore counts two, not three.
pub fn force_isolation(net: &Netlist, state: &SimState) -> usize {
    let n = net.rails().len();
    let partners = net.lock_partners();
    let mut movable = vec![true; n];
    for &(r, _) in net.clocks() {
        movable[r.0] = false;
    }
    for (r, p) in partners.iter().enumerate() {
        if p.is_some_and(|p| state.rails[p.0]) {
            movable[r] = false;
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let mut join = |a: usize, b: usize| {
        if movable[a] && movable[b] {
            union(&mut parent, a, b);
        }
    };
    for e in net.elements() {
        match &e.kind {
            ElementKind::Lock { .. } => {}
            ElementKind::Copy { src, dsts } => {
                for d in dsts {
                    join(src.0, d.0);
                }
            }
            ElementKind::Merge { srcs, dst } => {
                for s in srcs {
                    join(s.0, dst.0);
                }
            }
            ElementKind::Balance { input, sides } => {
                join(input.0, sides[0].0);
                join(input.0, sides[1].0);
                join(sides[0].0, sides[1].0);
            }
        }
    }
    let elements = net.elements();
    let drivers = net.drivers();
    let cell_of = |r: usize| drivers[r].and_then(|d| elements[d].cell);
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for r in 0..n {
        if let (true, Some(c)) = (movable[r], cell_of(r)) {
            groups.entry(find(&mut parent, r)).or_default().insert(c);
        }
    }
    let mut edges: BTreeMap<usize, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for e in elements {
        let Some(to) = e.cell else { continue };
        for s in e.sources() {
            let Some(from) = cell_of(s.0).filter(|&c| c != to && movable[s.0]) else {
                continue;
            };
            let root = find(&mut parent, s.0);
            if e.driven().iter().any(|d| movable[d.0] && find(&mut parent, d.0) == root) {
                edges.entry(root).or_default().insert((from, to));
            }
        }
    }
    groups
        .iter()
        .map(|(root, cells)| {
            let group_edges = edges.get(root).cloned().unwrap_or_default();
            cells
                .iter()
                .map(|&c| longest_path(c, &group_edges, &mut BTreeSet::new()))
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Cells on the longest simple path starting at `from`.
fn longest_path(from: usize, edges: &BTreeSet<(usize, usize)>, seen: &mut BTreeSet<usize>) -> usize {
    seen.insert(from);
    let mut best = 0;
    for &(a, b) in edges {
        if a == from && !seen.contains(&b) {
            best = best.max(longest_path(b, edges, seen));
        }
    }
    seen.remove(&from);
    best + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::Simulator;
    use crate::sequential::shift_register_netlist;

    #[test]
    fn single_cell_reaches_one_cell() {
        let net = shift_register_netlist(1).unwrap();
        let sim = Simulator::new(net.clone()).unwrap();
        assert_eq!(force_isolation(&net, sim.state()), 1);
    }

    #[test]
    fn neighbouring_cells_are_joined_pairwise() {
        let net = shift_register_netlist(4).unwrap();
        let sim = Simulator::new(net.clone()).unwrap();
        assert_eq!(force_isolation(&net, sim.state()), 2);
    }

    fn copies(links: &[(&str, &[&str])]) -> Netlist {
        let mut net = Netlist::new("copies");
        for (src, dsts) in links {
            for r in std::iter::once(src).chain(dsts.iter()) {
                if net.rail(r).is_err() {
                    net.add_rail(*r).unwrap();
                }
            }
        }
        for (k, (src, dsts)) in links.iter().enumerate() {
            let cell = net.add_cell(format!("c{k}")).unwrap();
            let kind = ElementKind::Copy {
                src: net.rail(src).unwrap(),
                dsts: dsts.iter().map(|d| net.rail(d).unwrap()).collect(),
            };
            net.add_element(format!("e{k}"), kind, 0, Some(cell));
        }
        net
    }

    #[test]
    fn fan_out_counts_one_step() {
        let net = copies(&[("in", &["x"]), ("x", &["y"]), ("x", &["z"])]);
        let sim = Simulator::new(net.clone()).unwrap();
        assert_eq!(force_isolation(&net, sim.state()), 2);
    }

    #[test]
    fn rigid_line_counts_every_cell() {
        let net = copies(&[("in", &["x"]), ("x", &["y"]), ("y", &["z"])]);
        let sim = Simulator::new(net.clone()).unwrap();
        assert_eq!(force_isolation(&net, sim.state()), 3);
    }
}
