use std::fmt;
use std::str::FromStr;

use super::netlist::{ElementKind, Netlist, RailId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Nand,
    Nor,
    Xor,
    Or,
    And,
    Xnor,
    Not,
    Fredkin,
    FullAdder,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Or,
        GateKind::And,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Fredkin,
        GateKind::FullAdder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Nand => "nand",
            GateKind::Nor => "nor",
            GateKind::Xor => "xor",
            GateKind::Or => "or",
            GateKind::And => "and",
            GateKind::Xnor => "xnor",
            GateKind::Not => "not",
            GateKind::Fredkin => "fredkin",
            GateKind::FullAdder => "fulladder",
        }
    }

    pub fn input_names(self) -> &'static [&'static str] {
        match self {
            GateKind::Not => &["a"],
            GateKind::Fredkin => &["c", "a", "b"],
            GateKind::FullAdder => &["a", "b", "cin"],
            _ => &["a", "b"],
        }
    }

    pub fn output_names(self) -> &'static [&'static str] {
        match self {
            GateKind::Fredkin => &["co", "ao", "bo"],
            GateKind::FullAdder => &["s", "cout"],
            _ => &["x"],
        }
    }

    /// Boolean reference function, inputs in `input_names` order.
    pub fn function(self, inputs: &[bool]) -> Vec<bool> {
        let i = inputs;
        match self {
            GateKind::Nand => vec![!(i[0] && i[1])],
            GateKind::Nor => vec![!(i[0] || i[1])],
            GateKind::Xor => vec![i[0] ^ i[1]],
            GateKind::Or => vec![i[0] || i[1]],
            GateKind::And => vec![i[0] && i[1]],
            GateKind::Xnor => vec![!(i[0] ^ i[1])],
            GateKind::Not => vec![!i[0]],
            GateKind::Fredkin => {
                if i[0] {
                    vec![true, i[2], i[1]]
                } else {
                    vec![false, i[1], i[2]]
                }
            }
            GateKind::FullAdder => {
                let n = i.iter().filter(|&&b| b).count();
                vec![n % 2 == 1, n >= 2]
            }
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == lower || (lower == "full_adder" && *k == GateKind::FullAdder))
            .ok_or_else(|| format!("unknown gate kind `{s}`"))
    }
}

/// Builds the lock/balance netlist for a gate. OR, AND and XNOR are NOR,
/// NAND and XOR with their output rails exchanged; NOT is a buffer with its
/// output rails exchanged.
pub fn build_gate(kind: GateKind) -> Netlist {
    let ins = kind.input_names();
    let outs = kind.output_names();
    let (base, swap): (GateKind, bool) = match kind {
        GateKind::Or => (GateKind::Nor, true),
        GateKind::And => (GateKind::Nand, true),
        GateKind::Xnor => (GateKind::Xor, true),
        GateKind::Not => (GateKind::Not, true),
        k => (k, false),
    };
    let mut net = if base == GateKind::Not {
        decision_tree(kind.name(), ins, outs, &|i| vec![i[0]])
    } else {
        decision_tree(kind.name(), ins, outs, &|i| base.function(i))
    };
    if swap {
        net.swap_output("x").expect("gate output exists");
    }
    net
}

/// A clocked decision tree of balances computing `f`.
///
/// The root balance rises with clock phase 0. A balance at depth `d` tests
/// input `d`: its side `v` is locked against rail `(1 - v)` of that input, so
/// only side `v` can move when the input is `v`. Each leaf is merged onto the
/// output rails selected by `f`, and each output pair is held in a lock.
pub fn decision_tree(
    name: &str,
    inputs: &[&str],
    outputs: &[&str],
    f: &dyn Fn(&[bool]) -> Vec<bool>,
) -> Netlist {
    let mut net = Netlist::new(name);
    let add = |net: &mut Netlist, n: String| net.add_rail(n).expect("fresh rail name");
    let clk = net.clock_rail(0).expect("fresh clock");

    let in_rails: Vec<[RailId; 2]> = inputs
        .iter()
        .map(|p| {
            let r = net.add_dual_rail(p).expect("fresh port");
            net.add_input(*p, r).expect("fresh port");
            r
        })
        .collect();
    let out_rails: Vec<[RailId; 2]> = outputs
        .iter()
        .map(|p| {
            let r = net.add_dual_rail(p).expect("fresh port");
            net.add_output(*p, r).expect("fresh port");
            r
        })
        .collect();

    // copies[d][v][k]: copy of rail v of input d used by the k-th node at depth d
    let mut copies: Vec<[Vec<RailId>; 2]> = Vec::new();
    for (d, p) in inputs.iter().enumerate() {
        let width = 1usize << d;
        let mut pair: [Vec<RailId>; 2] = [Vec::new(), Vec::new()];
        for v in 0..2 {
            for k in 0..width {
                pair[v].push(add(&mut net, format!("{p}.{v}#{k}")));
            }
            net.add_element(
                format!("fan_{p}.{v}"),
                ElementKind::Copy {
                    src: in_rails[d][v],
                    dsts: pair[v].clone(),
                },
                0,
                None,
            );
        }
        copies.push(pair);
    }

    // Breadth-first: node k at depth d is the path with bits of k, msb first.
    let mut level = vec![clk];
    for (d, p) in inputs.iter().enumerate() {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (k, &input) in level.iter().enumerate() {
            let path = path_name(k, d);
            let s0 = add(&mut net, format!("t{path}.s0"));
            let s1 = add(&mut net, format!("t{path}.s1"));
            net.add_element(
                format!("bal{path}"),
                ElementKind::Balance { input, sides: [s0, s1] },
                0,
                None,
            );
            net.add_element(
                format!("lock{path}_{p}0"),
                ElementKind::Lock { halves: [copies[d][0][k], s1] },
                0,
                None,
            );
            net.add_element(
                format!("lock{path}_{p}1"),
                ElementKind::Lock { halves: [copies[d][1][k], s0] },
                0,
                None,
            );
            next.push(s0);
            next.push(s1);
        }
        level = next;
    }

    let n = inputs.len();
    let mut sources: Vec<[Vec<RailId>; 2]> = vec![[Vec::new(), Vec::new()]; outputs.len()];
    for (k, &leaf) in level.iter().enumerate() {
        let bits: Vec<bool> = (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect();
        let values = f(&bits);
        assert_eq!(values.len(), outputs.len(), "function arity");
        let taps: Vec<RailId> = if outputs.len() == 1 {
            vec![leaf]
        } else {
            let path = path_name(k, n);
            let taps: Vec<RailId> = outputs
                .iter()
                .map(|o| add(&mut net, format!("t{path}>{o}")))
                .collect();
            net.add_element(
                format!("fan_t{path}"),
                ElementKind::Copy { src: leaf, dsts: taps.clone() },
                0,
                None,
            );
            taps
        };
        for (o, (&tap, &v)) in taps.iter().zip(&values).enumerate() {
            sources[o][v as usize].push(tap);
        }
    }
    for (o, name) in outputs.iter().enumerate() {
        for v in 0..2 {
            let srcs = std::mem::take(&mut sources[o][v]);
            if !srcs.is_empty() {
                net.add_element(
                    format!("join_{name}.{v}"),
                    ElementKind::Merge { srcs, dst: out_rails[o][v] },
                    0,
                    None,
                );
            }
        }
        net.add_element(
            format!("hold_{name}"),
            ElementKind::Lock { halves: out_rails[o] },
            0,
            None,
        );
    }
    net
}

fn path_name(k: usize, depth: usize) -> String {
    (0..depth)
        .map(|i| if (k >> (depth - 1 - i)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_counts() {
        let nand = build_gate(GateKind::Nand);
        let count = |pred: fn(&ElementKind) -> bool| nand.elements().iter().filter(|e| pred(&e.kind)).count();
        assert_eq!(count(|k| matches!(k, ElementKind::Balance { .. })), 3);
        // two per balance plus the output hold
        assert_eq!(count(|k| matches!(k, ElementKind::Lock { .. })), 7);
        assert!(nand.validate().is_ok());
    }

    #[test]
    fn kinds_parse() {
        for k in GateKind::ALL {
            assert_eq!(k.name().parse::<GateKind>().unwrap(), k);
        }
        assert_eq!("FULL_ADDER".parse::<GateKind>().unwrap(), GateKind::FullAdder);
        assert!("mux".parse::<GateKind>().is_err());
    }

    #[test]
    fn derived_gates_swap_rails() {
        let nand = build_gate(GateKind::Nand);
        let and = build_gate(GateKind::And);
        let x = nand.output("x").unwrap().rails;
        let y = and.output("x").unwrap().rails;
        assert_eq!([x[1], x[0]], y);
    }
}
