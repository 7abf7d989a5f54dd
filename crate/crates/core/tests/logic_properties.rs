use std::collections::BTreeMap;

use proptest::prelude::*;

use linklogic::cli::{build_netlist, parse};
use linklogic::gates::{build_gate, truth_table, DualRailValue, GateKind, Simulator};

#[derive(Debug, Clone)]
enum Op {
    Set(usize, DualRailValue),
    Raise,
    Lower,
}

fn value() -> impl Strategy<Value = DualRailValue> {
    prop_oneof![
        Just(DualRailValue::Blank),
        Just(DualRailValue::Zero),
        Just(DualRailValue::One)
    ]
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0usize..3, value()).prop_map(|(p, v)| Op::Set(p, v)),
        Just(Op::Raise),
        Just(Op::Lower),
    ]
}

fn kind() -> impl Strategy<Value = GateKind> {
    proptest::sample::select(GateKind::ALL.to_vec())
}

/// Every `X.0`/`X.1` rail pair and every lock: never both raised.
fn forbidden_pairs(sim: &Simulator) -> Vec<String> {
    let net = sim.netlist();
    let mut bad = Vec::new();
    for (r, name) in net.rails().iter().enumerate() {
        let Some(stem) = name.strip_suffix(".0") else { continue };
        if let Ok(other) = net.rail(&format!("{stem}.1")) {
            if sim.rail(linklogic::gates::RailId(r)) && sim.rail(other) {
                bad.push(stem.to_string());
            }
        }
    }
    for (r, partner) in net.lock_partners().iter().enumerate() {
        if let Some(p) = partner {
            if sim.rail(linklogic::gates::RailId(r)) && sim.rail(*p) {
                bad.push(net.rail_name(*p).to_string());
            }
        }
    }
    bad
}

proptest! {
    #[test]
    fn no_forbidden_pair_is_ever_reached(kind in kind(), ops in proptest::collection::vec(op(), 1..30)) {
        let net = build_gate(kind);
        let ports: Vec<String> = net.inputs().iter().map(|p| p.name.clone()).collect();
        let mut sim = Simulator::new(net).unwrap();
        for op in ops {
            // rejected events are fine; the state after an accepted one must be safe
            let _ = match op {
                Op::Set(p, v) => sim.set_input(&ports[p % ports.len()], v).map_err(|e| e.to_string()),
                Op::Raise => sim.set_clock(0, true).map_err(|e| e.to_string()),
                Op::Lower => sim.set_clock(0, false).map_err(|e| e.to_string()),
            };
            let bad = forbidden_pairs(&sim);
            prop_assert!(bad.is_empty(), "forbidden pairs {:?}", bad);
        }
    }

    #[test]
    fn lowering_and_clearing_returns_every_rail_to_rest(kind in kind(), seed in any::<u16>()) {
        let net = build_gate(kind);
        let ports: Vec<String> = net.inputs().iter().map(|p| p.name.clone()).collect();
        let mut sim = Simulator::new(net).unwrap();
        for (i, p) in ports.iter().enumerate() {
            sim.set_input(p, DualRailValue::from_bool((seed >> i) & 1 == 1)).unwrap();
        }
        sim.set_clock(0, true).unwrap();
        sim.set_clock(0, false).unwrap();
        for p in &ports {
            sim.set_input(p, DualRailValue::Blank).unwrap();
        }
        prop_assert!(sim.state().rails.iter().all(|&r| !r));
    }

    #[test]
    fn gates_compute_their_boolean_function(kind in kind(), seed in any::<u16>()) {
        let net = build_gate(kind);
        let names = kind.input_names();
        let bits: Vec<bool> = (0..names.len()).map(|i| (seed >> i) & 1 == 1).collect();
        let inputs: BTreeMap<String, DualRailValue> = names
            .iter()
            .zip(&bits)
            .map(|(n, &b)| (n.to_string(), DualRailValue::from_bool(b)))
            .collect();
        let out = linklogic::gates::evaluate(&net, &inputs, true).unwrap();
        let got: Vec<bool> = kind.output_names().iter().map(|o| out[*o].to_bool().unwrap()).collect();
        prop_assert_eq!(got, kind.function(&bits));
        let idle = linklogic::gates::evaluate(&net, &inputs, false).unwrap();
        prop_assert!(idle.values().all(|v| v.is_blank()));
    }
}

#[test]
fn fredkin_conserves_ones_and_permutes_rows() {
    let table = truth_table(&build_gate(GateKind::Fredkin)).unwrap();
    let ones = |bits: &[bool]| bits.iter().filter(|&&b| b).count();
    let mut outputs: Vec<&Vec<bool>> = Vec::new();
    for (i, o) in &table.rows {
        assert_eq!(ones(i), ones(o), "row {i:?}");
        outputs.push(o);
    }
    outputs.sort();
    outputs.dedup();
    assert_eq!(outputs.len(), 8);
}

#[test]
fn xor_built_from_nands_matches_native_xor() {
    let text = include_str!("../examples/netlists/xor_from_nands.lnl");
    let composed = truth_table(&build_netlist(&parse(text).unwrap()).unwrap()).unwrap();
    let native = truth_table(&build_gate(GateKind::Xor)).unwrap();
    assert_eq!(composed.rows, native.rows);
}
