//! The Fredkin gate run forward, then recovered from its outputs.

use std::collections::BTreeMap;

use linklogic::gates::{build_gate, evaluate, evaluate_reverse, DualRailValue, GateKind};

fn main() {
    let net = build_gate(GateKind::Fredkin);
    for k in 0..8u8 {
        let inputs: BTreeMap<String, DualRailValue> = GateKind::Fredkin
            .input_names()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.to_string(), DualRailValue::from_bool((k >> (2 - i)) & 1 == 1)))
            .collect();
        let outputs = evaluate(&net, &inputs, true).expect("well-formed inputs");
        let back = evaluate_reverse(&net, &outputs).expect("fredkin is reversible");
        let show = |m: &BTreeMap<String, DualRailValue>| {
            m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
        };
        println!("{}  ->  {}  ->  {}", show(&inputs), show(&outputs), show(&back));
        assert_eq!(back, inputs);
    }
}
