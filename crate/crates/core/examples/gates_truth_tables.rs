//! Truth tables of every gate in the library, evaluated on its lock and
//! balance netlist.

use linklogic::gates::{build_gate, truth_table, GateKind};

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn main() {
    for kind in GateKind::ALL {
        let net = build_gate(kind);
        let table = truth_table(&net).expect("library gates evaluate");
        println!(
            "{kind} ({} elements): {} -> {}",
            net.elements().len(),
            table.inputs.join(" "),
            table.outputs.join(" ")
        );
        for (i, o) in &table.rows {
            println!("  {}  {}", bits(i), bits(o));
        }
    }
}
