//! Parses a `.lnl` document, prints it back in canonical form and runs its
//! truth table. Pass a path, or nothing for the built-in NAND.

use linklogic::cli::{build_netlist, parse, serialize};
use linklogic::gates::truth_table;

const NAND: &str = include_str!("netlists/nand.lnl");

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable file"),
        None => NAND.to_string(),
    };
    let doc = match parse(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    print!("{}", serialize(&doc));
    let net = build_netlist(&doc).expect("valid netlist");
    if doc.is_sequential() {
        println!("# sequential: {} cells", net.cells().len());
        return;
    }
    let table = truth_table(&net).expect("evaluates");
    println!("# {} -> {}", table.inputs.join(" "), table.outputs.join(" "));
    for (i, o) in &table.rows {
        let b = |v: &[bool]| v.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>();
        println!("# {} {}", b(i), b(o));
    }
}
