//! A four-cell register carrying a stream, then run backward to where it
//! started.

use linklogic::gates::DualRailValue::{One, Zero};
use linklogic::sequential::{chain_reverse, chain_simulate, ClockProgram, ShiftChain};

fn main() {
    let clock = ClockProgram::default();
    let stream = [One, Zero, Zero, One, One];
    let run = chain_simulate(ShiftChain::new(4), &clock, &stream, stream.len() + 1).expect("valid clock");
    for step in run.trace.iter().take(12) {
        let cells: Vec<String> = step.cells.iter().map(|c| c.output_value().to_string()).collect();
        println!("{:>6.2}  {:<12} {}", step.time, step.action.to_string(), cells.join(" "));
    }
    let outputs: Vec<String> = run.outputs.iter().map(ToString::to_string).collect();
    println!("outputs: {}", outputs.join(","));

    let mut machine = run.machine.clone();
    let events = chain_reverse(&mut machine, stream.len() + 1).expect("reversible");
    println!("ran {} events backward; back at the start: {}", events.len(), machine.cursor == 0);
    println!("input stream restored: {:?}", machine.pending.iter().map(ToString::to_string).collect::<Vec<_>>());
}
