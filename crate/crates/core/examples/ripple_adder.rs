//! The pipelined 8-bit ripple-carry adder: a stream of additions, one per
//! cycle, each result arriving two cycles after its operands.

use linklogic::sequential::{build_ripple_adder, force_isolation, ClockProgram, ClockedRunner};

fn main() {
    let adder = build_ripple_adder(8).expect("8 bits");
    let clock = ClockProgram::default();
    println!(
        "{} elements, {} delay cells, latency {} cycles",
        adder.netlist.elements().len(),
        adder.delay_cells,
        adder.latency_cycles()
    );

    let additions = [(0x0f, 0x01, false), (0xff, 0xff, false), (200, 55, true), (0, 0, false)];
    let mut runner = ClockedRunner::new(adder.netlist.clone(), &clock).expect("valid clock");
    let mut worst = 0;
    for c in 0..additions.len() + 1 {
        let inputs = additions
            .get(c)
            .map(|&(a, b, cin)| adder.operand_inputs(a, b, cin))
            .unwrap_or_default();
        let out = runner
            .run_cycle_with(&inputs, &mut |_, _, sim| {
                worst = worst.max(force_isolation(sim.netlist(), sim.state()));
                Ok(())
            })
            .expect("schedule holds");
        let fed = additions.get(c).map_or("-".to_string(), |(a, b, cin)| format!("{a} + {b} + {}", *cin as u8));
        let got = adder.decode(&out).map_or("-".to_string(), |(s, carry)| format!("{s} carry {}", carry as u8));
        println!("cycle {c}: in {fed:<16} out {got}");
    }
    println!("longest force path: {worst} cells");
}
