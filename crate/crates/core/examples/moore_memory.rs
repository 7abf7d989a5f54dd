//! The one-bit memory: write with WE=1, hold with WE=0.

use linklogic::sequential::{ClockProgram, MooreMachine};

fn main() {
    let mut m = MooreMachine::new(false, &ClockProgram::default()).expect("valid clock");
    let script = [(true, true), (false, false), (false, false), (false, true), (true, false), (true, true)];
    for (d, we) in script {
        let out = m.step(d, we).expect("schedule holds");
        println!("d={} we={}  out={}  state={:?}", d as u8, we as u8, out as u8, m.state());
    }
}
