//! Dissipation, inertial loads and density for the default parameters.

use linklogic::energy::{inertial_analysis, landauer_context, mems_density, DragModel, InertialModel};

fn main() {
    let drag = DragModel::default();
    for f in [1e6, 1e8, 1e9] {
        println!(
            "{f:>8.0e} Hz: {:.3e} J per joint, {:.3e} J per operation",
            drag.energy_per_joint(f).expect("positive"),
            drag.energy_per_op(f).expect("positive")
        );
    }
    println!("energy x time: {:.3e} J s", drag.energy_time_product().expect("positive"));

    let r = inertial_analysis(&InertialModel::default()).expect("positive");
    println!(
        "v_max {:.3} m/s, a_max {:.3e} m/s^2, F_max {:.3e} N, deflection {:.3e} m",
        r.v_max, r.a_max, r.f_max, r.deflection
    );
    let (kt, bit) = landauer_context(300.0).expect("positive");
    println!("kT at 300 K: {kt:.3e} J, kT ln 2: {bit:.3e} J");
    println!(
        "MEMS transistor equivalents on a 2.8 cm die: {}",
        mems_density(2.8e-2, 640e-6, 1070e-6, 2).expect("positive")
    );
}
