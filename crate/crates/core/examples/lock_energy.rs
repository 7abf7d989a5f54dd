//! Spring energy of the kinematic lock over a grid of input angles, and how
//! strongly a raised input holds the other one down.

use std::f64::consts::FRAC_PI_4;

use linklogic::kinematics::{holding_advantage, spring_energy, spring_gradient, LockGeometry};

fn main() {
    let g = LockGeometry::default();
    let angles: Vec<f64> = (-4..=4).map(|i| i as f64 * 0.2).collect();
    print!("theta0\\theta1");
    for t1 in &angles {
        print!("{t1:>8.1}");
    }
    println!();
    for &t0 in &angles {
        print!("{t0:>13.1}");
        for &t1 in &angles {
            print!("{:>8.4}", spring_energy(&g.with_angles(t0, t1)));
        }
        println!();
    }

    let (g0, g1) = spring_gradient(&g.with_angles(FRAC_PI_4, 0.01));
    println!("\ngradient at (pi/4, 0.01): ({g0:.5}, {g1:.5})");
    for eps in [0.05, 0.01, 0.001] {
        let a = holding_advantage(&g, FRAC_PI_4, eps).expect("valid deflection");
        println!("holding advantage at deflection {eps}: {a:.1}");
    }
}
