//! Degrees of freedom of a few mechanisms, and the behavioural/kinematic
//! agreement check on the lock.

use linklogic::kinematics::{five_link, mobility, parallelogram, LockGeometry, LockMechanism, SolverOptions};
use linklogic::primitives::crosscheck_lock;

fn main() {
    let opts = SolverOptions::default();
    let four_bar = parallelogram(1.0, 1.0, 0.3);
    println!("parallelogram:         {}", mobility(&four_bar.mechanism, &four_bar.config, &opts));
    let matched = five_link(1.0, 1.0, 0.5, 0.3);
    println!("five-link, matched:    {}", mobility(&matched.mechanism, &matched.config, &opts));
    let skewed = five_link(1.0, 1.0, 0.3, 0.0);
    println!("five-link, skewed:     {}", mobility(&skewed.mechanism, &skewed.config, &opts));
    let lock = LockMechanism::new(&LockGeometry::default(), true);
    println!("lock at rest:          {}", mobility(lock.mechanism(), &lock.assembled.config, &opts));

    let report = crosscheck_lock(&LockGeometry::default()).expect("canonical geometry");
    for item in &report.items {
        println!("{:<8} {:<40} {}", format!("{:?}", item.state), item.check, if item.passed { "ok" } else { "FAIL" });
    }
}
