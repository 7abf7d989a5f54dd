//! Planar rigid-link constraint engine.
//!
//! Mechanisms are made of [`RigidLink`]s connected by revolute [`Joint`]s,
//! some of them pinned to ground. [`assemble`] projects a guess onto the
//! constraint manifold, [`drive`] moves the input links quasi-statically and
//! reports binding, and [`mobility`] counts instantaneous degrees of freedom
//! from the numeric rank of the constraint Jacobian.

mod geometry;
pub mod lock;
pub mod mechanisms;
mod solver;

use thiserror::Error;

pub use geometry::{Configuration, Joint, JointEnd, LinkId, Mechanism, Pose, RigidLink, Vec2};
pub use lock::{
    holding_advantage, lock_connecting_vector, spring_energy, spring_gradient, LockGeometry,
};
pub use mechanisms::{five_link, parallelogram, Assembled, LockMechanism};
pub use solver::{assemble, constraint_jacobian, drive, mobility, residual, SolverOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("invalid mechanism: {0}")]
    InvalidMechanism(String),
    #[error("invalid lock geometry: {0}")]
    InvalidGeometry(String),
    #[error("assembly did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("mechanism binds at drive sub-step {step} (residual {residual:e})")]
    BindingDetected { step: usize, residual: f64 },
    #[error("link `{0}` is not a driven coordinate")]
    NotDriven(String),
    #[error("holding advantage is undefined at the branch point")]
    DegenerateAdvantage,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn exact_guess_is_returned_unchanged() {
        let a = parallelogram(1.0, 1.0, 0.0);
        let c = assemble(&a.mechanism, &a.config, &opts()).unwrap();
        assert_eq!(c.poses, a.config.poses);
        assert_eq!(c.residual, 0.0);
    }

    #[test]
    fn perturbed_follower_is_pulled_back() {
        let a = parallelogram(1.0, 1.0, 0.0);
        let mut guess = a.config.clone();
        guess.poses[1].angle += 1e-3;
        let c = assemble(&a.mechanism, &guess, &opts()).unwrap();
        assert!(c.residual <= 1e-10);
        // Closed form: with the driven side at 0 the parallelogram is upright.
        for (p, q) in c.poses.iter().zip(&a.config.poses) {
            assert!((p.position - q.position).norm() < 1e-9);
            assert!((p.angle - q.angle).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_chain_does_not_converge() {
        // Left side fixed upright; right side 1.2 long; a rigid centre link of
        // length 1 pinned at x = 0.3 to the coupler midpoint.
        let mut m = Mechanism::new();
        let left = m.add_link(RigidLink::bar("left", 1.0));
        let right = m.add_link(RigidLink::bar("right", 1.2));
        let center = m.add_link(RigidLink::bar("center", 1.0));
        let coupler = m.add_link(RigidLink::new(
            "coupler",
            vec![Vec2::ZERO, Vec2::new(0.5, 0.0), Vec2::new(1.0, 0.0)],
        ));
        m.add_joint(Joint::anchored(left, 0, Vec2::ZERO));
        m.add_joint(Joint::anchored(right, 0, Vec2::new(1.0, 0.0)));
        m.add_joint(Joint::anchored(center, 0, Vec2::new(0.3, 0.0)));
        m.add_joint(Joint::between(left, 1, coupler, 0));
        m.add_joint(Joint::between(center, 1, coupler, 1));
        m.add_joint(Joint::between(right, 1, coupler, 2));
        m.drive(left);

        // Feasibility scan over the only remaining freedom, the coupler angle:
        // no angle satisfies both the right-side and centre-link lengths.
        let tip = Vec2::new(0.0, 1.0);
        let best = (0..200_000)
            .map(|i| {
                let phi = -std::f64::consts::PI + i as f64 * (2.0 * std::f64::consts::PI / 200_000.0);
                let mid = tip + Vec2::new(0.5, 0.0).rotate_cw(phi);
                let end = tip + Vec2::new(1.0, 0.0).rotate_cw(phi);
                let e1 = ((mid - Vec2::new(0.3, 0.0)).norm() - 1.0).abs();
                let e2 = ((end - Vec2::new(1.0, 0.0)).norm() - 1.2).abs();
                e1.max(e2)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(best > 1e-3, "scan found a near-solution: {best}");

        let guess = Configuration::new(vec![
            Pose::new(Vec2::ZERO, 0.0),
            Pose::new(Vec2::new(1.0, 0.0), 0.0),
            Pose::new(Vec2::new(0.3, 0.0), 0.2),
            Pose::new(tip, 0.0),
        ]);
        assert!(matches!(
            assemble(&m, &guess, &opts()),
            Err(KinematicsError::NoConvergence { .. })
        ));
    }

    #[test]
    fn parallelogram_coupler_translates() {
        let a = parallelogram(1.0, 1.0, 0.0);
        let c = drive(&a.mechanism, &a.config, &[(LinkId(0), FRAC_PI_4)], 20, &opts()).unwrap();
        let coupler = c.pose(LinkId(2));
        assert!(coupler.angle.abs() < 1e-9);
        let expected = Vec2::new(FRAC_PI_4.sin(), FRAC_PI_4.cos());
        assert!((coupler.position - expected).norm() < 1e-9);
        assert!((c.pose(LinkId(1)).angle - FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn matched_five_link_moves_skewed_binds() {
        let a = five_link(1.0, 1.0, 0.5, 0.0);
        assert!(drive(&a.mechanism, &a.config, &[(LinkId(0), FRAC_PI_4)], 20, &opts()).is_ok());
        let b = five_link(1.0, 1.0, 0.3, 0.0);
        assert!(b.config.residual < 1e-12);
        assert!(matches!(
            drive(&b.mechanism, &b.config, &[(LinkId(0), FRAC_PI_4)], 20, &opts()),
            Err(KinematicsError::BindingDetected { .. })
        ));
    }

    #[test]
    fn mobility_counts() {
        let a = parallelogram(1.0, 1.0, 0.0);
        assert_eq!(mobility(&a.mechanism, &a.config, &opts()), 1);
        let b = five_link(1.0, 1.0, 0.5, 0.3);
        assert_eq!(mobility(&b.mechanism, &b.config, &opts()), 1);
        let c = five_link(1.0, 1.0, 0.3, 0.0);
        assert_eq!(mobility(&c.mechanism, &c.config, &opts()), 0);
        let lock = LockMechanism::new(&LockGeometry::default(), true);
        assert_eq!(mobility(lock.mechanism(), &lock.assembled.config, &opts()), 2);
    }

    #[test]
    fn lock_binds_once_one_side_is_raised() {
        let lock = LockMechanism::new(&LockGeometry::default(), true);
        let m = lock.mechanism();
        let raised = drive(m, &lock.assembled.config, &lock.targets(FRAC_PI_4, 0.0), 20, &opts()).unwrap();
        let (t0, t1) = lock.input_angles(&raised);
        assert!((t0 - FRAC_PI_4).abs() < 1e-12 && t1.abs() < 1e-12);
        assert!(matches!(
            drive(m, &raised, &lock.targets(FRAC_PI_4, FRAC_PI_4), 20, &opts()),
            Err(KinematicsError::BindingDetected { .. })
        ));
        let lowered = drive(m, &raised, &lock.targets(0.0, 0.0), 20, &opts()).unwrap();
        assert!(drive(m, &lowered, &lock.targets(0.0, FRAC_PI_4), 20, &opts()).is_ok());
    }

    #[test]
    fn drive_rejects_undriven_link() {
        let a = parallelogram(1.0, 1.0, 0.0);
        assert!(matches!(
            drive(&a.mechanism, &a.config, &[(LinkId(1), 0.3)], 5, &opts()),
            Err(KinematicsError::NotDriven(_))
        ));
    }
}
