//! Spring-flexibility model of the lock.
//!
//! One rigid link of the lock is replaced by a spring between the two coupler
//! projection tips. With every length equal to `L`, the energy vanishes along
//! both single-input branches and grows off-axis; near an activated input the
//! energy landscape is far steeper along the held input than along the
//! activated one, which is what lets a small holding force resist a large one.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use super::geometry::Vec2;
use super::KinematicsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockGeometry {
    /// Side link length `L`; also the connecting link length when rigid.
    pub side_length: f64,
    /// Spring stiffness, energy per length squared.
    pub stiffness: f64,
    /// Spring rest length.
    pub rest_length: f64,
    /// Input angle representing a logical one.
    pub theta_on: f64,
    /// Upper input angle (radians from vertical, positive leans right).
    pub theta0: f64,
    /// Lower input angle.
    pub theta1: f64,
}

impl Default for LockGeometry {
    fn default() -> Self {
        Self {
            side_length: 1.0,
            stiffness: 1.0,
            rest_length: 1.0,
            theta_on: FRAC_PI_4,
            theta0: 0.0,
            theta1: 0.0,
        }
    }
}

impl LockGeometry {
    pub fn with_angles(self, theta0: f64, theta1: f64) -> Self {
        Self {
            theta0,
            theta1,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        let bad = |what: &str| Err(KinematicsError::InvalidGeometry(what.to_string()));
        if !(self.side_length > 0.0) {
            return bad("side length must be positive");
        }
        if !(self.stiffness > 0.0) {
            return bad("stiffness must be positive");
        }
        if !(self.rest_length > 0.0) {
            return bad("rest length must be positive");
        }
        if !(self.theta0.abs() <= FRAC_PI_2 && self.theta1.abs() <= FRAC_PI_2) {
            return bad("input angles must lie within [-pi/2, pi/2]");
        }
        if !(self.theta_on.abs() <= FRAC_PI_2) {
            return bad("activation angle must lie within [-pi/2, pi/2]");
        }
        Ok(())
    }
}

/// Vector from the lower spring endpoint to the upper one.
pub fn lock_connecting_vector(theta0: f64, theta1: f64, side_length: f64) -> Vec2 {
    let (s0, c0) = theta0.sin_cos();
    let (s1, c1) = theta1.sin_cos();
    Vec2::new(s0 - s1, c0 + c1 - 1.0) * side_length
}

pub fn spring_energy(geom: &LockGeometry) -> f64 {
    let d = lock_connecting_vector(geom.theta0, geom.theta1, geom.side_length).norm();
    0.5 * geom.stiffness * (d - geom.rest_length).powi(2)
}

/// Analytic `(dV/dtheta0, dV/dtheta1)`. Where the endpoints coincide the
/// distance is not differentiable and zero is returned.
pub fn spring_gradient(geom: &LockGeometry) -> (f64, f64) {
    let l = geom.side_length;
    let delta = lock_connecting_vector(geom.theta0, geom.theta1, l);
    let d = delta.norm();
    if d < 1e-300 {
        return (0.0, 0.0);
    }
    let (s0, c0) = geom.theta0.sin_cos();
    let (s1, c1) = geom.theta1.sin_cos();
    let dd0 = delta.dot(Vec2::new(c0, -s0) * l) / d;
    let dd1 = delta.dot(Vec2::new(-c1, -s1) * l) / d;
    let scale = geom.stiffness * (d - geom.rest_length);
    (scale * dd0, scale * dd1)
}

/// Ratio of the restoring gradient along the held input to the deflecting
/// gradient along the activated input, evaluated at `(theta_active, epsilon)`.
pub fn holding_advantage(
    geom: &LockGeometry,
    theta_active: f64,
    epsilon: f64,
) -> Result<f64, KinematicsError> {
    if !(epsilon > 0.0 && epsilon <= 0.05) {
        return Err(KinematicsError::InvalidArgument(format!(
            "held-input deflection {epsilon} outside (0, 0.05]"
        )));
    }
    let (g0, g1) = spring_gradient(&geom.with_angles(theta_active, epsilon));
    if g0.abs() < 1e-15 && g1.abs() < 1e-15 {
        return Err(KinematicsError::DegenerateAdvantage);
    }
    if theta_active < 0.1 {
        return Err(KinematicsError::InvalidArgument(format!(
            "activated input {theta_active} has not moved far enough (< 0.1 rad)"
        )));
    }
    Ok(g1.abs() / g0.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(t0: f64, t1: f64) -> LockGeometry {
        LockGeometry::default().with_angles(t0, t1)
    }

    fn fd_gradient(g: &LockGeometry, h: f64) -> (f64, f64) {
        let e = |a: f64, b: f64| spring_energy(&g.with_angles(a, b));
        (
            (e(g.theta0 + h, g.theta1) - e(g.theta0 - h, g.theta1)) / (2.0 * h),
            (e(g.theta0, g.theta1 + h) - e(g.theta0, g.theta1 - h)) / (2.0 * h),
        )
    }

    #[test]
    fn connecting_vector_examples() {
        let v = lock_connecting_vector(0.0, 0.0, 1.0);
        assert_eq!(v, Vec2::new(0.0, 1.0));
        let v = lock_connecting_vector(FRAC_PI_4, 0.0, 1.0);
        assert!((v.x - 0.70711).abs() < 1e-5 && (v.y - 0.70711).abs() < 1e-5);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        let v = lock_connecting_vector(FRAC_PI_4, FRAC_PI_4, 1.0);
        assert!(v.x.abs() < 1e-15 && (v.y - 0.41421).abs() < 1e-5);
    }

    #[test]
    fn energy_examples() {
        assert!(spring_energy(&geom(0.5, 0.0)).abs() < 1e-30);
        assert!(spring_energy(&geom(0.0, -0.3)).abs() < 1e-30);
        // (1/2)(1 - (sqrt(2) - 1))^2
        let expected = 0.5 * (2.0 - 2f64.sqrt()).powi(2);
        let v = spring_energy(&geom(FRAC_PI_4, FRAC_PI_4));
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.17157).abs() < 1e-5);
    }

    #[test]
    fn gradient_vanishes_on_branches() {
        assert_eq!(spring_gradient(&geom(0.0, 0.0)), (0.0, 0.0));
        let (a, b) = spring_gradient(&geom(FRAC_PI_4, 0.0));
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15);
    }

    #[test]
    fn gradient_ratio_near_activated_input() {
        let g = geom(FRAC_PI_4, 0.01);
        let (f0, f1) = fd_gradient(&g, 1e-6);
        let fd_ratio = f1.abs() / f0.abs();
        let ratio = holding_advantage(&LockGeometry::default(), FRAC_PI_4, 0.01).unwrap();
        assert!((ratio - fd_ratio).abs() / fd_ratio < 1e-4);
        assert!((80.0..=120.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn holding_advantage_errors() {
        let g = LockGeometry::default();
        assert!(matches!(
            holding_advantage(&g, 0.0, 0.01),
            Err(KinematicsError::DegenerateAdvantage)
        ));
        assert!(matches!(
            holding_advantage(&g, FRAC_PI_4, 0.1),
            Err(KinematicsError::InvalidArgument(_))
        ));
        assert!(matches!(
            holding_advantage(&g, FRAC_PI_4, 0.0),
            Err(KinematicsError::InvalidArgument(_))
        ));
    }

    #[test]
    fn advantage_grows_as_deflection_shrinks() {
        let g = LockGeometry::default();
        let mut last = 0.0;
        for eps in [0.05, 0.02, 0.01, 0.005, 0.001] {
            let r = holding_advantage(&g, FRAC_PI_4, eps).unwrap();
            assert!(r > last);
            last = r;
        }
    }

    #[test]
    fn geometry_validation() {
        assert!(LockGeometry::default().validate().is_ok());
        let bad = LockGeometry {
            stiffness: 0.0,
            ..LockGeometry::default()
        };
        assert!(bad.validate().is_err());
        assert!(geom(2.0, 0.0).validate().is_err());
    }
}
