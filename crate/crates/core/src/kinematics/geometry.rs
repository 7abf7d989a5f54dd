//! Planar rigid-link mechanism description.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::KinematicsError;

/// A point or displacement in the plane, in model length units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotates clockwise by `angle` radians, so that `(0, 1)` rotated by a
    /// positive angle leans to the right.
    pub fn rotate_cw(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(self.x * c + self.y * s, -self.x * s + self.y * c)
    }

    /// Derivative of [`Vec2::rotate_cw`] with respect to the angle.
    pub(crate) fn rotate_cw_deriv(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(-self.x * s + self.y * c, -self.x * c - self.y * s)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId(pub usize);

/// A stiff link carrying one or more joint attachment points in its own frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidLink {
    pub name: String,
    pub points: Vec<Vec2>,
}

impl RigidLink {
    pub fn new(name: impl Into<String>, points: Vec<Vec2>) -> Self {
        Self {
            name: name.into(),
            points,
        }
    }

    /// A two-point bar from the local origin to `(0, length)`.
    pub fn bar(name: impl Into<String>, length: f64) -> Self {
        Self::new(name, vec![Vec2::ZERO, Vec2::new(0.0, length)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JointEnd {
    Link { link: LinkId, point: usize },
    /// Pinned to the ground frame.
    Ground(Vec2),
}

/// A revolute joint: the attachment point `a` coincides with `b` in the world frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Joint {
    pub link: LinkId,
    pub point: usize,
    pub other: JointEnd,
}

impl Joint {
    pub fn anchored(link: LinkId, point: usize, at: Vec2) -> Self {
        Self {
            link,
            point,
            other: JointEnd::Ground(at),
        }
    }

    pub fn between(link: LinkId, point: usize, other: LinkId, other_point: usize) -> Self {
        Self {
            link,
            point,
            other: JointEnd::Link {
                link: other,
                point: other_point,
            },
        }
    }

    pub fn is_anchored(&self) -> bool {
        matches!(self.other, JointEnd::Ground(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    pub links: Vec<RigidLink>,
    pub joints: Vec<Joint>,
    /// Links whose orientation is an input coordinate.
    pub driven: Vec<LinkId>,
}

impl Mechanism {
    pub fn new() -> Self {
        Self {
            links: Vec::new(),
            joints: Vec::new(),
            driven: Vec::new(),
        }
    }

    pub fn add_link(&mut self, link: RigidLink) -> LinkId {
        self.links.push(link);
        LinkId(self.links.len() - 1)
    }

    pub fn add_joint(&mut self, joint: Joint) {
        self.joints.push(joint);
    }

    pub fn drive(&mut self, link: LinkId) {
        if !self.driven.contains(&link) {
            self.driven.push(link);
        }
    }

    pub fn link_by_name(&self, name: &str) -> Option<LinkId> {
        self.links.iter().position(|l| l.name == name).map(LinkId)
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        for link in &self.links {
            if link.points.is_empty() {
                return Err(KinematicsError::InvalidMechanism(format!(
                    "link `{}` has no attachment points",
                    link.name
                )));
            }
            if link.points.iter().any(|p| !p.is_finite()) {
                return Err(KinematicsError::InvalidMechanism(format!(
                    "link `{}` has a non-finite attachment point",
                    link.name
                )));
            }
            for (i, a) in link.points.iter().enumerate() {
                for b in &link.points[i + 1..] {
                    if (*a - *b).norm() == 0.0 {
                        return Err(KinematicsError::InvalidMechanism(format!(
                            "link `{}` has coincident attachment points",
                            link.name
                        )));
                    }
                }
            }
        }
        let check_end = |link: LinkId, point: usize| -> Result<(), KinematicsError> {
            match self.links.get(link.0) {
                Some(l) if point < l.points.len() => Ok(()),
                Some(l) => Err(KinematicsError::InvalidMechanism(format!(
                    "joint references point {point} of link `{}`",
                    l.name
                ))),
                None => Err(KinematicsError::InvalidMechanism(format!(
                    "joint references unknown link {}",
                    link.0
                ))),
            }
        };
        for joint in &self.joints {
            check_end(joint.link, joint.point)?;
            if let JointEnd::Link { link, point } = joint.other {
                check_end(link, point)?;
            }
        }
        for d in &self.driven {
            if d.0 >= self.links.len() {
                return Err(KinematicsError::InvalidMechanism(format!(
                    "driven coordinate references unknown link {}",
                    d.0
                )));
            }
        }

        // Every link must reach ground through the joint graph.
        let n = self.links.len();
        let mut grounded = vec![false; n];
        let mut changed = true;
        for j in &self.joints {
            if j.is_anchored() {
                grounded[j.link.0] = true;
            }
        }
        while changed {
            changed = false;
            for j in &self.joints {
                if let JointEnd::Link { link, .. } = j.other {
                    if grounded[j.link.0] != grounded[link.0] {
                        grounded[j.link.0] = true;
                        grounded[link.0] = true;
                        changed = true;
                    }
                }
            }
        }
        if let Some(i) = grounded.iter().position(|g| !g) {
            return Err(KinematicsError::InvalidMechanism(format!(
                "link `{}` is not connected to ground",
                self.links[i].name
            )));
        }
        Ok(())
    }
}

impl Default for Mechanism {
    fn default() -> Self {
        Self::new()
    }
}

/// Position and clockwise orientation of one link.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub position: Vec2,
    pub angle: f64,
}

impl Pose {
    pub fn new(position: Vec2, angle: f64) -> Self {
        Self { position, angle }
    }

    pub fn world(&self, local: Vec2) -> Vec2 {
        self.position + local.rotate_cw(self.angle)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub poses: Vec<Pose>,
    /// Largest joint separation, in length units.
    pub residual: f64,
}

impl Configuration {
    pub fn new(poses: Vec<Pose>) -> Self {
        Self {
            poses,
            residual: f64::INFINITY,
        }
    }

    pub fn pose(&self, link: LinkId) -> Pose {
        self.poses[link.0]
    }

    pub fn point(&self, mech: &Mechanism, link: LinkId, point: usize) -> Vec2 {
        self.poses[link.0].world(mech.links[link.0].points[point])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_rotation_leans_right() {
        let v = Vec2::new(0.0, 1.0).rotate_cw(std::f64::consts::FRAC_PI_2);
        assert!((v.x - 1.0).abs() < 1e-15 && v.y.abs() < 1e-15);
    }

    #[test]
    fn rotation_derivative_matches_difference() {
        let p = Vec2::new(0.3, -1.2);
        let a = 0.7;
        let h = 1e-6;
        let fd = (p.rotate_cw(a + h) - p.rotate_cw(a - h)) * (0.5 / h);
        let an = p.rotate_cw_deriv(a);
        assert!((fd - an).norm() < 1e-9);
    }

    #[test]
    fn floating_link_is_rejected() {
        let mut m = Mechanism::new();
        let a = m.add_link(RigidLink::bar("a", 1.0));
        let b = m.add_link(RigidLink::bar("b", 1.0));
        m.add_joint(Joint::anchored(a, 0, Vec2::ZERO));
        let _ = b;
        assert!(matches!(
            m.validate(),
            Err(KinematicsError::InvalidMechanism(_))
        ));
    }

    #[test]
    fn degenerate_bar_is_rejected() {
        let mut m = Mechanism::new();
        let a = m.add_link(RigidLink::bar("a", 0.0));
        m.add_joint(Joint::anchored(a, 0, Vec2::ZERO));
        assert!(m.validate().is_err());
    }
}
