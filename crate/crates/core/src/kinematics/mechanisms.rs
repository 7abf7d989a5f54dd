//! Ready-made mechanisms: parallelogram four-bars, the five-link variants and
//! the lock built from two four-bars joined by a connecting link.

use super::geometry::{Configuration, Joint, LinkId, Mechanism, Pose, RigidLink, Vec2};
use super::lock::LockGeometry;

/// A mechanism together with an exactly assembled configuration.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub mechanism: Mechanism,
    pub config: Configuration,
}

fn exact(mechanism: Mechanism, poses: Vec<Pose>) -> Assembled {
    let residual = super::solver::residual(&mechanism, &poses);
    Assembled {
        mechanism,
        config: Configuration { poses, residual },
    }
}

/// Parallelogram four-bar: anchors `width` apart, side links of `length`,
/// left side link driven, both sides leaning by `theta`.
pub fn parallelogram(length: f64, width: f64, theta: f64) -> Assembled {
    let mut m = Mechanism::new();
    let left = m.add_link(RigidLink::bar("left", length));
    let right = m.add_link(RigidLink::bar("right", length));
    let coupler = m.add_link(RigidLink::new(
        "coupler",
        vec![Vec2::ZERO, Vec2::new(width, 0.0)],
    ));
    m.add_joint(Joint::anchored(left, 0, Vec2::ZERO));
    m.add_joint(Joint::anchored(right, 0, Vec2::new(width, 0.0)));
    m.add_joint(Joint::between(left, 1, coupler, 0));
    m.add_joint(Joint::between(right, 1, coupler, 1));
    m.drive(left);
    let tip = Vec2::new(0.0, length).rotate_cw(theta);
    let poses = vec![
        Pose::new(Vec2::ZERO, theta),
        Pose::new(Vec2::new(width, 0.0), theta),
        Pose::new(tip, 0.0),
    ];
    exact(m, poses)
}

/// Parallelogram four-bar with a third link between the side links, pinned
/// to the coupler midpoint. `center_anchor_x` is the ground pivot of that
/// link; at `width / 2` the link matches the side links in length and angle.
///
/// The skewed variant (any other anchor) only assembles at `theta = 0`, so
/// the returned configuration is built there regardless of `theta`.
pub fn five_link(length: f64, width: f64, center_anchor_x: f64, theta: f64) -> Assembled {
    let mid = width / 2.0;
    let matched = (center_anchor_x - mid).abs() < 1e-15;
    let theta = if matched { theta } else { 0.0 };
    let offset = mid - center_anchor_x;
    let center_len = offset.hypot(length);
    let center_angle = offset.atan2(length);

    let mut m = Mechanism::new();
    let left = m.add_link(RigidLink::bar("left", length));
    let right = m.add_link(RigidLink::bar("right", length));
    let center = m.add_link(RigidLink::bar("center", center_len));
    let coupler = m.add_link(RigidLink::new(
        "coupler",
        vec![Vec2::ZERO, Vec2::new(mid, 0.0), Vec2::new(width, 0.0)],
    ));
    m.add_joint(Joint::anchored(left, 0, Vec2::ZERO));
    m.add_joint(Joint::anchored(right, 0, Vec2::new(width, 0.0)));
    m.add_joint(Joint::anchored(center, 0, Vec2::new(center_anchor_x, 0.0)));
    m.add_joint(Joint::between(left, 1, coupler, 0));
    m.add_joint(Joint::between(center, 1, coupler, 1));
    m.add_joint(Joint::between(right, 1, coupler, 2));
    m.drive(left);
    let tip = Vec2::new(0.0, length).rotate_cw(theta);
    let poses = vec![
        Pose::new(Vec2::ZERO, theta),
        Pose::new(Vec2::new(width, 0.0), theta),
        Pose::new(
            Vec2::new(center_anchor_x, 0.0),
            if matched { theta } else { center_angle },
        ),
        Pose::new(tip, 0.0),
    ];
    exact(m, poses)
}

/// Link handles of a lock mechanism.
///
/// Layout for side length `L`: the upper four-bar is anchored at `(±L, L)`
/// with its coupler above; the lower one is anchored at `(±L, 0)` with its
/// coupler below. Each coupler carries a triangular projection whose tip is a
/// spring (or connecting link) attachment point; at rest the tips sit at
/// `(0, L)` and `(0, 0)`.
#[derive(Debug, Clone)]
pub struct LockMechanism {
    pub assembled: Assembled,
    pub upper_input: LinkId,
    pub upper_follower: LinkId,
    pub upper_coupler: LinkId,
    pub lower_input: LinkId,
    pub lower_follower: LinkId,
    pub lower_coupler: LinkId,
    /// Present when the couplers are joined by a rigid connecting link.
    pub connecting: Option<LinkId>,
    pub side_length: f64,
}

/// Index of the projection tip on each coupler.
pub const PROJECTION_POINT: usize = 2;

impl LockMechanism {
    /// Builds the lock at rest. With `connecting` the couplers are joined by a
    /// rigid link of length `geom.rest_length`; without it they are free and
    /// the spring endpoints can be measured directly.
    pub fn new(geom: &LockGeometry, connecting: bool) -> Self {
        let l = geom.side_length;
        let mut m = Mechanism::new();
        let ui = m.add_link(RigidLink::bar("upper_input", l));
        let uf = m.add_link(RigidLink::bar("upper_follower", l));
        let uc = m.add_link(RigidLink::new(
            "upper_coupler",
            vec![Vec2::new(-l, 0.0), Vec2::new(l, 0.0), Vec2::new(0.0, -l)],
        ));
        let li = m.add_link(RigidLink::new(
            "lower_input",
            vec![Vec2::ZERO, Vec2::new(0.0, -l)],
        ));
        let lf = m.add_link(RigidLink::new(
            "lower_follower",
            vec![Vec2::ZERO, Vec2::new(0.0, -l)],
        ));
        let lc = m.add_link(RigidLink::new(
            "lower_coupler",
            vec![Vec2::new(-l, 0.0), Vec2::new(l, 0.0), Vec2::new(0.0, l)],
        ));
        m.add_joint(Joint::anchored(ui, 0, Vec2::new(-l, l)));
        m.add_joint(Joint::anchored(uf, 0, Vec2::new(l, l)));
        m.add_joint(Joint::between(ui, 1, uc, 0));
        m.add_joint(Joint::between(uf, 1, uc, 1));
        m.add_joint(Joint::anchored(li, 0, Vec2::new(-l, 0.0)));
        m.add_joint(Joint::anchored(lf, 0, Vec2::new(l, 0.0)));
        m.add_joint(Joint::between(li, 1, lc, 0));
        m.add_joint(Joint::between(lf, 1, lc, 1));
        let conn = connecting.then(|| {
            let c = m.add_link(RigidLink::bar("connecting", geom.rest_length));
            m.add_joint(Joint::between(c, 0, lc, PROJECTION_POINT));
            m.add_joint(Joint::between(c, 1, uc, PROJECTION_POINT));
            c
        });
        m.drive(ui);
        m.drive(li);

        let mut lock = LockMechanism {
            assembled: Assembled {
                mechanism: m,
                config: Configuration::new(Vec::new()),
            },
            upper_input: ui,
            upper_follower: uf,
            upper_coupler: uc,
            lower_input: li,
            lower_follower: lf,
            lower_coupler: lc,
            connecting: conn,
            side_length: l,
        };
        let poses = lock.poses_at(0.0, 0.0);
        lock.assembled.config = Configuration {
            residual: super::solver::residual(&lock.assembled.mechanism, &poses),
            poses,
        };
        lock
    }

    pub fn mechanism(&self) -> &Mechanism {
        &self.assembled.mechanism
    }

    /// Closed-form poses with the inputs at `(theta0, theta1)`. The connecting
    /// link, when present, is aimed from the lower tip toward the upper tip and
    /// only closes when the tips are exactly its length apart.
    pub fn poses_at(&self, theta0: f64, theta1: f64) -> Vec<Pose> {
        let l = self.side_length;
        let (s0, c0) = theta0.sin_cos();
        let (s1, c1) = theta1.sin_cos();
        let mut poses = vec![
            Pose::new(Vec2::new(-l, l), theta0),
            Pose::new(Vec2::new(l, l), theta0),
            Pose::new(Vec2::new(l * s0, l + l * c0), 0.0),
            Pose::new(Vec2::new(-l, 0.0), -theta1),
            Pose::new(Vec2::new(l, 0.0), -theta1),
            Pose::new(Vec2::new(l * s1, -l * c1), 0.0),
        ];
        if self.connecting.is_some() {
            let p1 = Vec2::new(l * s1, l - l * c1);
            let p0 = Vec2::new(l * s0, l * c0);
            let d = p0 - p1;
            poses.push(Pose::new(p1, d.x.atan2(d.y)));
        }
        poses
    }

    /// Targets for [`super::drive`] that place the inputs at `(theta0, theta1)`.
    pub fn targets(&self, theta0: f64, theta1: f64) -> [(LinkId, f64); 2] {
        [(self.upper_input, theta0), (self.lower_input, -theta1)]
    }

    /// Input angles read back from a configuration.
    pub fn input_angles(&self, config: &Configuration) -> (f64, f64) {
        (
            config.pose(self.upper_input).angle,
            -config.pose(self.lower_input).angle,
        )
    }

    /// World positions of the upper and lower projection tips.
    pub fn spring_endpoints(&self, config: &Configuration) -> (Vec2, Vec2) {
        let m = self.mechanism();
        (
            config.point(m, self.upper_coupler, PROJECTION_POINT),
            config.point(m, self.lower_coupler, PROJECTION_POINT),
        )
    }
}
