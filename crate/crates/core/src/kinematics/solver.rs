//! Damped Gauss-Newton assembly, quasi-static driving and numeric mobility.
//!
//! Unknowns are three pose coordinates per link `(x, y, angle)`; every joint
//! contributes two coincidence equations. Steps are minimum-norm least-squares
//! solutions, so under-constrained mechanisms stay close to the guess and
//! paradoxical (redundantly constrained) mechanisms are handled without any
//! special casing.

use nalgebra::{DMatrix, DVector};

use super::geometry::{Configuration, JointEnd, LinkId, Mechanism, Pose};
use super::KinematicsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Largest accepted joint separation.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Relative singular-value cutoff used for rank decisions.
    pub rank_threshold: f64,
    /// Largest pose coordinate change accepted between two drive sub-steps.
    pub max_step_change: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100,
            rank_threshold: 1e-8,
            max_step_change: 0.5,
        }
    }
}

fn constraint_vector(mech: &Mechanism, poses: &[Pose]) -> DVector<f64> {
    let mut r = DVector::zeros(2 * mech.joints.len());
    for (k, j) in mech.joints.iter().enumerate() {
        let a = poses[j.link.0].world(mech.links[j.link.0].points[j.point]);
        let b = match j.other {
            JointEnd::Ground(g) => g,
            JointEnd::Link { link, point } => poses[link.0].world(mech.links[link.0].points[point]),
        };
        let d = a - b;
        r[2 * k] = d.x;
        r[2 * k + 1] = d.y;
    }
    r
}

fn max_violation(r: &DVector<f64>) -> f64 {
    r.as_slice()
        .chunks(2)
        .map(|c| c[0].hypot(c[1]))
        .fold(0.0, f64::max)
}

/// Constraint Jacobian with respect to all `3 * links` pose coordinates.
pub fn constraint_jacobian(mech: &Mechanism, poses: &[Pose]) -> DMatrix<f64> {
    let mut jac = DMatrix::zeros(2 * mech.joints.len(), 3 * mech.links.len());
    let mut fill = |row: usize, link: LinkId, point: usize, sign: f64| {
        let pose = poses[link.0];
        let local = mech.links[link.0].points[point];
        let d = local.rotate_cw_deriv(pose.angle);
        let c = 3 * link.0;
        jac[(row, c)] += sign;
        jac[(row + 1, c + 1)] += sign;
        jac[(row, c + 2)] += sign * d.x;
        jac[(row + 1, c + 2)] += sign * d.y;
    };
    for (k, j) in mech.joints.iter().enumerate() {
        fill(2 * k, j.link, j.point, 1.0);
        if let JointEnd::Link { link, point } = j.other {
            fill(2 * k, link, point, -1.0);
        }
    }
    jac
}

/// Residual of an arbitrary set of poses.
pub fn residual(mech: &Mechanism, poses: &[Pose]) -> f64 {
    max_violation(&constraint_vector(mech, poses))
}

fn to_vector(poses: &[Pose]) -> Vec<f64> {
    poses
        .iter()
        .flat_map(|p| [p.position.x, p.position.y, p.angle])
        .collect()
}

fn apply(poses: &mut [Pose], free: &[usize], dq: &DVector<f64>, alpha: f64) {
    for (k, &c) in free.iter().enumerate() {
        let p = &mut poses[c / 3];
        let v = alpha * dq[k];
        match c % 3 {
            0 => p.position.x += v,
            1 => p.position.y += v,
            _ => p.angle += v,
        }
    }
}

/// Newton iteration over the coordinates listed in `free`.
fn solve(
    mech: &Mechanism,
    mut poses: Vec<Pose>,
    free: &[usize],
    opts: &SolverOptions,
) -> Result<Configuration, KinematicsError> {
    let mut r = constraint_vector(mech, &poses);
    for _ in 0..opts.max_iterations {
        let viol = max_violation(&r);
        if viol <= opts.tolerance {
            return Ok(Configuration {
                poses,
                residual: viol,
            });
        }
        let full = constraint_jacobian(mech, &poses);
        let jac = DMatrix::from_fn(full.nrows(), free.len(), |i, k| full[(i, free[k])]);
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        if smax == 0.0 {
            break;
        }
        let dq = svd
            .solve(&(-&r), smax * 1e-12)
            .map_err(|e| KinematicsError::InvalidMechanism(e.to_string()))?;

        let norm = r.norm();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial = poses.clone();
            apply(&mut trial, free, &dq, alpha);
            let tr = constraint_vector(mech, &trial);
            if tr.norm() < norm {
                poses = trial;
                r = tr;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let viol = max_violation(&r);
    if viol <= opts.tolerance {
        return Ok(Configuration {
            poses,
            residual: viol,
        });
    }
    Err(KinematicsError::NoConvergence { residual: viol })
}

fn free_coordinates(mech: &Mechanism, fix_driven: bool) -> Vec<usize> {
    (0..3 * mech.links.len())
        .filter(|&c| !(fix_driven && c % 3 == 2 && mech.driven.contains(&LinkId(c / 3))))
        .collect()
}

/// Brings `guess` onto the constraint manifold, holding driven link angles at
/// their guessed values.
pub fn assemble(
    mech: &Mechanism,
    guess: &Configuration,
    opts: &SolverOptions,
) -> Result<Configuration, KinematicsError> {
    mech.validate()?;
    if guess.poses.len() != mech.links.len() {
        return Err(KinematicsError::InvalidMechanism(format!(
            "guess has {} poses for {} links",
            guess.poses.len(),
            mech.links.len()
        )));
    }
    solve(
        mech,
        guess.poses.clone(),
        &free_coordinates(mech, true),
        opts,
    )
}

/// Moves the driven link angles to `targets` in `steps` equal increments,
/// re-solving the remaining coordinates after each increment.
pub fn drive(
    mech: &Mechanism,
    config: &Configuration,
    targets: &[(LinkId, f64)],
    steps: usize,
    opts: &SolverOptions,
) -> Result<Configuration, KinematicsError> {
    mech.validate()?;
    for (link, _) in targets {
        if !mech.driven.contains(link) {
            return Err(KinematicsError::NotDriven(mech.links[link.0].name.clone()));
        }
    }
    let steps = steps.max(1);
    let free = free_coordinates(mech, true);
    let start: Vec<f64> = targets
        .iter()
        .map(|(l, _)| config.poses[l.0].angle)
        .collect();

    let mut current = config.clone();
    for step in 1..=steps {
        let frac = step as f64 / steps as f64;
        let mut poses = current.poses.clone();
        for ((link, target), a0) in targets.iter().zip(&start) {
            poses[link.0].angle = a0 + (target - a0) * frac;
        }
        let next = solve(mech, poses, &free, opts).map_err(|e| match e {
            KinematicsError::NoConvergence { residual } => {
                KinematicsError::BindingDetected { step, residual }
            }
            other => other,
        })?;
        let jump = to_vector(&next.poses)
            .iter()
            .zip(to_vector(&current.poses))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if jump > opts.max_step_change {
            return Err(KinematicsError::BindingDetected {
                step,
                residual: next.residual,
            });
        }
        current = next;
    }
    Ok(current)
}

/// Instantaneous degrees of freedom: pose coordinates minus the numeric rank
/// of the constraint Jacobian.
pub fn mobility(mech: &Mechanism, config: &Configuration, opts: &SolverOptions) -> usize {
    let jac = constraint_jacobian(mech, &config.poses);
    let ncols = jac.ncols();
    if jac.nrows() == 0 {
        return ncols;
    }
    let sv = jac.singular_values();
    let smax = sv.max();
    let rank = sv.iter().filter(|&&s| s > opts.rank_threshold * smax).count();
    ncols - rank
}
