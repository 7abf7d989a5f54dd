//! SVG frames of lock mechanisms and shift-register traces.
//!
//! 100 pixels per length unit, origin at the bottom left, y up. Links are
//! drawn as segments between their joint positions; ground pivots are a
//! circle on a triangle, other pivots an open circle. Coordinates are printed
//! with three decimals so that identical inputs give identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::kinematics::{Configuration, JointEnd, LockGeometry, LockMechanism, Vec2};
use crate::primitives::LockState;
use crate::sequential::{ChainTraceStep, ShiftCell};

pub const PIXELS_PER_UNIT: f64 = 100.0;

/// Drawing primitives in model units.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scene {
    pub segments: Vec<(Vec2, Vec2)>,
    pub anchors: Vec<Vec2>,
    pub pivots: Vec<Vec2>,
}

impl Scene {
    pub fn extend(&mut self, other: Scene) {
        self.segments.extend(other.segments);
        self.anchors.extend(other.anchors);
        self.pivots.extend(other.pivots);
    }
}

fn offset(p: Vec2, by: Vec2) -> Vec2 {
    p + by
}

/// The rigid lock with inputs at `(theta0, theta1)`, shifted by `at`.
pub fn lock_scene(geom: &LockGeometry, theta0: f64, theta1: f64, at: Vec2) -> Scene {
    let lock = LockMechanism::new(geom, true);
    let mech = lock.mechanism();
    let config = Configuration::new(lock.poses_at(theta0, theta1));
    let mut scene = Scene::default();
    for (i, link) in mech.links.iter().enumerate() {
        let pts: Vec<Vec2> = (0..link.points.len())
            .map(|k| offset(config.poses[i].world(link.points[k]), at))
            .collect();
        for k in 0..pts.len() {
            if pts.len() == 2 && k == 1 {
                break;
            }
            scene.segments.push((pts[k], pts[(k + 1) % pts.len()]));
        }
    }
    for j in &mech.joints {
        let p = offset(config.point(mech, j.link, j.point), at);
        match j.other {
            JointEnd::Ground(_) => scene.anchors.push(p),
            JointEnd::Link { .. } => scene.pivots.push(p),
        }
    }
    scene
}

/// Input angles for a logical lock state.
pub fn state_angles(geom: &LockGeometry, state: LockState) -> (f64, f64) {
    let (a, b) = state.inputs();
    (a as f64 * geom.theta_on, b as f64 * geom.theta_on)
}

/// Width and height of the box one lock is drawn in, in model units.
pub fn lock_extent(geom: &LockGeometry) -> Vec2 {
    Vec2::new(5.0 * geom.side_length, 4.0 * geom.side_length)
}

/// Offset that places a lock's drawing inside its box.
fn lock_origin(geom: &LockGeometry) -> Vec2 {
    Vec2::new(2.5 * geom.side_length, 1.5 * geom.side_length)
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Renders a scene into an SVG document covering `size` model units.
pub fn to_svg(scene: &Scene, size: Vec2) -> String {
    let w = size.x * PIXELS_PER_UNIT;
    let h = size.y * PIXELS_PER_UNIT;
    let px = |p: Vec2| (num(p.x * PIXELS_PER_UNIT), num(h - p.y * PIXELS_PER_UNIT));
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(w),
        num(h),
        num(w),
        num(h)
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, num(w), num(h));
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="4" stroke-linecap="round">"#);
    for (a, b) in &scene.segments {
        let (x1, y1) = px(*a);
        let (x2, y2) = px(*b);
        let _ = writeln!(s, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="2" fill="white">"#);
    for p in &scene.anchors {
        let (x, y) = px(*p);
        let (cx, cy) = (p.x * PIXELS_PER_UNIT, h - p.y * PIXELS_PER_UNIT);
        let _ = writeln!(
            s,
            r#"<polygon points="{x},{y} {},{} {},{}" fill="gray"/>"#,
            num(cx - 10.0),
            num(cy + 16.0),
            num(cx + 10.0),
            num(cy + 16.0)
        );
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="6"/>"#);
    }
    for p in &scene.pivots {
        let (x, y) = px(*p);
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="4"/>"#);
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

/// One frame per lock state: (0,0), (1,0) and (0,1).
pub fn lock_frames(geom: &LockGeometry) -> Vec<String> {
    LockState::ALL
        .iter()
        .map(|&state| {
            let (t0, t1) = state_angles(geom, state);
            to_svg(&lock_scene(geom, t0, t1, lock_origin(geom)), lock_extent(geom))
        })
        .collect()
}

/// A chain drawn as one column per cell: holding lock 0 at the bottom,
/// holding lock 1 above it, the output lock on top.
pub fn chain_scene(geom: &LockGeometry, cells: &[ShiftCell]) -> Scene {
    let box_ = lock_extent(geom);
    let mut scene = Scene::default();
    for (k, cell) in cells.iter().enumerate() {
        let locks = [cell.holding[0], cell.holding[1], cell.output];
        for (row, state) in locks.into_iter().enumerate() {
            let (t0, t1) = state_angles(geom, state);
            let at = lock_origin(geom) + Vec2::new(k as f64 * box_.x, row as f64 * box_.y);
            scene.extend(lock_scene(geom, t0, t1, at));
        }
    }
    scene
}

pub fn chain_extent(geom: &LockGeometry, cells: usize) -> Vec2 {
    let box_ = lock_extent(geom);
    Vec2::new(box_.x * cells.max(1) as f64, box_.y * 3.0)
}

/// The starting state followed by one frame per trace step.
pub fn chain_frames(geom: &LockGeometry, initial: &[ShiftCell], steps: &[ChainTraceStep]) -> Vec<String> {
    let size = chain_extent(geom, initial.len());
    std::iter::once(initial)
        .chain(steps.iter().map(|s| s.cells.as_slice()))
        .map(|cells| to_svg(&chain_scene(geom, cells), size))
        .collect()
}

/// File name of frame `index` out of `count`, zero-padded to at least three
/// digits.
pub fn frame_name(index: usize, count: usize) -> String {
    let width = count.saturating_sub(1).to_string().len().max(3);
    format!("frame_{index:0width$}.svg")
}

pub fn write_frames(dir: &Path, frames: &[String]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    frames
        .iter()
        .enumerate()
        .map(|(i, svg)| {
            let path = dir.join(frame_name(i, frames.len()));
            fs::write(&path, svg)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertical(a: Vec2, b: Vec2) -> bool {
        (a.x - b.x).abs() < 1e-12
    }

    #[test]
    fn home_frame_has_vertical_side_links() {
        let g = LockGeometry::default();
        let scene = lock_scene(&g, 0.0, 0.0, Vec2::ZERO);
        let verticals = scene.segments.iter().filter(|(a, b)| vertical(*a, *b)).count();
        // four side links and the connecting link; no coupler edge is vertical
        assert_eq!(verticals, 5);
        assert_eq!(scene.anchors.len(), 4);
    }

    #[test]
    fn raised_upper_input_leans_and_tilts_connector() {
        let g = LockGeometry::default();
        let scene = lock_scene(&g, g.theta_on, 0.0, Vec2::ZERO);
        let (a, b) = scene.segments[0];
        assert!(b.x > a.x, "upper input leans right");
        let conn = *scene.segments.last().unwrap();
        assert!(!vertical(conn.0, conn.1));
        assert!(((conn.1 - conn.0).norm() - g.rest_length).abs() < 1e-12);
        let lower = scene.segments[5];
        assert!(vertical(lower.0, lower.1));
    }

    #[test]
    fn frames_are_deterministic() {
        let g = LockGeometry::default();
        let a = lock_frames(&g);
        assert_eq!(a, lock_frames(&g));
        assert_eq!(a.len(), 3);
        assert!(a[0].starts_with("<?xml"));
        assert!(a[0].contains(r#"width="500.000" height="400.000""#));
        assert!(!a[1].contains("-0.000"));
        assert_ne!(a[1], a[2]);
    }

    #[test]
    fn frame_names_are_padded() {
        assert_eq!(frame_name(7, 10), "frame_007.svg");
        assert_eq!(frame_name(7, 1001), "frame_0007.svg");
    }
}
