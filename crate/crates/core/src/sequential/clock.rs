//! Four-phase trapezoid clock, its validity rules, cam generation, and the
//! per-cycle event list.

use std::cmp::Ordering;
use std::fmt;

use super::SequentialError;

pub const PHASES: usize = 4;

/// One trapezoid shape shared by all four phases; phase `i` is delayed by
/// `i / 4` of a cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockProgram {
    pub rise: f64,
    pub high: f64,
    pub fall: f64,
    pub low: f64,
}

impl Default for ClockProgram {
    fn default() -> Self {
        Self {
            rise: 0.1,
            high: 0.45,
            fall: 0.1,
            low: 0.35,
        }
    }
}

impl ClockProgram {
    pub fn new(rise: f64, high: f64, fall: f64, low: f64) -> Self {
        Self {
            rise,
            high,
            fall,
            low,
        }
    }

    /// Amplitude of `phase` at cycle time `t`, in `[0, 1]`.
    pub fn level(&self, phase: usize, t: f64) -> f64 {
        let u = (t - phase as f64 / PHASES as f64).rem_euclid(1.0);
        trapezoid(self, u)
    }

    /// Start of the fully raised interval of `phase`, folded into `[0, 1)`.
    pub fn raise_time(&self, phase: usize) -> f64 {
        fold(phase as f64 / PHASES as f64 + self.rise)
    }

    /// End of the fully raised interval of `phase`, folded into `[0, 1)`.
    pub fn lower_time(&self, phase: usize) -> f64 {
        fold(phase as f64 / PHASES as f64 + self.rise + self.high)
    }
}

fn trapezoid(p: &ClockProgram, u: f64) -> f64 {
    if u < p.rise {
        u / p.rise
    } else if u <= p.rise + p.high {
        1.0
    } else if u < p.rise + p.high + p.fall {
        1.0 - (u - p.rise - p.high) / p.fall
    } else {
        0.0
    }
}

/// Folds a time into `[0, 1)` and snaps it to a 1e-9 grid so that equal
/// sums computed in different orders compare equal.
fn fold(t: f64) -> f64 {
    let t = (t.rem_euclid(1.0) * 1e9).round() / 1e9;
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClockReport {
    pub passed: bool,
    /// Shortest time two adjacent phases are both fully raised.
    pub overlap: f64,
    /// Time each phase spends fully lowered.
    pub dwell: f64,
    pub failures: Vec<String>,
}

impl fmt::Display for ClockReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} overlap={:.4} dwell={:.4}",
            if self.passed { "PASS" } else { "FAIL" },
            self.overlap,
            self.dwell
        )?;
        for msg in &self.failures {
            write!(f, "; {msg}")?;
        }
        Ok(())
    }
}

/// Length of the intersection of two arcs `[a, a + la]` and `[b, b + lb]` on
/// the unit circle.
fn arc_overlap(a: f64, la: f64, b: f64, lb: f64) -> f64 {
    (-1..=1)
        .map(|k| {
            let lo = a.max(b + k as f64);
            let hi = (a + la).min(b + k as f64 + lb);
            (hi - lo).max(0.0)
        })
        .sum()
}

pub fn validate_clock(program: &ClockProgram) -> ClockReport {
    let p = program;
    let mut failures = Vec::new();
    let parts = [p.rise, p.high, p.fall, p.low];
    if parts.iter().any(|x| !x.is_finite() || *x < 0.0) {
        failures.push("waveform fractions must be finite and non-negative".to_string());
    }
    let total: f64 = parts.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        failures.push(format!("rise+high+fall+low = {total}, expected 1"));
    }
    if !(p.high > 0.0) {
        failures.push("high must be positive".into());
    }
    let step = 1.0 / PHASES as f64;
    let overlap = if (p.high + 1e-12) < step {
        // adjacent full-on intervals do not meet; report the gap as negative
        p.high - step
    } else {
        (0..PHASES)
            .map(|i| {
                let a = i as f64 * step + p.rise;
                let b = ((i + 1) % PHASES) as f64 * step + p.rise;
                arc_overlap(a.rem_euclid(1.0), p.high.min(1.0), b.rem_euclid(1.0), p.high.min(1.0))
            })
            .fold(f64::INFINITY, f64::min)
    };
    let overlap = (overlap * 1e12).round() / 1e12;
    if !(overlap > 0.0) {
        failures.push(format!(
            "adjacent phases are never both fully raised (overlap {overlap:.4})"
        ));
    }
    let dwell = p.low;
    if !(dwell > 0.0) {
        failures.push("a phase is never fully lowered (dwell 0)".into());
    }
    ClockReport {
        passed: failures.is_empty(),
        overlap,
        dwell,
        failures,
    }
}

/// Follower displacement of a cam. `profile` holds radii at equally spaced
/// angles over one full turn, first and last sample at the same angle.
/// Returns one displacement per distinct sample, normalised to `[0, 1]`, with
/// the cam rotated by `phase_offset` of a turn.
pub fn cam_waveform(profile: &[f64], phase_offset: f64) -> Result<Vec<f64>, SequentialError> {
    if profile.len() < 3 {
        return Err(SequentialError::NonPeriodicProfile(
            "need at least three samples".into(),
        ));
    }
    if profile.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(SequentialError::NonPeriodicProfile(
            "radii must be positive".into(),
        ));
    }
    let first = profile[0];
    let last = profile[profile.len() - 1];
    if (first - last).abs() > 1e-9 * first.abs().max(1.0) {
        return Err(SequentialError::NonPeriodicProfile(format!(
            "first radius {first} differs from last {last}"
        )));
    }
    let n = profile.len() - 1;
    let lo = profile.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let sample = |u: f64| {
        let x = u.rem_euclid(1.0) * n as f64;
        let k = (x.floor() as usize).min(n - 1);
        let frac = x - k as f64;
        profile[k] + (profile[k + 1] - profile[k]) * frac
    };
    Ok((0..n)
        .map(|k| {
            if span <= 0.0 {
                return 0.0;
            }
            let u = k as f64 / n as f64 - phase_offset;
            // snap to the sample grid to avoid interpolating rounding noise
            let snapped = (u * n as f64).round() / n as f64;
            let u = if (u - snapped).abs() < 1e-12 { snapped } else { u };
            (sample(u) - lo) / span
        })
        .collect())
}

/// A cam profile whose follower traces the clock trapezoid.
pub fn trapezoid_profile(program: &ClockProgram, samples: usize, base_radius: f64, lift: f64) -> Vec<f64> {
    (0..=samples)
        .map(|k| base_radius + lift * trapezoid(program, (k % samples) as f64 / samples as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Lower(usize),
    ClearInput,
    SetInput,
    Raise(usize),
}

impl Action {
    fn tie_order(self) -> u8 {
        match self {
            Action::Lower(_) => 0,
            Action::ClearInput => 1,
            Action::SetInput => 2,
            Action::Raise(_) => 3,
        }
    }

    /// The action that undoes this one.
    pub fn inverse(self) -> Action {
        match self {
            Action::Lower(p) => Action::Raise(p),
            Action::Raise(p) => Action::Lower(p),
            Action::SetInput => Action::ClearInput,
            Action::ClearInput => Action::SetInput,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Lower(p) => write!(f, "lower p{p}"),
            Action::Raise(p) => write!(f, "raise p{p}"),
            Action::SetInput => f.write_str("set input"),
            Action::ClearInput => f.write_str("clear input"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub action: Action,
}

/// Events of one clock cycle. Inputs are applied at `t = 0` and withdrawn
/// when phase 3 lowers, which is while phase 0 still holds them.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSchedule {
    pub events: Vec<Event>,
}

impl EventSchedule {
    pub fn new(program: &ClockProgram) -> Self {
        let mut events = vec![
            Event {
                time: 0.0,
                action: Action::SetInput,
            },
            Event {
                time: program.lower_time(PHASES - 1),
                action: Action::ClearInput,
            },
        ];
        for p in 0..PHASES {
            events.push(Event {
                time: program.raise_time(p),
                action: Action::Raise(p),
            });
            events.push(Event {
                time: program.lower_time(p),
                action: Action::Lower(p),
            });
        }
        events.sort_by(|a, b| {
            a.time
                .partial_cmp(&b.time)
                .unwrap_or(Ordering::Equal)
                .then(a.action.tie_order().cmp(&b.action.tie_order()))
        });
        Self { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_program_passes() {
        let r = validate_clock(&ClockProgram::default());
        assert!(r.passed, "{r}");
        assert!((r.overlap - 0.20).abs() < 1e-12);
        assert!((r.dwell - 0.35).abs() < 1e-12);
    }

    #[test]
    fn short_high_fails() {
        let r = validate_clock(&ClockProgram::new(0.1, 0.2, 0.1, 0.6));
        assert!(!r.passed);
        assert!(r.overlap <= 0.0);
    }

    #[test]
    fn square_waves_pass() {
        let r = validate_clock(&ClockProgram::new(0.0, 0.5, 0.0, 0.5));
        assert!(r.passed, "{r}");
        assert!((r.overlap - 0.25).abs() < 1e-12);
        // each square phase is fully lowered for half the cycle
        assert!((r.dwell - 0.5).abs() < 1e-12);
    }

    #[test]
    fn no_dwell_fails() {
        let r = validate_clock(&ClockProgram::new(0.1, 0.8, 0.1, 0.0));
        assert!(!r.passed);
    }

    #[test]
    fn overlap_matches_sampling() {
        // brute-force oracle: count samples where phases 0 and 1 are both at 1
        for p in [ClockProgram::default(), ClockProgram::new(0.05, 0.6, 0.05, 0.3)] {
            let n = 200_000;
            let both = (0..n)
                .filter(|&k| {
                    let t = k as f64 / n as f64;
                    p.level(0, t) >= 1.0 && p.level(1, t) >= 1.0
                })
                .count();
            let measured = both as f64 / n as f64;
            assert!((measured - validate_clock(&p).overlap).abs() < 1e-4);
        }
    }

    #[test]
    fn default_event_order() {
        let s = EventSchedule::new(&ClockProgram::default());
        let actions: Vec<String> = s.events.iter().map(|e| e.action.to_string()).collect();
        assert_eq!(
            actions,
            [
                "set input",
                "lower p2",
                "raise p0",
                "lower p3",
                "clear input",
                "raise p1",
                "lower p0",
                "raise p2",
                "lower p1",
                "raise p3"
            ]
        );
        assert!(s.events.windows(2).all(|w| w[0].time <= w[1].time));
    }

    #[test]
    fn constant_cam_gives_no_motion() {
        let w = cam_waveform(&[2.0; 37], 0.25).unwrap();
        assert!(w.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn trapezoid_cams_reproduce_the_clock() {
        let p = ClockProgram::default();
        let profile = trapezoid_profile(&p, 360, 1.0, 0.2);
        for phase in 0..PHASES {
            let w = cam_waveform(&profile, phase as f64 / 4.0).unwrap();
            for (k, x) in w.iter().enumerate() {
                let expected = p.level(phase, k as f64 / 360.0);
                assert!((x - expected).abs() <= 1e-9, "phase {phase} sample {k}");
            }
        }
    }

    #[test]
    fn open_profile_is_rejected() {
        assert!(matches!(
            cam_waveform(&[1.0, 1.5, 2.0, 1.2], 0.0),
            Err(SequentialError::NonPeriodicProfile(_))
        ));
        assert!(cam_waveform(&[1.0, -1.0, 1.0], 0.0).is_err());
    }
}
