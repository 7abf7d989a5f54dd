//! Closed-form energy, inertia and density estimates.
//!
//! SI units throughout. The drag model charges each rotary joint
//! `k_rd * phi^2 / t` for a rotation of `phi` radians carried out in time
//! `t = 1/f`.

use std::f64::consts::{LN_2, PI};

use thiserror::Error;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380649e-23;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<f64, EnergyError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(EnergyError::NonPositive { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, EnergyError> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(EnergyError::Negative { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DragModel {
    /// Rotary drag coefficient, J·s·rad⁻².
    pub k_rd: f64,
    pub joints_per_op: u32,
    /// Rotation per operation, rad.
    pub phi: f64,
}

impl Default for DragModel {
    fn default() -> Self {
        Self {
            k_rd: 2.4e-35,
            joints_per_op: 10,
            phi: 1.0,
        }
    }
}

impl DragModel {
    pub fn validate(&self) -> Result<(), EnergyError> {
        positive("k_rd", self.k_rd)?;
        positive("phi", self.phi)?;
        positive("joints_per_op", self.joints_per_op as f64)?;
        Ok(())
    }

    /// Energy dissipated by one joint turning `phi` at frequency `f`, J.
    pub fn energy_per_joint(&self, f: f64) -> Result<f64, EnergyError> {
        self.validate()?;
        Ok(self.k_rd * self.phi * self.phi * positive("frequency", f)?)
    }

    /// Energy dissipated by all joints of one operation, J.
    pub fn energy_per_op(&self, f: f64) -> Result<f64, EnergyError> {
        Ok(self.energy_per_joint(f)? * self.joints_per_op as f64)
    }

    /// Energy times operation time for one operation, J·s.
    pub fn energy_time_product(&self) -> Result<f64, EnergyError> {
        self.validate()?;
        Ok(self.joints_per_op as f64 * self.k_rd * self.phi * self.phi)
    }
}

pub fn drag_energy_per_joint(model: &DragModel, f: f64) -> Result<f64, EnergyError> {
    model.energy_per_joint(f)
}

pub fn energy_time_product(model: &DragModel) -> Result<f64, EnergyError> {
    model.energy_time_product()
}

/// A mass moving as `A sin(2 pi f t)` on a joint of finite lateral stiffness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialModel {
    /// Moving mass, kg.
    pub mass: f64,
    /// Amplitude, m.
    pub amplitude: f64,
    /// Frequency, Hz.
    pub frequency: f64,
    /// Lateral joint stiffness, N/m.
    pub k_lateral: f64,
}

impl Default for InertialModel {
    fn default() -> Self {
        Self {
            mass: 9e-22,
            amplitude: 10e-9,
            frequency: 100e6,
            k_lateral: 13.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialReport {
    /// m/s
    pub v_max: f64,
    /// m/s²
    pub a_max: f64,
    /// N
    pub f_max: f64,
    /// m
    pub deflection: f64,
}

pub fn inertial_analysis(model: &InertialModel) -> Result<InertialReport, EnergyError> {
    let m = positive("mass", model.mass)?;
    let a = non_negative("amplitude", model.amplitude)?;
    let f = positive("frequency", model.frequency)?;
    let k = positive("k_lateral", model.k_lateral)?;
    let w = 2.0 * PI * f;
    let v_max = w * a;
    let a_max = w * w * a;
    let f_max = m * a_max;
    Ok(InertialReport {
        v_max,
        a_max,
        f_max,
        deflection: f_max / k,
    })
}

/// `(k_B T, k_B T ln 2)` in joules.
pub fn landauer_context(temperature: f64) -> Result<(f64, f64), EnergyError> {
    let kt = K_B * positive("temperature", temperature)?;
    Ok((kt, kt * LN_2))
}

/// Transistor equivalents of a square die tiled with `cell_w × cell_h`
/// cells, each worth `transistors_per_cell`.
pub fn mems_density(die_side: f64, cell_w: f64, cell_h: f64, transistors_per_cell: u64) -> Result<u64, EnergyError> {
    let die = positive("die_side", die_side)?;
    let w = positive("cell_w", cell_w)?;
    let h = positive("cell_h", cell_h)?;
    // a relative nudge keeps exact tilings from flooring one cell short
    let cells = ((die * die) / (w * h) * (1.0 + 1e-12)).floor() as u64;
    Ok(cells * transistors_per_cell)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() <= rel
    }

    #[test]
    fn drag_examples() {
        let m = DragModel::default();
        assert!(close(drag_energy_per_joint(&m, 100e6).unwrap(), 2.4e-27, 1e-12));
        assert!(close(drag_energy_per_joint(&m, 1.0).unwrap(), 2.4e-35, 1e-12));
        assert!(close(m.energy_per_op(100e6).unwrap(), 2.4e-26, 1e-12));
        assert!(drag_energy_per_joint(&m, 0.0).is_err());
    }

    #[test]
    fn energy_time_examples() {
        let m = DragModel::default();
        assert!(close(energy_time_product(&m).unwrap(), 2.4e-34, 1e-12));
        let doubled = DragModel { phi: 2.0, ..m };
        assert!(close(
            energy_time_product(&doubled).unwrap(),
            4.0 * energy_time_product(&m).unwrap(),
            1e-12
        ));
        let single = DragModel { joints_per_op: 1, ..m };
        assert!(close(energy_time_product(&single).unwrap(), 2.4e-35, 1e-12));
    }

    #[test]
    fn frequency_cancels() {
        let m = DragModel::default();
        for f in [1.0, 1e3, 1e6, 1e9, 3.3e7] {
            let lhs = drag_energy_per_joint(&m, f).unwrap() / f;
            let rhs = energy_time_product(&m).unwrap() / m.joints_per_op as f64;
            assert!(close(lhs, rhs, 1e-12));
        }
    }

    #[test]
    fn inertial_examples() {
        let r = inertial_analysis(&InertialModel::default()).unwrap();
        assert!(close(r.v_max, 6.28, 0.01));
        assert!(close(r.a_max, 3.95e9, 0.01));
        assert!(close(r.f_max, 3.56e-12, 0.01));
        assert!(close(r.deflection, 2.7e-13, 0.02));
        assert!(r.deflection < 1e-12);
        let still = inertial_analysis(&InertialModel { amplitude: 0.0, ..InertialModel::default() }).unwrap();
        assert_eq!((still.v_max, still.a_max, still.f_max, still.deflection), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn landauer_examples() {
        let (kt, kt2) = landauer_context(300.0).unwrap();
        assert!(close(kt, 4.14e-21, 0.001));
        assert!(close(kt, 4.1e-21, 0.02));
        assert!(close(kt2, 2.87e-21, 0.001));
        let ratio = drag_energy_per_joint(&DragModel::default(), 100e6).unwrap() / kt;
        assert!(close(ratio, 5.8e-7, 0.01));
        assert!(landauer_context(0.0).is_err());
    }

    #[test]
    fn mems_examples() {
        let big = mems_density(2.8e-2, 640e-6, 1070e-6, 2).unwrap();
        assert_eq!(big, 2288);
        assert!(((big as f64 - 2200.0) / 2200.0).abs() <= 0.05);
        assert_eq!(mems_density(1e-3, 1e-3, 1e-3, 2).unwrap(), 2);
        let quarter = mems_density(1.4e-2, 640e-6, 1070e-6, 2).unwrap();
        assert_eq!(quarter, 2 * (1.4e-2f64.powi(2) / (640e-6 * 1070e-6)).floor() as u64);
        assert!((quarter as f64 - big as f64 / 4.0).abs() <= 2.0);
    }
}
