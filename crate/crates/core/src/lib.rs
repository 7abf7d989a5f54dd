//! Simulation and analysis of mechanical logic built only from rigid links and
//! rotary joints.

pub mod cli;
pub mod kinematics;
pub mod energy;
pub mod gates;
pub mod primitives;
pub mod sequential;
