//! Two-qubit open-system dynamics under continuous dynamical decoupling.
//!
//! Each qubit couples through `σ_z` to its own ohmic boson bath. A continuous
//! `σ_x` drive of amplitude `n_x ω` rotates the coupling operators, and the
//! second-order (Redfield) interaction-picture master equation is integrated
//! as a time-local ODE whose memory operators are assembled from cumulative
//! moments of the bath kernel. Along each trajectory the crate evaluates
//! superfidelity, concurrence and quantum discord, and extracts the
//! sudden-transition and effectiveness times of the discord curves.
//!
//! Units: `ħ = k_B = 1`, time in units of `τ = 1`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail these checks
#![allow(clippy::excessive_precision)]

pub mod bath;
pub mod control;
pub mod eigen;
pub mod error;
pub mod io;
pub mod measures;
pub mod operator;
pub mod quadrature;
pub mod redfield;
pub mod scenario;
pub mod simplex;
pub mod trigamma;

pub use bath::{BathParams, KernelMoments};
pub use control::ControlSchedule;
pub use error::{Error, Result};
pub use measures::{DiscordResult, MeasurementBasis, OptimizerSettings};
pub use operator::{ComplexMatrix, DensityMatrix, Subsystem};
pub use redfield::{SimulationConfig, Trajectory};
pub use scenario::{RunRecord, RunSettings, Scenario};

pub use num_complex::Complex64 as C64;
