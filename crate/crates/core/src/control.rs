//! Continuous decoupling drive `H₀ = n_x ω (σ_x⊗I + I⊗σ_x)` and the rotated
//! coupling operators `Λ_i(t) = U₀†(t) σ_z^{(i)} U₀(t)`.
//!
//! The drive is off before `t_on` and its phase restarts from zero at `t_on`.
//! Sign convention: `e^{iθσ_x} σ_z e^{−iθσ_x} = cos 2θ σ_z + sin 2θ σ_y`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigen::hermitian_eigensystem;
use crate::error::{Error, Result};
use crate::operator::{
    embed, identity4, sigma_y, sigma_z, su2_exponential, tensor_product, ComplexMatrix, Subsystem,
};
use crate::quadrature::simpson;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    n_x: u32,
    t_c: f64,
    t_on: f64,
}

impl ControlSchedule {
    pub fn new(n_x: u32, t_c: f64, t_on: f64) -> Result<Self> {
        if !(t_c > 0.0) || !t_c.is_finite() {
            return Err(Error::invalid(format!("control period {t_c} must be positive")));
        }
        if !(t_on >= 0.0) || t_on.is_nan() {
            return Err(Error::invalid(format!("turn-on time {t_on} must be >= 0")));
        }
        Ok(Self { n_x, t_c, t_on })
    }

    /// No drive at all.
    pub fn unprotected(t_c: f64) -> Result<Self> {
        Self::new(0, t_c, 0.0)
    }

    pub fn n_x(&self) -> u32 {
        self.n_x
    }

    pub fn t_c(&self) -> f64 {
        self.t_c
    }

    pub fn t_on(&self) -> f64 {
        self.t_on
    }

    /// `ω = 2π / t_c`.
    pub fn omega(&self) -> f64 {
        2.0 * PI / self.t_c
    }

    /// Angular frequency `2 n_x ω` at which `Λ_i` rotates.
    pub fn modulation_frequency(&self) -> f64 {
        2.0 * self.n_x as f64 * self.omega()
    }

    /// Whether the drive acts at time `t`.
    pub fn is_active(&self, t: f64) -> bool {
        self.n_x > 0 && t >= self.t_on
    }

    /// Time elapsed since turn-on (zero before).
    pub fn elapsed(&self, t: f64) -> f64 {
        if self.is_active(t) {
            t - self.t_on
        } else {
            0.0
        }
    }
}

/// `(c_z, c_y)` with `Λ_i(t) = c_z σ_z^{(i)} + c_y σ_y^{(i)}`.
pub fn lambda_coefficients(t: f64, s: &ControlSchedule) -> (f64, f64) {
    if !s.is_active(t) {
        return (1.0, 0.0);
    }
    let (sin, cos) = (s.modulation_frequency() * s.elapsed(t)).sin_cos();
    (cos, sin)
}

/// `Λ_i(t)` as a 4×4 operator on `qubit`.
pub fn lambda_operator(t: f64, qubit: Subsystem, s: &ControlSchedule) -> ComplexMatrix {
    let (cz, cy) = lambda_coefficients(t, s);
    let single = &sigma_z().scale_real(cz) + &sigma_y().scale_real(cy);
    embed(&single, qubit).expect("2x2 factor")
}

/// Single-qubit factor `exp(−i n_x ω (t − t_on) σ_x)`.
pub fn u0_single_qubit(t: f64, s: &ControlSchedule) -> ComplexMatrix {
    let angle = s.modulation_frequency() * s.elapsed(t);
    su2_exponential([1.0, 0.0, 0.0], angle).expect("unit axis")
}

/// `U₀(t) = exp(−i H₀ (t − t_on))` for `t ≥ t_on`, identity before.
pub fn u0_two_qubit(t: f64, s: &ControlSchedule) -> ComplexMatrix {
    if !s.is_active(t) {
        return identity4();
    }
    let u = u0_single_qubit(t, s);
    tensor_product(&u, &u).expect("2x2 factors")
}

/// Operator norm of `(1/t_c) ∫₀^{t_c} U₀†(t)(σ_z⊗I)U₀(t) dt` by composite Simpson.
pub fn decoupling_residual(s: &ControlSchedule, quad_points: usize) -> Result<f64> {
    residual_for_multiplier(s.n_x as f64, s.t_c, quad_points)
}

/// Same as [`decoupling_residual`] for an arbitrary real field multiplier.
pub(crate) fn residual_for_multiplier(multiplier: f64, t_c: f64, quad_points: usize) -> Result<f64> {
    if quad_points < 64 {
        return Err(Error::invalid(format!("need at least 64 quadrature points, got {quad_points}")));
    }
    let rate = 2.0 * multiplier * 2.0 * PI / t_c;
    let mean_z = simpson(|t| (rate * t).cos(), 0.0, t_c, quad_points) / t_c;
    let mean_y = simpson(|t| (rate * t).sin(), 0.0, t_c, quad_points) / t_c;
    let avg = &embed(&sigma_z(), Subsystem::A)?.scale_real(mean_z)
        + &embed(&sigma_y(), Subsystem::A)?.scale_real(mean_y);
    let spectrum = hermitian_eigensystem(&avg)?;
    Ok(spectrum.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}
