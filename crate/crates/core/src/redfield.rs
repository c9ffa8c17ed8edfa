//! Interaction-picture Redfield equation for two independently dephased qubits.
//!
//! The state appears outside the memory integral, so
//!
//! ```text
//! dρ_I/dt = Σ_i [Λ_i(t), ρ_I K_i(t)] + [K_i(t)† ρ_I, Λ_i(t)],
//! K_i(t)  = ∫₀ᵗ D(t − t′) Λ_i(t′) dt′,
//! ```
//!
//! is an ODE with time-dependent coefficients. Because `D` depends only on
//! the lag and `Λ_i` is a rotation at a fixed frequency, `K_i(t)` follows
//! from a handful of cumulative scalar moments that are advanced alongside
//! the fixed-step RK4 integration.

use num_complex::Complex64 as C64;

use crate::bath::{kernel_d, BathParams, Beta, KernelMoments};
use crate::control::{lambda_coefficients, u0_two_qubit, ControlSchedule};
use crate::error::{Error, Result};
use crate::operator::{
    embed, sigma_y, sigma_z, validate_density_matrix, ComplexMatrix, DensityMatrix, Subsystem,
};
use crate::quadrature::integrate;

/// Positivity tolerance applied to stored trajectory states.
pub const TRAJECTORY_TOL_NEG: f64 = 1e-4;

const STALE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub bath: BathParams,
    pub schedule: ControlSchedule,
    pub initial_state: DensityMatrix,
    pub t_final: f64,
    pub dt: f64,
    pub quad_tol: f64,
    pub sample_stride: usize,
}

impl SimulationConfig {
    /// Default step size, tolerance and stride.
    pub fn new(bath: BathParams, schedule: ControlSchedule, initial_state: DensityMatrix, t_final: f64) -> Self {
        Self {
            bath,
            schedule,
            initial_state,
            t_final,
            dt: 1e-3,
            quad_tol: 1e-10,
            sample_stride: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial_state.dim() != 4 {
            return Err(Error::invalid("initial state must be a two-qubit (4x4) state"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid(format!("step size {} must be positive", self.dt)));
        }
        let n_x = self.schedule.n_x();
        if n_x >= 1 {
            let max_dt = self.schedule.t_c() / (40.0 * n_x as f64);
            if self.dt > max_dt {
                return Err(Error::invalid(format!(
                    "step size {} does not resolve the drive (n_x = {n_x} needs dt <= {max_dt})",
                    self.dt
                )));
            }
        }
        if !(self.t_final >= self.dt) || !self.t_final.is_finite() {
            return Err(Error::invalid(format!(
                "final time {} must be at least one step ({})",
                self.t_final, self.dt
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::invalid("sample stride must be >= 1"));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::invalid(format!("quadrature tolerance {} must be positive", self.quad_tol)));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil() as usize
    }
}

/// Per-sample numerical health of the integrated state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
}

impl Diagnostics {
    pub fn of(m: &ComplexMatrix) -> Self {
        let spectrum = crate::eigen::hermitian_eigensystem(&m.hermitian_part())
            .expect("hermitian part is hermitian");
        Self {
            trace_error: (m.trace() - 1.0).norm(),
            min_eigenvalue: spectrum.values.last().copied().unwrap_or(0.0),
            hermiticity_defect: m.hermiticity_defect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states_interaction: Vec<DensityMatrix>,
    pub states_schrodinger: Vec<DensityMatrix>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_trace_error(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.trace_error).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.hermiticity_defect).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    /// Index of the sample closest to `t`.
    pub fn index_near(&self, t: f64) -> usize {
        let mut best = 0;
        for (k, &tk) in self.times.iter().enumerate() {
            if (tk - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }
}

/// Cumulative kernel moments needed for `K_i(t)`.
///
/// * `full`: `∫₀ᵗ D(u) du` (lag from time zero),
/// * `active`: cos/sin-modulated moments over the lag since turn-on,
/// * `active_lag`: unmodulated integral over the lag since turn-on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSet {
    pub full: KernelMoments,
    pub active: KernelMoments,
    pub active_lag: KernelMoments,
}

impl MomentSet {
    pub fn new(s: &ControlSchedule) -> Self {
        Self {
            full: KernelMoments::start(0.0),
            active: KernelMoments::start(s.t_on()),
            active_lag: KernelMoments::start(s.t_on()),
        }
    }

    /// Advances every moment that is relevant at `t`.
    pub fn advance_to(&self, t: f64, s: &ControlSchedule, p: &BathParams, quad_tol: f64) -> Result<Self> {
        let mut next = *self;
        next.full = self.full.advance(t, 0.0, p, quad_tol)?;
        if s.is_active(t) {
            next.active = self.active.advance(t, s.modulation_frequency(), p, quad_tol)?;
            if s.t_on() > 0.0 {
                next.active_lag = self.active_lag.advance(t, 0.0, p, quad_tol)?;
            }
        }
        Ok(next)
    }

    fn check_current(&self, t: f64, s: &ControlSchedule) -> Result<()> {
        let mut stale = (self.full.t - t).abs() > STALE_TOL;
        if s.is_active(t) {
            stale |= (self.active.t - t).abs() > STALE_TOL;
            if s.t_on() > 0.0 {
                stale |= (self.active_lag.t - t).abs() > STALE_TOL;
            }
        }
        if stale {
            return Err(Error::InternalConsistency(format!(
                "kernel moments at t = {} are stale for t = {t}",
                self.full.t
            )));
        }
        Ok(())
    }
}

/// Scalar coefficients `(k_z, k_y)` with `K_i(t) = k_z σ_z^{(i)} + k_y σ_y^{(i)}`.
pub fn memory_coefficients(t: f64, moments: &MomentSet, s: &ControlSchedule) -> Result<(C64, C64)> {
    moments.check_current(t, s)?;
    if !s.is_active(t) {
        return Ok((moments.full.a, C64::new(0.0, 0.0)));
    }
    let (cos, sin) = lambda_coefficients(t, s);
    let (a, b) = (moments.active.a, moments.active.b);
    let before_turn_on = if s.t_on() > 0.0 {
        moments.full.a - moments.active_lag.a
    } else {
        C64::new(0.0, 0.0)
    };
    let kz = a * cos + b * sin + before_turn_on;
    let ky = a * sin - b * cos;
    Ok((kz, ky))
}

/// `K_i(t) = ∫₀ᵗ D(t − t′) Λ_i(t′) dt′` on the given qubit.
pub fn memory_operator(
    t: f64,
    qubit: Subsystem,
    moments: &MomentSet,
    s: &ControlSchedule,
) -> Result<ComplexMatrix> {
    let (kz, ky) = memory_coefficients(t, moments, s)?;
    let single = &sigma_z().scale(kz) + &sigma_y().scale(ky);
    embed(&single, qubit)
}

/// `Σ_i [Λ_i, ρ K_i] + [K_i† ρ, Λ_i]`.
pub fn master_rhs(
    t: f64,
    rho_i: &ComplexMatrix,
    k_1: &ComplexMatrix,
    k_2: &ComplexMatrix,
    s: &ControlSchedule,
) -> ComplexMatrix {
    let (cz, cy) = lambda_coefficients(t, s);
    let lambda_single = &sigma_z().scale_real(cz) + &sigma_y().scale_real(cy);
    let mut out = ComplexMatrix::zeros(4).unwrap();
    for (qubit, k) in [(Subsystem::A, k_1), (Subsystem::B, k_2)] {
        let lambda = embed(&lambda_single, qubit).unwrap();
        let rho_k = rho_i * k;
        let kd_rho = &k.adjoint() * rho_i;
        out = &out + &lambda.commutator(&rho_k);
        out = &out + &kd_rho.commutator(&lambda);
    }
    out
}

fn rhs_at(t: f64, rho: &ComplexMatrix, moments: &MomentSet, s: &ControlSchedule) -> Result<ComplexMatrix> {
    let k1 = memory_operator(t, Subsystem::A, moments, s)?;
    let k2 = memory_operator(t, Subsystem::B, moments, s)?;
    Ok(master_rhs(t, rho, &k1, &k2, s))
}

fn axpy(y: &ComplexMatrix, a: f64, x: &ComplexMatrix) -> ComplexMatrix {
    y + &x.scale_real(a)
}

/// Integrates the master equation with fixed-step RK4.
pub fn evolve(cfg: &SimulationConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let s = &cfg.schedule;
    let p = &cfg.bath;
    let h = cfg.dt;
    let steps = cfg.steps();
    let capacity = steps / cfg.sample_stride + 1;
    let mut traj = Trajectory {
        times: Vec::with_capacity(capacity),
        states_interaction: Vec::with_capacity(capacity),
        states_schrodinger: Vec::with_capacity(capacity),
        diagnostics: Vec::with_capacity(capacity),
    };

    let mut rho = *cfg.initial_state.matrix();
    let mut moments = MomentSet::new(s);
    record(&mut traj, 0.0, &rho, s)?;

    for k in 0..steps {
        let t = k as f64 * h;
        let t_mid = t + 0.5 * h;
        let t_next = (k + 1) as f64 * h;

        let k1 = rhs_at(t, &rho, &moments, s)?;
        let mid = moments.advance_to(t_mid, s, p, cfg.quad_tol)?;
        let k2 = rhs_at(t_mid, &axpy(&rho, 0.5 * h, &k1), &mid, s)?;
        let k3 = rhs_at(t_mid, &axpy(&rho, 0.5 * h, &k2), &mid, s)?;
        let end = mid.advance_to(t_next, s, p, cfg.quad_tol)?;
        let k4 = rhs_at(t_next, &axpy(&rho, h, &k3), &end, s)?;

        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
        rho = axpy(&rho, h / 6.0, &incr);
        moments = end;

        if (k + 1) % cfg.sample_stride == 0 {
            record(&mut traj, t_next, &rho, s)?;
        }
    }
    Ok(traj)
}

fn record(traj: &mut Trajectory, t: f64, rho: &ComplexMatrix, s: &ControlSchedule) -> Result<()> {
    let diag = Diagnostics::of(rho);
    let state = validate_density_matrix(rho, TRAJECTORY_TOL_NEG).map_err(|e| match e {
        Error::PositivityViolation { eigenvalue } => Error::IntegrationAbort { time: t, eigenvalue },
        other => other.context(format!("state at t = {t}")),
    })?;
    let u = u0_two_qubit(t, s);
    let lab = DensityMatrix::new_unchecked(rho.conjugate_by(&u));
    traj.times.push(t);
    traj.states_interaction.push(state);
    traj.states_schrodinger.push(lab);
    traj.diagnostics.push(diag);
    Ok(())
}

/// Closed-form single-qubit coherence `2|ρ₀₁(t)|` of the undriven model,
/// starting from a maximally coherent qubit.
///
/// Zero temperature: `(1 + ω_c² t²)^{−2η}`. Finite temperature:
/// `exp(−4 ∫₀ᵗ (t − u) Re D(u) du)`, evaluated by adaptive quadrature.
pub fn dephasing_oracle_coherence(t: f64, p: &BathParams) -> Result<f64> {
    match p.beta() {
        Beta::Infinite => Ok((1.0 + (p.omega_c() * t).powi(2)).powf(-2.0 * p.eta())),
        Beta::Finite(_) => {
            let q = integrate(|u| (t - u) * kernel_d(u, p).re, 0.0, t, 1e-12)?;
            Ok((-4.0 * q.value).exp())
        }
    }
}
