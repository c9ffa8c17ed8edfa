//! Ohmic dephasing bath: spectral density, occupation numbers and the
//! closed-form correlation kernel `D(u)`, plus cumulative kernel moments.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Pair};
use crate::trigamma::trigamma;

/// Inverse temperature `β = 1/T`, with zero temperature kept as its own case.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    /// `β = 1/T`; `T = 0` maps to [`Beta::Infinite`].
    pub fn from_temperature(temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::invalid(format!("temperature {temperature} must be finite and >= 0")));
        }
        Ok(if temperature == 0.0 {
            Beta::Infinite
        } else {
            Beta::Finite(1.0 / temperature)
        })
    }

    pub fn temperature(&self) -> f64 {
        match *self {
            Beta::Finite(b) => 1.0 / b,
            Beta::Infinite => 0.0,
        }
    }
}

/// Parameters of the ohmic spectral density `J(ω) = η ω e^{−ω/ω_c}` and the bath temperature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    eta: f64,
    omega_c: f64,
    beta: Beta,
}

impl BathParams {
    pub fn new(eta: f64, omega_c: f64, beta: Beta) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::invalid(format!("damping constant {eta} must be positive")));
        }
        if !(omega_c > 0.0) || !omega_c.is_finite() {
            return Err(Error::invalid(format!("cutoff frequency {omega_c} must be positive")));
        }
        if let Beta::Finite(b) = beta {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::invalid(format!("inverse temperature {b} must be positive")));
            }
        }
        Ok(Self { eta, omega_c, beta })
    }

    pub fn with_temperature(eta: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        Self::new(eta, omega_c, Beta::from_temperature(temperature)?)
    }

    /// `η = 1/16`, `ω_c = 2π`, zero temperature.
    pub fn reference() -> Self {
        Self {
            eta: 1.0 / 16.0,
            omega_c: 2.0 * std::f64::consts::PI,
            beta: Beta::Infinite,
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn temperature(&self) -> f64 {
        self.beta.temperature()
    }
}

/// `J(ω) = η ω e^{−ω/ω_c}` for `ω ≥ 0`.
pub fn spectral_density(omega: f64, p: &BathParams) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::invalid(format!("spectral density needs omega >= 0, got {omega}")));
    }
    Ok(p.eta * omega * (-omega / p.omega_c).exp())
}

/// Bose–Einstein occupation `1/(e^{βω} − 1)`.
pub fn occupation(omega: f64, p: &BathParams) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invalid(format!("occupation needs omega > 0, got {omega}")));
    }
    Ok(match p.beta {
        Beta::Infinite => 0.0,
        Beta::Finite(b) => 1.0 / (b * omega).exp_m1(),
    })
}

/// Bath correlation kernel at time lag `u`:
/// `η ω_c² / (1 + i ω_c u)² + (2η/β²) Re ψ₁(1 + 1/(β ω_c) − i u/β)`.
pub fn kernel_d(u: f64, p: &BathParams) -> C64 {
    let denom = C64::new(1.0, p.omega_c * u);
    let vacuum = C64::new(p.eta * p.omega_c * p.omega_c, 0.0) / (denom * denom);
    match p.beta {
        Beta::Infinite => vacuum,
        Beta::Finite(b) => {
            let z = C64::new(1.0 + 1.0 / (b * p.omega_c), -u / b);
            // Re z > 1, never a pole
            let psi = trigamma(z).expect("trigamma argument has Re > 1");
            vacuum + 2.0 * p.eta / (b * b) * psi.re
        }
    }
}

/// Cumulative moments `A = ∫ D(u) cos(Ω u) du`, `B = ∫ D(u) sin(Ω u) du`
/// over the lag range `u ∈ [0, t − segment_origin]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelMoments {
    pub t: f64,
    pub a: C64,
    pub b: C64,
    pub segment_origin: f64,
}

impl KernelMoments {
    /// Empty moments of a segment starting at `origin`.
    pub fn start(origin: f64) -> Self {
        Self {
            t: origin,
            a: C64::new(0.0, 0.0),
            b: C64::new(0.0, 0.0),
            segment_origin: origin,
        }
    }

    pub fn lag(&self) -> f64 {
        self.t - self.segment_origin
    }

    /// Extends the moments to `t_next` by adaptive quadrature.
    pub fn advance(
        &self,
        t_next: f64,
        modulation_frequency: f64,
        p: &BathParams,
        quad_tol: f64,
    ) -> Result<Self> {
        advance_moments(self, t_next, modulation_frequency, p, quad_tol)
    }
}

pub fn advance_moments(
    m: &KernelMoments,
    t_next: f64,
    modulation_frequency: f64,
    p: &BathParams,
    quad_tol: f64,
) -> Result<KernelMoments> {
    if t_next < m.t {
        return Err(Error::invalid(format!(
            "moments cannot move backwards ({} -> {t_next})",
            m.t
        )));
    }
    if t_next == m.t {
        return Ok(*m);
    }
    let u0 = m.t - m.segment_origin;
    let u1 = t_next - m.segment_origin;
    let omega = modulation_frequency;
    let q = if omega == 0.0 {
        integrate(|u| Pair(kernel_d(u, p), C64::new(0.0, 0.0)), u0, u1, quad_tol)
    } else {
        integrate(
            |u| {
                let d = kernel_d(u, p);
                let (s, c) = (omega * u).sin_cos();
                Pair(d * c, d * s)
            },
            u0,
            u1,
            quad_tol,
        )
    }
    .map_err(|e| e.context(format!("kernel moments on lag [{u0}, {u1}]")))?;
    Ok(KernelMoments {
        t: t_next,
        a: m.a + q.value.0,
        b: m.b + q.value.1,
        segment_origin: m.segment_origin,
    })
}

/// `∫₀ᵗ D(u) du` at zero temperature, `i η ω_c (1/(1 + i ω_c t) − 1)`.
pub fn vacuum_kernel_integral(t: f64, p: &BathParams) -> C64 {
    let i = C64::new(0.0, 1.0);
    i * p.eta * p.omega_c * (C64::new(1.0, p.omega_c * t).inv() - 1.0)
}
