//! Correlation measures for two-qubit states: von Neumann entropy,
//! superfidelity, concurrence, mutual information, classical correlation and
//! quantum discord. Entropies are in bits.
//!
//! Classical correlation and discord use rank-one projective measurements on
//! qubit B, parametrized by the Bloch direction `(θ, φ)` of the projectors.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::eigen::hermitian_eigensystem;
use crate::error::{Error, Result};
use crate::operator::{
    identity4, partial_trace_matrix, sigma_x, sigma_y, sigma_z, tensor_product, ComplexMatrix,
    DensityMatrix, Subsystem,
};
use crate::simplex::{minimize, NelderMeadSettings};

/// Negative eigenvalues above this are treated as zero inside logarithms.
pub const ENTROPY_TOL_NEG: f64 = 1e-6;
/// Outcome probabilities below this contribute nothing to conditional entropy.
const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    /// Maps any angle pair onto `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn normalized(theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(2.0 * PI);
        let mut phi = phi;
        if theta > PI {
            theta = 2.0 * PI - theta;
            phi += PI;
        }
        Self {
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        }
    }

    /// Unit Bloch vector `n` of the `+` outcome.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Projectors `Π± = (I ± n·σ)/2`.
    pub fn projectors(&self) -> [ComplexMatrix; 2] {
        let [x, y, z] = self.direction();
        let n_sigma = &(&sigma_x().scale_real(x) + &sigma_y().scale_real(y)) + &sigma_z().scale_real(z);
        let id = crate::operator::identity2();
        [
            (&id + &n_sigma).scale_real(0.5),
            (&id - &n_sigma).scale_real(0.5),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordResult {
    pub discord: f64,
    pub classical_correlation: f64,
    pub mutual_information: f64,
    pub optimal_basis: MeasurementBasis,
}

/// Grid search followed by simplex refinement.
#[derive(Clone, Copy, Debug)]
pub struct OptimizerSettings {
    pub grid_theta: usize,
    pub grid_phi: usize,
    /// Number of best grid points refined with Nelder–Mead.
    pub refine_starts: usize,
    pub simplex: NelderMeadSettings,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            grid_theta: 32,
            grid_phi: 64,
            refine_starts: 3,
            simplex: NelderMeadSettings::default(),
        }
    }
}

fn clamped_entropy(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &v in values {
        if v < -ENTROPY_TOL_NEG {
            return Err(Error::PositivityViolation { eigenvalue: v });
        }
        if v > 0.0 {
            s -= v * v.log2();
        }
    }
    Ok(s.max(0.0))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    clamped_entropy(&rho.eigenvalues())
}

/// `Tr(ρσ) + √(1 − Tr ρ²) √(1 − Tr σ²)`.
pub fn superfidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::invalid(format!(
            "superfidelity of states with dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let overlap = (rho.matrix() * sigma.matrix()).trace().re;
    // rounding can push the purity of a pure state just above one
    let radicand = |p: f64| (1.0 - p).max(0.0);
    let (ra, rb) = (radicand(rho.purity()), radicand(sigma.purity()));
    Ok(overlap + ra.sqrt() * rb.sqrt())
}

/// The spin-flipped state `(σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    let yy = tensor_product(&sigma_y(), &sigma_y()).unwrap();
    &(&yy * &rho.conj()) * &yy
}

/// `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`, whose eigenvalues are the squared concurrence weights.
pub fn concurrence_matrix(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != 4 {
        return Err(Error::invalid("concurrence needs a two-qubit state"));
    }
    Ok(rho.matrix() * &spin_flip(rho.matrix()))
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
///
/// The `λ_i²` are the eigenvalues of `ρ ρ̃`; they are obtained from the
/// similar Hermitian matrix `√ρ ρ̃ √ρ`, which stays well conditioned when `ρ`
/// is rank deficient.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::invalid("concurrence needs a two-qubit state"));
    }
    let spectrum = hermitian_eigensystem(&rho.matrix().hermitian_part())?;
    if let Some(&min) = spectrum.values.last() {
        if min < -ENTROPY_TOL_NEG {
            return Err(Error::PositivityViolation { eigenvalue: min });
        }
    }
    let sqrt_rho = spectrum.map_spectrum(|v| v.max(0.0).sqrt());
    let flipped = spin_flip(rho.matrix());
    let m = (&(&sqrt_rho * &flipped) * &sqrt_rho).hermitian_part();
    let mut lambdas: Vec<f64> = hermitian_eigensystem(&m)?
        .values
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(c.clamp(0.0, 1.0))
}

/// `S(ρ_A) + S(ρ_B) − S(ρ_AB)`.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::invalid("mutual information needs a two-qubit state"));
    }
    let sa = entropy_2x2(&partial_trace_matrix(rho.matrix(), Subsystem::A)?)?;
    let sb = entropy_2x2(&partial_trace_matrix(rho.matrix(), Subsystem::B)?)?;
    let sab = von_neumann_entropy(rho)?;
    let i = sa + sb - sab;
    if i < -1e-9 {
        return Err(Error::NumericalFailure {
            message: "negative mutual information".into(),
            estimate: i,
        });
    }
    Ok(i.max(0.0))
}

/// Eigenvalues of a Hermitian 2×2 block, larger first.
fn eigenvalues_2x2(m: &ComplexMatrix) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let mean = 0.5 * (a + d);
    let r = (0.5 * (a - d)).hypot(m[(0, 1)].norm());
    [mean + r, mean - r]
}

fn entropy_2x2(m: &ComplexMatrix) -> Result<f64> {
    clamped_entropy(&eigenvalues_2x2(m))
}

/// Precomputed pieces of the measurement-on-B problem for a fixed state.
///
/// For projectors `Π± = (I ± n·σ)/2` on B, the unnormalized conditional
/// states of A are `(ρ_A ± n·M)/2` with `M_j = Tr_B[(I⊗σ_j) ρ]`.
struct ConditionalStates {
    rho_a: ComplexMatrix,
    m: [ComplexMatrix; 3],
    s_a: f64,
}

impl ConditionalStates {
    fn new(rho: &DensityMatrix) -> Result<Self> {
        let rho_a = partial_trace_matrix(rho.matrix(), Subsystem::A)?;
        let m = [sigma_x(), sigma_y(), sigma_z()].map(|s| {
            let lifted = tensor_product(&crate::operator::identity2(), &s).unwrap();
            partial_trace_matrix(&(&lifted * rho.matrix()), Subsystem::A).unwrap()
        });
        let s_a = entropy_2x2(&rho_a)?;
        Ok(Self { rho_a, m, s_a })
    }

    /// `S_A − Σ_k p_k S(ρ_{A|k})` for the measurement along `(θ, φ)`.
    fn information_gain(&self, theta: f64, phi: f64) -> f64 {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let n = [st * cp, st * sp, ct];
        let mut projected = [[C64::new(0.0, 0.0); 3]; 1];
        // n·M, only the three independent entries are needed
        for (j, nj) in n.iter().enumerate() {
            projected[0][0] += self.m[j][(0, 0)] * *nj;
            projected[0][1] += self.m[j][(0, 1)] * *nj;
            projected[0][2] += self.m[j][(1, 1)] * *nj;
        }
        let [nm00, nm01, nm11] = projected[0];
        let mut conditional = 0.0;
        for sign in [1.0, -1.0] {
            let x00 = 0.5 * (self.rho_a[(0, 0)].re + sign * nm00.re);
            let x11 = 0.5 * (self.rho_a[(1, 1)].re + sign * nm11.re);
            let x01 = (self.rho_a[(0, 1)] + nm01 * sign) * 0.5;
            let p = x00 + x11;
            if p < NEGLIGIBLE_PROBABILITY {
                continue;
            }
            let r = (0.5 * (x00 - x11)).hypot(x01.norm());
            let mean = 0.5 * p;
            for mu in [mean + r, mean - r] {
                let q = mu / p;
                if q > 0.0 {
                    conditional -= mu * q.log2();
                }
            }
        }
        self.s_a - conditional
    }
}

/// Maximal information about A gained by a projective measurement on B,
/// with the optimal measurement direction.
pub fn classical_correlation(
    rho: &DensityMatrix,
    opt: &OptimizerSettings,
) -> Result<(f64, MeasurementBasis)> {
    if rho.dim() != 4 {
        return Err(Error::invalid("classical correlation needs a two-qubit state"));
    }
    if opt.grid_theta < 2 || opt.grid_phi < 1 {
        return Err(Error::invalid("measurement grid needs >= 2 polar and >= 1 azimuthal points"));
    }
    let problem = ConditionalStates::new(rho)?;
    let d_theta = PI / (opt.grid_theta - 1) as f64;
    let d_phi = 2.0 * PI / opt.grid_phi as f64;

    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(opt.grid_theta * opt.grid_phi);
    for i in 0..opt.grid_theta {
        let theta = d_theta * i as f64;
        for j in 0..opt.grid_phi {
            let phi = d_phi * j as f64;
            grid.push((problem.information_gain(theta, phi), theta, phi));
        }
    }
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut best, mut best_theta, mut best_phi) = grid[0];

    let mut any_converged = opt.refine_starts == 0;
    for &(_, theta, phi) in grid.iter().take(opt.refine_starts) {
        let result = minimize(
            |x| -problem.information_gain(x[0], x[1]),
            &[theta, phi],
            &[0.5 * d_theta, 0.5 * d_phi],
            &opt.simplex,
        );
        any_converged |= result.converged;
        if -result.value > best {
            best = -result.value;
            best_theta = result.point[0];
            best_phi = result.point[1];
        }
    }
    if !any_converged {
        return Err(Error::NumericalFailure {
            message: format!("measurement optimization did not converge (best value {best})"),
            estimate: best,
        });
    }
    Ok((best.max(0.0), MeasurementBasis::normalized(best_theta, best_phi)))
}

/// Quantum discord with measurement on qubit B.
pub fn quantum_discord(rho: &DensityMatrix, opt: &OptimizerSettings) -> Result<DiscordResult> {
    let mutual = mutual_information(rho)?;
    let (classical, basis) = classical_correlation(rho, opt)?;
    let raw = mutual - classical;
    if raw < -1e-8 {
        return Err(Error::NumericalFailure {
            message: "classical correlation exceeds mutual information".into(),
            estimate: raw,
        });
    }
    let classical = classical.min(mutual);
    Ok(DiscordResult {
        discord: mutual - classical,
        classical_correlation: classical,
        mutual_information: mutual,
        optimal_basis: basis,
    })
}

/// Bell-basis weights `(Φ⁺, Φ⁻, Ψ⁺, Ψ⁻)` of the Bell-diagonal state with correlations `c`.
pub fn bell_weights(c: [f64; 3]) -> [f64; 4] {
    let [c1, c2, c3] = c;
    [
        0.25 * (1.0 + c1 - c2 + c3),
        0.25 * (1.0 - c1 + c2 + c3),
        0.25 * (1.0 + c1 + c2 - c3),
        0.25 * (1.0 - c1 - c2 - c3),
    ]
}

/// `(I + Σ c_i σ_i⊗σ_i)/4`.
pub fn bell_diagonal_state(c: [f64; 3]) -> Result<DensityMatrix> {
    if bell_weights(c).iter().any(|&w| w < -1e-12) {
        return Err(Error::invalid(format!("correlation vector {c:?} is not a valid state")));
    }
    let mut m = identity4();
    for (ci, s) in c.iter().zip([sigma_x(), sigma_y(), sigma_z()]) {
        m = &m + &tensor_product(&s, &s)?.scale_real(*ci);
    }
    DensityMatrix::new(m.scale_real(0.25))
}

/// Closed-form discord of a Bell-diagonal state.
pub fn bell_diagonal_discord_oracle(c1: f64, c2: f64, c3: f64) -> Result<f64> {
    let weights = bell_weights([c1, c2, c3]);
    if weights.iter().any(|&w| w < -1e-12) || [c1, c2, c3].iter().any(|c| c.abs() > 1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "correlation vector ({c1}, {c2}, {c3}) is not a valid Bell-diagonal state"
        )));
    }
    let xlogx = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    let mutual = 2.0 + weights.iter().map(|&w| xlogx(w)).sum::<f64>();
    let chi = c1.abs().max(c2.abs()).max(c3.abs()).min(1.0);
    let classical = 0.5 * (xlogx(1.0 - chi) + xlogx(1.0 + chi));
    Ok((mutual - classical).max(0.0))
}
