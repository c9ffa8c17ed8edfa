//! Dense complex operators for one and two qubits.
//!
//! Two-qubit states use the basis `|00⟩, |01⟩, |10⟩, |11⟩` with qubit A
//! (qubit 1) as the left tensor factor.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::eigen::hermitian_eigensystem;
use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Maximum entrywise anti-Hermitian part accepted for a density matrix.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Maximum trace deviation accepted for a density matrix.
pub const TRACE_TOL: f64 = 1e-6;
/// Default negative-eigenvalue tolerance for a density matrix.
pub const DEFAULT_TOL_NEG: f64 = 1e-6;

/// A square complex matrix of dimension 2 or 4, stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; 16],
}

/// Which qubit of a two-qubit system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::invalid(format!("matrix dimension {dim} not in {{2, 4}}")));
        }
        Ok(Self { dim, data: [ZERO; 16] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::invalid(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        Ok(m)
    }

    /// The projector `|v⟩⟨v|`; `v` is used as given (not normalized).
    pub fn projector(v: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(v.len())?;
        for i in 0..v.len() {
            for j in 0..v.len() {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries, `dim²` of them.
    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z = z.conj());
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// `self · other − other · self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    fn check_same_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        let n = self.dim;
        let mut out = ComplexMatrix { dim: n, data: [ZERO; 16] };
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        let mut out = *self;
        out.data.iter_mut().zip(rhs.data.iter()).for_each(|(a, b)| *a += b);
        out
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        let mut out = *self;
        out.data.iter_mut().zip(rhs.data.iter()).for_each(|(a, b)| *a -= b);
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(2).unwrap()
}

pub fn identity4() -> ComplexMatrix {
    ComplexMatrix::identity(4).unwrap()
}

fn mat2(a: C64, b: C64, c: C64, d: C64) -> ComplexMatrix {
    let mut m = ComplexMatrix { dim: 2, data: [ZERO; 16] };
    m.data[0] = a;
    m.data[1] = b;
    m.data[2] = c;
    m.data[3] = d;
    m
}

pub fn sigma_x() -> ComplexMatrix {
    mat2(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> ComplexMatrix {
    mat2(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> ComplexMatrix {
    mat2(ONE, ZERO, ZERO, -ONE)
}

/// Kronecker product `a ⊗ b` of two single-qubit operators.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != 2 || b.dim != 2 {
        return Err(Error::invalid(format!(
            "tensor product needs 2x2 factors, got {}x{} and {}x{}",
            a.dim, a.dim, b.dim, b.dim
        )));
    }
    let mut out = ComplexMatrix { dim: 4, data: [ZERO; 16] };
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Lifts a single-qubit operator onto `qubit` of the two-qubit space.
pub fn embed(op: &ComplexMatrix, qubit: Subsystem) -> Result<ComplexMatrix> {
    match qubit {
        Subsystem::A => tensor_product(op, &identity2()),
        Subsystem::B => tensor_product(&identity2(), op),
    }
}

/// Partial trace of a raw 4×4 operator, keeping `keep`.
pub fn partial_trace_matrix(m: &ComplexMatrix, keep: Subsystem) -> Result<ComplexMatrix> {
    if m.dim != 4 {
        return Err(Error::invalid(format!(
            "partial trace needs a 4x4 operator, got {}x{}",
            m.dim, m.dim
        )));
    }
    let mut out = ComplexMatrix { dim: 2, data: [ZERO; 16] };
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                Subsystem::A => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
                Subsystem::B => m[(i, j)] + m[(2 + i, 2 + j)],
            };
        }
    }
    Ok(out)
}

/// Reduced state of the kept qubit.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let reduced = partial_trace_matrix(rho.matrix(), keep)?;
    Ok(DensityMatrix::new_unchecked(reduced))
}

/// `exp(−i·angle·(axis·σ)/2)`.
pub fn su2_exponential(axis: [f64; 3], angle: f64) -> Result<ComplexMatrix> {
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("rotation axis has norm {norm}, expected 1")));
    }
    let (s, c) = (0.5 * angle).sin_cos();
    let [nx, ny, nz] = axis;
    // c·I − i s (n·σ)
    Ok(mat2(
        C64::new(c, -s * nz),
        C64::new(-s * ny, -s * nx),
        C64::new(s * ny, -s * nx),
        C64::new(c, s * nz),
    ))
}

/// A validated density matrix (Hermitian, unit trace, positive within tolerance).
///
/// The raw matrix is kept as supplied; small negative eigenvalues are only
/// clamped where logarithms are taken.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates with the default positivity tolerance.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_density_matrix(&m, DEFAULT_TOL_NEG)
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// Normalized pure state `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("state vector has zero or non-finite norm"));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::projector(&v)?)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim)?.scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigensystem(&self.matrix.hermitian_part())
            .expect("hermitian part is hermitian")
            .values
    }

    /// `⟨σ_i ⊗ σ_i⟩` for `i = x, y, z`.
    pub fn correlation_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 4 {
            return Err(Error::invalid("correlation vector needs a two-qubit state"));
        }
        let out = [sigma_x(), sigma_y(), sigma_z()].map(|s| {
            let ss = tensor_product(&s, &s).unwrap();
            (&self.matrix * &ss).trace().re
        });
        Ok(out)
    }
}

/// Checks Hermiticity, trace and positivity of `m`.
pub fn validate_density_matrix(m: &ComplexMatrix, tol_neg: f64) -> Result<DensityMatrix> {
    if m.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::StateCorruption("non-finite matrix entry".into()));
    }
    let herm = m.hermiticity_defect();
    if herm > HERMITICITY_TOL {
        return Err(Error::StateCorruption(format!(
            "hermiticity defect {herm:e} exceeds {HERMITICITY_TOL:e}"
        )));
    }
    let tr = m.trace();
    let trace_err = (tr - ONE).norm();
    if trace_err > TRACE_TOL {
        return Err(Error::StateCorruption(format!(
            "trace {:.12} deviates from 1 by {trace_err:e}",
            tr.re
        )));
    }
    let spectrum = hermitian_eigensystem(&m.hermitian_part())?;
    let min = spectrum.values.last().copied().unwrap_or(0.0);
    if min < -tol_neg {
        return Err(Error::PositivityViolation { eigenvalue: min });
    }
    Ok(DensityMatrix { matrix: *m })
}
