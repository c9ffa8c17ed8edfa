//! Fixed-size eigensolvers for 2×2 and 4×4 complex matrices.
//!
//! Hermitian problems use a closed form at dimension 2 and cyclic complex
//! Jacobi rotations at dimension 4. General (non-normal) spectra come from a
//! Householder reduction to Hessenberg form followed by Wilkinson-shifted
//! complex QR sweeps.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::ComplexMatrix;

/// Hermiticity required of the input to [`hermitian_eigensystem`].
pub const HERMITIAN_INPUT_TOL: f64 = 1e-8;

const MAX_JACOBI_SWEEPS: usize = 64;
const MAX_QR_ITERATIONS: usize = 300;

/// Spectrum of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Matrix whose columns are the orthonormal eigenvectors, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        let n = self.vectors.dim();
        (0..n).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `Σ f(λ_k) v_k v_k†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mut out = ComplexMatrix::zeros(n).unwrap();
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * w;
                }
            }
        }
        out
    }
}

pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    let defect = m.hermiticity_defect();
    let scale = m.frobenius_norm().max(1.0);
    if !defect.is_finite() || defect > HERMITIAN_INPUT_TOL * scale {
        return Err(Error::invalid(format!(
            "matrix is not hermitian (defect {defect:e})"
        )));
    }
    let h = m.hermitian_part();
    let (values, vectors) = match h.dim() {
        2 => hermitian_2x2(&h),
        _ => jacobi(&h),
    };
    Ok(sorted_descending(values, vectors))
}

fn hermitian_2x2(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    let (l1, l2) = (mean + r, mean - r);
    let mut v = ComplexMatrix::identity(2).unwrap();
    if b.norm() > 0.0 {
        // (b, λ₁ − a) or (λ₁ − d, b*) are both eigenvectors of λ₁; pick the larger
        let (x, y) = if half >= 0.0 {
            (C64::new(l1 - d, 0.0), b.conj())
        } else {
            (b, C64::new(l1 - a, 0.0))
        };
        let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (x, y) = (x / n, y / n);
        v[(0, 0)] = x;
        v[(1, 0)] = y;
        v[(0, 1)] = -y.conj();
        v[(1, 1)] = x.conj();
    }
    (vec![l1, l2], v)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.dim();
    let mut a = *h;
    let mut v = ComplexMatrix::identity(n).unwrap();
    let scale = h.frobenius_norm();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }
    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-17 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                // A ← A G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                // A ← G† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

fn sorted_descending(values: Vec<f64>, vectors: ComplexMatrix) -> Eigensystem {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let mut sorted = vectors;
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            sorted[(i, new)] = vectors[(i, old)];
        }
    }
    Eigensystem {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: sorted,
    }
}

/// Eigenvalues of an arbitrary 4×4 (or 2×2) complex matrix, unordered.
pub fn general_eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = m.dim();
    let mut h = hessenberg(m);
    let mut eigs = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iterations = 0;
    loop {
        if hi == 0 {
            eigs[0] = h[(0, 0)];
            break;
        }
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let floor = if diag == 0.0 { f64::MIN_POSITIVE } else { f64::EPSILON * diag };
            if sub <= floor {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs[hi] = h[(hi, hi)];
            hi -= 1;
            iterations = 0;
            continue;
        }
        iterations += 1;
        if iterations > MAX_QR_ITERATIONS {
            return Err(Error::NumericalFailure {
                message: "complex QR iteration did not converge".into(),
                estimate: h[(hi, hi - 1)].norm(),
            });
        }
        let shift = if iterations % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok(eigs)
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicitly shifted QR step on the block `lo..=hi`.
fn qr_sweep(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
        } else {
            (x / r, y / r)
        };
        for j in k..=hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = c.conj() * a + s.conj() * b;
            h[(k + 1, j)] = -s * a + c * b;
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + b * s;
            h[(i, k + 1)] = -a * s.conj() + b * c.conj();
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let mut h = *m;
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0].norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x.clone();
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= vnorm);
        // H ← (I − 2vv†) H
        for j in 0..n {
            let dot: C64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= v[i] * dot * 2.0;
            }
        }
        // H ← H (I − 2vv†)
        for i in 0..n {
            let dot: C64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= dot * v[j].conj() * 2.0;
            }
        }
    }
    h
}
