//! Trigamma function `ψ₁(z) = Σ_{n≥0} (z+n)⁻²` on the complex plane.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Real part threshold above which the asymptotic series is used.
const ASYMPTOTIC_RE: f64 = 12.0;

// B₂ₖ for k = 1..=7
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Evaluates `ψ₁(z)`; poles at `z = 0, −1, −2, …` are a domain error.
pub fn trigamma(z: C64) -> Result<C64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("trigamma of non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Domain(format!("trigamma pole at {}", z.re)));
    }
    let mut shifted = z;
    let mut acc = C64::new(0.0, 0.0);
    // ψ₁(z) = ψ₁(z+1) + 1/z²
    while shifted.re < ASYMPTOTIC_RE {
        acc += (shifted * shifted).inv();
        shifted += 1.0;
    }
    Ok(acc + asymptotic(shifted))
}

/// `1/z + 1/(2z²) + Σ B₂ₖ / z^{2k+1}`.
fn asymptotic(z: C64) -> C64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut term = inv * inv2;
    let mut series = C64::new(0.0, 0.0);
    for b in BERNOULLI {
        series += term * b;
        term *= inv2;
    }
    inv + inv2 * 0.5 + series
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn basel_and_recurrence() {
        let one = trigamma(C64::new(1.0, 0.0)).unwrap();
        assert!((one.re - PI * PI / 6.0).abs() < 1e-15);
        assert_eq!(one.im, 0.0);
        let two = trigamma(C64::new(2.0, 0.0)).unwrap();
        assert!((two.re - (PI * PI / 6.0 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn half_integer_value() {
        // ψ₁(1/2) = π²/2
        let v = trigamma(C64::new(0.5, 0.0)).unwrap();
        assert!((v.re - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn reflection_formula() {
        // ψ₁(1−z) + ψ₁(z) = π² / sin²(πz)
        for z in [C64::new(0.3, 0.7), C64::new(-2.4, 1.1), C64::new(0.9, -0.2)] {
            let lhs = trigamma(C64::new(1.0, 0.0) - z).unwrap() + trigamma(z).unwrap();
            let s = (z * PI).sin();
            let rhs = C64::new(PI * PI, 0.0) / (s * s);
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm(), "{z}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let z = C64::new(1.3, -4.2);
        let a = trigamma(z).unwrap();
        let b = trigamma(z.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-16);
    }

    #[test]
    fn poles_are_rejected() {
        for p in [0.0, -1.0, -7.0] {
            assert!(matches!(trigamma(C64::new(p, 0.0)), Err(Error::Domain(_))));
        }
        assert!(trigamma(C64::new(-1.0, 1e-3)).is_ok());
    }
}
