//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const MAX_INTERVALS: usize = 4000;

// 15-point Kronrod abscissae (non-negative half) and weights; odd indices are
// the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: a vector space with a norm.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// A pair of complex values integrated together (shared abscissae).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pair(pub C64, pub C64);

impl Add for Pair {
    type Output = Pair;
    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

impl Sub for Pair {
    type Output = Pair;
    fn sub(self, o: Pair) -> Pair {
        Pair(self.0 - o.0, self.1 - o.1)
    }
}

impl Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, s: f64) -> Pair {
        Pair(self.0 * s, self.1 * s)
    }
}

impl Integrand for Pair {
    fn zero() -> Self {
        Pair(C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }
    fn magnitude(&self) -> f64 {
        self.0.norm().max(self.1.norm())
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn kronrod<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> Segment<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod = kronrod + sum * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + sum * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).magnitude();
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Bisects the segment with the largest error estimate until the summed
/// estimate drops below `tol`.
pub fn integrate<T: Integrand>(f: impl Fn(f64) -> T, a: f64, b: f64, tol: f64) -> Result<Quadrature<T>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!("integration limits [{a}, {b}] not finite")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("quadrature tolerance {tol} must be positive")));
    }
    if a == b {
        return Ok(Quadrature { value: T::zero(), error: 0.0, evaluations: 0 });
    }
    let mut segments = vec![kronrod(&f, a, b)];
    let mut evaluations = 15;
    loop {
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= tol || !error.is_finite() {
            let value = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
            if !error.is_finite() || !value.magnitude().is_finite() {
                return Err(Error::NumericalFailure {
                    message: format!("integrand not finite on [{a}, {b}]"),
                    estimate: error,
                });
            }
            return Ok(Quadrature { value, error, evaluations });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if segments.len() >= MAX_INTERVALS || mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            return Err(Error::NumericalFailure {
                message: format!("adaptive quadrature on [{a}, {b}] did not reach {tol:e}"),
                estimate: error,
            });
        }
        segments.push(kronrod(&f, seg.a, mid));
        segments.push(kronrod(&f, mid, seg.b));
        evaluations += 30;
    }
}

/// Composite Simpson rule with at least `points` subintervals (rounded up to even).
pub fn simpson<T: Integrand>(f: impl Fn(f64) -> T, a: f64, b: f64, points: usize) -> T {
    let n = (points.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum = sum + f(a + h * k as f64) * w;
    }
    sum * (h / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = integrate(|x: f64| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-12).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((q.value - exact).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_complex() {
        let w = 40.0;
        let q = integrate(|x: f64| C64::new(0.0, w * x).exp(), 0.0, 3.0, 1e-11).unwrap();
        let exact = (C64::new(0.0, w * 3.0).exp() - 1.0) / C64::new(0.0, w);
        assert!((q.value - exact).norm() < 1e-11);
        assert!(q.error <= 1e-11);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let f = |x: f64| x.exp();
        let fwd = integrate(f, 0.0, 1.0, 1e-12).unwrap().value;
        let back = integrate(f, 1.0, 0.0, 1e-12).unwrap().value;
        assert!((fwd + back).abs() < 1e-14);
    }

    #[test]
    fn singular_integrand_fails() {
        let r = integrate(|x: f64| 1.0 / x, -1.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::NumericalFailure { .. })));
    }

    #[test]
    fn simpson_on_sine() {
        let v = simpson(f64::sin, 0.0, std::f64::consts::PI, 1000);
        assert!((v - 2.0).abs() < 1e-11);
    }
}
