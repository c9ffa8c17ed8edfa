//! Nelder–Mead downhill simplex minimization.

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadSettings {
    /// Stop once the spread of simplex values falls below this.
    pub value_tol: f64,
    /// Stop once the simplex diameter falls below this.
    pub point_tol: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadSettings {
    fn default() -> Self {
        Self {
            value_tol: 1e-10,
            point_tol: 1e-9,
            max_iterations: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` from `start`, building the initial simplex from one step of
/// size `steps[i]` along each coordinate. The best vertex never gets worse,
/// so the returned value is at most `f(start)`.
pub fn minimize(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    steps: &[f64],
    settings: &NelderMeadSettings,
) -> Minimum {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += steps[i];
        let v = f(&p);
        simplex.push((p, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < settings.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| distance(p, &simplex[0].0))
            .fold(0.0, f64::max);
        if spread <= settings.value_tol || diameter <= settings.point_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(p, _)| p[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = along(REFLECT);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(EXPAND);
            let fe = f(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < worst.1 {
                let p = along(CONTRACT * REFLECT);
                let v = f(&p);
                (p, v)
            } else {
                let p = along(-CONTRACT);
                let v = f(&p);
                (p, v)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let p: Vec<f64> = best
                        .iter()
                        .zip(&vertex.0)
                        .map(|(b, x)| b + SHRINK * (x - b))
                        .collect();
                    let v = f(&p);
                    *vertex = (p, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    Minimum {
        point,
        value,
        iterations,
        converged,
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let m = minimize(f, &[0.0, 0.0], &[0.3, 0.3], &NelderMeadSettings::default());
        assert!(m.converged);
        assert!(m.value < 1e-9);
        assert!((m.point[0] - 1.5).abs() < 1e-4 && (m.point[1] + 0.5).abs() < 1e-4);
    }

    #[test]
    fn rosenbrock_with_more_iterations() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let settings = NelderMeadSettings {
            value_tol: 1e-14,
            point_tol: 1e-10,
            max_iterations: 5000,
        };
        let m = minimize(f, &[-1.2, 1.0], &[0.1, 0.1], &settings);
        assert!(m.converged);
        assert!((m.point[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() * (2.0 * x[1]).cos();
        for k in 0..20 {
            let start = [0.3 * k as f64, -0.2 * k as f64];
            let f0 = f(&start);
            let m = minimize(f, &start, &[0.05, 0.05], &NelderMeadSettings::default());
            assert!(m.value <= f0);
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let settings = NelderMeadSettings {
            value_tol: 0.0,
            point_tol: 0.0,
            max_iterations: 5,
        };
        let m = minimize(f, &[-1.2, 1.0], &[0.1, 0.1], &settings);
        assert!(!m.converged);
        assert_eq!(m.iterations, 5);
    }
}
