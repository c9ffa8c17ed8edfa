//! Named initial states, scenario runs over several drive strengths, and the
//! quantities derived from them: the sudden-transition time of a frozen
//! discord plateau and the time after which protection pays off.

use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::bath::BathParams;
use crate::control::ControlSchedule;
use crate::error::{Error, Result};
use crate::measures::{concurrence, quantum_discord, superfidelity, OptimizerSettings};
use crate::operator::DensityMatrix;
use crate::redfield::{evolve, SimulationConfig, Trajectory};
use crate::C64;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Samples a protected curve must stay above the unprotected one.
pub const PERSISTENCE_SAMPLES: usize = 10;
/// A protected curve counts as above only by more than this.
pub const CROSSING_MARGIN: f64 = 1e-9;
/// Plateau slopes are compared against this floor (bits per unit time).
pub const PLATEAU_SLOPE_FLOOR: f64 = 1e-4;
/// Minimum number of plateau intervals before a transition is accepted.
pub const MIN_PLATEAU_INTERVALS: usize = 3;
/// A state is Bell-diagonal if its off-Bell-diagonal weight is below this.
const BELL_DIAGONAL_TOL: f64 = 1e-8;

pub const STATE_NAMES: [&str; 3] = ["bell_phi_plus", "mixed_rho1", "mixed_rho2"];

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Resolves one of [`STATE_NAMES`].
pub fn build_initial_state(name: &str) -> Result<DensityMatrix> {
    let s = FRAC_1_SQRT_2;
    match name {
        "bell_phi_plus" => DensityMatrix::pure(&[r(s), r(0.0), r(0.0), r(s)]),
        "mixed_rho1" => {
            let psi1 = DensityMatrix::pure(&[r(0.5), r(0.5), r(0.5), r(0.5)])?;
            let psi2 = DensityMatrix::pure(&[r(s), r(0.0), r(0.0), r(-s)])?;
            DensityMatrix::new((psi1.matrix() + psi2.matrix()).scale_real(0.5))
        }
        "mixed_rho2" => {
            let phi = DensityMatrix::pure(&[r(s), r(0.0), r(0.0), r(s)])?;
            let psi = DensityMatrix::pure(&[r(0.0), r(s), r(s), r(0.0)])?;
            DensityMatrix::new(&phi.matrix().scale_real(0.8) + &psi.matrix().scale_real(0.2))
        }
        other => Err(Error::invalid(format!(
            "unknown initial state '{other}'; valid names: {}",
            STATE_NAMES.join(", ")
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum InitialState {
    Named(String),
    Matrix(DensityMatrix),
}

impl InitialState {
    pub fn resolve(&self) -> Result<DensityMatrix> {
        match self {
            InitialState::Named(name) => build_initial_state(name),
            InitialState::Matrix(m) => Ok(*m),
        }
    }

    fn describe(&self) -> serde_json::Value {
        match self {
            InitialState::Named(name) => json!(name),
            InitialState::Matrix(m) => {
                let n = m.dim();
                let rows: Vec<Vec<[f64; 2]>> = (0..n)
                    .map(|i| (0..n).map(|j| [m.matrix()[(i, j)].re, m.matrix()[(i, j)].im]).collect())
                    .collect();
                json!(rows)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureSet {
    pub discord: bool,
    pub concurrence: bool,
    pub superfidelity: bool,
}

impl MeasureSet {
    pub fn all() -> Self {
        Self {
            discord: true,
            concurrence: true,
            superfidelity: true,
        }
    }

    pub fn none() -> Self {
        Self {
            discord: false,
            concurrence: false,
            superfidelity: false,
        }
    }
}

impl Default for MeasureSet {
    fn default() -> Self {
        Self::all()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub initial_state: InitialState,
    pub n_x_list: Vec<u32>,
    pub t_on: f64,
    pub t_c: f64,
    pub bath: BathParams,
    pub t_final: f64,
    pub outputs: MeasureSet,
}

impl Scenario {
    /// Reference bath, `t_c = 1`, turn-on at zero, horizon 3, all measures.
    pub fn new(name: impl Into<String>, state: &str, n_x_list: &[u32]) -> Self {
        Self {
            name: name.into(),
            initial_state: InitialState::Named(state.to_string()),
            n_x_list: n_x_list.to_vec(),
            t_on: 0.0,
            t_c: 1.0,
            bath: BathParams::reference(),
            t_final: 3.0,
            outputs: MeasureSet::all(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::invalid("scenario name is empty"));
        }
        if self.n_x_list.is_empty() {
            return Err(Error::invalid("scenario needs at least one n_x"));
        }
        let mut seen = self.n_x_list.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.n_x_list.len() {
            return Err(Error::invalid("n_x list contains duplicates"));
        }
        ControlSchedule::new(0, self.t_c, self.t_on)?;
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::invalid(format!("t_final {} must be positive", self.t_final)));
        }
        self.initial_state.resolve()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunSettings {
    pub dt: f64,
    pub quad_tol: f64,
    pub sample_stride: usize,
    pub optimizer: OptimizerSettings,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            quad_tol: 1e-10,
            sample_stride: 10,
            optimizer: OptimizerSettings::default(),
        }
    }
}

/// Measures and diagnostics at one stored time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub discord: Option<f64>,
    pub concurrence: Option<f64>,
    pub superfidelity: Option<f64>,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
    /// `⟨σ_i⊗σ_i⟩` of the interaction-picture state.
    pub correlations: [f64; 3],
    /// Largest modulus of a Bell-basis coherence.
    pub bell_offdiagonal: f64,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub n_x: u32,
    pub trajectory: Trajectory,
    pub samples: Vec<Sample>,
}

impl Series {
    pub fn discord(&self) -> Option<Vec<f64>> {
        self.samples.iter().map(|s| s.discord).collect()
    }

    pub fn times(&self) -> &[f64] {
        &self.trajectory.times
    }

    /// The sample closest to `t`.
    pub fn sample_near(&self, t: f64) -> &Sample {
        &self.samples[self.trajectory.index_near(t)]
    }
}

/// A derived time together with the sample interval it was located in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub bracket: (f64, f64),
    pub error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Derived {
    pub t_star: Option<Estimate>,
    pub t_e: Vec<(u32, Option<Estimate>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub engine_version: String,
    pub dt: f64,
    pub quad_tol: f64,
    pub sample_stride: usize,
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub scenario: Scenario,
    pub series: Vec<Series>,
    pub derived: Derived,
    pub provenance: Provenance,
}

impl RunRecord {
    pub fn series_for(&self, n_x: u32) -> Option<&Series> {
        self.series.iter().find(|s| s.n_x == n_x)
    }
}

/// Canonical description of a run, used for hashing and sidecars.
pub fn describe(s: &Scenario, settings: &RunSettings) -> serde_json::Value {
    json!({
        "scenario": {
            "name": s.name,
            "initial_state": s.initial_state.describe(),
            "nx_list": s.n_x_list,
            "t_on": s.t_on,
            "t_c": s.t_c,
            "outputs": s.outputs,
        },
        "bath": {
            "eta": s.bath.eta(),
            "omega_c": s.bath.omega_c(),
            "temperature": s.bath.temperature(),
        },
        "run": {
            "t_final": s.t_final,
            "dt": settings.dt,
            "quad_tol": settings.quad_tol,
            "sample_stride": settings.sample_stride,
        },
    })
}

pub fn config_hash(s: &Scenario, settings: &RunSettings) -> String {
    let bytes = serde_json::to_vec(&describe(s, settings)).expect("json value serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Largest modulus of an off-diagonal element in the Bell basis.
fn bell_offdiagonal(rho: &DensityMatrix) -> f64 {
    let s = FRAC_1_SQRT_2;
    let basis = [
        [r(s), r(0.0), r(0.0), r(s)],
        [r(s), r(0.0), r(0.0), r(-s)],
        [r(0.0), r(s), r(s), r(0.0)],
        [r(0.0), r(s), r(-s), r(0.0)],
    ];
    let mut worst = 0.0f64;
    for (i, bi) in basis.iter().enumerate() {
        let m_bj: Vec<Vec<C64>> = basis.iter().map(|bj| rho.matrix().apply(bj)).collect();
        for (j, v) in m_bj.iter().enumerate() {
            if i != j {
                let z: C64 = bi.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                worst = worst.max(z.norm());
            }
        }
    }
    worst
}

fn measure_samples(
    traj: &Trajectory,
    initial: &DensityMatrix,
    outputs: MeasureSet,
    opt: &OptimizerSettings,
) -> Result<Vec<Sample>> {
    (0..traj.len())
        .into_par_iter()
        .map(|k| {
            let rho = &traj.states_interaction[k];
            let t = traj.times[k];
            let at = |e: Error| e.context(format!("measures at t = {t}"));
            let diag = traj.diagnostics[k];
            Ok(Sample {
                t,
                discord: if outputs.discord {
                    Some(quantum_discord(rho, opt).map_err(at)?.discord)
                } else {
                    None
                },
                concurrence: if outputs.concurrence {
                    Some(concurrence(rho).map_err(at)?)
                } else {
                    None
                },
                superfidelity: if outputs.superfidelity {
                    Some(superfidelity(initial, rho).map_err(at)?)
                } else {
                    None
                },
                trace_error: diag.trace_error,
                min_eigenvalue: diag.min_eigenvalue,
                hermiticity_defect: diag.hermiticity_defect,
                correlations: rho.correlation_vector()?,
                bell_offdiagonal: bell_offdiagonal(rho),
            })
        })
        .collect()
}

fn run_series(s: &Scenario, settings: &RunSettings, initial: &DensityMatrix, n_x: u32) -> Result<Series> {
    let schedule = ControlSchedule::new(n_x, s.t_c, s.t_on)?;
    let mut cfg = SimulationConfig::new(s.bath, schedule, *initial, s.t_final);
    cfg.dt = settings.dt;
    cfg.quad_tol = settings.quad_tol;
    cfg.sample_stride = settings.sample_stride;
    let trajectory = evolve(&cfg)?;
    let samples = measure_samples(&trajectory, initial, s.outputs, &settings.optimizer)?;
    Ok(Series {
        n_x,
        trajectory,
        samples,
    })
}

/// Evolves one trajectory per `n_x` (in parallel, merged in declared order)
/// and evaluates the selected measures at every stored sample.
///
/// Superfidelity is taken between the initial state and the
/// interaction-picture state, i.e. against the ideal controlled evolution.
pub fn run_scenario(s: &Scenario, settings: &RunSettings) -> Result<RunRecord> {
    let ctx = |e: Error| e.context(format!("scenario '{}'", s.name));
    s.validate().map_err(ctx)?;
    let initial = s.initial_state.resolve().map_err(ctx)?;
    let series = s
        .n_x_list
        .par_iter()
        .map(|&n_x| {
            run_series(s, settings, &initial, n_x).map_err(|e| e.context(format!("n_x = {n_x}")))
        })
        .collect::<Result<Vec<_>>>()
        .map_err(ctx)?;

    let mut record = RunRecord {
        scenario: s.clone(),
        series,
        derived: Derived {
            t_star: None,
            t_e: Vec::new(),
        },
        provenance: Provenance {
            config_hash: config_hash(s, settings),
            engine_version: ENGINE_VERSION.to_string(),
            dt: settings.dt,
            quad_tol: settings.quad_tol,
            sample_stride: settings.sample_stride,
        },
    };
    if s.outputs.discord && record.series_for(0).is_some() {
        record.derived.t_star = sudden_transition_time(&record).map_err(ctx)?;
        let protected: Vec<u32> = s.n_x_list.iter().copied().filter(|&n| n != 0).collect();
        for n_x in protected {
            let te = effectiveness_time(&record, n_x).map_err(ctx)?;
            record.derived.t_e.push((n_x, te));
        }
    }
    Ok(record)
}

fn discord_series(record: &RunRecord, n_x: u32) -> Result<(&Series, Vec<f64>)> {
    let series = record
        .series_for(n_x)
        .ok_or_else(|| Error::invalid(format!("record has no n_x = {n_x} trajectory")))?;
    let d = series
        .discord()
        .ok_or_else(|| Error::invalid(format!("n_x = {n_x} trajectory has no discord samples")))?;
    Ok((series, d))
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Root of the linear interpolant of `g` on `[t0, t1]`.
fn linear_root(t0: f64, g0: f64, t1: f64, g1: f64) -> f64 {
    if g0 == g1 {
        return 0.5 * (t0 + t1);
    }
    (t0 - g0 * (t1 - t0) / (g1 - g0)).clamp(t0.min(t1), t0.max(t1))
}

/// End of the frozen-discord plateau of the unprotected trajectory.
///
/// The transition is the first sample interval whose slope exceeds ten times
/// the median slope of the preceding plateau (and an absolute floor). For
/// Bell-diagonal states the time is refined to the crossing
/// `max(|c₁|, |c₂|) = |c₃|`; otherwise the last plateau sample is returned.
/// `None` when the trajectory starts without a plateau.
pub fn sudden_transition_time(record: &RunRecord) -> Result<Option<Estimate>> {
    let (series, d) = discord_series(record, 0)?;
    let t = series.times();
    if d.len() < MIN_PLATEAU_INTERVALS + 2 {
        return Ok(None);
    }
    let slopes: Vec<f64> = (0..d.len() - 1)
        .map(|k| ((d[k + 1] - d[k]) / (t[k + 1] - t[k])).abs())
        .collect();
    if slopes[..MIN_PLATEAU_INTERVALS].iter().any(|&s| s > PLATEAU_SLOPE_FLOOR) {
        return Ok(None);
    }
    let jump = (MIN_PLATEAU_INTERVALS..slopes.len())
        .find(|&k| slopes[k] > PLATEAU_SLOPE_FLOOR.max(10.0 * median(&slopes[..k])));
    let Some(k) = jump else {
        return Ok(None);
    };
    let bracket = (t[k], t[k + 1]);

    let samples = &series.samples;
    let bell_diagonal = samples[k].bell_offdiagonal < BELL_DIAGONAL_TOL
        && samples[k + 1].bell_offdiagonal < BELL_DIAGONAL_TOL;
    let gap = |s: &Sample| {
        let c = s.correlations;
        c[0].abs().max(c[1].abs()) - c[2].abs()
    };
    if bell_diagonal {
        // the crossing can sit one interval either side of the slope jump
        let lo = k.saturating_sub(1);
        let hi = (k + 2).min(samples.len() - 1);
        for j in lo..hi {
            let (g0, g1) = (gap(&samples[j]), gap(&samples[j + 1]));
            if g0 >= 0.0 && g1 <= 0.0 {
                let value = linear_root(t[j], g0, t[j + 1], g1);
                // curvature bound on the linear interpolation error
                let h = t[j + 1] - t[j];
                let curvature = if j >= 1 {
                    (gap(&samples[j + 1]) - 2.0 * gap(&samples[j]) + gap(&samples[j - 1])).abs() / (h * h)
                } else {
                    0.0
                };
                return Ok(Some(Estimate {
                    value,
                    bracket: (t[j], t[j + 1]),
                    error_estimate: curvature * h * h / 8.0,
                }));
            }
        }
    }
    Ok(Some(Estimate {
        value: t[k],
        bracket,
        error_estimate: bracket.1 - bracket.0,
    }))
}

/// First time the protected discord rises above the unprotected discord and
/// stays above for [`PERSISTENCE_SAMPLES`] further samples, linearly
/// interpolated between samples. `None` without such a crossing.
pub fn effectiveness_time(record: &RunRecord, n_x: u32) -> Result<Option<Estimate>> {
    let (base, d0) = discord_series(record, 0)?;
    let (prot, dp) = discord_series(record, n_x)?;
    let t = base.times();
    if prot.times().len() != t.len()
        || prot.times().iter().zip(t).any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::invalid("trajectories are sampled on different time grids"));
    }
    let delta: Vec<f64> = dp.iter().zip(&d0).map(|(p, u)| p - u).collect();
    let above = |k: usize| delta[k] > CROSSING_MARGIN;
    for k in 1..delta.len() {
        if above(k) && !above(k - 1) {
            let end = (k + PERSISTENCE_SAMPLES).min(delta.len() - 1);
            if (k..=end).all(above) {
                let value = linear_root(t[k - 1], delta[k - 1], t[k], delta[k]);
                return Ok(Some(Estimate {
                    value,
                    bracket: (t[k - 1], t[k]),
                    error_estimate: t[k] - t[k - 1],
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub temperature: f64,
    pub t_star: Option<Estimate>,
    pub t_e: Option<Estimate>,
}

/// Effectiveness time of `n_x` (and the unprotected transition time) for
/// each temperature, with `base` supplying everything but the bath temperature.
pub fn temperature_sweep(
    base: &Scenario,
    n_x: u32,
    temperatures: &[f64],
    settings: &RunSettings,
) -> Result<Vec<SweepPoint>> {
    temperatures
        .par_iter()
        .map(|&temperature| {
            let mut s = base.clone();
            s.name = format!("{}_T{temperature}", base.name);
            s.bath = BathParams::with_temperature(base.bath.eta(), base.bath.omega_c(), temperature)?;
            s.n_x_list = vec![0, n_x];
            s.outputs = MeasureSet {
                discord: true,
                concurrence: false,
                superfidelity: false,
            };
            let record = run_scenario(&s, settings)?;
            Ok(SweepPoint {
                temperature,
                t_star: record.derived.t_star,
                t_e: effectiveness_time(&record, n_x)?,
            })
        })
        .collect()
}

/// Figure identifiers accepted by [`figure_plan`].
pub const FIGURES: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"];

/// Temperatures of the fig6 sweep.
pub const FIG6_TEMPERATURES: [f64; 8] = [0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0];

/// What a figure needs: one or more scenario runs written as CSV files, or a
/// temperature sweep.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum FigurePlan {
    Runs(Vec<(String, Scenario)>),
    Sweep {
        base: Scenario,
        n_x: u32,
        temperatures: Vec<f64>,
    },
}

/// The built-in scenarios of each figure, keyed by output file stem.
pub fn figure_plan(id: &str) -> Result<FigurePlan> {
    let only = |d: bool, c: bool, f: bool| MeasureSet {
        discord: d,
        concurrence: c,
        superfidelity: f,
    };
    let mut plan = Vec::new();
    match id {
        "fig1" => {
            let mut s = Scenario::new("fig1", "bell_phi_plus", &[0, 2, 3, 4]);
            s.outputs = only(false, true, true);
            plan.push(("fig1".to_string(), s));
        }
        "fig2" => {
            let mut s = Scenario::new("fig2", "bell_phi_plus", &[0, 2, 3, 4]);
            s.outputs = only(true, false, false);
            plan.push(("fig2".to_string(), s));
            let mut s = Scenario::new("fig2_rho1", "mixed_rho1", &[0, 2, 3, 4]);
            s.outputs = only(true, false, false);
            plan.push(("fig2_rho1".to_string(), s));
        }
        "fig3" => {
            let mut s = Scenario::new("fig3", "mixed_rho2", &[0, 2, 3, 4]);
            s.outputs = only(false, true, true);
            plan.push(("fig3".to_string(), s));
        }
        "fig4" => {
            let mut s = Scenario::new("fig4", "mixed_rho2", &[0, 1, 2, 3, 4]);
            s.outputs = only(true, false, false);
            plan.push(("fig4".to_string(), s));
        }
        "fig5" => {
            let mut s = Scenario::new("fig5", "mixed_rho2", &[1, 2, 3, 4]);
            s.t_on = 0.4;
            s.outputs = only(true, false, false);
            plan.push(("fig5".to_string(), s));
            let mut s = Scenario::new("fig5_baseline", "mixed_rho2", &[1, 2, 3, 4]);
            s.outputs = only(true, false, false);
            plan.push(("fig5_baseline".to_string(), s));
        }
        "fig6" => {
            let mut base = Scenario::new("fig6", "mixed_rho2", &[0, 4]);
            base.t_final = 1.5;
            return Ok(FigurePlan::Sweep {
                base,
                n_x: 4,
                temperatures: FIG6_TEMPERATURES.to_vec(),
            });
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown figure '{other}'; valid: {}, all",
                FIGURES.join(", ")
            )))
        }
    }
    Ok(FigurePlan::Runs(plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{bell_diagonal_discord_oracle, concurrence};

    fn quick() -> RunSettings {
        RunSettings {
            dt: 2e-3,
            sample_stride: 5,
            optimizer: OptimizerSettings {
                grid_theta: 12,
                grid_phi: 24,
                ..OptimizerSettings::default()
            },
            ..RunSettings::default()
        }
    }

    #[test]
    fn named_states() {
        let phi = build_initial_state("bell_phi_plus").unwrap();
        assert!((phi.purity() - 1.0).abs() < 1e-14);
        assert!((concurrence(&phi).unwrap() - 1.0).abs() < 1e-7);

        let rho1 = build_initial_state("mixed_rho1").unwrap();
        assert!((rho1.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!((rho1.purity() - 0.5).abs() < 1e-14);

        let rho2 = build_initial_state("mixed_rho2").unwrap();
        let c = rho2.correlation_vector().unwrap();
        for (a, b) in c.iter().zip([1.0, -0.6, 0.6]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(bell_offdiagonal(&rho2) < 1e-15);
        assert!(bell_offdiagonal(&rho1) > 0.1);

        let err = build_initial_state("werner").unwrap_err();
        assert!(err.to_string().contains("mixed_rho2"));
    }

    #[test]
    fn scenario_validation() {
        let mut s = Scenario::new("x", "mixed_rho2", &[0, 4]);
        assert!(s.validate().is_ok());
        s.n_x_list = vec![];
        assert!(s.validate().is_err());
        s.n_x_list = vec![2, 2];
        assert!(s.validate().is_err());
        s.n_x_list = vec![2];
        s.initial_state = InitialState::Named("nope".into());
        assert!(s.validate().is_err());
    }

    #[test]
    fn empty_measure_set_keeps_trajectories() {
        let mut s = Scenario::new("bare", "bell_phi_plus", &[0, 2]);
        s.t_final = 0.2;
        s.outputs = MeasureSet::none();
        let rec = run_scenario(&s, &quick()).unwrap();
        assert_eq!(rec.series.len(), 2);
        assert_eq!(rec.series[0].n_x, 0);
        assert_eq!(rec.series[1].n_x, 2);
        assert!(rec.series.iter().all(|x| x.samples.iter().all(|p| p.discord.is_none())));
        assert!(rec.derived.t_star.is_none());
    }

    #[test]
    fn declared_order_and_determinism() {
        let mut s = Scenario::new("order", "mixed_rho2", &[3, 0, 1]);
        s.t_final = 0.2;
        let a = run_scenario(&s, &quick()).unwrap();
        let b = run_scenario(&s, &quick()).unwrap();
        let order: Vec<u32> = a.series.iter().map(|x| x.n_x).collect();
        assert_eq!(order, vec![3, 0, 1]);
        for (x, y) in a.series.iter().zip(&b.series) {
            assert_eq!(x.samples, y.samples);
        }
        assert_eq!(a.provenance.config_hash, b.provenance.config_hash);
        assert_eq!(a.provenance.config_hash.len(), 64);
    }

    #[test]
    fn initial_discord_matches_oracle() {
        let mut s = Scenario::new("t0", "mixed_rho2", &[0]);
        s.t_final = 0.05;
        let rec = run_scenario(&s, &RunSettings::default()).unwrap();
        let d0 = rec.series[0].samples[0].discord.unwrap();
        assert!((d0 - bell_diagonal_discord_oracle(1.0, -0.6, 0.6).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn no_plateau_for_bell_state() {
        let mut s = Scenario::new("phi", "bell_phi_plus", &[0]);
        s.t_final = 1.0;
        let rec = run_scenario(&s, &quick()).unwrap();
        assert!(sudden_transition_time(&rec).unwrap().is_none());
    }

    #[test]
    fn identical_curves_have_no_effectiveness_time() {
        let mut s = Scenario::new("same", "mixed_rho2", &[0]);
        s.t_final = 1.0;
        let rec = run_scenario(&s, &quick()).unwrap();
        assert!(effectiveness_time(&rec, 0).unwrap().is_none());
        assert!(effectiveness_time(&rec, 4).is_err());
    }

    #[test]
    fn stronger_coupling_moves_transition_earlier() {
        let mut s = Scenario::new("eta", "mixed_rho2", &[0]);
        s.t_final = 0.8;
        let base = run_scenario(&s, &quick()).unwrap().derived.t_star.unwrap();
        s.bath = BathParams::with_temperature(2.0 / 16.0, s.bath.omega_c(), 0.0).unwrap();
        let strong = run_scenario(&s, &quick()).unwrap().derived.t_star.unwrap();
        assert!(strong.value < base.value - 0.05, "{strong:?} vs {base:?}");
        assert!((base.value - 0.412455).abs() < 0.02);
    }

    #[test]
    fn empty_sweep_is_empty() {
        let base = Scenario::new("sweep", "mixed_rho2", &[0, 4]);
        assert!(temperature_sweep(&base, 4, &[], &quick()).unwrap().is_empty());
    }

    #[test]
    fn figure_plans() {
        for id in FIGURES {
            figure_plan(id).unwrap();
        }
        assert!(figure_plan("fig7").is_err());
        match figure_plan("fig5").unwrap() {
            FigurePlan::Runs(runs) => {
                assert_eq!(runs.len(), 2);
                assert_eq!(runs[0].1.t_on, 0.4);
                assert_eq!(runs[1].1.t_on, 0.0);
            }
            FigurePlan::Sweep { .. } => panic!("fig5 is a run"),
        }
    }

    #[test]
    fn linear_root_cases() {
        assert!((linear_root(0.0, 1.0, 1.0, -1.0) - 0.5).abs() < 1e-15);
        assert_eq!(linear_root(0.0, 0.0, 1.0, 0.0), 0.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
