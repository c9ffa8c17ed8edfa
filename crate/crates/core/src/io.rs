//! JSON run configuration, CSV tables and JSON sidecars.
//!
//! Floats are written with 12 significant digits in `%.12g` style and rows
//! end in a bare line feed, so identical runs give byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bath::BathParams;
use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, DensityMatrix};
use crate::scenario::{
    describe, Estimate, InitialState, RunRecord, RunSettings, Scenario, SweepPoint,
};
use crate::C64;

pub const CSV_HEADER: &str = "t,nx,discord,concurrence,superfidelity,trace_error,min_eigenvalue";
pub const SWEEP_HEADER: &str = "temperature,t_star,t_e";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: ScenarioSection,
    #[serde(default)]
    bath: BathSection,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    name: String,
    initial_state: StateSpec,
    nx_list: Vec<u32>,
    #[serde(default)]
    t_on: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum StateSpec {
    Name(String),
    Matrix(Vec<Vec<Entry>>),
}

/// A matrix entry: a real number or a `[re, im]` pair.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct BathSection {
    eta: f64,
    omega_c: f64,
    temperature: f64,
}

impl Default for BathSection {
    fn default() -> Self {
        let p = BathParams::reference();
        Self {
            eta: p.eta(),
            omega_c: p.omega_c(),
            temperature: 0.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RunSection {
    t_final: f64,
    dt: f64,
    quad_tol: f64,
    sample_stride: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        let d = RunSettings::default();
        Self {
            t_final: 3.0,
            dt: d.dt,
            quad_tol: d.quad_tol,
            sample_stride: d.sample_stride,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub scenario: Scenario,
    pub settings: RunSettings,
    /// SHA-256 of the raw configuration bytes.
    pub file_sha256: String,
}

fn matrix_from_rows(rows: Vec<Vec<Entry>>) -> Result<DensityMatrix> {
    let rows: Vec<Vec<C64>> = rows
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|e| match e {
                    Entry::Real(x) => C64::new(x, 0.0),
                    Entry::Complex([re, im]) => C64::new(re, im),
                })
                .collect()
        })
        .collect();
    let m = ComplexMatrix::from_rows(&rows)?;
    if m.dim() != 4 {
        return Err(Error::invalid("initial_state matrix must be 4x4"));
    }
    DensityMatrix::new(m)
}

/// Parses a configuration document. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let file: ConfigFile =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
    let initial_state = match file.scenario.initial_state {
        StateSpec::Name(name) => InitialState::Named(name),
        StateSpec::Matrix(rows) => InitialState::Matrix(matrix_from_rows(rows)?),
    };
    let bath = BathParams::with_temperature(file.bath.eta, file.bath.omega_c, file.bath.temperature)?;
    let scenario = Scenario {
        name: file.scenario.name,
        initial_state,
        n_x_list: file.scenario.nx_list,
        t_on: file.scenario.t_on,
        t_c: 1.0,
        bath,
        t_final: file.run.t_final,
        outputs: Default::default(),
    };
    scenario.validate()?;
    if !scenario
        .name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return Err(Error::invalid(format!(
            "scenario name '{}' may only contain letters, digits, '_' and '-'",
            scenario.name
        )));
    }
    let settings = RunSettings {
        dt: file.run.dt,
        quad_tol: file.run.quad_tol,
        sample_stride: file.run.sample_stride,
        ..RunSettings::default()
    };
    Ok(LoadedConfig {
        scenario,
        settings,
        file_sha256: hex::encode(Sha256::digest(text.as_bytes())),
    })
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| e.context(path.display().to_string()))
}

/// `%.12g`: 12 significant digits, trailing zeros removed, exponent form
/// outside `[1e-4, 1e12)`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    const P: i32 = 12;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// The per-sample table of every trajectory, in declared `n_x` order.
pub fn write_csv(record: &RunRecord, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for series in &record.series {
        for s in &series.samples {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                format_float(s.t),
                series.n_x,
                opt_float(s.discord),
                opt_float(s.concurrence),
                opt_float(s.superfidelity),
                format_float(s.trace_error),
                format_float(s.min_eigenvalue),
            )?;
        }
    }
    Ok(())
}

pub fn csv_string(record: &RunRecord) -> String {
    let mut buf = Vec::new();
    write_csv(record, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn estimate_json(e: &Option<Estimate>) -> Value {
    match e {
        Some(e) => json!({
            "value": e.value,
            "bracket": [e.bracket.0, e.bracket.1],
            "error_estimate": e.error_estimate,
        }),
        None => Value::Null,
    }
}

/// Derived quantities, diagnostics and provenance of a run.
pub fn sidecar(record: &RunRecord, settings: &RunSettings, file_sha256: Option<&str>) -> Value {
    let t_e: Vec<Value> = record
        .derived
        .t_e
        .iter()
        .map(|(n_x, e)| json!({ "nx": n_x, "t_e": estimate_json(e) }))
        .collect();
    let diagnostics: Vec<Value> = record
        .series
        .iter()
        .map(|s| {
            json!({
                "nx": s.n_x,
                "samples": s.trajectory.len(),
                "max_trace_error": s.trajectory.max_trace_error(),
                "max_hermiticity_defect": s.trajectory.max_hermiticity_defect(),
                "min_eigenvalue": s.trajectory.min_eigenvalue(),
            })
        })
        .collect();
    json!({
        "config": describe(&record.scenario, settings),
        "derived": {
            "t_star": estimate_json(&record.derived.t_star),
            "t_e": t_e,
        },
        "diagnostics": diagnostics,
        "provenance": {
            "config_hash": record.provenance.config_hash,
            "config_file_sha256": file_sha256,
            "engine_version": record.provenance.engine_version,
            "dt": record.provenance.dt,
            "quad_tol": record.provenance.quad_tol,
            "sample_stride": record.provenance.sample_stride,
        },
    })
}

pub fn sweep_csv_string(points: &[SweepPoint]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            format_float(p.temperature),
            opt_float(p.t_star.map(|e| e.value)),
            opt_float(p.t_e.map(|e| e.value)),
        ));
    }
    out
}

pub fn sweep_sidecar(base: &Scenario, n_x: u32, points: &[SweepPoint], settings: &RunSettings) -> Value {
    let rows: Vec<Value> = points
        .iter()
        .map(|p| {
            json!({
                "temperature": p.temperature,
                "t_star": estimate_json(&p.t_star),
                "t_e": estimate_json(&p.t_e),
            })
        })
        .collect();
    json!({
        "config": describe(base, settings),
        "nx": n_x,
        "sweep": rows,
        "provenance": {
            "config_hash": crate::scenario::config_hash(base, settings),
            "engine_version": crate::scenario::ENGINE_VERSION,
        },
    })
}

/// Files written so far; removed again unless [`OutputSet::commit`] is called.
#[derive(Debug, Default)]
pub struct OutputSet {
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn write(&mut self, path: &Path, contents: &[u8]) -> Result<()> {
        let io_err = |e: std::io::Error| Error::invalid(format!("cannot write {}: {e}", path.display()));
        let tmp = path.with_extension("partial");
        let result = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path));
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            return Err(io_err(e));
        }
        self.written.push(path.to_path_buf());
        Ok(())
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}

pub fn to_pretty_json(v: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("json value serializes");
    bytes.push(b'\n');
    bytes
}
