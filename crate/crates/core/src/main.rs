use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use dd_discord::bath::BathParams;
use dd_discord::control::{decoupling_residual, ControlSchedule};
use dd_discord::io::{self, OutputSet};
use dd_discord::measures::{bell_diagonal_discord_oracle, quantum_discord, OptimizerSettings};
use dd_discord::operator::Subsystem;
use dd_discord::redfield::{dephasing_oracle_coherence, evolve, SimulationConfig};
use dd_discord::scenario::{
    self, build_initial_state, figure_plan, run_scenario, temperature_sweep, FigurePlan, RunSettings,
    Scenario, FIGURES,
};
use dd_discord::trigamma::trigamma;
use dd_discord::{Error, C64};

const THREADS_VAR: &str = "DD_DISCORD_THREADS";

#[derive(Parser)]
#[command(name = "dd-discord", version, about = "Two-qubit dephasing under continuous decoupling: discord, concurrence, superfidelity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a JSON config; writes <name>.csv and <name>.json.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Regenerate the built-in figure datasets.
    Figures {
        /// fig1..fig6 or all.
        #[arg(default_value = "all")]
        which: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the sudden-transition and effectiveness times as JSON.
    Te {
        #[arg(long)]
        state: String,
        #[arg(long)]
        nx: u32,
        #[arg(long, default_value_t = 0.0)]
        temperature: f64,
        #[arg(long, default_value_t = 3.0)]
        t_final: f64,
    },
    /// Run the built-in oracle self-tests.
    Check,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_VAR} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot configure {n} threads: {e}")))
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))
}

fn write_record(
    outputs: &mut OutputSet,
    dir: &Path,
    stem: &str,
    record: &scenario::RunRecord,
    settings: &RunSettings,
    file_sha256: Option<&str>,
) -> Result<(), Failure> {
    outputs.write(&dir.join(format!("{stem}.csv")), io::csv_string(record).as_bytes())?;
    let sidecar = io::sidecar(record, settings, file_sha256);
    outputs.write(&dir.join(format!("{stem}.json")), &io::to_pretty_json(&sidecar))?;
    Ok(())
}

fn cmd_run(config: &Path, out: &Path) -> Result<(), Failure> {
    let loaded = io::load_config(config)?;
    ensure_dir(out)?;
    let record = run_scenario(&loaded.scenario, &loaded.settings)?;
    let mut outputs = OutputSet::new();
    write_record(
        &mut outputs,
        out,
        &loaded.scenario.name,
        &record,
        &loaded.settings,
        Some(&loaded.file_sha256),
    )?;
    for p in outputs.commit() {
        println!("{}", p.display());
    }
    Ok(())
}

fn cmd_figures(which: &[String], out: &Path) -> Result<(), Failure> {
    let mut ids: Vec<&str> = Vec::new();
    for w in which {
        if w == "all" {
            ids.extend(FIGURES);
        } else if FIGURES.contains(&w.as_str()) {
            ids.push(w);
        } else {
            return Err(Failure::Usage(format!(
                "unknown figure '{w}'; valid: {}, all",
                FIGURES.join(", ")
            )));
        }
    }
    ids.dedup();
    ensure_dir(out)?;
    let settings = RunSettings::default();
    let mut outputs = OutputSet::new();
    for id in ids {
        match figure_plan(id)? {
            FigurePlan::Runs(runs) => {
                for (stem, s) in runs {
                    let record = run_scenario(&s, &settings)?;
                    write_record(&mut outputs, out, &stem, &record, &settings, None)?;
                }
            }
            FigurePlan::Sweep {
                base,
                n_x,
                temperatures,
            } => {
                let points = temperature_sweep(&base, n_x, &temperatures, &settings)
                    .map_err(|e| e.context(id.to_string()))?;
                outputs.write(&out.join(format!("{id}.csv")), io::sweep_csv_string(&points).as_bytes())?;
                let sidecar = io::sweep_sidecar(&base, n_x, &points, &settings);
                outputs.write(&out.join(format!("{id}.json")), &io::to_pretty_json(&sidecar))?;
            }
        }
    }
    for p in outputs.commit() {
        println!("{}", p.display());
    }
    Ok(())
}

fn cmd_te(state: &str, nx: u32, temperature: f64, t_final: f64) -> Result<(), Failure> {
    build_initial_state(state)?;
    if nx == 0 {
        return Err(Failure::Usage("--nx must be >= 1".into()));
    }
    let mut s = Scenario::new(format!("te_{state}"), state, &[0, nx]);
    let reference = BathParams::reference();
    s.bath = BathParams::with_temperature(reference.eta(), reference.omega_c(), temperature)?;
    s.t_final = t_final;
    s.outputs.concurrence = false;
    s.outputs.superfidelity = false;
    let record = run_scenario(&s, &RunSettings::default())?;
    let t_e = record.derived.t_e.first().and_then(|(_, e)| *e);
    let out = json!({
        "state": state,
        "nx": nx,
        "temperature": temperature,
        "t_star": record.derived.t_star.map(|e| e.value),
        "t_star_bracket": record.derived.t_star.map(|e| [e.bracket.0, e.bracket.1]),
        "t_e": t_e.map(|e| e.value),
        "t_e_bracket": t_e.map(|e| [e.bracket.0, e.bracket.1]),
    });
    println!("{out}");
    Ok(())
}

fn cmd_check() -> Result<(), Failure> {
    let mut failures = 0;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    let basel = trigamma(C64::new(1.0, 0.0))?;
    let err = (basel.re - std::f64::consts::PI.powi(2) / 6.0).abs();
    report("trigamma(1) = pi^2/6", err < 1e-13, format!("error {err:.2e}"));

    let worst = (1..=8)
        .map(|n| decoupling_residual(&ControlSchedule::new(n, 1.0, 0.0)?, 256))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    report("decoupling residual n_x = 1..8", worst < 1e-10, format!("max {worst:.2e}"));

    let rho2 = build_initial_state("mixed_rho2")?;
    let d = quantum_discord(&rho2, &OptimizerSettings::default())?.discord;
    let oracle = bell_diagonal_discord_oracle(1.0, -0.6, 0.6)?;
    report(
        "discord of mixed_rho2 vs closed form",
        (d - oracle).abs() < 1e-6,
        format!("{d:.10} vs {oracle:.10}"),
    );

    let p = BathParams::reference();
    let schedule = ControlSchedule::unprotected(1.0)?;
    let plus = [C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2];
    let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let psi = [plus[0] * zero[0], plus[0] * zero[1], plus[1] * zero[0], plus[1] * zero[1]];
    let initial = dd_discord::DensityMatrix::pure(&psi)?;
    let traj = evolve(&SimulationConfig::new(p, schedule, initial, 1.0))?;
    let mut worst = 0.0f64;
    for (t, rho) in traj.times.iter().zip(&traj.states_interaction) {
        let a = dd_discord::operator::partial_trace_matrix(rho.matrix(), Subsystem::A)?;
        let coherence = 2.0 * a[(0, 1)].norm();
        let exact = dephasing_oracle_coherence(*t, &p)?;
        worst = worst.max((coherence - exact).abs() / exact);
    }
    report("dephasing oracle on [0, 1]", worst < 1e-4, format!("max relative error {worst:.2e}"));

    if failures == 0 {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("{failures} self-test(s) failed")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Run { config, out } => cmd_run(config, out),
        Command::Figures { which, out } => cmd_figures(which, out),
        Command::Te {
            state,
            nx,
            temperature,
            t_final,
        } => cmd_te(state, *nx, *temperature, *t_final),
        Command::Check => cmd_check(),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
