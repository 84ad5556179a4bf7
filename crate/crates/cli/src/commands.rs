use std::f64::consts::{FRAC_PI_4, PI};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use seqgen::io::{plan_from_json, plan_to_json, state_from_json, state_to_json};
use seqgen::physics::{is_non_increasing, sweep_point, Level, SweepRow};
use seqgen::random::{random_mps, seeded};
use seqgen::recipes::atomic::atomic_w_cascade_closed_form;
use seqgen::recipes::{
    adiabatic_recipe, atomic_cluster_sequence, atomic_ghz_sequence, atomic_w_cascade, cluster_state, ghz_state,
    target_w_state, uniform_cluster_state, w_source_plan, RecipeKind, WParams,
};
use seqgen::{compile, fidelity, mps_from_dense, mps_to_dense, run_qubit_chain, verify_plan, GenerationPlan, PureState};

use crate::report::{InputDigest, RunReport, Timings};
use crate::{Cli, Command, Format, OUT_DIR_ENV};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

impl From<seqgen::Error> for CliError {
    fn from(e: seqgen::Error) -> CliError {
        use seqgen::Error::*;
        let msg = e.to_string();
        match e {
            LengthMismatch { .. }
            | NotNormalized(_)
            | ZeroNorm
            | InvalidTolerance(_)
            | ShapeMismatch(_)
            | CutOutOfRange { .. }
            | BondMismatch { .. }
            | InvalidParameter(_)
            | Json(_) => CliError::Input(msg),
            RankExceedsAncilla { .. }
            | NotIsometric { .. }
            | NotUnitary(_)
            | NotHermitian(_)
            | ZeroProbability
            | TagNotReset(_)
            | GateOrder(_)
            | UnexpectedForm(_) => CliError::Numerical(msg),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Fidelity below which a recipe or roundtrip counts as failed.
const FIDELITY_FLOOR: f64 = 1.0 - 1e-10;

pub fn run(cli: &Cli) -> Result<()> {
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(CliError::Input(format!("--tol must be finite and non-negative, got {}", cli.tol)));
    }
    if cli.format == Some(Format::Csv) && !matches!(cli.command, Command::Sweep { .. }) {
        return Err(CliError::Input("--format csv applies to sweep only".into()));
    }
    let out = Output::resolve(cli.out.as_deref())?;
    let mut timings = Timings::new(cli.timings);
    let mut report = match &cli.command {
        Command::Compile { state } => cmd_compile(state, cli.tol, &out, &mut timings)?,
        Command::Recipe { name, n, thetas, phis, params } => {
            let (thetas, phis) = match params {
                Some(p) => read_params(p)?,
                None => (thetas.clone(), phis.clone()),
            };
            cmd_recipe(name, *n, &thetas, &phis, cli.tol, &out, &mut timings)?
        }
        Command::Verify { plan, state } => cmd_verify(plan, state, cli.tol, &out, &mut timings)?,
        Command::Sweep { config, deltas, omegas, n_max, levels } => {
            let grid = match config {
                Some(p) => read_grid(p)?,
                None => Grid {
                    delta_over_g: deltas.clone(),
                    omega_over_g: omegas.clone(),
                    n_max: n_max.clone(),
                    levels: levels.clone(),
                },
            };
            cmd_sweep(&grid, cli.format.unwrap_or(Format::Csv), &out, &mut timings)?
        }
        Command::Random { n, bond } => cmd_random(*n, *bond, cli.seed, cli.tol, &out)?,
    };
    timings.attach(&mut report);
    let text = report.to_json();
    out.write(&format!("{}.report.json", report.command), &text)?;
    print!("{text}");
    Ok(())
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn resolve(flag: Option<&Path>) -> Result<Output> {
        let dir = match flag {
            Some(p) => p.to_path_buf(),
            None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
        };
        fs::create_dir_all(&dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        Ok(Output { dir })
    }

    fn write(&self, name: &str, text: &str) -> Result<String> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        Ok(name.to_string())
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: seqgen::Result<T>) -> Result<T> {
    r.map_err(|e| {
        let code = CliError::from(e);
        let msg = format!("{}: {code}", path.display());
        match code {
            CliError::Input(_) => CliError::Input(msg),
            CliError::Numerical(_) => CliError::Numerical(msg),
            CliError::Output(_) => CliError::Output(msg),
        }
    })
}

fn stem(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "state".into());
    let name = name.strip_suffix(".json").unwrap_or(&name);
    name.strip_suffix(".state").unwrap_or(name).to_string()
}

fn cmd_compile(path: &Path, tol: f64, out: &Output, timings: &mut Timings) -> Result<RunReport> {
    let text = read(path)?;
    let state = in_file(path, state_from_json(&text))?;
    let mut digest = InputDigest::new("compile");
    digest.add("state", text.as_bytes());
    digest.arg("tol", tol);

    let mps = timings.time("decompose", || mps_from_dense(&state, tol))?;
    let c = timings.time("compile", || compile(&mps, tol))?;
    let v = timings.time("verify", || verify_plan(&c.plan, &state))?;

    let mut report = RunReport::new("compile", digest);
    report.fidelity("roundtrip", v.fidelity);
    report.fidelity("declared", c.plan.declared_fidelity);
    report.bond_profile = Some(mps.bond_profile().dims);
    report.decoupled = Some(v.decoupled);
    report.detail("ancilla_dim", c.plan.ancilla_dim);
    report.detail("isometry_dims", c.raw_steps.iter().map(|s| s.matrix.shape()).collect::<Vec<_>>());
    report.detail("final_overlap", v.final_overlap);
    let name = format!("{}.plan.json", stem(path));
    report.outputs.push(out.write(&name, &plan_to_json(&c.plan))?);
    eprintln!("compiled {} sites onto D = {}, roundtrip fidelity {:.15}", state.n_sites(), c.plan.ancilla_dim, v.fidelity);
    Ok(report)
}

#[derive(Deserialize)]
struct ParamsFile {
    #[serde(default)]
    thetas: Vec<f64>,
    #[serde(default)]
    phis: Vec<f64>,
}

fn read_params(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = read(path)?;
    let p: ParamsFile =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: malformed JSON: {e}", path.display())))?;
    Ok((p.thetas, p.phis))
}

/// Target, optional plan and independent reference for one recipe.
struct RecipeOutput {
    state: PureState,
    plan: Option<GenerationPlan>,
    /// Route-vs-target fidelities.
    checks: Vec<(&'static str, f64)>,
    /// Whether the `D = 2` bond bound applies.
    qubit_bonds: bool,
}

fn build_recipe(name: &str, n: usize, thetas: &[f64], phis: &[f64]) -> Result<RecipeOutput> {
    if n < 2 {
        return Err(CliError::Input(format!("recipes need n >= 2, got {n}")));
    }
    let no_params = || {
        if thetas.is_empty() && phis.is_empty() {
            Ok(())
        } else {
            Err(CliError::Input(format!("recipe {name} takes no angles")))
        }
    };
    let (thetas, phis) = (thetas.to_vec(), phis.to_vec());
    let out = match name {
        "w" => {
            let params = if thetas.is_empty() && phis.is_empty() {
                WParams::uniform(n)?
            } else {
                if thetas.len() != n - 1 {
                    return Err(CliError::Input(format!("w on {n} qubits needs {} angles, got {}", n - 1, thetas.len())));
                }
                WParams::new(thetas, phis)?
            };
            let state = target_w_state(&params)?;
            let plan = w_source_plan(&params)?;
            let ad = adiabatic_recipe(RecipeKind::W, n, &params.thetas, &params.phis)?.run()?;
            let checks = vec![
                ("source_plan", verify_plan(&plan, &state)?.fidelity),
                ("adiabatic", fidelity(&ad.qubits, &state)?),
            ];
            RecipeOutput { state, plan: Some(plan), checks, qubit_bonds: true }
        }
        "ghz" => {
            no_params()?;
            let state = ghz_state(n)?;
            let plan = adiabatic_recipe(RecipeKind::Ghz, n, &[FRAC_PI_4], &[PI])?.plan()?;
            let checks = vec![("adiabatic", verify_plan(&plan, &state)?.fidelity)];
            RecipeOutput { state, plan: Some(plan), checks, qubit_bonds: true }
        }
        "cluster" => {
            let (thetas, phis) = if thetas.is_empty() && phis.is_empty() {
                (vec![FRAC_PI_4; n], vec![0.0; n])
            } else {
                (thetas, phis)
            };
            let state = cluster_state(n, &thetas, &phis)?;
            let plan = adiabatic_recipe(RecipeKind::Cluster, n, &thetas, &phis)?.plan()?;
            let checks = vec![("adiabatic", verify_plan(&plan, &state)?.fidelity)];
            RecipeOutput { state, plan: Some(plan), checks, qubit_bonds: true }
        }
        "atomic-w" => {
            no_params()?;
            let joint = atomic_w_cascade(n)?;
            let closed = atomic_w_cascade_closed_form(n)?;
            let state = PureState::new(vec![2; n], joint.amplitudes)?;
            let reference = PureState::new(vec![2; n], closed.amplitudes)?;
            let checks = vec![("closed_form", fidelity(&state, &reference)?)];
            RecipeOutput { state, plan: None, checks, qubit_bonds: false }
        }
        "atomic-ghz" => {
            no_params()?;
            let (initial, layer) = atomic_ghz_sequence(n)?;
            let state = run_qubit_chain(n, &[layer], &initial)?;
            let checks = vec![("ghz", fidelity(&state, &ghz_state(n)?)?)];
            RecipeOutput { state, plan: None, checks, qubit_bonds: true }
        }
        "atomic-cluster" => {
            no_params()?;
            let state = atomic_cluster_sequence(n)?.run(true)?;
            let checks = vec![("cluster", fidelity(&state, &uniform_cluster_state(n)?)?)];
            RecipeOutput { state, plan: None, checks, qubit_bonds: true }
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown recipe {other:?} (w, ghz, cluster, atomic-w, atomic-ghz, atomic-cluster)"
            )))
        }
    };
    Ok(out)
}

fn cmd_recipe(
    name: &str,
    n: usize,
    thetas: &[f64],
    phis: &[f64],
    tol: f64,
    out: &Output,
    timings: &mut Timings,
) -> Result<RunReport> {
    let mut digest = InputDigest::new("recipe");
    digest.arg("name", name);
    digest.arg("n", n);
    digest.arg("thetas", thetas);
    digest.arg("phis", phis);
    digest.arg("tol", tol);
    let r = timings.time("build", || build_recipe(name, n, thetas, phis))?;
    let bonds = mps_from_dense(&r.state, tol.max(1e-12))?.bond_profile();

    let mut report = RunReport::new("recipe", digest);
    report.bond_profile = Some(bonds.dims.clone());
    for (label, f) in &r.checks {
        report.fidelity(label, *f);
    }
    report.detail("recipe", name);
    report.detail("n", n);
    let base = format!("{name}-n{n}");
    report.outputs.push(out.write(&format!("{base}.state.json"), &state_to_json(&r.state))?);
    if let Some(plan) = &r.plan {
        report.outputs.push(out.write(&format!("{base}.plan.json"), &plan_to_json(plan))?);
    }
    if r.qubit_bonds && bonds.max() > 2 {
        return Err(CliError::Numerical(format!("{name}: bond profile {:?} exceeds 2", bonds.dims)));
    }
    if let Some((label, f)) = r.checks.iter().find(|(_, f)| *f < FIDELITY_FLOOR) {
        return Err(CliError::Numerical(format!("{name}: {label} fidelity {f}")));
    }
    Ok(report)
}

fn cmd_verify(plan_path: &Path, state_path: &Path, tol: f64, out: &Output, timings: &mut Timings) -> Result<RunReport> {
    let plan_text = read(plan_path)?;
    let state_text = read(state_path)?;
    let plan = in_file(plan_path, plan_from_json(&plan_text))?;
    let state = in_file(state_path, state_from_json(&state_text))?;
    let mut digest = InputDigest::new("verify");
    digest.add("plan", plan_text.as_bytes());
    digest.add("state", state_text.as_bytes());
    digest.arg("tol", tol);

    let mut report = RunReport::new("verify", digest);
    let residuals = plan.isometry_residuals();
    let flagged: Vec<usize> = residuals.iter().enumerate().filter(|(_, &r)| r > tol).map(|(k, _)| k + 1).collect();
    report.detail("isometry_residuals", &residuals);
    report.detail("flagged_steps", &flagged);
    if !flagged.is_empty() {
        let text = report.to_json();
        out.write("verify.report.json", &text)?;
        print!("{text}");
        return Err(CliError::Numerical(format!(
            "steps {flagged:?} are not isometries (worst residual {:e})",
            residuals.iter().cloned().fold(0.0, f64::max)
        )));
    }
    let v = timings.time("run", || verify_plan(&plan, &state))?;
    report.fidelity("target", v.fidelity);
    report.decoupled = Some(v.decoupled);
    report.detail("purity", v.purity);
    report.detail("final_overlap", v.final_overlap);
    eprintln!("fidelity {:.15}, decoupled {}", v.fidelity, v.decoupled);
    Ok(report)
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Grid {
    pub delta_over_g: Vec<f64>,
    pub omega_over_g: Vec<f64>,
    pub n_max: Vec<usize>,
    pub levels: Vec<String>,
}

fn read_grid(path: &Path) -> Result<Grid> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: malformed JSON: {e}", path.display())))
}

#[derive(Serialize)]
struct CsvRow {
    #[serde(rename = "Delta_over_g")]
    delta_over_g: f64,
    #[serde(rename = "Omega_over_g")]
    omega_over_g: f64,
    n_max: usize,
    level: String,
    infidelity: f64,
    leakage: f64,
}

impl From<&SweepRow> for CsvRow {
    fn from(r: &SweepRow) -> CsvRow {
        CsvRow {
            delta_over_g: r.delta_over_g,
            omega_over_g: r.omega_over_g,
            n_max: r.n_max,
            level: r.level.to_string(),
            infidelity: r.infidelity,
            leakage: r.leakage,
        }
    }
}

fn level_key(l: Level) -> u8 {
    match l {
        Level::Full => 0,
        Level::Adiabatic => 1,
    }
}

#[derive(Serialize)]
struct Verdict {
    level: String,
    omega_over_g: f64,
    n_max: usize,
    monotone: bool,
}

fn cmd_sweep(grid: &Grid, format: Format, out: &Output, timings: &mut Timings) -> Result<RunReport> {
    let levels = grid.levels.iter().map(|s| s.parse::<Level>()).collect::<seqgen::Result<Vec<_>>>()?;
    let mut points = Vec::new();
    for &level in &levels {
        for &omega in &grid.omega_over_g {
            for &n_max in &grid.n_max {
                for &delta in &grid.delta_over_g {
                    points.push((level, omega, n_max, delta));
                }
            }
        }
    }
    if points.is_empty() {
        return Err(CliError::Input("sweep grid is empty".into()));
    }
    points.sort_by(|a, b| {
        (level_key(a.0), a.2)
            .cmp(&(level_key(b.0), b.2))
            .then(a.1.total_cmp(&b.1))
            .then(a.3.total_cmp(&b.3))
    });
    points.dedup();
    let mut digest = InputDigest::new("sweep");
    digest.arg("points", &points);

    // Ordered collect keeps rows in grid order for any thread count.
    let rows = timings.time("sweep", || {
        points
            .par_iter()
            .map(|&(level, omega, n_max, delta)| sweep_point(delta, omega, n_max, level))
            .collect::<seqgen::Result<Vec<_>>>()
    })?;

    let mut verdicts = Vec::new();
    for chunk in rows.chunk_by(|a, b| a.level == b.level && a.n_max == b.n_max && a.omega_over_g == b.omega_over_g) {
        let values: Vec<f64> = chunk.iter().map(|r| r.infidelity).collect();
        let v = Verdict {
            level: chunk[0].level.to_string(),
            omega_over_g: chunk[0].omega_over_g,
            n_max: chunk[0].n_max,
            monotone: is_non_increasing(&values),
        };
        eprintln!(
            "{} Omega/g = {} n_max = {}: {} over {} detunings",
            v.level,
            v.omega_over_g,
            v.n_max,
            if v.monotone { "monotone non-increasing" } else { "NOT monotone" },
            values.len()
        );
        verdicts.push(v);
    }

    let table: Vec<CsvRow> = rows.iter().map(CsvRow::from).collect();
    let (name, text) = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &table {
                w.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
            ("sweep.csv", String::from_utf8(bytes).expect("csv is utf-8"))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table).expect("rows serialize");
            s.push('\n');
            ("sweep.json", s)
        }
    };

    let mut report = RunReport::new("sweep", digest);
    report.detail("rows", rows.len());
    report.detail("max_leakage", rows.iter().map(|r| r.leakage).fold(0.0, f64::max));
    report.detail("monotone", verdicts.iter().all(|v| v.monotone));
    report.detail("verdicts", &verdicts);
    report.outputs.push(out.write(name, &text)?);
    Ok(report)
}

fn cmd_random(n: usize, bond: usize, seed: u64, tol: f64, out: &Output) -> Result<RunReport> {
    if n == 0 || n > 20 || bond == 0 {
        return Err(CliError::Input(format!("random needs 1 <= n <= 20 and bond >= 1, got n = {n}, bond = {bond}")));
    }
    let mut digest = InputDigest::new("random");
    digest.arg("n", n);
    digest.arg("bond", bond);
    digest.arg("seed", seed);
    let mps = random_mps(&mut seeded(seed), n, 2, bond);
    let (state, _) = mps_to_dense(&mps)?;
    let mut report = RunReport::new("random", digest);
    report.bond_profile = Some(mps_from_dense(&state, tol.max(1e-12))?.bond_profile().dims);
    report.detail("seed", seed);
    let name = format!("random-n{n}-b{bond}-s{seed}.state.json");
    report.outputs.push(out.write(&name, &state_to_json(&state))?);
    Ok(report)
}
