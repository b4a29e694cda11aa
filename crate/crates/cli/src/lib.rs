//! Command-line driver: runs a scenario file and writes CSV diagnostics plus
//! a `manifest.json` into the output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use kipq_core::diagnostics::{
    attach_residuals, dispersion_check, dispersion_csv, ehrenfest_residuals, summarize, variable_d_residuals,
    MomentumSign, ResidualSummary,
};
use kipq_core::entropy::catalog_table;
use kipq_core::gauge::{dg_chain, gauge_check, gauge_csv};
use kipq_core::grid::snapshot_csv;
use kipq_core::nfpe::{evolve_nfpe, l2_distance};
use kipq_core::nse::{evolve_with, Diffusion};
use kipq_core::scenario::{parse_scenario, Scenario, ScenarioKind};
use kipq_core::verify::{run_criterion, VerifyOptions, CRITERIA};
use kipq_core::Error;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "kipq", version, about = "Nonlinear Fokker-Planck and Schrodinger solvers for generalized entropies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario file (INI).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,

    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Overrides `[output] seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Multiplies every pass/fail tolerance; overrides `[output] tolerance_scale`.
    #[arg(long, global = true)]
    pub tolerance_scale: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Relax an NFPE scenario towards its equilibrium.
    NfpeRelax,
    /// Evolve the diffusive NSE and record Ehrenfest residuals.
    NseEvolve {
        /// Sign of the m <A grad D> source in the momentum residual.
        #[arg(long, value_enum, default_value_t = SignArg::Printed)]
        momentum_sign: SignArg,
    },
    /// Compare canonical and gauge-transformed evolutions.
    GaugeCheck,
    /// Compare the canonical, transformed and linearized BG evolutions.
    DgLinearize,
    /// Measure plane-wave frequencies.
    Dispersion,
    /// Tabulate the entropy functionals.
    Catalog,
    /// Run the acceptance criteria.
    Verify {
        /// Subset of criterion ids, comma separated.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::NfpeRelax => "nfpe-relax",
            Command::NseEvolve { .. } => "nse-evolve",
            Command::GaugeCheck => "gauge-check",
            Command::DgLinearize => "dg-linearize",
            Command::Dispersion => "dispersion",
            Command::Catalog => "catalog",
            Command::Verify { .. } => "verify",
        }
    }

    fn accepts(&self, kind: ScenarioKind) -> bool {
        use ScenarioKind as K;
        match self {
            Command::NfpeRelax => kind == K::Nfpe,
            Command::NseEvolve { .. } => kind == K::Nse,
            Command::GaugeCheck | Command::DgLinearize => matches!(kind, K::Nse | K::GaugeCheck),
            Command::Dispersion => kind == K::Dispersion,
            Command::Catalog | Command::Verify { .. } => true,
        }
    }

    fn needs_scenario(&self) -> bool {
        !matches!(self, Command::Catalog | Command::Verify { .. })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignArg {
    Printed,
    Noether,
}

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(Error::Integration { .. } | Error::Numerical(_)) => EXIT_NUMERICAL,
            Failure::Core(_) => EXIT_VALIDATION,
            Failure::Io(..) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub above: bool,
    pub pass: bool,
}

impl CheckRow {
    fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            above: false,
            pass: value < threshold,
        }
    }
}

impl std::fmt::Display for CheckRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        let op = if self.above { ">" } else { "<" };
        write!(f, "[{tag}] {} {:.3e} {op} {:.1e}", self.name, self.value, self.threshold)
    }
}

/// What a subcommand produced, before anything is written.
#[derive(Default)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub summary: Map<String, Value>,
    pub checks: Vec<CheckRow>,
    pub lines: Vec<String>,
    /// The lines already show every check.
    pub checks_in_lines: bool,
}

impl Outcome {
    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.to_string(), v.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

struct Context {
    scenario: Option<Scenario>,
    scenario_text: String,
    tolerance_scale: f64,
    seed: u64,
    out: PathBuf,
}

fn load(cli: &Cli) -> Result<Context, Failure> {
    let (scenario, text) = match &cli.scenario {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Io(p.clone(), e))?;
            (Some(parse_scenario(&text)?), text)
        }
        None if cli.command.needs_scenario() => {
            return Err(Error::Usage(format!("{} needs --scenario", cli.command.name())).into());
        }
        None => (None, String::new()),
    };
    let defaults = parse_scenario("")?;
    let base = scenario.as_ref().unwrap_or(&defaults);
    if !cli.command.accepts(base.integrator.kind) {
        return Err(Error::Usage(format!(
            "{} cannot run a scenario of kind {}",
            cli.command.name(),
            base.integrator.kind.name()
        ))
        .into());
    }
    let tolerance_scale = cli.tolerance_scale.unwrap_or(base.output.tolerance_scale);
    if !(tolerance_scale.is_finite() && tolerance_scale > 0.0) {
        return Err(Error::Usage("--tolerance-scale must be positive".into()).into());
    }
    Ok(Context {
        tolerance_scale,
        seed: cli.seed.unwrap_or(base.output.seed),
        out: cli.out.clone().unwrap_or_else(|| PathBuf::from(&base.output.dir)),
        scenario_text: text,
        scenario,
    })
}

fn nfpe_relax(s: &Scenario, scale: f64) -> Result<Outcome, Error> {
    let (scn, eq) = s.nfpe()?;
    let traj = evolve_nfpe(&scn)?;
    let mut o = Outcome::default();
    o.files.push(("trajectory.csv".into(), kipq_core::nfpe::trajectory_csv(&traj, &scn.grid, &eq)));
    let last = traj.last();
    let mut dens = String::from("x,rho,rho_eq\n");
    for (i, (r, e)) in last.rho.iter().zip(&eq).enumerate() {
        dens.push_str(&format!("{:e},{r:e},{e:e}\n", scn.grid.x(i)));
    }
    o.files.push(("final_density.csv".into(), dens));
    o.put("steps", traj.steps);
    o.put("dt", scn.dt);
    o.put("l2_initial", l2_distance(&scn.grid, &scn.rho0, &eq));
    o.put("l2_final", l2_distance(&scn.grid, &last.rho, &eq));
    o.put("free_energy_final", last.free_energy);
    o.put("min_density", traj.min_density);
    o.checks.push(CheckRow::below(
        "free energy max step increase",
        traj.max_free_energy_increase,
        1e-10 * scale,
    ));
    Ok(o)
}

fn put_summary(o: &mut Outcome, prefix: &str, r: &ResidualSummary) {
    o.put(&format!("{prefix}r1_abs"), r.r1_abs);
    o.put(&format!("{prefix}r2_abs"), r.r2_abs);
    o.put(&format!("{prefix}r4_abs"), r.r4_abs);
    o.put(&format!("{prefix}r1_rel"), r.r1_rel);
    o.put(&format!("{prefix}r2_rel"), r.r2_rel);
    o.put(&format!("{prefix}r4_rel"), r.r4_rel);
}

fn nse_evolve(s: &Scenario, sign: SignArg) -> Result<Outcome, Error> {
    let scn = s.nse()?;
    let mut traj = evolve_with(&scn, s.integrator.dynamics, s.output.snapshot_every)?;
    let mut o = Outcome::default();
    let rows = match &scn.diffusion {
        Diffusion::Constant(_) => ehrenfest_residuals(&traj.records)?,
        Diffusion::Variable(_) => {
            let chosen = match sign {
                SignArg::Printed => MomentumSign::AsPrinted,
                SignArg::Noether => MomentumSign::Flipped,
            };
            let other = match chosen {
                MomentumSign::AsPrinted => MomentumSign::Flipped,
                MomentumSign::Flipped => MomentumSign::AsPrinted,
            };
            put_summary(&mut o, "other_sign_", &summarize(&variable_d_residuals(&traj.records, other)?));
            variable_d_residuals(&traj.records, chosen)?
        }
    };
    put_summary(&mut o, "", &summarize(&rows));
    attach_residuals(&mut traj.records, &rows);
    o.files.push(("trajectory.csv".into(), kipq_core::nse::trajectory_csv(&traj)));
    if s.output.snapshot_every > 0 {
        for (i, (t, psi)) in traj.snapshots.iter().enumerate() {
            o.files.push((format!("snapshot_{i:05}.csv"), snapshot_csv(psi, None, *t)));
        }
    }
    let (first, last) = (&traj.records[0], traj.records.last().expect("records"));
    o.put("steps", traj.steps);
    o.put("dt", scn.dt);
    o.put("norm_drift", (last.norm - first.norm).abs());
    o.put("energy_drift_rel", (last.energy - first.energy).abs() / first.energy.abs().max(1e-300));
    o.put(
        "max_boundary_density",
        traj.records.iter().map(|r| r.boundary_density).fold(0.0, f64::max),
    );
    Ok(o)
}

fn gauge(s: &Scenario, scale: f64) -> Result<Outcome, Error> {
    let scn = s.nse()?;
    let rep = gauge_check(&scn, s.integrator.cadence)?;
    let mut o = Outcome::default();
    o.files.push(("gauge_check.csv".into(), gauge_csv(&rep)));
    o.put("compared_records", rep.rows.len());
    o.checks.push(CheckRow::below("max |rho_psi - rho_phi|", rep.max_linf, 1e-4 * scale));
    Ok(o)
}

fn linearize(s: &Scenario, scale: f64) -> Result<Outcome, Error> {
    let rep = dg_chain(&s.nse()?)?;
    let mut o = Outcome::default();
    o.files.push((
        "dg_chain.csv".into(),
        format!(
            "t,reduced_hbar,l2_psi_phi,l2_phi_chi,l2_psi_chi\n{:e},{:e},{:e},{:e},{:e}\n",
            rep.t, rep.reduced_hbar, rep.l2_psi_phi, rep.l2_phi_chi, rep.l2_psi_chi
        ),
    ));
    o.put("reduced_hbar", rep.reduced_hbar);
    o.checks.push(CheckRow::below("l2 psi/phi", rep.l2_psi_phi, 1e-3 * scale));
    o.checks.push(CheckRow::below("l2 phi/chi", rep.l2_phi_chi, 1e-3 * scale));
    o.checks.push(CheckRow::below("l2 psi/chi", rep.l2_psi_chi, 1e-3 * scale));
    Ok(o)
}

fn dispersion(s: &Scenario, scale: f64) -> Result<Outcome, Error> {
    let (setup, amp, modes) = s.dispersion()?;
    let rows = modes
        .par_iter()
        .map(|&m| dispersion_check(&setup, m, amp))
        .collect::<Result<Vec<_>, _>>()?;
    let mut o = Outcome::default();
    o.files.push(("dispersion.csv".into(), dispersion_csv(&rows)));
    for r in &rows {
        if r.amplitude_drift > 1e-6 {
            o.lines.push(format!("warning: k={} amplitude drifted by {:.2e}", r.k, r.amplitude_drift));
        }
        o.checks.push(CheckRow::below(format!("k={} rel_err", r.k), r.rel_err, 1e-3 * scale));
    }
    Ok(o)
}

fn catalog(s: &Scenario) -> Result<Outcome, Error> {
    let model = s.entropy_model()?;
    let mut csv = String::from("rho,ln_kappa,d_ln_kappa,gamma,f,f_tilde,f1,f2,f1_tilde,f2_tilde,F\n");
    for r in catalog_table(&model, &s.catalog_rhos()) {
        csv.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            r.rho, r.ln_kappa, r.d_ln_kappa, r.gamma, r.f, r.f_tilde, r.f1, r.f2, r.f1_tilde, r.f2_tilde, r.big_f
        ));
    }
    let mut o = Outcome::default();
    o.files.push(("catalog.csv".into(), csv));
    o.put("model", s.model.name());
    o.put("points", s.output.catalog_rho_points);
    Ok(o)
}

fn verify(ids: &[u8], opts: &VerifyOptions) -> Result<Outcome, Error> {
    let ids: Vec<u8> = if ids.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { ids.to_vec() };
    if let Some(bad) = ids.iter().find(|i| !CRITERIA.iter().any(|c| c.0 == **i)) {
        return Err(Error::Usage(format!("no acceptance criterion {bad}")));
    }
    let reports: Vec<_> = ids.par_iter().map(|&id| run_criterion(id, opts)).collect();
    let mut o = Outcome::default();
    let mut csv = String::from("criterion,check,value,threshold,pass\n");
    for r in &reports {
        o.lines.push(r.line());
        match &r.outcome {
            Ok(checks) => {
                for c in checks {
                    csv.push_str(&format!("{},{},{:e},{:e},{}\n", r.id, c.name, c.value, c.threshold, c.pass));
                    o.checks.push(CheckRow {
                        name: format!("{} {}", r.id, c.name),
                        value: c.value,
                        threshold: c.threshold,
                        above: c.above,
                        pass: c.pass,
                    });
                }
            }
            Err(e) => {
                csv.push_str(&format!("{},error,,,false\n", r.id));
                o.checks.push(CheckRow {
                    name: format!("{} error: {e}", r.id),
                    value: f64::NAN,
                    threshold: f64::NAN,
                    above: false,
                    pass: false,
                });
            }
        }
    }
    o.checks_in_lines = true;
    o.put("criteria_run", reports.len());
    o.put("criteria_passed", reports.iter().filter(|r| r.passed()).count());
    o.files.push(("verify.csv".into(), csv));
    Ok(o)
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn finite(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

fn write(dir: &Path, name: &str, content: &str) -> Result<(), Failure> {
    let p = dir.join(name);
    fs::write(&p, content).map_err(|e| Failure::Io(p, e))
}

/// Runs one invocation; returns the outcome and the exit code it maps to.
pub fn execute(cli: &Cli) -> Result<(Outcome, i32), Failure> {
    let started = unix_now();
    let ctx = load(cli)?;
    let defaults;
    let s = match &ctx.scenario {
        Some(s) => s,
        None => {
            defaults = parse_scenario("")?;
            &defaults
        }
    };
    let scale = ctx.tolerance_scale;
    let mut o = match &cli.command {
        Command::NfpeRelax => nfpe_relax(s, scale)?,
        Command::NseEvolve { momentum_sign } => nse_evolve(s, *momentum_sign)?,
        Command::GaugeCheck => gauge(s, scale)?,
        Command::DgLinearize => linearize(s, scale)?,
        Command::Dispersion => dispersion(s, scale)?,
        Command::Catalog => catalog(s)?,
        Command::Verify { criteria } => verify(
            criteria,
            &VerifyOptions {
                tolerance_scale: scale,
                seed: ctx.seed,
            },
        )?,
    };
    if ctx.scenario.is_some() {
        o.files.push(("scenario.ini".into(), s.serialize()));
    }

    fs::create_dir_all(&ctx.out).map_err(|e| Failure::Io(ctx.out.clone(), e))?;
    for (name, content) in &o.files {
        write(&ctx.out, name, content)?;
    }
    let code = if o.passed() { EXIT_OK } else { EXIT_ACCEPTANCE };
    let checks: Vec<Value> = o
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "value": finite(c.value), "threshold": finite(c.threshold), "above": c.above, "pass": c.pass}))
        .collect();
    let summary: Map<String, Value> = o
        .summary
        .iter()
        .map(|(k, v)| match v.as_f64() {
            Some(x) if !v.is_u64() => (k.clone(), finite(x)),
            _ => (k.clone(), v.clone()),
        })
        .collect();
    let mut files: Vec<&str> = o.files.iter().map(|f| f.0.as_str()).collect();
    files.push("manifest.json");
    let manifest = json!({
        "subcommand": cli.command.name(),
        "scenario_path": cli.scenario.as_ref().map(|p| p.display().to_string()),
        "scenario_sha256": sha256_hex(ctx.scenario_text.as_bytes()),
        "seed": ctx.seed,
        "tolerance_scale": scale,
        "files": files,
        "summary": summary,
        "checks": checks,
        "pass": o.passed(),
        "exit_code": code,
        "started_unix": started,
        "finished_unix": unix_now(),
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&ctx.out, "manifest.json", &format!("{text}\n"))?;
    Ok((o, code))
}

/// Executes and reports on stdout/stderr; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok((o, code)) => {
            for l in &o.lines {
                println!("{l}");
            }
            for (k, v) in &o.summary {
                println!("{k} = {v}");
            }
            if !o.checks_in_lines {
                for c in &o.checks {
                    println!("{c}");
                }
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
