//! The acceptance suite. Each criterion returns a list of checks with
//! thresholds pinned here; `tolerance_scale` loosens or tightens all of them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diagnostics::{
    centered,
    dispersion_check, ehrenfest_residuals, summarize, variable_d_residuals, vorticity_2d, vorticity_eip,
    DiagnosticsRecord, DispersionSetup, MomentumSign, VariableDiffusion,
};
use crate::entropy::{log_grid, DriftChoice, EntropyModel};
use crate::error::{Error, Result};
use crate::gauge::{dg_chain, gauge_check};
use crate::grid::{Grid1D, Grid2D};
use crate::nfpe::{equilibrium_density, evolve_nfpe, l2_distance, stable_dt, NfpeScenario};
use crate::nse::{evolve_with, gaussian_packet, Diffusion, Dynamics, NseScenario, Representation};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tolerance_scale: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerance_scale: 1.0,
            seed: 20240917,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// Pass when value > threshold instead of value < threshold.
    pub above: bool,
    pub pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, threshold: f64, scale: f64) -> Self {
        let threshold = threshold * scale;
        Self {
            name: name.into(),
            value,
            threshold,
            above: false,
            pass: value < threshold,
        }
    }

    fn above(name: impl Into<String>, value: f64, threshold: f64, scale: f64) -> Self {
        let threshold = threshold / scale;
        Self {
            name: name.into(),
            value,
            threshold,
            above: true,
            pass: value > threshold,
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let op = if self.above { ">" } else { "<" };
        write!(f, "{} {:.3e} {op} {:.1e}", self.name, self.value, self.threshold)
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub outcome: Result<Vec<Check>>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, Ok(c) if c.iter().all(|c| c.pass))
    }

    /// One line: status, id, title and every check.
    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let body = match &self.outcome {
            Ok(checks) => checks.iter().map(|c| {
                if c.pass { c.to_string() } else { format!("{c} !") }
            }).collect::<Vec<_>>().join("; "),
            Err(e) => format!("error: {e}"),
        };
        format!("[{status}] {:>2} {}: {body}", self.id, self.title)
    }
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "nfpe equilibrium"),
    (2, "h-theorem"),
    (3, "psi/hydro consistency"),
    (4, "conservation"),
    (5, "ehrenfest residuals"),
    (6, "gauge equivalence"),
    (7, "linearization chain"),
    (8, "dispersion"),
    (9, "variable diffusion"),
    (10, "catalog limits"),
    (11, "vorticity"),
];

pub fn run_criterion(id: u8, opts: &VerifyOptions) -> CriterionReport {
    let s = opts.tolerance_scale;
    let outcome = match id {
        1 => nfpe_equilibrium(s),
        2 => h_theorem(s),
        3 => representation_consistency(s),
        4 => conservation(s),
        5 => ehrenfest(s),
        6 => gauge_equivalence(s),
        7 => linearization_chain(s),
        8 => dispersion(s),
        9 => variable_diffusion(s),
        10 => catalog_limits(s),
        11 => vorticity(s, opts.seed),
        _ => Err(Error::Usage(format!("no acceptance criterion {id}"))),
    };
    let title = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown");
    CriterionReport { id, title, outcome }
}

/// Runs every criterion in parallel, returned in id order.
pub fn run_all(opts: &VerifyOptions) -> Vec<CriterionReport> {
    CRITERIA.par_iter().map(|(id, _)| run_criterion(*id, opts)).collect()
}

fn label(model: &EntropyModel) -> String {
    format!("{:?}", model.kind())
        .replace(' ', "")
        .replace("kappa:", "k=")
        .replace("drift:", "")
        .replace("q:", "q=")
        .replace("r:", "r=")
}

fn collect<T: Send>(items: Vec<T>, f: impl Fn(T) -> Result<Vec<Check>> + Sync + Send) -> Result<Vec<Check>> {
    let parts: Vec<Result<Vec<Check>>> = items.into_par_iter().map(f).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

// ---- NFPE ----

fn nfpe_models() -> Result<Vec<EntropyModel>> {
    Ok(vec![
        EntropyModel::bg(),
        EntropyModel::tsallis(2.0)?,
        EntropyModel::kaniadakis(0.5)?,
        EntropyModel::eip(0.5, DriftChoice::Linear)?,
        EntropyModel::eip(0.5, DriftChoice::Nonlinear)?,
        EntropyModel::eip(-0.5, DriftChoice::Linear)?,
        EntropyModel::eip(-0.5, DriftChoice::Nonlinear)?,
        EntropyModel::two_param(0.5, 0.25)?,
    ])
}

fn nfpe_grid() -> Grid1D {
    Grid1D::new(256, 20.0).expect("valid grid")
}

fn harmonic(grid: &Grid1D, shift: f64) -> Vec<f64> {
    grid.sample(|x| 0.5 * (x - shift) * (x - shift))
}

fn nfpe_run(model: &EntropyModel, rho0: Vec<f64>, t_end: f64) -> Result<NfpeScenario> {
    let grid = nfpe_grid();
    let bound = stable_dt(model, &grid, 1.0, &rho0);
    let steps = (t_end / bound).ceil();
    Ok(NfpeScenario {
        model: model.clone(),
        grid,
        potential: harmonic(&grid, 0.0),
        diffusion: 1.0,
        beta: 1.0,
        rho0,
        dt: t_end / steps,
        t_end,
        cadence: 1000,
    })
}

fn nfpe_equilibrium(s: f64) -> Result<Vec<Check>> {
    let grid = nfpe_grid();
    collect(nfpe_models()?, |model| {
        let (eq, _) = equilibrium_density(&model, &harmonic(&grid, 0.0), 1.0, &grid)?;
        let (rho0, _) = equilibrium_density(&model, &harmonic(&grid, 1.0), 1.0, &grid)?;
        let traj = evolve_nfpe(&nfpe_run(&model, rho0, 10.0)?)?;
        let last = &traj.last().rho;
        let mut out = vec![Check::below(format!("{} l2", label(&model)), l2_distance(&grid, last, &eq), 1e-3, s)];
        if model.kind() == crate::EntropyKind::Bg {
            let gibbs = grid.sample(|x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt());
            out.push(Check::below("Bg l2 to Gibbs", l2_distance(&grid, last, &gibbs), 1e-3, s));
        }
        Ok(out)
    })
}

fn h_theorem(s: f64) -> Result<Vec<Check>> {
    let grid = nfpe_grid();
    collect(nfpe_models()?, |model| {
        let (a, _) = equilibrium_density(&model, &harmonic(&grid, 1.5), 1.0, &grid)?;
        let (b, _) = equilibrium_density(&model, &harmonic(&grid, -1.5), 1.0, &grid)?;
        let rho0: Vec<f64> = a.iter().zip(&b).map(|(a, b)| 0.5 * (a + b)).collect();
        let traj = evolve_nfpe(&nfpe_run(&model, rho0, 2.0)?)?;
        Ok(vec![Check::below(
            format!("{} max rise", label(&model)),
            traj.max_free_energy_increase,
            1e-10,
            s,
        )])
    })
}

// ---- NSE ----

fn packet(model: EntropyModel, d: f64, n: usize, length: f64, t_end: f64, cadence: usize) -> Result<NseScenario> {
    let grid = Grid1D::new(n, length)?;
    let psi0 = gaussian_packet(&grid, 0.0, 1.0, 1.0, 1.0, 1.0)?;
    let mut scn = NseScenario {
        model,
        grid,
        potential: vec![0.0; n],
        diffusion: Diffusion::Constant(d),
        g_coeffs: vec![],
        hbar: 1.0,
        mass: 1.0,
        psi0,
        dt: 1.0,
        t_end,
        cadence,
        representation: Representation::Psi,
    };
    let bound = scn.stable_dt();
    scn.dt = t_end / (t_end / bound).ceil();
    Ok(scn)
}

fn nse_models() -> Result<Vec<(EntropyModel, f64)>> {
    Ok(vec![
        (EntropyModel::bg(), 0.1),
        (EntropyModel::two_param(0.1, 0.05)?, 0.05),
        (EntropyModel::tsallis(1.5)?, 0.1),
        (EntropyModel::kaniadakis(0.1)?, 0.05),
        (EntropyModel::eip(0.5, DriftChoice::Nonlinear)?, 0.1),
    ])
}

fn max_density_gap(a: &[(f64, crate::ComplexWavefunction)], b: &[(f64, crate::ComplexWavefunction)]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|((_, p), (_, q))| {
            p.values
                .iter()
                .zip(&q.values)
                .map(|(x, y)| (x.norm_sqr() - y.norm_sqr()).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

fn representation_consistency(s: f64) -> Result<Vec<Check>> {
    let models = vec![
        EntropyModel::bg(),
        EntropyModel::eip(0.5, DriftChoice::Linear)?,
        EntropyModel::eip(0.5, DriftChoice::Nonlinear)?,
    ];
    collect(models, |model| {
        let mut scn = packet(model.clone(), 0.1, 512, 20.0, 1.0, 1)?;
        scn.t_end = 100.0 * scn.dt;
        let a = evolve_with(&scn, Dynamics::Canonical, 1)?;
        scn.representation = Representation::Hydro;
        let b = evolve_with(&scn, Dynamics::Canonical, 1)?;
        Ok(vec![Check::below(
            format!("{} max|drho|", label(&model)),
            max_density_gap(&a.snapshots, &b.snapshots),
            1e-6,
            s,
        )])
    })
}

fn drift(records: &[DiagnosticsRecord], q: impl Fn(&DiagnosticsRecord) -> f64) -> f64 {
    let q0 = q(&records[0]);
    records.iter().map(|r| (q(r) - q0).abs()).fold(0.0, f64::max)
}

fn conservation(s: f64) -> Result<Vec<Check>> {
    collect(nse_models()?, |(model, d)| {
        let scn = packet(model.clone(), d, 512, 20.0, 1.0, 10)?;
        let tr = evolve_with(&scn, Dynamics::Canonical, 0)?;
        let r = &tr.records;
        let l = label(&model);
        let e0 = r[0].energy.abs();
        Ok(vec![
            Check::below(format!("{l} norm"), drift(r, |x| x.norm), 1e-6, s),
            Check::below(format!("{l} p"), drift(r, |x| x.p_mean), 1e-5, s),
            Check::below(format!("{l} E"), drift(r, |x| x.energy) / e0, 1e-5, s),
        ])
    })
}

/// max |d<x>/dt - <p>/m| over interior records.
fn position_momentum_gap(records: &[DiagnosticsRecord], mass: f64) -> f64 {
    (1..records.len() - 1)
        .map(|k| {
            (centered(records, k, |r| r.x_mean) - records[k].p_mean / mass).abs()
        })
        .fold(0.0, f64::max)
}

fn ehrenfest(s: f64) -> Result<Vec<Check>> {
    enum Case {
        Free(EntropyModel, f64),
        Harmonic(f64),
    }
    let mut cases: Vec<Case> = nse_models()?.into_iter().map(|(m, d)| Case::Free(m, d)).collect();
    cases.push(Case::Harmonic(0.0));
    cases.push(Case::Harmonic(0.1));
    collect(cases, |case| match case {
        Case::Free(model, d) => {
            let scn = packet(model.clone(), d, 512, 20.0, 0.5, 5)?;
            let tr = evolve_with(&scn, Dynamics::Canonical, 0)?;
            let sum = summarize(&ehrenfest_residuals(&tr.records)?);
            let l = label(&model);
            let mut out = vec![Check::below(format!("{l} r1"), sum.r1_abs, 1e-4, s)];
            if !model.has_linear_drift() {
                out.push(Check::above(
                    format!("{l} |dx/dt-p/m|"),
                    position_momentum_gap(&tr.records, scn.mass),
                    1e-3,
                    s,
                ));
            }
            Ok(out)
        }
        Case::Harmonic(d) => {
            let mut scn = packet(EntropyModel::bg(), d, 512, 20.0, 1.0, 2)?;
            scn.potential = scn.grid.sample(|x| 0.5 * x * x);
            let tr = evolve_with(&scn, Dynamics::Canonical, 0)?;
            let sum = summarize(&ehrenfest_residuals(&tr.records)?);
            Ok(vec![Check::below(format!("harmonic D={d} r2"), sum.r2_abs, 1e-5, s)])
        }
    })
}

fn gauge_equivalence(s: f64) -> Result<Vec<Check>> {
    let models = vec![
        EntropyModel::bg(),
        EntropyModel::tsallis(1.5)?,
        EntropyModel::eip(0.5, DriftChoice::Linear)?,
    ];
    collect(models, |model| {
        let scn = packet(model.clone(), 0.1, 256, 20.0, 1.0, 10)?;
        let rep = gauge_check(&scn, 10)?;
        Ok(vec![Check::below(format!("{} linf", label(&model)), rep.max_linf, 1e-4, s)])
    })
}

fn linearization_chain(s: f64) -> Result<Vec<Check>> {
    let scn = packet(EntropyModel::bg(), 0.3, 512, 20.0, 1.0, 10)?;
    let rep = dg_chain(&scn)?;
    Ok(vec![
        Check::below("|kbar-0.8|", (rep.reduced_hbar - 0.8).abs(), 1e-12, s),
        Check::below("l2 phi/chi", rep.l2_phi_chi, 1e-3, s),
        Check::below("l2 psi/chi", rep.l2_psi_chi, 1e-3, s),
    ])
}

fn dispersion(s: f64) -> Result<Vec<Check>> {
    let cases = vec![
        (EntropyModel::bg(), 1.0),
        (EntropyModel::eip(0.5, DriftChoice::Nonlinear)?, 1.0),
        (EntropyModel::eip(0.5, DriftChoice::Nonlinear)?, 0.5),
        (EntropyModel::tsallis(2.0)?, 1.0),
    ];
    collect(cases, |(model, amp)| {
        let grid = Grid1D::new(256, 20.0)?;
        let h = grid.spacing();
        let setup = DispersionSetup {
            model: model.clone(),
            grid,
            diffusion: 0.1,
            hbar: 1.0,
            mass: 1.0,
            dt: 0.1 * h * h,
            t_end: 1.0,
        };
        let row = dispersion_check(&setup, 2, amp)?;
        Ok(vec![Check::below(format!("{} A={amp} rel", label(&model)), row.rel_err, 1e-3, s)])
    })
}

fn variable_packet(diffusion: VariableDiffusion) -> Result<NseScenario> {
    let grid = Grid1D::new(1024, 40.0)?;
    let mut psi0 = gaussian_packet(&grid, 0.0, 1.0, 0.0, 1.0, 1.0)?;
    // chirp so that density gradient and velocity are correlated
    for (i, z) in psi0.values.iter_mut().enumerate() {
        let x = grid.x(i);
        *z *= Complex64::from_polar(1.0, 0.25 * x * x);
    }
    let mut scn = NseScenario {
        model: EntropyModel::bg(),
        grid,
        potential: vec![0.0; grid.len()],
        diffusion: Diffusion::Variable(diffusion),
        g_coeffs: vec![],
        hbar: 1.0,
        mass: 1.0,
        psi0,
        dt: 1.0,
        t_end: 1.0,
        cadence: 5,
        representation: Representation::Psi,
    };
    let bound = scn.stable_dt();
    scn.dt = scn.t_end / (scn.t_end / bound).ceil();
    Ok(scn)
}

fn rel_max(rows: &[crate::diagnostics::ResidualRow], r: impl Fn(&crate::diagnostics::ResidualRow) -> (f64, f64)) -> f64 {
    let num = rows.iter().map(|x| r(x).0.abs()).fold(0.0, f64::max);
    let den = rows.iter().map(|x| r(x).1.abs()).fold(0.0, f64::max);
    num / den
}

fn variable_diffusion(s: f64) -> Result<Vec<Check>> {
    let (temporal, spatial) = rayon::join(
        || -> Result<Vec<Check>> {
            let scn = variable_packet(VariableDiffusion::temporal_sine(0.3, 0.1, 1.0))?;
            let tr = evolve_with(&scn, Dynamics::Canonical, 0)?;
            let rows = variable_d_residuals(&tr.records, MomentumSign::AsPrinted)?;
            Ok(vec![Check::below("D(t) dE/dt rel", rel_max(&rows, |r| (r.r4, r.pred4)), 1e-3, s)])
        },
        || -> Result<Vec<Check>> {
            let scn = variable_packet(VariableDiffusion::spatial_sine(0.3, 0.1, 40.0))?;
            let tr = evolve_with(&scn, Dynamics::Canonical, 0)?;
            // F = 0, so pred2 is the diffusive source alone
            let printed = variable_d_residuals(&tr.records, MomentumSign::AsPrinted)?;
            let flipped = variable_d_residuals(&tr.records, MomentumSign::Flipped)?;
            Ok(vec![
                Check::below("D(x) dp/dt rel", rel_max(&printed, |r| (r.r2, r.pred2)), 1e-3, s),
                Check::below("D(x) dp/dt rel, + sign", rel_max(&flipped, |r| (r.r2, r.pred2)), 1e-3, s),
            ])
        },
    );
    let mut out = temporal?;
    out.extend(spatial?);
    Ok(out)
}

// ---- static checks ----

fn catalog_limits(s: f64) -> Result<Vec<Check>> {
    let eps = 1e-4;
    let rhos = log_grid(1e-2, 10.0, 200);
    let mut out = Vec::new();
    for model in [
        EntropyModel::two_param(eps, eps)?,
        EntropyModel::tsallis(1.0 + eps)?,
        EntropyModel::kaniadakis(eps)?,
    ] {
        let fun = model.functionals();
        let dev = rhos.iter().map(|&r| (fun.f(r) - 1.0).abs()).fold(0.0, f64::max);
        out.push(Check::below(format!("{} f-1", label(&model)), dev, 1e-3, s));
    }
    let models = vec![
        EntropyModel::bg(),
        EntropyModel::two_param(0.5, 0.25)?,
        EntropyModel::two_param(0.2, -0.5)?,
        EntropyModel::tsallis(1.5)?,
        EntropyModel::tsallis(0.5)?,
        EntropyModel::kaniadakis(0.5)?,
        EntropyModel::eip(0.5, DriftChoice::Linear)?,
        EntropyModel::eip(-0.5, DriftChoice::Nonlinear)?,
    ];
    let rhos = log_grid(1e-2, 1.5, 60);
    let mut worst: f64 = 0.0;
    for model in &models {
        let fun = model.functionals();
        for &r in &rhos {
            let h = 1e-4 * r;
            let fd = |g: &dyn Fn(f64) -> f64| (g(r + h) - g(r - h)) / (2.0 * h);
            let pairs = [
                (model.d_ln_kappa(r), fd(&|x| model.ln_kappa(x))),
                (model.d2_ln_kappa(r), fd(&|x| model.d_ln_kappa(x))),
                (model.d_gamma(r), fd(&|x| model.gamma(x))),
                (model.ln_kappa(r), fd(&|x| model.entropy_density(x))),
                (fun.f(r), fd(&|x| fun.big_f(x))),
                (2.0 * fun.f2(r), fd(&|x| fun.f1(x))),
                (2.0 * fun.f2_tilde(r), fd(&|x| fun.f1_tilde(x))),
            ];
            for (a, b) in pairs {
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
        }
    }
    out.push(Check::below("derivatives vs finite differences", worst, 1e-6, s));
    Ok(out)
}

fn random_field(grid: &Grid2D, rng: &mut ChaCha8Rng, amp: f64) -> Vec<f64> {
    let modes: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                rng.random_range(-3..=3) as f64,
                rng.random_range(-3..=3) as f64,
                amp * rng.random_range(-1.0..1.0),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let (lx, ly) = (grid.x.length(), grid.y.length());
    grid.sample(|x, y| {
        modes
            .iter()
            .map(|(a, b, c, p)| c * (2.0 * PI * (a * x / lx + b * y / ly) + p).cos())
            .sum()
    })
}

fn vorticity(s: f64, seed: u64) -> Result<Vec<Check>> {
    let grid = Grid2D::new(64, 64, 10.0, 10.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eip_gap: f64 = 0.0;
    let mut bg_max: f64 = 0.0;
    for _ in 0..8 {
        let rho: Vec<f64> = random_field(&grid, &mut rng, 0.4).into_iter().map(|v| 0.05 * v.exp()).collect();
        let sigma = random_field(&grid, &mut rng, 1.0);
        for kappa in [0.5, -0.5] {
            let model = EntropyModel::eip(kappa, DriftChoice::Nonlinear)?;
            let a = vorticity_2d(&model, &grid, &rho, &sigma, 1.0)?;
            let b = vorticity_eip(kappa, &grid, &rho, &sigma, 1.0)?;
            let gap = a.iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            eip_gap = eip_gap.max(gap);
        }
        let w = vorticity_2d(&EntropyModel::bg(), &grid, &rho, &sigma, 1.0)?;
        bg_max = bg_max.max(w.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    Ok(vec![
        Check::below("eip general vs closed form", eip_gap, 1e-8, s),
        Check::below("linear drift |w|", bg_max, 1e-10, s),
    ])
}
