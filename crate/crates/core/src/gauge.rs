//! The nonlinear gauge map psi -> phi = psi exp(-(i/hbar) m D ln kappa(rho))
//! and the Doebner-Goldin linearization for the BG entropy.

use num_complex::Complex64;

use crate::entropy::{EntropyKind, EntropyModel};
use crate::error::{Error, Result};
use crate::grid::{d1, find_node, polar_compose, polar_decompose, ComplexWavefunction, Grid1D};
use crate::nfpe::l2_distance;
use crate::nse::{energy_dyn, evolve_with, nonlinearity, Diffusion, Dynamics, NseScenario, NseTrajectory, Representation};

fn rotate(psi: &ComplexWavefunction, model: &EntropyModel, diffusion: f64, sign: f64) -> ComplexWavefunction {
    let c = sign * psi.mass * diffusion / psi.hbar;
    let values = psi
        .values
        .iter()
        .map(|z| z * Complex64::from_polar(1.0, c * model.ln_kappa(z.norm_sqr())))
        .collect();
    ComplexWavefunction {
        values,
        ..psi.clone()
    }
}

/// phi = psi exp(-(i/hbar) m D ln kappa(|psi|^2))
pub fn gauge_forward(psi: &ComplexWavefunction, model: &EntropyModel, diffusion: f64) -> Result<ComplexWavefunction> {
    if let Some(e) = find_node(&psi.grid, &psi.density(), model.rho_floor()) {
        return Err(e);
    }
    Ok(rotate(psi, model, diffusion, -1.0))
}

pub fn gauge_inverse(phi: &ComplexWavefunction, model: &EntropyModel, diffusion: f64) -> Result<ComplexWavefunction> {
    if let Some(e) = find_node(&phi.grid, &phi.density(), model.rho_floor()) {
        return Err(e);
    }
    Ok(rotate(phi, model, diffusion, 1.0))
}

/// A wavefunction together with its gauge-transformed partner.
#[derive(Clone, Debug)]
pub struct GaugePair {
    pub original: ComplexWavefunction,
    pub transformed: ComplexWavefunction,
    pub model: EntropyModel,
    pub diffusion: f64,
}

impl GaugePair {
    pub fn new(psi: ComplexWavefunction, model: EntropyModel, diffusion: f64) -> Result<Self> {
        let transformed = gauge_forward(&psi, &model, diffusion)?;
        Ok(Self {
            original: psi,
            transformed,
            model,
            diffusion,
        })
    }

    /// max_x ||psi|^2 - |phi|^2|
    pub fn amplitude_mismatch(&self) -> f64 {
        self.original
            .values
            .iter()
            .zip(&self.transformed.values)
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max)
    }
}

fn velocity(grid: &Grid1D, psi: &[Complex64], hbar: f64, mass: f64, floor: f64) -> Vec<f64> {
    let dpsi = d1(grid, psi);
    psi.iter()
        .zip(&dpsi)
        .map(|(z, dz)| hbar * (z.conj() * dz).im / (mass * z.norm_sqr().max(floor)))
        .collect()
}

/// Total current of the canonical equation, gamma grad Sigma / m - D f grad rho.
pub fn canonical_current(model: &EntropyModel, psi: &ComplexWavefunction, diffusion: f64) -> Vec<f64> {
    let rho = psi.density();
    let v = velocity(&psi.grid, &psi.values, psi.hbar, psi.mass, model.rho_floor());
    let drho = d1(&psi.grid, &rho);
    let fun = model.functionals();
    (0..rho.len())
        .map(|i| model.gamma(rho[i]) * v[i] - diffusion * fun.f(rho[i]) * drho[i])
        .collect()
}

/// Current of the transformed equation, gamma grad sigma / m.
pub fn transformed_current(model: &EntropyModel, phi: &ComplexWavefunction) -> Vec<f64> {
    let v = velocity(&phi.grid, &phi.values, phi.hbar, phi.mass, model.rho_floor());
    phi.density().iter().zip(&v).map(|(&r, v)| model.gamma(r) * v).collect()
}

/// Classical currents before and after the drift shift u -> u - D grad ln kappa:
/// (gamma u - D f grad rho, gamma (u - D grad ln kappa(rho))).
pub fn classical_currents(model: &EntropyModel, grid: &Grid1D, rho: &[f64], u: &[f64], diffusion: f64) -> (Vec<f64>, Vec<f64>) {
    let fun = model.functionals();
    let drho = d1(grid, rho);
    let lk: Vec<f64> = rho.iter().map(|&r| model.ln_kappa(r)).collect();
    let dlk = d1(grid, &lk);
    let j = (0..rho.len())
        .map(|i| model.gamma(rho[i]) * u[i] - diffusion * fun.f(rho[i]) * drho[i])
        .collect();
    let jt = (0..rho.len())
        .map(|i| model.gamma(rho[i]) * (u[i] - diffusion * dlk[i]))
        .collect();
    (j, jt)
}

/// Energy density difference between the two transformed Hamiltonians,
/// -(m D^2 / 2) f1 (grad rho)^2.
pub fn ubar_density(model: &EntropyModel, grid: &Grid1D, rho: &[f64], diffusion: f64, mass: f64) -> Vec<f64> {
    let fun = model.functionals();
    let drho = d1(grid, rho);
    rho.iter()
        .zip(&drho)
        .map(|(&r, g)| -0.5 * mass * diffusion * diffusion * fun.f1(r) * g * g)
        .collect()
}

/// Energy of the transformed equation at phi.
pub fn transformed_energy(scn: &NseScenario, phi: &ComplexWavefunction, drop_ubar: bool) -> f64 {
    energy_dyn(scn, Dynamics::Gauged { drop_ubar }, 0.0, &phi.values)
}

/// Real and imaginary nonlinearities of the transformed equation at phi.
pub fn transformed_nonlinearities(
    scn: &NseScenario,
    phi: &ComplexWavefunction,
    drop_ubar: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    nonlinearity(scn, Dynamics::Gauged { drop_ubar }, 0.0, &phi.values)
}

/// Evolves phi_0 = gauge_forward(psi_0) with the transformed equation.
pub fn evolve_transformed(scn: &NseScenario, drop_ubar: bool, snapshot_every: usize) -> Result<NseTrajectory> {
    let d = scn
        .diffusion
        .constant()
        .ok_or_else(|| Error::Config("the gauge map needs a constant diffusion".into()))?;
    let mut s = scn.clone();
    s.psi0 = gauge_forward(&scn.psi0, &scn.model, d)?;
    s.representation = Representation::Psi;
    evolve_with(&s, Dynamics::Gauged { drop_ubar }, snapshot_every)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeReport {
    /// (t, max_x |rho_psi - rho_phi|)
    pub rows: Vec<(f64, f64)>,
    pub max_linf: f64,
}

/// Runs the canonical and the transformed evolutions side by side and
/// compares densities every `compare_every` steps.
pub fn gauge_check(scn: &NseScenario, compare_every: usize) -> Result<GaugeReport> {
    if compare_every == 0 {
        return Err(Error::Usage("compare_every must be positive".into()));
    }
    let mut canon = scn.clone();
    canon.representation = Representation::Psi;
    let (a, b) = rayon::join(
        || evolve_with(&canon, Dynamics::Canonical, compare_every),
        || evolve_transformed(scn, false, compare_every),
    );
    let (a, b) = (a?, b?);
    let rows: Vec<(f64, f64)> = a
        .snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|((t, p), (_, f))| {
            let d = p
                .values
                .iter()
                .zip(&f.values)
                .map(|(x, y)| (x.norm_sqr() - y.norm_sqr()).abs())
                .fold(0.0, f64::max);
            (*t, d)
        })
        .collect();
    let max_linf = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(GaugeReport { rows, max_linf })
}

pub fn gauge_csv(report: &GaugeReport) -> String {
    let mut s = String::from("t,linf\n");
    for (t, d) in &report.rows {
        s.push_str(&format!("{t:e},{d:e}\n"));
    }
    s
}

/// hbar sqrt(1 - (2 m D / hbar)^2)
pub fn reduced_hbar(hbar: f64, mass: f64, diffusion: f64) -> Result<f64> {
    let a = 2.0 * mass * diffusion / hbar;
    if !(a.abs() < 1.0) {
        return Err(Error::Config(format!(
            "linearization needs 2mD/hbar < 1, got {a}"
        )));
    }
    Ok(hbar * (1.0 - a * a).sqrt())
}

/// chi = sqrt(rho) exp(i sigma / k), with k the reduced constant; the
/// returned wavefunction carries `hbar = k`.
pub fn dg_linearize(phi: &ComplexWavefunction, diffusion: f64, rho_floor: f64) -> Result<ComplexWavefunction> {
    let k = reduced_hbar(phi.hbar, phi.mass, diffusion)?;
    let mut hp = polar_decompose(phi, rho_floor)?;
    hp.hbar = k;
    Ok(polar_compose(&hp))
}

/// Inverse of `dg_linearize`.
pub fn dg_delinearize(chi: &ComplexWavefunction, hbar: f64, rho_floor: f64) -> Result<ComplexWavefunction> {
    let mut hp = polar_decompose(chi, rho_floor)?;
    hp.hbar = hbar;
    Ok(polar_compose(&hp))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DgReport {
    pub t: f64,
    pub reduced_hbar: f64,
    pub l2_psi_phi: f64,
    pub l2_phi_chi: f64,
    pub l2_psi_chi: f64,
}

/// Three-way comparison for the BG entropy: the canonical equation for psi,
/// the transformed equation for phi and the linear equation with the reduced
/// constant for chi, all compared through their densities at t_end.
pub fn dg_chain(scn: &NseScenario) -> Result<DgReport> {
    if scn.model.kind() != EntropyKind::Bg || !scn.model.has_linear_drift() {
        return Err(Error::Config("the linearization chain is defined for the BG entropy".into()));
    }
    let d = scn
        .diffusion
        .constant()
        .ok_or_else(|| Error::Config("the linearization chain needs a constant diffusion".into()))?;
    if !scn.g_coeffs.is_empty() {
        return Err(Error::Config("the linearization chain needs G = 0".into()));
    }
    let k = reduced_hbar(scn.hbar, scn.mass, d)?;
    let floor = scn.model.rho_floor();
    let phi0 = gauge_forward(&scn.psi0, &scn.model, d)?;
    let chi0 = dg_linearize(&phi0, d, floor)?;

    let mut lin = scn.clone();
    lin.diffusion = Diffusion::Constant(0.0);
    lin.hbar = k;
    lin.psi0 = chi0;
    lin.representation = Representation::Psi;
    lin.dt = scn.dt.min(lin.stable_dt());
    let lin_steps = (scn.t_end / lin.dt).ceil();
    lin.dt = scn.t_end / lin_steps;

    let mut canon = scn.clone();
    canon.representation = Representation::Psi;
    let ((a, b), c) = rayon::join(
        || {
            rayon::join(
                || evolve_with(&canon, Dynamics::Canonical, 0),
                || evolve_transformed(scn, false, 0),
            )
        },
        || evolve_with(&lin, Dynamics::Canonical, 0),
    );
    let (a, b, c) = (a?, b?, c?);
    let chi_back = dg_delinearize(&c.final_state, scn.hbar, floor)?;
    let (ra, rb, rc) = (
        a.final_state.density(),
        b.final_state.density(),
        chi_back.density(),
    );
    let g: &Grid1D = &scn.grid;
    Ok(DgReport {
        t: scn.t_end,
        reduced_hbar: k,
        l2_psi_phi: l2_distance(g, &ra, &rb),
        l2_phi_chi: l2_distance(g, &rb, &rc),
        l2_psi_chi: l2_distance(g, &ra, &rc),
    })
}
