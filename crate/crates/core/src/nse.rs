//! Canonical nonlinear Schroedinger evolution with the complex nonlinearity
//! W + iW', in the wavefunction and in the hydrodynamic representation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::diagnostics::{record_from_psi, DiagnosticsRecord, VariableDiffusion};
use crate::entropy::{log_grid, EntropyModel};
use crate::error::{Error, Result};
use crate::grid::{
    d1, d1_phase, d2, find_node, polar_compose, polar_decompose, quantum_potential, ComplexWavefunction,
    Grid1D, HydroPair,
};
use crate::ode::rk4_step;

pub const DISPERSIVE_FACTOR: f64 = 0.2;
const NORM_DRIFT_LIMIT: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Psi,
    Hydro,
}

#[derive(Clone, Debug)]
pub enum Diffusion {
    Constant(f64),
    Variable(VariableDiffusion),
}

impl Diffusion {
    pub fn sample(&self, grid: &Grid1D, t: f64) -> Vec<f64> {
        match self {
            Diffusion::Constant(d) => vec![*d; grid.len()],
            Diffusion::Variable(v) => grid.sample(|x| v.value(t, x)),
        }
    }

    /// Upper bound of |D| used for step-size checks.
    pub fn max_abs(&self, grid: &Grid1D, t_end: f64) -> f64 {
        match self {
            Diffusion::Constant(d) => d.abs(),
            Diffusion::Variable(v) => {
                let mut m: f64 = 0.0;
                for k in 0..=64 {
                    let t = t_end * k as f64 / 64.0;
                    for x in grid.coords() {
                        m = m.max(v.value(t, x).abs());
                    }
                }
                m
            }
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Diffusion::Constant(d) => Some(*d),
            Diffusion::Variable(_) => None,
        }
    }
}

/// Which nonlinearity drives the wavefunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dynamics {
    /// Diffusive canonical equation for psi.
    Canonical,
    /// Gauge-transformed equation for phi; `drop_ubar` removes the m D^2 term.
    Gauged { drop_ubar: bool },
}

#[derive(Clone, Debug)]
pub struct NseScenario {
    pub model: EntropyModel,
    pub grid: Grid1D,
    pub potential: Vec<f64>,
    pub diffusion: Diffusion,
    /// G(rho) = sum c_n rho^n
    pub g_coeffs: Vec<f64>,
    pub hbar: f64,
    pub mass: f64,
    pub psi0: ComplexWavefunction,
    pub dt: f64,
    pub t_end: f64,
    pub cadence: usize,
    pub representation: Representation,
}

impl NseScenario {
    pub fn g(&self, rho: f64) -> f64 {
        self.g_coeffs.iter().rev().fold(0.0, |acc, c| acc * rho + c)
    }

    /// U~ with U~' = G and U~(0) = 0.
    pub fn u_tilde(&self, rho: f64) -> f64 {
        self.g_coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * rho.powi(n as i32 + 1) / (n as f64 + 1.0))
            .sum()
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Largest stable dt for the dispersive and diffusive parts.
    pub fn stable_dt(&self) -> f64 {
        let h = self.grid.spacing();
        let mut bound = DISPERSIVE_FACTOR * self.mass * h * h / self.hbar;
        let dmax = self.diffusion.max_abs(&self.grid, self.t_end);
        if dmax > 0.0 {
            let fmax = self.f_samples().into_iter().map(|(_, f)| f.abs()).fold(0.0, f64::max);
            bound = bound.min(DISPERSIVE_FACTOR * h * h / (dmax * fmax.max(1e-300)));
        }
        bound
    }

    fn f_samples(&self) -> Vec<(f64, f64)> {
        let rmax = self.psi0.values.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        let fun = self.model.functionals();
        log_grid(self.model.rho_floor(), (1.5 * rmax).max(self.model.rho_floor() * 2.0), 200)
            .into_iter()
            .map(|r| (r, fun.f(r)))
            .collect()
    }

    /// Fails where 2 m D f(rho)/hbar >= sqrt(gamma/rho): the linearized
    /// evolution then has real exponential growth rates.
    pub fn check_well_posed(&self) -> Result<()> {
        let dmax = self.diffusion.max_abs(&self.grid, self.t_end);
        if dmax == 0.0 {
            return Ok(());
        }
        for (r, f) in self.f_samples() {
            let lhs = 2.0 * self.mass * dmax * f.abs() / self.hbar;
            let rhs = (self.model.gamma(r) / r).sqrt();
            if !(lhs < rhs) {
                return Err(Error::Config(format!(
                    "ill-posed evolution: 2mDf/hbar = {lhs:.4} >= sqrt(gamma/rho) = {rhs:.4} at rho = {r:.3e}"
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if self.psi0.grid != self.grid || self.potential.len() != n {
            return Err(Error::Usage("psi0 and potential must live on the scenario grid".into()));
        }
        if !(self.hbar > 0.0 && self.mass > 0.0) {
            return Err(Error::Config("hbar and mass must be positive".into()));
        }
        if self.psi0.hbar != self.hbar || self.psi0.mass != self.mass {
            return Err(Error::Config("psi0 constants differ from the scenario".into()));
        }
        if !self.potential.iter().all(|v| v.is_finite()) {
            return Err(Error::Config("potential must be finite".into()));
        }
        let norm = self.psi0.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::Config(format!("psi0 has norm {norm}, expected 1")));
        }
        if let Some(e) = find_node(&self.grid, &self.psi0.density(), self.model.rho_floor()) {
            return Err(e);
        }
        if !(self.dt > 0.0 && self.t_end >= 0.0) || self.cadence == 0 {
            return Err(Error::Config("dt, t_end and cadence must be positive".into()));
        }
        if let Some(d) = self.diffusion.constant() {
            if d < 0.0 {
                return Err(Error::Config("diffusion must be nonnegative".into()));
            }
        }
        let bound = self.stable_dt();
        if self.dt > bound {
            return Err(Error::Config(format!(
                "dt = {} exceeds the stability bound; use dt <= {bound:.6e}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// Quantities shared by the psi-form right-hand side and the diagnostics.
pub(crate) struct Local {
    pub rho: Vec<f64>,
    pub rho_f: Vec<f64>,
    /// grad Sigma / m
    pub vel: Vec<f64>,
    pub drho: Vec<f64>,
}

pub(crate) fn local_fields(scn: &NseScenario, psi: &[Complex64]) -> Local {
    let floor = scn.model.rho_floor();
    let rho: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    let rho_f: Vec<f64> = rho.iter().map(|r| r.max(floor)).collect();
    let dpsi = d1(&scn.grid, psi);
    let vel = psi
        .iter()
        .zip(&dpsi)
        .zip(&rho_f)
        .map(|((z, dz), rf)| scn.hbar * (z.conj() * dz).im / (scn.mass * rf))
        .collect();
    let drho = d1(&scn.grid, &rho);
    Local {
        rho,
        rho_f,
        vel,
        drho,
    }
}

/// Real and imaginary parts of the nonlinearity at time t.
pub fn nonlinearity(scn: &NseScenario, dynamics: Dynamics, t: f64, psi: &[Complex64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let l = local_fields(scn, psi);
    nonlinearity_from(scn, dynamics, t, &l)
}

fn nonlinearity_from(scn: &NseScenario, dynamics: Dynamics, t: f64, l: &Local) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = &scn.grid;
    let (m, hb) = (scn.mass, scn.hbar);
    let n = l.rho.len();
    let model = &scn.model;
    let fun = model.functionals();
    let mut w: Vec<f64> = (0..n)
        .map(|i| {
            let v = l.vel[i];
            0.5 * m * (model.d_gamma(l.rho[i]) - 1.0) * v * v + scn.g(l.rho[i])
        })
        .collect();
    let mut wc = vec![0.0; n];
    if !model.has_linear_drift() {
        let q: Vec<f64> = (0..n).map(|i| (model.gamma(l.rho[i]) - l.rho[i]) * l.vel[i]).collect();
        let dq = d1(g, &q);
        for i in 0..n {
            wc[i] -= hb / (2.0 * l.rho_f[i]) * dq[i];
        }
    }
    match dynamics {
        Dynamics::Canonical => {
            let dv = scn.diffusion.sample(g, t);
            let fr: Vec<f64> = l.rho.iter().map(|&r| fun.f(r)).collect();
            let dvel: Vec<f64> = (0..n).map(|i| dv[i] * l.vel[i]).collect();
            let div_dvel = d1(g, &dvel);
            let flux: Vec<f64> = (0..n).map(|i| dv[i] * fr[i] * l.drho[i]).collect();
            let div_flux = d1(g, &flux);
            for i in 0..n {
                w[i] += m * fr[i] * div_dvel[i];
                wc[i] += hb / (2.0 * l.rho_f[i]) * div_flux[i];
            }
        }
        Dynamics::Gauged { drop_ubar } => {
            let d = scn.diffusion.constant().ok_or_else(|| {
                Error::Config("the gauge-transformed equation needs a constant diffusion".into())
            })?;
            if !drop_ubar && d != 0.0 {
                let lap = d2(g, &l.rho);
                for i in 0..n {
                    let r = l.rho[i];
                    w[i] += m * d * d * (fun.f1(r) * lap[i] + fun.f2(r) * l.drho[i] * l.drho[i]);
                }
            }
        }
    }
    Ok((w, wc))
}

fn psi_rhs_dyn(scn: &NseScenario, dynamics: Dynamics, t: f64, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    let l = local_fields(scn, psi);
    let (w, wc) = nonlinearity_from(scn, dynamics, t, &l)?;
    let lap = d2(&scn.grid, psi);
    let (m, hb) = (scn.mass, scn.hbar);
    let minus_i_over_hbar = Complex64::new(0.0, -1.0 / hb);
    Ok((0..psi.len())
        .map(|i| {
            let pot = Complex64::new(w[i] + scn.potential[i], wc[i]);
            minus_i_over_hbar * (lap[i] * (-hb * hb / (2.0 * m)) + pot * psi[i])
        })
        .collect())
}

/// d psi / dt of the canonical equation.
pub fn nse_rhs_psi(scn: &NseScenario, t: f64, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    if psi.len() != scn.grid.len() {
        return Err(Error::Usage("wavefunction does not match the grid".into()));
    }
    psi_rhs_dyn(scn, Dynamics::Canonical, t, psi)
}

/// (d rho/dt, d Sigma/dt) of the hydrodynamic equations.
pub fn nse_rhs_hydro(scn: &NseScenario, t: f64, rho: &[f64], sigma: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = &scn.grid;
    let n = g.len();
    if rho.len() != n || sigma.len() != n {
        return Err(Error::Usage("hydro fields do not match the grid".into()));
    }
    let (m, hb) = (scn.mass, scn.hbar);
    let model = &scn.model;
    let fun = model.functionals();
    let dv = scn.diffusion.sample(g, t);
    let vel: Vec<f64> = d1_phase(g, sigma, 2.0 * PI * hb).into_iter().map(|s| s / m).collect();
    let drho = d1(g, rho);
    let fr: Vec<f64> = rho.iter().map(|&r| fun.f(r)).collect();
    let current: Vec<f64> = (0..n)
        .map(|i| model.gamma(rho[i]) * vel[i] - dv[i] * fr[i] * drho[i])
        .collect();
    let rho_t: Vec<f64> = d1(g, &current).into_iter().map(|v| -v).collect();
    let dvel: Vec<f64> = (0..n).map(|i| dv[i] * vel[i]).collect();
    let div_dvel = d1(g, &dvel);
    let q = quantum_potential(g, rho, hb, m, model.rho_floor());
    let sigma_t = (0..n)
        .map(|i| {
            -(0.5 * m * vel[i] * vel[i] * model.d_gamma(rho[i])
                + q[i]
                + m * fr[i] * div_dvel[i]
                + scn.g(rho[i])
                + scn.potential[i])
        })
        .collect();
    Ok((rho_t, sigma_t))
}

/// Energy of the canonical (or gauge-transformed) equation.
pub fn hamiltonian_energy(scn: &NseScenario, t: f64, psi: &ComplexWavefunction) -> f64 {
    energy_dyn(scn, Dynamics::Canonical, t, &psi.values)
}

pub(crate) fn energy_from(scn: &NseScenario, dynamics: Dynamics, t: f64, l: &Local) -> f64 {
    let m = scn.mass;
    let hb = scn.hbar;
    let model = &scn.model;
    let fun = model.functionals();
    let n = l.rho.len();
    let extra: Vec<f64> = match dynamics {
        Dynamics::Canonical => {
            let dv = scn.diffusion.sample(&scn.grid, t);
            (0..n)
                .map(|i| -dv[i] * fun.f(l.rho[i]) * l.drho[i] * m * l.vel[i])
                .collect()
        }
        Dynamics::Gauged { drop_ubar } => {
            let d = scn.diffusion.constant().unwrap_or(0.0);
            if drop_ubar {
                vec![0.0; n]
            } else {
                (0..n)
                    .map(|i| -0.5 * m * d * d * fun.f1(l.rho[i]) * l.drho[i] * l.drho[i])
                    .collect()
            }
        }
    };
    let s: f64 = (0..n)
        .map(|i| {
            let r = l.rho[i];
            0.5 * m * l.vel[i] * l.vel[i] * model.gamma(r)
                + hb * hb / (8.0 * m) * l.drho[i] * l.drho[i] / l.rho_f[i]
                + extra[i]
                + scn.u_tilde(r)
                + scn.potential[i] * r
        })
        .sum();
    s * scn.grid.spacing()
}

pub(crate) fn energy_dyn(scn: &NseScenario, dynamics: Dynamics, t: f64, psi: &[Complex64]) -> f64 {
    energy_from(scn, dynamics, t, &local_fields(scn, psi))
}

#[derive(Clone, Debug)]
pub struct NseTrajectory {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<(f64, ComplexWavefunction)>,
    pub final_state: ComplexWavefunction,
    pub steps: usize,
}

/// Evolves the canonical equation in the scenario's representation.
pub fn evolve_nse(scn: &NseScenario) -> Result<NseTrajectory> {
    evolve_with(scn, Dynamics::Canonical, 0)
}

/// Evolves with the given dynamics. A snapshot is stored every
/// `snapshot_every` steps (0 keeps only the initial and final states).
pub fn evolve_with(scn: &NseScenario, dynamics: Dynamics, snapshot_every: usize) -> Result<NseTrajectory> {
    scn.validate()?;
    if dynamics != (Dynamics::Gauged { drop_ubar: true }) {
        scn.check_well_posed()?;
    }
    if scn.representation == Representation::Hydro && dynamics != Dynamics::Canonical {
        return Err(Error::Usage("the hydrodynamic representation only runs the canonical equation".into()));
    }
    let steps = scn.steps();
    let dt = scn.dt;
    let floor = scn.model.rho_floor();
    let mut records = vec![record_from_psi(scn, dynamics, 0.0, &scn.psi0.values)];
    let mut snapshots = vec![(0.0, scn.psi0.clone())];
    let want_snap = |step: usize| snapshot_every > 0 && step.is_multiple_of(snapshot_every);

    let finish = |step: usize, t: f64, psi: &[Complex64]| -> Result<f64> {
        if !psi.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Integration {
                step,
                t,
                reason: "non-finite wavefunction".into(),
            });
        }
        let norm = scn.grid.integrate(&psi.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
        if (norm - 1.0).abs() > NORM_DRIFT_LIMIT {
            return Err(Error::Integration {
                step,
                t,
                reason: format!("norm drifted to {norm}"),
            });
        }
        Ok(norm)
    };

    let to_wf = |values: Vec<Complex64>| ComplexWavefunction {
        grid: scn.grid,
        values,
        hbar: scn.hbar,
        mass: scn.mass,
    };

    let final_values = match scn.representation {
        Representation::Psi => {
            let mut psi = scn.psi0.values.clone();
            let mut rhs = |t: f64, y: &Vec<Complex64>| psi_rhs_dyn(scn, dynamics, t, y);
            for step in 1..=steps {
                let t = step as f64 * dt;
                psi = rk4_step(&psi, t - dt, dt, &mut rhs)?;
                finish(step, t, &psi)?;
                if step % scn.cadence == 0 || step == steps {
                    if let Some(e) = find_node(&scn.grid, &psi.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>(), floor) {
                        return Err(node_during(step, t, e));
                    }
                    records.push(record_from_psi(scn, dynamics, t, &psi));
                }
                if want_snap(step) {
                    snapshots.push((t, to_wf(psi.clone())));
                }
            }
            psi
        }
        Representation::Hydro => {
            let hp = polar_decompose(&scn.psi0, floor)?;
            let mut y = (hp.rho, hp.sigma);
            let mut rhs = |t: f64, s: &(Vec<f64>, Vec<f64>)| nse_rhs_hydro(scn, t, &s.0, &s.1);
            let compose = |y: &(Vec<f64>, Vec<f64>)| {
                polar_compose(&HydroPair {
                    grid: scn.grid,
                    rho: y.0.clone(),
                    sigma: y.1.clone(),
                    hbar: scn.hbar,
                    mass: scn.mass,
                })
                .values
            };
            for step in 1..=steps {
                let t = step as f64 * dt;
                y = rk4_step(&y, t - dt, dt, &mut rhs)?;
                let psi = compose(&y);
                finish(step, t, &psi)?;
                if step % scn.cadence == 0 || step == steps {
                    records.push(record_from_psi(scn, dynamics, t, &psi));
                }
                if want_snap(step) {
                    snapshots.push((t, to_wf(psi)));
                }
            }
            compose(&y)
        }
    };
    let final_state = to_wf(final_values);
    if snapshots.last().map(|s| s.0) != Some(steps as f64 * dt) {
        snapshots.push((steps as f64 * dt, final_state.clone()));
    }
    Ok(NseTrajectory {
        records,
        snapshots,
        final_state,
        steps,
    })
}

fn node_during(step: usize, t: f64, e: Error) -> Error {
    match e {
        Error::Node { index, x, rho } => Error::Integration {
            step,
            t,
            reason: format!("node formed at index {index} (x = {x}), rho = {rho:e}"),
        },
        other => other,
    }
}

/// Normalized Gaussian packet with density standard deviation `width` and
/// wavenumber `k`.
pub fn gaussian_packet(grid: &Grid1D, center: f64, width: f64, k: f64, hbar: f64, mass: f64) -> Result<ComplexWavefunction> {
    if !(width > 0.0) {
        return Err(Error::Config("packet width must be positive".into()));
    }
    let values = (0..grid.len())
        .map(|i| {
            let x = grid.x(i) - center;
            Complex64::from_polar((-x * x / (4.0 * width * width)).exp(), k * x)
        })
        .collect();
    let mut psi = ComplexWavefunction::new(*grid, values, hbar, mass)?;
    psi.normalize();
    Ok(psi)
}

/// Plane wave of amplitude A in mode j, with |psi|^2 = A^2.
pub fn plane_wave(grid: &Grid1D, mode: i64, amplitude: f64, hbar: f64, mass: f64) -> Result<ComplexWavefunction> {
    let k = grid.wavenumber(mode);
    let values = grid
        .coords()
        .into_iter()
        .map(|x| Complex64::from_polar(amplitude, k * x))
        .collect();
    ComplexWavefunction::new(*grid, values, hbar, mass)
}

/// Diagnostics CSV for an NSE run.
pub fn trajectory_csv(traj: &NseTrajectory) -> String {
    let mut s = String::from("t,norm,energy,x_mean,p_mean,r1,r2,r4\n");
    let f = |o: Option<f64>| o.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in &traj.records {
        s.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e},{},{},{}\n",
            r.t,
            r.norm,
            r.energy,
            r.x_mean,
            r.p_mean,
            f(r.r1),
            f(r.r2),
            f(r.r4)
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::DriftChoice;

    pub(crate) fn packet_scenario(model: EntropyModel, d: f64, k: f64) -> NseScenario {
        let grid = Grid1D::new(512, 20.0).unwrap();
        let psi0 = gaussian_packet(&grid, 0.0, 1.0, k, 1.0, 1.0).unwrap();
        NseScenario {
            model,
            potential: vec![0.0; 512],
            grid,
            diffusion: Diffusion::Constant(d),
            g_coeffs: vec![],
            hbar: 1.0,
            mass: 1.0,
            psi0,
            dt: 2e-4,
            t_end: 0.02,
            cadence: 10,
            representation: Representation::Psi,
        }
    }

    #[test]
    fn linear_case_has_no_nonlinearity() {
        let scn = packet_scenario(EntropyModel::bg(), 0.0, 1.0);
        let (w, wc) = nonlinearity(&scn, Dynamics::Canonical, 0.0, &scn.psi0.values).unwrap();
        assert!(w.iter().chain(&wc).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn free_packet_spreading() {
        // |psi|^2 of a free Gaussian: width s(t) = s0 sqrt(1 + (hbar t / (2 m s0^2))^2).
        let mut scn = packet_scenario(EntropyModel::bg(), 0.0, 0.0);
        scn.t_end = 1.0;
        scn.dt = 2.5e-4;
        let traj = evolve_nse(&scn).unwrap();
        let st = (1.0f64 + 0.25).sqrt();
        let g = scn.grid;
        let rho = traj.final_state.density();
        for (i, r) in rho.iter().enumerate() {
            let x = g.x(i);
            let exact = (-x * x / (2.0 * st * st)).exp() / (2.0 * PI * st * st).sqrt();
            assert!((r - exact).abs() < 1e-7, "x={x}");
        }
    }

    #[test]
    fn hydro_rhs_matches_psi_rhs() {
        let scn = packet_scenario(EntropyModel::eip(0.5, DriftChoice::Nonlinear).unwrap(), 0.1, 1.0);
        let psi = &scn.psi0;
        let hp = polar_decompose(psi, 1e-12).unwrap();
        let dpsi = nse_rhs_psi(&scn, 0.0, &psi.values).unwrap();
        let (rt, _) = nse_rhs_hydro(&scn, 0.0, &hp.rho, &hp.sigma).unwrap();
        for i in 0..psi.values.len() {
            let from_psi = 2.0 * (psi.values[i].conj() * dpsi[i]).re;
            assert!((from_psi - rt[i]).abs() < 1e-5, "i={i}: {from_psi} vs {}", rt[i]);
        }
    }

    #[test]
    fn ill_posed_is_rejected() {
        let scn = packet_scenario(EntropyModel::kaniadakis(0.5).unwrap(), 0.5, 0.0);
        assert!(matches!(scn.check_well_posed(), Err(Error::Config(_))));
        let ok = packet_scenario(EntropyModel::bg(), 0.3, 0.0);
        assert!(ok.check_well_posed().is_ok());
    }

    #[test]
    fn stability_bound_reported() {
        let mut scn = packet_scenario(EntropyModel::bg(), 0.1, 0.0);
        scn.dt = 0.01;
        match scn.validate() {
            Err(Error::Config(msg)) => assert!(msg.contains("dt <=")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn g_polynomial() {
        let mut scn = packet_scenario(EntropyModel::bg(), 0.0, 0.0);
        scn.g_coeffs = vec![1.0, 2.0, 3.0];
        assert_eq!(scn.g(2.0), 1.0 + 4.0 + 12.0);
        assert!((scn.u_tilde(2.0) - (2.0 + 4.0 + 8.0)).abs() < 1e-14);
    }
}
