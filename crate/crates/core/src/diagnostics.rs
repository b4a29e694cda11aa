//! Observables, Ehrenfest-type residuals, dispersion measurement, the
//! stationary relation and static 2D vorticity.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::entropy::EntropyModel;
use crate::error::{Error, Result};
use crate::grid::{boundary_density, d1, ComplexWavefunction, Grid1D, Grid2D};
use crate::nfpe::equilibrium_density;
use crate::nse::{energy_from, local_fields, plane_wave, Diffusion, Dynamics, NseScenario, Representation};
use crate::ode::rk4_step;

type Field2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Diffusion coefficient D(t, x) with its partial derivatives.
#[derive(Clone)]
pub struct VariableDiffusion {
    label: String,
    value: Field2,
    dt: Field2,
    dx: Field2,
}

impl fmt::Debug for VariableDiffusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VariableDiffusion({})", self.label)
    }
}

impl VariableDiffusion {
    pub fn new(label: impl Into<String>, value: Field2, dt: Field2, dx: Field2) -> Self {
        VariableDiffusion {
            label: label.into(),
            value,
            dt,
            dx,
        }
    }

    /// D0 (1 + eps sin(omega t))
    pub fn temporal_sine(d0: f64, eps: f64, omega: f64) -> Self {
        Self::new(
            format!("{d0}*(1+{eps}*sin({omega}*t))"),
            Arc::new(move |t, _| d0 * (1.0 + eps * (omega * t).sin())),
            Arc::new(move |t, _| d0 * eps * omega * (omega * t).cos()),
            Arc::new(|_, _| 0.0),
        )
    }

    /// D0 (1 + eps sin(2 pi x / wavelength))
    pub fn spatial_sine(d0: f64, eps: f64, wavelength: f64) -> Self {
        let k = 2.0 * std::f64::consts::PI / wavelength;
        Self::new(
            format!("{d0}*(1+{eps}*sin({k}*x))"),
            Arc::new(move |_, x| d0 * (1.0 + eps * (k * x).sin())),
            Arc::new(|_, _| 0.0),
            Arc::new(move |_, x| d0 * eps * k * (k * x).cos()),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        (self.value)(t, x)
    }

    pub fn d_dt(&self, t: f64, x: f64) -> f64 {
        (self.dt)(t, x)
    }

    pub fn d_dx(&self, t: f64, x: f64) -> f64 {
        (self.dx)(t, x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
    pub x_mean: f64,
    pub p_mean: f64,
    /// int gamma grad Sigma / m
    pub drift_flux: f64,
    /// int D f grad rho
    pub diffusive_flux: f64,
    /// -int rho grad V
    pub force_mean: f64,
    /// m <A grad D>
    pub a_grad_d: f64,
    /// m <A dD/dt>
    pub a_dt_d: f64,
    pub boundary_density: f64,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub r4: Option<f64>,
}

pub(crate) fn record_from_psi(scn: &NseScenario, dynamics: Dynamics, t: f64, psi: &[Complex64]) -> DiagnosticsRecord {
    let g = &scn.grid;
    let h = g.spacing();
    let l = local_fields(scn, psi);
    let fun = scn.model.functionals();
    let dpsi = d1(g, psi);
    let dv = d1(g, &scn.potential);
    let n = psi.len();
    let (ddx, ddt): (Vec<f64>, Vec<f64>) = match &scn.diffusion {
        Diffusion::Constant(_) => (vec![0.0; n], vec![0.0; n]),
        Diffusion::Variable(v) => (
            g.sample(|x| v.d_dx(t, x)),
            g.sample(|x| v.d_dt(t, x)),
        ),
    };
    let dval = scn.diffusion.sample(g, t);
    let mut rec = DiagnosticsRecord {
        t,
        norm: 0.0,
        energy: energy_from(scn, dynamics, t, &l),
        x_mean: 0.0,
        p_mean: 0.0,
        drift_flux: 0.0,
        diffusive_flux: 0.0,
        force_mean: 0.0,
        a_grad_d: 0.0,
        a_dt_d: 0.0,
        boundary_density: boundary_density(&l.rho),
        r1: None,
        r2: None,
        r4: None,
    };
    for i in 0..n {
        let r = l.rho[i];
        let fa = fun.f(r) * l.drho[i] * l.vel[i] * scn.mass;
        rec.norm += r;
        rec.x_mean += g.x(i) * r;
        rec.p_mean += scn.hbar * (psi[i].conj() * dpsi[i]).im;
        rec.drift_flux += scn.model.gamma(r) * l.vel[i];
        rec.diffusive_flux += dval[i] * fun.f(r) * l.drho[i];
        rec.force_mean -= r * dv[i];
        rec.a_grad_d += fa * ddx[i];
        rec.a_dt_d += fa * ddt[i];
    }
    for v in [
        &mut rec.norm,
        &mut rec.x_mean,
        &mut rec.p_mean,
        &mut rec.drift_flux,
        &mut rec.diffusive_flux,
        &mut rec.force_mean,
        &mut rec.a_grad_d,
        &mut rec.a_dt_d,
    ] {
        *v *= h;
    }
    rec
}

/// Residuals at one interior record, with the predicted values used for the
/// relative forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualRow {
    pub t: f64,
    pub r1: f64,
    pub r2: f64,
    pub r4: f64,
    pub pred1: f64,
    pub pred2: f64,
    pub pred4: f64,
}

/// Summary of a residual series: max absolute residual and the same
/// divided by the largest predicted magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSummary {
    pub r1_abs: f64,
    pub r2_abs: f64,
    pub r4_abs: f64,
    pub r1_rel: f64,
    pub r2_rel: f64,
    pub r4_rel: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentumSign {
    /// d<p>/dt = <F> - m <A grad D>
    AsPrinted,
    /// d<p>/dt = <F> + m <A grad D>
    Flipped,
}

pub(crate) fn centered(records: &[DiagnosticsRecord], k: usize, q: impl Fn(&DiagnosticsRecord) -> f64) -> f64 {
    // three-point derivative at t_k, second order for uneven spacing too
    let (a, c, b) = (&records[k - 1], &records[k], &records[k + 1]);
    let (h1, h2) = (c.t - a.t, b.t - c.t);
    (-h2 / (h1 * (h1 + h2))) * q(a) + ((h2 - h1) / (h1 * h2)) * q(c) + (h1 / (h2 * (h1 + h2))) * q(b)
}

fn check_sampling(records: &[DiagnosticsRecord]) -> Result<()> {
    if records.len() < 3 {
        return Err(Error::Usage(format!(
            "residuals need at least 3 records, got {}",
            records.len()
        )));
    }
    Ok(())
}

/// Constant-D relations: d<x>/dt = int gamma grad Sigma/m,
/// d<p>/dt = -<grad V>, dE/dt = 0.
pub fn ehrenfest_residuals(records: &[DiagnosticsRecord]) -> Result<Vec<ResidualRow>> {
    check_sampling(records)?;
    Ok((1..records.len() - 1)
        .map(|k| {
            let r = &records[k];
            let dx = centered(records, k, |q| q.x_mean);
            let dp = centered(records, k, |q| q.p_mean);
            let de = centered(records, k, |q| q.energy);
            ResidualRow {
                t: r.t,
                r1: dx - r.drift_flux,
                r2: dp - r.force_mean,
                r4: de,
                pred1: r.drift_flux,
                pred2: r.force_mean,
                pred4: r.energy,
            }
        })
        .collect())
}

/// Relations for D = D(t, x): d<x>/dt = int (gamma grad Sigma/m - D f grad rho),
/// d<p>/dt = <F> -/+ m <A grad D>, dE/dt = -m <A dD/dt>.
pub fn variable_d_residuals(records: &[DiagnosticsRecord], sign: MomentumSign) -> Result<Vec<ResidualRow>> {
    check_sampling(records)?;
    let s = match sign {
        MomentumSign::AsPrinted => -1.0,
        MomentumSign::Flipped => 1.0,
    };
    Ok((1..records.len() - 1)
        .map(|k| {
            let r = &records[k];
            let dx = centered(records, k, |q| q.x_mean);
            let dp = centered(records, k, |q| q.p_mean);
            let de = centered(records, k, |q| q.energy);
            let p1 = r.drift_flux - r.diffusive_flux;
            let p2 = r.force_mean + s * r.a_grad_d;
            let p4 = -r.a_dt_d;
            ResidualRow {
                t: r.t,
                r1: dx - p1,
                r2: dp - p2,
                r4: de - p4,
                pred1: p1,
                pred2: p2,
                pred4: p4,
            }
        })
        .collect())
}

pub fn summarize(rows: &[ResidualRow]) -> ResidualSummary {
    let mx = |f: &dyn Fn(&ResidualRow) -> f64| rows.iter().map(|r| f(r).abs()).fold(0.0, f64::max);
    let (r1, r2, r4) = (mx(&|r| r.r1), mx(&|r| r.r2), mx(&|r| r.r4));
    let (p1, p2, p4) = (mx(&|r| r.pred1), mx(&|r| r.pred2), mx(&|r| r.pred4));
    let rel = |a: f64, b: f64| if b > 0.0 { a / b } else { a };
    ResidualSummary {
        r1_abs: r1,
        r2_abs: r2,
        r4_abs: r4,
        r1_rel: rel(r1, p1),
        r2_rel: rel(r2, p2),
        r4_rel: rel(r4, p4),
    }
}

/// Writes residuals into the interior records.
pub fn attach_residuals(records: &mut [DiagnosticsRecord], rows: &[ResidualRow]) {
    for (rec, row) in records[1..].iter_mut().zip(rows) {
        rec.r1 = Some(row.r1);
        rec.r2 = Some(row.r2);
        rec.r4 = Some(row.r4);
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionRow {
    pub k: f64,
    pub amplitude: f64,
    pub omega_meas: f64,
    pub omega_pred: f64,
    pub rel_err: f64,
    /// Largest relative deviation of |psi|^2 from A^2 during the run.
    pub amplitude_drift: f64,
}

pub struct DispersionSetup {
    pub model: EntropyModel,
    pub grid: Grid1D,
    pub diffusion: f64,
    pub hbar: f64,
    pub mass: f64,
    pub dt: f64,
    pub t_end: f64,
}

/// Evolves A exp(i k x) and fits the phase at x = 0 against time.
/// The prediction is omega = hbar k^2 gamma'(A^2) / (2m) with k a wavenumber.
pub fn dispersion_check(setup: &DispersionSetup, mode: i64, amplitude: f64) -> Result<DispersionRow> {
    let g = setup.grid;
    let psi0 = plane_wave(&g, mode, amplitude, setup.hbar, setup.mass)?;
    let scn = NseScenario {
        model: setup.model.clone(),
        grid: g,
        potential: vec![0.0; g.len()],
        diffusion: Diffusion::Constant(setup.diffusion),
        g_coeffs: vec![],
        hbar: setup.hbar,
        mass: setup.mass,
        psi0: psi0.clone(),
        dt: setup.dt,
        t_end: setup.t_end,
        cadence: 1,
        representation: Representation::Psi,
    };
    let bound = scn.stable_dt();
    if setup.dt > bound {
        return Err(Error::Config(format!(
            "dt = {} exceeds the stability bound; use dt <= {bound:.6e}",
            setup.dt
        )));
    }
    scn.check_well_posed()?;
    let steps = scn.steps();
    if steps < 2 {
        return Err(Error::Usage("dispersion needs at least two steps".into()));
    }
    let i0 = g.len() / 2;
    let a2 = amplitude * amplitude;
    let mut psi = psi0.values;
    let mut ts = vec![0.0];
    let mut phases = vec![psi[i0].arg()];
    let mut drift: f64 = 0.0;
    let mut rhs = |t: f64, y: &Vec<Complex64>| crate::nse::nse_rhs_psi(&scn, t, y);
    for step in 1..=steps {
        let t = step as f64 * setup.dt;
        psi = rk4_step(&psi, t - setup.dt, setup.dt, &mut rhs)?;
        let prev = *phases.last().unwrap();
        let raw = psi[i0].arg();
        let d = raw - prev;
        let unwrapped = prev + d - 2.0 * std::f64::consts::PI * (d / (2.0 * std::f64::consts::PI)).round();
        ts.push(t);
        phases.push(unwrapped);
        for z in &psi {
            drift = drift.max((z.norm_sqr() - a2).abs() / a2);
        }
        if !drift.is_finite() {
            return Err(Error::Integration {
                step,
                t,
                reason: "non-finite wavefunction".into(),
            });
        }
    }
    let slope = least_squares_slope(&ts, &phases);
    let k = g.wavenumber(mode);
    let omega_meas = -slope;
    let omega_pred = setup.hbar * k * k * setup.model.d_gamma(a2) / (2.0 * setup.mass);
    Ok(DispersionRow {
        k,
        amplitude,
        omega_meas,
        omega_pred,
        rel_err: (omega_meas - omega_pred).abs() / omega_pred.abs().max(1e-300),
        amplitude_drift: drift,
    })
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn dispersion_csv(rows: &[DispersionRow]) -> String {
    let mut s = String::from("k,A,omega_meas,omega_pred,rel_err\n");
    for r in rows {
        s.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e}\n",
            r.k, r.amplitude, r.omega_meas, r.omega_pred, r.rel_err
        ));
    }
    s
}

#[derive(Clone, Debug)]
pub struct StationaryResult {
    pub rho: Vec<f64>,
    pub beta_prime: f64,
    /// max |d rho/dt| from the continuity equation at (rho_s, Sigma_s).
    pub residual: f64,
}

/// Builds rho_s = kappa^{-1}(exp(Sigma_s/(m D) - beta')) and evaluates the
/// continuity equation on it.
pub fn stationary_residual(
    model: &EntropyModel,
    grid: &Grid1D,
    sigma_s: &[f64],
    diffusion: f64,
    hbar: f64,
    mass: f64,
) -> Result<StationaryResult> {
    if !(diffusion > 0.0) {
        return Err(Error::Config("stationary relation needs D > 0".into()));
    }
    let pseudo: Vec<f64> = sigma_s.iter().map(|s| -s / (mass * diffusion)).collect();
    let (rho, bp) = equilibrium_density(model, &pseudo, 1.0, grid)?;
    let psi0 = ComplexWavefunction::new(
        *grid,
        rho.iter()
            .zip(sigma_s)
            .map(|(r, s)| Complex64::from_polar(r.sqrt(), s / hbar))
            .collect(),
        hbar,
        mass,
    )?;
    let scn = NseScenario {
        model: model.clone(),
        grid: *grid,
        potential: vec![0.0; grid.len()],
        diffusion: Diffusion::Constant(diffusion),
        g_coeffs: vec![],
        hbar,
        mass,
        psi0,
        dt: 0.0,
        t_end: 0.0,
        cadence: 1,
        representation: Representation::Hydro,
    };
    let (rho_t, _) = crate::nse::nse_rhs_hydro(&scn, 0.0, &rho, sigma_s)?;
    Ok(StationaryResult {
        rho,
        beta_prime: bp,
        residual: rho_t.iter().map(|v| v.abs()).fold(0.0, f64::max),
    })
}

/// omega_z = (1/m)[d_x(gamma/rho) d_y Sigma - d_y(gamma/rho) d_x Sigma]
pub fn vorticity_2d(model: &EntropyModel, grid: &Grid2D, rho: &[f64], sigma: &[f64], mass: f64) -> Result<Vec<f64>> {
    check_2d(grid, rho, sigma)?;
    let ratio: Vec<f64> = rho
        .iter()
        .map(|&r| model.gamma(r) / r.max(model.rho_floor()))
        .collect();
    Ok(cross(grid, &ratio, sigma, 1.0 / mass))
}

/// Exclusion-principle form (kappa/m)(d_x rho d_y Sigma - d_y rho d_x Sigma).
pub fn vorticity_eip(kappa: f64, grid: &Grid2D, rho: &[f64], sigma: &[f64], mass: f64) -> Result<Vec<f64>> {
    check_2d(grid, rho, sigma)?;
    Ok(cross(grid, rho, sigma, kappa / mass))
}

fn cross(grid: &Grid2D, a: &[f64], b: &[f64], scale: f64) -> Vec<f64> {
    let (ax, ay, bx, by) = (grid.dx(a), grid.dy(a), grid.dx(b), grid.dy(b));
    (0..a.len())
        .map(|i| scale * (ax[i] * by[i] - ay[i] * bx[i]))
        .collect()
}

fn check_2d(grid: &Grid2D, a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != grid.len() || b.len() != grid.len() {
        return Err(Error::Usage("2D fields do not match the grid".into()));
    }
    Ok(())
}

/// <L> = hbar int Im(psi* (x d_y - y d_x) psi).
pub fn angular_momentum(grid: &Grid2D, psi: &[Complex64], hbar: f64) -> Result<f64> {
    if psi.len() != grid.len() {
        return Err(Error::Usage("2D fields do not match the grid".into()));
    }
    let (px, py) = (grid.dx(psi), grid.dy(psi));
    let xs = grid.sample(|x, _| x);
    let ys = grid.sample(|_, y| y);
    let dens: Vec<f64> = (0..psi.len())
        .map(|i| hbar * (psi[i].conj() * (py[i] * xs[i] - px[i] * ys[i])).im)
        .collect();
    Ok(grid.integrate(&dens))
}

/// curl(D grad ln kappa); zero for constant D.
pub fn diffusive_curl(model: &EntropyModel, grid: &Grid2D, diffusion: &[f64], rho: &[f64]) -> Result<Vec<f64>> {
    check_2d(grid, diffusion, rho)?;
    let lk: Vec<f64> = rho.iter().map(|&r| model.ln_kappa(r)).collect();
    let (lx, ly) = (grid.dx(&lk), grid.dy(&lk));
    let a: Vec<f64> = (0..lk.len()).map(|i| diffusion[i] * ly[i]).collect();
    let b: Vec<f64> = (0..lk.len()).map(|i| diffusion[i] * lx[i]).collect();
    let (ax, by) = (grid.dx(&a), grid.dy(&b));
    Ok((0..lk.len()).map(|i| ax[i] - by[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::DriftChoice;
    use crate::nse::{evolve_nse, gaussian_packet};

    fn rec(t: f64, x: f64, p: f64, e: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            norm: 1.0,
            energy: e,
            x_mean: x,
            p_mean: p,
            drift_flux: 1.0,
            diffusive_flux: 0.0,
            force_mean: 0.0,
            a_grad_d: 0.0,
            a_dt_d: 0.0,
            boundary_density: 0.0,
            r1: None,
            r2: None,
            r4: None,
        }
    }

    #[test]
    fn residuals_of_uniform_motion() {
        let recs: Vec<_> = (0..5).map(|k| rec(k as f64 * 0.1, k as f64 * 0.1, 1.0, 2.0)).collect();
        let rows = ehrenfest_residuals(&recs).unwrap();
        assert_eq!(rows.len(), 3);
        let s = summarize(&rows);
        assert!(s.r1_abs < 1e-12 && s.r2_abs < 1e-12 && s.r4_abs < 1e-12);
    }

    #[test]
    fn too_few_records() {
        let recs = vec![rec(0.0, 0.0, 0.0, 0.0), rec(0.1, 0.0, 0.0, 0.0)];
        assert!(matches!(ehrenfest_residuals(&recs), Err(Error::Usage(_))));
    }

    #[test]
    fn free_packet_residuals() {
        let grid = Grid1D::new(512, 20.0).unwrap();
        let psi0 = gaussian_packet(&grid, 0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let scn = NseScenario {
            model: EntropyModel::bg(),
            grid,
            potential: grid.sample(|x| 0.5 * x * x),
            diffusion: Diffusion::Constant(0.1),
            g_coeffs: vec![],
            hbar: 1.0,
            mass: 1.0,
            psi0,
            dt: 2.5e-4,
            t_end: 0.05,
            cadence: 4,
            representation: Representation::Psi,
        };
        let traj = evolve_nse(&scn).unwrap();
        let s = summarize(&ehrenfest_residuals(&traj.records).unwrap());
        assert!(s.r1_abs < 1e-5, "{s:?}");
        assert!(s.r2_abs < 1e-5, "{s:?}");
    }

    #[test]
    fn plane_wave_dispersion_linear() {
        let setup = DispersionSetup {
            model: EntropyModel::bg(),
            grid: Grid1D::new(256, 20.0).unwrap(),
            diffusion: 0.0,
            hbar: 1.0,
            mass: 1.0,
            dt: 1e-3,
            t_end: 2.0,
        };
        let row = dispersion_check(&setup, 3, 1.0).unwrap();
        assert!(row.rel_err < 1e-5, "{row:?}");
    }

    #[test]
    fn stationary_bg() {
        // Sigma_s = -m D beta V gives the Gibbs profile, which is stationary.
        let grid = Grid1D::new(512, 20.0).unwrap();
        let (m, d) = (1.0, 0.1);
        let sigma: Vec<f64> = grid.sample(|x| -m * d * 0.5 * x * x);
        let res = stationary_residual(&EntropyModel::bg(), &grid, &sigma, d, 1.0, m).unwrap();
        assert!(res.residual < 1e-6, "{}", res.residual);
        let i = 256;
        assert!((res.rho[i] - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn vorticity_forms() {
        let g = Grid2D::new(32, 32, 8.0, 8.0).unwrap();
        let rho = g.sample(|x, y| 0.2 + 0.1 * (x * 0.7).sin() * (y * 0.3).cos());
        let sigma = g.sample(|x, y| (0.5 * x + 0.25 * y).sin());
        let eip = EntropyModel::eip(0.4, DriftChoice::Nonlinear).unwrap();
        let a = vorticity_2d(&eip, &g, &rho, &sigma, 1.3).unwrap();
        let b = vorticity_eip(0.4, &g, &rho, &sigma, 1.3).unwrap();
        for i in 0..a.len() {
            assert!((a[i] - b[i]).abs() < 1e-10);
        }
        let lin = vorticity_2d(&EntropyModel::bg(), &g, &rho, &sigma, 1.0).unwrap();
        assert!(lin.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn curl_vanishes_for_constant_d() {
        let g = Grid2D::new(32, 32, 8.0, 8.0).unwrap();
        let rho = g.sample(|x, y| 0.2 + 0.1 * (x * 0.7).sin() * (y * 0.3).cos());
        let dconst = vec![0.3; g.len()];
        let c = diffusive_curl(&EntropyModel::tsallis(1.5).unwrap(), &g, &dconst, &rho).unwrap();
        assert!(c.iter().all(|v| v.abs() < 1e-10));
        let dvar = g.sample(|x, _| 0.3 + 0.1 * x.cos());
        let c = diffusive_curl(&EntropyModel::tsallis(1.5).unwrap(), &g, &dvar, &rho).unwrap();
        assert!(c.iter().any(|v| v.abs() > 1e-3));
    }

    #[test]
    fn angular_momentum_of_vortex() {
        // (x + i y) exp(-r^2/2) carries one unit of angular momentum.
        let g = Grid2D::new(96, 96, 12.0, 12.0).unwrap();
        let mut psi: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let (x, y) = (g.x.x(i % 96), g.y.x(i / 96));
                Complex64::new(x, y) * (-(x * x + y * y) / 2.0).exp()
            })
            .collect();
        let z = g.integrate(&psi.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>()).sqrt();
        psi.iter_mut().for_each(|v| *v /= z);
        assert!((angular_momentum(&g, &psi, 1.0).unwrap() - 1.0).abs() < 1e-4);
        let real: Vec<Complex64> = psi.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect();
        assert!(angular_momentum(&g, &real, 1.0).unwrap().abs() < 1e-12);
    }
}
