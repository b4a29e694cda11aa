//! Nonlinear Fokker-Planck evolution in one dimension.
//!
//! The flux is written as `J = -D gamma(rho) grad mu` with the chemical
//! potential `mu = beta V + ln kappa(rho)`, which equals the drift-plus-
//! diffusion flux `u gamma - D f grad rho`. Mobilities at faces are taken from
//! the donor cell with a minmod-limited linear reconstruction.

use crate::entropy::EntropyModel;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::ode::rk4_step;

pub const STABILITY_FACTOR: f64 = 0.2;
const NORM_DRIFT_LIMIT: f64 = 1e-4;
const NEGATIVE_LIMIT: f64 = -1e-8;

#[derive(Clone, Debug)]
pub struct NfpeScenario {
    pub model: EntropyModel,
    pub grid: Grid1D,
    pub potential: Vec<f64>,
    pub diffusion: f64,
    pub beta: f64,
    pub rho0: Vec<f64>,
    pub dt: f64,
    pub t_end: f64,
    /// Store a sample every `cadence` steps.
    pub cadence: usize,
}

impl NfpeScenario {
    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if self.potential.len() != n || self.rho0.len() != n {
            return Err(Error::Usage("potential and rho0 must match the grid".into()));
        }
        if !self.potential.iter().all(|v| v.is_finite()) {
            return Err(Error::Config("potential must be finite".into()));
        }
        if !(self.diffusion > 0.0) || !(self.beta > 0.0) {
            return Err(Error::Config("diffusion and beta must be positive".into()));
        }
        if self.rho0.iter().any(|&r| !(r >= 0.0)) {
            return Err(Error::Config("initial density must be nonnegative".into()));
        }
        let mass = self.grid.integrate(&self.rho0);
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::Config(format!("initial density has mass {mass}, expected 1")));
        }
        if !(self.dt > 0.0 && self.t_end >= 0.0) || self.cadence == 0 {
            return Err(Error::Config("dt, t_end and cadence must be positive".into()));
        }
        let bound = stable_dt(&self.model, &self.grid, self.diffusion, &self.rho0);
        if self.dt > bound {
            return Err(Error::Config(format!(
                "dt = {} exceeds the diffusive stability bound; use dt <= {bound:.6e}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// Largest dt allowed by dt <= 0.2 h^2 / (D max f) over the range spanned by `rho`.
pub fn stable_dt(model: &EntropyModel, grid: &Grid1D, diffusion: f64, rho: &[f64]) -> f64 {
    let fun = model.functionals();
    let lo = rho.iter().cloned().fold(f64::INFINITY, f64::min).max(model.rho_floor());
    let hi = rho.iter().cloned().fold(0.0, f64::max).max(lo);
    let fmax = crate::entropy::log_grid(lo, hi * 1.5, 64)
        .into_iter()
        .map(|r| fun.f(r))
        .fold(0.0, f64::max);
    let h = grid.spacing();
    STABILITY_FACTOR * h * h / (diffusion * fmax.max(1e-300))
}

pub fn chemical_potential(model: &EntropyModel, potential: &[f64], beta: f64, rho: &[f64]) -> Vec<f64> {
    rho.iter()
        .zip(potential)
        .map(|(&r, &v)| beta * v + model.ln_kappa(r))
        .collect()
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Face fluxes J_{i+1/2}.
pub fn face_fluxes(scn: &NfpeScenario, rho: &[f64]) -> Vec<f64> {
    let n = rho.len();
    let h = scn.grid.spacing();
    let mu = chemical_potential(&scn.model, &scn.potential, scn.beta, rho);
    let slope: Vec<f64> = (0..n)
        .map(|i| minmod(rho[(i + 1) % n] - rho[i], rho[i] - rho[(i + n - 1) % n]))
        .collect();
    (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let dmu = mu[j] - mu[i];
            let face = if dmu > 0.0 {
                rho[j] - 0.5 * slope[j]
            } else {
                rho[i] + 0.5 * slope[i]
            };
            -scn.diffusion * scn.model.gamma(face.max(0.0)) * dmu / h
        })
        .collect()
}

/// Time derivative -div J of the density.
pub fn nfpe_rhs(scn: &NfpeScenario, rho: &[f64]) -> Result<Vec<f64>> {
    if rho.len() != scn.grid.len() {
        return Err(Error::Usage("density does not match the grid".into()));
    }
    let n = rho.len();
    let h = scn.grid.spacing();
    let j = face_fluxes(scn, rho);
    Ok((0..n).map(|i| -(j[i] - j[(i + n - 1) % n]) / h).collect())
}

/// F = int Phi(rho) + beta int V rho with Phi' = ln kappa.
pub fn free_energy(model: &EntropyModel, grid: &Grid1D, rho: &[f64], potential: &[f64], beta: f64) -> f64 {
    let s: f64 = rho
        .iter()
        .zip(potential)
        .map(|(&r, &v)| model.entropy_density(r) + beta * v * r)
        .sum();
    s * grid.spacing()
}

pub fn l2_distance(grid: &Grid1D, a: &[f64], b: &[f64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (s * grid.spacing()).sqrt()
}

/// rho_eq = kappa^{-1}(exp(-beta V - beta')) with beta' fixing unit mass.
pub fn equilibrium_density(
    model: &EntropyModel,
    potential: &[f64],
    beta: f64,
    grid: &Grid1D,
) -> Result<(Vec<f64>, f64)> {
    if potential.len() != grid.len() {
        return Err(Error::Usage("potential does not match the grid".into()));
    }
    let (inf, sup) = model.ln_kappa_range();
    let compact = inf.is_finite() && model.admissible_interval().0 == 0.0;
    let vmin = potential.iter().cloned().fold(f64::INFINITY, f64::min);
    let vmax = potential.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let profile = |bp: f64| -> Result<Vec<f64>> {
        potential
            .iter()
            .map(|&v| {
                let y = -beta * v - bp;
                if compact {
                    model.ln_kappa_inverse_or_zero(y)
                } else {
                    model.ln_kappa_inverse(y)
                }
            })
            .collect()
    };
    let mass = |bp: f64| -> Result<f64> { Ok(grid.integrate(&profile(bp)?)) };

    let lo_dom = -beta * vmin - sup;
    let hi_dom = if compact { f64::INFINITY } else { -beta * vmax - inf };
    if !(lo_dom < hi_dom) {
        return Err(Error::Config("equilibrium: empty range for beta'".into()));
    }
    let nudge = |x: f64| 1e-12 * x.abs().max(1.0);
    let mut a = if lo_dom.is_finite() {
        lo_dom + nudge(lo_dom)
    } else if hi_dom.is_finite() {
        hi_dom - 1.0
    } else {
        -1.0
    };
    if lo_dom.is_finite() {
        if mass(a)? < 1.0 {
            return Err(Error::Config(
                "no normalizable equilibrium: mass stays below 1 over the admissible beta' range".into(),
            ));
        }
    } else {
        let mut step = 1.0;
        while !(mass(a)? > 1.0) {
            a -= step;
            step *= 2.0;
            if step > 1e6 {
                return Err(Error::Config("equilibrium: failed to bracket beta'".into()));
            }
        }
    }
    let mut b = if hi_dom.is_finite() {
        hi_dom - nudge(hi_dom)
    } else {
        a + 1.0
    };
    if hi_dom.is_finite() {
        if mass(b)? > 1.0 {
            return Err(Error::Config(
                "no normalizable equilibrium: mass stays above 1 over the admissible beta' range".into(),
            ));
        }
    } else {
        let mut step = 1.0;
        while !(mass(b)? < 1.0) {
            b += step;
            step *= 2.0;
            if step > 1e6 {
                return Err(Error::Config("equilibrium: failed to bracket beta'".into()));
            }
        }
    }
    for _ in 0..300 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let m = mass(mid)?;
        if (m - 1.0).abs() < 1e-14 {
            a = mid;
            b = mid;
            break;
        }
        if m > 1.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let bp = 0.5 * (a + b);
    let rho = profile(bp)?;
    let m = grid.integrate(&rho);
    if (m - 1.0).abs() > 1e-10 {
        return Err(Error::Numerical(format!("equilibrium normalization reached only {m}")));
    }
    Ok((rho, bp))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NfpeSample {
    pub t: f64,
    pub rho: Vec<f64>,
    pub norm: f64,
    pub free_energy: f64,
}

#[derive(Clone, Debug)]
pub struct NfpeTrajectory {
    pub samples: Vec<NfpeSample>,
    /// Largest single-step relative increase of the free energy (0 if none).
    pub max_free_energy_increase: f64,
    pub min_density: f64,
    pub steps: usize,
}

impl NfpeTrajectory {
    pub fn last(&self) -> &NfpeSample {
        self.samples.last().expect("trajectory always holds the initial sample")
    }
}

pub fn evolve_nfpe(scn: &NfpeScenario) -> Result<NfpeTrajectory> {
    scn.validate()?;
    let steps = (scn.t_end / scn.dt).round() as usize;
    let fe = |rho: &[f64]| free_energy(&scn.model, &scn.grid, rho, &scn.potential, scn.beta);
    let mut rho = scn.rho0.clone();
    let mut f_prev = fe(&rho);
    let mut samples = vec![NfpeSample {
        t: 0.0,
        norm: scn.grid.integrate(&rho),
        free_energy: f_prev,
        rho: rho.clone(),
    }];
    let mut max_inc: f64 = 0.0;
    let mut min_rho = rho.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut rhs = |_t: f64, r: &Vec<f64>| nfpe_rhs(scn, r);
    for step in 1..=steps {
        let t = step as f64 * scn.dt;
        rho = rk4_step(&rho, t - scn.dt, scn.dt, &mut rhs)?;
        let norm = scn.grid.integrate(&rho);
        let fail = |reason: String| Error::Integration { step, t, reason };
        if !rho.iter().all(|v| v.is_finite()) {
            return Err(fail("non-finite density".into()));
        }
        if (norm - 1.0).abs() > NORM_DRIFT_LIMIT {
            return Err(fail(format!("norm drifted to {norm}")));
        }
        let mn = rho.iter().cloned().fold(f64::INFINITY, f64::min);
        min_rho = min_rho.min(mn);
        if mn < NEGATIVE_LIMIT {
            return Err(fail(format!("density undershoot {mn:e}")));
        }
        let f = fe(&rho);
        max_inc = max_inc.max((f - f_prev) / f_prev.abs().max(1e-300));
        f_prev = f;
        if step % scn.cadence == 0 || step == steps {
            samples.push(NfpeSample {
                t,
                rho: rho.clone(),
                norm,
                free_energy: f,
            });
        }
    }
    Ok(NfpeTrajectory {
        samples,
        max_free_energy_increase: max_inc,
        min_density: min_rho,
        steps,
    })
}

/// Diagnostics CSV: t, norm, free_energy, l2_to_eq.
pub fn trajectory_csv(traj: &NfpeTrajectory, grid: &Grid1D, rho_eq: &[f64]) -> String {
    let mut s = String::from("t,norm,free_energy,l2_to_eq\n");
    for smp in &traj.samples {
        s.push_str(&format!(
            "{:e},{:e},{:e},{:e}\n",
            smp.t,
            smp.norm,
            smp.free_energy,
            l2_distance(grid, &smp.rho, rho_eq)
        ));
    }
    s
}
