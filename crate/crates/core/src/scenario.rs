//! Scenario files: `[section]` headers followed by `key = value` lines.
//!
//! Sections are `model`, `grid`, `physics`, `potential`, `initial`,
//! `integrator` and `output`. Unknown sections and keys are errors, and every
//! problem found is reported together in one `Error::Validation`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use ini::{Ini, ParseOption};
use num_complex::Complex64;

use crate::diagnostics::{DispersionSetup, VariableDiffusion};
use crate::entropy::{log_grid, DriftChoice, EntropyKind, EntropyModel, DEFAULT_RHO_FLOOR};
use crate::error::{Error, Result};
use crate::grid::{ComplexWavefunction, Grid1D};
use crate::nfpe::{self, equilibrium_density, NfpeScenario};
use crate::nse::{gaussian_packet, Diffusion, Dynamics, NseScenario, Representation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Nfpe,
    Nse,
    GaugeCheck,
    Dispersion,
    CatalogDump,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Nfpe => "nfpe",
            ScenarioKind::Nse => "nse",
            ScenarioKind::GaugeCheck => "gauge_check",
            ScenarioKind::Dispersion => "dispersion",
            ScenarioKind::CatalogDump => "catalog_dump",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            ScenarioKind::Nfpe,
            ScenarioKind::Nse,
            ScenarioKind::GaugeCheck,
            ScenarioKind::Dispersion,
            ScenarioKind::CatalogDump,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }

    fn is_quantum(self) -> bool {
        matches!(self, ScenarioKind::Nse | ScenarioKind::GaugeCheck | ScenarioKind::Dispersion)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    None,
    /// V = m omega^2 x^2 / 2
    Harmonic { omega: f64 },
    /// V = sum c_n x^n
    Polynomial(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiffusionProfile {
    Constant,
    TemporalSine { eps: f64, omega: f64 },
    SpatialSine { eps: f64, wavelength: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhysicsSpec {
    pub hbar: f64,
    pub mass: f64,
    pub diffusion: f64,
    pub beta: f64,
    /// G(rho) coefficients, trailing zeros removed.
    pub g: Vec<f64>,
    pub profile: DiffusionProfile,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialSpec {
    Gaussian { center: f64, width: f64, k: f64 },
    PlaneWave { amplitude: f64, k: Vec<f64> },
    /// Equilibrium density of V(x - shift).
    Equilibrium { shift: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorSpec {
    pub kind: ScenarioKind,
    pub dt: f64,
    pub t_end: f64,
    pub cadence: usize,
    pub representation: Representation,
    pub dynamics: Dynamics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub dir: String,
    pub snapshot_every: usize,
    pub tolerance_scale: f64,
    pub seed: u64,
    pub catalog_rho_min: f64,
    pub catalog_rho_max: f64,
    pub catalog_rho_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub model: EntropyKind,
    pub rho_floor: f64,
    pub n: usize,
    pub length: f64,
    pub physics: PhysicsSpec,
    pub potential: PotentialSpec,
    pub initial: InitialSpec,
    pub integrator: IntegratorSpec,
    pub output: OutputSpec,
}

const SECTIONS: [&str; 7] = ["model", "grid", "physics", "potential", "initial", "integrator", "output"];

struct Reader {
    entries: BTreeMap<(String, String), (String, bool)>,
    errors: Vec<String>,
}

impl Reader {
    fn new(ini: &Ini) -> Self {
        let mut entries = BTreeMap::new();
        let mut errors = Vec::new();
        for (section, props) in ini.iter() {
            let sec = match section {
                Some(s) => s.trim().to_string(),
                None => {
                    for (k, _) in props.iter() {
                        errors.push(format!("key `{k}` appears before any section"));
                    }
                    continue;
                }
            };
            if !SECTIONS.contains(&sec.as_str()) {
                errors.push(format!("unknown section [{sec}]"));
                continue;
            }
            for (k, v) in props.iter() {
                let key = (sec.clone(), k.trim().to_string());
                if entries.contains_key(&key) {
                    errors.push(format!("duplicate key `{}` in [{sec}]", key.1));
                }
                entries.insert(key, (v.trim().to_string(), false));
            }
        }
        Self { entries, errors }
    }

    fn raw(&mut self, sec: &str, key: &str) -> Option<String> {
        self.entries.get_mut(&(sec.to_string(), key.to_string())).map(|e| {
            e.1 = true;
            e.0.clone()
        })
    }

    fn parsed<T: std::str::FromStr>(&mut self, sec: &str, key: &str, default: T, what: &str) -> T {
        match self.raw(sec, key) {
            None => default,
            Some(v) => match v.parse() {
                Ok(x) => x,
                Err(_) => {
                    self.errors.push(format!("[{sec}] {key} = `{v}` is not {what}"));
                    default
                }
            },
        }
    }

    fn f64(&mut self, sec: &str, key: &str, default: f64) -> f64 {
        let x = self.parsed(sec, key, default, "a number");
        if !x.is_finite() {
            self.errors.push(format!("[{sec}] {key} must be finite"));
            return default;
        }
        x
    }

    fn usize(&mut self, sec: &str, key: &str, default: usize) -> usize {
        self.parsed(sec, key, default, "a nonnegative integer")
    }

    fn list(&mut self, sec: &str, key: &str) -> Vec<f64> {
        let Some(v) = self.raw(sec, key) else {
            return vec![];
        };
        let mut out = Vec::new();
        for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.parse::<f64>() {
                Ok(x) if x.is_finite() => out.push(x),
                _ => self.errors.push(format!("[{sec}] {key}: `{part}` is not a number")),
            }
        }
        out
    }

    fn word(&mut self, sec: &str, key: &str, default: &str) -> String {
        self.raw(sec, key).unwrap_or_else(|| default.to_string())
    }

    fn positive(&mut self, sec: &str, key: &str, value: f64) {
        if !(value > 0.0) {
            self.errors.push(format!("[{sec}] {key} must be positive, got {value}"));
        }
    }

    fn finish(mut self) -> Vec<String> {
        for ((sec, key), (_, used)) in &self.entries {
            if !used {
                self.errors.push(format!("unknown key `{key}` in [{sec}]"));
            }
        }
        self.errors
    }
}

fn trim_zeros(mut c: Vec<f64>) -> Vec<f64> {
    while c.last() == Some(&0.0) {
        c.pop();
    }
    c
}

/// Parses and validates a scenario. All problems are collected into one
/// `Error::Validation`.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let opt = ParseOption {
        enabled_quote: false,
        enabled_escape: false,
        ..ParseOption::default()
    };
    let ini = Ini::load_from_str_opt(text, opt)
        .map_err(|e| Error::Validation(vec![format!("syntax error at line {}, column {}: {}", e.line, e.col, e.msg)]))?;
    let mut r = Reader::new(&ini);

    // model
    let variant = r.word("model", "variant", "bg");
    let model = match variant.as_str() {
        "bg" => Some(EntropyKind::Bg),
        "two_param" => Some(EntropyKind::TwoParam {
            kappa: r.f64("model", "kappa", 0.0),
            r: r.f64("model", "r", 0.0),
        }),
        "tsallis" => Some(EntropyKind::Tsallis { q: r.f64("model", "q", 1.0) }),
        "kaniadakis" => Some(EntropyKind::Kaniadakis {
            kappa: r.f64("model", "kappa", 0.0),
        }),
        "eip" => {
            let kappa = r.f64("model", "kappa", 0.0);
            let drift = match r.word("model", "drift", "linear").as_str() {
                "linear" => DriftChoice::Linear,
                "nonlinear" => DriftChoice::Nonlinear,
                other => {
                    r.errors.push(format!("[model] drift `{other}` is not linear or nonlinear"));
                    DriftChoice::Linear
                }
            };
            Some(EntropyKind::Eip { kappa, drift })
        }
        other => {
            r.errors.push(format!(
                "unknown model variant `{other}` (expected bg, two_param, tsallis, kaniadakis or eip)"
            ));
            None
        }
    };
    let rho_floor = r.f64("model", "rho_floor", DEFAULT_RHO_FLOOR);
    r.positive("model", "rho_floor", rho_floor);

    // grid
    let n = r.usize("grid", "n", 256);
    let length = r.f64("grid", "length", 20.0);

    // physics
    let hbar = r.f64("physics", "hbar", 1.0);
    let mass = r.f64("physics", "mass", 1.0);
    let diffusion = r.f64("physics", "diffusion", 0.1);
    let beta = r.f64("physics", "beta", 1.0);
    r.positive("physics", "hbar", hbar);
    r.positive("physics", "mass", mass);
    r.positive("physics", "beta", beta);
    if diffusion < 0.0 {
        r.errors.push(format!("[physics] diffusion must be nonnegative, got {diffusion}"));
    }
    let g = trim_zeros(r.list("physics", "g"));
    let profile = match r.word("physics", "diffusion_profile", "constant").as_str() {
        "constant" => DiffusionProfile::Constant,
        "temporal_sine" => DiffusionProfile::TemporalSine {
            eps: r.f64("physics", "diffusion_eps", 0.1),
            omega: r.f64("physics", "diffusion_omega", 1.0),
        },
        "spatial_sine" => {
            let wavelength = r.f64("physics", "diffusion_wavelength", length);
            r.positive("physics", "diffusion_wavelength", wavelength);
            DiffusionProfile::SpatialSine {
                eps: r.f64("physics", "diffusion_eps", 0.1),
                wavelength,
            }
        }
        other => {
            r.errors.push(format!(
                "[physics] diffusion_profile `{other}` is not constant, temporal_sine or spatial_sine"
            ));
            DiffusionProfile::Constant
        }
    };
    if let DiffusionProfile::TemporalSine { eps, .. } | DiffusionProfile::SpatialSine { eps, .. } = profile {
        if !(eps.abs() < 1.0) {
            r.errors.push(format!("[physics] diffusion_eps must satisfy |eps| < 1, got {eps}"));
        }
    }

    // potential
    let potential = match r.word("potential", "kind", "none").as_str() {
        "none" => PotentialSpec::None,
        "harmonic" => PotentialSpec::Harmonic {
            omega: r.f64("potential", "omega", 1.0),
        },
        "polynomial" => PotentialSpec::Polynomial(trim_zeros(r.list("potential", "coeffs"))),
        other => {
            r.errors.push(format!("[potential] kind `{other}` is not none, harmonic or polynomial"));
            PotentialSpec::None
        }
    };

    // initial
    let initial = match r.word("initial", "kind", "gaussian").as_str() {
        "gaussian" => {
            let width = r.f64("initial", "width", 1.0);
            r.positive("initial", "width", width);
            InitialSpec::Gaussian {
                center: r.f64("initial", "center", 0.0),
                width,
                k: r.f64("initial", "k", 0.0),
            }
        }
        "plane_wave" => {
            let amplitude = r.f64("initial", "amplitude", 1.0);
            r.positive("initial", "amplitude", amplitude);
            let k = r.list("initial", "k");
            if k.is_empty() {
                r.errors.push("[initial] plane_wave needs at least one wavenumber k".into());
            }
            InitialSpec::PlaneWave { amplitude, k }
        }
        "equilibrium" => InitialSpec::Equilibrium {
            shift: r.f64("initial", "shift", 0.0),
        },
        other => {
            r.errors.push(format!("[initial] kind `{other}` is not gaussian, plane_wave or equilibrium"));
            InitialSpec::Gaussian {
                center: 0.0,
                width: 1.0,
                k: 0.0,
            }
        }
    };

    // integrator
    let kind_word = r.word("integrator", "kind", "nse");
    let kind = ScenarioKind::parse(&kind_word).unwrap_or_else(|| {
        r.errors.push(format!(
            "[integrator] kind `{kind_word}` is not nfpe, nse, gauge_check, dispersion or catalog_dump"
        ));
        ScenarioKind::Nse
    });
    let dt_word = r.word("integrator", "dt", "auto");
    let dt = if dt_word == "auto" {
        None
    } else {
        match dt_word.parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Some(x),
            _ => {
                r.errors.push(format!("[integrator] dt = `{dt_word}` is not a positive number or auto"));
                None
            }
        }
    };
    let t_end = r.f64("integrator", "t_end", 1.0);
    r.positive("integrator", "t_end", t_end);
    let cadence = r.usize("integrator", "cadence", 10);
    if cadence == 0 {
        r.errors.push("[integrator] cadence must be at least 1".into());
    }
    let representation = match r.word("integrator", "representation", "psi").as_str() {
        "psi" => Representation::Psi,
        "hydro" => Representation::Hydro,
        other => {
            r.errors.push(format!("[integrator] representation `{other}` is not psi or hydro"));
            Representation::Psi
        }
    };
    let dynamics = match r.word("integrator", "dynamics", "canonical").as_str() {
        "canonical" => Dynamics::Canonical,
        "gauged" => Dynamics::Gauged { drop_ubar: false },
        "gauged_drop_ubar" => Dynamics::Gauged { drop_ubar: true },
        other => {
            r.errors.push(format!(
                "[integrator] dynamics `{other}` is not canonical, gauged or gauged_drop_ubar"
            ));
            Dynamics::Canonical
        }
    };

    // output
    let output = OutputSpec {
        dir: r.word("output", "dir", "out"),
        snapshot_every: r.usize("output", "snapshot_every", 0),
        tolerance_scale: r.f64("output", "tolerance_scale", 1.0),
        seed: r.parsed("output", "seed", 0u64, "a nonnegative integer"),
        catalog_rho_min: r.f64("output", "catalog_rho_min", 1e-3),
        catalog_rho_max: r.f64("output", "catalog_rho_max", 10.0),
        catalog_rho_points: r.usize("output", "catalog_rho_points", 41),
    };
    r.positive("output", "tolerance_scale", output.tolerance_scale);
    if !(output.catalog_rho_min > 0.0 && output.catalog_rho_max > output.catalog_rho_min) {
        r.errors.push("[output] catalog range needs 0 < catalog_rho_min < catalog_rho_max".into());
    }
    if output.catalog_rho_points < 2 {
        r.errors.push("[output] catalog_rho_points must be at least 2".into());
    }

    let mut errors = r.finish();
    let Some(model) = model else {
        return Err(Error::Validation(errors));
    };
    let mut scn = Scenario {
        model,
        rho_floor,
        n,
        length,
        physics: PhysicsSpec {
            hbar,
            mass,
            diffusion,
            beta,
            g,
            profile,
        },
        potential,
        initial,
        integrator: IntegratorSpec {
            kind,
            dt: dt.unwrap_or(0.0),
            t_end,
            cadence: cadence.max(1),
            representation,
            dynamics,
        },
        output,
    };
    if errors.is_empty() {
        scn.check(dt, &mut errors);
    }
    if errors.is_empty() {
        Ok(scn)
    } else {
        Err(Error::Validation(errors))
    }
}

fn fmt_list(v: &[f64]) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl Scenario {
    pub fn entropy_model(&self) -> Result<EntropyModel> {
        EntropyModel::with_floor(self.model, self.rho_floor)
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.n, self.length)
    }

    pub fn potential_values(&self, grid: &Grid1D) -> Vec<f64> {
        self.shifted_potential(grid, 0.0)
    }

    /// V(x - shift) on the grid.
    fn shifted_potential(&self, grid: &Grid1D, shift: f64) -> Vec<f64> {
        let m = self.physics.mass;
        grid.sample(|x| {
            let x = x - shift;
            match &self.potential {
                PotentialSpec::None => 0.0,
                PotentialSpec::Harmonic { omega } => 0.5 * m * omega * omega * x * x,
                PotentialSpec::Polynomial(c) => c.iter().rev().fold(0.0, |acc, a| acc * x + a),
            }
        })
    }

    pub fn diffusion(&self) -> Diffusion {
        let d0 = self.physics.diffusion;
        match self.physics.profile {
            DiffusionProfile::Constant => Diffusion::Constant(d0),
            DiffusionProfile::TemporalSine { eps, omega } => {
                Diffusion::Variable(VariableDiffusion::temporal_sine(d0, eps, omega))
            }
            DiffusionProfile::SpatialSine { eps, wavelength } => {
                Diffusion::Variable(VariableDiffusion::spatial_sine(d0, eps, wavelength))
            }
        }
    }

    /// Density at t = 0 for NFPE runs.
    pub fn initial_density(&self) -> Result<Vec<f64>> {
        let model = self.entropy_model()?;
        let grid = self.grid()?;
        match &self.initial {
            InitialSpec::Gaussian { center, width, .. } => {
                let mut rho = grid.sample(|x| (-(x - center) * (x - center) / (2.0 * width * width)).exp());
                let m = grid.integrate(&rho);
                rho.iter_mut().for_each(|r| *r /= m);
                Ok(rho)
            }
            InitialSpec::Equilibrium { shift } => {
                let v = self.shifted_potential(&grid, *shift);
                Ok(equilibrium_density(&model, &v, self.physics.beta, &grid)?.0)
            }
            InitialSpec::PlaneWave { .. } => Err(Error::Config("a plane wave is not an NFPE initial density".into())),
        }
    }

    /// Wavefunction at t = 0 for NSE runs; plane waves use the first k.
    pub fn initial_wavefunction(&self) -> Result<ComplexWavefunction> {
        let grid = self.grid()?;
        let (hb, m) = (self.physics.hbar, self.physics.mass);
        match &self.initial {
            InitialSpec::Gaussian { center, width, k } => gaussian_packet(&grid, *center, *width, *k, hb, m),
            InitialSpec::PlaneWave { amplitude, k } => {
                let values = grid.coords().into_iter().map(|x| Complex64::from_polar(*amplitude, k[0] * x)).collect();
                ComplexWavefunction::new(grid, values, hb, m)
            }
            InitialSpec::Equilibrium { .. } => {
                let rho = self.initial_density()?;
                let values = rho.iter().map(|r| Complex64::new(r.sqrt(), 0.0)).collect();
                ComplexWavefunction::new(grid, values, hb, m)
            }
        }
    }

    /// NFPE problem and the equilibrium it should relax to.
    pub fn nfpe(&self) -> Result<(NfpeScenario, Vec<f64>)> {
        let model = self.entropy_model()?;
        let grid = self.grid()?;
        let potential = self.potential_values(&grid);
        let (eq, _) = equilibrium_density(&model, &potential, self.physics.beta, &grid)?;
        let scn = NfpeScenario {
            model,
            grid,
            potential,
            diffusion: self.physics.diffusion,
            beta: self.physics.beta,
            rho0: self.initial_density()?,
            dt: self.integrator.dt,
            t_end: self.integrator.t_end,
            cadence: self.integrator.cadence,
        };
        Ok((scn, eq))
    }

    pub fn nse(&self) -> Result<NseScenario> {
        let grid = self.grid()?;
        Ok(NseScenario {
            model: self.entropy_model()?,
            potential: self.potential_values(&grid),
            grid,
            diffusion: self.diffusion(),
            g_coeffs: self.physics.g.clone(),
            hbar: self.physics.hbar,
            mass: self.physics.mass,
            psi0: self.initial_wavefunction()?,
            dt: self.integrator.dt,
            t_end: self.integrator.t_end,
            cadence: self.integrator.cadence,
            representation: self.integrator.representation,
        })
    }

    /// Plane-wave setup and the grid modes of the configured wavenumbers.
    pub fn dispersion(&self) -> Result<(DispersionSetup, f64, Vec<i64>)> {
        let InitialSpec::PlaneWave { amplitude, k } = &self.initial else {
            return Err(Error::Config("dispersion needs [initial] kind = plane_wave".into()));
        };
        let grid = self.grid()?;
        let setup = DispersionSetup {
            model: self.entropy_model()?,
            grid,
            diffusion: self.physics.diffusion,
            hbar: self.physics.hbar,
            mass: self.physics.mass,
            dt: self.integrator.dt,
            t_end: self.integrator.t_end,
        };
        Ok((setup, *amplitude, k.iter().map(|&k| grid.nearest_mode(k)).collect()))
    }

    pub fn catalog_rhos(&self) -> Vec<f64> {
        let o = &self.output;
        log_grid(o.catalog_rho_min, o.catalog_rho_max, o.catalog_rho_points)
    }

    fn check(&mut self, dt: Option<f64>, errors: &mut Vec<String>) {
        let model = match self.entropy_model() {
            Ok(m) => m,
            Err(e) => {
                errors.push(format!("[model] {e}"));
                return;
            }
        };
        let grid = match self.grid() {
            Ok(g) => g,
            Err(e) => {
                errors.push(format!("[grid] {e}"));
                return;
            }
        };
        let kind = self.integrator.kind;
        if kind == ScenarioKind::CatalogDump {
            if let Err(e) = model.check_monotone_on(self.output.catalog_rho_min, self.output.catalog_rho_max) {
                errors.push(format!("[model] {e}"));
            }
            self.integrator.dt = dt.unwrap_or(self.integrator.t_end);
            return;
        }
        if let InitialSpec::PlaneWave { amplitude, k } = &self.initial {
            for &kv in k {
                let j = kv * self.length / (2.0 * PI);
                if (j - j.round()).abs() > 1e-6 {
                    let jn = j.round();
                    errors.push(format!(
                        "[initial] k = {kv} is not of the form 2*pi*j/L; nearest admissible k = {} (j = {jn})",
                        2.0 * PI * jn / self.length
                    ));
                }
            }
            if matches!(kind, ScenarioKind::Nse | ScenarioKind::GaugeCheck)
                && ((amplitude * amplitude * self.length) - 1.0).abs() > 1e-8
            {
                errors.push(format!(
                    "[initial] plane wave must satisfy amplitude^2 * L = 1 for {} runs (amplitude = {})",
                    kind.name(),
                    1.0 / self.length.sqrt()
                ));
            }
        }
        if kind == ScenarioKind::Nfpe && matches!(self.initial, InitialSpec::PlaneWave { .. }) {
            errors.push("[initial] nfpe runs need a gaussian or equilibrium initial density".into());
        }
        if kind == ScenarioKind::Dispersion && !matches!(self.initial, InitialSpec::PlaneWave { .. }) {
            errors.push("[initial] dispersion runs need kind = plane_wave".into());
        }
        if matches!(kind, ScenarioKind::GaugeCheck | ScenarioKind::Dispersion | ScenarioKind::Nfpe)
            && self.physics.profile != DiffusionProfile::Constant
        {
            errors.push(format!("[physics] {} runs need diffusion_profile = constant", kind.name()));
        }
        if kind == ScenarioKind::Nfpe && !(self.physics.diffusion > 0.0) {
            errors.push("[physics] nfpe runs need diffusion > 0".into());
        }
        if self.integrator.representation == Representation::Hydro && self.integrator.dynamics != Dynamics::Canonical {
            errors.push("[integrator] the hydro representation only runs canonical dynamics".into());
        }
        if !errors.is_empty() {
            return;
        }

        // density range and stability bound
        let t_end = self.integrator.t_end;
        let (rho, bound) = if kind == ScenarioKind::Nfpe {
            match self.initial_density() {
                Ok(rho) => {
                    let b = nfpe::stable_dt(&model, &grid, self.physics.diffusion, &rho);
                    (rho, b)
                }
                Err(e) => {
                    errors.push(format!("[initial] {e}"));
                    return;
                }
            }
        } else {
            self.integrator.dt = 1.0;
            match self.nse() {
                Ok(s) => (s.psi0.density(), s.stable_dt()),
                Err(e) => {
                    errors.push(format!("[initial] {e}"));
                    return;
                }
            }
        };
        let hi = rho.iter().cloned().fold(0.0, f64::max);
        if let Err(e) = model.check_monotone_on(self.rho_floor, 1.5 * hi) {
            errors.push(format!("[model] {e}"));
        }
        let suggested = t_end / (t_end / bound).ceil();
        match dt {
            None => self.integrator.dt = suggested,
            Some(d) if d > bound * (1.0 + 1e-12) => {
                self.integrator.dt = d;
                errors.push(format!(
                    "[integrator] dt = {d} exceeds the stability bound {bound:.6e}; suggested dt = {suggested}"
                ));
            }
            Some(d) => self.integrator.dt = d,
        }
        if kind.is_quantum() && kind != ScenarioKind::Dispersion && errors.is_empty() {
            match self.nse() {
                Ok(s) => {
                    let skip = self.integrator.dynamics == (Dynamics::Gauged { drop_ubar: true });
                    if let Err(e) = s.validate().and_then(|_| if skip { Ok(()) } else { s.check_well_posed() }) {
                        errors.push(format!("[physics] {e}"));
                    }
                }
                Err(e) => errors.push(format!("[initial] {e}")),
            }
        }
    }

    /// Normalized text form with every default written out.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let w = &mut s;
        let _ = writeln!(w, "[model]");
        match self.model {
            EntropyKind::Bg => {
                let _ = writeln!(w, "variant = bg");
            }
            EntropyKind::TwoParam { kappa, r } => {
                let _ = writeln!(w, "variant = two_param\nkappa = {kappa}\nr = {r}");
            }
            EntropyKind::Tsallis { q } => {
                let _ = writeln!(w, "variant = tsallis\nq = {q}");
            }
            EntropyKind::Kaniadakis { kappa } => {
                let _ = writeln!(w, "variant = kaniadakis\nkappa = {kappa}");
            }
            EntropyKind::Eip { kappa, drift } => {
                let d = match drift {
                    DriftChoice::Linear => "linear",
                    DriftChoice::Nonlinear => "nonlinear",
                };
                let _ = writeln!(w, "variant = eip\nkappa = {kappa}\ndrift = {d}");
            }
        }
        let _ = writeln!(w, "rho_floor = {}\n", self.rho_floor);
        let _ = writeln!(w, "[grid]\nn = {}\nlength = {}\n", self.n, self.length);
        let p = &self.physics;
        let _ = writeln!(
            w,
            "[physics]\nhbar = {}\nmass = {}\ndiffusion = {}\nbeta = {}\ng = {}",
            p.hbar,
            p.mass,
            p.diffusion,
            p.beta,
            fmt_list(&p.g)
        );
        match p.profile {
            DiffusionProfile::Constant => {
                let _ = writeln!(w, "diffusion_profile = constant");
            }
            DiffusionProfile::TemporalSine { eps, omega } => {
                let _ = writeln!(
                    w,
                    "diffusion_profile = temporal_sine\ndiffusion_eps = {eps}\ndiffusion_omega = {omega}"
                );
            }
            DiffusionProfile::SpatialSine { eps, wavelength } => {
                let _ = writeln!(
                    w,
                    "diffusion_profile = spatial_sine\ndiffusion_eps = {eps}\ndiffusion_wavelength = {wavelength}"
                );
            }
        }
        let _ = writeln!(w, "\n[potential]");
        match &self.potential {
            PotentialSpec::None => {
                let _ = writeln!(w, "kind = none");
            }
            PotentialSpec::Harmonic { omega } => {
                let _ = writeln!(w, "kind = harmonic\nomega = {omega}");
            }
            PotentialSpec::Polynomial(c) => {
                let _ = writeln!(w, "kind = polynomial\ncoeffs = {}", fmt_list(c));
            }
        }
        let _ = writeln!(w, "\n[initial]");
        match &self.initial {
            InitialSpec::Gaussian { center, width, k } => {
                let _ = writeln!(w, "kind = gaussian\ncenter = {center}\nwidth = {width}\nk = {k}");
            }
            InitialSpec::PlaneWave { amplitude, k } => {
                let _ = writeln!(w, "kind = plane_wave\namplitude = {amplitude}\nk = {}", fmt_list(k));
            }
            InitialSpec::Equilibrium { shift } => {
                let _ = writeln!(w, "kind = equilibrium\nshift = {shift}");
            }
        }
        let it = &self.integrator;
        let rep = match it.representation {
            Representation::Psi => "psi",
            Representation::Hydro => "hydro",
        };
        let dynamics = match it.dynamics {
            Dynamics::Canonical => "canonical",
            Dynamics::Gauged { drop_ubar: false } => "gauged",
            Dynamics::Gauged { drop_ubar: true } => "gauged_drop_ubar",
        };
        let _ = writeln!(
            w,
            "\n[integrator]\nkind = {}\ndt = {}\nt_end = {}\ncadence = {}\nrepresentation = {rep}\ndynamics = {dynamics}",
            it.kind.name(),
            it.dt,
            it.t_end,
            it.cadence
        );
        let o = &self.output;
        let _ = write!(
            w,
            "\n[output]\ndir = {}\nsnapshot_every = {}\ntolerance_scale = {}\nseed = {}\ncatalog_rho_min = {}\ncatalog_rho_max = {}\ncatalog_rho_points = {}\n",
            o.dir, o.snapshot_every, o.tolerance_scale, o.seed, o.catalog_rho_min, o.catalog_rho_max, o.catalog_rho_points
        );
        s
    }
}
