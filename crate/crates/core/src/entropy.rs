//! Generalized entropies: the logarithm `ln kappa`, its inverse, the drift
//! mobility `gamma` and the functionals derived from them.

use crate::error::{Error, Result};

pub const DEFAULT_RHO_FLOOR: f64 = 1e-12;

/// Deformation parameters smaller than this switch to the closed-form limit.
pub const LIMIT_THRESHOLD: f64 = 1e-6;

const LN_RHO_MIN: f64 = -740.0;
const LN_RHO_MAX: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriftChoice {
    /// gamma(rho) = rho
    Linear,
    /// gamma(rho) = rho (1 + kappa rho)
    Nonlinear,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntropyKind {
    Bg,
    TwoParam { kappa: f64, r: f64 },
    Tsallis { q: f64 },
    Kaniadakis { kappa: f64 },
    Eip { kappa: f64, drift: DriftChoice },
}

impl EntropyKind {
    pub fn name(&self) -> &'static str {
        match self {
            EntropyKind::Bg => "bg",
            EntropyKind::TwoParam { .. } => "two_param",
            EntropyKind::Tsallis { .. } => "tsallis",
            EntropyKind::Kaniadakis { .. } => "kaniadakis",
            EntropyKind::Eip { .. } => "eip",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Form {
    /// 1 + ln rho
    Gibbs,
    /// lambda (rho/alpha)^r sinh(kappa l)/kappa with l = ln(rho/alpha), kappa > 0
    Deformed {
        lambda: f64,
        alpha: f64,
        kappa: f64,
        r: f64,
    },
    /// kappa -> 0 limit of `Deformed`: lambda (rho/alpha)^r l
    DeformedLimit { lambda: f64, alpha: f64, r: f64 },
    Tsallis { q: f64 },
    Exclusion { kappa: f64 },
}

/// A validated entropy model with its admissible density interval.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyModel {
    kind: EntropyKind,
    form: Form,
    rho_floor: f64,
    admissible: (f64, f64),
    gamma_kappa: Option<f64>,
}

impl EntropyModel {
    pub fn new(kind: EntropyKind) -> Result<Self> {
        Self::with_floor(kind, DEFAULT_RHO_FLOOR)
    }

    pub fn with_floor(kind: EntropyKind, rho_floor: f64) -> Result<Self> {
        if !(rho_floor > 0.0 && rho_floor.is_finite()) {
            return Err(Error::Config(format!("rho_floor must be positive, got {rho_floor}")));
        }
        let mut gamma_kappa = None;
        let form = match kind {
            EntropyKind::Bg => Form::Gibbs,
            EntropyKind::TwoParam { kappa, r } => deformed_form(kappa, r)?,
            EntropyKind::Kaniadakis { kappa } => {
                if !(kappa.abs() < 1.0) {
                    return Err(Error::Config(format!(
                        "Kaniadakis kappa must satisfy |kappa| < 1, got {kappa}"
                    )));
                }
                deformed_form(kappa, 0.0)?
            }
            EntropyKind::Tsallis { q } => {
                if !(q > 0.0 && q.is_finite()) {
                    return Err(Error::Config(format!("Tsallis q must be positive, got {q}")));
                }
                if (q - 1.0).abs() < LIMIT_THRESHOLD {
                    Form::Gibbs
                } else {
                    Form::Tsallis { q }
                }
            }
            EntropyKind::Eip { kappa, drift } => {
                if !kappa.is_finite() {
                    return Err(Error::Config("EIP kappa must be finite".into()));
                }
                if drift == DriftChoice::Nonlinear {
                    gamma_kappa = Some(kappa);
                }
                Form::Exclusion { kappa }
            }
        };
        let admissible = admissible_interval(form);
        Ok(EntropyModel {
            kind,
            form,
            rho_floor,
            admissible,
            gamma_kappa,
        })
    }

    pub fn bg() -> Self {
        Self::new(EntropyKind::Bg).expect("BG is always valid")
    }

    pub fn two_param(kappa: f64, r: f64) -> Result<Self> {
        Self::new(EntropyKind::TwoParam { kappa, r })
    }

    pub fn tsallis(q: f64) -> Result<Self> {
        Self::new(EntropyKind::Tsallis { q })
    }

    pub fn kaniadakis(kappa: f64) -> Result<Self> {
        Self::new(EntropyKind::Kaniadakis { kappa })
    }

    pub fn eip(kappa: f64, drift: DriftChoice) -> Result<Self> {
        Self::new(EntropyKind::Eip { kappa, drift })
    }

    pub fn kind(&self) -> EntropyKind {
        self.kind
    }

    pub fn rho_floor(&self) -> f64 {
        self.rho_floor
    }

    /// Open interval of densities on which `ln kappa` is strictly increasing.
    pub fn admissible_interval(&self) -> (f64, f64) {
        self.admissible
    }

    /// Fails when `[lo, hi]` leaves the admissible interval, naming the bad part.
    pub fn check_monotone_on(&self, lo: f64, hi: f64) -> Result<()> {
        let (a, b) = self.admissible;
        if lo <= a && a > 0.0 {
            return Err(Error::Monotonicity {
                lo,
                hi: a.min(hi),
                adm_lo: a,
                adm_hi: b,
            });
        }
        if hi >= b {
            return Err(Error::Monotonicity {
                lo: b.max(lo),
                hi,
                adm_lo: a,
                adm_hi: b,
            });
        }
        Ok(())
    }

    fn clamp(&self, rho: f64) -> f64 {
        rho.max(self.rho_floor)
    }

    pub fn ln_kappa(&self, rho: f64) -> f64 {
        self.eval(self.clamp(rho)).0
    }

    pub fn d_ln_kappa(&self, rho: f64) -> f64 {
        self.eval(self.clamp(rho)).1
    }

    pub fn d2_ln_kappa(&self, rho: f64) -> f64 {
        self.eval(self.clamp(rho)).2
    }

    /// `ln kappa` with a domain check instead of flooring.
    pub fn try_ln_kappa(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("ln kappa needs rho > 0, got {rho}")));
        }
        let (a, b) = self.admissible;
        if rho <= a || rho >= b {
            return Err(Error::Domain(format!(
                "rho = {rho:e} outside admissible interval ({a:e}, {b:e})"
            )));
        }
        Ok(self.eval(rho).0)
    }

    /// (ln kappa, ln kappa', ln kappa'') at an unfloored density.
    fn eval(&self, rho: f64) -> (f64, f64, f64) {
        match self.form {
            Form::Gibbs => (1.0 + rho.ln(), 1.0 / rho, -1.0 / (rho * rho)),
            Form::Deformed {
                lambda,
                alpha,
                kappa,
                r,
            } => {
                let ell = (rho / alpha).ln();
                let er = (r * ell).exp();
                let (s, c) = ((kappa * ell).sinh(), (kappa * ell).cosh());
                let g = r * s / kappa + c;
                let base = lambda / alpha * ((r - 1.0) * ell).exp();
                (
                    lambda * er * s / kappa,
                    base * g,
                    base / rho * ((r - 1.0) * g + r * c + kappa * s),
                )
            }
            Form::DeformedLimit { lambda, alpha, r } => {
                let ell = (rho / alpha).ln();
                let er = (r * ell).exp();
                let g = r * ell + 1.0;
                let base = lambda / alpha * ((r - 1.0) * ell).exp();
                (lambda * er * ell, base * g, base / rho * ((r - 1.0) * g + r))
            }
            Form::Tsallis { q } => {
                let lr = rho.ln();
                let p = ((q - 2.0) * lr).exp();
                (
                    q * ((q - 1.0) * lr).exp_m1() / (q - 1.0) + 1.0,
                    q * p,
                    q * (q - 2.0) * p / rho,
                )
            }
            Form::Exclusion { kappa } => {
                let u = 1.0 + kappa * rho;
                (
                    rho.ln() - (kappa * rho).ln_1p(),
                    1.0 / (rho * u),
                    -(1.0 + 2.0 * kappa * rho) / (rho * rho * u * u),
                )
            }
        }
    }

    /// Entropy density `Phi(rho) = int_0^rho ln kappa`, extended linearly below
    /// the floor so that `Phi' = ln kappa(max(rho, floor))` everywhere.
    pub fn entropy_density(&self, rho: f64) -> f64 {
        if rho < self.rho_floor {
            let fl = self.rho_floor;
            return self.phi_raw(fl) + (rho - fl) * self.eval(fl).0;
        }
        self.phi_raw(rho)
    }

    fn phi_raw(&self, rho: f64) -> f64 {
        match self.form {
            Form::Gibbs => rho * rho.ln(),
            Form::Deformed {
                lambda,
                alpha,
                kappa,
                r,
            } => {
                let a = r + 1.0;
                let lx = (rho / alpha).ln();
                let up = ((a + kappa) * lx).exp() / (a + kappa);
                let dn = ((a - kappa) * lx).exp() / (a - kappa);
                lambda * alpha * (up - dn) / (2.0 * kappa)
            }
            Form::DeformedLimit { lambda, alpha, r } => {
                let a = r + 1.0;
                let lx = (rho / alpha).ln();
                lambda * alpha * (a * lx).exp() * (lx / a - 1.0 / (a * a))
            }
            Form::Tsallis { q } => rho * ((q - 1.0) * rho.ln()).exp_m1() / (q - 1.0),
            Form::Exclusion { kappa } => {
                if kappa == 0.0 {
                    rho * rho.ln() - rho
                } else {
                    let u = kappa * rho;
                    rho * rho.ln() - (1.0 + u) * u.ln_1p() / kappa
                }
            }
        }
    }

    /// Drift mobility gamma(rho); not floored, gamma(0) = 0.
    pub fn gamma(&self, rho: f64) -> f64 {
        match self.gamma_kappa {
            Some(k) => rho * (1.0 + k * rho),
            None => rho,
        }
    }

    pub fn d_gamma(&self, rho: f64) -> f64 {
        match self.gamma_kappa {
            Some(k) => 1.0 + 2.0 * k * rho,
            None => 1.0,
        }
    }

    pub fn has_linear_drift(&self) -> bool {
        self.gamma_kappa.is_none()
    }

    pub fn functionals(&self) -> DerivedFunctionals<'_> {
        DerivedFunctionals { model: self }
    }

    /// Infimum and supremum of `ln kappa` over the admissible interval.
    pub fn ln_kappa_range(&self) -> (f64, f64) {
        let (a, b) = self.admissible;
        match self.form {
            Form::Gibbs => (f64::NEG_INFINITY, f64::INFINITY),
            Form::Tsallis { q } => {
                if q > 1.0 {
                    (-1.0 / (q - 1.0), f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, 1.0 / (1.0 - q))
                }
            }
            Form::Exclusion { kappa } => {
                if kappa > 0.0 {
                    (f64::NEG_INFINITY, -kappa.ln())
                } else {
                    (f64::NEG_INFINITY, f64::INFINITY)
                }
            }
            Form::Deformed {
                lambda, kappa, r, ..
            } => {
                let lo = if a > 0.0 {
                    self.eval(a).0
                } else if r < kappa {
                    f64::NEG_INFINITY
                } else {
                    -lambda / (2.0 * kappa)
                };
                let hi = if b.is_finite() {
                    self.eval(b).0
                } else if r > -kappa {
                    f64::INFINITY
                } else {
                    lambda / (2.0 * kappa)
                };
                (lo, hi)
            }
            Form::DeformedLimit { .. } => {
                let lo = if a > 0.0 {
                    self.eval(a).0
                } else {
                    f64::NEG_INFINITY
                };
                let hi = if b.is_finite() {
                    self.eval(b).0
                } else {
                    f64::INFINITY
                };
                (lo, hi)
            }
        }
    }

    /// Density whose `ln kappa` equals `y`.
    pub fn ln_kappa_inverse(&self, y: f64) -> Result<f64> {
        if y.is_nan() {
            return Err(Error::Domain("ln kappa inverse of NaN".into()));
        }
        let (lo, hi) = self.ln_kappa_range();
        if !(y > lo && y < hi) {
            return Err(Error::Range { value: y, lo, hi });
        }
        Ok(match self.form {
            Form::Gibbs => (y - 1.0).exp(),
            Form::Tsallis { q } => ((((q - 1.0) * y).ln_1p() - q.ln()) / (q - 1.0)).exp(),
            Form::Exclusion { kappa } => 1.0 / ((-y).exp() - kappa),
            Form::Deformed { .. } | Form::DeformedLimit { .. } => self.bisect(y),
        })
    }

    /// Like `ln_kappa_inverse` but returns 0 when `y` is at or below a finite
    /// infimum attained as rho -> 0 (compact support).
    pub fn ln_kappa_inverse_or_zero(&self, y: f64) -> Result<f64> {
        let (lo, _) = self.ln_kappa_range();
        if lo.is_finite() && self.admissible.0 == 0.0 && y <= lo {
            return Ok(0.0);
        }
        self.ln_kappa_inverse(y)
    }

    /// kappa^{-1}(k) for k > 0.
    pub fn kappa_inverse(&self, k: f64) -> Result<f64> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("kappa inverse needs a positive argument, got {k}")));
        }
        self.ln_kappa_inverse(k.ln())
    }

    fn bisect(&self, y: f64) -> f64 {
        let (a, b) = self.admissible;
        let mut lo = if a > 0.0 { a.ln() } else { LN_RHO_MIN };
        let mut hi = if b.is_finite() { b.ln() } else { LN_RHO_MAX };
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid.exp()).0 < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * (1.0 + mid.abs()) {
                break;
            }
        }
        (0.5 * (lo + hi)).exp()
    }
}

fn deformed_form(kappa: f64, r: f64) -> Result<Form> {
    if !(kappa.is_finite() && r.is_finite()) {
        return Err(Error::Config("two-parameter entropy needs finite kappa and r".into()));
    }
    let k = kappa.abs();
    if !(k < 1.0 + r) {
        return Err(Error::Config(format!(
            "two-parameter entropy needs |kappa| < 1 + r, got kappa = {kappa}, r = {r}"
        )));
    }
    if k < LIMIT_THRESHOLD {
        if r.abs() < LIMIT_THRESHOLD {
            return Ok(Form::Gibbs);
        }
        let a = 1.0 + r;
        return Ok(Form::DeformedLimit {
            lambda: a * (-r / a).exp(),
            alpha: (-1.0 / a).exp(),
            r,
        });
    }
    let lm = (r - k).ln_1p();
    let lp = (r + k).ln_1p();
    let lambda = (((r + k) * lm - (r - k) * lp) / (2.0 * k)).exp();
    let alpha = ((lm - lp) / (2.0 * k)).exp();
    if !(lambda.is_finite() && lambda > 0.0 && alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Config(format!(
            "two-parameter entropy has invalid lambda/alpha for kappa = {kappa}, r = {r}"
        )));
    }
    Ok(Form::Deformed {
        lambda,
        alpha,
        kappa: k,
        r,
    })
}

fn admissible_interval(form: Form) -> (f64, f64) {
    match form {
        Form::Gibbs | Form::Tsallis { .. } => (0.0, f64::INFINITY),
        Form::Exclusion { kappa } => {
            if kappa < 0.0 {
                (0.0, -1.0 / kappa)
            } else {
                (0.0, f64::INFINITY)
            }
        }
        Form::Deformed {
            alpha, kappa, r, ..
        } => {
            let c = r / kappa;
            if c > 1.0 {
                (alpha * (-(1.0 / c).atanh() / kappa).exp(), f64::INFINITY)
            } else if c < -1.0 {
                (0.0, alpha * ((-1.0 / c).atanh() / kappa).exp())
            } else {
                (0.0, f64::INFINITY)
            }
        }
        Form::DeformedLimit { alpha, r, .. } => {
            if r > 0.0 {
                (alpha * (-1.0 / r).exp(), f64::INFINITY)
            } else {
                (0.0, alpha * (-1.0 / r).exp())
            }
        }
    }
}

/// Evaluators for the functionals built from `ln kappa` and `gamma`.
#[derive(Clone, Copy, Debug)]
pub struct DerivedFunctionals<'a> {
    model: &'a EntropyModel,
}

impl DerivedFunctionals<'_> {
    /// f = gamma ln kappa'
    pub fn f(&self, rho: f64) -> f64 {
        self.model.gamma(self.model.clamp(rho)) * self.model.d_ln_kappa(rho)
    }

    /// f~ = rho ln kappa'
    pub fn f_tilde(&self, rho: f64) -> f64 {
        self.model.clamp(rho) * self.model.d_ln_kappa(rho)
    }

    /// f1 = gamma (ln kappa')^2
    pub fn f1(&self, rho: f64) -> f64 {
        let d = self.model.d_ln_kappa(rho);
        self.model.gamma(self.model.clamp(rho)) * d * d
    }

    /// f2 = f1' / 2
    pub fn f2(&self, rho: f64) -> f64 {
        let rc = self.model.clamp(rho);
        let (_, d1, d2) = self.model.eval(rc);
        0.5 * self.model.d_gamma(rc) * d1 * d1 + self.model.gamma(rc) * d1 * d2
    }

    pub fn f1_tilde(&self, rho: f64) -> f64 {
        let d = self.model.d_ln_kappa(rho);
        self.model.clamp(rho) * d * d
    }

    pub fn f2_tilde(&self, rho: f64) -> f64 {
        let rc = self.model.clamp(rho);
        let (_, d1, d2) = self.model.eval(rc);
        0.5 * d1 * d1 + rc * d1 * d2
    }

    /// F with F' = f and F(0) = 0.
    pub fn big_f(&self, rho: f64) -> f64 {
        let m = self.model;
        match m.gamma_kappa {
            Some(_) => rho,
            None => {
                let rc = m.clamp(rho);
                rc * m.eval(rc).0 - m.phi_raw(rc)
            }
        }
    }
}

/// One row of a catalog dump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatalogRow {
    pub rho: f64,
    pub ln_kappa: f64,
    pub d_ln_kappa: f64,
    pub gamma: f64,
    pub f: f64,
    pub f_tilde: f64,
    pub f1: f64,
    pub f2: f64,
    pub f1_tilde: f64,
    pub f2_tilde: f64,
    pub big_f: f64,
}

pub fn catalog_table(model: &EntropyModel, rhos: &[f64]) -> Vec<CatalogRow> {
    let fun = model.functionals();
    rhos.iter()
        .map(|&rho| CatalogRow {
            rho,
            ln_kappa: model.ln_kappa(rho),
            d_ln_kappa: model.d_ln_kappa(rho),
            gamma: model.gamma(rho),
            f: fun.f(rho),
            f_tilde: fun.f_tilde(rho),
            f1: fun.f1(rho),
            f2: fun.f2(rho),
            f1_tilde: fun.f1_tilde(rho),
            f2_tilde: fun.f2_tilde(rho),
            big_f: fun.big_f(rho),
        })
        .collect()
}

/// Log-spaced densities on [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    // Straight transcription of the two-parameter logarithm with powf.
    fn two_param_oracle(kappa: f64, r: f64, rho: f64) -> f64 {
        let lambda = (1.0 + r - kappa).powf((r + kappa) / (2.0 * kappa))
            / (1.0 + r + kappa).powf((r - kappa) / (2.0 * kappa));
        let alpha = ((1.0 + r - kappa) / (1.0 + r + kappa)).powf(1.0 / (2.0 * kappa));
        let x = rho / alpha;
        lambda * (x.powf(r + kappa) - x.powf(r - kappa)) / (2.0 * kappa)
    }

    fn fd(g: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-4 * x;
        (-g(x + 2.0 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2.0 * h)) / (12.0 * h)
    }

    fn all_models() -> Vec<EntropyModel> {
        vec![
            EntropyModel::bg(),
            EntropyModel::two_param(0.5, 0.25).unwrap(),
            EntropyModel::tsallis(1.5).unwrap(),
            EntropyModel::tsallis(0.7).unwrap(),
            EntropyModel::kaniadakis(0.5).unwrap(),
            EntropyModel::eip(0.5, DriftChoice::Linear).unwrap(),
            EntropyModel::eip(0.5, DriftChoice::Nonlinear).unwrap(),
            EntropyModel::eip(-0.5, DriftChoice::Linear).unwrap(),
            EntropyModel::two_param(1e-8, 0.3).unwrap(),
        ]
    }

    #[test]
    fn frozen_values() {
        let t2 = EntropyModel::tsallis(2.0).unwrap();
        assert!(t2.ln_kappa(0.5).abs() < 1e-15);
        assert!(rel(t2.ln_kappa(3.0), 5.0) < 1e-14);
        let k = EntropyModel::kaniadakis(0.5).unwrap();
        assert!(k.ln_kappa(1.0 / 3.0).abs() < 1e-14);
        assert!(rel(k.ln_kappa(3.0), 0.75f64.sqrt() * (3.0 - 1.0 / 3.0)) < 1e-13);
        let e = EntropyModel::eip(1.0, DriftChoice::Linear).unwrap();
        assert!(rel(e.ln_kappa(1.0), -(2.0f64).ln()) < 1e-15);
        assert!(rel(EntropyModel::bg().ln_kappa(1.0), 1.0) < 1e-15);
    }

    #[test]
    fn two_param_matches_direct_formula() {
        let m = EntropyModel::two_param(0.5, 0.25).unwrap();
        for rho in log_grid(1e-3, 1e3, 61) {
            let a = two_param_oracle(0.5, 0.25, rho);
            assert!((m.ln_kappa(rho) - a).abs() <= 1e-12 * (1.0 + a.abs()), "rho={rho}");
        }
    }

    #[test]
    fn special_cases_agree() {
        // Tsallis is the r = kappa slice with q = 1 + 2 kappa, Kaniadakis is r = 0.
        let ts = EntropyModel::tsallis(1.6).unwrap();
        let tp = EntropyModel::two_param(0.3, 0.3).unwrap();
        let ka = EntropyModel::kaniadakis(0.4).unwrap();
        let tk = EntropyModel::two_param(0.4, 0.0).unwrap();
        for rho in log_grid(1e-3, 1e3, 41) {
            assert!(rel(ts.ln_kappa(rho), tp.ln_kappa(rho)) < 1e-11 || (ts.ln_kappa(rho) - tp.ln_kappa(rho)).abs() < 1e-12);
            assert!((ka.ln_kappa(rho) - tk.ln_kappa(rho)).abs() < 1e-12 * (1.0 + ka.ln_kappa(rho).abs()));
        }
    }

    #[test]
    fn kappa_sign_symmetry() {
        let a = EntropyModel::two_param(0.3, 0.1).unwrap();
        let b = EntropyModel::two_param(-0.3, 0.1).unwrap();
        for rho in log_grid(1e-2, 1e2, 21) {
            assert_eq!(a.ln_kappa(rho), b.ln_kappa(rho));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for m in all_models() {
            let (lo, hi) = m.admissible_interval();
            let hi = hi.min(1e2) * 0.9;
            for rho in log_grid(lo.max(1e-2) * 1.5, hi, 25) {
                let d1 = fd(|x| m.ln_kappa(x), rho);
                let d2 = fd(|x| m.d_ln_kappa(x), rho);
                assert!(rel(m.d_ln_kappa(rho), d1) < 1e-7, "{:?} rho={rho}", m.kind());
                assert!((m.d2_ln_kappa(rho) - d2).abs() < 1e-6 * (1.0 + d2.abs()), "{:?} rho={rho}", m.kind());
            }
        }
    }

    #[test]
    fn entropy_density_is_antiderivative() {
        for m in all_models() {
            let (_, hi) = m.admissible_interval();
            for rho in log_grid(1e-2, hi.min(1e2) * 0.9, 17) {
                let d = fd(|x| m.entropy_density(x), rho);
                assert!((d - m.ln_kappa(rho)).abs() < 1e-7 * (1.0 + d.abs()), "{:?} rho={rho}", m.kind());
            }
        }
    }

    #[test]
    fn big_f_is_antiderivative_of_f() {
        for m in all_models() {
            let fun = m.functionals();
            let (_, hi) = m.admissible_interval();
            for rho in log_grid(1e-2, hi.min(1e2) * 0.9, 17) {
                let d = fd(|x| fun.big_f(x), rho);
                assert!((d - fun.f(rho)).abs() < 1e-7 * (1.0 + d.abs()), "{:?} rho={rho}", m.kind());
            }
        }
    }

    #[test]
    fn f_closed_forms() {
        // Printed closed forms of f for each family.
        let t = EntropyModel::tsallis(1.5).unwrap();
        let k = EntropyModel::kaniadakis(0.5).unwrap();
        let tp = EntropyModel::two_param(0.5, 0.25).unwrap();
        let e = EntropyModel::eip(0.5, DriftChoice::Linear).unwrap();
        let en = EntropyModel::eip(0.5, DriftChoice::Nonlinear).unwrap();
        let (kk, r) = (0.5, 0.25);
        let ap = (r + kk) * (1.0 + r + kk) / (2.0 * kk);
        let am = (r - kk) * (1.0 + r - kk) / (2.0 * kk);
        for rho in log_grid(1e-3, 1e3, 31) {
            assert!(rel(t.functionals().f(rho), 1.5 * rho.sqrt()) < 1e-13);
            let kf = 0.5 * (1.5 * rho.powf(0.5) + 0.5 * rho.powf(-0.5));
            assert!(rel(k.functionals().f(rho), kf) < 1e-12);
            let tf = ap * rho.powf(r + kk) - am * rho.powf(r - kk);
            assert!(rel(tp.functionals().f(rho), tf) < 1e-12);
            assert!(rel(e.functionals().f(rho), 1.0 / (1.0 + 0.5 * rho)) < 1e-13);
            assert!(rel(en.functionals().f(rho), 1.0) < 1e-13);
        }
    }

    #[test]
    fn f1_f2_relations() {
        for m in all_models() {
            let fun = m.functionals();
            let (_, hi) = m.admissible_interval();
            for rho in log_grid(1e-2, hi.min(1e2) * 0.9, 13) {
                let d = 0.5 * fd(|x| fun.f1(x), rho);
                assert!((fun.f2(rho) - d).abs() < 1e-6 * (1.0 + d.abs()), "{:?}", m.kind());
                let dt = 0.5 * fd(|x| fun.f1_tilde(x), rho);
                assert!((fun.f2_tilde(rho) - dt).abs() < 1e-6 * (1.0 + dt.abs()));
                if m.has_linear_drift() {
                    assert_eq!(fun.f1(rho), fun.f1_tilde(rho));
                }
            }
        }
    }

    #[test]
    fn eip_quantum_functionals() {
        let lin = EntropyModel::eip(0.5, DriftChoice::Linear).unwrap();
        let non = EntropyModel::eip(0.5, DriftChoice::Nonlinear).unwrap();
        for rho in log_grid(1e-2, 1e2, 11) {
            let u = 1.0 + 0.5 * rho;
            let fl = lin.functionals();
            assert!(rel(fl.f1(rho), 1.0 / (rho * u * u)) < 1e-13);
            let f2 = -(1.0 + 1.5 * rho) / (2.0 * rho * rho * u * u * u);
            assert!(rel(fl.f2(rho), f2) < 1e-12);
            let fnl = non.functionals();
            assert!(rel(fnl.f1(rho), 1.0 / (u * rho)) < 1e-13);
            let f2 = -(1.0 + rho) / (2.0 * rho * rho * u * u);
            assert!(rel(fnl.f2(rho), f2) < 1e-12);
        }
    }

    #[test]
    fn tsallis_f_tilde_for_quantum_term() {
        // rho-weighted combination f1~ = q^2 rho^{2q-3}, f2~ = q^2 (q - 3/2) rho^{2q-4}
        let q: f64 = 1.5;
        let m = EntropyModel::tsallis(q).unwrap();
        let fun = m.functionals();
        for rho in log_grid(1e-2, 1e2, 11) {
            assert!(rel(fun.f1_tilde(rho), q * q * rho.powf(2.0 * q - 3.0)) < 1e-12);
            let f2 = q * q * (q - 1.5) * rho.powf(2.0 * q - 4.0);
            assert!((fun.f2_tilde(rho) - f2).abs() < 1e-12);
        }
    }

    #[test]
    fn small_deformation_limits() {
        let bg = EntropyModel::bg();
        let tp = EntropyModel::two_param(1e-4, 1e-4).unwrap();
        let ts = EntropyModel::tsallis(1.0 + 1e-7).unwrap();
        let tp0 = EntropyModel::two_param(1e-8, 0.2).unwrap();
        let tp1 = EntropyModel::two_param(1e-5, 0.2).unwrap();
        for rho in log_grid(1e-3, 1e3, 61) {
            let b = bg.ln_kappa(rho);
            assert!((tp.ln_kappa(rho) - b).abs() / b.abs().max(1.0) < 1e-3, "rho={rho}");
            assert!((ts.ln_kappa(rho) - bg.ln_kappa(rho)).abs() < 1e-6);
            assert!((tp0.ln_kappa(rho) - tp1.ln_kappa(rho)).abs() < 1e-7);
        }
    }

    #[test]
    fn inverse_round_trip() {
        for m in all_models() {
            let (lo, hi) = m.admissible_interval();
            for rho in log_grid(lo.max(1e-3) * 1.01, hi.min(1e3) * 0.99, 41) {
                let back = m.ln_kappa_inverse(m.ln_kappa(rho)).unwrap();
                assert!(rel(back, rho) < 1e-10, "{:?} rho={rho} back={back}", m.kind());
            }
        }
    }

    #[test]
    fn inverse_range_errors() {
        let e = EntropyModel::eip(0.5, DriftChoice::Linear).unwrap();
        assert!(matches!(e.kappa_inverse(2.5), Err(Error::Range { .. })));
        let t = EntropyModel::tsallis(2.0).unwrap();
        assert!(matches!(t.ln_kappa_inverse(-1.5), Err(Error::Range { .. })));
        assert_eq!(t.ln_kappa_inverse_or_zero(-1.5).unwrap(), 0.0);
        assert!(matches!(e.kappa_inverse(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn construction_errors() {
        assert!(EntropyModel::two_param(1.5, 0.25).is_err());
        assert!(EntropyModel::tsallis(-1.0).is_err());
        assert!(EntropyModel::kaniadakis(1.0).is_err());
        assert!(EntropyModel::with_floor(EntropyKind::Bg, 0.0).is_err());
    }

    #[test]
    fn admissible_interval_for_large_r() {
        // r > kappa: ln kappa turns over at small rho.
        let m = EntropyModel::two_param(0.2, 0.5).unwrap();
        let (lo, hi) = m.admissible_interval();
        assert!(lo > 0.0 && hi.is_infinite());
        assert!(m.d_ln_kappa(lo * 1.001) > 0.0);
        assert!(m.d_ln_kappa(lo * 0.999) < 0.0);
        let err = m.check_monotone_on(1e-12, 10.0).unwrap_err();
        match err {
            Error::Monotonicity { lo: a, hi: b, .. } => {
                assert_eq!(a, 1e-12);
                assert!((b - lo).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(m.check_monotone_on(lo * 2.0, 10.0).is_ok());
        let neg = EntropyModel::two_param(0.2, -0.5).unwrap();
        let (_, hi) = neg.admissible_interval();
        assert!(neg.d_ln_kappa(hi * 0.999) > 0.0 && neg.d_ln_kappa(hi * 1.001) < 0.0);
    }

    #[test]
    fn floor_applies() {
        let m = EntropyModel::bg();
        assert_eq!(m.ln_kappa(0.0), m.ln_kappa(DEFAULT_RHO_FLOOR));
        assert!(m.try_ln_kappa(0.0).is_err());
        assert_eq!(m.gamma(0.0), 0.0);
    }
}
