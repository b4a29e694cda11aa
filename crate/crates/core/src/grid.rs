//! Periodic grids, fourth-order finite differences and the two field
//! representations (complex wavefunction and hydrodynamic pair).

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 16;

/// Uniform periodic grid on [-L/2, L/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    n: usize,
    length: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(Error::Config(format!("grid needs at least {MIN_POINTS} points, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("grid length must be positive, got {length}")));
        }
        Ok(Grid1D { n, length })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Wavenumber 2 pi j / L of the j-th periodic mode.
    pub fn wavenumber(&self, j: i64) -> f64 {
        2.0 * PI * j as f64 / self.length
    }

    /// Index of the periodic mode closest to `k`.
    pub fn nearest_mode(&self, k: f64) -> i64 {
        (k * self.length / (2.0 * PI)).round() as i64
    }

    pub fn sample(&self, g: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n).map(|i| g(self.x(i))).collect()
    }

    pub fn integrate(&self, field: &[f64]) -> f64 {
        field.iter().sum::<f64>() * self.spacing()
    }
}

pub trait FieldValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}

impl FieldValue for f64 {}
impl FieldValue for Complex64 {}

#[inline]
fn wrap(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// Fourth-order central first derivative.
pub fn d1<T: FieldValue>(grid: &Grid1D, f: &[T]) -> Vec<T> {
    let n = f.len();
    let c = 1.0 / (12.0 * grid.spacing());
    (0..n)
        .map(|i| {
            let i = i as isize;
            let (m2, m1, p1, p2) = (
                f[wrap(i - 2, n)],
                f[wrap(i - 1, n)],
                f[wrap(i + 1, n)],
                f[wrap(i + 2, n)],
            );
            ((p1 - m1) * 8.0 - (p2 - m2)) * c
        })
        .collect()
}

/// Fourth-order central second derivative.
pub fn d2<T: FieldValue>(grid: &Grid1D, f: &[T]) -> Vec<T> {
    let n = f.len();
    let h = grid.spacing();
    let c = 1.0 / (12.0 * h * h);
    (0..n)
        .map(|i| {
            let ii = i as isize;
            let (m2, m1, p1, p2) = (
                f[wrap(ii - 2, n)],
                f[wrap(ii - 1, n)],
                f[wrap(ii + 1, n)],
                f[wrap(ii + 2, n)],
            );
            ((p1 + m1) * 16.0 - (p2 + m2) - f[i] * 30.0) * c
        })
        .collect()
}

/// Checked derivative of order 1 or 2.
pub fn spatial_derivative(grid: &Grid1D, field: &[f64], order: u32) -> Result<Vec<f64>> {
    if field.len() != grid.len() {
        return Err(Error::Usage(format!(
            "field has {} values, grid has {}",
            field.len(),
            grid.len()
        )));
    }
    match order {
        1 => Ok(d1(grid, field)),
        2 => Ok(d2(grid, field)),
        _ => Err(Error::Usage(format!("derivative order must be 1 or 2, got {order}"))),
    }
}

/// First derivative of a phase field known modulo `period`; each stencil
/// difference is reduced to (-period/2, period/2].
pub fn d1_phase(grid: &Grid1D, phase: &[f64], period: f64) -> Vec<f64> {
    let n = phase.len();
    let c = 1.0 / (12.0 * grid.spacing());
    let red = |d: f64| d - period * (d / period).round();
    (0..n)
        .map(|i| {
            let ii = i as isize;
            let p0 = phase[i];
            let dm2 = red(phase[wrap(ii - 2, n)] - p0);
            let dm1 = red(phase[wrap(ii - 1, n)] - p0);
            let dp1 = red(phase[wrap(ii + 1, n)] - p0);
            let dp2 = red(phase[wrap(ii + 2, n)] - p0);
            (8.0 * (dp1 - dm1) - (dp2 - dm2)) * c
        })
        .collect()
}

/// Second derivative of a phase field known modulo `period`.
pub fn d2_phase(grid: &Grid1D, phase: &[f64], period: f64) -> Vec<f64> {
    let n = phase.len();
    let h = grid.spacing();
    let c = 1.0 / (12.0 * h * h);
    let red = |d: f64| d - period * (d / period).round();
    (0..n)
        .map(|i| {
            let ii = i as isize;
            let p0 = phase[i];
            let dm2 = red(phase[wrap(ii - 2, n)] - p0);
            let dm1 = red(phase[wrap(ii - 1, n)] - p0);
            let dp1 = red(phase[wrap(ii + 1, n)] - p0);
            let dp2 = red(phase[wrap(ii + 2, n)] - p0);
            (16.0 * (dp1 + dm1) - (dp2 + dm2)) * c
        })
        .collect()
}

/// Periodic 2D grid, row-major with x fastest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        Ok(Grid2D {
            x: Grid1D::new(nx, lx)?,
            y: Grid1D::new(ny, ly)?,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.x.len() + ix
    }

    pub fn sample(&self, g: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for iy in 0..self.y.len() {
            for ix in 0..self.x.len() {
                out.push(g(self.x.x(ix), self.y.x(iy)));
            }
        }
        out
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.x.spacing() * self.y.spacing()
    }

    pub fn dx<T: FieldValue>(&self, f: &[T]) -> Vec<T> {
        let nx = self.x.len();
        let mut out = f.to_vec();
        for (row_in, row_out) in f.chunks(nx).zip(out.chunks_mut(nx)) {
            row_out.copy_from_slice(&d1(&self.x, row_in));
        }
        out
    }

    pub fn dy<T: FieldValue>(&self, f: &[T]) -> Vec<T> {
        let (nx, ny) = (self.x.len(), self.y.len());
        let mut out = f.to_vec();
        let mut col: Vec<T> = f[..ny.min(f.len())].to_vec();
        for ix in 0..nx {
            for iy in 0..ny {
                col[iy] = f[iy * nx + ix];
            }
            for (iy, v) in d1(&self.y, &col).into_iter().enumerate() {
                out[iy * nx + ix] = v;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexWavefunction {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
    pub hbar: f64,
    pub mass: f64,
}

impl ComplexWavefunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>, hbar: f64, mass: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "wavefunction has {} values, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if !(hbar > 0.0 && mass > 0.0) {
            return Err(Error::Config("hbar and mass must be positive".into()));
        }
        Ok(ComplexWavefunction {
            grid,
            values,
            hbar,
            mass,
        })
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.grid.integrate(&self.density())
    }

    pub fn normalize(&mut self) {
        let s = self.norm().sqrt();
        if s > 0.0 {
            self.values.iter_mut().for_each(|z| *z /= s);
        }
    }
}

/// Density and phase; psi = sqrt(rho) exp(i sigma / hbar).
#[derive(Clone, Debug, PartialEq)]
pub struct HydroPair {
    pub grid: Grid1D,
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
    pub hbar: f64,
    pub mass: f64,
}

impl HydroPair {
    /// Gradient of sigma, insensitive to 2 pi hbar jumps.
    pub fn grad_sigma(&self) -> Vec<f64> {
        d1_phase(&self.grid, &self.sigma, 2.0 * PI * self.hbar)
    }
}

/// Splits psi into (rho, sigma). The phase is unwrapped outward from the
/// density maximum, where it is anchored at hbar arg psi.
pub fn polar_decompose(psi: &ComplexWavefunction, rho_floor: f64) -> Result<HydroPair> {
    let rho = psi.density();
    if let Some(node) = find_node(&psi.grid, &rho, rho_floor) {
        return Err(node);
    }
    let n = rho.len();
    let anchor = argmax(&rho);
    let v = &psi.values;
    let mut theta = vec![0.0; n];
    theta[anchor] = v[anchor].arg();
    for i in anchor + 1..n {
        theta[i] = theta[i - 1] + (v[i] * v[i - 1].conj()).arg();
    }
    for i in (0..anchor).rev() {
        theta[i] = theta[i + 1] + (v[i] * v[i + 1].conj()).arg();
    }
    Ok(HydroPair {
        grid: psi.grid,
        rho,
        sigma: theta.into_iter().map(|t| psi.hbar * t).collect(),
        hbar: psi.hbar,
        mass: psi.mass,
    })
}

pub fn polar_compose(h: &HydroPair) -> ComplexWavefunction {
    let values = h
        .rho
        .iter()
        .zip(&h.sigma)
        .map(|(&r, &s)| Complex64::from_polar(r.max(0.0).sqrt(), s / h.hbar))
        .collect();
    ComplexWavefunction {
        grid: h.grid,
        values,
        hbar: h.hbar,
        mass: h.mass,
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Mass beyond a sub-floor gap, relative to the floor, that counts as a node.
const NODE_MASS_FACTOR: f64 = 1e3;

/// A node is a sub-floor point separating the component around the density
/// maximum from other points carrying substantial density.
pub fn find_node(grid: &Grid1D, rho: &[f64], rho_floor: f64) -> Option<Error> {
    let n = rho.len();
    let anchor = argmax(rho);
    if rho[anchor] < rho_floor {
        return Some(Error::Node {
            index: anchor,
            x: grid.x(anchor),
            rho: rho[anchor],
        });
    }
    let mut inside = vec![false; n];
    inside[anchor] = true;
    let mut right_gap = None;
    for s in 1..n {
        let i = (anchor + s) % n;
        if rho[i] < rho_floor {
            right_gap = Some(i);
            break;
        }
        inside[i] = true;
    }
    let mut left_gap = None;
    for s in 1..n {
        let i = (anchor + n - s) % n;
        if inside[i] {
            break;
        }
        if rho[i] < rho_floor {
            left_gap = Some(i);
            break;
        }
        inside[i] = true;
    }
    let threshold = NODE_MASS_FACTOR * rho_floor;
    let outside_max = (0..n)
        .filter(|&i| !inside[i])
        .map(|i| rho[i])
        .fold(0.0, f64::max);
    if outside_max > threshold {
        let g = right_gap.or(left_gap).unwrap_or(anchor);
        return Some(Error::Node {
            index: g,
            x: grid.x(g),
            rho: rho[g],
        });
    }
    None
}

/// Bohm potential -(hbar^2/2m) Delta sqrt(rho) / sqrt(rho).
pub fn quantum_potential(grid: &Grid1D, rho: &[f64], hbar: f64, mass: f64, rho_floor: f64) -> Vec<f64> {
    let sq: Vec<f64> = rho.iter().map(|r| r.max(0.0).sqrt()).collect();
    let lap = d2(grid, &sq);
    let sf = rho_floor.sqrt();
    lap.iter()
        .zip(&sq)
        .map(|(l, s)| -hbar * hbar / (2.0 * mass) * l / s.max(sf))
        .collect()
}

/// Largest density among the four points adjacent to the periodic seam.
pub fn boundary_density(rho: &[f64]) -> f64 {
    let n = rho.len();
    [rho[0], rho[1], rho[n - 2], rho[n - 1]]
        .into_iter()
        .fold(0.0, f64::max)
}

/// CSV snapshot with a grid metadata header.
pub fn snapshot_csv(psi: &ComplexWavefunction, sigma: Option<&[f64]>, t: f64) -> String {
    let mut s = String::new();
    let g = psi.grid;
    let _ = writeln!(
        s,
        "# n={} length={} spacing={} hbar={} mass={} t={}",
        g.len(),
        g.length(),
        g.spacing(),
        psi.hbar,
        psi.mass,
        t
    );
    s.push_str("x,re_psi,im_psi,rho,sigma\n");
    for (i, z) in psi.values.iter().enumerate() {
        let sg = sigma.map(|v| v[i]).unwrap_or_else(|| psi.hbar * z.arg());
        let _ = writeln!(s, "{:e},{:e},{:e},{:e},{:e}", g.x(i), z.re, z.im, z.norm_sqr(), sg);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D {
        Grid1D::new(256, 20.0).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = grid();
        assert_eq!(g.x(0), -10.0);
        assert!((g.spacing() - 20.0 / 256.0).abs() < 1e-15);
        assert_eq!(g.nearest_mode(g.wavenumber(3) * 1.01), 3);
        assert!(Grid1D::new(8, 1.0).is_err());
        assert!(Grid1D::new(64, 0.0).is_err());
    }

    #[test]
    fn fourth_order_convergence() {
        let mut errs = vec![];
        for n in [64usize, 128] {
            let g = Grid1D::new(n, 2.0 * PI).unwrap();
            let f = g.sample(|x| (2.0 * x).sin());
            let e1 = d1(&g, &f)
                .iter()
                .enumerate()
                .map(|(i, v)| (v - 2.0 * (2.0 * g.x(i)).cos()).abs())
                .fold(0.0, f64::max);
            let e2 = d2(&g, &f)
                .iter()
                .enumerate()
                .map(|(i, v)| (v + 4.0 * (2.0 * g.x(i)).sin()).abs())
                .fold(0.0, f64::max);
            errs.push((e1, e2));
        }
        assert!(errs[0].0 / errs[1].0 > 15.0);
        assert!(errs[0].1 / errs[1].1 > 15.0);
        assert!(errs[1].0 < 1e-5);
    }

    #[test]
    fn derivative_order_checked() {
        let g = grid();
        let f = vec![0.0; 256];
        assert!(matches!(spatial_derivative(&g, &f, 3), Err(Error::Usage(_))));
        assert!(spatial_derivative(&g, &f[..10], 1).is_err());
    }

    #[test]
    fn gaussian_integral() {
        let g = grid();
        let f = g.sample(|x| (-x * x / 2.0).exp() / (2.0 * PI).sqrt());
        assert!((g.integrate(&f) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polar_round_trip_and_phase() {
        let g = grid();
        let k = g.wavenumber(5);
        let vals: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let x = g.x(i);
                Complex64::from_polar((-x * x / 4.0).exp(), k * x + 0.3)
            })
            .collect();
        let psi = ComplexWavefunction::new(g, vals, 1.3, 1.0).unwrap();
        let h = polar_decompose(&psi, 1e-12).unwrap();
        for i in 0..g.len() {
            let expect = 1.3 * (k * g.x(i) + 0.3);
            assert!((h.sigma[i] - expect).abs() < 1e-9, "i={i}");
        }
        let back = polar_compose(&h);
        for (a, b) in back.values.iter().zip(&psi.values) {
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300) + 1e-300);
        }
        let gs = h.grad_sigma();
        assert!((gs[128] - 1.3 * k).abs() < 1e-6);
    }

    #[test]
    fn node_detected() {
        let g = grid();
        let vals: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let x = g.x(i);
                Complex64::new(x * (-x * x / 2.0).exp(), 0.0)
            })
            .collect();
        let psi = ComplexWavefunction::new(g, vals, 1.0, 1.0).unwrap();
        match polar_decompose(&psi, 1e-12) {
            Err(Error::Node { x, .. }) => assert!(x.abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quantum_potential_of_gaussian() {
        // rho = exp(-x^2/(2 s^2)): Q = -(hbar^2/2m)(x^2/(4 s^4) - 1/(2 s^2))
        let g = Grid1D::new(512, 20.0).unwrap();
        let rho = g.sample(|x| (-x * x / 2.0).exp());
        let q = quantum_potential(&g, &rho, 1.0, 1.0, 1e-12);
        for i in (200..312).step_by(7) {
            let x = g.x(i);
            let exact = -0.5 * (x * x / 4.0 - 0.5);
            assert!((q[i] - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn two_d_derivatives() {
        let g = Grid2D::new(64, 48, 2.0 * PI, 2.0 * PI).unwrap();
        let f = g.sample(|x, y| x.sin() * (2.0 * y).cos());
        let fx = g.dx(&f);
        let fy = g.dy(&f);
        let ex = g.sample(|x, y| x.cos() * (2.0 * y).cos());
        let ey = g.sample(|x, y| -2.0 * x.sin() * (2.0 * y).sin());
        for i in 0..g.len() {
            assert!((fx[i] - ex[i]).abs() < 1e-4);
            assert!((fy[i] - ey[i]).abs() < 1e-3);
        }
    }

    #[test]
    fn snapshot_has_header() {
        let g = Grid1D::new(16, 1.0).unwrap();
        let psi = ComplexWavefunction::new(g, vec![Complex64::new(1.0, 0.0); 16], 1.0, 1.0).unwrap();
        let s = snapshot_csv(&psi, None, 0.0);
        assert!(s.starts_with("# n=16"));
        assert_eq!(s.lines().count(), 18);
    }
}
