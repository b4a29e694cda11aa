//! Classical fourth-order Runge-Kutta stepping.

use num_complex::Complex64;

use crate::error::Result;

pub trait OdeState: Clone {
    /// self += a * x
    fn axpy(&mut self, a: f64, x: &Self);
    fn all_finite(&self) -> bool;
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.iter_mut().zip(x).for_each(|(s, v)| *s += a * v);
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for Vec<Complex64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.iter_mut().zip(x).for_each(|(s, v)| *s += v * a);
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl<A: OdeState, B: OdeState> OdeState for (A, B) {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.0.axpy(a, &x.0);
        self.1.axpy(a, &x.1);
    }

    fn all_finite(&self) -> bool {
        self.0.all_finite() && self.1.all_finite()
    }
}

pub fn rk4_step<S, F>(y: &S, t: f64, dt: f64, rhs: &mut F) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let k1 = rhs(t, y)?;
    let mut tmp = y.clone();
    tmp.axpy(0.5 * dt, &k1);
    let k2 = rhs(t + 0.5 * dt, &tmp)?;
    let mut tmp = y.clone();
    tmp.axpy(0.5 * dt, &k2);
    let k3 = rhs(t + 0.5 * dt, &tmp)?;
    let mut tmp = y.clone();
    tmp.axpy(dt, &k3);
    let k4 = rhs(t + dt, &tmp)?;
    let mut out = y.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_exponential() {
        let run = |dt: f64| {
            let mut y = vec![1.0];
            let steps = (1.0 / dt).round() as usize;
            for s in 0..steps {
                y = rk4_step(&y, s as f64 * dt, dt, &mut |_, v: &Vec<f64>| Ok(vec![-v[0]])).unwrap();
            }
            (y[0] - (-1.0f64).exp()).abs()
        };
        let ratio = run(0.1) / run(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "{ratio}");
    }

    #[test]
    fn complex_rotation() {
        let dt = 0.01;
        let mut y = vec![Complex64::new(1.0, 0.0)];
        for s in 0..100 {
            y = rk4_step(&y, s as f64 * dt, dt, &mut |_, v: &Vec<Complex64>| {
                Ok(vec![Complex64::i() * v[0]])
            })
            .unwrap();
        }
        assert!((y[0] - Complex64::from_polar(1.0, 1.0)).norm() < 1e-9);
    }
}
