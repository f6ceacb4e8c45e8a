//! Classical fourth-order Runge–Kutta for linear systems `ẏ = M y` on six
//! coefficients.

use std::ops::{Add, Mul};

use super::DynamicsError;

pub const DIM: usize = 6;

pub type Matrix<T> = [[T; DIM]; DIM];
pub type Vector<T> = [T; DIM];

pub trait Scalar:
    Copy + Default + Add<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
}

impl<T> Scalar for T where
    T: Copy + Default + Add<Output = T> + Mul<Output = T> + Mul<f64, Output = T>
{
}

fn apply<T: Scalar>(m: &Matrix<T>, v: &Vector<T>) -> Vector<T> {
    let mut out = [T::default(); DIM];
    for (row, o) in m.iter().zip(out.iter_mut()) {
        *o = row
            .iter()
            .zip(v)
            .fold(T::default(), |acc, (&a, &b)| acc + a * b);
    }
    out
}

fn axpy<T: Scalar>(y: &Vector<T>, h: f64, k: &Vector<T>) -> Vector<T> {
    let mut out = *y;
    for (o, &ki) in out.iter_mut().zip(k) {
        *o = *o + ki * h;
    }
    out
}

pub fn rk4_step<T: Scalar>(m: &Matrix<T>, y: &Vector<T>, h: f64) -> Vector<T> {
    let k1 = apply(m, y);
    let k2 = apply(m, &axpy(y, 0.5 * h, &k1));
    let k3 = apply(m, &axpy(y, 0.5 * h, &k2));
    let k4 = apply(m, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..DIM {
        out[i] = out[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
    }
    out
}

/// Sample times `0, dt, 2dt, …, t_end`; the last step is shortened when
/// `dt` does not divide `t_end`.
pub fn time_grid(t_end: f64, dt: f64) -> Result<Vec<f64>, DynamicsError> {
    let valid = t_end.is_finite() && dt.is_finite() && dt > 0.0 && t_end > 0.0 && dt <= t_end;
    if !valid {
        return Err(DynamicsError::InvalidStep { t_end, dt });
    }
    let full = (t_end / dt).floor() as usize;
    let mut times: Vec<f64> = (0..=full).map(|k| k as f64 * dt).collect();
    // drop a grid point that rounding pushed onto or past the end
    while times.len() > 1 && *times.last().unwrap() >= t_end - 1e-12 * t_end {
        times.pop();
    }
    times.push(t_end);
    Ok(times)
}

/// Integrates `ẏ = M y` over `times`, returning the state at every time.
pub fn integrate<T: Scalar>(m: &Matrix<T>, y0: Vector<T>, times: &[f64]) -> Vec<Vector<T>> {
    let mut out = Vec::with_capacity(times.len());
    let mut y = y0;
    out.push(y);
    for w in times.windows(2) {
        y = rk4_step(m, &y, w[1] - w[0]);
        out.push(y);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_end_point() {
        let g = time_grid(1.0, 0.25).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = time_grid(1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!((g[3] - 0.9).abs() < 1e-15);
        let g = time_grid(2.0 * std::f64::consts::PI, 1e-3).unwrap();
        assert_eq!(g.len(), 6285);
        let g = time_grid(0.5, 0.5).unwrap();
        assert_eq!(g, vec![0.0, 0.5]);
    }

    #[test]
    fn grid_rejects_bad_steps() {
        for (t, dt) in [
            (1.0, 0.0),
            (1.0, -0.1),
            (0.0, 0.1),
            (0.1, 0.2),
            (f64::NAN, 0.1),
        ] {
            assert!(matches!(
                time_grid(t, dt),
                Err(DynamicsError::InvalidStep { .. })
            ));
        }
    }

    #[test]
    fn rk4_on_exponential_decay() {
        let mut m = [[0.0; DIM]; DIM];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = -(i as f64);
        }
        let times = time_grid(1.0, 1e-3).unwrap();
        let ys = integrate(&m, [1.0; DIM], &times);
        let last = ys.last().unwrap();
        for (i, y) in last.iter().enumerate() {
            assert!((y - (-(i as f64)).exp()).abs() < 1e-9, "{i}: {y}");
        }
    }
}
