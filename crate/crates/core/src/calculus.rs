//! Grid differentiation and quadrature helpers.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::grid::{wavenumber_lattice, GridSpec};

/// One-sided weights `w_1..w_p` of the antisymmetric central first-derivative
/// stencil: `f'(x_j) ~ sum_k w_k (f_{j+k} - f_{j-k}) / dx`.
pub fn first_derivative_weights(order: usize) -> Result<&'static [f64]> {
    match order {
        2 => Ok(&[0.5]),
        4 => Ok(&[2.0 / 3.0, -1.0 / 12.0]),
        6 => Ok(&[3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0]),
        _ => Err(invalid(format!(
            "central difference order must be 2, 4 or 6, got {order}"
        ))),
    }
}

/// Weights `w_0..w_p` of the symmetric central second-derivative stencil:
/// `f''(x_j) ~ (w_0 f_j + sum_k w_k (f_{j+k} + f_{j-k})) / dx^2`.
pub fn second_derivative_weights(order: usize) -> Result<&'static [f64]> {
    match order {
        2 => Ok(&[-2.0, 1.0]),
        4 => Ok(&[-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0]),
        6 => Ok(&[-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0]),
        _ => Err(invalid(format!(
            "central difference order must be 2, 4 or 6, got {order}"
        ))),
    }
}

/// Finite-difference weights for the `m`-th derivative at `z` from samples at
/// `xs` (Fornberg's recursion).
pub fn fornberg_weights(z: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// First (`deriv = 1`) or second (`deriv = 2`) derivative by central
/// differences of the given order. Periodic grids wrap around; on bounded
/// grids the points near the ends use one-sided stencils of the same order.
pub fn finite_difference<T>(values: &[T], grid: &GridSpec, deriv: usize, order: usize) -> Result<Vec<T>>
where
    T: Copy + Default + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    if !(deriv == 1 || deriv == 2) {
        return Err(invalid(format!("derivative order must be 1 or 2, got {deriv}")));
    }
    first_derivative_weights(order)?;
    let n = values.len();
    let p = order / 2;
    if n < order + 2 {
        return Err(invalid(format!("{n} points are too few for an order-{order} stencil")));
    }
    let scale = grid.dx().powi(deriv as i32);
    let offsets: Vec<f64> = (-(p as isize)..=p as isize).map(|k| k as f64).collect();
    let central = fornberg_weights(0.0, &offsets, deriv);
    // One-sided stencils: `width` points starting at the boundary.
    let width = order + deriv;
    let mut out = vec![T::default(); n];
    for (j, o) in out.iter_mut().enumerate() {
        let (start, w) = if grid.is_periodic() || (j >= p && j + p < n) {
            (j as isize - p as isize, None)
        } else {
            let start = if j < p { 0 } else { n - width };
            let xs: Vec<f64> = (0..width).map(|k| (start + k) as f64).collect();
            (start as isize, Some(fornberg_weights(j as f64, &xs, deriv)))
        };
        let weights = w.as_deref().unwrap_or(&central);
        let mut acc = T::default();
        for (k, wk) in weights.iter().enumerate() {
            let idx = (start + k as isize).rem_euclid(n as isize) as usize;
            acc = acc + values[idx] * *wk;
        }
        *o = acc * (1.0 / scale);
    }
    Ok(out)
}

/// FFT-based derivative on a periodic grid.
pub struct SpectralDerivative {
    grid: GridSpec,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralDerivative {
    pub fn new(grid: &GridSpec) -> Result<Self> {
        let wavenumbers = wavenumber_lattice(grid)?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            grid: *grid,
            forward: planner.plan_fft_forward(grid.n_points),
            inverse: planner.plan_fft_inverse(grid.n_points),
            wavenumbers,
        })
    }

    /// `d^order/dx^order` of a complex periodic signal. The Nyquist mode is
    /// dropped for odd orders.
    pub fn derivative(&self, values: &[Complex64], order: u32) -> Vec<Complex64> {
        let n = self.grid.n_points;
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / n as f64;
        for (j, (c, k)) in buf.iter_mut().zip(&self.wavenumbers).enumerate() {
            let factor = if order % 2 == 1 && n % 2 == 0 && j == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, *k).powu(order)
            };
            *c *= factor * scale;
        }
        self.inverse.process(&mut buf);
        buf
    }

    pub fn derivative_real(&self, values: &[f64], order: u32) -> Vec<f64> {
        let c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.derivative(&c, order).into_iter().map(|z| z.re).collect()
    }

    /// Antiderivative `F(x) = int_{x_min}^x g` of a real periodic signal,
    /// including the linear growth from its mean.
    pub fn antiderivative_real(&self, values: &[f64]) -> Vec<f64> {
        let n = self.grid.n_points;
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        let mean = buf[0].re / n as f64;
        let scale = 1.0 / n as f64;
        for (j, (c, k)) in buf.iter_mut().zip(&self.wavenumbers).enumerate() {
            if j == 0 || (n % 2 == 0 && j == n / 2) {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c = *c / Complex64::new(0.0, *k) * scale;
            }
        }
        self.inverse.process(&mut buf);
        let base = buf[0].re;
        (0..n)
            .map(|j| buf[j].re - base + mean * (self.grid.x(j) - self.grid.x_min))
            .collect()
    }
}

/// First derivative of a complex grid function: spectral on periodic grids,
/// sixth-order differences otherwise.
pub fn grid_derivative(values: &[Complex64], grid: &GridSpec) -> Result<Vec<Complex64>> {
    if grid.is_periodic() {
        Ok(SpectralDerivative::new(grid)?.derivative(values, 1))
    } else {
        finite_difference(values, grid, 1, 6)
    }
}

/// Real counterpart of [`grid_derivative`] for first or second derivatives.
pub fn grid_derivative_real(values: &[f64], grid: &GridSpec, deriv: u32) -> Result<Vec<f64>> {
    if grid.is_periodic() {
        Ok(SpectralDerivative::new(grid)?.derivative_real(values, deriv))
    } else {
        finite_difference(values, grid, deriv as usize, 6)
    }
}

/// Weights `w_k` with `int_0^1 p(s) ds = sum_k w_k p(o_k)` for every
/// polynomial `p` of degree below `offsets.len()`.
pub fn cell_integration_weights(offsets: &[f64]) -> Vec<f64> {
    let n = offsets.len();
    (0..n)
        .map(|k| {
            // Coefficients of the k-th Lagrange basis polynomial, low order first.
            let mut poly = vec![1.0];
            let mut denom = 1.0;
            for (i, &oi) in offsets.iter().enumerate() {
                if i == k {
                    continue;
                }
                let mut next = vec![0.0; poly.len() + 1];
                for (d, c) in poly.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= c * oi;
                }
                poly = next;
                denom *= offsets[k] - oi;
            }
            poly.iter()
                .enumerate()
                .map(|(d, c)| c / (d as f64 + 1.0))
                .sum::<f64>()
                / denom
        })
        .collect()
}

/// `F(x_j) = int_{x_min}^{x_j} g`. Spectral on periodic grids; on bounded
/// grids each cell is integrated with a six-point interpolant.
pub fn cumulative_integral(values: &[f64], grid: &GridSpec) -> Result<Vec<f64>> {
    if grid.is_periodic() {
        return Ok(SpectralDerivative::new(grid)?.antiderivative_real(values));
    }
    let n = values.len();
    const WIDTH: usize = 6;
    if n < WIDTH {
        return Ok(cumulative_trapezoid(values, grid.dx()));
    }
    let dx = grid.dx();
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; WIDTH];
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    out.push(0.0);
    for j in 0..n - 1 {
        let start = j.saturating_sub(WIDTH / 2 - 1).min(n - WIDTH);
        let shift = j - start;
        let w = cache[shift].get_or_insert_with(|| {
            let offsets: Vec<f64> = (0..WIDTH).map(|k| k as f64 - shift as f64).collect();
            cell_integration_weights(&offsets)
        });
        acc += dx * w.iter().zip(&values[start..start + WIDTH]).map(|(a, b)| a * b).sum::<f64>();
        out.push(acc);
    }
    Ok(out)
}

/// Cumulative trapezoid integral from the first sample.
pub fn cumulative_trapezoid(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Compactly supported smooth bump on the box, `exp(1 - 1/(1-u^2))` with
/// `u` the position rescaled to `(-1, 1)`.
pub fn smooth_taper(grid: &GridSpec) -> Vec<f64> {
    let mid = 0.5 * (grid.x_min + grid.x_max);
    let half = 0.5 * grid.length();
    grid.points()
        .into_iter()
        .map(|x| {
            let u = (x - mid) / half;
            if u.abs() >= 1.0 {
                0.0
            } else {
                (1.0 - 1.0 / (1.0 - u * u)).exp()
            }
        })
        .collect()
}

/// Fraction of spectral weight above `0.8` of the Nyquist wavenumber, after
/// multiplying each component by a smooth compact taper so that the box edges
/// do not leak.
pub fn high_wavenumber_fraction(grid: &GridSpec, components: &[Vec<Complex64>]) -> f64 {
    let n = grid.n_points;
    let fft_len = n.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(fft_len);
    let taper = smooth_taper(grid);
    let nyquist_index = fft_len / 2;
    let cut = (0.8 * nyquist_index as f64).ceil() as usize;
    let (mut high, mut total) = (0.0, 0.0);
    for comp in components {
        let mut buf = vec![Complex64::new(0.0, 0.0); fft_len];
        for j in 0..n {
            buf[j] = comp[j] * taper[j];
        }
        fft.process(&mut buf);
        for (j, c) in buf.iter().enumerate() {
            let m = if j <= nyquist_index { j } else { fft_len - j };
            let w = c.norm_sqr();
            total += w;
            if m >= cut {
                high += w;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        high / total
    }
}
