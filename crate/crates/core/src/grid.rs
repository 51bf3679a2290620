use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Bounded,
}

/// Uniform spatial grid `x_j = x_min + j dx`, `j = 0..n_points`, with
/// `dx = (x_max - x_min) / n_points`. The right end point is not sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub boundary: Boundary,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, boundary: Boundary) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            n_points,
            boundary,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn periodic(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        Self::new(x_min, x_max, n_points, Boundary::Periodic)
    }

    pub fn bounded(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        Self::new(x_min, x_max, n_points, Boundary::Bounded)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite()) {
            return Err(invalid("grid bounds must be finite"));
        }
        if self.n_points < 2 {
            return Err(invalid(format!(
                "grid needs at least 2 points, got {}",
                self.n_points
            )));
        }
        if self.dx() <= 0.0 {
            return Err(invalid(format!(
                "grid spacing must be positive (x_min = {}, x_max = {})",
                self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    /// Required by the FFT-based backend.
    pub fn require_power_of_two(&self) -> Result<()> {
        if self.n_points.is_power_of_two() {
            Ok(())
        } else {
            Err(invalid(format!(
                "spectral backend needs a power-of-two point count, got {}",
                self.n_points
            )))
        }
    }

    pub fn lattice_spacing(&self) -> f64 {
        2.0 * PI / self.length()
    }

    pub fn nearest_lattice_wavenumber(&self, k: f64) -> f64 {
        let dk = self.lattice_spacing();
        (k / dk).round() * dk
    }

    /// Checks that `k` is an admissible plane-wave wavenumber of a periodic grid.
    /// Bounded grids accept any wavenumber.
    pub fn check_lattice_wavenumber(&self, k: f64) -> Result<()> {
        if !self.is_periodic() {
            return Ok(());
        }
        let nearest = self.nearest_lattice_wavenumber(k);
        let scale = k.abs().max(self.lattice_spacing());
        if (k - nearest).abs() <= 1e-12 * scale {
            Ok(())
        } else {
            Err(invalid(format!(
                "wavenumber {k} is off the periodic lattice 2*pi*n/{}; nearest lattice value is {nearest}",
                self.length()
            )))
        }
    }

    pub fn same_as(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Standard DFT ordering `2 pi n / L`, `n = 0, 1, .., N/2 - 1, -N/2, .., -1`.
pub fn wavenumber_lattice(grid: &GridSpec) -> Result<Vec<f64>> {
    if !grid.is_periodic() {
        return Err(Error::Unsupported(
            "wavenumber lattice requires a periodic grid".into(),
        ));
    }
    let n = grid.n_points as i64;
    let dk = grid.lattice_spacing();
    Ok((0..n)
        .map(|j| {
            let m = if j < n / 2 { j } else { j - n };
            m as f64 * dk
        })
        .collect())
}

/// Closed interval `[lo, hi]` in which diagnostics are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(invalid(format!("window bounds must satisfy lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn whole(grid: &GridSpec) -> Self {
        Self {
            lo: grid.x_min,
            hi: grid.x_max,
        }
    }

    /// Central fraction of the box, e.g. `0.5` for the central half.
    pub fn central(grid: &GridSpec, fraction: f64) -> Self {
        let mid = 0.5 * (grid.x_min + grid.x_max);
        let half = 0.5 * fraction * grid.length();
        Self {
            lo: mid - half,
            hi: mid + half,
        }
    }

    pub fn indices(&self, grid: &GridSpec) -> Vec<usize> {
        (0..grid.n_points)
            .filter(|&j| {
                let x = grid.x(j);
                x >= self.lo - 1e-12 && x <= self.hi + 1e-12
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lattice_small_boxes() {
        let g = GridSpec::periodic(0.0, 2.0 * PI, 4).unwrap();
        let k = wavenumber_lattice(&g).unwrap();
        let expect = [0.0, 1.0, -2.0, -1.0];
        for (a, b) in k.iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        let g = GridSpec::periodic(0.0, 2.0 * PI, 2).unwrap();
        let k = wavenumber_lattice(&g).unwrap();
        assert_abs_diff_eq!(k[0], 0.0);
        assert_abs_diff_eq!(k[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn lattice_desk_scale_box() {
        let g = GridSpec::periodic(-16.0 * PI, 16.0 * PI, 1024).unwrap();
        let k = wavenumber_lattice(&g).unwrap();
        assert_abs_diff_eq!(k[1], 1.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn bounded_grid_has_no_lattice() {
        let g = GridSpec::bounded(-8.0, 8.0, 16).unwrap();
        assert!(matches!(wavenumber_lattice(&g), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::periodic(0.0, 1.0, 1).is_err());
        assert!(GridSpec::periodic(1.0, 1.0, 8).is_err());
        assert!(GridSpec::periodic(0.0, 1.0, 6).unwrap().require_power_of_two().is_err());
    }

    #[test]
    fn off_lattice_kappa_names_nearest_value() {
        let g = GridSpec::periodic(-16.0 * PI, 16.0 * PI, 64).unwrap();
        assert!(g.check_lattice_wavenumber(0.125).is_ok());
        let err = g.check_lattice_wavenumber(0.1).unwrap_err().to_string();
        assert!(err.contains("0.125"), "{err}");
    }

    #[test]
    fn central_window_indices() {
        let g = GridSpec::bounded(-8.0, 8.0, 16).unwrap();
        let w = Window::central(&g, 0.5);
        assert_eq!(w, Window { lo: -4.0, hi: 4.0 });
        let idx = w.indices(&g);
        assert_eq!(idx.first().copied(), Some(4));
        assert_eq!(idx.last().copied(), Some(12));
    }
}
