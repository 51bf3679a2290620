use crate::calculus::{cumulative_integral, grid_derivative_real};
use crate::error::{invalid, Error, Result};
use crate::grid::GridSpec;
use crate::params::PhysicalParams;

/// Fast-forward phase `f(x, t)` at one time together with its derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    pub grid: GridSpec,
    pub t: f64,
    pub f: Vec<f64>,
    pub f_x: Vec<f64>,
    /// `None` when the time derivative was not requested.
    pub f_t: Option<Vec<f64>>,
}

impl PhaseField {
    /// `f = 0`, the choice used by both closed-form examples.
    pub fn zero(grid: &GridSpec, t: f64) -> Self {
        let z = vec![0.0; grid.n_points];
        Self {
            grid: *grid,
            t,
            f: z.clone(),
            f_x: z.clone(),
            f_t: Some(z),
        }
    }

    pub fn is_zero(&self) -> bool {
        let zero = |v: &[f64]| v.iter().all(|&a| a == 0.0);
        zero(&self.f) && zero(&self.f_x) && self.f_t.as_deref().is_none_or(zero)
    }

    pub fn f_t(&self) -> Result<&[f64]> {
        self.f_t
            .as_deref()
            .ok_or_else(|| invalid("phase field has no time derivative"))
    }
}

/// Relative amplitude below which the phase equation is treated as singular.
pub const NODE_TOLERANCE: f64 = 1e-12;

fn check_nodeless(beta: &[f64], grid: &GridSpec) -> Result<()> {
    let peak = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    for (j, &b) in beta.iter().enumerate() {
        if !(b > NODE_TOLERANCE * peak) {
            return Err(Error::NodeSingularity { x: grid.x(j), beta: b });
        }
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Solves `hbar beta f_xx + 2 hbar beta_x f_x + 2 m beta_t = 0` for the
/// fast-forward phase at one time.
///
/// The first integral is `beta^2 f_x = Q + C` with
/// `Q(x) = -(2m/hbar) int_{x_min}^x beta beta_t`; `C` is chosen so that
/// `f_x` has zero grid mean (on a periodic grid this makes `f` periodic), and
/// `f(x_min) = 0`. When `beta_tt` is supplied the same construction is
/// differentiated in time to give `f_t`.
pub fn solve_phase_ode(
    beta: &[f64],
    beta_t: &[f64],
    beta_tt: Option<&[f64]>,
    params: &PhysicalParams,
    grid: &GridSpec,
    t: f64,
) -> Result<PhaseField> {
    let n = grid.n_points;
    if beta.len() != n || beta_t.len() != n || beta_tt.is_some_and(|b| b.len() != n) {
        return Err(invalid("amplitude arrays must match the grid"));
    }
    if params.mass <= 0.0 {
        return Err(invalid("the phase equation needs m > 0"));
    }
    check_nodeless(beta, grid)?;
    let k = -2.0 * params.mass / params.hbar;
    let inv_b2: Vec<f64> = beta.iter().map(|b| 1.0 / (b * b)).collect();
    let mean_inv = mean(&inv_b2);

    let source: Vec<f64> = beta.iter().zip(beta_t).map(|(b, bt)| k * b * bt).collect();
    let q = cumulative_integral(&source, grid)?;
    let qb: Vec<f64> = q.iter().zip(&inv_b2).map(|(a, w)| a * w).collect();
    let c = -mean(&qb) / mean_inv;
    let qc: Vec<f64> = q.iter().map(|a| a + c).collect();
    let f_x: Vec<f64> = qc.iter().zip(&inv_b2).map(|(a, w)| a * w).collect();
    let f = cumulative_integral(&f_x, grid)?;

    let f_t = match beta_tt {
        None => None,
        Some(btt) => {
            let src_t: Vec<f64> = (0..n)
                .map(|j| k * (beta_t[j] * beta_t[j] + beta[j] * btt[j]))
                .collect();
            let q_t = cumulative_integral(&src_t, grid)?;
            let partial: Vec<f64> = (0..n)
                .map(|j| q_t[j] * inv_b2[j] - 2.0 * beta_t[j] * qc[j] * inv_b2[j] / beta[j])
                .collect();
            let c_t = -mean(&partial) / mean_inv;
            let g: Vec<f64> = (0..n).map(|j| partial[j] + c_t * inv_b2[j]).collect();
            Some(cumulative_integral(&g, grid)?)
        }
    };
    Ok(PhaseField {
        grid: *grid,
        t,
        f,
        f_x,
        f_t,
    })
}

/// Max-norm residual of the phase equation, with `f_xx` and `beta_x` taken
/// by grid differentiation of the stored fields.
pub fn phase_ode_residual(
    phase: &PhaseField,
    beta: &[f64],
    beta_t: &[f64],
    params: &PhysicalParams,
) -> Result<f64> {
    let grid = &phase.grid;
    let f_xx = grid_derivative_real(&phase.f_x, grid, 1)?;
    let beta_x = grid_derivative_real(beta, grid, 1)?;
    let h = params.hbar;
    Ok((0..grid.n_points)
        .map(|j| {
            (h * beta[j] * f_xx[j] + 2.0 * h * beta_x[j] * phase.f_x[j] + 2.0 * params.mass * beta_t[j]).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::periodic(-10.0, 10.0, 256).unwrap()
    }

    /// Wrapped Gaussian `beta^2 ~ exp(a cos(2 pi (x - x0)/L))` translating at
    /// speed `v`, and its first two time derivatives.
    fn travelling(g: &GridSpec, x0: f64, v: f64, acc: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let a = 2.0;
        let w = 2.0 * PI / g.length();
        let mut beta = Vec::new();
        let mut bt = Vec::new();
        let mut btt = Vec::new();
        for x in g.points() {
            let ph = w * (x - x0);
            let b = (0.5 * a * ph.cos()).exp();
            // d/dx0 and d^2/dx0^2 of beta.
            let d1 = b * 0.5 * a * w * ph.sin();
            let d2 = b * ((0.5 * a * w * ph.sin()).powi(2) - 0.5 * a * w * w * ph.cos());
            beta.push(b);
            bt.push(d1 * v);
            btt.push(d2 * v * v + d1 * acc);
        }
        (beta, bt, btt)
    }

    #[test]
    fn uniform_amplitude_gives_zero_phase() {
        let g = grid();
        let p = PhysicalParams::default();
        let f = solve_phase_ode(&vec![0.3; 256], &vec![0.0; 256], Some(&vec![0.0; 256]), &p, &g, 0.0).unwrap();
        assert!(f.f.iter().chain(&f.f_x).chain(f.f_t.as_ref().unwrap()).all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn static_gaussian_gives_zero_phase() {
        let g = grid();
        let p = PhysicalParams::default();
        let (beta, _, _) = travelling(&g, 0.0, 0.0, 0.0);
        let f = solve_phase_ode(&beta, &vec![0.0; 256], None, &p, &g, 0.0).unwrap();
        assert!(f.f.iter().chain(&f.f_x).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn translating_gaussian_satisfies_equation() {
        let g = grid();
        let p = PhysicalParams::default();
        let v = 0.7;
        let (beta, bt, _) = travelling(&g, 1.3, v, 0.0);
        let f = solve_phase_ode(&beta, &bt, None, &p, &g, 0.0).unwrap();
        let r = phase_ode_residual(&f, &beta, &bt, &p).unwrap();
        assert!(r <= 1e-8, "residual {r}");
        assert!(f.f[0].abs() < 1e-15);
        // Analytic first integral: f_x = m v / hbar + const / beta^2.
        let inv: Vec<f64> = beta.iter().map(|b| 1.0 / (b * b)).collect();
        let c = -v * inv.len() as f64 / inv.iter().sum::<f64>();
        for j in 0..g.n_points {
            assert!((f.f_x[j] - (v + c * inv[j])).abs() < 1e-10);
        }
    }

    #[test]
    fn time_derivative_matches_difference_quotient() {
        let g = grid();
        let p = PhysicalParams::default();
        let (v, acc, dt) = (0.4, 0.3, 1e-5);
        // x0(t) = x0 + v t + acc t^2 / 2 around t = 0.
        let at = |t: f64| {
            let (b, bt, _) = travelling(&g, 0.5 + v * t + 0.5 * acc * t * t, v + acc * t, acc);
            solve_phase_ode(&b, &bt, None, &p, &g, t).unwrap()
        };
        let (b, bt, btt) = travelling(&g, 0.5, v, acc);
        let f0 = solve_phase_ode(&b, &bt, Some(&btt), &p, &g, 0.0).unwrap();
        let (fp, fm) = (at(dt), at(-dt));
        for j in 0..g.n_points {
            let fd = (fp.f[j] - fm.f[j]) / (2.0 * dt);
            assert!((f0.f_t.as_ref().unwrap()[j] - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn nodes_are_rejected() {
        let g = grid();
        let p = PhysicalParams::default();
        let mut beta = vec![1.0; 256];
        beta[17] = 0.0;
        let r = solve_phase_ode(&beta, &vec![0.0; 256], None, &p, &g, 0.0);
        assert!(matches!(r, Err(Error::NodeSingularity { .. })));
    }

    #[test]
    fn bounded_grid_residual() {
        let g = GridSpec::bounded(-6.0, 6.0, 600).unwrap();
        let p = PhysicalParams::default();
        // Gaussian breathing in width: beta = (s)^(-1/2) exp(-x^2 / 4 s^2).
        let (s, sd) = (1.2, 0.3);
        let beta: Vec<f64> = g.points().iter().map(|x| (-x * x / (4.0 * s * s)).exp() / s.sqrt()).collect();
        let bt: Vec<f64> = g
            .points()
            .iter()
            .zip(&beta)
            .map(|(x, b)| b * sd * (x * x / (2.0 * s * s * s) - 0.5 / s))
            .collect();
        let f = solve_phase_ode(&beta, &bt, None, &p, &g, 0.0).unwrap();
        let r = phase_ode_residual(&f, &beta, &bt, &p).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }
}
