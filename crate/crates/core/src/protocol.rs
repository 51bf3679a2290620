//! Drive schedules `alpha(t)` with their analytic time derivatives.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

/// Tolerance used to decide whether a protocol starts/ends at rest.
pub const FLATNESS_TOLERANCE: f64 = 1e-10;

/// A control schedule on `[0, duration]`.
pub trait Protocol: Send + Sync + fmt::Debug {
    fn duration(&self) -> f64;
    fn alpha(&self, t: f64) -> f64;
    fn alpha_dot(&self, t: f64) -> f64;
}

/// Shared, immutable handle to a protocol plus its verified boundary flags.
#[derive(Clone)]
pub struct DriveProtocol {
    inner: Arc<dyn Protocol>,
    pub flat_start: bool,
    pub flat_end: bool,
}

impl fmt::Debug for DriveProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriveProtocol")
            .field("inner", &self.inner)
            .field("flat_start", &self.flat_start)
            .field("flat_end", &self.flat_end)
            .finish()
    }
}

impl DriveProtocol {
    pub fn new(protocol: impl Protocol + 'static) -> Result<Self> {
        Self::from_arc(Arc::new(protocol))
    }

    pub fn from_arc(inner: Arc<dyn Protocol>) -> Result<Self> {
        let tau = inner.duration();
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid(format!("protocol duration must be > 0, got {tau}")));
        }
        let flat_start = inner.alpha_dot(0.0).abs() <= FLATNESS_TOLERANCE;
        let flat_end = inner.alpha_dot(tau).abs() <= FLATNESS_TOLERANCE;
        Ok(Self {
            inner,
            flat_start,
            flat_end,
        })
    }

    /// `alpha(t) = sin^2(pi t / 2 tau) + 1`.
    pub fn sinusoidal(tau: f64) -> Result<Self> {
        Self::new(Sinusoidal::new(tau)?)
    }

    pub fn linear_ramp(tau: f64, from: f64, to: f64) -> Result<Self> {
        Self::new(LinearRamp::new(tau, from, to)?)
    }

    pub fn table(times: Vec<f64>, alpha: Vec<f64>, alpha_dot: Option<Vec<f64>>) -> Result<Self> {
        Self::new(TableProtocol::new(times, alpha, alpha_dot)?)
    }

    /// Protocol built from a user-supplied pair of functions. The pair is
    /// checked for consistency before it is accepted.
    pub fn from_fns<A, D>(tau: f64, alpha: A, alpha_dot: D) -> Result<Self>
    where
        A: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let p = Self::new(FnProtocol {
            tau,
            alpha: Box::new(alpha),
            alpha_dot: Box::new(alpha_dot),
        })?;
        p.check_derivative_consistency(100)?;
        Ok(p)
    }

    pub fn duration(&self) -> f64 {
        self.inner.duration()
    }

    pub fn alpha(&self, t: f64) -> f64 {
        self.inner.alpha(t)
    }

    pub fn alpha_dot(&self, t: f64) -> f64 {
        self.inner.alpha_dot(t)
    }

    /// A shortcut is only guaranteed when the drive is at rest at both ends.
    pub fn is_flat(&self) -> bool {
        self.flat_start && self.flat_end
    }

    /// Compares `alpha_dot` against a centred finite difference of `alpha` at
    /// `samples` deterministic interior times.
    pub fn check_derivative_consistency(&self, samples: usize) -> Result<()> {
        let tau = self.duration();
        let h = 1e-4 * tau;
        // Golden-ratio sequence: well spread and reproducible.
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        for i in 0..samples {
            let u = ((i as f64 + 0.5) * golden).fract();
            let t = h + u * (tau - 2.0 * h);
            let fd = (self.alpha(t + h) - self.alpha(t - h)) / (2.0 * h);
            let exact = self.alpha_dot(t);
            if (exact - fd).abs() > 1e-6 * exact.abs().max(1.0) {
                return Err(invalid(format!(
                    "alpha_dot is inconsistent with alpha at t = {t}: analytic {exact}, finite difference {fd}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Sinusoidal {
    tau: f64,
}

impl Sinusoidal {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid(format!("protocol duration must be > 0, got {tau}")));
        }
        Ok(Self { tau })
    }
}

impl Protocol for Sinusoidal {
    fn duration(&self) -> f64 {
        self.tau
    }

    fn alpha(&self, t: f64) -> f64 {
        let s = (PI * t / (2.0 * self.tau)).sin();
        s * s + 1.0
    }

    fn alpha_dot(&self, t: f64) -> f64 {
        PI / (2.0 * self.tau) * (PI * t / self.tau).sin()
    }
}

/// Constant-rate ramp. Not flat at either end.
#[derive(Debug, Clone, Copy)]
pub struct LinearRamp {
    tau: f64,
    from: f64,
    to: f64,
}

impl LinearRamp {
    pub fn new(tau: f64, from: f64, to: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid(format!("protocol duration must be > 0, got {tau}")));
        }
        if !(from.is_finite() && to.is_finite()) {
            return Err(invalid("ramp end points must be finite"));
        }
        Ok(Self { tau, from, to })
    }
}

impl Protocol for LinearRamp {
    fn duration(&self) -> f64 {
        self.tau
    }

    fn alpha(&self, t: f64) -> f64 {
        self.from + (self.to - self.from) * t / self.tau
    }

    fn alpha_dot(&self, _t: f64) -> f64 {
        (self.to - self.from) / self.tau
    }
}

/// Piecewise cubic Hermite interpolation of tabulated `(t, alpha, alpha_dot)`.
/// Missing slopes are estimated by finite differences of the table. The first
/// time must be 0; the last one is the duration.
#[derive(Debug, Clone)]
pub struct TableProtocol {
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl TableProtocol {
    pub fn new(times: Vec<f64>, values: Vec<f64>, slopes: Option<Vec<f64>>) -> Result<Self> {
        let n = times.len();
        if n < 2 {
            return Err(invalid("protocol table needs at least 2 rows"));
        }
        if values.len() != n || slopes.as_ref().is_some_and(|s| s.len() != n) {
            return Err(invalid("protocol table columns have different lengths"));
        }
        if times[0] != 0.0 {
            return Err(invalid(format!("protocol table must start at t = 0, got {}", times[0])));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("protocol table times must be strictly increasing"));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(invalid("protocol table contains non-finite entries"));
        }
        let slopes = match slopes {
            Some(s) => s,
            None => (0..n)
                .map(|i| {
                    let (a, b) = match i {
                        0 => (0, 1),
                        i if i == n - 1 => (n - 2, n - 1),
                        i => (i - 1, i + 1),
                    };
                    (values[b] - values[a]) / (times[b] - times[a])
                })
                .collect(),
        };
        Ok(Self {
            times,
            values,
            slopes,
        })
    }

    fn segment(&self, t: f64) -> (usize, f64, f64) {
        let last = self.times.len() - 2;
        let i = match self.times.partition_point(|&ti| ti <= t) {
            0 => 0,
            k => (k - 1).min(last),
        };
        let h = self.times[i + 1] - self.times[i];
        (i, h, (t - self.times[i]) / h)
    }
}

impl Protocol for TableProtocol {
    fn duration(&self) -> f64 {
        *self.times.last().unwrap()
    }

    fn alpha(&self, t: f64) -> f64 {
        let (i, h, s) = self.segment(t);
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.values[i]
            + h10 * h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.slopes[i + 1]
    }

    fn alpha_dot(&self, t: f64) -> f64 {
        let (i, h, s) = self.segment(t);
        let s2 = s * s;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        (d00 * self.values[i] + d01 * self.values[i + 1]) / h
            + d10 * self.slopes[i]
            + d11 * self.slopes[i + 1]
    }
}

type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

struct FnProtocol {
    tau: f64,
    alpha: ScalarFn,
    alpha_dot: ScalarFn,
}

impl fmt::Debug for FnProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnProtocol").field("tau", &self.tau).finish_non_exhaustive()
    }
}

impl Protocol for FnProtocol {
    fn duration(&self) -> f64 {
        self.tau
    }

    fn alpha(&self, t: f64) -> f64 {
        (self.alpha)(t)
    }

    fn alpha_dot(&self, t: f64) -> f64 {
        (self.alpha_dot)(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn sinusoidal_values() {
        let p = DriveProtocol::sinusoidal(1.0).unwrap();
        assert_abs_diff_eq!(p.alpha(0.0), 1.0);
        assert_abs_diff_eq!(p.alpha_dot(0.0), 0.0);
        assert_abs_diff_eq!(p.alpha(1.0), 2.0, epsilon = 1e-15);
        assert!(p.alpha_dot(1.0).abs() < 1e-15);
        assert_abs_diff_eq!(p.alpha(0.5), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.alpha_dot(0.5), PI / 2.0, epsilon = 1e-15);
        assert!(p.flat_start && p.flat_end);
    }

    #[test]
    fn rejects_bad_duration() {
        assert!(DriveProtocol::sinusoidal(0.0).is_err());
        assert!(DriveProtocol::sinusoidal(-1.0).is_err());
        assert!(DriveProtocol::sinusoidal(f64::NAN).is_err());
    }

    #[test]
    fn ramp_is_not_flat() {
        let p = DriveProtocol::linear_ramp(2.0, 1.0, 2.0).unwrap();
        assert!(!p.flat_start && !p.flat_end);
        p.check_derivative_consistency(100).unwrap();
    }

    #[test]
    fn table_reproduces_sinusoid() {
        let s = Sinusoidal::new(1.0).unwrap();
        let times: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let a = times.iter().map(|&t| s.alpha(t)).collect();
        let d = times.iter().map(|&t| s.alpha_dot(t)).collect();
        let p = DriveProtocol::table(times, a, Some(d)).unwrap();
        assert!(p.is_flat());
        p.check_derivative_consistency(100).unwrap();
        for t in [0.0, 0.123, 0.5, 0.77, 1.0] {
            assert_abs_diff_eq!(p.alpha(t), s.alpha(t), epsilon = 1e-8);
        }
    }

    #[test]
    fn inconsistent_pair_is_rejected() {
        let r = DriveProtocol::from_fns(1.0, |t| t * t, |t| t);
        assert!(r.is_err());
        let ok = DriveProtocol::from_fns(1.0, |t| t * t, |t| 2.0 * t);
        assert!(ok.is_ok());
    }

    proptest! {
        #[test]
        fn sinusoidal_derivative_matches_difference(tau in 0.05f64..20.0, u in 0.001f64..0.999) {
            let p = DriveProtocol::sinusoidal(tau).unwrap();
            let t = u * tau;
            let h = 1e-5 * tau;
            let fd = (p.alpha(t + h) - p.alpha(t - h)) / (2.0 * h);
            let exact = p.alpha_dot(t);
            prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0));
        }
    }
}
