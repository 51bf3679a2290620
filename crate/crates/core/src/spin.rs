//! 2x2 spin algebra and the two Dirac representations.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::potential::PotentialMatrix;

pub type C64 = Complex64;

/// Hermitian matrix `a0 I + x sx + y sy + z sz` with real coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hermitian2 {
    pub a0: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Hermitian2 {
    pub fn new(a0: f64, x: f64, y: f64, z: f64) -> Self {
        Self { a0, x, y, z }
    }

    pub fn scaled(self, s: f64) -> Self {
        Self::new(s * self.a0, s * self.x, s * self.y, s * self.z)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.a0 + o.a0, self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Eigenvalues `a0 -/+ |v|`, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let r = self.radius();
        (self.a0 - r, self.a0 + r)
    }

    pub fn to_mat(&self) -> Mat2 {
        Mat2([
            [C64::new(self.a0 + self.z, 0.0), C64::new(self.x, -self.y)],
            [C64::new(self.x, self.y), C64::new(self.a0 - self.z, 0.0)],
        ])
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        self.to_mat().apply(v)
    }

    /// `exp(-i theta M)` in closed form.
    pub fn exp_i(&self, theta: f64) -> Mat2 {
        let r = self.radius();
        let phase = C64::from_polar(1.0, -theta * self.a0);
        let (c, s) = ((theta * r).cos(), (theta * r).sin());
        // sin(theta r)/r, finite as r -> 0.
        let sr = if r > 1e-300 { s / r } else { theta };
        let m = Mat2([
            [C64::new(c, -sr * self.z), C64::new(-sr * self.y, -sr * self.x)],
            [C64::new(sr * self.y, -sr * self.x), C64::new(c, sr * self.z)],
        ]);
        m.scale(phase)
    }

    /// Unit eigenvector of the eigenvalue `a0 + sign |v|`, using whichever of
    /// the two standard closed forms is better conditioned.
    pub fn eigenvector(&self, sign: f64) -> [C64; 2] {
        let r = self.radius();
        let (vx, vy, vz) = (self.x, self.y, self.z);
        let lam = sign * r;
        let cand_a = [C64::new(lam + vz, 0.0), C64::new(vx, vy)];
        let cand_b = [C64::new(vx, -vy), C64::new(lam - vz, 0.0)];
        let na = cand_a[0].norm_sqr() + cand_a[1].norm_sqr();
        let nb = cand_b[0].norm_sqr() + cand_b[1].norm_sqr();
        let (v, n) = if na >= nb { (cand_a, na) } else { (cand_b, nb) };
        if n == 0.0 {
            // Degenerate: any vector works.
            return if sign > 0.0 {
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
            } else {
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
            };
        }
        let n = n.sqrt();
        [v[0] / n, v[1] / n]
    }
}

/// General complex 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Mat2([[o, z], [z, o]])
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut r = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        d
    }

    /// Pauli decomposition of a hermitian matrix (the anti-hermitian part is
    /// discarded).
    pub fn hermitian_part(&self) -> Hermitian2 {
        let m = &self.0;
        Hermitian2 {
            a0: 0.5 * (m[0][0].re + m[1][1].re),
            x: 0.5 * (m[0][1].re + m[1][0].re),
            y: 0.5 * (m[1][0].im - m[0][1].im),
            z: 0.5 * (m[0][0].re - m[1][1].re),
        }
    }
}

/// Pauli axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn hermitian(self, coefficient: f64) -> Hermitian2 {
        match self {
            Axis::X => Hermitian2::new(0.0, coefficient, 0.0, 0.0),
            Axis::Y => Hermitian2::new(0.0, 0.0, coefficient, 0.0),
            Axis::Z => Hermitian2::new(0.0, 0.0, 0.0, coefficient),
        }
    }
}

/// Which Pauli matrix carries the kinetic term and which the mass term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// `(c p + A) sx + m c^2 sz`.
    KineticX,
    /// `(c p + A) sz + m c^2 sx`.
    KineticZ,
}

impl Representation {
    pub fn kinetic_axis(self) -> Axis {
        match self {
            Representation::KineticX => Axis::X,
            Representation::KineticZ => Axis::Z,
        }
    }

    pub fn mass_axis(self) -> Axis {
        match self {
            Representation::KineticX => Axis::Z,
            Representation::KineticZ => Axis::X,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Representation::KineticX => Representation::KineticZ,
            Representation::KineticZ => Representation::KineticX,
        }
    }

    /// Local Dirac matrix `k s_kin + M s_mass + (v_t, v_e, v_p, v_s)` where the
    /// vector and scalar parts couple like the kinetic and mass terms.
    pub fn local_matrix(self, kinetic: f64, mass: f64, v: &PotentialMatrix) -> Hermitian2 {
        let mut h = self
            .kinetic_axis()
            .hermitian(kinetic + v.v_e)
            .add(self.mass_axis().hermitian(mass + v.v_s));
        h.y += v.v_p;
        h.a0 += v.v_t;
        h
    }
}

/// `U = (sx + sz)/sqrt(2)`: hermitian, unitary and involutive. Conjugation
/// swaps `sx` and `sz` and flips `sy`, so it maps one representation onto
/// the other.
pub fn rotation() -> Mat2 {
    let a = C64::new(FRAC_1_SQRT_2, 0.0);
    Mat2([[a, a], [a, -a]])
}

pub fn rotate_spinor(v: [C64; 2]) -> [C64; 2] {
    let a = FRAC_1_SQRT_2;
    [(v[0] + v[1]) * a, (v[0] - v[1]) * a]
}

pub fn rotate_hermitian(h: &Hermitian2) -> Hermitian2 {
    Hermitian2::new(h.a0, h.z, -h.y, h.x)
}

/// Energy branch of a Dirac eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Branch::Positive => Branch::Negative,
            Branch::Negative => Branch::Positive,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn herm() -> impl Strategy<Value = Hermitian2> {
        (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0)
            .prop_map(|(a, x, y, z)| Hermitian2::new(a, x, y, z))
    }

    #[test]
    fn rotation_is_unitary_and_involutive() {
        let u = rotation();
        assert!(u.mul(&u).max_abs_diff(&Mat2::identity()) < 1e-15);
        assert!(u.adjoint().mul(&u).max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn local_matrix_roles() {
        let v = PotentialMatrix::new(1.0, 2.0, 3.0, 4.0);
        let hx = Representation::KineticX.local_matrix(0.5, 1.0, &v);
        assert_eq!(hx, Hermitian2::new(1.0, 2.5, 3.0, 5.0));
        let hz = Representation::KineticZ.local_matrix(0.5, 1.0, &v);
        assert_eq!(hz, Hermitian2::new(1.0, 5.0, 3.0, 2.5));
        // Rotating the kinetic-x matrix gives the kinetic-z one with v_p flipped.
        assert_eq!(
            rotate_hermitian(&hx),
            Representation::KineticZ.local_matrix(0.5, 1.0, &v.rotated())
        );
    }

    proptest! {
        #[test]
        fn conjugation_matches_coefficient_map(h in herm()) {
            let u = rotation();
            let conj = u.mul(&h.to_mat()).mul(&u.adjoint());
            prop_assert!(conj.max_abs_diff(&rotate_hermitian(&h).to_mat()) < 1e-14);
            let twice = u.mul(&conj).mul(&u.adjoint());
            prop_assert!(twice.max_abs_diff(&h.to_mat()) < 1e-14);
        }

        #[test]
        fn exponential_is_unitary_and_correct(h in herm(), theta in -2.0f64..2.0) {
            let e = h.exp_i(theta);
            prop_assert!(e.adjoint().mul(&e).max_abs_diff(&Mat2::identity()) < 1e-13);
            // Compare against the spectral form.
            let (lo, hi) = h.eigenvalues();
            for (lam, sign) in [(lo, -1.0), (hi, 1.0)] {
                let v = h.eigenvector(sign);
                let ev = e.apply(v);
                let expect = C64::from_polar(1.0, -theta * lam);
                prop_assert!((ev[0] - v[0] * expect).norm() < 1e-12);
                prop_assert!((ev[1] - v[1] * expect).norm() < 1e-12);
            }
        }

        #[test]
        fn eigenvectors_satisfy_eigen_equation(h in herm()) {
            prop_assume!(h.radius() > 1e-6);
            let (lo, hi) = h.eigenvalues();
            for (lam, sign) in [(lo, -1.0), (hi, 1.0)] {
                let v = h.eigenvector(sign);
                let hv = h.apply(v);
                prop_assert!((hv[0] - v[0] * lam).norm() < 1e-12);
                prop_assert!((hv[1] - v[1] * lam).norm() < 1e-12);
            }
        }
    }
}
