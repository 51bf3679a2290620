use super::{DiracEigenpair, DiracFamily, FamilyPoint, ScalarPhase, GAP_TOLERANCE};
use crate::error::{Error, Result};
use crate::field::{FieldKind, Gauge};
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::spin::{Branch, Hermitian2, Representation};

/// Eigenstates obtained by diagonalizing the local 2x2 Dirac matrix at each
/// point after the scalar phase has been factored out. Works in either
/// representation and gauge, and for `m = 0` away from the gap closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericFamily {
    kind: FieldKind,
    params: PhysicalParams,
    branch: Branch,
    representation: Representation,
    gauge: Gauge,
}

impl NumericFamily {
    pub fn new(
        kind: FieldKind,
        params: PhysicalParams,
        branch: Branch,
        representation: Representation,
    ) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            kind,
            params,
            branch,
            representation,
            gauge: kind.natural_gauge(),
        })
    }

    pub fn in_gauge(self, gauge: Gauge) -> Self {
        Self { gauge, ..self }
    }

    fn local(&self, x: f64, alpha: f64) -> Result<Hermitian2> {
        let k = self.phase().kinetic(x, alpha);
        let mass = self.params.rest_energy();
        let h = self.representation.local_matrix(k, mass, &Default::default());
        let gap = 2.0 * h.radius();
        let threshold = GAP_TOLERANCE * mass;
        if gap <= threshold {
            return Err(Error::DegenerateEigenpair { gap, threshold });
        }
        Ok(h)
    }
}

/// Real unit eigenvector with the first component made non-negative (the
/// second one when the first vanishes).
fn anchored(h: &Hermitian2, sign: f64) -> [f64; 2] {
    let v = h.eigenvector(sign);
    // The local matrix has no sy part, so the eigenvector is real up to a
    // global phase carried by whichever component is larger.
    let pivot = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
    let unphase = pivot.conj() / pivot.norm();
    let mut u = [(v[0] * unphase).re, (v[1] * unphase).re];
    let lead = if u[0].abs() > 1e-300 { u[0] } else { u[1] };
    if lead < 0.0 {
        u = [-u[0], -u[1]];
    }
    u
}

impl DiracFamily for NumericFamily {
    fn kind(&self) -> FieldKind {
        self.kind
    }

    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn representation(&self) -> Representation {
        self.representation
    }

    fn gauge(&self) -> Gauge {
        self.gauge
    }

    fn branch(&self) -> Branch {
        self.branch
    }

    fn energy(&self, alpha: f64) -> Result<f64> {
        let h = self.local(0.0, alpha)?;
        let (lo, hi) = h.eigenvalues();
        Ok(match self.branch {
            Branch::Positive => hi,
            Branch::Negative => lo,
        })
    }

    fn point(&self, x: f64, alpha: f64) -> Result<FamilyPoint> {
        let h = self.local(x, alpha)?;
        let sign = self.branch.sign();
        let u = anchored(&h, sign);
        let w = anchored(&h, -sign);
        // First-order perturbation theory: du = <w|dh|u>/(e_u - e_w) w, with
        // dh = (dk/d alpha) s_kin. Real vectors keep the anchor smooth.
        let dk = self.kind.kinetic_slope();
        let kin = self.representation.kinetic_axis().hermitian(dk);
        let kin_u = kin.to_mat().apply([u[0].into(), u[1].into()]);
        let coupling = w[0] * kin_u[0].re + w[1] * kin_u[1].re;
        let gap = sign * 2.0 * h.radius();
        let c = coupling / gap;
        let ph = ScalarPhase::new(self.kind, self.gauge, self.params);
        Ok(FamilyPoint {
            u,
            du: [c * w[0], c * w[1]],
            theta: ph.value(x, alpha),
            dtheta_dalpha: ph.d_alpha(x),
        })
    }
}

/// Eigenspinor by direct diagonalization in the requested representation,
/// written in the field's natural gauge.
pub fn dirac_eigenspinor_numeric(
    kind: FieldKind,
    params: PhysicalParams,
    alpha: f64,
    grid: &GridSpec,
    branch: Branch,
    representation: Representation,
) -> Result<DiracEigenpair> {
    grid.check_lattice_wavenumber(params.kappa)?;
    NumericFamily::new(kind, params, branch, representation)?.eigenpair(grid, alpha)
}
