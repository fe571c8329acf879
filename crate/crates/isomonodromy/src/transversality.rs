//! Transversality of the isomonodromy foliation with the genus-2 locus:
//! the closed-form determinant det(V_i . F_j) on Sigma^Darb, its direct
//! numerical counterpart from the Garnier vector fields, the reducibility
//! residual cutting out Sigma^red, and the tangent-cone conic whose
//! smoothness characterizes the irreducible locus.
//!
//! The non-transversality locus on Sigma^Darb = {q1 = q2 - 1 = p3 = 0} is
//! the vanishing of
//!
//!   det = -(t1 t2 t3 (q3-1)^2 p1 + (t1-1)(t2-1)(t3-1) q3^2 p2)
//!         / (8 (t1-t2)(t2-t3)(t1-t3) q3^2 (q3-1)^2),
//!
//! and transporting it to Sigma identifies it with the reducible locus
//! {Q0 z + Q1 (z-1) + Qinf = 0}. The overall sign belongs to the signed
//! logarithmic term of the Hamiltonians: the symmetric F'/(2F) variant
//! produces the same expression with the opposite sign and the same zero
//! locus. Vanishing tests are relative: a value counts as zero below 1e-8
//! times the largest monomial magnitude entering the expression.

use crate::darboux::{q_quantities, DarbouxPoint};
use crate::error::{Error, Result};
use crate::fuchsian::PoleConfig;
use crate::garnier::garnier_vector_field;
use crate::numkit::{c64, C64};

/// Relative vanishing tolerance for polynomial locus tests.
pub const VANISH_REL: f64 = 1e-8;

/// The closed-form transversality determinant on Sigma^Darb.
///
/// Refuses q3 within 1e-12 of {0, 1}, the poles of the printed expression.
pub fn transversality_det_closed(t: &PoleConfig, p1: C64, p2: C64, q3: C64) -> Result<C64> {
    let [t1, t2, t3] = t.t();
    let one = c64(1.0, 0.0);
    let scale = q3.norm().max(1.0);
    if q3.norm() <= 1e-12 * scale || (q3 - one).norm() <= 1e-12 * scale {
        return Err(Error::PoleEvaluation { x: q3 });
    }
    let num = t1 * t2 * t3 * (q3 - one) * (q3 - one) * p1
        + (t1 - one) * (t2 - one) * (t3 - one) * q3 * q3 * p2;
    let den = (t1 - t2) * (t2 - t3) * (t1 - t3) * q3 * q3 * (q3 - one) * (q3 - one) * 8.0;
    Ok(-num / den)
}

/// The same determinant computed directly: rows i of the 3x3 matrix are
/// (V_i . q1, V_i . q2, V_i . p3) = (dH_i/dp1, dH_i/dp2, -dH_i/dq3)
/// evaluated at the Sigma^Darb point (q, p) = (0, 1, q3, p1, p2, 0).
pub fn transversality_det_numeric(t: &PoleConfig, p1: C64, p2: C64, q3: C64) -> Result<C64> {
    let d = DarbouxPoint::new(
        [c64(0.0, 0.0), c64(1.0, 0.0), q3],
        [p1, p2, c64(0.0, 0.0)],
    );
    let mut rows = [[c64(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        let (dq, dp) = garnier_vector_field(t, &d, i)?;
        rows[i] = [dq[0], dq[1], dp[2]];
    }
    Ok(det3(&rows))
}

fn det3(m: &[[C64; 3]; 3]) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// The reducibility residual Q0 z + Q1 (z-1) + Qinf of a Sigma point;
/// the lifted genus-2 system is reducible exactly on its zero locus.
pub fn reducible_residual_sigma(t: &PoleConfig, z: C64, c: [C64; 3]) -> Result<C64> {
    let sum = c[0] + c[1] + c[2];
    let cscale: f64 = c.iter().map(|v| v.norm()).sum();
    let tol = 1e-10 * cscale.max(1.0);
    if sum.norm() > tol {
        return Err(Error::NotInSigma {
            defect: sum.norm(),
            tol,
        });
    }
    let (q0, q1, qinf) = q_quantities(t, c);
    Ok(q0 * z + q1 * (z - c64(1.0, 0.0)) + qinf)
}

/// A quadratic form in (Z1, Z2, Z3) as a symmetric 3x3 matrix; cross terms
/// of the source polynomial are split evenly across the off-diagonal.
#[derive(Clone, Copy, Debug)]
pub struct ConicForm {
    pub m: [[C64; 3]; 3],
}

impl ConicForm {
    pub fn det(&self) -> C64 {
        det3(&self.m)
    }

    /// Largest entry magnitude, the scale for vanishing tests.
    pub fn scale(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, zv: [C64; 3]) -> C64 {
        let mut s = c64(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                s += zv[i] * self.m[i][j] * zv[j];
            }
        }
        s
    }
}

/// The tangent cone of the strictly-semi-stable hypersurface along the
/// genus-2 locus, at the Sigma point determined by (t, z1, c1, c2) (with
/// c3 = -c1 - c2 implicit), in the coordinates Z1 = c1 + c2 + c3,
/// Z2 = z2 - z1, Z3 = z3 - z1. Returns the form and whether it is smooth
/// (nonvanishing determinant at the relative tolerance); smoothness is
/// equivalent to irreducibility of the lifted system.
///
/// The coefficients are pinned by three structural facts. Relabeling the
/// indices 2 <-> 3 (in t, z, c simultaneously) swaps Z2 with Z3 and must
/// send the form to minus itself, as it visibly does for the Z1Z2 and Z1Z3
/// coefficients. The unipotent directions (1, 0, 0) and (0, c1 + c2, c2)
/// must lie on the cone, which kills the Z1^2 term and ties the Z2Z3
/// coefficient to the two diagonal ones. Together these force the Z3^2
/// coefficient (2 t3 - 1)(t1 - t2)(c1 + c2), and with it the determinant
/// factors exactly as
///
///   det = (t1 - t2)(t1 - t3)(t2 - t3) / 4 * (Q0 z1 + Q1 (z1 - 1) + Qinf),
///
/// so cone smoothness coincides with irreducibility of the lift.
pub fn tangent_cone_conic(t: &PoleConfig, z1: C64, c1: C64, c2: C64) -> (ConicForm, bool) {
    let [t1, t2, t3] = t.t();
    let one = c64(1.0, 0.0);
    let z12 = (t2 * z1 * 2.0 - t2 - z1) * (t1 - t3);
    let z13 = -(t3 * z1 * 2.0 - t3 - z1) * (t1 - t2);
    let z23 = -c1 * (t2 * 2.0 - one) * (t1 - t3)
        - c2 * (t1 * t2 * 2.0 + t3 * t1 * 2.0 - t3 * t2 * 4.0 - t1 * 2.0 + t2 + t3);
    let z22 = c2 * (t2 * 2.0 - one) * (t1 - t3);
    let z33 = (t3 * 2.0 - one) * (t1 - t2) * (c1 + c2);
    let zero = c64(0.0, 0.0);
    let form = ConicForm {
        m: [
            [zero, z12 * 0.5, z13 * 0.5],
            [z12 * 0.5, z22, z23 * 0.5],
            [z13 * 0.5, z23 * 0.5, z33],
        ],
    };
    let scale = form.scale();
    let smooth = form.det().norm() > VANISH_REL * scale * scale * scale;
    (form, smooth)
}
