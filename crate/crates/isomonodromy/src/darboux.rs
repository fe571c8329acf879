//! The degree-6 coordinate change between Darboux coordinates (q, p) and
//! moduli coordinates (z, c), its inverse, and the restriction maps between
//! the genus-2 locus Sigma and its Darboux-side model Sigma^Darb.
//!
//! The change of variables is a birational 6:1 cover whose Galois group
//! permutes the pairs (q_k, p_k); the forward map is therefore symmetric in
//! those pairs while the inverse needs a deterministic branch, fixed here by
//! sorting the q's lexicographically by (real, imaginary).
//!
//! All maps are rational. They refuse inputs within `1e-9 * scale` of their
//! polar loci, where double precision retains no significance; the accuracy
//! contracts (round trips to 1e-9, symplectic defect below 1e-6) are
//! guaranteed inside the wider admissibility bands of `1e-6 * scale`.

use crate::error::{Error, Result};
use crate::fuchsian::PoleConfig;
use crate::numkit::{c64, jacobian_fd, C64, ComplexPoly};

/// Hard refusal threshold (relative): closer than this to a polar locus, the
/// rational expressions carry no significant digits.
const DEGENERACY_REL: f64 = 1e-9;

/// Relative distance below which the pole-cancelling alternate p-formulas
/// take over from the naive partial fractions.
const ALTERNATE_REL: f64 = 1e-4;

/// A point (q1, q2, q3, p1, p2, p3) of the Darboux chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DarbouxPoint {
    pub q: [C64; 3],
    pub p: [C64; 3],
}

impl DarbouxPoint {
    pub fn new(q: [C64; 3], p: [C64; 3]) -> Self {
        Self { q, p }
    }

    /// Minimum pairwise distance among the q's.
    pub fn min_q_separation(&self) -> f64 {
        let q = self.q;
        (q[0] - q[1])
            .norm()
            .min((q[1] - q[2]).norm())
            .min((q[0] - q[2]).norm())
    }
}

fn q_scale(t: &PoleConfig, q: &[C64; 3]) -> f64 {
    let mut s: f64 = 1.0;
    for v in q.iter().chain(t.t().iter()) {
        s = s.max(v.norm());
    }
    s
}

/// Lambda with the factor (q_m - t_i) optionally evaluated at a substituted
/// pole set; `ts` lists the three linear factors applied to each q_m.
fn lambda_with_poles(ts: [C64; 3], d: &DarbouxPoint) -> C64 {
    let mut total = c64(0.0, 0.0);
    for m in 0..3 {
        let qm = d.q[m];
        let num = (qm - ts[0]) * (qm - ts[1]) * (qm - ts[2]);
        let mut den = c64(1.0, 0.0);
        for n in 0..3 {
            if n != m {
                den *= qm - d.q[n];
            }
        }
        total += d.p[m] * num / den;
    }
    total
}

/// Same sum with term magnitudes, used to scale the degeneracy test.
fn lambda_magnitude_scale(ts: [C64; 3], d: &DarbouxPoint) -> f64 {
    let mut total = 0.0;
    for m in 0..3 {
        let qm = d.q[m];
        let num = (qm - ts[0]) * (qm - ts[1]) * (qm - ts[2]);
        let mut den = c64(1.0, 0.0);
        for n in 0..3 {
            if n != m {
                den *= qm - d.q[n];
            }
        }
        total += (d.p[m] * num / den).norm();
    }
    total
}

fn guard_q_collisions(t: &PoleConfig, d: &DarbouxPoint) -> Result<()> {
    let scale = q_scale(t, &d.q);
    if d.min_q_separation() <= DEGENERACY_REL * scale {
        return Err(Error::CriticalLocus(format!(
            "q-collision: min separation {:.3e} at scale {:.3e}",
            d.min_q_separation(),
            scale
        )));
    }
    Ok(())
}

/// The forward map (q, p) -> (z, c).
///
/// c_i = -(q1-t_i)(q2-t_i)(q3-t_i) Lambda / (t_i(t_i-1)(t_i-t_j)(t_i-t_k))
/// and z_i = t_i Lambda_i / Lambda, where Lambda sums
/// p_m (q_m-t_1)(q_m-t_2)(q_m-t_3) / prod_{n != m}(q_m - q_n) and Lambda_i
/// substitutes t_i = 1 in that expression. Symmetric under permutations of
/// the pairs (q_k, p_k).
pub fn psi(t: &PoleConfig, d: &DarbouxPoint) -> Result<([C64; 3], [C64; 3])> {
    guard_q_collisions(t, d)?;
    let ts = t.t();
    let lambda = lambda_with_poles(ts, d);
    let lscale = lambda_magnitude_scale(ts, d);
    if lambda.norm() <= DEGENERACY_REL * lscale.max(f64::MIN_POSITIVE) {
        return Err(Error::LambdaDegenerate {
            magnitude: lambda.norm(),
        });
    }
    let one = c64(1.0, 0.0);
    let mut z = [c64(0.0, 0.0); 3];
    let mut c = [c64(0.0, 0.0); 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let ti = ts[i];
        let num = (d.q[0] - ti) * (d.q[1] - ti) * (d.q[2] - ti);
        let den = ti * (ti - one) * (ti - ts[j]) * (ti - ts[k]);
        c[i] = -num / den * lambda;
        let mut sub = ts;
        sub[i] = one;
        z[i] = ti * lambda_with_poles(sub, d) / lambda;
    }
    Ok((z, c))
}

/// The inverse map (z, c) -> (q, p).
///
/// The q's are the roots of the cubic numerator of
/// sum_i c_i ((z_i-t_i)x - t_i(z_i-1))/(x-t_i), whose leading coefficient is
/// kappa = sum c_i (z_i - t_i); they are returned sorted lexicographically by
/// (real, imaginary). Each p_k is the partial-fraction sum
/// sum_i c_i z_i (1/(q_k-1) - 1/(q_k-t_i)); whenever q_k comes within
/// `1e-4 * scale` of one of the poles 1, t_i, the summand is replaced by the
/// pole-cancelling alternate obtained from the factorization of the cubic
/// (its values at x = 1 and x = t_i), which is exact on the root set.
pub fn psi_inverse(t: &PoleConfig, z: [C64; 3], c: [C64; 3]) -> Result<DarbouxPoint> {
    let ts = t.t();
    let one = c64(1.0, 0.0);
    let kappa: C64 = (0..3).map(|i| c[i] * (z[i] - ts[i])).sum();
    let kscale: f64 = (0..3).map(|i| (c[i] * (z[i] - ts[i])).norm()).sum();
    if kappa.norm() <= DEGENERACY_REL * kscale.max(f64::MIN_POSITIVE) {
        return Err(Error::CubicDegenerates {
            magnitude: kappa.norm(),
        });
    }

    // Cubic numerator N(x) = sum_i c_i ((z_i-t_i)x - t_i(z_i-1)) prod_{j!=i}(x-t_j).
    let mut cubic = ComplexPoly::zero();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let linear = ComplexPoly::new(vec![-ts[i] * (z[i] - one), z[i] - ts[i]]);
        let others = ComplexPoly::from_roots(&[ts[j], ts[k]]);
        cubic = cubic.add(&linear.mul(&others).scale(c[i]));
    }
    let mut q: Vec<C64> = crate::numkit::poly_roots(&cubic)?;
    q.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let q = [q[0], q[1], q[2]];

    let s1: C64 = (0..3).map(|i| c[i] * z[i]).sum();
    let prod_one_minus_t = (one - ts[0]) * (one - ts[1]) * (one - ts[2]);
    let mut p = [c64(0.0, 0.0); 3];
    for k in 0..3 {
        let qk = q[k];
        let others: Vec<C64> = (0..3).filter(|&m| m != k).map(|m| q[m]).collect();
        let scale = q_scale(t, &q);
        // Term at the pole x = 1.
        let d1 = qk - one;
        let mut pk = if d1.norm() < ALTERNATE_REL * scale {
            -kappa * (one - others[0]) * (one - others[1]) / prod_one_minus_t
        } else {
            s1 / d1
        };
        // Terms at the poles x = t_i.
        for i in 0..3 {
            let (jj, kk) = ((i + 1) % 3, (i + 2) % 3);
            let di = qk - ts[i];
            let term = if di.norm() < ALTERNATE_REL * scale {
                let den = ts[i] * (one - ts[i]) * (ts[i] - ts[jj]) * (ts[i] - ts[kk]);
                -kappa * z[i] * (ts[i] - others[0]) * (ts[i] - others[1]) / den
            } else {
                c[i] * z[i] / di
            };
            pk -= term;
        }
        if !pk.re.is_finite() || !pk.im.is_finite() {
            return Err(Error::IndeterminateP { k: k + 1 });
        }
        p[k] = pk;
    }
    Ok(DarbouxPoint::new(q, p))
}

/// The three reducibility quantities of a Sigma point:
/// Q0 = t2 t3 c1 + t1 t3 c2 + t1 t2 c3, Qinf = t1 c1 + t2 c2 + t3 c3,
/// Q1 = Q0 + Qinf.
pub fn q_quantities(t: &PoleConfig, c: [C64; 3]) -> (C64, C64, C64) {
    let [t1, t2, t3] = t.t();
    let q0 = t2 * t3 * c[0] + t1 * t3 * c[1] + t1 * t2 * c[2];
    let qinf = t1 * c[0] + t2 * c[1] + t3 * c[2];
    (q0, q0 + qinf, qinf)
}

/// The polar-locus quantity of the restricted map on
/// Sigma^Darb = {q1 = q2 - 1 = p3 = 0}:
/// Q^Darb = q3(q3-1) (t1 t2 t3 (q3-1) p1 - (t1-1)(t2-1)(t3-1) q3 p2).
pub fn q_darb(t: &PoleConfig, p1: C64, p2: C64, q3: C64) -> C64 {
    let [t1, t2, t3] = t.t();
    let one = c64(1.0, 0.0);
    let bracket =
        t1 * t2 * t3 * (q3 - one) * p1 - (t1 - one) * (t2 - one) * (t3 - one) * q3 * p2;
    q3 * (q3 - one) * bracket
}

/// Restriction of the forward map to Sigma^Darb, landing in Sigma: from
/// (p1, p2, q3) produce (z, c1, c2, c3) with z1 = z2 = z3 = z. Evaluates the
/// printed parametrization
/// c_i = mu (q3 - t_i) / ((t_i - t_j)(t_i - t_k)) with
/// mu = (t1 t2 t3 (q3-1) p1 - (t1-1)(t2-1)(t3-1) q3 p2) / (q3(q3-1)) and the
/// cleared form of 1 - 1/z. The output sums c1 + c2 + c3 to zero exactly up
/// to roundoff.
pub fn sigma_darb_to_sigma(
    t: &PoleConfig,
    p1: C64,
    p2: C64,
    q3: C64,
) -> Result<(C64, [C64; 3])> {
    let [t1, t2, t3] = t.t();
    let one = c64(1.0, 0.0);
    let lead = t1 * t2 * t3 * (q3 - one) * p1;
    let tail = (t1 - one) * (t2 - one) * (t3 - one) * q3 * p2;
    let bracket = lead - tail;
    let qd = q3 * (q3 - one) * bracket;
    let scale = (q3 * (q3 - one)).norm() * (lead.norm() + tail.norm());
    if qd.norm() <= DEGENERACY_REL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::PolarLocus {
            magnitude: qd.norm(),
        });
    }
    let z = lead / bracket;
    let mu = bracket / (q3 * (q3 - one));
    let ts = [t1, t2, t3];
    let mut c = [c64(0.0, 0.0); 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        c[i] = mu * (q3 - ts[i]) / ((ts[i] - ts[j]) * (ts[i] - ts[k]));
    }
    Ok((z, c))
}

/// Restriction of the inverse map to Sigma, landing in Sigma^Darb:
/// (p1, p2, q3) = (z Q0/(t1 t2 t3), (z-1) Q1/((t1-1)(t2-1)(t3-1)), -Q0/Qinf).
///
/// The input must satisfy c1 + c2 + c3 = 0 within 1e-10 of the c-scale, and
/// must avoid the special subset {Q0 Q1 Qinf = 0} where the parametrization
/// degenerates (there the paper-side fix is a Moebius reparametrization,
/// which is out of scope here).
pub fn sigma_to_sigma_darb(t: &PoleConfig, z: C64, c: [C64; 3]) -> Result<(C64, C64, C64)> {
    let sum = c[0] + c[1] + c[2];
    let cscale: f64 = c.iter().map(|v| v.norm()).sum();
    let tol = 1e-10 * cscale.max(1.0);
    if sum.norm() > tol {
        return Err(Error::NotInSigma {
            defect: sum.norm(),
            tol,
        });
    }
    let [t1, t2, t3] = t.t();
    let one = c64(1.0, 0.0);
    let (q0, q1, qinf) = q_quantities(t, c);
    let s0: f64 = [t2 * t3 * c[0], t1 * t3 * c[1], t1 * t2 * c[2]]
        .iter()
        .map(|v| v.norm())
        .sum();
    let sinf: f64 = [t1 * c[0], t2 * c[1], t3 * c[2]]
        .iter()
        .map(|v| v.norm())
        .sum();
    let magnitude = (q0 * q1 * qinf).norm();
    let scale = (s0 * (s0 + sinf) * sinf).max(f64::MIN_POSITIVE);
    if magnitude <= DEGENERACY_REL * scale {
        return Err(Error::SpecialSubset { magnitude });
    }
    let p1 = z * q0 / (t1 * t2 * t3);
    let p2 = (z - one) * q1 / ((t1 - one) * (t2 - one) * (t3 - one));
    let q3 = -q0 / qinf;
    Ok((p1, p2, q3))
}

/// Frobenius norm of J^T Omega J - Omega, where J is the finite-difference
/// Jacobian of the forward map at `d` (h = 1e-5) and Omega is the standard
/// symplectic form pairing z_i with c_i on the output side and q_k with p_k
/// on the input side. The transpose is complex-bilinear (no conjugation):
/// the symplectic form is holomorphic. Canonicity of the coordinate change
/// makes this vanish; values below 1e-6 are expected at admissible points.
pub fn symplectic_defect(t: &PoleConfig, d: &DarbouxPoint) -> Result<f64> {
    symplectic_defect_h(t, d, 1e-5)
}

/// As `symplectic_defect` with an explicit finite-difference step.
pub fn symplectic_defect_h(t: &PoleConfig, d: &DarbouxPoint, h: f64) -> Result<f64> {
    guard_q_collisions(t, d)?;
    let x0 = [d.q[0], d.q[1], d.q[2], d.p[0], d.p[1], d.p[2]];
    let f = |x: &[C64]| -> Result<Vec<C64>> {
        let pt = DarbouxPoint::new([x[0], x[1], x[2]], [x[3], x[4], x[5]]);
        let (z, c) = psi(t, &pt)?;
        Ok(vec![z[0], z[1], z[2], c[0], c[1], c[2]])
    };
    let j = jacobian_fd(f, &x0, h)?;
    // (J^T Omega J)_{ab} = sum_{i<3} J_{i,a} J_{i+3,b} - J_{i+3,a} J_{i,b}.
    let mut defect_sq = 0.0;
    for a in 0..6 {
        for b in 0..6 {
            let mut m = c64(0.0, 0.0);
            for i in 0..3 {
                m += j[i][a] * j[i + 3][b] - j[i + 3][a] * j[i][b];
            }
            let omega = if b == a + 3 {
                c64(1.0, 0.0)
            } else if a == b + 3 {
                c64(-1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            };
            defect_sq += (m - omega).norm_sqr();
        }
    }
    Ok(defect_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poles() -> PoleConfig {
        PoleConfig::new(c64(2.0, 0.5), c64(-1.3, 0.8), c64(0.6, -1.7)).unwrap()
    }

    fn sample_point() -> DarbouxPoint {
        DarbouxPoint::new(
            [c64(0.4, 0.9), c64(-1.1, -0.3), c64(1.9, 0.6)],
            [c64(0.8, -0.2), c64(-0.5, 0.7), c64(0.3, 0.4)],
        )
    }

    #[test]
    fn psi_permutation_invariant() {
        let t = poles();
        let d = sample_point();
        let (z0, c0) = psi(&t, &d).unwrap();
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for perm in perms {
            let dp = DarbouxPoint::new(
                [d.q[perm[0]], d.q[perm[1]], d.q[perm[2]]],
                [d.p[perm[0]], d.p[perm[1]], d.p[perm[2]]],
            );
            let (z, c) = psi(&t, &dp).unwrap();
            for i in 0..3 {
                assert!((z[i] - z0[i]).norm() < 1e-12 * z0[i].norm().max(1.0));
                assert!((c[i] - c0[i]).norm() < 1e-12 * c0[i].norm().max(1.0));
            }
        }
    }

    #[test]
    fn psi_collision_refused() {
        let t = poles();
        let d = DarbouxPoint::new(
            [c64(0.4, 0.9), c64(0.4, 0.9), c64(1.9, 0.6)],
            [c64(0.8, -0.2), c64(-0.5, 0.7), c64(0.3, 0.4)],
        );
        assert!(matches!(psi(&t, &d), Err(Error::CriticalLocus(_))));
    }

    #[test]
    fn psi_zero_momenta_degenerate() {
        let t = poles();
        let d = DarbouxPoint::new(sample_point().q, [c64(0.0, 0.0); 3]);
        assert!(matches!(psi(&t, &d), Err(Error::LambdaDegenerate { .. })));
    }

    #[test]
    fn round_trip_from_darboux_side() {
        let t = poles();
        let d = sample_point();
        let (z, c) = psi(&t, &d).unwrap();
        let back = psi_inverse(&t, z, c).unwrap();
        // psi_inverse sorts, so compare as multisets of (q, p) pairs.
        for k in 0..3 {
            let qk = d.q[k];
            let m = (0..3)
                .min_by(|&a, &b| {
                    (back.q[a] - qk)
                        .norm()
                        .total_cmp(&(back.q[b] - qk).norm())
                })
                .unwrap();
            assert!((back.q[m] - qk).norm() < 1e-9 * qk.norm().max(1.0));
            assert!((back.p[m] - d.p[k]).norm() < 1e-9 * d.p[k].norm().max(1.0));
        }
    }

    #[test]
    fn round_trip_from_moduli_side() {
        let t = poles();
        let z = [c64(0.7, -0.4), c64(-0.9, 0.3), c64(1.2, 0.8)];
        let c = [c64(0.5, 0.6), c64(-1.1, 0.2), c64(0.8, -0.7)];
        let d = psi_inverse(&t, z, c).unwrap();
        let (z2, c2) = psi(&t, &d).unwrap();
        for i in 0..3 {
            assert!((z2[i] - z[i]).norm() < 1e-9 * z[i].norm().max(1.0));
            assert!((c2[i] - c[i]).norm() < 1e-9 * c[i].norm().max(1.0));
        }
    }

    #[test]
    fn cubic_degenerates_detected() {
        let t = poles();
        let [t1, t2, t3] = t.t();
        // z_i = t_i makes kappa = sum c_i (z_i - t_i) vanish identically.
        let z = [t1, t2, t3];
        let c = [c64(0.5, 0.6), c64(-1.1, 0.2), c64(0.8, -0.7)];
        assert!(matches!(
            psi_inverse(&t, z, c),
            Err(Error::CubicDegenerates { .. })
        ));
    }

    #[test]
    fn sigma_points_reach_reverse_parametrization() {
        // On Sigma, the q-multiset is {0, 1, -Q0/Qinf} and the momenta at the
        // roots 0, 1 are the printed p1, p2, with p = 0 at the third root.
        let t = poles();
        let z0 = c64(0.35, -0.55);
        let c1 = c64(0.6, 0.25);
        let c2 = c64(-0.4, 0.5);
        let c = [c1, c2, -c1 - c2];
        let z = [z0, z0, z0];
        let d = psi_inverse(&t, z, c).unwrap();
        let (p1x, p2x, q3x) = sigma_to_sigma_darb(&t, z0, c).unwrap();
        let want = [(c64(0.0, 0.0), p1x), (c64(1.0, 0.0), p2x), (q3x, c64(0.0, 0.0))];
        for (qw, pw) in want {
            let m = (0..3)
                .min_by(|&a, &b| (d.q[a] - qw).norm().total_cmp(&(d.q[b] - qw).norm()))
                .unwrap();
            assert!(
                (d.q[m] - qw).norm() < 1e-9 * qw.norm().max(1.0),
                "missing root {qw}"
            );
            assert!(
                (d.p[m] - pw).norm() < 1e-9 * pw.norm().max(1.0),
                "momentum at {qw}: {} != {pw}",
                d.p[m]
            );
        }
    }

    #[test]
    fn alternate_formula_handles_root_near_pole() {
        // Steer the third root to t1 + 1e-5 so the naive momentum formula
        // divides by ~1e-5 at that root; the alternate form stays exact.
        let t = poles();
        let [t1, t2, t3] = t.t();
        let z0 = c64(0.45, 0.2);
        let q3_target = t1 + c64(1e-5, 0.0);
        // Solve Q0 + q3* Qinf = 0 for c on Sigma with c1 fixed.
        let a = (t2 * t3 - t1 * t2) + q3_target * (t1 - t3);
        let b = (t1 * t3 - t1 * t2) + q3_target * (t2 - t3);
        let c1 = c64(0.7, -0.3);
        let c2 = -a * c1 / b;
        let c = [c1, c2, -c1 - c2];
        let (p1x, p2x, q3x) = sigma_to_sigma_darb(&t, z0, c).unwrap();
        assert!((q3x - q3_target).norm() < 1e-10 * q3_target.norm());
        let d = psi_inverse(&t, [z0, z0, z0], c).unwrap();
        // Momenta at the roots 0, 1 match the reverse parametrization and
        // the momentum at the near-pole root vanishes.
        let want = [
            (c64(0.0, 0.0), p1x),
            (c64(1.0, 0.0), p2x),
            (q3x, c64(0.0, 0.0)),
        ];
        for (qw, pw) in want {
            let m = (0..3)
                .min_by(|&a, &b| (d.q[a] - qw).norm().total_cmp(&(d.q[b] - qw).norm()))
                .unwrap();
            assert!((d.q[m] - qw).norm() < 1e-9 * qw.norm().max(1.0));
            assert!(
                (d.p[m] - pw).norm() < 1e-9 * pw.norm().max(1.0),
                "momentum at {qw}: {} != {pw}",
                d.p[m]
            );
        }
        // Round trip still holds through the alternate branch.
        let (z2, c2b) = psi(&t, &d).unwrap();
        for i in 0..3 {
            assert!((z2[i] - z0).norm() < 1e-9 * z0.norm().max(1.0));
            assert!((c2b[i] - c[i]).norm() < 1e-9 * c[i].norm().max(1.0));
        }
    }

    #[test]
    fn sigma_darb_parametrization_lands_in_sigma() {
        let t = poles();
        let (z, c) = sigma_darb_to_sigma(&t, c64(0.7, -0.2), c64(-0.4, 0.9), c64(1.6, 0.5))
            .unwrap();
        let cscale: f64 = c.iter().map(|v| v.norm()).sum();
        assert!((c[0] + c[1] + c[2]).norm() < 1e-10 * cscale.max(1.0));
        assert!(z.re.is_finite() && z.im.is_finite());
    }

    #[test]
    fn c_vanishes_when_q3_hits_pole() {
        let t = poles();
        let (_, c) = sigma_darb_to_sigma(&t, c64(0.7, -0.2), c64(-0.4, 0.9), t.t1()).unwrap();
        assert!(c[0].norm() < 1e-12);
    }

    #[test]
    fn special_subset_refused() {
        let t = poles();
        let [t1, t2, t3] = t.t();
        // Q0 = 0: pick c1 free, solve t2 t3 c1 + t1 t3 c2 + t1 t2 c3 = 0 with
        // c3 = -c1 - c2.
        let c1 = c64(0.8, 0.1);
        let c2 = (t1 * t2 - t2 * t3) * c1 / (t1 * t3 - t1 * t2);
        let c = [c1, c2, -c1 - c2];
        let (q0, _, _) = q_quantities(&t, c);
        assert!(q0.norm() < 1e-12 * c1.norm().max(1.0) * (t1.norm() * t2.norm()).max(1.0));
        assert!(matches!(
            sigma_to_sigma_darb(&t, c64(0.3, 0.4), c),
            Err(Error::SpecialSubset { .. })
        ));
    }

    #[test]
    fn sigma_round_trips_both_ways() {
        let t = poles();
        let (p1, p2, q3) = (c64(0.7, -0.2), c64(-0.4, 0.9), c64(1.6, 0.5));
        let (z, c) = sigma_darb_to_sigma(&t, p1, p2, q3).unwrap();
        let (p1b, p2b, q3b) = sigma_to_sigma_darb(&t, z, c).unwrap();
        assert!((p1b - p1).norm() < 1e-9 * p1.norm().max(1.0));
        assert!((p2b - p2).norm() < 1e-9 * p2.norm().max(1.0));
        assert!((q3b - q3).norm() < 1e-9 * q3.norm().max(1.0));

        let z0 = c64(0.35, -0.55);
        let c1 = c64(0.6, 0.25);
        let c2 = c64(-0.4, 0.5);
        let cs = [c1, c2, -c1 - c2];
        let (p1x, p2x, q3x) = sigma_to_sigma_darb(&t, z0, cs).unwrap();
        let (zb, cb) = sigma_darb_to_sigma(&t, p1x, p2x, q3x).unwrap();
        assert!((zb - z0).norm() < 1e-9 * z0.norm().max(1.0));
        for i in 0..3 {
            assert!((cb[i] - cs[i]).norm() < 1e-9 * cs[i].norm().max(1.0));
        }
    }

    #[test]
    fn symplectic_defect_small_and_converging() {
        let t = poles();
        let d = sample_point();
        let defect = symplectic_defect(&t, &d).unwrap();
        assert!(defect < 1e-6, "defect {defect}");
        let halved = symplectic_defect_h(&t, &d, 0.5e-5).unwrap();
        assert!(halved < 2.0 * defect.max(1e-12), "halving h degraded: {halved} vs {defect}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Round trip from the moduli side at random points, skipping the
        /// guard bands of the rational maps.
        #[test]
        fn prop_round_trip(vals in proptest::collection::vec(-1.5f64..1.5, 12)) {
            let t = poles();
            let z = [c64(vals[0], vals[1]), c64(vals[2], vals[3]), c64(vals[4], vals[5])];
            let c = [c64(vals[6], vals[7]), c64(vals[8], vals[9]), c64(vals[10], vals[11])];
            let d = match psi_inverse(&t, z, c) {
                Ok(d) => d,
                Err(_) => return Ok(()),
            };
            prop_assume!(d.min_q_separation() > 1e-3);
            let (z2, c2) = match psi(&t, &d) {
                Ok(v) => v,
                Err(_) => return Ok(()),
            };
            for i in 0..3 {
                prop_assert!((z2[i] - z[i]).norm() < 1e-9 * z[i].norm().max(1.0));
                prop_assert!((c2[i] - c[i]).norm() < 1e-9 * c[i].norm().max(1.0));
            }
        }

        /// The Sigma^Darb parametrization always lands in Sigma.
        #[test]
        fn prop_sigma_darb_lands_in_sigma(vals in proptest::collection::vec(-1.5f64..1.5, 6)) {
            let t = poles();
            let (p1, p2, q3) = (
                c64(vals[0], vals[1]),
                c64(vals[2], vals[3]),
                c64(2.0 * vals[4], 2.0 * vals[5]),
            );
            let (_, c) = match sigma_darb_to_sigma(&t, p1, p2, q3) {
                Ok(v) => v,
                Err(_) => return Ok(()),
            };
            let cscale: f64 = c.iter().map(|v| v.norm()).sum();
            prop_assert!((c[0] + c[1] + c[2]).norm() < 1e-10 * cscale.max(1.0));
        }
    }
}
