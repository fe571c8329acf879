//! Singular values of small complex matrices by one-sided Jacobi.
//!
//! The matrices here are Jacobians of at most a dozen rows and columns, so a
//! dependency on a full linear-algebra stack is not warranted. One-sided
//! Jacobi orthogonalizes the columns by unitary plane rotations; at
//! convergence the singular values are the column norms. The method is
//! backward stable and computes small singular values to high relative
//! accuracy, which matters because rank decisions hinge on them.

use super::C64;
use crate::error::{Error, Result};

/// Singular values of the row-major matrix `a`, sorted descending.
///
/// All rows must have equal nonzero length. Returns one value per column.
pub fn singular_values(a: &[Vec<C64>]) -> Result<Vec<f64>> {
    let m = a.len();
    if m == 0 {
        return Err(Error::DegenerateInput("empty matrix"));
    }
    let n = a[0].len();
    if n == 0 || a.iter().any(|row| row.len() != n) {
        return Err(Error::DegenerateInput("ragged or zero-width matrix"));
    }

    // Column-major working copy.
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|j| a.iter().map(|row| row[j]).collect())
        .collect();

    let dot = |u: &[C64], v: &[C64]| -> C64 {
        u.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
    };
    let norm_sqr = |u: &[C64]| -> f64 { u.iter().map(|x| x.norm_sqr()).sum() };

    const MAX_SWEEPS: usize = 60;
    const TOL: f64 = 1e-14;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let aa = norm_sqr(&cols[i]);
                let bb = norm_sqr(&cols[j]);
                let c = dot(&cols[i], &cols[j]);
                let cn = c.norm();
                if cn <= TOL * (aa * bb).sqrt() || cn == 0.0 {
                    continue;
                }
                rotated = true;
                // Zero the Gram off-diagonal: strip the phase of c, then a
                // real Jacobi rotation with cot(2 theta) = (bb - aa) / (2|c|).
                let phase = c / cn;
                let tau = (bb - aa) / (2.0 * cn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let ph = phase.conj();
                for k in 0..cols[i].len() {
                    let u = cols[i][k];
                    let v = cols[j][k] * ph;
                    cols[i][k] = u * cs - v * sn;
                    cols[j][k] = u * sn + v * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = cols.iter().map(|c| norm_sqr(c).sqrt()).collect();
    sigma.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(sigma)
}

/// Numerical rank: the count of singular values above `rel_tol * sigma_max`,
/// together with the sorted spectrum. A zero matrix has rank zero.
pub fn rank_svd(a: &[Vec<C64>], rel_tol: f64) -> Result<(usize, Vec<f64>)> {
    let sigma = singular_values(a)?;
    let smax = sigma[0];
    if smax == 0.0 {
        return Ok((0, sigma));
    }
    let rank = sigma.iter().filter(|&&s| s > rel_tol * smax).count();
    Ok((rank, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c64;
    use proptest::prelude::*;

    #[test]
    fn known_two_by_two() {
        // A = [[1,2],[3,4]]: sigma^2 are the eigenvalues 15 +/- sqrt(221)
        // of A^T A.
        let a = vec![
            vec![c64(1.0, 0.0), c64(2.0, 0.0)],
            vec![c64(3.0, 0.0), c64(4.0, 0.0)],
        ];
        let sigma = singular_values(&a).unwrap();
        let s1 = (15.0 + 221.0_f64.sqrt()).sqrt();
        let s2 = (15.0 - 221.0_f64.sqrt()).sqrt();
        assert!((sigma[0] - s1).abs() < 1e-12);
        assert!((sigma[1] - s2).abs() < 1e-12);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [c64(1.0, 0.5), c64(-0.3, 2.0), c64(0.7, -0.1)];
        let v = [c64(2.0, -1.0), c64(0.4, 0.8)];
        let a: Vec<Vec<C64>> = u
            .iter()
            .map(|&ui| v.iter().map(|&vj| ui * vj).collect())
            .collect();
        let (rank, sigma) = rank_svd(&a, 1e-10).unwrap();
        assert_eq!(rank, 1);
        // Outer-product singular value is |u| |v|.
        let nu: f64 = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!((sigma[0] - nu * nv).abs() < 1e-12);
    }

    proptest! {
        /// Frobenius norm equals the l2 norm of the spectrum, and row phases
        /// leave singular values unchanged.
        #[test]
        fn frobenius_and_phase_invariance(
            re in proptest::collection::vec(-2.0f64..2.0, 12),
            im in proptest::collection::vec(-2.0f64..2.0, 12),
            phases in proptest::collection::vec(-3.0f64..3.0, 4),
        ) {
            let a: Vec<Vec<C64>> = (0..4)
                .map(|i| (0..3).map(|j| c64(re[3 * i + j], im[3 * i + j])).collect())
                .collect();
            let sigma = singular_values(&a).unwrap();
            let frob: f64 = a
                .iter()
                .flatten()
                .map(|x| x.norm_sqr())
                .sum::<f64>()
                .sqrt();
            let spec: f64 = sigma.iter().map(|s| s * s).sum::<f64>().sqrt();
            prop_assert!((frob - spec).abs() < 1e-10 * frob.max(1.0));

            let b: Vec<Vec<C64>> = a
                .iter()
                .zip(&phases)
                .map(|(row, &p)| {
                    let ph = C64::from_polar(1.0, p);
                    row.iter().map(|&x| x * ph).collect()
                })
                .collect();
            let sigma_b = singular_values(&b).unwrap();
            for (s, t) in sigma.iter().zip(&sigma_b) {
                prop_assert!((s - t).abs() < 1e-10 * frob.max(1.0));
            }
        }
    }
}
