//! Finite-difference Jacobians of holomorphic maps.
//!
//! All maps differentiated in this crate are holomorphic in their complex
//! parameters, so the complex derivative equals the directional derivative
//! along the real axis and a real-step central difference applies verbatim.

use super::C64;
use crate::error::{Error, Result};

/// Jacobian of `f` at `x0` by central differences with one Richardson level.
///
/// Per input variable the stencil is the four points `x0 +/- h e_j` and
/// `x0 +/- (h/2) e_j`; the two central-difference quotients `D_h`, `D_{h/2}`
/// combine as `(4 D_{h/2} - D_h) / 3`, cancelling the leading `h^2` error
/// term. Returns the matrix as rows indexed by output component, columns by
/// input variable. Any error raised by `f` on a stencil point is wrapped in
/// [`Error::StencilCollision`], since it means the stencil straddled a guard
/// band of the map's domain; callers should shrink `h` or move the base
/// point.
pub fn jacobian_fd<F>(f: F, x0: &[C64], h: f64) -> Result<Vec<Vec<C64>>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::DegenerateInput("finite-difference step must be positive"));
    }
    let n = x0.len();
    if n == 0 {
        return Err(Error::DegenerateInput("empty parameter vector"));
    }

    let probe = |x: &[C64], j: usize, delta: f64| -> Result<Vec<C64>> {
        let mut xs = x.to_vec();
        xs[j] += C64::new(delta, 0.0);
        f(&xs).map_err(|e| {
            Error::StencilCollision(format!(
                "stencil point variable {j}, offset {delta:+.3e}: {e}"
            ))
        })
    };

    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut m: Option<usize> = None;
    for j in 0..n {
        let fp = probe(x0, j, h)?;
        let fm = probe(x0, j, -h)?;
        let fp2 = probe(x0, j, 0.5 * h)?;
        let fm2 = probe(x0, j, -0.5 * h)?;
        let len = fp.len();
        if fm.len() != len || fp2.len() != len || fm2.len() != len {
            return Err(Error::DegenerateInput("map output length varies across stencil"));
        }
        match m {
            None => m = Some(len),
            Some(k) if k != len => {
                return Err(Error::DegenerateInput("map output length varies across stencil"))
            }
            _ => {}
        }
        let col: Vec<C64> = (0..len)
            .map(|i| {
                let d_h = (fp[i] - fm[i]) / (2.0 * h);
                let d_h2 = (fp2[i] - fm2[i]) / h;
                (4.0 * d_h2 - d_h) / 3.0
            })
            .collect();
        columns.push(col);
    }

    let m = m.unwrap_or(0);
    let mut rows = vec![vec![C64::new(0.0, 0.0); n]; m];
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            rows[i][j] = v;
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c64;

    /// Polynomial map with hand-computed Jacobian.
    #[test]
    fn cubic_map_jacobian() {
        // f(x, y) = (x^3 + x y, y^2): J = [[3x^2 + y, x], [0, 2y]].
        let f = |v: &[C64]| -> Result<Vec<C64>> {
            let (x, y) = (v[0], v[1]);
            Ok(vec![x * x * x + x * y, y * y])
        };
        let x0 = [c64(0.7, 0.4), c64(-1.1, 0.2)];
        let jac = jacobian_fd(f, &x0, 1e-4).unwrap();
        let expected = [
            [3.0 * x0[0] * x0[0] + x0[1], x0[0]],
            [c64(0.0, 0.0), 2.0 * x0[1]],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (jac[i][j] - expected[i][j]).norm() < 1e-10,
                    "entry ({i},{j}): {} vs {}",
                    jac[i][j],
                    expected[i][j]
                );
            }
        }
    }

    /// Richardson extrapolation beats the bare central difference on exp.
    #[test]
    fn richardson_gains_accuracy() {
        let f = |v: &[C64]| -> Result<Vec<C64>> { Ok(vec![v[0].exp()]) };
        let x0 = [c64(0.3, 0.9)];
        let h = 1e-3;
        let jac = jacobian_fd(f, &x0, h).unwrap();
        let exact = x0[0].exp();
        let bare = ((x0[0] + c64(h, 0.0)).exp() - (x0[0] - c64(h, 0.0)).exp()) / (2.0 * h);
        assert!((jac[0][0] - exact).norm() < 1e-3 * (bare - exact).norm());
    }

    /// Errors from the map are reported as stencil collisions.
    #[test]
    fn stencil_error_wrapped() {
        let f = |_: &[C64]| -> Result<Vec<C64>> {
            Err(Error::DegenerateInput("forbidden region"))
        };
        let res = jacobian_fd(f, &[c64(0.0, 0.0)], 1e-4);
        assert!(matches!(res, Err(Error::StencilCollision(_))));
    }
}
