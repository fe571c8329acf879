//! Complex polynomials of low degree, with closed-form roots.
//!
//! Degree three suffices for this crate: the largest objects are the quintic
//! curve polynomial F(x) = x(x-1)(x-t1)(x-t2)(x-t3), which is only ever
//! evaluated or differentiated, and the q-coordinate cubic, which is solved.

use super::C64;
use crate::error::{Error, Result};

/// Dense polynomial, coefficients lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<C64>,
}

impl ComplexPoly {
    /// Build from coefficients (constant term first). Trailing exact zeros are
    /// trimmed; the zero polynomial is represented by an empty list.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coeffs = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            // Multiply by (x - r).
            let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of x^k, zero beyond the stored degree.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Degree of the trimmed polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<C64> {
        self.coeffs.last().copied()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * (k as f64))
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        Self::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Roots of a polynomial of degree at most three, as a multiset.
///
/// Closed-form (linear / quadratic / Cardano) solutions followed by a Newton
/// polish; each returned root has back-substitution residual below
/// `1e-10 * max|coefficient| * max(1, |root|)^degree`.
///
/// Near-zero leading coefficients (relative magnitude below `1e-14`) are
/// trimmed before dispatch, so a numerically degenerate cubic is solved as a
/// quadratic. The zero polynomial and nonzero constants are rejected.
pub fn poly_roots(p: &ComplexPoly) -> Result<Vec<C64>> {
    let scale = p.max_coeff();
    if scale == 0.0 {
        return Err(Error::DegenerateInput("zero polynomial has no root multiset"));
    }
    let mut coeffs: Vec<C64> = p.coeffs().to_vec();
    while coeffs
        .last()
        .is_some_and(|c| c.norm() < 1e-14 * scale)
        && coeffs.len() > 1
    {
        coeffs.pop();
    }
    let roots = match coeffs.len() {
        0 | 1 => {
            return Err(Error::DegenerateInput(
                "constant polynomial after trimming leading zeros",
            ))
        }
        2 => vec![-coeffs[0] / coeffs[1]],
        3 => quadratic_roots(coeffs[0], coeffs[1], coeffs[2]),
        4 => cubic_roots(coeffs[0], coeffs[1], coeffs[2], coeffs[3]),
        n => {
            debug_assert!(n <= 4, "caller promised degree <= 3");
            return Err(Error::DegenerateInput("degree above three"));
        }
    };
    let trimmed = ComplexPoly::new(coeffs);
    Ok(roots.into_iter().map(|r| polish(&trimmed, r)).collect())
}

/// Roots of c2 x^2 + c1 x + c0, c2 assumed nonzero.
fn quadratic_roots(c0: C64, c1: C64, c2: C64) -> Vec<C64> {
    let mut s = (c1 * c1 - 4.0 * c0 * c2).sqrt();
    // Pick the sign that avoids cancellation in c1 + s.
    if (c1 + s).norm() < (c1 - s).norm() {
        s = -s;
    }
    let q = -0.5 * (c1 + s);
    if q.norm() == 0.0 {
        // c1 = 0 and discriminant = 0: double root at origin of the shifted
        // variable; both roots are -c1/(2 c2) = 0 ... only when c0 = 0 too.
        let r = (-c0 / c2).sqrt();
        return vec![r, -r];
    }
    vec![q / c2, c0 / q]
}

/// Roots of c3 x^3 + c2 x^2 + c1 x + c0 by Cardano's method, c3 nonzero.
fn cubic_roots(c0: C64, c1: C64, c2: C64, c3: C64) -> Vec<C64> {
    // Depress: x = t - b/3 with monic coefficients b, c, d.
    let b = c2 / c3;
    let c = c1 / c3;
    let d = c0 / c3;
    let shift = -b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;

    let scale = p.norm().max(q.norm());
    if scale == 0.0 {
        return vec![shift, shift, shift];
    }

    let disc = (q * 0.5) * (q * 0.5) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let s = disc.sqrt();
    // Choose the better-conditioned cube-root argument.
    let w1 = -q * 0.5 + s;
    let w2 = -q * 0.5 - s;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    let u = w.powf(1.0 / 3.0);
    if u.norm() == 0.0 {
        // p = q = 0 up to rounding: triple root.
        return vec![shift, shift, shift];
    }
    let v = -p / (3.0 * u);
    let omega = C64::new(-0.5, 3.0_f64.sqrt() / 2.0);
    let mut roots = Vec::with_capacity(3);
    let mut uk = u;
    let mut vk = v;
    for _ in 0..3 {
        roots.push(uk + vk + shift);
        uk *= omega;
        vk *= omega.conj();
    }
    roots
}

/// One or two Newton steps; keeps the closed-form root if the derivative is
/// too small to divide by (multiple root).
fn polish(p: &ComplexPoly, mut x: C64) -> C64 {
    let dp = p.derivative();
    for _ in 0..2 {
        let f = p.eval(x);
        let df = dp.eval(x);
        if df.norm() < 1e-12 * p.max_coeff().max(1.0) {
            break;
        }
        let step = f / df;
        if !step.re.is_finite() || !step.im.is_finite() || step.norm() > 1.0 + x.norm() {
            break;
        }
        x -= step;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c64;
    use proptest::prelude::*;

    fn residual_scale(p: &ComplexPoly, r: C64) -> f64 {
        p.max_coeff() * r.norm().max(1.0).powi(p.degree().unwrap_or(0) as i32)
    }

    #[test]
    fn quadratic_unit() {
        // x^2 - 1 -> {1, -1}
        let p = ComplexPoly::new(vec![c64(-1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let mut roots = poly_roots(&p).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - c64(-1.0, 0.0)).norm() < 1e-14);
        assert!((roots[1] - c64(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cubic_triple_root() {
        // x^3 -> {0, 0, 0}
        let p = ComplexPoly::new(vec![
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(1.0, 0.0),
        ]);
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.len(), 3);
        for r in roots {
            assert!(r.norm() < 1e-10);
        }
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(
            poly_roots(&ComplexPoly::zero()),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn from_roots_eval_vanishes() {
        let roots = [c64(0.3, -1.2), c64(2.0, 0.5), c64(-0.7, 0.1)];
        let p = ComplexPoly::from_roots(&roots);
        for r in roots {
            assert!(p.eval(r).norm() < 1e-12);
        }
        assert_eq!(p.degree(), Some(3));
    }

    proptest! {
        /// Roots reproduce coefficients: expand from computed roots and
        /// compare against the (monic-normalized) input.
        #[test]
        fn roots_reproduce_coefficients(
            re in proptest::collection::vec(-3.0f64..3.0, 3),
            im in proptest::collection::vec(-3.0f64..3.0, 3),
        ) {
            let roots: Vec<C64> = re.iter().zip(&im).map(|(&a, &b)| c64(a, b)).collect();
            // Skip clustered inputs: multiple-root perturbation is O(sqrt(eps)).
            for i in 0..3 {
                for j in (i + 1)..3 {
                    prop_assume!((roots[i] - roots[j]).norm() > 1e-3);
                }
            }
            let p = ComplexPoly::from_roots(&roots);
            let got = poly_roots(&p).unwrap();
            let q = ComplexPoly::from_roots(&got);
            let scale = p.max_coeff();
            for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
                prop_assert!((a - b).norm() < 1e-9 * scale);
            }
        }

        /// Back-substitution residual stays below the documented bound.
        #[test]
        fn residual_bound(
            re in proptest::collection::vec(-2.0f64..2.0, 4),
            im in proptest::collection::vec(-2.0f64..2.0, 4),
        ) {
            let coeffs: Vec<C64> = re.iter().zip(&im).map(|(&a, &b)| c64(a, b)).collect();
            let p = ComplexPoly::new(coeffs);
            prop_assume!(p.degree().unwrap_or(0) >= 1);
            prop_assume!(p.leading().unwrap().norm() > 1e-3 * p.max_coeff());
            for r in poly_roots(&p).unwrap() {
                prop_assert!(p.eval(r).norm() < 1e-10 * residual_scale(&p, r));
            }
        }
    }
}
