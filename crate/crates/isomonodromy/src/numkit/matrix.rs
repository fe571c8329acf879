//! Complex 2x2 matrices.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// A 2x2 complex matrix, row-major: [[a, b], [c, d]].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Matrix2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        Self::new(o, z, z, o)
    }

    /// Build from real entries.
    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    /// Inverse; `None` if the determinant magnitude is below `1e-300`.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() < 1e-300 {
            return None;
        }
        Some(Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    pub fn mul_vec(&self, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    /// Entrywise distance to another matrix, in the max norm.
    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).max_norm()
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Eigenvalues, as the two roots of the characteristic polynomial.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let half_tr = self.trace() * 0.5;
        let s = (half_tr * half_tr - self.det()).sqrt();
        (half_tr + s, half_tr - s)
    }

    /// An eigenvector for eigenvalue `lambda`, taken from the larger row of
    /// `self - lambda*I`. Returns `None` when the shifted matrix is (close to)
    /// zero, i.e. the matrix is scalar.
    pub fn eigenvector(&self, lambda: Complex64) -> Option<(Complex64, Complex64)> {
        let m = *self - Matrix2::identity().scale(lambda);
        // Rows of m are orthogonal to the eigenvector: (u,v) with
        // a*u + b*v = 0 picks (b, -a); choose the numerically larger row.
        let r1 = m.a.norm().max(m.b.norm());
        let r2 = m.c.norm().max(m.d.norm());
        let floor = 1e-14 * self.max_norm().max(lambda.norm()).max(1.0);
        if r1.max(r2) < floor {
            return None;
        }
        let (u, v) = if r1 >= r2 { (m.b, -m.a) } else { (m.d, -m.c) };
        Some((u, v))
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(self.a + rhs.a, self.b + rhs.b, self.c + rhs.c, self.d + rhs.d)
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(self.a - rhs.a, self.b - rhs.b, self.c - rhs.c, self.d - rhs.d)
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        Matrix2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

impl Mul<Complex64> for Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: Complex64) -> Matrix2 {
        self.scale(rhs)
    }
}
