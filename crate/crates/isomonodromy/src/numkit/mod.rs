//! Foundation numerics.
//!
//! Complex 2x2 matrices, low-degree polynomials with closed-form roots,
//! polyline paths in the complex plane, adaptive Runge-Kutta transport of
//! linear systems along such paths, finite-difference Jacobians, and
//! numerical rank via singular values.
//!
//! Everything here is a pure function of its value inputs; concurrent use is
//! safe. All arithmetic is double precision.

mod fd;
mod matrix;
mod ode;
mod path;
mod poly;
mod svd;

pub use fd::jacobian_fd;
pub use matrix::Matrix2;
pub use ode::{integrate_ode, integrate_transport, OdeOptions, OdeStats, Transport};
pub use path::Polyline;
pub use poly::{poly_roots, ComplexPoly};
pub use svd::{rank_svd, singular_values};

use num_complex::Complex64;

/// Shorthand for the ubiquitous scalar type.
pub type C64 = Complex64;

/// Convenience constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
