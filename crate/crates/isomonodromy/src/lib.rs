//! Numerical laboratory for isomonodromic deformations of rank-2 Fuchsian
//! systems with six poles on the projective line, and their lifts to
//! holomorphic systems on genus-2 hyperelliptic curves.
//!
//! The crate is organized in layers:
//!
//! * [`numkit`]: 2x2 complex matrices, low-degree polynomial roots,
//!   polylines, an adaptive Dormand-Prince transport integrator,
//!   finite-difference Jacobians, and a small-matrix SVD.
//! * [`fuchsian`]: the two-parameter family of Fuchsian connections, its
//!   spectral data, and the reducibility locus Sigma.
//! * [`darboux`]: the Darboux coordinate change between pole data (z, c) and
//!   Garnier coordinates (q, p).
//! * [`garnier`]: the Garnier Hamiltonians, their vector fields, and the
//!   isomonodromic flow.
//! * [`transversality`]: the determinant certifying that Sigma is swept out
//!   transversally, plus the tangent-cone conic at its singular points.
//! * [`monodromy`]: loop planning, monodromy representations, trace words,
//!   and the Riemann-Hilbert rank experiment.
//! * [`genus2`]: the pullback to the genus-2 curve, Riccati geometry of the
//!   associated quadratic differential, and special-fiber counts.
//! * [`experiments`]: reproducible experiment driver behind the CLI.
//!
//! The main entry points for exploration are the `examples/` programs, one
//! per capability; the `isomonodromy` binary wraps [`experiments`] for
//! scripted verification runs.

pub mod darboux;
pub mod error;
pub mod experiments;
pub mod fuchsian;
pub mod garnier;
pub mod genus2;
pub mod monodromy;
pub mod numkit;
pub mod transversality;

pub use error::{Error, Result};
