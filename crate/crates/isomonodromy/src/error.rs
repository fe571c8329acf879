//! Crate-wide error type.
//!
//! Every fallible operation in the library reports through [`Error`]. Numerical
//! preconditions (guard bands around polar loci, collision guards, safety
//! distances) are enforced eagerly so that downstream consumers see a named
//! error instead of a NaN.

use num_complex::Complex64;

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Adaptive step size shrank below the representable floor, which happens
    /// when a path creeps up on a singular point of the coefficient matrix.
    #[error("singular approach: step-size underflow at path parameter s = {s:.6}")]
    SingularApproach { s: f64 },

    /// A coefficient or matrix entry evaluated to a non-finite value.
    #[error("evaluation failure: non-finite value near x = {x}")]
    EvaluationFailure { x: Complex64 },

    /// Structurally unusable input (zero polynomial, empty matrix, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    /// A finite-difference stencil point landed in a forbidden region.
    #[error("stencil collision: {0}")]
    StencilCollision(String),

    /// The det(B) = exp(-integral tr A dx) self-test failed post integration.
    #[error("transport determinant drift {defect:.3e} exceeds 10x tolerance {tol:.3e}")]
    DetDrift { defect: f64, tol: f64 },

    /// Connection matrix requested at one of its poles.
    #[error("pole evaluation: connection coefficient requested at x = {x}")]
    PoleEvaluation { x: Complex64 },

    /// Pole configuration outside the parameter space (t_i in {0,1} or t_i = t_j).
    #[error("invalid pole configuration: {0}")]
    InvalidPoleConfig(String),

    /// Two q-coordinates collided: the polar locus of the coordinate change
    /// and of the Hamiltonian vector fields.
    #[error("critical locus: {0}")]
    CriticalLocus(String),

    /// The Lambda intermediate of the (q,p) -> (z,c) map vanished.
    #[error("Lambda degenerate: |Lambda| = {magnitude:.3e} below guard")]
    LambdaDegenerate { magnitude: f64 },

    /// Leading coefficient of the q-cubic vanished; the cubic degenerates.
    #[error("cubic degenerates: leading coefficient magnitude {magnitude:.3e} below guard")]
    CubicDegenerates { magnitude: f64 },

    /// A q-root sits on a pole of the p-formula with no cancelling rewrite.
    #[error("indeterminate p at index {k}")]
    IndeterminateP { k: usize },

    /// Q^Darb = 0: polar locus of the Sigma^Darb -> Sigma parametrization.
    #[error("polar locus: |Q^Darb| = {magnitude:.3e} below guard")]
    PolarLocus { magnitude: f64 },

    /// Q0*Q1*Qinf = 0: the special subset where the Sigma -> Sigma^Darb map
    /// needs a reparametrization this crate does not implement.
    #[error("special subset: |Q0*Q1*Qinf| = {magnitude:.3e} below guard")]
    SpecialSubset { magnitude: f64 },

    /// Input claimed to lie on Sigma but violates its defining equations.
    #[error("not in Sigma: defining-equation defect {defect:.3e} exceeds {tol:.3e}")]
    NotInSigma { defect: f64, tol: f64 },

    /// Isomonodromic flow left the admissible pole-parameter space.
    #[error("left parameter space at flow parameter s = {s:.6}")]
    LeftParameterSpace { s: f64 },

    /// No pole-avoiding corridor exists for a loop segment.
    #[error("path planning failure: {0}")]
    PathPlanning(String),

    /// Trace words over monodromy matrices must have even length.
    #[error("odd word: length {0}")]
    OddWord(usize),

    /// Every monodromy matrix is within tolerance of +/- identity.
    #[error("central representation: irreducibility test undefined")]
    CentralRepresentation,

    /// An x-path came within the safety margin of a Weierstrass point.
    #[error("branch approach: path distance {dist:.3e} below margin {margin:.3e}")]
    BranchApproach { dist: f64, margin: f64 },

    /// Riemann-Hilbert pipeline invoked on a reducible determinant.
    #[error("reducible determinant: |discriminant| = {magnitude:.3e} below guard")]
    ReducibleDeterminant { magnitude: f64 },

    /// The quadratic differential has a root at infinity (nu_2 = 0).
    #[error("root at infinity unsupported: |nu_2| = {magnitude:.3e}")]
    RootAtInfinity { magnitude: f64 },

    /// x_beta = 1/2: the exceptional decomposition stratum of the section.
    #[error("exceptional decomposition: |2*x_beta - 1| = {magnitude:.3e} below guard")]
    ExceptionalDecomposition { magnitude: f64 },

    /// The tangency 1-form vanishes identically (reducible system).
    #[error("invariant horizontal: tangency form vanishes identically")]
    InvariantHorizontal,

    /// The degree-2 eigendirection map degenerated (reducible system).
    #[error("degree collapse: special-fiber count undefined for reducible system")]
    DegreeCollapse,

    /// A runtime self-test on a computed representation failed, indicating
    /// the integration tolerance was not actually achieved.
    #[error("self-test failed: {what} defect {defect:.3e} exceeds {tol:.1e}")]
    SelfTest {
        what: &'static str,
        defect: f64,
        tol: f64,
    },

    /// Experiment configuration rejected.
    #[error("config error: {0}")]
    Config(String),

    /// Report emission I/O failure.
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Report (de)serialization failure.
    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
}
