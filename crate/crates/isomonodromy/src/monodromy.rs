//! Numerical monodromy.
//!
//! Loops around the six poles are planned as radial approach + inscribed
//! polygon + return, based at a common point and ordered by argument; the
//! loop at infinity is the concatenation of the five finite loops reversed,
//! so the product relation of the punctured sphere holds by construction
//! and the trace of the infinity transport is a genuine consistency check.
//!
//! Transports compose left-to-right in path order: the matrix of "P1 then
//! P2" is T(P2) * T(P1), and a word (a, b) over monodromy matrices means
//! loop a first, so its matrix is M_b * M_a. Each local monodromy has
//! eigenvalues {1, -1} (trace 0, determinant -1); products of even-length
//! words land in SL2 and their traces are coordinates on the genus-2
//! character variety reached through the double cover.
//!
//! Direct continuation on the genus-2 curve integrates the normal-form
//! system along an x-path while tracking the sheet y = sqrt(F(x)) by
//! nearest-root continuation at accepted steps, with the step capped well
//! below the sheet separation.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::fuchsian::{FuchsianSystem, PoleConfig, PoleLabel};
use crate::genus2::{section_phi, Genus2System, QuadraticDifferential, RootChoice};
use crate::numkit::{
    c64, integrate_ode, integrate_transport, jacobian_fd, rank_svd, Matrix2, OdeOptions,
    OdeStats, Polyline, C64,
};

/// Loop circle radius as a fraction of the minimal pole separation.
pub const LOOP_RADIUS_REL: f64 = 0.3;
/// Safety corridor for loop segments, fraction of the minimal separation.
pub const SAFETY_REL: f64 = 0.1;
/// Sides of the inscribed polygon realizing each circle.
const CIRCLE_SIDES: usize = 24;

/// Absolute tolerance on |tr M_j| for a valid representation.
pub const TRACE_TOL: f64 = 1e-6;
/// Absolute tolerance on |det M_j + 1|.
pub const DET_TOL: f64 = 1e-8;
/// Absolute tolerance on the ordered-product identity defect.
pub const PRODUCT_TOL: f64 = 1e-6;

/// Safety margin around branch points for hyperelliptic continuation,
/// fraction of the minimal branch-point separation.
pub const BRANCH_MARGIN_REL: f64 = 0.05;

/// Relative singular-value cutoff for the numerical rank.
pub const RANK_REL: f64 = 1e-6;

/// Default even words: seven two- and four-letter words over the matrices
/// in label order (0, 1, t1, t2, t3, infinity), enough to overdetermine the
/// six-dimensional character variety.
pub const DEFAULT_WORDS: [&[usize]; 7] = [
    &[0, 1],
    &[0, 2],
    &[0, 3],
    &[0, 4],
    &[1, 2],
    &[1, 3],
    &[0, 1, 2, 3],
];

/// The default basepoint, high above every finite pole.
pub fn default_basepoint(t: &PoleConfig) -> C64 {
    let m = t.t().iter().map(|v| v.norm()).fold(0.0, f64::max);
    c64(0.0, 2.0 * (1.0 + m))
}

/// A based loop encircling exactly one pole counterclockwise.
#[derive(Clone, Debug)]
pub struct Loop {
    label: PoleLabel,
    basepoint: C64,
    path: Polyline,
}

impl Loop {
    pub fn label(&self) -> PoleLabel {
        self.label
    }

    pub fn basepoint(&self) -> C64 {
        self.basepoint
    }

    pub fn path(&self) -> &Polyline {
        &self.path
    }

    /// Argument-principle check of the homology class: winding 1 around the
    /// labeled pole and 0 around the others; the infinity loop winds -1
    /// around every finite pole.
    pub fn verify_winding(&self, t: &PoleConfig) -> Result<()> {
        for (label, pole) in finite_labels(t) {
            let want = match self.label {
                PoleLabel::Infinity => -1,
                own if own == label => 1,
                _ => 0,
            };
            let got = self.path.winding_number(pole)?;
            if got != want {
                return Err(Error::PathPlanning(format!(
                    "loop {:?} winds {got} times around {label:?}, wants {want}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

fn finite_labels(t: &PoleConfig) -> [(PoleLabel, C64); 5] {
    let [t1, t2, t3] = t.t();
    [
        (PoleLabel::Zero, c64(0.0, 0.0)),
        (PoleLabel::One, c64(1.0, 0.0)),
        (PoleLabel::T1, t1),
        (PoleLabel::T2, t2),
        (PoleLabel::T3, t3),
    ]
}

/// Plans the six standard loops from the basepoint: five finite loops
/// ordered by increasing argument of (pole - basepoint), then the loop at
/// infinity as the reversed concatenation of the five. Every segment must
/// clear all poles by the safety distance, or planning fails and the caller
/// must move the basepoint.
pub fn standard_loops(t: &PoleConfig, basepoint: C64) -> Result<Vec<Loop>> {
    let dmin = t.min_pole_separation();
    let radius = LOOP_RADIUS_REL * dmin;
    let safety = SAFETY_REL * dmin;

    let mut ordered = finite_labels(t).to_vec();
    for (_, pole) in &ordered {
        if (basepoint - pole).norm() <= radius {
            return Err(Error::PathPlanning(format!(
                "basepoint {basepoint} sits within the loop circle of pole {pole}"
            )));
        }
    }
    ordered.sort_by(|(_, a), (_, b)| {
        (a - basepoint).arg().total_cmp(&(b - basepoint).arg())
    });

    let mut loops = Vec::with_capacity(6);
    for &(label, pole) in &ordered {
        let dir = (basepoint - pole) / (basepoint - pole).norm();
        let entry = pole + dir * radius;
        let approach = Polyline::new(vec![basepoint, entry])?;
        let circle = Polyline::circle(pole, radius, CIRCLE_SIDES, (basepoint - pole).arg())?;
        let path = approach
            .concat(&circle)?
            .concat(&Polyline::new(vec![entry, basepoint])?)?;
        for (other_label, other) in finite_labels(t) {
            if path.min_distance(other) < safety {
                return Err(Error::PathPlanning(format!(
                    "loop around {label:?} passes within {safety:.3e} of {other_label:?}"
                )));
            }
        }
        loops.push(Loop {
            label,
            basepoint,
            path,
        });
    }

    // gamma_inf = (gamma_{g1} ... gamma_{g5})^{-1}: traverse the loops in
    // reverse order, each reversed.
    let mut inf_path = loops[4].path.reversed();
    for l in loops[..4].iter().rev() {
        inf_path = inf_path.concat(&l.path.reversed())?;
    }
    loops.push(Loop {
        label: PoleLabel::Infinity,
        basepoint,
        path: inf_path,
    });

    for l in &loops {
        l.verify_winding(t)?;
    }
    Ok(loops)
}

/// A monodromy representation: the six transport matrices in label order
/// (0, 1, t1, t2, t3, infinity), the geometric composition order realizing
/// the product relation, and the achieved defects.
#[derive(Clone, Debug)]
pub struct MonodromyRep {
    matrices: [Matrix2; 6],
    geometric_order: [PoleLabel; 6],
    basepoint: C64,
    tol: f64,
    product_defect: f64,
}

impl MonodromyRep {
    /// Assembles and validates a representation: |tr M_j| < 1e-6,
    /// |det M_j + 1| < 1e-8, and the product over the geometric order
    /// within 1e-6 of the identity.
    pub fn from_parts(
        matrices: [Matrix2; 6],
        geometric_order: [PoleLabel; 6],
        basepoint: C64,
        tol: f64,
    ) -> Result<Self> {
        for (j, m) in matrices.iter().enumerate() {
            let tr = m.trace().norm();
            if tr >= TRACE_TOL {
                return Err(Error::SelfTest {
                    what: "monodromy trace",
                    defect: tr,
                    tol: TRACE_TOL,
                });
            }
            let dd = (m.det() + c64(1.0, 0.0)).norm();
            if dd >= DET_TOL {
                return Err(Error::SelfTest {
                    what: "monodromy determinant",
                    defect: dd,
                    tol: DET_TOL,
                });
            }
            debug_assert!(j < 6);
        }
        let mut prod = Matrix2::identity();
        let mut rep = Self {
            matrices,
            geometric_order,
            basepoint,
            tol,
            product_defect: 0.0,
        };
        for label in geometric_order {
            prod = rep.matrix(label) * prod;
        }
        let defect = prod.distance(&Matrix2::identity());
        if defect >= PRODUCT_TOL {
            return Err(Error::SelfTest {
                what: "ordered product",
                defect,
                tol: PRODUCT_TOL,
            });
        }
        rep.product_defect = defect;
        Ok(rep)
    }

    /// The matrix of the given pole's loop.
    pub fn matrix(&self, label: PoleLabel) -> Matrix2 {
        let idx = PoleLabel::ALL.iter().position(|l| *l == label).unwrap();
        self.matrices[idx]
    }

    /// All six matrices in label order (0, 1, t1, t2, t3, infinity).
    pub fn matrices(&self) -> &[Matrix2; 6] {
        &self.matrices
    }

    pub fn geometric_order(&self) -> &[PoleLabel; 6] {
        &self.geometric_order
    }

    pub fn basepoint(&self) -> C64 {
        self.basepoint
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Achieved distance of the ordered product from the identity.
    pub fn product_defect(&self) -> f64 {
        self.product_defect
    }
}

/// Transports the system around each loop and assembles the validated
/// representation. Loops must cover the six labels exactly once.
pub fn fuchsian_monodromy(
    sys: &FuchsianSystem,
    loops: &[Loop],
    rtol: f64,
) -> Result<MonodromyRep> {
    if loops.len() != 6 {
        return Err(Error::DegenerateInput("expected exactly six loops"));
    }
    let mut matrices = [Matrix2::identity(); 6];
    let mut seen = [false; 6];
    let mut geometric = [PoleLabel::Infinity; 6];
    for (k, l) in loops.iter().enumerate() {
        let idx = PoleLabel::ALL.iter().position(|lab| *lab == l.label()).unwrap();
        if seen[idx] {
            return Err(Error::DegenerateInput("duplicate loop label"));
        }
        seen[idx] = true;
        geometric[k] = l.label();
        let transport = integrate_transport(
            |x| sys.connection_coefficient(x),
            l.path(),
            rtol,
        )?;
        matrices[idx] = transport.matrix;
    }
    MonodromyRep::from_parts(matrices, geometric, loops[0].basepoint(), rtol)
}

/// Traces of even-length words over the representation, each word read as
/// a path composition (first letter first). Word letters index the label
/// order. Every product is checked to land in SL2.
pub fn even_word_traces<W: AsRef<[usize]>>(
    rep: &MonodromyRep,
    words: &[W],
) -> Result<Vec<C64>> {
    let mut traces = Vec::with_capacity(words.len());
    for w in words {
        let w = w.as_ref();
        if w.len() % 2 != 0 {
            return Err(Error::OddWord(w.len()));
        }
        let mut prod = Matrix2::identity();
        for &idx in w {
            if idx >= 6 {
                return Err(Error::DegenerateInput("word letter outside 0..=5"));
            }
            prod = rep.matrices[idx] * prod;
        }
        let dd = (prod.det() - c64(1.0, 0.0)).norm();
        if dd >= DET_TOL {
            return Err(Error::SelfTest {
                what: "even-word determinant",
                defect: dd,
                tol: DET_TOL,
            });
        }
        traces.push(prod.trace());
    }
    Ok(traces)
}

/// Fubini-Study distance between the projective points of two nonzero
/// vectors: the sine of the angle between the lines.
fn fs_distance(u: (C64, C64), v: (C64, C64)) -> f64 {
    let nu = u.0.norm_sqr() + u.1.norm_sqr();
    let nv = v.0.norm_sqr() + v.1.norm_sqr();
    let inner = u.0.conj() * v.0 + u.1.conj() * v.1;
    (1.0 - inner.norm_sqr() / (nu * nv)).max(0.0).sqrt()
}

/// How far the representation is from having an invariant line: the
/// minimum over the eigendirections v of the first non-central matrix of
/// the maximal Fubini-Study displacement of [v] by the other matrices.
pub fn invariant_line_defect(rep: &MonodromyRep) -> Result<f64> {
    let id = Matrix2::identity();
    let minus_id = id * c64(-1.0, 0.0);
    let central_tol = 1e-8;
    let pivot = rep
        .matrices
        .iter()
        .copied()
        .find(|m| m.distance(&id) > central_tol && m.distance(&minus_id) > central_tol)
        .ok_or(Error::CentralRepresentation)?;
    let (l1, l2) = pivot.eigenvalues();
    let mut defect = f64::INFINITY;
    for lambda in [l1, l2] {
        let v = match pivot.eigenvector(lambda) {
            Some(v) => v,
            None => continue,
        };
        let moved = rep
            .matrices
            .iter()
            .map(|m| fs_distance(m.mul_vec(v), v))
            .fold(0.0, f64::max);
        defect = defect.min(moved);
    }
    if defect.is_infinite() {
        return Err(Error::CentralRepresentation);
    }
    Ok(defect)
}

/// Whether the representation has no invariant line at the given
/// Fubini-Study tolerance.
pub fn is_irreducible(rep: &MonodromyRep, tol: f64) -> Result<bool> {
    Ok(invariant_line_defect(rep)? > tol)
}

/// Result of a direct continuation on the genus-2 curve.
#[derive(Clone, Debug)]
pub struct HyperellipticTransport {
    /// Transport matrix: solutions propagate as Y(end) = B Y(start).
    pub matrix: Matrix2,
    /// Final sheet sign relative to the principal square root at the end.
    pub sheet: i8,
    pub stats: OdeStats,
}

/// Transports the normal-form system along an x-path on the curve,
/// starting on the given sheet (the sign of y against the principal square
/// root of F at the start). The sheet is continued by nearest-root
/// selection at every accepted step; the step is capped so consecutive
/// candidates stay separated by an order of magnitude more than the
/// step-induced drift. Paths within the safety margin of a branch point
/// are refused.
pub fn hyperelliptic_continuation(
    sys: &Genus2System,
    x_path: &Polyline,
    sheet0: i8,
    rtol: f64,
) -> Result<HyperellipticTransport> {
    if sheet0 != 1 && sheet0 != -1 {
        return Err(Error::DegenerateInput("sheet must be +1 or -1"));
    }
    let f = sys.poles().curve_poly();
    let fp = f.derivative();
    let branch = {
        let [t1, t2, t3] = sys.poles().t();
        [c64(0.0, 0.0), c64(1.0, 0.0), t1, t2, t3]
    };
    let margin = BRANCH_MARGIN_REL * sys.poles().min_pole_separation();
    for w in branch {
        let dist = x_path.min_distance(w);
        if dist < margin {
            return Err(Error::BranchApproach { dist, margin });
        }
    }

    let (b0, b1) = sys.beta();
    let (g0, g1) = sys.gamma();
    let y_cell = Cell::new(f.eval(x_path.start()).sqrt() * f64::from(sheet0));

    let opts = OdeOptions::with_rtol(rtol);
    let mut total = Matrix2::identity();
    let mut stats = OdeStats::default();
    for (a, b) in x_path.segments() {
        let d = b - a;
        if d.norm() == 0.0 {
            continue;
        }
        let continued_y = |x: C64| -> C64 {
            let s = f.eval(x).sqrt();
            let prev = y_cell.get();
            if (s - prev).norm() <= (s + prev).norm() {
                s
            } else {
                -s
            }
        };
        let rhs = |u: f64, y: &[C64; 4]| -> Result<[C64; 4]> {
            let x = a + d * u;
            let yx = continued_y(x);
            if yx.norm() == 0.0 {
                return Err(Error::EvaluationFailure { x });
            }
            let bb = (b1 * x + b0) / yx;
            let cc = (g1 * x + g0) / yx;
            // Y' = -A Y with A = [[0, bb], [cc, 0]], times dx/du.
            Ok([
                -(bb * y[2]) * d,
                -(bb * y[3]) * d,
                -(cc * y[0]) * d,
                -(cc * y[1]) * d,
            ])
        };
        let on_accept = |u: f64, _: &[C64; 4]| -> Result<f64> {
            let x = a + d * u;
            y_cell.set(continued_y(x));
            let dist = branch
                .iter()
                .map(|w| (x - w).norm())
                .fold(f64::INFINITY, f64::min);
            if dist < margin {
                return Err(Error::BranchApproach { dist, margin });
            }
            // Keep |dx| below both a fraction of the branch distance and
            // the drift bound 0.4 |F| / |F'| that keeps the two square
            // roots ten times farther apart than one step can move y.
            let drift_cap = 0.4 * f.eval(x).norm() / fp.eval(x).norm().max(f64::MIN_POSITIVE);
            Ok((BRANCH_MARGIN_REL * dist).min(drift_cap) / d.norm())
        };
        let y0 = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)];
        let (y, seg_stats) = integrate_ode(rhs, 0.0, 1.0, y0, &opts, on_accept)?;
        stats.absorb(seg_stats);
        total = Matrix2::new(y[0], y[1], y[2], y[3]) * total;
    }

    let det_defect = (total.det() - c64(1.0, 0.0)).norm();
    let det_tol = (100.0 * rtol).max(1e-8);
    if det_defect >= det_tol {
        return Err(Error::SelfTest {
            what: "hyperelliptic transport determinant",
            defect: det_defect,
            tol: det_tol,
        });
    }
    let s_end = f.eval(x_path.end()).sqrt();
    let yf = y_cell.get();
    let sheet = if (yf - s_end).norm() <= (yf + s_end).norm() {
        1
    } else {
        -1
    };
    Ok(HyperellipticTransport {
        matrix: total,
        sheet,
        stats,
    })
}

/// The trace vector of a quadratic differential: section to a Sigma point
/// (first root convention), Fuchsian monodromy over the standard loops at
/// the default basepoint, then the even-word traces.
pub fn rh_trace_map<W: AsRef<[usize]>>(
    t: &PoleConfig,
    nu: &QuadraticDifferential,
    words: &[W],
    rtol: f64,
) -> Result<Vec<C64>> {
    let scale = nu.scale();
    let disc = nu.discriminant().norm();
    if disc <= 1e-9 * scale * scale {
        return Err(Error::ReducibleDeterminant {
            magnitude: disc / (scale * scale).max(f64::MIN_POSITIVE),
        });
    }
    let (z, c) = section_phi(t, nu, RootChoice::First)?;
    let sys = FuchsianSystem::new(*t, [z, z, z], c);
    let loops = standard_loops(t, default_basepoint(t))?;
    let rep = fuchsian_monodromy(&sys, &loops, rtol)?;
    even_word_traces(&rep, words)
}

/// The finite-difference Jacobian of the trace map in the six parameters
/// (t1, t2, t3, nu0, nu1, nu2), with its singular values and numerical
/// rank at the relative cutoff [`RANK_REL`].
#[derive(Clone, Debug)]
pub struct RhJacobian {
    /// Rows indexed by word, columns by parameter.
    pub jacobian: Vec<Vec<C64>>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Differentiates the trace map at (t, nu) with step h (callers scale h to
/// about 1e-4 of the parameter magnitude; the trace noise floor is the
/// integrator tolerance). Needs at least seven words so that rank six is
/// a strict submaximum of the row count.
pub fn rh_jacobian_rank<W: AsRef<[usize]>>(
    t: &PoleConfig,
    nu: &QuadraticDifferential,
    words: &[W],
    h: f64,
    rtol: f64,
) -> Result<RhJacobian> {
    if words.len() < 7 {
        return Err(Error::DegenerateInput("need at least seven trace words"));
    }
    let [t1, t2, t3] = t.t();
    let x0 = [t1, t2, t3, nu.nu0, nu.nu1, nu.nu2];
    let f = |x: &[C64]| -> Result<Vec<C64>> {
        let poles = PoleConfig::new(x[0], x[1], x[2])?;
        let nu = QuadraticDifferential::new(x[3], x[4], x[5]);
        rh_trace_map(&poles, &nu, words, rtol)
    };
    let jacobian = jacobian_fd(f, &x0, h)?;
    let (rank, singular_values) = rank_svd(&jacobian, RANK_REL)?;
    Ok(RhJacobian {
        jacobian,
        rank,
        singular_values,
    })
}
