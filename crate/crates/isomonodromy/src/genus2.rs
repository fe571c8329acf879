//! Genus-2 systems in normal form on the hyperelliptic curve
//! y^2 = x(x-1)(x-t1)(x-t2)(x-t3): the determinant map to quadratic
//! differentials, reducibility tests, the explicit lift of a Sigma point
//! and its section, and the Riccati-foliation geometry (tangency divisors,
//! the twelve special fibers, self-intersection arithmetic).
//!
//! A system is the off-diagonal matrix of 1-forms with entries
//! beta = (beta1 x + beta0) dx/y and gamma = (gamma1 x + gamma0) dx/y.
//! Its determinant is the quadratic differential
//! nu(x) dx^2 / F(x) with nu(x) = -(beta1 x + beta0)(gamma1 x + gamma0),
//! and the system is reducible exactly when beta0 gamma1 - beta1 gamma0
//! vanishes, equivalently when the discriminant nu1^2 - 4 nu0 nu2 does.
//!
//! Projectivization convention: with y = y1/y2 the Riccati equation reads
//! dy = gamma y^2 - beta, so the tangency form at height p is
//! gamma p^2 - beta. Points over x = infinity live on the odd-degree model,
//! which has a single Weierstrass point there where dx/y has a double zero.

use crate::darboux::q_quantities;
use crate::error::{Error, Result};
use crate::fuchsian::PoleConfig;
use crate::numkit::{c64, poly_roots, ComplexPoly, C64};

/// Hard refusal threshold for the degenerate strata of section_phi.
pub const DEGENERACY_REL: f64 = 1e-9;

/// Relative tolerance for recognizing a tangency base point as Weierstrass.
pub const WEIERSTRASS_REL: f64 = 1e-9;

/// A rank-2 system in normal form over the genus-2 curve attached to the
/// pole configuration. Both rows are required to be nontrivial: the type
/// refuses beta = 0 or gamma = 0 identically.
#[derive(Clone, Copy, Debug)]
pub struct Genus2System {
    poles: PoleConfig,
    beta0: C64,
    beta1: C64,
    gamma0: C64,
    gamma1: C64,
}

impl Genus2System {
    pub fn new(poles: PoleConfig, beta: (C64, C64), gamma: (C64, C64)) -> Result<Self> {
        if beta.0.norm() + beta.1.norm() == 0.0 {
            return Err(Error::DegenerateInput("beta vanishes identically"));
        }
        if gamma.0.norm() + gamma.1.norm() == 0.0 {
            return Err(Error::DegenerateInput("gamma vanishes identically"));
        }
        Ok(Self {
            poles,
            beta0: beta.0,
            beta1: beta.1,
            gamma0: gamma.0,
            gamma1: gamma.1,
        })
    }

    pub fn poles(&self) -> &PoleConfig {
        &self.poles
    }

    /// Coefficients (beta0, beta1) of beta = (beta1 x + beta0) dx/y.
    pub fn beta(&self) -> (C64, C64) {
        (self.beta0, self.beta1)
    }

    /// Coefficients (gamma0, gamma1) of gamma = (gamma1 x + gamma0) dx/y.
    pub fn gamma(&self) -> (C64, C64) {
        (self.gamma0, self.gamma1)
    }

    /// beta0 gamma1 - beta1 gamma0; the system is reducible iff this is 0.
    pub fn reducibility_determinant(&self) -> C64 {
        self.beta0 * self.gamma1 - self.beta1 * self.gamma0
    }

    pub fn is_reducible(&self, tol: f64) -> bool {
        let scale = (self.beta0.norm() + self.beta1.norm())
            * (self.gamma0.norm() + self.gamma1.norm());
        self.reducibility_determinant().norm() <= tol * scale
    }
}

/// A quadratic differential (nu2 x^2 + nu1 x + nu0) dx^2 / F(x) on the
/// curve; the coefficient chart is all of C^3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticDifferential {
    pub nu0: C64,
    pub nu1: C64,
    pub nu2: C64,
}

impl QuadraticDifferential {
    pub fn new(nu0: C64, nu1: C64, nu2: C64) -> Self {
        Self { nu0, nu1, nu2 }
    }

    pub fn discriminant(&self) -> C64 {
        self.nu1 * self.nu1 - self.nu0 * self.nu2 * 4.0
    }

    pub fn scale(&self) -> f64 {
        self.nu0.norm().max(self.nu1.norm()).max(self.nu2.norm())
    }

    pub fn eval(&self, x: C64) -> C64 {
        (self.nu2 * x + self.nu1) * x + self.nu0
    }
}

/// The determinant of the system as a quadratic differential:
/// nu(x) = -(beta1 x + beta0)(gamma1 x + gamma0).
pub fn det_quadratic(sys: &Genus2System) -> QuadraticDifferential {
    let (b0, b1) = sys.beta();
    let (g0, g1) = sys.gamma();
    QuadraticDifferential::new(-b0 * g0, -(b1 * g0 + b0 * g1), -b1 * g1)
}

/// Whether the quadratic differential is the determinant of a reducible
/// system: the discriminant nu1^2 - 4 nu0 nu2 vanishes at the given
/// relative tolerance (it equals (beta0 gamma1 - beta1 gamma0)^2).
pub fn is_reducible_nu(nu: &QuadraticDifferential, tol: f64) -> bool {
    let scale = nu.scale();
    if scale == 0.0 {
        return true;
    }
    nu.discriminant().norm() < tol * scale * scale
}

/// The lift of the Sigma point (z, c) with sum(c) = 0 to a genus-2 system
/// in normal form: beta from b(x) = ((2z - 1) x - z)/2 and gamma from
/// c(x) = -Qinf x - Q0.
pub fn phi_lift(t: &PoleConfig, z: C64, c: [C64; 3]) -> Result<Genus2System> {
    let sum = c[0] + c[1] + c[2];
    let cscale: f64 = c.iter().map(|v| v.norm()).sum();
    let tol = 1e-10 * cscale.max(1.0);
    if sum.norm() > tol {
        return Err(Error::NotInSigma {
            defect: sum.norm(),
            tol,
        });
    }
    let (q0, _, qinf) = q_quantities(t, c);
    let half = c64(0.5, 0.0);
    Genus2System::new(*t, (-z * half, z - half), (-q0, -qinf))
}

/// Which root of nu (in the lexicographic (re, im) order) plays x_beta in
/// the section; the other becomes x_gamma. The two choices are the two
/// sheets of the double cover of quadratic differentials by Sigma.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootChoice {
    First,
    Second,
}

/// The explicit preimage of a quadratic differential under the lift:
/// with nu(x) = nu2 (x - x_beta)(x - x_gamma),
///
///   z = x_beta / (2 x_beta - 1),
///   c_i = 2 nu2 (t_i - x_gamma)(2 x_beta - 1) / ((t_i - t_j)(t_i - t_k)).
///
/// Refuses nu2 ~ 0 (a root at infinity) and x_beta ~ 1/2 (the lift's
/// beta-row cannot place its zero there).
pub fn section_phi(
    t: &PoleConfig,
    nu: &QuadraticDifferential,
    root_choice: RootChoice,
) -> Result<(C64, [C64; 3])> {
    let scale = nu.scale();
    if nu.nu2.norm() <= DEGENERACY_REL * scale {
        return Err(Error::RootAtInfinity {
            magnitude: nu.nu2.norm() / scale.max(f64::MIN_POSITIVE),
        });
    }
    let quad = ComplexPoly::new(vec![nu.nu0, nu.nu1, nu.nu2]);
    let mut roots = poly_roots(&quad)?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let (x_beta, x_gamma) = match root_choice {
        RootChoice::First => (roots[0], roots[1]),
        RootChoice::Second => (roots[1], roots[0]),
    };
    let two_xb = x_beta * 2.0 - c64(1.0, 0.0);
    let xb_scale = x_beta.norm().max(1.0);
    if two_xb.norm() <= DEGENERACY_REL * xb_scale {
        return Err(Error::ExceptionalDecomposition {
            magnitude: two_xb.norm() / xb_scale,
        });
    }
    let z = x_beta / two_xb;
    let [t1, t2, t3] = t.t();
    let ts = [t1, t2, t3];
    let mut c = [c64(0.0, 0.0); 3];
    for i in 0..3 {
        let tj = ts[(i + 1) % 3];
        let tk = ts[(i + 2) % 3];
        c[i] = nu.nu2 * (ts[i] - x_gamma) * two_xb * 2.0 / ((ts[i] - tj) * (ts[i] - tk));
    }
    Ok((z, c))
}

/// A height for the Riccati fibration: a finite value of y1/y2 or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Height {
    Finite(C64),
    Infinity,
}

/// A point of the tangency divisor of the horizontal section at some
/// height with the Riccati foliation. The divisor always has total
/// multiplicity 2.
#[derive(Clone, Copy, Debug)]
pub enum Tangency {
    /// A simple zero over a non-Weierstrass x; its mirror (x, -y) is
    /// reported as a separate entry.
    Simple { x: C64, y: C64 },
    /// A double zero at a finite Weierstrass point (y = 0).
    DoubleWeierstrass { x: C64 },
    /// A double zero at the infinite Weierstrass point.
    DoubleAtInfinity,
}

impl Tangency {
    pub fn multiplicity(&self) -> u32 {
        match self {
            Tangency::Simple { .. } => 1,
            Tangency::DoubleWeierstrass { .. } | Tangency::DoubleAtInfinity => 2,
        }
    }
}

/// Coefficients (a, b) of the tangency 1-form (a x + b) dx/y at a height.
/// At infinity the form is gamma itself (the u = 1/y chart gives
/// du = -gamma + beta u^2).
fn tangency_coefficients(sys: &Genus2System, p: Height) -> (C64, C64, f64, f64) {
    let (b0, b1) = sys.beta();
    let (g0, g1) = sys.gamma();
    match p {
        Height::Finite(p) => {
            let p2 = p * p;
            let a = g1 * p2 - b1;
            let b = g0 * p2 - b0;
            let sa = g1.norm() * p2.norm() + b1.norm();
            let sb = g0.norm() * p2.norm() + b0.norm();
            (a, b, sa, sb)
        }
        Height::Infinity => (g1, g0, g1.norm(), g0.norm()),
    }
}

/// The tangency divisor of the height-p horizontal section with the
/// Riccati foliation: the zeros on the curve of the holomorphic form
/// ((gamma1 p^2 - beta1) x + gamma0 p^2 - beta0) dx/y, total multiplicity
/// 2. Expects an irreducible system; an identically vanishing form (which
/// forces reducibility) is refused.
pub fn tangency_points(sys: &Genus2System, p: Height) -> Result<Vec<Tangency>> {
    let (a, b, sa, sb) = tangency_coefficients(sys, p);
    let a_zero = a.norm() <= 1e-12 * sa.max(f64::MIN_POSITIVE);
    let b_zero = b.norm() <= 1e-12 * sb.max(f64::MIN_POSITIVE);
    if a_zero && b_zero {
        return Err(Error::InvariantHorizontal);
    }
    if a_zero {
        // Constant multiple of dx/y: its divisor is twice the infinite
        // Weierstrass point of the odd-degree model.
        return Ok(vec![Tangency::DoubleAtInfinity]);
    }
    let x = -b / a;
    let [t1, t2, t3] = sys.poles().t();
    for w in [c64(0.0, 0.0), c64(1.0, 0.0), t1, t2, t3] {
        if (x - w).norm() <= WEIERSTRASS_REL * x.norm().max(w.norm()).max(1.0) {
            return Ok(vec![Tangency::DoubleWeierstrass { x }]);
        }
    }
    let y = sys.poles().curve_poly().eval(x).sqrt();
    Ok(vec![
        Tangency::Simple { x, y },
        Tangency::Simple { x, y: -y },
    ])
}

/// One of the twelve heights whose horizontal section is tangent to the
/// foliation at a Weierstrass point: the quadratic in p attached to the
/// Weierstrass value w, counted projectively.
#[derive(Clone, Copy, Debug)]
pub struct SpecialFiber {
    /// The Weierstrass value of x at which the tangency sits.
    pub w: Height,
    /// The height of the special horizontal section.
    pub p: Height,
    /// Root multiplicity within the quadratic for this w (1 or 2).
    pub multiplicity: u32,
}

/// The twelve special heights, counted with multiplicity. For each
/// Weierstrass value w the tangency base point hits w when
/// (gamma1 w + gamma0) p^2 = beta1 w + beta0 (for w = infinity:
/// gamma1 p^2 = beta1); each quadratic contributes 2 projective roots, for
/// a total of exactly 12. Reducible systems collapse the count and are
/// refused.
pub fn twelve_special_fibers(sys: &Genus2System) -> Result<Vec<SpecialFiber>> {
    if sys.is_reducible(DEGENERACY_REL) {
        return Err(Error::DegreeCollapse);
    }
    let (b0, b1) = sys.beta();
    let (g0, g1) = sys.gamma();
    let [t1, t2, t3] = sys.poles().t();
    let mut rows: Vec<(Height, C64, C64)> = vec![(Height::Infinity, g1, b1)];
    for w in [c64(0.0, 0.0), c64(1.0, 0.0), t1, t2, t3] {
        rows.push((Height::Finite(w), g1 * w + g0, b1 * w + b0));
    }
    let mut fibers = Vec::with_capacity(12);
    for (w, a, b) in rows {
        let scale = a.norm().max(b.norm());
        if scale == 0.0 {
            return Err(Error::DegreeCollapse);
        }
        if a.norm() <= 1e-12 * scale {
            fibers.push(SpecialFiber {
                w,
                p: Height::Infinity,
                multiplicity: 2,
            });
        } else if b.norm() <= 1e-12 * scale {
            fibers.push(SpecialFiber {
                w,
                p: Height::Finite(c64(0.0, 0.0)),
                multiplicity: 2,
            });
        } else {
            let r = (b / a).sqrt();
            fibers.push(SpecialFiber {
                w,
                p: Height::Finite(r),
                multiplicity: 1,
            });
            fibers.push(SpecialFiber {
                w,
                p: Height::Finite(-r),
                multiplicity: 1,
            });
        }
    }
    debug_assert_eq!(fibers.iter().map(|f| f.multiplicity).sum::<u32>(), 12);
    Ok(fibers)
}

/// The self-intersection arithmetic of the lifted leaf. The tangency
/// curve projects 2:1 to the curve, giving c1(L) = 4; the branch count
/// B sums e_p - 1 over the special heights grouped by value; then
/// c1(det E) = 4 - B/2 and the self-intersection is c1(det E) - 2.
#[derive(Clone, Copy, Debug)]
pub struct SelfIntersection {
    /// c1 of the tangency line bundle (4 for the normal form).
    pub c1_line: i64,
    /// Sum of (e_p - 1) over branch heights; 12 on the generic stratum.
    pub branch_count: i64,
    /// c1 of the determinant bundle, 4 - B/2.
    pub c1_det: i64,
    /// The self-intersection number, c1_det - 2.
    pub value: i64,
    /// Set when some branch height carries multiplicity above 1; the
    /// arithmetic is reported as computed but the stratum is not generic.
    pub non_generic: bool,
}

/// Computes the self-intersection number of the lifted system's leaf from
/// the twelve special fibers: -4 on the generic stratum, flagged otherwise.
pub fn self_intersection(sys: &Genus2System) -> Result<SelfIntersection> {
    let fibers = twelve_special_fibers(sys)?;
    let pscale = fibers
        .iter()
        .filter_map(|f| match f.p {
            Height::Finite(v) => Some(v.norm()),
            Height::Infinity => None,
        })
        .fold(1.0, f64::max);
    // Group heights by value; each group of total multiplicity m is one
    // branch height with e_p - 1 = m.
    let mut groups: Vec<(Height, u32)> = Vec::new();
    for f in &fibers {
        let mut merged = false;
        for (h, m) in groups.iter_mut() {
            let same = match (*h, f.p) {
                (Height::Infinity, Height::Infinity) => true,
                (Height::Finite(u), Height::Finite(v)) => {
                    (u - v).norm() <= 1e-9 * pscale
                }
                _ => false,
            };
            if same {
                *m += f.multiplicity;
                merged = true;
                break;
            }
        }
        if !merged {
            groups.push((f.p, f.multiplicity));
        }
    }
    let branch_count: i64 = groups.iter().map(|(_, m)| i64::from(*m)).sum();
    let non_generic = groups.iter().any(|(_, m)| *m > 1);
    let c1_det = 4 - branch_count / 2;
    Ok(SelfIntersection {
        c1_line: 4,
        branch_count,
        c1_det,
        value: c1_det - 2,
        non_generic,
    })
}
