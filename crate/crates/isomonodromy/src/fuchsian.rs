//! Rank-2 Fuchsian systems on the projective line with poles
//! {0, 1, t1, t2, t3, infinity}.
//!
//! The moduli chart is all of C^6 in the coordinates (z1, z2, z3, c1, c2, c3):
//! the system is the two-parameter pencil nabla_0 + c1 Theta_1 + c2 Theta_2 +
//! c3 Theta_3 of logarithmic connections d + A(x) dx with spectral data
//! {0, -1/2} at 0, 1, infinity and {0, +1/2} at t1, t2, t3. This module
//! evaluates A(x), extracts residues and eigendirections, and tests
//! membership in the locus Sigma = {z1 = z2 = z3, c1 + c2 + c3 = 0} whose
//! points lift to holomorphic systems on the genus-2 curve
//! y^2 = x(x-1)(x-t1)(x-t2)(x-t3).

use crate::error::{Error, Result};
use crate::numkit::{c64, C64, ComplexPoly, Matrix2};

/// Relative floor below which two poles are considered to have collided.
const POLE_COLLISION_REL: f64 = 1e-12;

/// A point t = (t1, t2, t3) of the parameter space T of genus-2 curves:
/// each t_i avoids {0, 1} and the t_i are pairwise distinct.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleConfig {
    t: [C64; 3],
}

impl PoleConfig {
    /// Validates membership in T. Near-collisions (within `1e-12` of the
    /// scale of the configuration) are rejected along with exact ones, since
    /// downstream rational expressions lose all significance there.
    pub fn new(t1: C64, t2: C64, t3: C64) -> Result<Self> {
        let t = [t1, t2, t3];
        if t.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidPoleConfig("non-finite pole".into()));
        }
        let scale = t.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let guard = POLE_COLLISION_REL * scale;
        for (i, &ti) in t.iter().enumerate() {
            if ti.norm() <= guard || (ti - c64(1.0, 0.0)).norm() <= guard {
                return Err(Error::InvalidPoleConfig(format!(
                    "t{} = {ti} too close to {{0, 1}}",
                    i + 1
                )));
            }
            for (j, &tj) in t.iter().enumerate().skip(i + 1) {
                if (ti - tj).norm() <= guard {
                    return Err(Error::InvalidPoleConfig(format!(
                        "t{} = {ti} collides with t{} = {tj}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> [C64; 3] {
        self.t
    }

    pub fn t1(&self) -> C64 {
        self.t[0]
    }

    pub fn t2(&self) -> C64 {
        self.t[1]
    }

    pub fn t3(&self) -> C64 {
        self.t[2]
    }

    /// The five finite poles 0, 1, t1, t2, t3 in label order.
    pub fn finite_poles(&self) -> [C64; 5] {
        [c64(0.0, 0.0), c64(1.0, 0.0), self.t[0], self.t[1], self.t[2]]
    }

    /// Minimum pairwise distance among the five finite poles.
    pub fn min_pole_separation(&self) -> f64 {
        let p = self.finite_poles();
        let mut d = f64::INFINITY;
        for i in 0..5 {
            for j in (i + 1)..5 {
                d = d.min((p[i] - p[j]).norm());
            }
        }
        d
    }

    /// The curve quintic F(x) = x(x-1)(x-t1)(x-t2)(x-t3).
    pub fn curve_poly(&self) -> ComplexPoly {
        ComplexPoly::from_roots(&self.finite_poles())
    }
}

/// Symbolic pole labels, so that dispatch never compares floating-point pole
/// positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PoleLabel {
    Zero,
    One,
    T1,
    T2,
    T3,
    Infinity,
}

impl PoleLabel {
    pub const ALL: [PoleLabel; 6] = [
        PoleLabel::Zero,
        PoleLabel::One,
        PoleLabel::T1,
        PoleLabel::T2,
        PoleLabel::T3,
        PoleLabel::Infinity,
    ];

    /// Position in the x-chart; `None` for the pole at infinity.
    pub fn position(&self, poles: &PoleConfig) -> Option<C64> {
        match self {
            PoleLabel::Zero => Some(c64(0.0, 0.0)),
            PoleLabel::One => Some(c64(1.0, 0.0)),
            PoleLabel::T1 => Some(poles.t1()),
            PoleLabel::T2 => Some(poles.t2()),
            PoleLabel::T3 => Some(poles.t3()),
            PoleLabel::Infinity => None,
        }
    }

    /// The nonzero local exponent: -1/2 at 0, 1, infinity and +1/2 at t_i.
    pub fn nonzero_eigenvalue(&self) -> C64 {
        match self {
            PoleLabel::Zero | PoleLabel::One | PoleLabel::Infinity => c64(-0.5, 0.0),
            _ => c64(0.5, 0.0),
        }
    }
}

/// Which of the two simple residue eigenvalues an eigendirection query
/// refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenvalueChoice {
    Zero,
    /// The nonzero exponent (-1/2 or +1/2 depending on the pole).
    NonZero,
}

/// An eigendirection of a residue matrix, as a projective point [u : v].
#[derive(Clone, Copy, Debug)]
pub struct Eigendirection {
    pub dir: [C64; 2],
    pub eigenvalue: C64,
    /// Set when the printed normalization [* : 1] degenerates and the
    /// direction is the chart-infinity point [1 : 0].
    pub at_chart_infinity: bool,
}

/// Result of a Sigma-membership test, with the auxiliary quantities Q that
/// control the reducibility of the lifted system.
#[derive(Clone, Copy, Debug)]
pub struct SigmaMembership {
    pub in_sigma: bool,
    /// max(|z1 - z2|, |z2 - z3|, |c1 + c2 + c3|).
    pub defect: f64,
    /// Q0 = t2 t3 c1 + t1 t3 c2 + t1 t2 c3.
    pub q0: C64,
    /// Q1 = Q0 + Qinf.
    pub q1: C64,
    /// Qinf = t1 c1 + t2 c2 + t3 c3.
    pub qinf: C64,
    /// Q0 z + Q1 (z - 1) + Qinf with z = z1; the lifted system on the genus-2
    /// curve is reducible exactly where this vanishes. Meaningful only when
    /// `in_sigma`.
    pub reducible_residual: C64,
}

/// A point of the moduli chart C^6 of Fuchsian systems over a fixed t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FuchsianSystem {
    pub poles: PoleConfig,
    pub z: [C64; 3],
    pub c: [C64; 3],
}

impl FuchsianSystem {
    pub fn new(poles: PoleConfig, z: [C64; 3], c: [C64; 3]) -> Self {
        Self { poles, z, c }
    }

    /// sum c_i (1 - z_i): the (2,1) entry of the residue at x = 0.
    fn s0(&self) -> C64 {
        (0..3).map(|i| self.c[i] * (c64(1.0, 0.0) - self.z[i])).sum()
    }

    /// sum c_i z_i: the pencil part of the residue at x = 1.
    fn s1(&self) -> C64 {
        (0..3).map(|i| self.c[i] * self.z[i]).sum()
    }

    /// Residue matrix of A(x) dx at the labeled pole.
    ///
    /// The residue at infinity is minus the sum of the five finite residues
    /// (the total residue of A(x) dx on the sphere vanishes).
    pub fn residue(&self, pole: PoleLabel) -> Matrix2 {
        let zero = c64(0.0, 0.0);
        match pole {
            PoleLabel::Zero => Matrix2::new(zero, zero, self.s0(), c64(-0.5, 0.0)),
            PoleLabel::One => {
                let s1 = self.s1();
                let d = c64(-0.5, 0.0) - s1;
                Matrix2::new(s1, d, s1, d)
            }
            PoleLabel::T1 | PoleLabel::T2 | PoleLabel::T3 => {
                let i = match pole {
                    PoleLabel::T1 => 0,
                    PoleLabel::T2 => 1,
                    _ => 2,
                };
                let (zi, ci) = (self.z[i], self.c[i]);
                Matrix2::new(
                    -ci * zi,
                    zi * 0.5 + ci * zi * zi,
                    -ci,
                    c64(0.5, 0.0) + ci * zi,
                )
            }
            PoleLabel::Infinity => {
                let mut sum = Matrix2::zero();
                for label in [
                    PoleLabel::Zero,
                    PoleLabel::One,
                    PoleLabel::T1,
                    PoleLabel::T2,
                    PoleLabel::T3,
                ] {
                    sum = sum + self.residue(label);
                }
                -sum
            }
        }
    }

    /// The connection matrix A(x) with nabla = d + A(x) dx, i.e. horizontal
    /// sections solve dY/dx = -A(x) Y.
    pub fn connection_coefficient(&self, x: C64) -> Result<Matrix2> {
        let scale = x.norm().max(1.0);
        let mut a = Matrix2::zero();
        for label in [
            PoleLabel::Zero,
            PoleLabel::One,
            PoleLabel::T1,
            PoleLabel::T2,
            PoleLabel::T3,
        ] {
            let p = label.position(&self.poles).unwrap();
            let d = x - p;
            if d.norm() <= 1e-12 * scale {
                return Err(Error::PoleEvaluation { x });
            }
            a = a + self.residue(label) * (c64(1.0, 0.0) / d);
        }
        Ok(a)
    }

    /// Eigendirection of the residue at `pole` for the chosen eigenvalue.
    ///
    /// The printed normalizations are used where available: [0:1] and [1:1]
    /// for the (-1/2)-directions at 0 and 1, [z_i:1] at t_i, [1:0] for the
    /// 0-direction at infinity, and the closed-form 0-directions at 0 and 1.
    /// The latter two degenerate to the chart-infinity point [1:0] when the
    /// pencil sums 2*sum c_i (1 - z_i), resp. 2*sum c_i z_i, vanish; this is
    /// reported through the `at_chart_infinity` flag rather than an error.
    /// Cases without a printed form fall back to the numerical kernel of the
    /// residue, which is safe because both exponents are simple.
    pub fn eigendirection(
        &self,
        pole: PoleLabel,
        which: EigenvalueChoice,
    ) -> Result<Eigendirection> {
        let one = c64(1.0, 0.0);
        let finite = |dir: [C64; 2], eigenvalue: C64| Eigendirection {
            dir,
            eigenvalue,
            at_chart_infinity: false,
        };
        let chart_scale = |terms: [C64; 3]| terms.iter().map(|v| v.norm()).sum::<f64>();

        let out = match (pole, which) {
            (PoleLabel::Zero, EigenvalueChoice::NonZero) => {
                finite([c64(0.0, 0.0), one], c64(-0.5, 0.0))
            }
            (PoleLabel::One, EigenvalueChoice::NonZero) => finite([one, one], c64(-0.5, 0.0)),
            (PoleLabel::T1, EigenvalueChoice::NonZero) => {
                finite([self.z[0], one], c64(0.5, 0.0))
            }
            (PoleLabel::T2, EigenvalueChoice::NonZero) => {
                finite([self.z[1], one], c64(0.5, 0.0))
            }
            (PoleLabel::T3, EigenvalueChoice::NonZero) => {
                finite([self.z[2], one], c64(0.5, 0.0))
            }
            (PoleLabel::Infinity, EigenvalueChoice::Zero) => {
                finite([one, c64(0.0, 0.0)], c64(0.0, 0.0))
            }
            (PoleLabel::Zero, EigenvalueChoice::Zero) => {
                let s0 = self.s0();
                let scale = chart_scale([
                    self.c[0] * (one - self.z[0]),
                    self.c[1] * (one - self.z[1]),
                    self.c[2] * (one - self.z[2]),
                ]);
                if s0.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
                    Eigendirection {
                        dir: [one, c64(0.0, 0.0)],
                        eigenvalue: c64(0.0, 0.0),
                        at_chart_infinity: true,
                    }
                } else {
                    finite([one / (2.0 * s0), one], c64(0.0, 0.0))
                }
            }
            (PoleLabel::One, EigenvalueChoice::Zero) => {
                let s1 = self.s1();
                let scale = chart_scale([
                    self.c[0] * self.z[0],
                    self.c[1] * self.z[1],
                    self.c[2] * self.z[2],
                ]);
                if s1.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
                    Eigendirection {
                        dir: [one, c64(0.0, 0.0)],
                        eigenvalue: c64(0.0, 0.0),
                        at_chart_infinity: true,
                    }
                } else {
                    finite([one + one / (2.0 * s1), one], c64(0.0, 0.0))
                }
            }
            // Directions without a printed normalization: numerical kernel.
            (_, _) => {
                let lambda = match which {
                    EigenvalueChoice::Zero => c64(0.0, 0.0),
                    EigenvalueChoice::NonZero => pole.nonzero_eigenvalue(),
                };
                let r = self.residue(pole);
                let (u, v) = r
                    .eigenvector(lambda)
                    .ok_or(Error::DegenerateInput("residue eigenvector not found"))?;
                finite([u, v], lambda)
            }
        };
        Ok(out)
    }

    /// Test membership in Sigma = {z1 = z2 = z3, c1 + c2 + c3 = 0} with an
    /// absolute tolerance on the three defining linear forms, and compute the
    /// reducibility data (Q0, Q1, Qinf, residual).
    pub fn sigma_membership(&self, tol: f64) -> SigmaMembership {
        let [z1, z2, z3] = self.z;
        let [c1, c2, c3] = self.c;
        let [t1, t2, t3] = self.poles.t();
        let defect = (z1 - z2)
            .norm()
            .max((z2 - z3).norm())
            .max((c1 + c2 + c3).norm());
        let q0 = t2 * t3 * c1 + t1 * t3 * c2 + t1 * t2 * c3;
        let qinf = t1 * c1 + t2 * c2 + t3 * c3;
        let q1 = q0 + qinf;
        let z = z1;
        SigmaMembership {
            in_sigma: defect < tol,
            defect,
            q0,
            q1,
            qinf,
            reducible_residual: q0 * z + q1 * (z - c64(1.0, 0.0)) + qinf,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_system() -> FuchsianSystem {
        let poles = PoleConfig::new(c64(2.0, 0.3), c64(-1.1, 0.7), c64(0.4, -1.6)).unwrap();
        FuchsianSystem::new(
            poles,
            [c64(0.3, 0.2), c64(-0.8, 0.5), c64(1.4, -0.9)],
            [c64(0.7, -0.4), c64(-0.2, 1.1), c64(0.5, 0.6)],
        )
    }

    /// Independent evaluation of A(x) straight from the printed pencil
    /// nabla_0 + sum c_i Theta_i, as an oracle for the residue-based one.
    fn connection_oracle(sys: &FuchsianSystem, x: C64) -> Matrix2 {
        let one = c64(1.0, 0.0);
        let [t1, t2, t3] = sys.poles.t();
        let nabla0 = Matrix2::new(c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-0.5, 0.0))
            * (one / x)
            + Matrix2::new(c64(0.0, 0.0), c64(-0.5, 0.0), c64(0.0, 0.0), c64(-0.5, 0.0))
                * (one / (x - one))
            + (0..3)
                .map(|i| {
                    Matrix2::new(
                        c64(0.0, 0.0),
                        sys.z[i] * 0.5,
                        c64(0.0, 0.0),
                        c64(0.5, 0.0),
                    ) * (one / (x - [t1, t2, t3][i]))
                })
                .fold(Matrix2::zero(), |a, b| a + b);
        let theta = |i: usize| {
            let zi = sys.z[i];
            Matrix2::new(c64(0.0, 0.0), c64(0.0, 0.0), one - zi, c64(0.0, 0.0)) * (one / x)
                + Matrix2::new(zi, -zi, zi, -zi) * (one / (x - one))
                + Matrix2::new(-zi, zi * zi, -one, zi) * (one / (x - [t1, t2, t3][i]))
        };
        nabla0 + theta(0) * sys.c[0] + theta(1) * sys.c[1] + theta(2) * sys.c[2]
    }

    #[test]
    fn pole_config_rejects_degenerate() {
        assert!(PoleConfig::new(c64(0.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0)).is_err());
        assert!(PoleConfig::new(c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0)).is_err());
        assert!(PoleConfig::new(c64(2.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0)).is_err());
        assert!(PoleConfig::new(c64(2.0, 0.0), c64(3.0, 0.0), c64(5.0, 0.0)).is_ok());
    }

    #[test]
    fn connection_matches_pencil_oracle() {
        let sys = sample_system();
        for x in [c64(0.7, 0.9), c64(-2.3, 0.1), c64(3.1, -1.4)] {
            let a = sys.connection_coefficient(x).unwrap();
            let b = connection_oracle(&sys, x);
            assert!(a.distance(&b) < 1e-12 * b.max_norm().max(1.0));
        }
    }

    #[test]
    fn connection_refuses_pole() {
        let sys = sample_system();
        assert!(matches!(
            sys.connection_coefficient(sys.poles.t1()),
            Err(Error::PoleEvaluation { .. })
        ));
    }

    #[test]
    fn residues_have_printed_spectral_data() {
        let sys = sample_system();
        for label in PoleLabel::ALL {
            let r = sys.residue(label);
            let (l1, l2) = r.eigenvalues();
            let want = label.nonzero_eigenvalue();
            let got_nonzero = if l1.norm() > l2.norm() { l1 } else { l2 };
            let got_zero = if l1.norm() > l2.norm() { l2 } else { l1 };
            assert!(got_zero.norm() < 1e-12, "{label:?}: zero exponent drifted");
            assert!(
                (got_nonzero - want).norm() < 1e-12,
                "{label:?}: nonzero exponent {got_nonzero} != {want}"
            );
            assert!((r.trace() - want).norm() < 1e-12);
        }
    }

    #[test]
    fn residues_sum_to_zero() {
        let sys = sample_system();
        let total = PoleLabel::ALL
            .iter()
            .fold(Matrix2::zero(), |acc, &l| acc + sys.residue(l));
        assert!(total.max_norm() < 1e-12);
    }

    #[test]
    fn pencil_free_residue_at_one() {
        let poles = PoleConfig::new(c64(2.0, 0.0), c64(3.0, 0.0), c64(5.0, 0.0)).unwrap();
        let sys = FuchsianSystem::new(
            poles,
            [c64(0.3, 0.0), c64(0.4, 0.0), c64(0.5, 0.0)],
            [c64(0.0, 0.0); 3],
        );
        let r = sys.residue(PoleLabel::One);
        let want = Matrix2::new(c64(0.0, 0.0), c64(-0.5, 0.0), c64(0.0, 0.0), c64(-0.5, 0.0));
        assert!(r.distance(&want) < 1e-15);
    }

    #[test]
    fn eigendirections_satisfy_eigen_equation() {
        let sys = sample_system();
        for label in PoleLabel::ALL {
            for which in [EigenvalueChoice::Zero, EigenvalueChoice::NonZero] {
                let e = sys.eigendirection(label, which).unwrap();
                let r = sys.residue(label);
                let rv = r.mul_vec((e.dir[0], e.dir[1]));
                let want = (e.dir[0] * e.eigenvalue, e.dir[1] * e.eigenvalue);
                let scale = e.dir[0].norm().max(e.dir[1].norm());
                let res = (rv.0 - want.0).norm().max((rv.1 - want.1).norm());
                assert!(
                    res < 1e-10 * scale.max(1.0) * r.max_norm().max(1.0),
                    "{label:?} {which:?}: residual {res}"
                );
            }
        }
    }

    #[test]
    fn printed_eigendirections() {
        let sys = sample_system();
        let e0 = sys
            .eigendirection(PoleLabel::Zero, EigenvalueChoice::NonZero)
            .unwrap();
        assert!(e0.dir[0].norm() < 1e-15 && (e0.dir[1] - c64(1.0, 0.0)).norm() < 1e-15);
        let einf = sys
            .eigendirection(PoleLabel::Infinity, EigenvalueChoice::Zero)
            .unwrap();
        assert!((einf.dir[0] - c64(1.0, 0.0)).norm() < 1e-15 && einf.dir[1].norm() < 1e-15);
        let ez = sys
            .eigendirection(PoleLabel::Zero, EigenvalueChoice::Zero)
            .unwrap();
        let s0: C64 = (0..3)
            .map(|i| sys.c[i] * (c64(1.0, 0.0) - sys.z[i]))
            .sum();
        assert!((ez.dir[0] - c64(1.0, 0.0) / (2.0 * s0)).norm() < 1e-12);
    }

    #[test]
    fn degenerate_zero_direction_is_flagged() {
        // z = (1,1,1) makes sum c_i (1 - z_i) vanish identically.
        let poles = PoleConfig::new(c64(2.0, 0.0), c64(3.0, 0.0), c64(5.0, 0.0)).unwrap();
        let sys = FuchsianSystem::new(
            poles,
            [c64(1.0, 0.0); 3],
            [c64(0.7, 0.0), c64(-0.3, 0.0), c64(0.2, 0.0)],
        );
        let e = sys
            .eigendirection(PoleLabel::Zero, EigenvalueChoice::Zero)
            .unwrap();
        assert!(e.at_chart_infinity);
        assert!((e.dir[0] - c64(1.0, 0.0)).norm() < 1e-15 && e.dir[1].norm() < 1e-15);
    }

    #[test]
    fn sigma_membership_examples() {
        let poles = PoleConfig::new(c64(2.0, 0.0), c64(3.0, 0.0), c64(5.0, 0.0)).unwrap();
        let a = c64(0.37, -0.21);
        let on = FuchsianSystem::new(
            poles,
            [a, a, a],
            [c64(0.4, 0.1), c64(-0.9, 0.3), c64(0.5, -0.4)],
        );
        assert!(on.sigma_membership(1e-10).in_sigma);
        let off = FuchsianSystem::new(
            poles,
            [c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
            [c64(0.4, 0.1), c64(-0.9, 0.3), c64(0.5, -0.4)],
        );
        assert!(!off.sigma_membership(1e-10).in_sigma);
    }

    proptest! {
        /// The residual Q0 z + Q1 (z-1) + Qinf equals the cross-multiplied
        /// form z Qinf - (1 - 2z) Q0 of the reducibility equation.
        #[test]
        fn residual_matches_cross_multiplied_form(
            vals in proptest::collection::vec(-2.0f64..2.0, 8),
        ) {
            let poles = PoleConfig::new(
                c64(2.0 + vals[0], vals[1]),
                c64(-3.0 + vals[2], vals[3]),
                c64(vals[4], 4.0 + vals[5]),
            ).unwrap();
            let z = c64(vals[6], vals[7]);
            let c1 = c64(vals[1], vals[4]);
            let c2 = c64(vals[0], -vals[3]);
            let sys = FuchsianSystem::new(poles, [z, z, z], [c1, c2, -c1 - c2]);
            let m = sys.sigma_membership(1e-9);
            prop_assert!(m.in_sigma);
            let alt = z * m.qinf - (c64(1.0, 0.0) - 2.0 * z) * m.q0;
            let scale = m.q0.norm().max(m.qinf.norm()).max(1.0);
            prop_assert!((m.reducible_residual - alt).norm() < 1e-12 * scale);
        }

        /// Every residue keeps its printed trace.
        #[test]
        fn residue_traces(vals in proptest::collection::vec(-2.0f64..2.0, 12)) {
            let poles = PoleConfig::new(
                c64(2.0 + vals[0], vals[1]),
                c64(-3.0 + vals[2], vals[3]),
                c64(vals[4], 4.0 + vals[5]),
            ).unwrap();
            let sys = FuchsianSystem::new(
                poles,
                [c64(vals[6], vals[7]), c64(vals[8], vals[9]), c64(vals[10], vals[11])],
                [c64(vals[9], vals[2]), c64(vals[11], -vals[0]), c64(vals[7], vals[5])],
            );
            for label in PoleLabel::ALL {
                let want = label.nonzero_eigenvalue();
                prop_assert!((sys.residue(label).trace() - want).norm() < 1e-12);
            }
        }
    }
}
