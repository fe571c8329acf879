//! Adaptive Runge-Kutta integration and parallel transport.
//!
//! The integrator is the Dormand-Prince 5(4) pair with a PI step-size
//! controller. Everything downstream (monodromy, isomonodromic flow,
//! hyperelliptic continuation) runs through [`integrate_ode`];
//! [`integrate_transport`] specializes it to the linear transport problem
//! dY/dx = -A(x) Y along a polyline, with an Abel-Liouville determinant
//! self-test.

use super::{C64, Matrix2, Polyline};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Tolerances and limits for one integration run.
#[derive(Clone, Debug)]
pub struct OdeOptions {
    /// Relative tolerance; the absolute tolerance is derived as `1e-3 * rtol`
    /// so that components passing through zero do not stall the controller.
    pub rtol: f64,
    /// Initial step size; `None` picks one percent of the span.
    pub h_initial: Option<f64>,
    /// Hard cap on the step size, on top of any cap the accept hook returns.
    pub h_max: f64,
    /// Abort threshold on accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            h_initial: None,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        Self { rtol, ..Self::default() }
    }

    fn atol(&self) -> f64 {
        1e-3 * self.rtol
    }
}

/// Work counters for one integration run.
#[derive(Clone, Copy, Debug, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

impl OdeStats {
    pub fn absorb(&mut self, other: OdeStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.rhs_evals += other.rhs_evals;
    }
}

// Dormand-Prince 5(4) tableau. Rows are the stage coefficients a_ij; B5 is
// the fifth-order weight row, E the difference against the embedded
// fourth-order row (error estimator weights).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `dy/ds = rhs(s, y)` from `s0` to `s1 >= s0`.
///
/// `on_accept` is called once at the initial point and after every accepted
/// step. Its return value caps the size of the *next* step (return
/// `f64::INFINITY` for no cap); this is how callers impose position-dependent
/// step limits, e.g. near branch points. An error from either closure aborts
/// the run. Because the hook may change state the right-hand side reads
/// through captures, the first stage is re-evaluated each step rather than
/// reusing the FSAL stage.
pub fn integrate_ode<const N: usize, F, G>(
    rhs: F,
    s0: f64,
    s1: f64,
    y0: [C64; N],
    opts: &OdeOptions,
    mut on_accept: G,
) -> Result<([C64; N], OdeStats)>
where
    F: Fn(f64, &[C64; N]) -> Result<[C64; N]>,
    G: FnMut(f64, &[C64; N]) -> Result<f64>,
{
    if !(s1 >= s0) {
        return Err(Error::DegenerateInput("integration span must satisfy s1 >= s0"));
    }
    let mut stats = OdeStats::default();
    let mut s = s0;
    let mut y = y0;
    let mut cap = on_accept(s, &y)?;
    if s1 == s0 {
        return Ok((y, stats));
    }

    let span = s1 - s0;
    let floor = 1e-14 * span.max(1.0);
    let atol = opts.atol();
    let mut h = opts
        .h_initial
        .unwrap_or(0.01 * span)
        .min(opts.h_max)
        .min(cap)
        .min(span);
    let mut errold: f64 = 1e-4;

    let mut k = [[C64::new(0.0, 0.0); N]; 7];
    while s < s1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::SingularApproach { s });
        }
        if h < floor {
            return Err(Error::SingularApproach { s });
        }
        let last = s + h >= s1;
        if last {
            h = s1 - s;
        }

        k[0] = rhs(s, &y)?;
        stats.rhs_evals += 1;
        for i in 1..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                let w = A[i][j] * h;
                if w != 0.0 {
                    for n in 0..N {
                        yi[n] += kj[n] * w;
                    }
                }
            }
            k[i] = rhs(s + C[i] * h, &yi)?;
            stats.rhs_evals += 1;
        }

        let mut y1 = y;
        let mut err_vec = [C64::new(0.0, 0.0); N];
        for (i, ki) in k.iter().enumerate() {
            for n in 0..N {
                if B5[i] != 0.0 {
                    y1[n] += ki[n] * (B5[i] * h);
                }
                if E[i] != 0.0 {
                    err_vec[n] += ki[n] * (E[i] * h);
                }
            }
        }
        if y1.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::EvaluationFailure {
                x: Complex64::new(s, 0.0),
            });
        }

        let mut err: f64 = 0.0;
        for n in 0..N {
            let sc = atol + opts.rtol * y[n].norm().max(y1[n].norm());
            err = err.max(err_vec[n].norm() / sc);
        }

        let fac = (0.9 * err.powf(-0.17) * errold.powf(0.04)).clamp(0.2, 5.0);
        if err <= 1.0 {
            s += h;
            y = y1;
            stats.accepted += 1;
            errold = err.max(1e-4);
            cap = on_accept(s, &y)?;
            h = (h * fac).min(opts.h_max).min(cap);
        } else {
            stats.rejected += 1;
            // Never grow on a rejection, whatever the PI memory says.
            h *= fac.min(0.9);
        }
    }
    Ok((y, stats))
}

/// Parallel transport of the fundamental solution along a polyline.
#[derive(Clone, Debug)]
pub struct Transport {
    /// Transport matrix B: solutions propagate as Y(end) = B Y(start).
    pub matrix: Matrix2,
    /// Accumulated integral of tr A(x) dx along the path.
    pub trace_integral: C64,
    pub stats: OdeStats,
}

/// Integrate `dY/dx = -A(x) Y` along `path` with `Y = I` at the start.
///
/// A fifth state component carries `tau = integral tr A dx`, so Abel-Liouville
/// gives `det B = exp(-tau)` exactly; the run fails with [`Error::DetDrift`]
/// if the two sides disagree by more than ten times `rtol`. Each polyline
/// segment is integrated from the identity and composed by matrix
/// multiplication, `T_total = T_seg * T_total`, which keeps the local error
/// control working on unit-scale data.
pub fn integrate_transport<F>(coeff_at: F, path: &Polyline, rtol: f64) -> Result<Transport>
where
    F: Fn(C64) -> Result<Matrix2>,
{
    let opts = OdeOptions::with_rtol(rtol);
    let mut total = Matrix2::identity();
    let mut tau = C64::new(0.0, 0.0);
    let mut stats = OdeStats::default();

    for (a, b) in path.segments() {
        let d = b - a;
        if d.norm() == 0.0 {
            continue;
        }
        let rhs = |u: f64, y: &[C64; 5]| -> Result<[C64; 5]> {
            let x = a + d * u;
            let m = coeff_at(x)?;
            if !m.is_finite() {
                return Err(Error::EvaluationFailure { x });
            }
            // Y' = -A Y (2x2 block), tau' = tr A, all times dx/du = d.
            let (y11, y12, y21, y22) = (y[0], y[1], y[2], y[3]);
            Ok([
                -(m.a * y11 + m.b * y21) * d,
                -(m.a * y12 + m.b * y22) * d,
                -(m.c * y11 + m.d * y21) * d,
                -(m.c * y12 + m.d * y22) * d,
                m.trace() * d,
            ])
        };
        let y0 = [
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ];
        let (y, seg_stats) = integrate_ode(rhs, 0.0, 1.0, y0, &opts, |_, _| Ok(f64::INFINITY))?;
        stats.absorb(seg_stats);
        let seg = Matrix2::new(y[0], y[1], y[2], y[3]);
        total = seg * total;
        tau += y[4];
    }

    let defect = (total.det() - (-tau).exp()).norm();
    if defect > 10.0 * rtol {
        return Err(Error::DetDrift { defect, tol: rtol });
    }
    Ok(Transport {
        matrix: total,
        trace_integral: tau,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c64;

    /// y' = lambda y has the closed solution e^{lambda s}.
    #[test]
    fn scalar_exponential() {
        let lambda = c64(0.3, 1.1);
        let rhs = |_s: f64, y: &[C64; 1]| Ok([lambda * y[0]]);
        let opts = OdeOptions::with_rtol(1e-12);
        let (y, stats) =
            integrate_ode(rhs, 0.0, 1.0, [c64(1.0, 0.0)], &opts, |_, _| Ok(f64::INFINITY))
                .unwrap();
        assert!((y[0] - lambda.exp()).norm() < 1e-10);
        assert!(stats.accepted > 0);
    }

    /// Transport of dY/dx = -(c/x) I around a circle about the origin picks
    /// up the scalar monodromy e^{-2 pi i c} and the exact trace integral.
    #[test]
    fn scalar_pole_monodromy() {
        let c = c64(0.25, 0.0);
        let coeff = move |x: C64| {
            Ok(Matrix2::new(c / x, c64(0.0, 0.0), c64(0.0, 0.0), c / x))
        };
        let path = Polyline::circle(c64(0.0, 0.0), 1.0, 64, 0.0).unwrap();
        let t = integrate_transport(coeff, &path, 1e-12).unwrap();
        let expected = (-c64(0.0, 2.0 * std::f64::consts::PI) * c).exp();
        assert!((t.matrix.a - expected).norm() < 1e-9);
        assert!(t.matrix.b.norm() < 1e-9);
        // tau = 2c * 2 pi i (trace of the scalar-times-identity coefficient).
        let tau_expected = c64(0.0, 2.0 * std::f64::consts::PI) * (2.0 * c);
        assert!((t.trace_integral - tau_expected).norm() < 1e-9);
    }

    /// The accept hook's step cap is honored.
    #[test]
    fn accept_hook_caps_step() {
        let rhs = |_s: f64, y: &[C64; 1]| Ok([y[0] * 0.0]);
        let opts = OdeOptions::with_rtol(1e-8);
        let mut max_seen: f64 = 0.0;
        let mut last_s = 0.0;
        let (_, stats) = integrate_ode(rhs, 0.0, 1.0, [c64(1.0, 0.0)], &opts, |s, _| {
            max_seen = max_seen.max(s - last_s);
            last_s = s;
            Ok(0.05)
        })
        .unwrap();
        assert!(max_seen <= 0.05 + 1e-12);
        assert!(stats.accepted >= 20);
    }

    /// Creeping into a pole exhausts the step floor and names the failure.
    #[test]
    fn singular_approach_detected() {
        let rhs = |s: f64, y: &[C64; 1]| Ok([y[0] / c64(1.0 - s, 0.0)]);
        let opts = OdeOptions {
            rtol: 1e-10,
            max_steps: 20_000,
            ..OdeOptions::default()
        };
        let res = integrate_ode(rhs, 0.0, 1.0, [c64(1.0, 0.0)], &opts, |_, _| {
            Ok(f64::INFINITY)
        });
        assert!(matches!(res, Err(Error::SingularApproach { .. })));
    }
}
