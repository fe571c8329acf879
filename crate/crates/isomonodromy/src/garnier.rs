//! The Garnier Hamiltonians H_i, the isomonodromy vector fields V_i, and
//! numerical integration of the isomonodromic flow along paths in the
//! parameter space T.
//!
//! With F(x) = x(x-1)(x-t1)(x-t2)(x-t3) and the signed logarithmic sum
//! G(x) = (1/2)(1/x + 1/(x-1) - 1/(x-t1) - 1/(x-t2) - 1/(x-t3)), the i-th
//! Hamiltonian is defined through
//!
//!   t_i(t_i-1) prod_{j != i}(t_j - t_i) * H_i =
//!     sum_j [prod_{k != j}(q_k - t_i) / prod_{k != j}(q_k - q_j)]
//!           * F(q_j) (p_j^2 + G(q_j) p_j + p_j/(q_j - t_i)).
//!
//! The signs in G mirror the residue traces of the connection: -1/2 at the
//! poles 0 and 1, +1/2 at the apparent singularities t_k. The symmetric
//! variant F'/(2F), with all five signs equal, generates a flow whose
//! monodromy traces drift; the signed form is the one that passes the
//! numerical isomonodromy test. Everything is evaluated in cleared form:
//! F(q_j) G(q_j) is the quartic (F/x + F/(x-1))/2 - sum_k F_k(q_j)/2 and
//! F(q_j)/(q_j - t_i) the quartic F_i(q_j), with F_k = F/(x - t_k), so the
//! only genuine poles left are the q-collisions. Deformations are
//! isomonodromic exactly when dq_k/dt_i = dH_i/dp_k and
//! dp_k/dt_i = -dH_i/dq_k; the flow integrates these equations in a single
//! real parameter s with t(s) piecewise-linear.

use crate::darboux::DarbouxPoint;
use crate::error::{Error, Result};
use crate::fuchsian::PoleConfig;
use crate::numkit::{c64, integrate_ode, C64, ComplexPoly, OdeOptions, OdeStats};

/// Hard refusal threshold for q-collisions in point evaluations.
const DEGENERACY_REL: f64 = 1e-9;

/// Flow abort threshold: the vector fields lose too much accuracy closer to
/// the polar locus than this.
const FLOW_COLLISION_REL: f64 = 1e-5;

/// Margin by which a flow must stay inside T.
const FLOW_T_MARGIN_REL: f64 = 1e-8;

fn scale_of(t: &PoleConfig, q: &[C64; 3]) -> f64 {
    let mut s: f64 = 1.0;
    for v in q.iter().chain(t.t().iter()) {
        s = s.max(v.norm());
    }
    s
}

fn guard_q_collisions(t: &PoleConfig, d: &DarbouxPoint, rel: f64) -> Result<()> {
    let sep = d.min_q_separation();
    if sep <= rel * scale_of(t, &d.q) {
        return Err(Error::CriticalLocus(format!(
            "q-collision: min separation {sep:.3e}"
        )));
    }
    Ok(())
}

/// Shared per-point data for the three Hamiltonians.
struct HamiltonianParts {
    /// D_i = t_i(t_i-1) prod_{j != i}(t_j - t_i).
    d: [C64; 3],
    /// R_j = prod_{k != j}(q_k - t_i) / prod_{k != j}(q_k - q_j), per (i, j).
    r: [[C64; 3]; 3],
    /// W_j = F(q_j) p_j^2 + L_i(q_j) p_j, per (i, j).
    w: [[C64; 3]; 3],
    f: ComplexPoly,
    fp: ComplexPoly,
    /// Linear p-coefficient L_i = F_i + (F/x + F/(x-1))/2 - sum_k F_k / 2,
    /// with F_i = F/(x - t_i); the half-integer exponents at 0 and 1 enter
    /// with the opposite sign to those at the t_k. Its derivative follows.
    lin: [ComplexPoly; 3],
    linp: [ComplexPoly; 3],
}

impl HamiltonianParts {
    fn new(t: &PoleConfig, d: &DarbouxPoint) -> Self {
        let ts = t.t();
        let one = c64(1.0, 0.0);
        let f = t.curve_poly();
        let fp = f.derivative();
        let mk_fi = |i: usize| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            ComplexPoly::from_roots(&[c64(0.0, 0.0), one, ts[j], ts[k]])
        };
        let fi = [mk_fi(0), mk_fi(1), mk_fi(2)];
        // (F/x + F/(x-1))/2 = (x - 1/2)(x-t1)(x-t2)(x-t3), and
        // sum_k F_k / 2 = F'/2 - that same product, so
        // L_i = F_i - F'/2 + (2x - 1)(x-t1)(x-t2)(x-t3).
        let tprod = ComplexPoly::from_roots(&[ts[0], ts[1], ts[2]]);
        let shear = tprod.mul(&ComplexPoly::new(vec![c64(-1.0, 0.0), c64(2.0, 0.0)]));
        let mk_lin = |i: usize| fi[i].add(&fp.scale(c64(-0.5, 0.0))).add(&shear);
        let lin = [mk_lin(0), mk_lin(1), mk_lin(2)];
        let linp = [lin[0].derivative(), lin[1].derivative(), lin[2].derivative()];
        let mut dcoef = [c64(0.0, 0.0); 3];
        let mut r = [[c64(0.0, 0.0); 3]; 3];
        let mut w = [[c64(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            dcoef[i] = ts[i] * (ts[i] - one) * (ts[j] - ts[i]) * (ts[k] - ts[i]);
            for jj in 0..3 {
                let (a, b) = ((jj + 1) % 3, (jj + 2) % 3);
                r[i][jj] = (d.q[a] - ts[i]) * (d.q[b] - ts[i])
                    / ((d.q[a] - d.q[jj]) * (d.q[b] - d.q[jj]));
                let qj = d.q[jj];
                let pj = d.p[jj];
                w[i][jj] = f.eval(qj) * pj * pj + lin[i].eval(qj) * pj;
            }
        }
        Self {
            d: dcoef,
            r,
            w,
            f,
            fp,
            lin,
            linp,
        }
    }

    fn hamiltonian(&self, i: usize) -> C64 {
        let mut sum = c64(0.0, 0.0);
        for j in 0..3 {
            sum += self.r[i][j] * self.w[i][j];
        }
        sum / self.d[i]
    }

    /// (dH_i/dp_m)_m and (dH_i/dq_m)_m by closed-form differentiation of the
    /// cleared expression; the R_j quotients are differentiated by the
    /// product/quotient rule on their explicit two-factor numerators and
    /// denominators, which keeps the only poles at genuine q-collisions.
    fn gradients(&self, t: &PoleConfig, d: &DarbouxPoint, i: usize) -> ([C64; 3], [C64; 3]) {
        let ts = t.t();
        let mut dh_dp = [c64(0.0, 0.0); 3];
        let mut dh_dq = [c64(0.0, 0.0); 3];
        for m in 0..3 {
            let qm = d.q[m];
            let pm = d.p[m];
            dh_dp[m] = self.r[i][m]
                * (self.f.eval(qm) * pm * 2.0 + self.lin[i].eval(qm))
                / self.d[i];

            let mut acc = c64(0.0, 0.0);
            for j in 0..3 {
                let (a, b) = ((j + 1) % 3, (j + 2) % 3);
                let num = (d.q[a] - ts[i]) * (d.q[b] - ts[i]);
                let den = (d.q[a] - d.q[j]) * (d.q[b] - d.q[j]);
                let (dnum, dden) = if j == m {
                    // Numerator does not involve q_m; denominator does twice.
                    (c64(0.0, 0.0), -(d.q[b] - d.q[m]) - (d.q[a] - d.q[m]))
                } else {
                    // q_m is one of q_a, q_b.
                    let other = if a == m { d.q[b] } else { d.q[a] };
                    (other - ts[i], other - d.q[j])
                };
                let dr = (dnum * den - num * dden) / (den * den);
                acc += dr * self.w[i][j];
                if j == m {
                    let dw = self.fp.eval(qm) * pm * pm + self.linp[i].eval(qm) * pm;
                    acc += self.r[i][j] * dw;
                }
            }
            dh_dq[m] = acc / self.d[i];
        }
        (dh_dp, dh_dq)
    }
}

/// The i-th Garnier Hamiltonian (i = 0, 1, 2 selecting t1, t2, t3).
pub fn hamiltonian(t: &PoleConfig, d: &DarbouxPoint, i: usize) -> Result<C64> {
    assert!(i < 3, "Hamiltonian index out of range");
    guard_q_collisions(t, d, DEGENERACY_REL)?;
    Ok(HamiltonianParts::new(t, d).hamiltonian(i))
}

/// The (q, p)-component of the isomonodromy vector field V_i:
/// dq_k = dH_i/dp_k and dp_k = -dH_i/dq_k.
pub fn garnier_vector_field(
    t: &PoleConfig,
    d: &DarbouxPoint,
    i: usize,
) -> Result<([C64; 3], [C64; 3])> {
    assert!(i < 3, "Hamiltonian index out of range");
    guard_q_collisions(t, d, DEGENERACY_REL)?;
    let parts = HamiltonianParts::new(t, d);
    let (dh_dp, dh_dq) = parts.gradients(t, d, i);
    Ok((dh_dp, [-dh_dq[0], -dh_dq[1], -dh_dq[2]]))
}

/// A piecewise-linear path in the parameter space T, traversed by a single
/// parameter s in [0, 1] split uniformly among the segments.
#[derive(Clone, Debug)]
pub struct TPath {
    waypoints: Vec<[C64; 3]>,
}

impl TPath {
    /// At least one waypoint; a single waypoint is the zero-length path.
    pub fn new(waypoints: Vec<[C64; 3]>) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::PathPlanning("empty t-path".into()));
        }
        if waypoints
            .iter()
            .flatten()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::PathPlanning("non-finite t-path waypoint".into()));
        }
        Ok(Self { waypoints })
    }

    pub fn line(from: [C64; 3], to: [C64; 3]) -> Result<Self> {
        Self::new(vec![from, to])
    }

    pub fn waypoints(&self) -> &[[C64; 3]] {
        &self.waypoints
    }

    pub fn segment_count(&self) -> usize {
        self.waypoints.len() - 1
    }

    pub fn start(&self) -> [C64; 3] {
        self.waypoints[0]
    }

    pub fn end(&self) -> [C64; 3] {
        *self.waypoints.last().unwrap()
    }

    /// The path with waypoints in reverse order.
    pub fn reversed(&self) -> Self {
        let mut w = self.waypoints.clone();
        w.reverse();
        Self { waypoints: w }
    }

    fn segment_of(&self, s: f64) -> (usize, f64) {
        let n = self.segment_count();
        let scaled = s * n as f64;
        let k = (scaled.floor() as usize).min(n - 1);
        (k, scaled - k as f64)
    }

    /// Position t(s) for s in [0, 1].
    pub fn at(&self, s: f64) -> [C64; 3] {
        if self.segment_count() == 0 {
            return self.waypoints[0];
        }
        let (k, u) = self.segment_of(s.clamp(0.0, 1.0));
        let (a, b) = (self.waypoints[k], self.waypoints[k + 1]);
        [
            a[0] + (b[0] - a[0]) * u,
            a[1] + (b[1] - a[1]) * u,
            a[2] + (b[2] - a[2]) * u,
        ]
    }

    /// dt/ds on segment k (constant per segment).
    fn derivative_on(&self, k: usize) -> [C64; 3] {
        let n = self.segment_count() as f64;
        let (a, b) = (self.waypoints[k], self.waypoints[k + 1]);
        [(b[0] - a[0]) * n, (b[1] - a[1]) * n, (b[2] - a[2]) * n]
    }
}

/// One accepted sample of an isomonodromic flow.
#[derive(Clone, Copy, Debug)]
pub struct FlowSample {
    pub s: f64,
    pub t: [C64; 3],
    pub point: DarbouxPoint,
}

/// Result of integrating the isomonodromic flow along a `TPath`.
#[derive(Clone, Debug)]
pub struct FlowTrajectory {
    pub samples: Vec<FlowSample>,
    pub tol: f64,
    pub stats: OdeStats,
}

impl FlowTrajectory {
    pub fn endpoint(&self) -> &FlowSample {
        self.samples.last().unwrap()
    }
}

fn pole_config_at(path: &TPath, s: f64) -> Result<PoleConfig> {
    let tv = path.at(s);
    let config = PoleConfig::new(tv[0], tv[1], tv[2])
        .map_err(|_| Error::LeftParameterSpace { s })?;
    let scale = tv.iter().map(|v| v.norm()).fold(1.0, f64::max);
    if config.min_pole_separation() <= FLOW_T_MARGIN_REL * scale {
        return Err(Error::LeftParameterSpace { s });
    }
    Ok(config)
}

/// Integrate dq_k/dt_i = dH_i/dp_k, dp_k/dt_i = -dH_i/dq_k along the path,
/// with local error controlled by `tol`. Accepted steps are recorded as
/// trajectory samples. The flow aborts if the q's come within
/// `1e-5 * scale` of a collision (the polar locus of the vector fields) or
/// if the path leaves T.
pub fn isomonodromic_flow(path: &TPath, d0: &DarbouxPoint, tol: f64) -> Result<FlowTrajectory> {
    let t0 = pole_config_at(path, 0.0)?;
    guard_q_collisions(&t0, d0, FLOW_COLLISION_REL)?;
    let mut samples = vec![FlowSample {
        s: 0.0,
        t: path.at(0.0),
        point: *d0,
    }];
    let mut stats = OdeStats::default();
    let mut y = [d0.q[0], d0.q[1], d0.q[2], d0.p[0], d0.p[1], d0.p[2]];

    let n = path.segment_count();
    for k in 0..n {
        let (s_lo, s_hi) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
        let dt_ds = path.derivative_on(k);
        let rhs = |s: f64, state: &[C64; 6]| -> Result<[C64; 6]> {
            let t = pole_config_at(path, s)?;
            let d = DarbouxPoint::new([state[0], state[1], state[2]], [state[3], state[4], state[5]]);
            let sep = d.min_q_separation();
            if sep <= FLOW_COLLISION_REL * scale_of(&t, &d.q) {
                return Err(Error::CriticalLocus(format!(
                    "critical locus at s={s:.6}: min q-separation {sep:.3e}"
                )));
            }
            let parts = HamiltonianParts::new(&t, &d);
            let mut dy = [c64(0.0, 0.0); 6];
            for i in 0..3 {
                if dt_ds[i].norm() == 0.0 {
                    continue;
                }
                let (dh_dp, dh_dq) = parts.gradients(&t, &d, i);
                for m in 0..3 {
                    dy[m] += dt_ds[i] * dh_dp[m];
                    dy[m + 3] -= dt_ds[i] * dh_dq[m];
                }
            }
            Ok(dy)
        };
        let hook = |s: f64, state: &[C64; 6]| -> Result<f64> {
            let last_s = samples.last().map(|smp| smp.s).unwrap_or(-1.0);
            if s > last_s + 1e-15 {
                samples.push(FlowSample {
                    s,
                    t: path.at(s),
                    point: DarbouxPoint::new(
                        [state[0], state[1], state[2]],
                        [state[3], state[4], state[5]],
                    ),
                });
            }
            Ok(f64::INFINITY)
        };
        let (y_end, seg_stats) =
            integrate_ode(rhs, s_lo, s_hi, y, &OdeOptions::with_rtol(tol), hook)?;
        y = y_end;
        stats.absorb(seg_stats);
    }
    Ok(FlowTrajectory {
        samples,
        tol,
        stats,
    })
}
