//! Piecewise-linear paths in the complex plane.
//!
//! Monodromy loops are planned as polylines: straight corridors out to a pole,
//! a polygonal circle around it, and the corridor back. Winding numbers are
//! computed exactly from per-segment argument increments, which is reliable
//! because no segment is ever allowed to pass through (or near) a pole.

use super::C64;
use crate::error::{Error, Result};

/// Piecewise-linear path through at least two waypoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    points: Vec<C64>,
}

impl Polyline {
    pub fn new(points: Vec<C64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::PathPlanning(
                "polyline needs at least two waypoints".into(),
            ));
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::PathPlanning("non-finite waypoint".into()));
        }
        Ok(Self { points })
    }

    /// Regular n-gon inscribed in the circle of given center and radius,
    /// closed (first point repeated at the end), starting at angle
    /// `start_angle` and traversed counterclockwise.
    pub fn circle(center: C64, radius: f64, sides: usize, start_angle: f64) -> Result<Self> {
        if sides < 3 || radius <= 0.0 {
            return Err(Error::PathPlanning("circle needs radius > 0, sides >= 3".into()));
        }
        let mut points = Vec::with_capacity(sides + 1);
        for k in 0..=sides {
            let theta = start_angle + 2.0 * std::f64::consts::PI * (k as f64) / (sides as f64);
            points.push(center + C64::from_polar(radius, theta));
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn start(&self) -> C64 {
        self.points[0]
    }

    pub fn end(&self) -> C64 {
        *self.points.last().unwrap()
    }

    pub fn segments(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn is_closed(&self, tol: f64) -> bool {
        (self.start() - self.end()).norm() <= tol
    }

    /// Same trace, opposite orientation.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    /// Concatenation `self` then `other`; endpoints must match exactly enough
    /// that the junction does not open a gap.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let gap = (self.end() - other.start()).norm();
        let scale = self.end().norm().max(other.start().norm()).max(1.0);
        if gap > 1e-9 * scale {
            return Err(Error::PathPlanning(format!(
                "concatenation gap {gap:.3e} between path endpoints"
            )));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Ok(Self { points })
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Winding number around `z0` for a closed path: sum of principal
    /// argument increments over segments, divided by 2 pi, rounded to the
    /// nearest integer. Exact as long as no segment subtends an angle of pi
    /// or more at `z0`, which the corridor-clearance checks guarantee.
    pub fn winding_number(&self, z0: C64) -> Result<i64> {
        let scale = self.points.iter().map(|p| (p - z0).norm()).fold(0.0, f64::max);
        if !self.is_closed(1e-9 * scale.max(1.0)) {
            return Err(Error::PathPlanning("winding number of an open path".into()));
        }
        let mut total = 0.0;
        for (a, b) in self.segments() {
            let u = a - z0;
            let v = b - z0;
            if u.norm() == 0.0 || v.norm() == 0.0 {
                return Err(Error::PathPlanning("path passes through winding center".into()));
            }
            // arg(v / u) in (-pi, pi]: the turn of this segment as seen from z0.
            total += (v / u).arg();
        }
        let turns = total / (2.0 * std::f64::consts::PI);
        let rounded = turns.round();
        if (turns - rounded).abs() > 1e-6 {
            return Err(Error::PathPlanning(format!(
                "non-integral winding {turns:.9}; a segment grazes the center"
            )));
        }
        Ok(rounded as i64)
    }

    /// Minimum distance from `z0` to the trace of the path.
    pub fn min_distance(&self, z0: C64) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(z0, a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

fn point_segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    // Projection parameter of z onto the line through a, b, clamped to [0, 1].
    let az = z - a;
    let t = ((az.re * ab.re + az.im * ab.im) / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}
