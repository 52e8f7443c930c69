//! Dynamics of the auxiliary-circle centers far from the table: polar center
//! records along stride-2 orbits, the level function r * w(alpha + pi/2)
//! whose level sets the rescaled centers shadow, the sectorial-area law, and
//! the closed-form center locus for periodic orbits around an ellipse.

use crate::error::{Error, Result};
use crate::geom::{wrap_near, Vec2, PI};
use crate::map::{self, aux_circle};
use crate::oval::{Oval, OvalKind};
use crate::periodic::{verify_periodic, PeriodicOrbit};

/// Center of the auxiliary circle constructed at the exterior point x.
pub fn circle_center(oval: &Oval, x: Vec2) -> Result<Vec2> {
    Ok(aux_circle(oval, x)?.center)
}

/// Polar records of every other auxiliary-circle center along an orbit.
///
/// `beta` and `big_r` are the polar angle and distance of each recorded
/// center about the table origin; `rescaled` divides each center by the
/// squared orbit radius of its step, and `orbit_r` keeps that radius.
#[derive(Clone, Debug)]
pub struct CenterTrace {
    pub beta: Vec<f64>,
    pub big_r: Vec<f64>,
    pub rescaled: Vec<Vec2>,
    pub orbit_r: Vec<f64>,
    /// True when the odd-step subsequence was recorded instead of the even.
    pub odd_steps: bool,
}

impl CenterTrace {
    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }
}

/// Walk the orbit one step at a time, recording the auxiliary circle of
/// every even-indexed step (or odd-indexed with the flag), n records total.
pub fn center_trace(oval: &Oval, x0: Vec2, n: usize, odd_steps: bool) -> Result<CenterTrace> {
    let origin = oval.origin();
    if (x0 - origin).norm() < 10.0 * oval.diameter() {
        return Err(Error::Usage(format!(
            "trace start must sit at least 10 diameters out, |x0| = {:.3}",
            (x0 - origin).norm()
        )));
    }
    let mut trace = CenterTrace {
        beta: Vec::with_capacity(n),
        big_r: Vec::with_capacity(n),
        rescaled: Vec::with_capacity(n),
        orbit_r: Vec::with_capacity(n),
        odd_steps,
    };
    let mut x = x0;
    let mut index = 0usize;
    if odd_steps {
        x = map::step(oval, x).map_err(|e| e.at_step(0))?.image;
        index = 1;
    }
    while trace.len() < n {
        let step = map::step(oval, x).map_err(|e| e.at_step(index))?;
        let center = step.circle.center;
        let u = center - origin;
        trace.beta.push(u.angle());
        trace.big_r.push(u.norm());
        let r = (x - origin).norm();
        trace.rescaled.push(u * (1.0 / (r * r)));
        trace.orbit_r.push(r);
        // Advance two steps so consecutive records share a tangency parity.
        let mid = step.image;
        x = map::step(oval, mid).map_err(|e| e.at_step(index + 1))?.image;
        index += 2;
    }
    Ok(trace)
}

/// Centers of every other auxiliary circle along the stride-2 orbit from x0,
/// divided by the squared orbit radius.
pub fn rescaled_center_orbit(oval: &Oval, x0: Vec2, n: usize) -> Result<CenterTrace> {
    center_trace(oval, x0, n, false)
}

/// Level function H = r * w(alpha + pi/2) in polar coordinates about the
/// table origin. Its unit level curve is the width-reciprocal curve rotated
/// a quarter turn, and the rescaled center trace runs along its level sets.
pub fn ham_level(oval: &Oval, pt: Vec2) -> Result<f64> {
    let u = pt - oval.origin();
    let r = u.norm();
    if r == 0.0 {
        return Err(Error::AtOrigin);
    }
    Ok(r * oval.width(u.angle() + PI / 2.0))
}

/// Per-record sectorial rates of a center trace with their references.
///
/// `rate[i]` is (1/2) R_i^2 |delta beta| / 2, the area swept by the center
/// ray per underlying map step (records sit two steps apart, so the recorded
/// angular increment is halved); `reference[i]` is 2 r^3 / w(alpha) at the
/// orbit point of record i.
#[derive(Clone, Debug)]
pub struct SectorialRates {
    pub rate: Vec<f64>,
    pub reference: Vec<f64>,
}

pub fn sectorial_rate(oval: &Oval, trace: &CenterTrace) -> Result<SectorialRates> {
    if trace.len() < 2 {
        return Err(Error::TooShort { need: 2 });
    }
    let mut rate = Vec::with_capacity(trace.len() - 1);
    let mut reference = Vec::with_capacity(trace.len() - 1);
    for i in 0..trace.len() - 1 {
        let dbeta = wrap_near(trace.beta[i + 1] - trace.beta[i], 0.0).abs();
        rate.push(0.5 * trace.big_r[i] * trace.big_r[i] * (0.5 * dbeta));
        let r = trace.orbit_r[i];
        // The polar angle of the orbit point at record i: recover it from the
        // rescaled center, which sits a quarter turn ahead of the orbit ray.
        let alpha = trace.beta[i] - PI / 2.0;
        reference.push(2.0 * r * r * r / oval.width(alpha));
    }
    Ok(SectorialRates { rate, reference })
}

/// Largest deviation of the orbit's auxiliary-circle centers from the
/// closed-form center ellipse.
///
/// The polygon's corners lie on one confocal ellipse with semi-axes (A, B);
/// the centers then lie on the axis-aligned ellipse with semi-axes
/// (A^2 / a, B^2 / b), the polar dual of the table taken with respect to the
/// corner ellipse. Returns the max absolute implicit-equation residual.
pub fn ellipse_center_locus(oval: &Oval, orbit: &PeriodicOrbit) -> Result<f64> {
    let (a, b) = match oval.kind() {
        OvalKind::Ellipse { a, b } => (*a, *b),
        OvalKind::Circle { r } => (*r, *r),
        _ => {
            return Err(Error::Usage(
                "center locus needs an ellipse or circle table".into(),
            ))
        }
    };
    let map_residual = verify_periodic(oval, orbit)?;
    if map_residual > 1e-7 {
        return Err(Error::NotPeriodic(map_residual));
    }
    let c2 = a * a - b * b;
    let focus = Vec2::new(c2.max(0.0).sqrt(), 0.0);
    let mean_sum: f64 = orbit
        .vertices
        .iter()
        .map(|v| v.dist(focus) + v.dist(focus * -1.0))
        .sum::<f64>()
        / orbit.vertices.len() as f64;
    let big_a = 0.5 * mean_sum;
    let big_b = (big_a * big_a - c2).sqrt();
    let (ca, cb) = (big_a * big_a / a, big_b * big_b / b);
    let mut worst = 0.0_f64;
    for v in &orbit.vertices {
        let c = circle_center(oval, *v)?;
        let res = (c.x / ca).powi(2) + (c.y / cb).powi(2) - 1.0;
        worst = worst.max(res.abs());
    }
    Ok(worst)
}
