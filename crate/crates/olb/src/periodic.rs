//! Variational search for periodic orbits: circumscribed polygons of locally
//! minimal perimeter, found by cyclic coordinate Newton descent on the
//! tangency angles, plus the empirical period-versus-radius scan.

use crate::error::{Error, Result};
use crate::geom::{Vec2, PI, TAU};
use crate::map::{self, generating};
use crate::oval::Oval;

/// A k-periodic circumscribed polygon with rotation number m.
///
/// `alphas` are lifted tangency normal angles, strictly increasing with
/// total winding `2 pi m`; `vertices[i]` is the polygon corner between
/// tangencies i and i+1, i.e. the intersection of those two tangent lines.
#[derive(Clone, Debug)]
pub struct PeriodicOrbit {
    pub k: usize,
    pub m: usize,
    pub alphas: Vec<f64>,
    pub vertices: Vec<Vec2>,
    pub perimeter: f64,
}

impl PeriodicOrbit {
    /// Largest |vertex| over the polygon.
    pub fn max_radius(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.norm())
            .fold(0.0_f64, f64::max)
    }

    /// Max cyclic defect of the stationarity relation
    /// d2(a_prev, a) + d1(a, a_next) at every tangency, per arc length.
    pub fn generating_residual(&self, oval: &Oval) -> Result<f64> {
        let k = self.k;
        let mut worst = 0.0_f64;
        for i in 0..k {
            let (prev, next) = self.lifted_neighbors(i);
            let r = relation(oval, prev, self.alphas[i], next)?;
            worst = worst.max(r.abs());
        }
        Ok(worst)
    }

    fn lifted_neighbors(&self, i: usize) -> (f64, f64) {
        let wind = TAU * self.m as f64;
        let prev = if i == 0 {
            self.alphas[self.k - 1] - wind
        } else {
            self.alphas[i - 1]
        };
        let next = if i == self.k - 1 {
            self.alphas[0] + wind
        } else {
            self.alphas[i + 1]
        };
        (prev, next)
    }
}

/// Stationarity residual at the middle angle of a consecutive triple.
fn relation(oval: &Oval, prev: f64, cur: f64, next: f64) -> Result<f64> {
    let left = generating(oval, prev, cur)?;
    let right = generating(oval, cur, next)?;
    Ok(left.d2 + right.d1)
}

const MAX_SWEEPS: usize = 500;
const GRAD_TOL: f64 = 1e-10;
// Tangency gaps must stay strictly inside (0, pi): at either end the two
// tangent lines turn parallel and the polygon corner escapes to infinity.
const GAP_MARGIN: f64 = 1e-6;

/// Locally minimal-perimeter circumscribed k-gon with rotation number m,
/// from the regular configuration, by cyclic coordinate Newton descent.
///
/// Each sweep updates one tangency angle at a time by a Newton step on its
/// stationarity residual, halving the step as needed to keep both adjacent
/// gaps inside (0, pi). Converged when every residual of a sweep is below
/// 1e-10 in magnitude.
pub fn find_periodic(oval: &Oval, k: usize, m: usize) -> Result<PeriodicOrbit> {
    if k < 3 {
        return Err(Error::Usage(format!("period k = {k} must be at least 3")));
    }
    if m < 1 || 2 * m >= k {
        return Err(Error::Usage(format!(
            "rotation number m = {m} must satisfy 1 <= m < k/2 = {}/2",
            k
        )));
    }
    let wind = TAU * m as f64;
    let mut a: Vec<f64> = (0..k).map(|i| wind * i as f64 / k as f64).collect();

    let mut grad = f64::INFINITY;
    for _sweep in 0..MAX_SWEEPS {
        grad = 0.0;
        for i in 0..k {
            let prev = if i == 0 { a[k - 1] - wind } else { a[i - 1] };
            let next = if i == k - 1 { a[0] + wind } else { a[i + 1] };
            let phi = descent_residual(oval, prev, a[i], next, i)?;
            grad = grad.max(phi.abs());

            // Central-difference slope of the residual in the angle; the
            // probe offset stays well inside the current gaps.
            let room = (a[i] - prev).min(next - a[i]);
            let h = 1e-6_f64.min(0.25 * room);
            let fp = descent_residual(oval, prev, a[i] + h, next, i)?;
            let fm = descent_residual(oval, prev, a[i] - h, next, i)?;
            let slope = (fp - fm) / (2.0 * h);
            if !slope.is_finite() || slope.abs() < 1e-12 {
                return Err(Error::DegenerateConfig { index: i });
            }

            let mut step = -phi / slope;
            let mut halvings = 0;
            loop {
                let cand = a[i] + step;
                let lo_gap = cand - prev;
                let hi_gap = next - cand;
                if lo_gap > GAP_MARGIN
                    && lo_gap < PI - GAP_MARGIN
                    && hi_gap > GAP_MARGIN
                    && hi_gap < PI - GAP_MARGIN
                {
                    break;
                }
                halvings += 1;
                if halvings > 60 {
                    return Err(Error::DegenerateConfig { index: i });
                }
                step *= 0.5;
            }
            a[i] += step;
        }
        if grad < GRAD_TOL {
            return Ok(assemble(oval, k, m, a));
        }
    }
    Err(Error::NoConvergence {
        sweeps: MAX_SWEEPS,
        grad,
    })
}

/// The stationarity residual during descent; a gap collapsing to 0 or pi
/// surfaces as a parallel-tangent failure and is reported as a degenerate
/// configuration at the offending index.
fn descent_residual(oval: &Oval, prev: f64, cur: f64, next: f64, index: usize) -> Result<f64> {
    match relation(oval, prev, cur, next) {
        Ok(v) => Ok(v),
        Err(Error::ParallelTangents) => Err(Error::DegenerateConfig { index }),
        Err(e) => Err(e),
    }
}

fn assemble(oval: &Oval, k: usize, m: usize, mut a: Vec<f64>) -> PeriodicOrbit {
    // Normalize the lift so the first angle sits in [0, 2 pi).
    let shift = TAU * (a[0] / TAU).floor();
    for ai in &mut a {
        *ai -= shift;
    }
    let wind = TAU * m as f64;
    let mut vertices = Vec::with_capacity(k);
    let mut perimeter = 0.0;
    for i in 0..k {
        let next = if i == k - 1 { a[0] + wind } else { a[i + 1] };
        let ge = generating(oval, a[i], next).expect("converged orbit has interior gaps");
        vertices.push(ge.apex);
        perimeter += ge.h;
    }
    PeriodicOrbit {
        k,
        m,
        alphas: a,
        vertices,
        perimeter,
    }
}

/// Largest geometric-map defect of the polygon: max over corners of the
/// distance from the mapped corner to the next corner.
pub fn verify_periodic(oval: &Oval, orbit: &PeriodicOrbit) -> Result<f64> {
    let k = orbit.vertices.len();
    let mut worst = 0.0_f64;
    for i in 0..k {
        let step = map::step(oval, orbit.vertices[i])?;
        let gap = step.image.dist(orbit.vertices[(i + 1) % k]);
        worst = worst.max(gap);
    }
    Ok(worst)
}

/// One (k, m) cell of the period scan: the orbit's largest vertex radius,
/// or None when the search failed for that rotation number.
#[derive(Clone, Debug)]
pub struct PeriodCell {
    pub m: usize,
    pub radius: Option<f64>,
}

/// Scan row for one period: all admissible rotation numbers and the overall
/// maximum vertex radius among the ones that converged.
#[derive(Clone, Debug)]
pub struct PeriodScanRow {
    pub k: usize,
    pub cells: Vec<PeriodCell>,
    pub max_radius: Option<f64>,
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// For each period k up to k_max, search every admissible rotation number
/// (1 <= m < k/2, coprime to k) and record the largest vertex radius seen.
/// Per-cell failures are recorded and the scan continues.
pub fn period_radius_scan(oval: &Oval, k_max: usize) -> Result<Vec<PeriodScanRow>> {
    if k_max < 3 {
        return Err(Error::Usage(format!(
            "scan limit k_max = {k_max} must be at least 3"
        )));
    }
    let mut rows = Vec::new();
    for k in 3..=k_max {
        let mut cells = Vec::new();
        let mut best: Option<f64> = None;
        for m in 1..k {
            if 2 * m >= k || gcd(m, k) != 1 {
                continue;
            }
            let radius = find_periodic(oval, k, m).ok().map(|o| o.max_radius());
            if let Some(r) = radius {
                best = Some(best.map_or(r, |b: f64| b.max(r)));
            }
            cells.push(PeriodCell { m, radius });
        }
        rows.push(PeriodScanRow {
            k,
            cells,
            max_radius: best,
        });
    }
    Ok(rows)
}
