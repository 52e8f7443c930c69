//! Far-field behaviour of the map: the limiting radial drift flow, decay of
//! the double-step-versus-flow residual, the small-parameter chart near
//! infinity with its straightening change of variables, and the companion
//! area-reflection step.

use crate::degenerate::SegmentTable;
use crate::error::{Error, Result};
use crate::geom::{wrap_near, Vec2, PI, TAU};
use crate::map::{self, Stride};
use crate::oval::Oval;
use crate::solve::{integrate, linear_fit, refine_root};

/// Rotation-covariant field about a fixed origin: at polar angle `alpha` the
/// value is `-speed(alpha)` times the counterclockwise unit tangent, so the
/// field is homogeneous of degree zero and its flow conserves the radius.
pub struct RadialField {
    origin: Vec2,
    speed_of: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl RadialField {
    pub fn new(origin: Vec2, speed: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RadialField {
            origin,
            speed_of: Box::new(speed),
        }
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    /// Angular speed coefficient at polar angle alpha.
    pub fn speed(&self, alpha: f64) -> f64 {
        (self.speed_of)(alpha)
    }

    /// Cartesian value at x.
    pub fn value(&self, x: Vec2) -> Result<Vec2> {
        let u = x - self.origin;
        if u.norm() == 0.0 {
            return Err(Error::AtOrigin);
        }
        let alpha = u.angle();
        Ok(Vec2::unit(alpha).perp() * (-self.speed(alpha)))
    }
}

/// Limiting drift field of the double step about `origin`: angular speed
/// twice the table width across the ray direction.
pub fn drift_field(oval: &Oval, origin: Vec2) -> RadialField {
    let table = oval.clone();
    RadialField::new(origin, move |alpha| 2.0 * table.width(alpha))
}

/// Value of the double-step drift field at a point.
pub fn field_x(oval: &Oval, origin: Vec2, x: Vec2) -> Result<Vec2> {
    drift_field(oval, origin).value(x)
}

/// Drift field of the normalized two-pin segment double step, pins at (-1,0)
/// and (1,0): angular speed four times the sine of the polar angle.
pub fn segment_drift_field() -> RadialField {
    RadialField::new(Vec2::ZERO, |alpha| 4.0 * alpha.sin())
}

/// Advance `x` one unit of time along the drift flow about the table origin.
/// Only the polar angle moves; the radius is reproduced from the input, so it
/// drifts by at most a rounding in the final trig reconstruction.
pub fn flow_time1(oval: &Oval, x: Vec2) -> Result<Vec2> {
    let o = oval.origin();
    let u = x - o;
    let r = u.norm();
    if r == 0.0 {
        return Err(Error::AtOrigin);
    }
    let a0 = u.angle();
    // Time to reach angle a (a <= a0), from dt = -r da / (2 w).
    let elapsed = |a: f64| 0.5 * r * integrate(|s| 1.0 / oval.width(s), a, a0, 1e-16);
    // Angular speed is at most 2*diameter/r, which caps how far one unit of
    // time can move the angle; the pad keeps the far end strictly past it.
    let reach = 2.05 * oval.diameter() / r + 1e-9;
    let g = |a: f64| (elapsed(a) - 1.0, -0.5 * r / oval.width(a));
    let root = refine_root(g, (a0 - reach, a0), 1e-13)?;
    Ok(o + Vec2::unit(root) * r)
}

/// Gap between the double step and the unit-time drift flow started at x.
/// The comparison is a far-field statement, so starts closer than ten
/// diameters are rejected.
pub fn main1_residual(oval: &Oval, x: Vec2) -> Result<f64> {
    let o = oval.origin();
    if (x - o).norm() < 10.0 * oval.diameter() {
        return Err(Error::Usage(
            "far-field residual needs the start at least ten diameters out".into(),
        ));
    }
    let s1 = map::step(oval, x)?;
    let s2 = map::step(oval, s1.image)?;
    Ok(s2.image.dist(flow_time1(oval, x)?))
}

/// Sup of the double-step-versus-flow gap over a direction grid, per radius.
pub struct AsymptoticReport {
    pub radii: Vec<f64>,
    pub sup_residual: Vec<f64>,
    pub directions: usize,
    /// Direction samples skipped because tangency classification failed;
    /// tables with degenerate curvature can produce these in the far field.
    pub branch_ambiguities: usize,
}

pub fn residual_report(oval: &Oval, radii: &[f64], directions: usize) -> Result<AsymptoticReport> {
    if directions == 0 || radii.is_empty() {
        return Err(Error::EmptyInput);
    }
    let o = oval.origin();
    let mut sup = Vec::with_capacity(radii.len());
    let mut skipped = 0usize;
    for &r in radii {
        let mut worst = 0.0f64;
        for k in 0..directions {
            let x = o + Vec2::unit(TAU * k as f64 / directions as f64) * r;
            match main1_residual(oval, x) {
                Ok(v) => worst = worst.max(v),
                Err(Error::BranchAmbiguity { .. }) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
        sup.push(worst);
    }
    Ok(AsymptoticReport {
        radii: radii.to_vec(),
        sup_residual: sup,
        directions,
        branch_ambiguities: skipped,
    })
}

/// Power-law summary of a residual report: `slope` is the log-log
/// least-squares exponent, `c_hat` the largest `r * sup` seen, so
/// `sup <= c_hat / r` holds at every sampled radius by construction.
pub struct DecayFit {
    pub c_hat: f64,
    pub slope: f64,
}

/// Least-squares fit in log-log coordinates.
pub fn decay_fit(report: &AsymptoticReport) -> Result<DecayFit> {
    let n = report.radii.len();
    if n < 3 {
        return Err(Error::TooFewPoints { need: 3, got: n });
    }
    let xs: Vec<f64> = report.radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = report.sup_residual.iter().map(|s| s.ln()).collect();
    let (slope, _) = linear_fit(&xs, &ys);
    let c_hat = report
        .radii
        .iter()
        .zip(&report.sup_residual)
        .map(|(r, s)| r * s)
        .fold(0.0_f64, f64::max);
    Ok(DecayFit { c_hat, slope })
}

/// Radial extent of a run of double steps, with the largest single
/// double-step displacement seen along the way.
pub struct ScanExtent {
    pub r_min: f64,
    pub r_max: f64,
    pub max_step: f64,
}

pub fn stability_scan(oval: &Oval, x0: Vec2, n: usize) -> Result<ScanExtent> {
    let o = oval.origin();
    let mut x = x0;
    let r0 = (x0 - o).norm();
    let (mut r_min, mut r_max, mut max_step) = (r0, r0, 0.0f64);
    for i in 0..n {
        let s1 = map::step(oval, x).map_err(|e| e.at_step(i))?;
        let s2 = map::step(oval, s1.image).map_err(|e| e.at_step(i))?;
        max_step = max_step.max(s2.image.dist(x));
        x = s2.image;
        let r = (x - o).norm();
        r_min = r_min.min(r);
        r_max = r_max.max(r);
    }
    Ok(ScanExtent {
        r_min,
        r_max,
        max_step,
    })
}

/// Apex on the far tangent ray: at distance 1/rho from the origin, with its
/// positive tangency at parameter alpha.
fn chart_point(oval: &Oval, alpha: f64, rho: f64) -> Result<Vec2> {
    if !(rho > 0.0) {
        return Err(Error::Usage("chart parameter must be positive".into()));
    }
    let r = 1.0 / rho;
    let cp = oval.curve_point(alpha);
    let u = cp.position - oval.origin();
    let m = u.dot(cp.tangent);
    let disc = m * m + r * r - u.norm_sq();
    if disc <= 0.0 {
        return Err(Error::Usage("chart radius must clear the tangent foot".into()));
    }
    Ok(cp.position - cp.tangent * (m + disc.sqrt()))
}

/// One stride of the map read in the chart. Returns the lifted tangency
/// parameter of the image (near alpha + pi per step), the image inverse
/// radius, and the measured inverse radius of the start, which absorbs the
/// rounding of the chart placement.
fn chart_stride(oval: &Oval, alpha: f64, rho: f64, stride: Stride) -> Result<(f64, f64, f64)> {
    let o = oval.origin();
    let a_pt = chart_point(oval, alpha, rho)?;
    let rho_in = 1.0 / (a_pt - o).norm();
    let s1 = map::step(oval, a_pt)?;
    let (exit, image, shift) = match stride {
        Stride::Single => (s1.exit.alpha, s1.image, PI),
        Stride::Double => {
            let s2 = map::step(oval, s1.image)?;
            (s2.exit.alpha, s2.image, TAU)
        }
    };
    // The exit tangency of a step is the positive tangency of its image, so
    // it is the chart parameter of the image directly.
    let lifted = wrap_near(exit, alpha + shift);
    Ok((lifted, 1.0 / (image - o).norm(), rho_in))
}

/// Richardson limit of three estimates at parameter h, h/2, h/4, with the
/// disagreement of the two first-stage values measured against the scale of
/// the data (floored, so a limit that is genuinely zero is not flagged).
fn richardson_gated(e: [f64; 3], floor: f64, rel_tol: f64) -> Result<f64> {
    let r1a = 2.0 * e[1] - e[0];
    let r1b = 2.0 * e[2] - e[1];
    let scale = e[0]
        .abs()
        .max(e[1].abs())
        .max(e[2].abs())
        .max(floor);
    let rel = (r1b - r1a).abs() / scale;
    if rel > rel_tol {
        return Err(Error::ExtrapolationUnstable { rel });
    }
    Ok((4.0 * r1b - r1a) / 3.0)
}

const CHART_RHOS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

fn expansion_at(oval: &Oval, alpha: f64, stride: Stride) -> Result<(f64, f64)> {
    let shift = PI * stride.count() as f64;
    let mut fe = [0.0; 3];
    let mut ge = [0.0; 3];
    for (i, &rho) in CHART_RHOS.iter().enumerate() {
        let (lifted, rho_out, rho_in) = chart_stride(oval, alpha, rho, stride)?;
        fe[i] = (lifted - alpha - shift) / rho_in;
        ge[i] = (rho_out - rho_in) / (rho_in * rho_in);
    }
    let f = richardson_gated(fe, 1e-6, 1e-3)?;
    // The ratio (rho_out - rho_in) / rho_in^2 carries the rounding noise of
    // the image point divided by rho^2, a few parts in 1e-8 at these rhos,
    // so the agreement gate for g needs a floor well above that. It also
    // converges one order slower than f: its first-stage estimates still
    // disagree by the quartic chart coefficient times rho^2, which for an
    // eccentric table is a genuine few-per-thousand effect, so the gate
    // only rejects outright divergence.
    let g = richardson_gated(ge, 3e-5 * (1.0 + f.abs()), 3e-2)?;
    Ok((f, g))
}

/// Leading chart coefficients of one step at parameter alpha: the angle
/// advance past pi per unit inverse radius, and the quadratic gain of the
/// inverse radius.
pub fn infinity_expansion(oval: &Oval, alpha: f64) -> Result<(f64, f64)> {
    expansion_at(oval, alpha, Stride::Single)
}

/// Chart coefficients of the double step (angle advance past 2 pi).
pub fn infinity_expansion_double(oval: &Oval, alpha: f64) -> Result<(f64, f64)> {
    expansion_at(oval, alpha, Stride::Double)
}

/// Chart coefficient tables on a uniform parameter grid.
pub struct InfinityChart {
    pub alphas: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// Radii the estimates were extrapolated from.
    pub radii: Vec<f64>,
}

pub fn infinity_chart(oval: &Oval, n: usize, stride: Stride) -> Result<InfinityChart> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut alphas = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        let alpha = TAU * i as f64 / n as f64;
        let (fi, gi) = expansion_at(oval, alpha, stride)?;
        alphas.push(alpha);
        f.push(fi);
        g.push(gi);
    }
    Ok(InfinityChart {
        alphas,
        f,
        g,
        radii: CHART_RHOS.iter().map(|r| 1.0 / r).collect(),
    })
}

/// Straightening tables on a uniform grid over one period: `b` is the
/// exponential of the cumulative trapezoid integral of -g/f and `a` the
/// cumulative trapezoid integral of b/f. Evaluation between nodes is cubic
/// Hermite using the defining derivatives a' = b/f and b' = -b g / f.
pub struct LazutkinTables {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn lazutkin_change(f: &[f64], g: &[f64]) -> Result<LazutkinTables> {
    let n = f.len();
    if n < 2 || g.len() != n {
        return Err(Error::EmptyInput);
    }
    for &v in f {
        if v.abs() < 1e-8 {
            return Err(Error::SingularF(v));
        }
    }
    let h = TAU / n as f64;
    let q: Vec<f64> = (0..n).map(|i| -g[i] / f[i]).collect();
    let mut cum = vec![0.0; n];
    for i in 1..n {
        cum[i] = cum[i - 1] + 0.5 * h * (q[i - 1] + q[i]);
    }
    let b: Vec<f64> = cum.iter().map(|c| c.exp()).collect();
    let p: Vec<f64> = (0..n).map(|i| b[i] / f[i]).collect();
    let mut a = vec![0.0; n];
    for i in 1..n {
        a[i] = a[i - 1] + 0.5 * h * (p[i - 1] + p[i]);
    }
    Ok(LazutkinTables {
        f: f.to_vec(),
        g: g.to_vec(),
        a,
        b,
    })
}

impl LazutkinTables {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// Multiplicative gain of b over one full period.
    pub fn b_period_factor(&self) -> f64 {
        let n = self.len();
        let h = TAU / n as f64;
        let q = |i: usize| -self.g[i] / self.f[i];
        ((self.b[n - 1].ln()) + 0.5 * h * (q(n - 1) + q(0))).exp()
    }

    /// Increment of a over one full period.
    pub fn a_period(&self) -> f64 {
        let n = self.len();
        let h = TAU / n as f64;
        let p_end = self.b_period_factor() / self.f[0];
        self.a[n - 1] + 0.5 * h * (self.b[n - 1] / self.f[n - 1] + p_end)
    }

    /// Node value and derivative of a, index n meaning the top of the period.
    fn node_a(&self, i: usize) -> (f64, f64) {
        let n = self.len();
        if i < n {
            (self.a[i], self.b[i] / self.f[i])
        } else {
            (self.a_period(), self.b_period_factor() / self.f[0])
        }
    }

    fn node_b(&self, i: usize) -> (f64, f64) {
        let n = self.len();
        if i < n {
            (self.b[i], -self.b[i] * self.g[i] / self.f[i])
        } else {
            let top = self.b_period_factor();
            (top, -top * self.g[0] / self.f[0])
        }
    }

    fn hermite(&self, u: f64, node: impl Fn(usize) -> (f64, f64)) -> f64 {
        let n = self.len();
        let h = TAU / n as f64;
        let u0 = u.rem_euclid(TAU);
        let i = ((u0 / h) as usize).min(n - 1);
        let t = (u0 - i as f64 * h) / h;
        let (y0, m0) = node(i);
        let (y1, m1) = node(i + 1);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * m1
    }

    /// a at any real parameter, unwrapped across periods via
    /// a(u + period) = a_period + b_period_factor * a(u).
    pub fn eval_a(&self, u: f64) -> f64 {
        let wraps = (u / TAU).floor() as i64;
        let mut val = self.hermite(u, |i| self.node_a(i));
        let ap = self.a_period();
        let bp = self.b_period_factor();
        for _ in 0..wraps.max(0) {
            val = ap + bp * val;
        }
        for _ in 0..(-wraps).max(0) {
            val = (val - ap) / bp;
        }
        val
    }

    /// b at any real parameter, unwrapped via b(u + period) = factor * b(u).
    pub fn eval_b(&self, u: f64) -> f64 {
        let wraps = (u / TAU).floor() as i64;
        self.hermite(u, |i| self.node_b(i)) * self.b_period_factor().powi(wraps as i32)
    }
}

/// Size of the straightened double step at inverse radius rho: max over the
/// given parameters of |x'-x-y|/y^2 and of |y'-y|/y^3, where x = a(alpha),
/// y = b(alpha) rho and primes are after one double step. Tables should come
/// from double-step chart grids.
pub fn normal_form_residuals(
    oval: &Oval,
    tables: &LazutkinTables,
    rho: f64,
    angles: &[f64],
) -> Result<(f64, f64)> {
    if angles.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut qx = 0.0f64;
    let mut qy = 0.0f64;
    for &alpha in angles {
        let (lifted, rho2, rho_in) = chart_stride(oval, alpha, rho, Stride::Double)?;
        let x = tables.eval_a(alpha);
        let y = tables.eval_b(alpha) * rho_in;
        let u1 = lifted - TAU;
        let xp = tables.eval_a(u1);
        let yp = tables.eval_b(u1) * rho2;
        qx = qx.max((xp - x - y).abs() / (y * y));
        qy = qy.max((yp - y).abs() / (y * y * y).abs());
    }
    Ok((qx, qy))
}

/// Reflection step through the orientation-consistent tangency: z = 2y - x.
pub fn outer_area_step(oval: &Oval, x: Vec2) -> Result<Vec2> {
    let fan = oval.tangent_fan(x)?;
    Ok(fan.pos.position * 2.0 - x)
}

/// The same reflection for the degenerate segment table: the pivot is the
/// endpoint the length step would use from that side.
pub fn outer_area_segment_step(table: &SegmentTable, x: Vec2) -> Result<Vec2> {
    let side = table.side(x);
    if side == 0.0 {
        return Err(Error::OnAxis);
    }
    let (e1, e2) = table.endpoints();
    let pivot = if side > 0.0 { e1 } else { e2 };
    Ok(pivot * 2.0 - x)
}

/// Mass of an angular interval under the reciprocal-width density 2/w.
pub fn width_mu_interval(oval: &Oval, psi0: f64, psi1: f64) -> f64 {
    integrate(|s| 2.0 / oval.width(s), psi0, psi1, 1e-12)
}
