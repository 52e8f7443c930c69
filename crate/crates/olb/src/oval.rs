//! Strictly convex tables given by their support function p(alpha), where alpha is
//! the outward normal angle. The curve is traversed counterclockwise:
//!
//!   position(alpha) = (p cos a - p' sin a, p sin a + p' cos a),
//!   tangent(alpha)  = (-sin a, cos a),
//!   radius of curvature = p + p'' > 0.
//!
//! Widths and tangency conditions are translation invariant and are computed from
//! the raw kind frame; the stored reference origin only anchors polar quantities
//! (radial duals, level functions, orbit angles).

use crate::error::{Error, Result};
use crate::geom::{wrap_angle, Vec2, PI, TAU};
use crate::solve::{max_scalar, refine_root};

/// Construction-time convexity grid.
const CONVEXITY_GRID: usize = 1024;
/// Apex closer to the boundary than this is rejected by tangent_fan.
const BOUNDARY_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum OvalKind {
    Circle {
        r: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// Unit ball of the l_p norm scaled by `scale`; support is the dual l_q norm,
    /// 1/p + 1/q = 1. Curvature degenerates at the four axis points when p < 2.
    Lp {
        p: f64,
        scale: f64,
    },
    /// Truncated trigonometric support series c0 + sum_k (a_k cos k a + b_k sin k a).
    Fourier {
        c0: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
}

impl OvalKind {
    /// Support value and first two derivatives in the kind's own frame.
    fn jet(&self, alpha: f64) -> (f64, f64, f64) {
        match self {
            OvalKind::Circle { r } => (*r, 0.0, 0.0),
            OvalKind::Ellipse { a, b } => {
                let (s, c) = alpha.sin_cos();
                let p = (a * a * c * c + b * b * s * s).sqrt();
                let d1 = (b * b - a * a) * s * c / p;
                let d2 = a * a * b * b / (p * p * p) - p;
                (p, d1, d2)
            }
            OvalKind::Lp { p, scale } => {
                let q = p / (p - 1.0);
                let (s, c) = alpha.sin_cos();
                // Floor keeps 0^(q-2) from turning into inf (and then 0 * inf
                // into NaN) at exact axis angles when q < 2.
                let (ac, as_) = (c.abs().max(1e-300), s.abs().max(1e-300));
                let (uq, vq) = (ac.powf(q), as_.powf(q));
                let (uq2, vq2) = (ac.powf(q - 2.0), as_.powf(q - 2.0));
                let big = uq + vq;
                let d_big = q * c * s * (vq2 - uq2);
                let dd_big = q
                    * ((c * c - s * s) * (vq2 - uq2)
                        + (q - 2.0) * (c * c * vq2 + s * s * uq2));
                let g = big.powf(1.0 / q);
                let d1 = g * d_big / (q * big);
                let r = d_big / big;
                let d2 = g / q * (dd_big / big - (q - 1.0) / q * r * r);
                (scale * g, scale * d1, scale * d2)
            }
            OvalKind::Fourier { c0, cos, sin } => {
                let mut p = *c0;
                let mut d1 = 0.0;
                let mut d2 = 0.0;
                for i in 0..cos.len().max(sin.len()) {
                    let a = cos.get(i).copied().unwrap_or(0.0);
                    let b = sin.get(i).copied().unwrap_or(0.0);
                    let k = (i + 1) as f64;
                    let (sk, ck) = (k * alpha).sin_cos();
                    p += a * ck + b * sk;
                    d1 += k * (-a * sk + b * ck);
                    d2 -= k * k * (a * ck + b * sk);
                }
                (p, d1, d2)
            }
        }
    }

    fn validate_params(&self) -> Result<()> {
        let ok = match self {
            OvalKind::Circle { r } => *r > 0.0,
            OvalKind::Ellipse { a, b } => *a > 0.0 && *b > 0.0,
            OvalKind::Lp { p, scale } => *p > 1.0 && *scale > 0.0,
            OvalKind::Fourier { c0, .. } => *c0 > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SpecParse(format!("non-positive table parameters: {self:?}")))
        }
    }
}

/// Boundary point with its frame data.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    /// Outward normal angle, wrapped to [0, 2pi).
    pub alpha: f64,
    pub position: Vec2,
    /// Unit tangent of the counterclockwise traversal.
    pub tangent: Vec2,
    pub curvature: f64,
}

/// Tangent data of an exterior apex: both tangency points, segment lengths, and
/// the fan angle phi at the apex, always in (0, pi).
#[derive(Clone, Copy, Debug)]
pub struct TangentFan {
    pub apex: Vec2,
    /// Tangency whose tangent line carries the image of the apex.
    pub pos: CurvePoint,
    pub neg: CurvePoint,
    pub len_pos: f64,
    pub len_neg: f64,
    pub phi: f64,
    /// Distance from the apex to the table.
    pub clearance: f64,
}

#[derive(Clone, Copy, Debug)]
pub enum DualMode {
    Euclidean,
    /// Euclidean dual rotated by -90 degrees, matching the identification of
    /// covectors with vectors through the standard area form.
    Symplectic,
}

/// Star-shaped curve given by a radial function about the origin.
pub struct RadialCurve {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl RadialCurve {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> RadialCurve {
        RadialCurve { f: Box::new(f) }
    }

    pub fn radius(&self, alpha: f64) -> f64 {
        (self.f)(alpha)
    }

    pub fn point(&self, alpha: f64) -> Vec2 {
        Vec2::unit(alpha) * self.radius(alpha)
    }

    /// Numeric support function of the region enclosed by the curve.
    pub fn support(&self, alpha: f64) -> f64 {
        let obj = |beta: f64| self.radius(beta) * (beta - alpha).cos();
        max_scalar(obj, alpha - PI / 2.0, alpha + PI / 2.0, 256, 1e-12).1
    }
}

#[derive(Clone, Debug)]
pub struct Oval {
    kind: OvalKind,
    origin: Vec2,
    diameter: f64,
    /// Grid maximum of |p'| in the kind frame. Support-gap functions of points
    /// farther out than this are unimodal, so a coarse scan bracket suffices.
    deriv_max: f64,
}

impl Oval {
    /// Builds the table and anchors the origin at the curve centroid
    /// (mean of the boundary over a uniform 1024-angle grid).
    pub fn new(kind: OvalKind) -> Result<Oval> {
        let mut sum = Vec2::ZERO;
        let probe = Oval {
            kind: kind.clone(),
            origin: Vec2::ZERO,
            diameter: 0.0,
            deriv_max: 0.0,
        };
        for i in 0..CONVEXITY_GRID {
            sum += probe.point_at(TAU * i as f64 / CONVEXITY_GRID as f64);
        }
        Oval::with_origin(kind, sum / CONVEXITY_GRID as f64)
    }

    /// Builds the table with an explicit interior reference origin.
    pub fn with_origin(kind: OvalKind, origin: Vec2) -> Result<Oval> {
        kind.validate_params()?;
        // Half-step offset keeps the grid off the exact curvature zeros of lp tables.
        let curv_tol = match kind {
            OvalKind::Lp { .. } => 1e-8,
            _ => 0.0,
        };
        let mut scale: f64 = 0.0;
        let mut deriv_max: f64 = 0.0;
        for i in 0..CONVEXITY_GRID {
            let alpha = TAU * (i as f64 + 0.5) / CONVEXITY_GRID as f64;
            let (p, d1, d2) = kind.jet(alpha);
            scale = scale.max(p.abs());
            deriv_max = deriv_max.max(d1.abs());
            if !(p + d2 > curv_tol) {
                return Err(Error::NotConvex { alpha, min: p + d2 });
            }
        }
        let mut oval = Oval {
            kind,
            origin,
            diameter: 0.0,
            deriv_max,
        };
        for i in 0..CONVEXITY_GRID {
            let alpha = TAU * (i as f64 + 0.5) / CONVEXITY_GRID as f64;
            if oval.support(alpha) <= 1e-12 * scale {
                return Err(Error::OriginOutside);
            }
        }
        oval.diameter = max_scalar(|a| oval.width(a), 0.0, PI, 2048, 1e-10).1;
        Ok(oval)
    }

    pub fn kind(&self) -> &OvalKind {
        &self.kind
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    /// Maximal width, cached at construction.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Grid maximum of |p'|; the unimodality threshold for support-gap scans.
    pub fn deriv_max(&self) -> f64 {
        self.deriv_max
    }

    /// Scan resolution for bracketing extrema of the support gap of `z`: the gap
    /// has a single hump when |z| exceeds max |p'|, so the coarse scan is safe;
    /// otherwise a dense scan guards against secondary critical points.
    pub fn gap_scan_samples(&self, z: Vec2) -> usize {
        if z.norm() > self.deriv_max {
            crate::solve::SCAN_SAMPLES
        } else {
            4096
        }
    }

    /// Support jet in the kind frame; translation-invariant queries use this.
    pub fn raw_jet(&self, alpha: f64) -> (f64, f64, f64) {
        self.kind.jet(alpha)
    }

    /// Support function about the reference origin, with two derivatives.
    pub fn support_jet(&self, alpha: f64) -> (f64, f64, f64) {
        let (p, d1, d2) = self.kind.jet(alpha);
        let n = Vec2::unit(alpha);
        let t = n.perp();
        (p - self.origin.dot(n), d1 - self.origin.dot(t), d2 + self.origin.dot(n))
    }

    pub fn support(&self, alpha: f64) -> f64 {
        self.support_jet(alpha).0
    }

    pub fn point_at(&self, alpha: f64) -> Vec2 {
        let (p, d1, _) = self.kind.jet(alpha);
        let (s, c) = alpha.sin_cos();
        Vec2::new(p * c - d1 * s, p * s + d1 * c)
    }

    pub fn curve_point(&self, alpha: f64) -> CurvePoint {
        let (p, _, d2) = self.kind.jet(alpha);
        CurvePoint {
            alpha: wrap_angle(alpha),
            position: self.point_at(alpha),
            tangent: Vec2::unit(alpha).perp(),
            curvature: 1.0 / (p + d2),
        }
    }

    /// Radius of curvature p + p'' at normal angle alpha.
    pub fn curvature_radius(&self, alpha: f64) -> f64 {
        let (p, _, d2) = self.kind.jet(alpha);
        p + d2
    }

    /// Distance between the two support lines parallel to direction alpha.
    pub fn width(&self, alpha: f64) -> f64 {
        self.kind.jet(alpha + PI / 2.0).0 + self.kind.jet(alpha - PI / 2.0).0
    }

    /// Support line at normal angle alpha, in the global frame.
    pub fn support_line(&self, alpha: f64) -> crate::geom::Line {
        crate::geom::Line::new(Vec2::unit(alpha), self.kind.jet(alpha).0)
    }

    /// Signed distance from `z` to the support line at alpha (positive outside).
    pub fn line_gap(&self, alpha: f64, z: Vec2) -> f64 {
        z.dot(Vec2::unit(alpha)) - self.kind.jet(alpha).0
    }

    /// Distance from an exterior point to the table (max over support directions).
    pub fn exterior_distance(&self, z: Vec2) -> f64 {
        let f = |beta: f64| self.line_gap(beta, z);
        max_scalar(f, 0.0, TAU, self.gap_scan_samples(z), 1e-13).1
    }

    /// Both tangency points of an exterior apex with orientation classification.
    pub fn tangent_fan(&self, apex: Vec2) -> Result<TangentFan> {
        let f = |beta: f64| self.line_gap(beta, apex);
        let fd = |beta: f64| {
            let (p, d1, _) = self.kind.jet(beta);
            let n = Vec2::unit(beta);
            (apex.dot(n) - p, apex.dot(n.perp()) - d1)
        };
        let samples = self.gap_scan_samples(apex);
        let (beta_far, dist) = max_scalar(f, 0.0, TAU, samples, 1e-13);
        if dist <= BOUNDARY_MARGIN {
            return Err(Error::PointInsideCurve {
                margin: BOUNDARY_MARGIN,
            });
        }
        // The gap is positive at beta_far and negative at the antipode, so each
        // half-turn around beta_far brackets exactly one tangency. Solve to the
        // rounding floor of the gap itself: a tangency angle error delta costs
        // the downstream exit line about |apex|^2 * delta in image position, so
        // far apexes need the root at machine resolution, not at a fixed 1e-12.
        let tol = 4.0 * f64::EPSILON * apex.norm().max(1.0);
        let r1 = refine_root(fd, (beta_far - PI, beta_far), tol)?;
        let r2 = refine_root(fd, (beta_far, beta_far + PI), tol)?;
        let cp1 = self.curve_point(r1);
        let cp2 = self.curve_point(r2);
        // Positive tangency: the counterclockwise tangent at the touch point heads
        // away from the apex, dot(tangent, apex - position) < 0.
        let s1 = cp1.tangent.dot(apex - cp1.position);
        let s2 = cp2.tangent.dot(apex - cp2.position);
        let (pos, neg) = if s1 < 0.0 && s2 > 0.0 {
            (cp1, cp2)
        } else if s2 < 0.0 && s1 > 0.0 {
            (cp2, cp1)
        } else {
            return Err(Error::BranchAmbiguity { candidates: 2 });
        };
        let len_pos = apex.dist(pos.position);
        let len_neg = apex.dist(neg.position);
        let phi = crate::geom::angle_between(pos.position - apex, neg.position - apex);
        Ok(TangentFan {
            apex,
            pos,
            neg,
            len_pos,
            len_neg,
            phi,
            clearance: dist,
        })
    }

    /// Minkowski symmetrization: support p(a) + p(a + pi), exact per kind.
    pub fn central_symmetrization(&self) -> Oval {
        let kind = match &self.kind {
            OvalKind::Circle { r } => OvalKind::Circle { r: 2.0 * r },
            OvalKind::Ellipse { a, b } => OvalKind::Ellipse { a: 2.0 * a, b: 2.0 * b },
            OvalKind::Lp { p, scale } => OvalKind::Lp {
                p: *p,
                scale: 2.0 * scale,
            },
            OvalKind::Fourier { c0, cos, sin } => {
                // Odd harmonics cancel between alpha and alpha + pi.
                let keep = |v: &Vec<f64>| {
                    v.iter()
                        .enumerate()
                        .map(|(i, &c)| if (i + 1) % 2 == 0 { 2.0 * c } else { 0.0 })
                        .collect()
                };
                OvalKind::Fourier {
                    c0: 2.0 * c0,
                    cos: keep(cos),
                    sin: keep(sin),
                }
            }
        };
        Oval::with_origin(kind, Vec2::ZERO).expect("symmetrization preserves convexity")
    }

    /// Polar dual about the reference origin, radius 1/p(alpha).
    pub fn polar_dual(&self, mode: DualMode) -> RadialCurve {
        let oval = self.clone();
        match mode {
            DualMode::Euclidean => RadialCurve::new(move |a| 1.0 / oval.support(a)),
            DualMode::Symplectic => {
                RadialCurve::new(move |a| 1.0 / oval.support(a + PI / 2.0))
            }
        }
    }

    /// Dual of the central symmetrization: radius 1/w(alpha). Width does not
    /// depend on the origin, so neither does this curve.
    pub fn dual_symmetrized(&self) -> RadialCurve {
        let oval = self.clone();
        RadialCurve::new(move |a| 1.0 / oval.width(a))
    }
}
