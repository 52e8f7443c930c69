//! The outer length billiard map. Geometric form: from an exterior apex A with
//! tangencies x (incoming side) and x', inscribe the circle tangent to the curve
//! at x' and to line Ax inside the fan; the image A' is where line(A, x') meets
//! the second common tangent of that circle and the curve. Variational form: the
//! tangency angles of an orbit are critical points of the total tangent-length
//! sum, and consecutive triples satisfy d2(a, a') + d1(a', a'') = 0.

use crate::error::{Error, Result};
use crate::geom::{wrap_angle, wrap_near, Line, Vec2, PI, TAU};
use crate::oval::{CurvePoint, Oval, TangentFan};
use crate::solve::{extrema_scalar, refine_root, scan_brackets, SCAN_SAMPLES};

/// Circle inscribed in the tangent fan: tangent to the curve at `tangency`
/// and to the incoming tangent line, centered on the outward normal.
#[derive(Clone, Copy, Debug)]
pub struct AuxCircle {
    pub center: Vec2,
    pub radius: f64,
    pub tangency: CurvePoint,
}

/// One application of the map with all intermediate geometry retained.
#[derive(Clone, Copy, Debug)]
pub struct MapStep {
    pub apex: Vec2,
    pub fan: TangentFan,
    pub circle: AuxCircle,
    /// Tangency of the exit common tangent line.
    pub exit: CurvePoint,
    pub image: Vec2,
}

/// Generating function H(a, a') = |xA| + |Ax'| and its derivatives with respect
/// to arc length at the two tangency points.
#[derive(Clone, Copy, Debug)]
pub struct GeneratingEval {
    pub apex: Vec2,
    /// |xA|: apex distance to the first tangency.
    pub len_in: f64,
    /// |Ax'|: apex distance to the second tangency.
    pub len_out: f64,
    /// Fan angle at the apex, pi minus the normal-angle gap.
    pub phi: f64,
    pub h: f64,
    pub d1: f64,
    pub d2: f64,
    pub d12: f64,
}

/// Iteration stride for orbits: every step or every second step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stride {
    Single,
    Double,
}

impl Stride {
    pub fn count(self) -> usize {
        match self {
            Stride::Single => 1,
            Stride::Double => 2,
        }
    }
}

/// Inscribed circle of the apex fan, tangent to the curve at the positive
/// tangency x' and to the incoming tangent line Ax.
pub fn aux_circle(oval: &Oval, apex: Vec2) -> Result<AuxCircle> {
    let fan = oval.tangent_fan(apex)?;
    aux_circle_of_fan(oval, &fan)
}

pub fn aux_circle_of_fan(oval: &Oval, fan: &TangentFan) -> Result<AuxCircle> {
    let a = fan.neg.alpha;
    let ap = fan.pos.alpha;
    // Normal-angle gap of a genuine fan lies in (0, pi).
    let delta = wrap_angle(ap - a);
    // Distance from x' to the incoming tangent line.
    let g = -oval.line_gap(a, fan.pos.position);
    // 1 + cos(delta) without cancellation as delta approaches pi.
    let denom = 2.0 * (0.5 * delta).cos().powi(2);
    if !(g > 0.0) || !(denom > 1e-300) || delta >= PI {
        return Err(Error::NoCircle("degenerate tangent fan"));
    }
    let radius = g / denom;
    let center = fan.pos.position + radius * Vec2::unit(ap);
    Ok(AuxCircle {
        center,
        radius,
        tangency: fan.pos,
    })
}

/// One step of the map. Near-boundary apexes (clearance below 1e-6 times the
/// diameter) are rejected: the fan angle degenerates there.
pub fn step(oval: &Oval, apex: Vec2) -> Result<MapStep> {
    let fan = oval.tangent_fan(apex)?;
    let margin = 1e-6 * oval.diameter();
    if fan.clearance < margin {
        return Err(Error::PointInsideCurve { margin });
    }
    let circle = aux_circle_of_fan(oval, &fan)?;
    let exit = exit_tangency(oval, &fan, &circle)?;
    let ray = Line::through(apex, fan.pos.position);
    let tangent = oval.support_line(exit.alpha);
    let image = ray
        .intersect(&tangent, 1e-14)
        .ok_or(Error::NoCircle("exit tangent parallel to the apex ray"))?;
    Ok(MapStep {
        apex,
        fan,
        circle,
        exit,
        image,
    })
}

/// Tangency of the second common tangent of the auxiliary circle and the curve,
/// with the circle on the interior side of both tangent lines.
fn exit_tangency(oval: &Oval, fan: &TangentFan, circle: &AuxCircle) -> Result<CurvePoint> {
    let xp = fan.pos.position;
    let ap = fan.pos.alpha;
    let rho = circle.radius;
    // Common-tangency residual, written so the rho term never cancels
    // catastrophically: gap(beta, x') + 2 rho cos^2((beta - ap)/2).
    let res = |beta: f64| {
        oval.line_gap(beta, xp) + 2.0 * rho * (0.5 * (beta - ap)).cos().powi(2)
    };
    let res_jet = |beta: f64| {
        let (p, d1, _) = oval.raw_jet(beta);
        let n = Vec2::unit(beta);
        let value = xp.dot(n) - p + 2.0 * rho * (0.5 * (beta - ap)).cos().powi(2);
        let deriv = xp.dot(n.perp()) - d1 - rho * (beta - ap).sin();
        (value, deriv)
    };
    let samples = oval.gap_scan_samples(circle.center);
    let ((b_top, _), (b_bot, res_min)) = extrema_scalar(&res, 0.0, TAU, samples, 1e-13);
    if res_min >= 0.0 {
        return Err(Error::NoCircle("no second common tangent"));
    }
    // The residual is positive at its maximum and negative at its minimum, so
    // each arc between them brackets exactly one sign change.
    let b_bot = b_top + wrap_angle(b_bot - b_top);
    // Near the root the residual is two near-cancelling lengths whose rounding
    // noise grows like sqrt(rho), not like rho. Solving down to that floor keeps
    // the exit angle sharp enough that the image, a factor ~rho further out
    // along the exit line, is not smeared; a tolerance proportional to rho would
    // lose the far field entirely.
    let tol = 64.0 * f64::EPSILON * (1.0 + rho).sqrt() * (1.0 + oval.diameter()).sqrt();
    let roots = [
        refine_root(res_jet, (b_top, b_bot), tol)?,
        refine_root(res_jet, (b_bot, b_top + TAU), tol)?,
    ];
    let mut exit = None;
    let mut survivors = 0usize;
    for r in roots {
        let beta = wrap_angle(r);
        // Exclude the two tangents the circle is built from.
        if wrap_near(beta - fan.neg.alpha, 0.0).abs() < 1e-8
            || wrap_near(beta - ap, 0.0).abs() < 1e-8
        {
            continue;
        }
        let q = oval.curve_point(beta);
        // Exit side: ahead of the oriented ray from the apex through x'.
        if (xp - fan.apex).cross(q.position - fan.apex) > 0.0 {
            survivors += 1;
            exit = Some(q);
        }
    }
    match (survivors, exit) {
        (1, Some(q)) => Ok(q),
        (0, _) => Err(Error::NoCircle("no admissible exit tangent")),
        (n, _) => Err(Error::BranchAmbiguity { candidates: n }),
    }
}

/// Generating function evaluation at a pair of tangency angles with the apex
/// reconstructed from the two tangent lines. Derivatives are per arc length.
pub fn generating(oval: &Oval, ax: f64, axp: f64) -> Result<GeneratingEval> {
    let delta = wrap_angle(axp - ax);
    if delta <= 1e-9 || delta >= PI - 1e-9 {
        return Err(Error::ParallelTangents);
    }
    let apex = oval
        .support_line(ax)
        .intersect(&oval.support_line(axp), 1e-12)
        .ok_or(Error::ParallelTangents)?;
    let x = oval.point_at(ax);
    let xp = oval.point_at(axp);
    // Signed tangent-line coordinates; both positive in a genuine configuration.
    let len_in = (apex - x).dot(Vec2::unit(ax).perp());
    let len_out = (xp - apex).dot(Vec2::unit(axp).perp());
    let phi = PI - delta;
    // cot(phi/2) = tan(delta/2).
    let cot_half = (0.5 * delta).tan();
    let k1 = 1.0 / oval.curvature_radius(ax);
    let k2 = 1.0 / oval.curvature_radius(axp);
    let h = len_in + len_out;
    // sin(phi/2) = cos(delta/2).
    let sin_half = (0.5 * delta).cos();
    Ok(GeneratingEval {
        apex,
        len_in,
        len_out,
        phi,
        h,
        d1: -k1 * len_in * cot_half - 1.0,
        d2: k2 * len_out * cot_half + 1.0,
        d12: -k1 * k2 * h / (2.0 * sin_half * sin_half),
    })
}

/// Variational step: the angle a'' past (ax, ax') solving
/// d2(ax, ax') + d1(ax', a'') = 0 on the forward arc (ax', ax' + pi).
pub fn step_variational(oval: &Oval, ax: f64, axp: f64) -> Result<f64> {
    let base = generating(oval, ax, axp)?;
    let residual = |c: f64| -> (f64, f64) {
        match generating(oval, axp, c) {
            // Newton in the angle: the arc-length derivative of d1 in its second
            // slot is d12, times ds/dalpha at c.
            Ok(g) => (base.d2 + g.d1, g.d12 * oval.curvature_radius(c)),
            Err(_) => (f64::NAN, f64::NAN),
        }
    };
    let lo = axp + 1e-6;
    let hi = axp + PI - 1e-6;
    let brackets = scan_brackets(|c| residual(c).0, lo, hi, SCAN_SAMPLES);
    let bracket = *brackets.first().ok_or(Error::NoRoot)?;
    refine_root(residual, bracket, 1e-12)
}

/// Density of the invariant area form at an exterior point:
/// C_A = cot(phi/2) (1/|Ax| + 1/|Ax'|).
pub fn area_form_factor(oval: &Oval, apex: Vec2) -> Result<f64> {
    let fan = oval.tangent_fan(apex)?;
    Ok((0.5 * fan.phi).tan().recip() * (1.0 / fan.len_neg + 1.0 / fan.len_pos))
}

/// Relative defect of C dA under one map step: |C(F(A)) det DF(A) / C(A) - 1|
/// with the Jacobian from central differences of step size `h`.
pub fn form_invariance_residual(oval: &Oval, apex: Vec2, h: f64) -> Result<f64> {
    let ex = Vec2::new(h, 0.0);
    let ey = Vec2::new(0.0, h);
    let col1 = (step(oval, apex + ex)?.image - step(oval, apex - ex)?.image) / (2.0 * h);
    let col2 = (step(oval, apex + ey)?.image - step(oval, apex - ey)?.image) / (2.0 * h);
    let det = col1.cross(col2);
    let c_here = area_form_factor(oval, apex)?;
    let c_image = area_form_factor(oval, step(oval, apex)?.image)?;
    Ok((c_image * det / c_here - 1.0).abs())
}

/// Distance between the two compositions of the maps of two tables.
pub fn commute_gap(oval1: &Oval, oval2: &Oval, apex: Vec2) -> Result<f64> {
    let a12 = step(oval1, step(oval2, apex)?.image)?.image;
    let a21 = step(oval2, step(oval1, apex)?.image)?.image;
    Ok(a12.dist(a21))
}

/// Orbit of n strides from a0 (the returned sequence includes a0). A failing
/// step aborts the orbit and reports its index.
pub fn orbit(oval: &Oval, a0: Vec2, n: usize, stride: Stride) -> Result<Vec<Vec2>> {
    let mut points = Vec::with_capacity(n + 1);
    points.push(a0);
    let mut current = a0;
    for i in 0..n {
        for j in 0..stride.count() {
            current = step(oval, current)
                .map_err(|e| e.at_step(i * stride.count() + j))?
                .image;
        }
        points.push(current);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oval::OvalKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circle(r: f64) -> Oval {
        Oval::new(OvalKind::Circle { r }).unwrap()
    }

    fn ellipse(a: f64, b: f64) -> Oval {
        Oval::new(OvalKind::Ellipse { a, b }).unwrap()
    }

    fn fourier_test() -> Oval {
        Oval::new(OvalKind::Fourier {
            c0: 1.0,
            cos: vec![0.0, 0.05],
            sin: vec![0.0, 0.0, 0.02],
        })
        .unwrap()
    }

    fn random_exterior(rng: &mut impl Rng, lo: f64, hi: f64) -> Vec2 {
        let r = rng.gen_range(lo..hi);
        let t = rng.gen_range(0.0..TAU);
        r * Vec2::unit(t)
    }

    /// Brute-force oracle: search the plane for the circle center whose distance
    /// to the incoming tangent line (taken as the radius) places it exactly on
    /// the outward normal ray at x'. Nested grid refinement, no closed forms.
    fn aux_circle_oracle(oval: &Oval, apex: Vec2) -> (Vec2, f64) {
        let fan = oval.tangent_fan(apex).unwrap();
        let line_in = Line::through(apex, fan.neg.position);
        let xp = fan.pos.position;
        let n_out = Vec2::unit(fan.pos.alpha);
        let residual = |c: Vec2| {
            let radius = line_in.dist(c);
            (c - xp - radius * n_out).norm()
        };
        let mut center = Vec2::ZERO;
        let mut half = 8.0;
        let mut best = f64::INFINITY;
        for _ in 0..40 {
            let mut improved = center;
            for i in 0..41 {
                for j in 0..41 {
                    let cand = center
                        + Vec2::new(
                            half * (i as f64 / 20.0 - 1.0),
                            half * (j as f64 / 20.0 - 1.0),
                        );
                    let r = residual(cand);
                    if r < best {
                        best = r;
                        improved = cand;
                    }
                }
            }
            center = improved;
            half *= 0.35;
        }
        (center, line_in.dist(center))
    }

    #[test]
    fn aux_circle_matches_grid_oracle() {
        let oval = circle(1.0);
        let apex = Vec2::new(2.0, 0.0);
        let got = aux_circle(&oval, apex).unwrap();
        let (c_oracle, r_oracle) = aux_circle_oracle(&oval, apex);
        assert!(got.center.dist(c_oracle) < 1e-8, "{:?} vs {c_oracle:?}", got.center);
        assert!((got.radius - r_oracle).abs() < 1e-8);
        // Closed form for this configuration: center at twice the tangency
        // point doubled, radius 3, and |center| equals the apex distance squared.
        assert!(got.center.dist(Vec2::new(2.0, 2.0 * 3f64.sqrt())) < 1e-10);
        assert!((got.radius - 3.0).abs() < 1e-10);
        assert!((got.center.norm() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn aux_circle_invariants_on_random_apexes() {
        let oval = ellipse(2.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let apex = random_exterior(&mut rng, 2.4, 7.0);
            let fan = oval.tangent_fan(apex).unwrap();
            let c = aux_circle(&oval, apex).unwrap();
            // On the normal ray at x' at distance radius.
            assert!((c.center - c.tangency.position).norm() - c.radius < 1e-12);
            assert!(
                (c.center - c.tangency.position)
                    .cross(Vec2::unit(c.tangency.alpha))
                    .abs()
                    < 1e-10
            );
            // Tangent to the incoming line.
            let line_in = Line::through(apex, fan.neg.position);
            assert!((line_in.dist(c.center) - c.radius).abs() < 1e-10);
            // On the right of the oriented ray from the apex through x'.
            assert!((fan.pos.position - apex).cross(c.center - apex) < 0.0);
        }
    }

    #[test]
    fn interior_and_grazing_apexes_rejected() {
        let oval = ellipse(2.0, 1.0);
        assert!(matches!(
            step(&oval, Vec2::new(0.3, 0.2)),
            Err(Error::PointInsideCurve { .. })
        ));
        // Exterior but inside the near-boundary guard band.
        assert!(matches!(
            step(&oval, Vec2::new(0.0, 1.0 + 1e-8)),
            Err(Error::PointInsideCurve { .. })
        ));
    }

    #[test]
    fn circle_step_is_rotation() {
        for big_r in [1.5, 2.0, 5.0, 10.0, 100.0] {
            let oval = circle(1.0);
            let theta0 = 0.3;
            let apex = big_r * Vec2::unit(theta0);
            let image = step(&oval, apex).unwrap().image;
            let expected = big_r * Vec2::unit(theta0 + 2.0 * (1.0 / big_r).acos());
            assert!(
                image.dist(expected) < 1e-9,
                "R={big_r} image={image:?} expected={expected:?}"
            );
        }
    }

    #[test]
    fn map_step_invariants_on_ellipse() {
        let oval = ellipse(2.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let apex = random_exterior(&mut rng, 2.4, 8.0);
            let s = step(&oval, apex).unwrap();
            // Image on the line through the apex and x'.
            let ray = Line::through(apex, s.fan.pos.position);
            assert!(ray.dist(s.image) < 1e-10);
            // Image on the exit tangent line.
            assert!(oval.line_gap(s.exit.alpha, s.image).abs() < 1e-10);
            // Exit line tangent to the circle from the interior side.
            let exit_line = oval.support_line(s.exit.alpha);
            assert!((exit_line.dist(s.circle.center) - s.circle.radius).abs() < 1e-9);
            // Exit tangency distinct from both fan tangencies.
            assert!(wrap_near(s.exit.alpha - s.fan.pos.alpha, 0.0).abs() > 1e-6);
            assert!(wrap_near(s.exit.alpha - s.fan.neg.alpha, 0.0).abs() > 1e-6);
        }
    }

    #[test]
    fn ellipse_step_preserves_focal_sum() {
        let oval = ellipse(2.0, 1.0);
        let c = 3f64.sqrt();
        let (f1, f2) = (Vec2::new(c, 0.0), Vec2::new(-c, 0.0));
        let focal = |z: Vec2| z.dist(f1) + z.dist(f2);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let apex = random_exterior(&mut rng, 2.4, 6.0);
            let image = step(&oval, apex).unwrap().image;
            assert!(
                (focal(image) - focal(apex)).abs() < 1e-8,
                "apex={apex:?} drift={}",
                (focal(image) - focal(apex)).abs()
            );
        }
    }

    #[test]
    fn double_step_displacement_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for oval in [circle(1.0), ellipse(2.0, 1.0), fourier_test()] {
            let bound = 5.0 * oval.diameter();
            for _ in 0..60 {
                let apex = random_exterior(&mut rng, 2.6, 30.0);
                let mid = step(&oval, apex).unwrap().image;
                let back = step(&oval, mid).unwrap().image;
                assert!(back.dist(apex) <= bound, "|F2-id|={}", back.dist(apex));
            }
        }
    }

    #[test]
    fn generating_circle_closed_form() {
        let oval = circle(1.0);
        for theta in [0.3, 0.6, 1.2] {
            let g = generating(&oval, -theta, theta).unwrap();
            let sec2 = 1.0 / (theta.cos() * theta.cos());
            assert!((g.h - 2.0 * theta.tan()).abs() < 1e-12);
            assert!((g.d1 + sec2).abs() < 1e-12);
            assert!((g.d2 - sec2).abs() < 1e-12);
            assert!(g.d12 < 0.0);
        }
    }

    #[test]
    fn generating_derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let arc = 1e-6;
        for oval in [circle(1.3), ellipse(2.0, 1.0), fourier_test()] {
            for _ in 0..340 {
                let ax = rng.gen_range(0.0..TAU);
                let axp = ax + rng.gen_range(0.2..PI - 0.2);
                let g = generating(&oval, ax, axp).unwrap();
                assert!(g.d12 < 0.0);
                let da1 = arc / oval.curvature_radius(ax);
                let fd1 = (generating(&oval, ax + da1, axp).unwrap().h
                    - generating(&oval, ax - da1, axp).unwrap().h)
                    / (2.0 * arc);
                let da2 = arc / oval.curvature_radius(axp);
                let fd2 = (generating(&oval, ax, axp + da2).unwrap().h
                    - generating(&oval, ax, axp - da2).unwrap().h)
                    / (2.0 * arc);
                assert!(
                    (g.d1 - fd1).abs() < 1e-5 * g.d1.abs().max(1.0),
                    "d1={} fd={fd1}",
                    g.d1
                );
                assert!(
                    (g.d2 - fd2).abs() < 1e-5 * g.d2.abs().max(1.0),
                    "d2={} fd={fd2}",
                    g.d2
                );
            }
        }
    }

    #[test]
    fn variational_matches_geometric() {
        let oval = ellipse(2.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..200 {
            let apex = random_exterior(&mut rng, 2.4, 6.0);
            let s = step(&oval, apex).unwrap();
            let ax = s.fan.neg.alpha;
            let axp = s.fan.pos.alpha + if s.fan.pos.alpha < ax { TAU } else { 0.0 };
            let var = step_variational(&oval, ax, axp).unwrap();
            let gap = wrap_near(var - s.exit.alpha, 0.0).abs();
            assert!(gap < 1e-8, "variational {var} vs geometric {}", s.exit.alpha);
        }
    }

    #[test]
    fn variational_circle_spacing_reproduces() {
        let oval = circle(1.0);
        let gap = 1.6;
        let ax = 0.2;
        let axp = ax + gap;
        let next = step_variational(&oval, ax, axp).unwrap();
        assert!((next - axp - gap).abs() < 1e-10);
    }

    #[test]
    fn variational_rejects_flat_fan() {
        let oval = ellipse(2.0, 1.0);
        assert!(matches!(
            step_variational(&oval, 0.0, PI - 1e-12),
            Err(Error::ParallelTangents) | Err(Error::NoRoot)
        ));
    }

    #[test]
    fn orbit_on_circle_stays_on_circle() {
        let oval = circle(1.0);
        let pts = orbit(&oval, Vec2::new(3.0, 0.0), 100, Stride::Single).unwrap();
        for p in &pts {
            assert!((p.norm() - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn orbit_focal_drift_stays_small() {
        let oval = ellipse(2.0, 1.0);
        let c = 3f64.sqrt();
        let focal = |z: Vec2| z.dist(Vec2::new(c, 0.0)) + z.dist(Vec2::new(-c, 0.0));
        let pts = orbit(&oval, Vec2::new(3.0, 1.0), 1000, Stride::Single).unwrap();
        let f0 = focal(pts[0]);
        let drift = pts
            .iter()
            .map(|&p| (focal(p) - f0).abs())
            .fold(0.0f64, f64::max);
        assert!(drift < 1e-6, "focal drift {drift}");
    }

    #[test]
    fn tangential_length_drift_bounded() {
        let oval = ellipse(2.0, 1.0);
        let bound = 1.5 * oval.diameter();
        let mut apex = Vec2::new(3.2, 0.4);
        for _ in 0..200 {
            let s = step(&oval, apex).unwrap();
            let before = s.fan.len_pos;
            let after = s.image.dist(s.fan.pos.position);
            assert!((after - before).abs() <= bound);
            apex = s.image;
        }
    }

    #[test]
    fn generating_relation_along_orbit() {
        let oval = ellipse(2.0, 1.0);
        let mut angles = Vec::new();
        let mut apex = Vec2::new(3.0, 1.0);
        for _ in 0..50 {
            let s = step(&oval, apex).unwrap();
            if angles.is_empty() {
                angles.push(s.fan.neg.alpha);
            }
            // Unwrap into a monotone angle sequence.
            let prev = *angles.last().unwrap();
            let mut next = s.fan.pos.alpha;
            while next <= prev {
                next += TAU;
            }
            angles.push(next);
            apex = s.image;
        }
        for w in angles.windows(3) {
            let res = generating(&oval, w[0], w[1]).unwrap().d2
                + generating(&oval, w[1], w[2]).unwrap().d1;
            assert!(res.abs() < 1e-8, "generating relation residual {res}");
        }
    }

    #[test]
    fn area_factor_is_two_on_unit_circle() {
        let oval = circle(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let apex = random_exterior(&mut rng, 1.1, 40.0);
            let c = area_form_factor(&oval, apex).unwrap();
            assert!((c - 2.0).abs() < 1e-9, "C={c} at {apex:?}");
        }
    }

    #[test]
    fn area_factor_far_field_limit() {
        let oval = ellipse(2.0, 1.0);
        let psi = 0.7;
        let target = 4.0 / oval.width(psi);
        let mut scaled = Vec::new();
        for r in [1e2, 1e3, 1e4] {
            let c = area_form_factor(&oval, r * Vec2::unit(psi)).unwrap();
            scaled.push((c - target).abs() * r);
        }
        // Centrally symmetric tables converge even faster than 1/r (the odd
        // coefficient cancels), so the only claim is boundedness.
        let hi = scaled.iter().cloned().fold(0.0f64, f64::max);
        assert!(hi < 1.0, "scaled residuals {scaled:?}");
    }

    #[test]
    fn form_invariance_residuals() {
        let oval = circle(1.0);
        let r = form_invariance_residual(&oval, Vec2::new(2.5, 0.7), 1e-5).unwrap();
        assert!(r < 1e-8, "circle residual {r}");

        let oval = ellipse(2.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let apex = random_exterior(&mut rng, 2.5, 6.0);
            let r = form_invariance_residual(&oval, apex, 1e-5).unwrap();
            assert!(r < 1e-4, "residual {r} at {apex:?}");
        }
        // Halving the difference step must not blow the residual up. The form
        // is exactly invariant, so what remains is Jacobian truncation error,
        // which shrinks up to 4x under halving; anything in [stable, 4x-better]
        // passes, divergence fails.
        let apex = Vec2::new(3.1, 1.4);
        let r1 = form_invariance_residual(&oval, apex, 1e-4).unwrap();
        let r2 = form_invariance_residual(&oval, apex, 5e-5).unwrap();
        assert!(r2 < 2.0 * r1 + 1e-12, "residual grew {r1} -> {r2}");
    }

    #[test]
    fn maps_of_distinct_confocal_ellipses_do_not_commute() {
        let e1 = ellipse(2.0, 1.0);
        let e2 = ellipse(5f64.sqrt(), 2f64.sqrt());
        let mut found = 0.0f64;
        for i in 0..16 {
            let apex = 4.0 * Vec2::unit(TAU * i as f64 / 16.0);
            if let Ok(gap) = commute_gap(&e1, &e2, apex) {
                found = found.max(gap);
            }
        }
        assert!(found > 1e-3, "max commute gap {found}");
    }

    #[test]
    fn maps_of_concentric_circles_commute() {
        let c1 = circle(1.0);
        let c2 = circle(1.7);
        let gap = commute_gap(&c1, &c2, Vec2::new(2.3, 1.1)).unwrap();
        assert!(gap < 1e-10, "gap {gap}");
        let oval = ellipse(2.0, 1.0);
        let gap = commute_gap(&oval, &oval, Vec2::new(3.0, 1.0)).unwrap();
        assert!(gap < 1e-10, "self gap {gap}");
    }

    #[test]
    fn orbit_reports_failing_step_index() {
        let oval = ellipse(2.0, 1.0);
        // Start exterior but aimed so that some iterate lands inside the guard
        // band is hard to arrange honestly; instead check the index annotation
        // by starting already-inside.
        let err = orbit(&oval, Vec2::new(0.1, 0.1), 3, Stride::Single).unwrap_err();
        match err {
            Error::StepFailed { index, source } => {
                assert_eq!(index, 0);
                assert!(matches!(*source, Error::PointInsideCurve { .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
