//! Degenerate and near-degenerate tables: the two-point segment map, the
//! confocal family around its comparison circle, the two-pin chord map on a
//! circle, and the invariant measure density on confocal curves.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::map;
use crate::oval::{Oval, OvalKind};
use crate::solve::{golden_max, integrate};

/// Two-point table: the flat limit of an ellipse. The endpoints play the role
/// of the foci of every invariant confocal ellipse.
#[derive(Clone, Copy, Debug)]
pub struct SegmentTable {
    e1: Vec2,
    e2: Vec2,
}

/// One chord move around a segment, with the pivot endpoint and the signed
/// line parameter of the image along start -> pivot (param 1 is the pivot).
#[derive(Clone, Copy, Debug)]
pub struct SegmentStep {
    pub image: Vec2,
    pub pivot: Vec2,
    pub param: f64,
}

impl SegmentTable {
    pub fn new(e1: Vec2, e2: Vec2) -> Result<SegmentTable> {
        if !(e1.dist(e2) > 0.0) {
            return Err(Error::SpecParse("segment endpoints must be distinct".into()));
        }
        Ok(SegmentTable { e1, e2 })
    }

    /// Endpoints (-a, 0) and (a, 0).
    pub fn symmetric(a: f64) -> Result<SegmentTable> {
        if !(a > 0.0) {
            return Err(Error::SpecParse("segment half length must be positive".into()));
        }
        SegmentTable::new(Vec2::new(-a, 0.0), Vec2::new(a, 0.0))
    }

    pub fn endpoints(&self) -> (Vec2, Vec2) {
        (self.e1, self.e2)
    }

    pub fn half_length(&self) -> f64 {
        0.5 * self.e1.dist(self.e2)
    }

    /// Sum of distances to the endpoints; conserved by the step.
    pub fn focal_sum(&self, z: Vec2) -> f64 {
        z.dist(self.e1) + z.dist(self.e2)
    }

    /// Positive on the left of the directed axis e1 -> e2.
    pub fn side(&self, z: Vec2) -> f64 {
        (self.e2 - self.e1).cross(z - self.e1)
    }

    /// Axis-aligned frame: (midpoint, unit axis, unit normal).
    fn frame(&self) -> (Vec2, Vec2, Vec2) {
        let m = 0.5 * (self.e1 + self.e2);
        let u = (self.e2 - self.e1).normalized();
        (m, u, u.perp())
    }
}

/// Chord move around a segment table. A point on the positive side pivots
/// about the first endpoint, one on the negative side about the second; the
/// image is the second intersection of the pivot chord with the confocal
/// ellipse through the start, so the focal sum is conserved.
pub fn segment_step(table: &SegmentTable, c: Vec2) -> Result<Vec2> {
    Ok(segment_step_detailed(table, c)?.image)
}

/// Same as [`segment_step`] but keeps the pivot and line parameter.
pub fn segment_step_detailed(table: &SegmentTable, c: Vec2) -> Result<SegmentStep> {
    let a = table.half_length();
    let side = table.side(c);
    // Off the axis the chord is well conditioned all the way down to
    // denormal heights; only an exactly collinear start is degenerate.
    if side == 0.0 {
        return Err(Error::OnAxis);
    }
    let pivot = if side > 0.0 { table.e1 } else { table.e2 };

    let (m, u, v) = table.frame();
    let big_a = 0.5 * table.focal_sum(c);
    // Off the axis the focal sum strictly exceeds the focal distance.
    let b_sq = big_a * big_a - a * a;
    let a_sq = big_a * big_a;

    let rel = c - m;
    let xi = Vec2::new(rel.dot(u), rel.dot(v));
    let rel_p = pivot - c;
    let d = Vec2::new(rel_p.dot(u), rel_p.dot(v));

    // Quadratic in the line parameter s along c + s (pivot - c); s = 0 is the
    // start, which sits on the conic, so the constant term is roundoff only.
    let c2 = d.x * d.x / a_sq + d.y * d.y / b_sq;
    let c1 = 2.0 * (xi.x * d.x / a_sq + xi.y * d.y / b_sq);
    let c0 = xi.x * xi.x / a_sq + xi.y * xi.y / b_sq - 1.0;
    let disc = (c1 * c1 - 4.0 * c2 * c0).max(0.0);
    let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
    // Roots q/c2 and c0/q; the far one is the genuine second intersection.
    let s = q / c2;
    Ok(SegmentStep {
        image: c + s * (pivot - c),
        pivot,
        param: s,
    })
}

/// Confocal ellipse with foci (-1, 0) and (1, 0) at parameter t, paired with
/// the comparison circle of radius e^t / 2 about the center.
#[derive(Clone, Copy, Debug)]
pub struct ConfocalFamily {
    t: f64,
}

impl ConfocalFamily {
    pub fn new(t: f64) -> Result<ConfocalFamily> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveT(t));
        }
        Ok(ConfocalFamily { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Semi axes (cosh t, sinh t).
    pub fn semi_axes(&self) -> (f64, f64) {
        (self.t.cosh(), self.t.sinh())
    }

    pub fn circle_radius(&self) -> f64 {
        0.5 * self.t.exp()
    }

    pub fn ellipse_point(&self, theta: f64) -> Vec2 {
        let (a, b) = self.semi_axes();
        Vec2::new(a * theta.cos(), b * theta.sin())
    }

    pub fn oval(&self) -> Result<Oval> {
        let (a, b) = self.semi_axes();
        Oval::new(OvalKind::Ellipse { a, b })
    }

    /// Largest gap between the ellipse radius and the circle radius over the
    /// parameter circle; sampled densely and refined.
    pub fn radial_deviation_max(&self) -> f64 {
        let rho = self.circle_radius();
        let dev = |theta: f64| (self.ellipse_point(theta).norm() - rho).abs();
        let (_, best) = crate::solve::max_scalar(dev, 0.0, crate::geom::TAU, 8192, 1e-13);
        best
    }

    /// Two-sided Hausdorff distance between the ellipse and the circle.
    pub fn hausdorff_to_circle(&self) -> f64 {
        let rho = self.circle_radius();
        let tau = crate::geom::TAU;
        // Ellipse to circle: the distance from a point to a full circle is the
        // plain radial gap, so this side reduces to the radial deviation.
        let d1 = self.radial_deviation_max();

        // Circle to ellipse: coarse nearest-sample search, then a local
        // golden refinement of the distance to the parametrized curve.
        let grid: Vec<Vec2> = (0..1024).map(|i| self.ellipse_point(tau * i as f64 / 1024.0)).collect();
        let mut d2: f64 = 0.0;
        for j in 0..8192 {
            let y = rho * Vec2::unit(tau * j as f64 / 8192.0);
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (i, p) in grid.iter().enumerate() {
                let d = y.dist(*p);
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            let lo = tau * (best as f64 - 2.0) / 1024.0;
            let hi = tau * (best as f64 + 2.0) / 1024.0;
            let (_, neg_min) = golden_max(|th| -y.dist(self.ellipse_point(th)), lo, hi, 1e-13);
            d2 = d2.max(-neg_min);
        }
        d1.max(d2)
    }
}

/// Pin choice for the two-pin chord map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pin {
    Left,
    Right,
}

impl Pin {
    pub fn point(self) -> Vec2 {
        match self {
            Pin::Left => Vec2::new(-1.0, 0.0),
            Pin::Right => Vec2::new(1.0, 0.0),
        }
    }
}

/// Chord map on the circle |z| = r with interior pins (-1, 0) and (1, 0):
/// the image is the second intersection of the chord through the pin. The
/// update z + s d with s = -2 (z . d) / |d|^2 keeps |z| unchanged exactly.
pub fn poncelet_step(r: f64, z: Vec2, pin: Pin) -> Result<Vec2> {
    if !(r > 1.0) {
        return Err(Error::Usage("pin map needs circle radius above 1".into()));
    }
    let resid = (z.norm() - r).abs();
    if resid > 1e-6 * r {
        return Err(Error::OffCurve(resid));
    }
    let d = pin.point() - z;
    let s = -2.0 * z.dot(d) / d.norm_sq();
    Ok(z + s * d)
}

/// Left pin then right pin.
pub fn poncelet_double(r: f64, z: Vec2) -> Result<Vec2> {
    poncelet_step(r, poncelet_step(r, z, Pin::Left)?, Pin::Right)
}

/// Reciprocal gradient factor of the conserved conic function at a point of
/// the confocal curve with parameter `lambda` around the ellipse (a, b). For
/// b = 0 the factor is rescaled by the vanishing axis, giving the segment
/// density; either way the result is the invariant density per arc length up
/// to a constant.
pub fn measure_density(a: f64, b: f64, lambda: f64, pt: Vec2) -> Result<f64> {
    if !(a > 0.0) || b < 0.0 {
        return Err(Error::Usage("axes must satisfy a > 0, b >= 0".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveT(lambda));
    }
    let a2 = a * a + lambda;
    let b2 = b * b + lambda;
    let (x, y) = (pt.x, pt.y);
    let resid = x * x / a2 + y * y / b2 - 1.0;
    if resid.abs() > 1e-8 {
        return Err(Error::OffCurve(resid.abs()));
    }
    let grad = x * x / (a2 * a2) + y * y / (b2 * b2);
    if b == 0.0 {
        let gt = y.abs() * grad.sqrt();
        Ok(1.0 / gt)
    } else {
        let level = x * x / (a * a) + y * y / (b * b) - 1.0;
        Ok(1.0 / (grad * level).sqrt())
    }
}

/// Invariant measure of the arc theta0 -> theta1 on the confocal curve with
/// parameter `lambda` around the ellipse (a, b), in the elliptic-angle
/// parametrization (sqrt(a^2 + lambda) cos theta, sqrt(b^2 + lambda) sin theta).
pub fn confocal_mu_interval(a: f64, b: f64, lambda: f64, theta0: f64, theta1: f64) -> Result<f64> {
    let big_a = (a * a + lambda).sqrt();
    let big_b = (b * b + lambda).sqrt();
    let f = |theta: f64| -> f64 {
        let z = Vec2::new(big_a * theta.cos(), big_b * theta.sin());
        let speed = (big_a * big_a * theta.sin().powi(2) + big_b * big_b * theta.cos().powi(2)).sqrt();
        speed * measure_density(a, b, lambda, z).expect("parametrization stays on the curve")
    };
    Ok(integrate(f, theta0, theta1, 1e-12).abs())
}

/// Invariant measure of an arc of a confocal ellipse of a segment with
/// endpoints (-a, 0), (a, 0), in the elliptic-angle parametrization. The arc
/// must stay strictly on one side of the axis.
pub fn segment_mu_interval(a: f64, theta0: f64, theta1: f64) -> Result<f64> {
    let lo = theta0.min(theta1);
    let hi = theta0.max(theta1);
    if lo.sin().signum() != hi.sin().signum() || lo.sin() == 0.0 || hi.sin() == 0.0 {
        return Err(Error::Usage("arc must stay on one side of the axis".into()));
    }
    Ok(integrate(|th: f64| 1.0 / (a * th.sin().abs()), lo, hi, 1e-12).abs())
}

/// Focal-sum drift of one map step around a circle or ellipse table.
pub fn confocal_residual(oval: &Oval, apex: Vec2) -> Result<f64> {
    let (f1, f2) = match *oval.kind() {
        OvalKind::Circle { .. } => (Vec2::ZERO, Vec2::ZERO),
        OvalKind::Ellipse { a, b } => {
            let c = (a * a - b * b).max(0.0).sqrt();
            (Vec2::new(-c, 0.0), Vec2::new(c, 0.0))
        }
        _ => return Err(Error::Usage("focal drift needs a circle or ellipse table".into())),
    };
    let fsum = |z: Vec2| z.dist(f1) + z.dist(f2);
    let s = map::step(oval, apex)?;
    Ok((fsum(s.image) - fsum(apex)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{wrap_near, PI, TAU};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_confocal_point(rng: &mut ChaCha8Rng, table: &SegmentTable) -> Vec2 {
        let a = table.half_length();
        let tau_p: f64 = rng.gen_range(0.2..2.0);
        let theta: f64 = loop {
            let th: f64 = rng.gen_range(0.0..TAU);
            if th.sin().abs() > 1e-2 {
                break th;
            }
        };
        let (m, u, v) = (0.5 * (table.endpoints().0 + table.endpoints().1), (table.endpoints().1 - table.endpoints().0).normalized(), (table.endpoints().1 - table.endpoints().0).normalized().perp());
        let big_a = a * tau_p.cosh();
        let big_b = a * tau_p.sinh();
        m + big_a * theta.cos() * u + big_b * theta.sin() * v
    }

    // Independent solver: intersect the pivot line with the confocal ellipse
    // by dense sampling of the parametric curve and bisection on the signed
    // area of (pivot - start, point - start).
    fn parametric_second_intersection(table: &SegmentTable, c: Vec2) -> Vec2 {
        let a = table.half_length();
        let side = table.side(c);
        let pivot = if side > 0.0 { table.endpoints().0 } else { table.endpoints().1 };
        let (m, u, v) = (
            0.5 * (table.endpoints().0 + table.endpoints().1),
            (table.endpoints().1 - table.endpoints().0).normalized(),
            (table.endpoints().1 - table.endpoints().0).normalized().perp(),
        );
        let big_a = 0.5 * table.focal_sum(c);
        let big_b = (big_a * big_a - a * a).sqrt();
        let at = |th: f64| m + big_a * th.cos() * u + big_b * th.sin() * v;
        let rel = c - m;
        let theta_c = (rel.dot(v) / big_b).atan2(rel.dot(u) / big_a);
        let h = |th: f64| (pivot - c).cross(at(th) - c);

        let n = 4096;
        let mut hits = Vec::new();
        let mut prev = h(0.0);
        for i in 1..=n {
            let th = TAU * i as f64 / n as f64;
            let cur = h(th);
            if prev == 0.0 || prev * cur < 0.0 {
                let (mut lo, mut hi) = (TAU * (i - 1) as f64 / n as f64, th);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if h(lo) * h(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let root = 0.5 * (lo + hi);
                if wrap_near(root - theta_c, 0.0).abs() > 1e-4 {
                    hits.push(at(root));
                }
            }
            prev = cur;
        }
        assert_eq!(hits.len(), 1, "pivot chord must recross the conic once");
        hits[0]
    }

    #[test]
    fn segment_step_matches_parametric_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tables = [
            SegmentTable::symmetric(1.0).unwrap(),
            SegmentTable::new(Vec2::new(0.3, -0.4), Vec2::new(1.7, 0.9)).unwrap(),
        ];
        for table in &tables {
            for _ in 0..50 {
                let c = random_confocal_point(&mut rng, table);
                let got = segment_step(table, c).unwrap();
                let want = parametric_second_intersection(table, c);
                assert!(got.dist(want) < 1e-9, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn segment_focal_sum_preserved_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let table = SegmentTable::symmetric(1.0).unwrap();
        for _ in 0..10_000 {
            let c = random_confocal_point(&mut rng, &table);
            let d = segment_step(&table, c).unwrap();
            let drift = (table.focal_sum(d) - table.focal_sum(c)).abs();
            assert!(drift < 1e-12 * table.focal_sum(c), "drift {drift:e}");
        }
    }

    #[test]
    fn segment_focal_sum_accumulation_stays_tiny() {
        // Orbits sink into the long-axis vertex pair at rate (A-1)/(A+1) per
        // step, so a start on a wide confocal ellipse keeps the height
        // representable for well over 1e4 steps.
        let table = SegmentTable::symmetric(1.0).unwrap();
        let mut z = Vec2::new(0.3, 39.0);
        let start = table.focal_sum(z);
        for _ in 0..10_000 {
            z = segment_step(&table, z).unwrap();
        }
        assert!((table.focal_sum(z) - start).abs() < 1e-10);
    }

    #[test]
    fn segment_sides_and_pivots_alternate() {
        let table = SegmentTable::symmetric(1.0).unwrap();
        let mut z = Vec2::new(0.4, 1.1);
        let mut last_side = table.side(z).signum();
        let mut last_pivot = None;
        for _ in 0..200 {
            let s = segment_step_detailed(&table, z).unwrap();
            assert!(s.param > 1.0, "image lies beyond the pivot");
            let side = table.side(s.image).signum();
            assert_eq!(side, -last_side);
            if let Some(p) = last_pivot {
                assert!(s.pivot.dist(p) > 1.0);
            }
            last_pivot = Some(s.pivot);
            last_side = side;
            z = s.image;
        }
    }

    #[test]
    fn segment_matches_thin_ellipse() {
        // The segment with endpoints at the foci is the flat limit of the
        // ellipse; for b = 1e-3 the two maps agree to O(b).
        let b = 1e-3;
        let ell = Oval::new(OvalKind::Ellipse { a: 1.0, b }).unwrap();
        let c_val = (1.0f64 - b * b).sqrt();
        let table = SegmentTable::new(Vec2::new(-c_val, 0.0), Vec2::new(c_val, 0.0)).unwrap();
        let mut z_seg = Vec2::new(0.0, 2.0);
        let mut z_ell = z_seg;
        for _ in 0..3 {
            z_seg = segment_step(&table, z_seg).unwrap();
            z_ell = map::step(&ell, z_ell).unwrap().image;
            assert!(z_seg.dist(z_ell) < 5e-3, "{z_seg:?} vs {z_ell:?}");
        }
    }

    #[test]
    fn segment_bisector_start_steps_mirror_symmetrically() {
        // Reflection across the bisector conjugates the map to its inverse,
        // so from a bisector point the reflected image steps back to it.
        let table = SegmentTable::symmetric(1.0).unwrap();
        let c0 = Vec2::new(0.0, 1.7);
        let d1 = segment_step(&table, c0).unwrap();
        let back = segment_step(&table, Vec2::new(-d1.x, d1.y)).unwrap();
        assert!(back.dist(c0) < 1e-9);
    }

    #[test]
    fn segment_on_axis_rejected() {
        let table = SegmentTable::symmetric(1.0).unwrap();
        assert!(matches!(segment_step(&table, Vec2::new(3.0, 0.0)), Err(Error::OnAxis)));
    }

    #[test]
    fn confocal_family_parametrization_has_constant_focal_sum() {
        let fam = ConfocalFamily::new(2.0).unwrap();
        let (f1, f2) = (Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0));
        for i in 0..256 {
            let p = fam.ellipse_point(TAU * i as f64 / 256.0);
            let sum = p.dist(f1) + p.dist(f2);
            assert!((sum - 2.0 * 2.0f64.cosh()).abs() < 1e-12);
        }
    }

    #[test]
    fn confocal_family_radial_deviation_hits_axis_gap() {
        // The radius spans [sinh t, cosh t] and the circle radius is the exact
        // midpoint, so the extreme deviation is e^{-t}/2 at the long axis.
        for t in [2.0, 3.0] {
            let fam = ConfocalFamily::new(t).unwrap();
            let want = 0.5 * (-t).exp();
            assert!((fam.radial_deviation_max() - want).abs() < 1e-8);
        }
    }

    #[test]
    fn confocal_family_hausdorff_bound_and_decay() {
        let mut prev = f64::INFINITY;
        for t in [2.0, 3.0, 4.0, 5.0] {
            let fam = ConfocalFamily::new(t).unwrap();
            let h = fam.hausdorff_to_circle();
            let bound = 0.5 * (-t).exp();
            assert!(h <= bound + 1e-12, "t={t}: {h:e} vs {bound:e}");
            assert!(h >= 0.9 * fam.radial_deviation_max());
            assert!(h < prev);
            prev = h;
        }
    }

    #[test]
    fn confocal_family_rejects_nonpositive_parameter() {
        assert!(matches!(ConfocalFamily::new(0.0), Err(Error::NonPositiveT(_))));
        assert!(matches!(ConfocalFamily::new(-1.0), Err(Error::NonPositiveT(_))));
    }

    #[test]
    fn poncelet_radius_exactly_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let r: f64 = rng.gen_range(1.5..500.0);
            let z = r * Vec2::unit(rng.gen_range(0.0..TAU));
            let pin = if rng.gen::<bool>() { Pin::Left } else { Pin::Right };
            let z1 = poncelet_step(r, z, pin).unwrap();
            assert!((z1.norm() - r).abs() < 1e-12 * r);
        }
    }

    #[test]
    fn poncelet_image_stays_on_pivot_chord() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..1000 {
            let r: f64 = rng.gen_range(1.5..100.0);
            let z = r * Vec2::unit(rng.gen_range(0.0..TAU));
            let pin = if rng.gen::<bool>() { Pin::Left } else { Pin::Right };
            let z1 = poncelet_step(r, z, pin).unwrap();
            let cross = (pin.point() - z).normalized().cross((z1 - z).normalized());
            assert!(cross.abs() < 1e-12);
        }
    }

    #[test]
    fn poncelet_double_step_angle_law() {
        let r = 100.0;
        let z = Vec2::new(0.0, r);
        let z2 = poncelet_double(r, z).unwrap();
        let delta = wrap_near(z2.angle() - z.angle(), 0.0);
        assert!((delta.abs() - 4.0 / r).abs() < 1e-4, "delta {delta:e}");

        // On the axis both chords run along the axis and the double step is
        // the identity.
        let z_axis = Vec2::new(r, 0.0);
        let z2_axis = poncelet_double(r, z_axis).unwrap();
        assert!(z2_axis.dist(z_axis) < 1e-9);
    }

    #[test]
    fn poncelet_double_matches_drift_field_to_one_over_r() {
        // P^2(z) - z equals the tangential drift -4 sin(alpha) t(alpha) up to
        // a O(1/r) remainder with a stable fitted constant.
        let fitted: Vec<f64> = [100.0, 200.0, 400.0]
            .iter()
            .map(|&r| {
                let mut worst: f64 = 0.0;
                for j in 0..32 {
                    let alpha = (j as f64 + 0.5) * TAU / 32.0;
                    let z = r * Vec2::unit(alpha);
                    let z2 = poncelet_double(r, z).unwrap();
                    let drift = -4.0 * alpha.sin() * Vec2::new(-alpha.sin(), alpha.cos());
                    worst = worst.max((z2 - z - drift).norm());
                }
                worst * r
            })
            .collect();
        let lo = fitted.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = fitted.iter().cloned().fold(0.0, f64::max);
        assert!(hi / lo < 1.3, "fitted constants {fitted:?}");
    }

    #[test]
    fn poncelet_rejects_bad_inputs() {
        assert!(matches!(poncelet_step(0.5, Vec2::new(0.5, 0.0), Pin::Left), Err(Error::Usage(_))));
        assert!(matches!(poncelet_step(2.0, Vec2::new(3.0, 0.0), Pin::Left), Err(Error::OffCurve(_))));
    }

    #[test]
    fn measure_density_matches_width_reciprocal_far_out() {
        let (a, b) = (2.0, 1.0);
        let oval = Oval::new(OvalKind::Ellipse { a, b }).unwrap();
        let lambda = 1e8;
        let (big_a, big_b) = ((a * a + lambda).sqrt(), (b * b + lambda).sqrt());
        for i in 0..64 {
            let alpha = TAU * i as f64 / 64.0;
            let z = Vec2::new(big_a * alpha.cos(), big_b * alpha.sin());
            let density = measure_density(a, b, lambda, z).unwrap();
            let want = a * b * 2.0 / oval.width(alpha);
            assert!((density / want - 1.0).abs() < 1e-6, "alpha {alpha}");
        }
    }

    #[test]
    fn measure_interval_preserved_by_ellipse_map() {
        let (a, b) = (2.0, 1.0);
        let oval = Oval::new(OvalKind::Ellipse { a, b }).unwrap();
        let lambda = 2.0;
        let (big_a, big_b) = ((a * a + lambda).sqrt(), (b * b + lambda).sqrt());
        let at = |th: f64| Vec2::new(big_a * th.cos(), big_b * th.sin());
        let param = |z: Vec2| (z.y / big_b).atan2(z.x / big_a);

        let x0 = at(0.4);
        let x1 = map::step(&oval, x0).unwrap().image;
        let x2 = map::step(&oval, x1).unwrap().image;
        // The map preserves the confocal curve, so both hops lie on it.
        for z in [x1, x2] {
            let resid = (z.x / big_a).powi(2) + (z.y / big_b).powi(2) - 1.0;
            assert!(resid.abs() < 1e-9);
        }
        let (t0, t1, t2) = (0.4, param(x1), param(x2));
        let hop1 = confocal_mu_interval(a, b, lambda, t0, t0 + wrap_near(t1 - t0, PI)).unwrap();
        let hop2 = confocal_mu_interval(a, b, lambda, t1, t1 + wrap_near(t2 - t1, PI)).unwrap();
        assert!((hop1 / hop2 - 1.0).abs() < 1e-6, "{hop1} vs {hop2}");
    }

    #[test]
    fn measure_interval_preserved_by_segment_map() {
        let table = SegmentTable::symmetric(1.0).unwrap();
        let lambda = 0.8f64.sinh().powi(2);
        let (big_a, big_b) = ((1.0 + lambda).sqrt(), lambda.sqrt());
        let at = |th: f64| Vec2::new(big_a * th.cos(), big_b * th.sin());
        let param = |z: Vec2| {
            let th = (z.y / big_b).atan2(z.x / big_a);
            if th < 0.0 {
                th + TAU
            } else {
                th
            }
        };
        let (t0, t1) = (0.7, 0.9);
        let d0 = segment_step(&table, at(t0)).unwrap();
        let d1 = segment_step(&table, at(t1)).unwrap();
        assert!(d0.y < 0.0 && d1.y < 0.0);
        let before = segment_mu_interval(1.0, t0, t1).unwrap();
        let (p0, p1) = (param(d0), param(d1));
        assert!((p0 - p1).abs() < 1.0, "image interval stays local");
        let after = segment_mu_interval(1.0, p0, p1).unwrap();
        assert!((before / after - 1.0).abs() < 1e-6, "{before} vs {after}");
    }

    #[test]
    fn measure_density_rejects_bad_inputs() {
        assert!(matches!(
            measure_density(2.0, 1.0, 2.0, Vec2::new(10.0, 10.0)),
            Err(Error::OffCurve(_))
        ));
        assert!(matches!(
            measure_density(2.0, 1.0, 0.0, Vec2::new(2.0, 1.0)),
            Err(Error::NonPositiveT(_))
        ));
    }

    #[test]
    fn confocal_residual_small_for_conic_tables() {
        let ell = Oval::new(OvalKind::Ellipse { a: 2.0, b: 1.0 }).unwrap();
        for apex in [Vec2::new(5.0, 1.0), Vec2::new(3.0, -2.0), Vec2::new(-4.0, 0.5)] {
            assert!(confocal_residual(&ell, apex).unwrap() < 1e-9);
        }
        let circle = Oval::new(OvalKind::Circle { r: 1.5 }).unwrap();
        assert!(confocal_residual(&circle, Vec2::new(2.0, 1.0)).unwrap() < 1e-10);

        let lp = Oval::new(OvalKind::Lp { p: 1.5, scale: 1.0 }).unwrap();
        assert!(matches!(confocal_residual(&lp, Vec2::new(5.0, 0.0)), Err(Error::Usage(_))));
    }
}
