//! Plane primitives shared by every module: vectors, support lines, angle helpers.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

pub const TAU: f64 = std::f64::consts::TAU;
pub const PI: f64 = std::f64::consts::PI;

/// Point or displacement in the plane. One type covers both uses.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Vec2 {
        Vec2 { x, y }
    }

    /// Unit vector at angle `theta` from the positive x axis.
    pub fn unit(theta: f64) -> Vec2 {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z component of the cross product; positive when `o` is counterclockwise from `self`.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    /// Rotation by +90 degrees.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

/// Line in normal form: points z with z.dot(normal) == offset, `normal` unit length.
#[derive(Clone, Copy, Debug)]
pub struct Line {
    pub normal: Vec2,
    pub offset: f64,
}

impl Line {
    pub fn new(normal: Vec2, offset: f64) -> Line {
        Line { normal, offset }
    }

    /// Line through two distinct points.
    pub fn through(p: Vec2, q: Vec2) -> Line {
        let normal = (q - p).perp().normalized();
        Line::new(normal, normal.dot(p))
    }

    /// Positive on the side the normal points into.
    pub fn signed_dist(&self, z: Vec2) -> f64 {
        z.dot(self.normal) - self.offset
    }

    pub fn dist(&self, z: Vec2) -> f64 {
        self.signed_dist(z).abs()
    }

    /// Intersection point of two lines; None when parallel beyond `eps` in the normals' cross.
    pub fn intersect(&self, o: &Line, eps: f64) -> Option<Vec2> {
        let det = self.normal.cross(o.normal);
        if det.abs() <= eps {
            return None;
        }
        let x = (self.offset * o.normal.y - o.offset * self.normal.y) / det;
        let y = (self.normal.x * o.offset - o.normal.x * self.offset) / det;
        Some(Vec2::new(x, y))
    }
}

/// Wraps `theta` into [0, 2pi).
pub fn wrap_angle(theta: f64) -> f64 {
    theta.rem_euclid(TAU)
}

/// Representative of `theta` (mod 2pi) closest to `center`, i.e. within (center - pi, center + pi].
pub fn wrap_near(theta: f64, center: f64) -> f64 {
    let mut d = (theta - center).rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    center + d
}

/// Angle between nonzero vectors, in [0, pi].
pub fn angle_between(u: Vec2, v: Vec2) -> f64 {
    u.cross(v).abs().atan2(u.dot(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_intersection_matches_hand_solution() {
        // x = 3 meets y = -2.
        let a = Line::new(Vec2::new(1.0, 0.0), 3.0);
        let b = Line::new(Vec2::new(0.0, 1.0), -2.0);
        let p = a.intersect(&b, 1e-14).unwrap();
        assert!((p - Vec2::new(3.0, -2.0)).norm() < 1e-15);
        assert!(a.intersect(&a, 1e-14).is_none());
    }

    #[test]
    fn wrap_near_stays_within_half_turn() {
        for k in -4..=4 {
            let th = 0.3 + TAU * k as f64;
            let w = wrap_near(th, 0.0);
            assert!((w - 0.3).abs() < 1e-12);
        }
        assert!((wrap_near(0.1, 6.0) - (0.1 + TAU)).abs() < 1e-12);
    }

    #[test]
    fn angle_between_is_symmetric_and_positive() {
        let u = Vec2::unit(0.4);
        let v = Vec2::unit(2.9);
        assert!((angle_between(u, v) - 2.5).abs() < 1e-12);
        assert!((angle_between(v, u) - 2.5).abs() < 1e-12);
    }
}
