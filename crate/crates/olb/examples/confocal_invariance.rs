//! Around an ellipse the map preserves the confocal family: every image of
//! an exterior point keeps the same sum of focal distances. The invariant
//! measure of the induced curve map makes consecutive hops carry equal mass.

use std::f64::consts::PI;

use olb::degenerate::{confocal_mu_interval, confocal_residual};
use olb::geom::{wrap_near, Vec2};
use olb::map::{orbit, step, Stride};
use olb::oval::{Oval, OvalKind};

fn main() -> olb::Result<()> {
    let (a, b) = (2.0, 1.0);
    let oval = Oval::new(OvalKind::Ellipse { a, b })?;
    let c = (a * a - b * b).sqrt();
    let (f1, f2) = (Vec2::new(-c, 0.0), Vec2::new(c, 0.0));
    let fsum = |z: Vec2| z.dist(f1) + z.dist(f2);

    let start = Vec2::new(6.0, 2.5);
    let points = orbit(&oval, start, 2000, Stride::Single)?;
    let drift = points
        .iter()
        .map(|&p| (fsum(p) - fsum(start)).abs())
        .fold(0.0f64, f64::max);
    println!("ellipse ({a}, {b}), start ({}, {}):", start.x, start.y);
    println!("  focal sum {:.12}", fsum(start));
    println!("  worst drift over 2000 steps {drift:.3e}");

    // Single-step version of the same statement.
    let one = confocal_residual(&oval, start)?;
    println!("  one-step focal residual {one:.3e}");

    // Mass of each hop under the invariant density of the confocal curve
    // x^2/(a^2+l) + y^2/(b^2+l) = 1 through the start. The map preserves the
    // measure, so the hop masses agree.
    let big_a = 0.5 * fsum(start);
    let lambda = big_a * big_a - a * a;
    let big_b = (b * b + lambda).sqrt();
    let param = |z: Vec2| (z.y / big_b).atan2(z.x / big_a);
    let mut z = start;
    println!("hop masses along the orbit (confocal parameter {lambda:.6}):");
    for i in 0..5 {
        let w = step(&oval, z)?.image;
        let t0 = param(z);
        // One hop is close to a half turn; unwrap the increment near pi.
        let t1 = t0 + wrap_near(param(w) - t0, PI);
        let mass = confocal_mu_interval(a, b, lambda, t0, t1)?;
        println!("  hop {i}: mass {mass:.12}");
        z = w;
    }
    Ok(())
}
