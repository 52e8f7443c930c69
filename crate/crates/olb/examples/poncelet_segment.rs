//! Two degenerate limits of the map. Collapse the table to a segment and the
//! step becomes a chord move that conserves the sum of distances to the
//! endpoints. Collapse it to two pins and the double step on a large circle
//! is a small rotation with angular size 4 sin(angle) / r.

use std::f64::consts::PI;

use olb::degenerate::{poncelet_double, segment_step, SegmentTable};
use olb::geom::{wrap_near, Vec2};

fn main() -> olb::Result<()> {
    // Segment with endpoints (-1, 0) and (1, 0).
    let table = SegmentTable::symmetric(1.0)?;
    let start = Vec2::new(0.7, 3.2);
    let lam = table.focal_sum(start);
    let mut z = start;
    let mut drift = 0.0f64;
    for _ in 0..10_000 {
        z = segment_step(&table, z)?;
        drift = drift.max((table.focal_sum(z) - lam).abs());
    }
    println!("segment chord map, 10000 steps from ({}, {}):", start.x, start.y);
    println!("  focal sum {lam:.12}, worst drift {drift:.3e}");
    println!("  final point ({:.6}, {:.6})", z.x, z.y);

    // Pin map: chords through (-1, 0) then (1, 0) on the circle |z| = r.
    // The double step rotates by about -4 sin(alpha) / r, so the rescaled
    // angle defect settles as the circle grows.
    println!("pin double step, rescaled rotation angle r * |dtheta| / sin(alpha):");
    for r in [50.0, 100.0, 200.0, 400.0] {
        let mut worst = 0.0f64;
        for k in 0..16 {
            let alpha = PI * (k as f64 + 0.5) / 16.0;
            let z0 = r * Vec2::unit(alpha);
            let z1 = poncelet_double(r, z0)?;
            let dtheta = wrap_near(z1.angle() - alpha, 0.0);
            let scaled = r * dtheta.abs() / alpha.sin();
            worst = worst.max((scaled - 4.0).abs());
        }
        println!("  r {r:5.0}: worst |scaled - 4| = {worst:.3e}");
    }
    Ok(())
}
