//! Circumscribed periodic polygons. On a circle the (k, m) orbit is the
//! regular star polygon with vertex radius 1/cos(pi m / k); on an ellipse
//! the vertices land on one confocal ellipse and the search still closes.

use std::f64::consts::PI;

use olb::centers::ellipse_center_locus;
use olb::oval::{Oval, OvalKind};
use olb::periodic::{find_periodic, period_radius_scan, verify_periodic};

fn main() -> olb::Result<()> {
    let circle = Oval::new(OvalKind::Circle { r: 1.0 })?;
    println!("unit circle, closed-form vertex radii:");
    for (k, m) in [(3, 1), (5, 1), (5, 2), (7, 2), (8, 3)] {
        let orbit = find_periodic(&circle, k, m)?;
        let expect = 1.0 / (PI * m as f64 / k as f64).cos();
        println!(
            "  ({k}, {m}): radius {:.12}, expected {:.12}, gap {:.2e}",
            orbit.max_radius(),
            expect,
            (orbit.max_radius() - expect).abs()
        );
    }

    let ellipse = Oval::new(OvalKind::Ellipse { a: 2.0, b: 1.0 })?;
    let orbit = find_periodic(&ellipse, 7, 2)?;
    println!("ellipse (2, 1), (7, 2) orbit:");
    println!("  perimeter {:.12}", orbit.perimeter);
    println!("  map closure residual {:.3e}", verify_periodic(&ellipse, &orbit)?);
    println!("  stationarity residual {:.3e}", orbit.generating_residual(&ellipse)?);

    // Vertices share one confocal ellipse; the inscribed-circle centers then
    // lie on its polar dual, an axis-aligned ellipse.
    let c = 3.0f64.sqrt();
    let spread = orbit
        .vertices
        .iter()
        .map(|v| v.dist(olb::Vec2::new(-c, 0.0)) + v.dist(olb::Vec2::new(c, 0.0)))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s), hi.max(s)));
    println!("  vertex focal sums in [{:.12}, {:.12}]", spread.0, spread.1);
    println!("  center locus residual {:.3e}", ellipse_center_locus(&ellipse, &orbit)?);

    // Scan all admissible rotation numbers up to period 8.
    println!("period scan, largest vertex radius per (k, m):");
    for row in period_radius_scan(&ellipse, 8)? {
        for cell in &row.cells {
            match cell.radius {
                Some(r) => println!("  ({}, {}): {r:.6}", row.k, cell.m),
                None => println!("  ({}, {}): search failed", row.k, cell.m),
            }
        }
    }
    Ok(())
}
