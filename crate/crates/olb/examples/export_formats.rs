//! Emit the machine-readable artifacts: an orbit table as CSV, a verification
//! report as canonical JSON, and an orbit picture as a standalone SVG. All
//! numbers print with full precision so reruns are byte identical.

use olb::geom::Vec2;
use olb::map::{orbit, Stride};
use olb::oval::{Oval, OvalKind};
use olb::report::{orbit_csv, to_json, OrbitRow};
use olb::svg::{render_svg, SvgStyle};
use olb::verify::run_check;

fn main() -> olb::Result<()> {
    let oval = Oval::new(OvalKind::Ellipse { a: 2.0, b: 1.0 })?;
    let c = 3.0f64.sqrt();
    let fsum = |z: Vec2| z.dist(Vec2::new(-c, 0.0)) + z.dist(Vec2::new(c, 0.0));

    let points = orbit(&oval, Vec2::new(25.0, 0.0), 6, Stride::Double)?;
    let base = fsum(points[0]);
    let rows: Vec<OrbitRow> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| OrbitRow {
            step: 2 * i,
            point: p,
            focal_or_level: fsum(p),
            residual: (fsum(p) - base).abs(),
        })
        .collect();
    let csv = orbit_csv(&rows);
    println!("--- orbit CSV ({} rows) ---", rows.len());
    for line in csv.lines().take(4) {
        println!("{line}");
    }
    println!("...");

    println!("--- verification report JSON ---");
    let v = run_check("circle")?;
    println!("{}", to_json(&v.report)?);

    let svg = render_svg(&oval, &points, &SvgStyle::default())?;
    let path = std::env::temp_dir().join("olb_orbit.svg");
    std::fs::write(&path, &svg).map_err(|e| olb::Error::Usage(e.to_string()))?;
    println!("--- SVG ---");
    println!("wrote {} bytes to {}", svg.len(), path.display());
    Ok(())
}
