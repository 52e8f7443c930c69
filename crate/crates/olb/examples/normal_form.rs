//! Straightening the double step near infinity. The chart coefficients f, g
//! feed a change of variables (a, b) after which the step is x' = x + y,
//! y' = y up to higher order. Halving the inverse radius keeps the x defect
//! bounded against y^2 and halves the y defect against y^3.

use olb::asymptotics::{infinity_chart, infinity_expansion_double, lazutkin_change, normal_form_residuals};
use olb::geom::TAU;
use olb::map::Stride;
use olb::oval::{Oval, OvalKind};

fn main() -> olb::Result<()> {
    let oval = Oval::new(OvalKind::Ellipse { a: 1.6, b: 1.0 })?;

    // Coefficients at a few parameters; f < 0 is the twist of the map.
    println!("double-step chart coefficients:");
    for k in 0..4 {
        let alpha = TAU * k as f64 / 8.0;
        let (f, g) = infinity_expansion_double(&oval, alpha)?;
        println!("  alpha {alpha:.4}: f {f:+.6}  g {g:+.6}");
    }

    let chart = infinity_chart(&oval, 512, Stride::Double)?;
    let worst_f = chart.f.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    println!("  sup f over 512 parameters {worst_f:+.6} (negative everywhere)");

    // Straightening tables and the conjugated step size.
    let tables = lazutkin_change(&chart.f, &chart.g)?;
    println!("straightened coordinates:");
    println!("  b period factor {:.12} (multiplicative closure)", tables.b_period_factor());
    println!("  a full-period increment {:.12}", tables.a_period());

    let angles: Vec<f64> = (0..64).map(|k| TAU * k as f64 / 64.0).collect();
    let (qx1, qy1) = normal_form_residuals(&oval, &tables, 1e-3, &angles)?;
    let (qx2, qy2) = normal_form_residuals(&oval, &tables, 5e-4, &angles)?;
    println!("normal form residuals, inverse radius 1e-3 then 5e-4:");
    println!("  |x' - x - y| / y^2: {qx1:.4e} -> {qx2:.4e} (ratio {:.3}, bounded)", qx2 / qx1);
    println!("  |y' - y| / y^3:     {qy1:.4e} -> {qy2:.4e} (ratio {:.3}, halves)", qy2 / qy1);
    Ok(())
}
