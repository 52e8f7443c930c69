//! Standalone SVG figures: an orbit polyline over the table outline, framed
//! by the data extent plus a 5% margin. Output is plain text with fixed
//! float formatting so identical runs render identical bytes.

use crate::error::{Error, Result};
use crate::geom::{Vec2, TAU};
use crate::oval::Oval;

/// Stroke choices for the two curves. Coordinates are geometric; stroke
/// widths are given as a fraction of the frame size.
#[derive(Clone, Debug)]
pub struct SvgStyle {
    pub orbit_stroke: String,
    pub outline_stroke: String,
    pub stroke_frac: f64,
    /// Pixel size of the square rendering, the viewBox scales to fit.
    pub pixels: u32,
    /// Close the orbit polyline back to its first point.
    pub close_orbit: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            orbit_stroke: "#1f4e79".into(),
            outline_stroke: "#b03a2e".into(),
            stroke_frac: 0.002,
            pixels: 720,
            close_orbit: false,
        }
    }
}

const OUTLINE_SAMPLES: usize = 512;

fn fmt(x: f64) -> String {
    // Six significant digits are far below visual resolution but keep the
    // document small; ties in the last digit are stable across reruns.
    format!("{x:.6e}")
}

/// Render the orbit points and the table outline into a standalone SVG
/// document. The frame covers both curves with a 5% margin; the vertical
/// axis points up, matching the geometry.
pub fn render_svg(oval: &Oval, points: &[Vec2], style: &SvgStyle) -> Result<String> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let outline: Vec<Vec2> = (0..=OUTLINE_SAMPLES)
        .map(|i| oval.point_at(TAU * (i % OUTLINE_SAMPLES) as f64 / OUTLINE_SAMPLES as f64))
        .collect();

    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points.iter().chain(&outline) {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
    let margin = 0.05 * span;
    let min = lo - Vec2::new(margin, margin);
    let size = Vec2::new(hi.x - lo.x, hi.y - lo.y) + Vec2::new(margin, margin) * 2.0;
    let stroke = style.stroke_frac * span.max(1e-12);

    // SVG y grows downward; flip by emitting y' = -y and a matching viewBox.
    let flip = |p: &Vec2| format!("{},{}", fmt(p.x), fmt(-p.y));
    let poly = |pts: &[Vec2]| -> String {
        pts.iter().map(&flip).collect::<Vec<_>>().join(" ")
    };

    let mut doc = String::new();
    doc.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{px}\" height=\"{px}\" \
         viewBox=\"{} {} {} {}\">\n",
        fmt(min.x),
        fmt(-(min.y + size.y)),
        fmt(size.x),
        fmt(size.y),
        px = style.pixels,
    ));
    doc.push_str(&format!(
        "  <polygon points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
        poly(&outline[..OUTLINE_SAMPLES]),
        style.outline_stroke,
        fmt(stroke),
    ));
    let tag = if style.close_orbit { "polygon" } else { "polyline" };
    doc.push_str(&format!(
        "  <{tag} points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
        poly(points),
        style.orbit_stroke,
        fmt(stroke),
    ));
    doc.push_str("</svg>\n");
    Ok(doc)
}
