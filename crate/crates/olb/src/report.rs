//! Report emission: JSON with fixed 17-significant-digit floats and sorted
//! keys, and the two CSV trace schemas. Reruns with identical inputs must
//! produce byte-identical files, so every float goes through one formatter.

use crate::centers::CenterTrace;
use crate::error::Result;
use crate::geom::Vec2;
use crate::oval::Oval;
use serde::Serialize;

/// One float, 17 significant digits, scientific. The fixed width keeps
/// rerun output byte-identical regardless of magnitude.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

struct Fixed17;

impl serde_json::ser::Formatter for Fixed17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        writer.write_all(float17(value).as_bytes())
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serialize any report value to the canonical JSON byte layout: map keys
/// sorted, floats through `float17`, no insignificant whitespace.
pub fn to_json(value: &impl Serialize) -> Result<String> {
    // Round-trip through Value so maps serialize in sorted key order.
    let tree = serde_json::to_value(value)?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17);
    tree.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serializer emits utf8"))
}

/// One orbit CSV row.
#[derive(Clone, Copy, Debug)]
pub struct OrbitRow {
    pub step: usize,
    pub point: Vec2,
    /// Focal sum on ellipse tables, the level function elsewhere.
    pub focal_or_level: f64,
    /// Absolute drift of that column from its value at the first row.
    pub residual: f64,
}

pub const ORBIT_CSV_HEADER: &str = "step,x,y,r,alpha,focal_or_level,residual";

/// Orbit trace CSV: one row per recorded step, polar columns derived from
/// the point.
pub fn orbit_csv(rows: &[OrbitRow]) -> String {
    let mut out = String::from(ORBIT_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.step,
            float17(row.point.x),
            float17(row.point.y),
            float17(row.point.norm()),
            float17(row.point.angle()),
            float17(row.focal_or_level),
            float17(row.residual),
        ));
    }
    out
}

pub const CENTERS_CSV_HEADER: &str = "step,cx,cy,beta,R,r,ham_level,rescaled_x,rescaled_y";

/// Center trace CSV; `step` is the underlying orbit step index of each
/// record, and `ham_level` is evaluated on the rescaled center.
pub fn centers_csv(oval: &Oval, trace: &CenterTrace) -> Result<String> {
    let mut out = String::from(CENTERS_CSV_HEADER);
    out.push('\n');
    let parity = usize::from(trace.odd_steps);
    for i in 0..trace.len() {
        let center = oval.origin() + Vec2::unit(trace.beta[i]) * trace.big_r[i];
        let level = crate::centers::ham_level(oval, trace.rescaled[i])?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            2 * i + parity,
            float17(center.x),
            float17(center.y),
            float17(trace.beta[i]),
            float17(trace.big_r[i]),
            float17(trace.orbit_r[i]),
            float17(level),
            float17(trace.rescaled[i].x),
            float17(trace.rescaled[i].y),
        ));
    }
    Ok(out)
}
