//! Command-line front end: orbits, center traces, periodic orbits, named
//! verification checks, and parallel parameter sweeps.
//!
//! Exit codes: 0 success, 1 usage error, 2 a verification ran and failed its
//! bound, 3 the numerics did not converge. Reruns with the same arguments
//! produce byte-identical output: floats print at 17 significant digits, JSON
//! keys sort, and sweep rows assemble in index order no matter which worker
//! finishes first. `OLB_THREADS` caps the sweep worker count.

use std::io::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use clap::{Args, Parser, Subcommand};

use crate::asymptotics::main1_residual;
use crate::centers::center_trace;
use crate::error::{Error, Result};
use crate::geom::{Vec2, TAU};
use crate::map::{orbit, Stride};
use crate::oval::{Oval, OvalKind};
use crate::periodic::{find_periodic, verify_periodic};
use crate::report::{self, float17, OrbitRow};
use crate::svg::{render_svg, SvgStyle};
use crate::tablespec::{canonical_spec, parse_table};
use crate::verify::{self, Verification};

#[derive(Parser, Debug)]
#[command(
    name = "olb",
    about = "Outer length billiard toolkit: orbits, centers, periodic orbits, checks, sweeps",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterate the map and write the orbit as CSV (and optionally SVG).
    Orbit(OrbitArgs),
    /// Trace auxiliary-circle centers along an orbit.
    Centers(CentersArgs),
    /// Find one variational periodic orbit and report it as JSON.
    Periodic(PeriodicArgs),
    /// Run a named verification check and report JSON; exits 2 on failure.
    Verify(VerifyArgs),
    /// Fan a scan over parameter cells in parallel, output in fixed order.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct OrbitArgs {
    /// Table spec, e.g. ellipse:a=2,b=1 | circle:r=1 | lp:p=1.5 | fourier:c0=1,a2=0.05
    #[arg(long)]
    table: String,
    /// Start point "x,y".
    #[arg(long)]
    start: String,
    /// Number of strides to take.
    #[arg(long)]
    steps: usize,
    /// Points per stride: 1 records every step, 2 every double step.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    /// Optional SVG rendering of the orbit over the table outline.
    #[arg(long)]
    svg: Option<String>,
}

#[derive(Args, Debug)]
struct CentersArgs {
    /// Table spec, same mini-language as `orbit`.
    #[arg(long)]
    table: String,
    /// Start point "x,y"; must sit well outside the table.
    #[arg(long)]
    start: String,
    /// Number of recorded centers (one per double step).
    #[arg(long)]
    records: usize,
    /// Record the centers of the odd-numbered steps instead of the even ones.
    #[arg(long, default_value_t = false)]
    odd: bool,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    /// Optional SVG of the rescaled centers over the table outline.
    #[arg(long)]
    svg: Option<String>,
}

#[derive(Args, Debug)]
struct PeriodicArgs {
    /// Table spec, same mini-language as `orbit`.
    #[arg(long)]
    table: String,
    /// Number of vertices (at least 3).
    #[arg(long)]
    k: usize,
    /// Winding number, coprime to k, with 2m < k.
    #[arg(long)]
    m: usize,
    /// JSON output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    /// Optional SVG of the closed orbit polygon over the table outline.
    #[arg(long)]
    svg: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check name; one of the named checks listed by `verify help`.
    check: String,
    /// Table spec override; repeatable where the check takes several.
    #[arg(long)]
    table: Vec<String>,
    /// Radii override for the decay check, comma-separated.
    #[arg(long)]
    radii: Option<String>,
    /// Family parameters for the hausdorff check, comma-separated.
    #[arg(long)]
    t: Option<String>,
    /// JSON report path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// What to sweep: "period" for (k,m) orbit radii, "residual" for the
    /// far-field decay residual per radius and direction.
    #[arg(long)]
    kind: String,
    /// Table spec, same mini-language as `orbit`.
    #[arg(long)]
    table: String,
    /// Largest vertex count for a period sweep.
    #[arg(long, default_value_t = 9)]
    k_max: usize,
    /// Radii for a residual sweep, comma-separated.
    #[arg(long, default_value = "50,100,200,400,800")]
    radii: String,
    /// Directions per radius for a residual sweep.
    #[arg(long, default_value_t = 16)]
    directions: usize,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
}

/// Parse and run; returns the process exit code. Diagnostics go to stderr.
pub fn run<I>(argv: I) -> i32
where
    I: IntoIterator,
    I::Item: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, everything else is a
            // usage error regardless of clap's own exit convention.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("olb: {e}");
            if e.is_nonconvergence() {
                3
            } else {
                1
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Orbit(a) => cmd_orbit(a),
        Command::Centers(a) => cmd_centers(a),
        Command::Periodic(a) => cmd_periodic(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn parse_point(s: &str) -> Result<Vec2> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Error::Usage(format!("expected \"x,y\", got '{s}'")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::Usage(format!("bad coordinate '{v}' in '{s}'")))
    };
    Ok(Vec2::new(parse(x)?, parse(y)?))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("bad {what} entry '{v}' in '{s}'")))
        })
        .collect()
}

fn emit(out: &Option<String>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(content.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Focal sum on conic tables, the width-Hamiltonian level elsewhere.
fn trace_column(oval: &Oval) -> Box<dyn Fn(Vec2) -> f64 + Send + Sync> {
    let o = oval.origin();
    match oval.kind() {
        OvalKind::Circle { .. } => Box::new(move |z: Vec2| 2.0 * (z - o).norm()),
        OvalKind::Ellipse { a, b } => {
            let c = (a * a - b * b).max(0.0).sqrt();
            let (f1, f2) = (o + Vec2::new(-c, 0.0), o + Vec2::new(c, 0.0));
            Box::new(move |z: Vec2| z.dist(f1) + z.dist(f2))
        }
        _ => {
            let oval = oval.clone();
            Box::new(move |z: Vec2| {
                let u = z - oval.origin();
                u.norm() * oval.width(u.angle() + std::f64::consts::FRAC_PI_2)
            })
        }
    }
}

fn cmd_orbit(a: OrbitArgs) -> Result<i32> {
    let oval = parse_table(&a.table)?;
    let start = parse_point(&a.start)?;
    let stride = match a.stride {
        1 => Stride::Single,
        2 => Stride::Double,
        other => {
            return Err(Error::Usage(format!("stride must be 1 or 2, got {other}")));
        }
    };
    let points = orbit(&oval, start, a.steps, stride)?;
    let column = trace_column(&oval);
    let base = column(points[0]);
    let rows: Vec<OrbitRow> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let v = column(p);
            OrbitRow {
                step: i * stride.count(),
                point: p,
                focal_or_level: v,
                residual: (v - base).abs(),
            }
        })
        .collect();
    emit(&a.out, &report::orbit_csv(&rows))?;
    if let Some(path) = &a.svg {
        let doc = render_svg(&oval, &points, &SvgStyle::default())?;
        emit(&Some(path.clone()), &doc)?;
    }
    Ok(0)
}

fn cmd_centers(a: CentersArgs) -> Result<i32> {
    let oval = parse_table(&a.table)?;
    let start = parse_point(&a.start)?;
    let trace = center_trace(&oval, start, a.records, a.odd)?;
    emit(&a.out, &report::centers_csv(&oval, &trace)?)?;
    if let Some(path) = &a.svg {
        let pts: Vec<Vec2> = (0..trace.len())
            .map(|i| {
                oval.origin()
                    + Vec2::unit(trace.beta[i]) * trace.big_r[i]
                        * (1.0 / trace.orbit_r[i].powi(2))
            })
            .collect();
        let doc = render_svg(&oval, &pts, &SvgStyle::default())?;
        emit(&Some(path.clone()), &doc)?;
    }
    Ok(0)
}

fn cmd_periodic(a: PeriodicArgs) -> Result<i32> {
    let oval = parse_table(&a.table)?;
    let orb = find_periodic(&oval, a.k, a.m)?;
    let residual = verify_periodic(&oval, &orb)?;
    let doc = serde_json::json!({
        "table": canonical_spec(&parse_table_kind(&a.table)?),
        "k": orb.k,
        "m": orb.m,
        "alphas": orb.alphas,
        "vertices": orb.vertices.iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
        "perimeter": orb.perimeter,
        "max_radius": orb.max_radius(),
        "map_residual": residual,
    });
    let mut text = report::to_json(&doc)?;
    text.push('\n');
    emit(&a.out, &text)?;
    if let Some(path) = &a.svg {
        let style = SvgStyle { close_orbit: true, ..SvgStyle::default() };
        let doc = render_svg(&oval, &orb.vertices, &style)?;
        emit(&Some(path.clone()), &doc)?;
    }
    Ok(0)
}

fn parse_table_kind(spec: &str) -> Result<OvalKind> {
    crate::tablespec::parse_kind(spec)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let v: Verification = match a.check.as_str() {
        "main1" => {
            let radii = match &a.radii {
                Some(s) => parse_list(s, "radius")?,
                None => Vec::new(),
            };
            verify::check_main1(&a.table, &radii)?
        }
        "hausdorff" => {
            let ts = match &a.t {
                Some(s) => parse_list(s, "t")?,
                None => Vec::new(),
            };
            verify::check_hausdorff(&ts)?
        }
        name => {
            if !a.table.is_empty() || a.radii.is_some() || a.t.is_some() {
                return Err(Error::Usage(format!(
                    "check '{name}' takes no --table/--radii/--t overrides"
                )));
            }
            verify::run_check(name)?
        }
    };
    let mut text = report::to_json(&v.report)?;
    text.push('\n');
    emit(&a.out, &text)?;
    Ok(if v.pass { 0 } else { 2 })
}

fn cmd_sweep(a: SweepArgs) -> Result<i32> {
    let oval = parse_table(&a.table)?;
    match a.kind.as_str() {
        "period" => {
            if a.k_max < 3 {
                return Err(Error::Usage("period sweep needs k_max >= 3".into()));
            }
            let mut cells = Vec::new();
            for k in 3..=a.k_max {
                for m in 1..=(k - 1) / 2 {
                    if gcd(k, m) == 1 {
                        cells.push((k, m));
                    }
                }
            }
            let radii = par_map(cells.len(), |i| {
                let (k, m) = cells[i];
                find_periodic(&oval, k, m).map(|orb| orb.max_radius()).ok()
            });
            let mut out = String::from("k,m,radius\n");
            for ((k, m), radius) in cells.iter().zip(&radii) {
                let cell = radius.map(float17).unwrap_or_default();
                out.push_str(&format!("{k},{m},{cell}\n"));
            }
            emit(&a.out, &out)?;
            Ok(0)
        }
        "residual" => {
            let radii = parse_list(&a.radii, "radius")?;
            if radii.is_empty() || a.directions == 0 {
                return Err(Error::Usage("residual sweep needs radii and directions".into()));
            }
            let n = radii.len() * a.directions;
            let origin = oval.origin();
            let rows = par_map(n, |i| {
                let (ri, di) = (i / a.directions, i % a.directions);
                let angle = TAU * di as f64 / a.directions as f64;
                let x = origin + radii[ri] * Vec2::unit(angle);
                (radii[ri], di, angle, main1_residual(&oval, x))
            });
            let mut out = String::from("radius,direction,angle,residual\n");
            for (r, di, angle, res) in rows {
                let cell = match res {
                    Ok(v) => float17(v),
                    Err(e) if e.is_nonconvergence() => String::new(),
                    Err(e) => return Err(e),
                };
                out.push_str(&format!("{},{di},{},{cell}\n", float17(r), float17(angle)));
            }
            emit(&a.out, &out)?;
            Ok(0)
        }
        other => Err(Error::Usage(format!(
            "sweep kind must be 'period' or 'residual', got '{other}'"
        ))),
    }
}

/// Worker count: OLB_THREADS when set, hardware parallelism otherwise, never
/// more than the number of cells.
fn thread_count(cells: usize) -> usize {
    let cap = std::env::var("OLB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1);
    let hw = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    cap.unwrap_or(hw).min(cells.max(1))
}

/// Evaluate `f` over 0..n on a small thread pool; results land in index order
/// regardless of completion order.
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_count(n);
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, T)>();
    std::thread::scope(|s| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let f = &f;
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                if tx.send((i, f(i))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
        for (i, v) in rx {
            slots[i] = Some(v);
        }
        slots.into_iter().map(|s| s.expect("every cell reported")).collect()
    })
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        run(args.iter().map(|s| s.to_string()))
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["olb"]), 1);
        assert_eq!(run_args(&["olb", "nope"]), 1);
        assert_eq!(run_args(&["olb", "orbit", "--table", "bad"]), 1);
        assert_eq!(
            run_args(&["olb", "orbit", "--table", "circle:r=1", "--start", "x", "--steps", "1"]),
            1
        );
        assert_eq!(
            run_args(&[
                "olb", "orbit", "--table", "circle:r=1", "--start", "3,0", "--steps", "2",
                "--stride", "7",
            ]),
            1
        );
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_args(&["olb", "--help"]), 0);
    }

    #[test]
    fn point_and_list_parsing() {
        assert_eq!(parse_point("30,0").unwrap(), Vec2::new(30.0, 0.0));
        assert_eq!(parse_point(" 1.5 , -2 ").unwrap(), Vec2::new(1.5, -2.0));
        assert!(parse_point("30").is_err());
        assert_eq!(parse_list("2,3,4", "t").unwrap(), vec![2.0, 3.0, 4.0]);
        assert!(parse_list("2,,4", "t").is_err());
    }

    #[test]
    fn par_map_is_index_ordered() {
        std::env::set_var("OLB_THREADS", "3");
        let out = par_map(97, |i| i * i);
        std::env::remove_var("OLB_THREADS");
        assert_eq!(out, (0..97).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn orbit_column_matches_table_kind() {
        let ell = parse_table("ellipse:a=2,b=1").unwrap();
        let col = trace_column(&ell);
        let c = 3.0f64.sqrt();
        let z = ell.origin() + Vec2::new(0.0, 5.0);
        let expect = z.dist(ell.origin() + Vec2::new(-c, 0.0))
            + z.dist(ell.origin() + Vec2::new(c, 0.0));
        assert!((col(z) - expect).abs() < 1e-12);

        let lp = parse_table("lp:p=1.5").unwrap();
        let col = trace_column(&lp);
        let z = lp.origin() + Vec2::new(7.0, 0.0);
        let expect = 7.0 * lp.width(std::f64::consts::FRAC_PI_2);
        assert!((col(z) - expect).abs() < 1e-12);
    }
}
