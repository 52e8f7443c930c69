//! Scalar numerics used across the toolkit. One root-finding convention everywhere:
//! bracket by sign change on a coarse scan, then refine by a guarded Newton that
//! falls back to bisection whenever a step would leave the bracket.

use crate::error::{Error, Result};

/// Default scan resolution for bracketing.
pub const SCAN_SAMPLES: usize = 256;
/// Hard cap on refinement iterations.
pub const MAX_ITER: usize = 80;

/// Sign-change brackets of `f` on [a, b] from an (n+1)-point uniform scan.
/// A sample landing exactly on a root yields a degenerate bracket around it.
pub fn scan_brackets(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let h = (b - a) / n as f64;
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=n {
        let x1 = a + h * i as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            out.push((x0, x0));
        } else if f0 * f1 < 0.0 {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        out.push((x0, x0));
    }
    out
}

/// Hybrid Newton/bisection on a bracket with f(lo), f(hi) of opposite sign.
/// Newton runs from the midpoint and is rejected (bisection instead) when the
/// derivative is too small or the step leaves the bracket. Converges when
/// |f| <= tol or the bracket collapses to floating-point resolution.
pub fn refine_root(
    mut f: impl FnMut(f64) -> (f64, f64),
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if lo == hi {
        return Ok(lo);
    }
    let (mut flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo * fhi > 0.0 {
        return Err(Error::NoRoot);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let (fx, dfx) = f(x);
        if fx.abs() <= tol {
            return Ok(x);
        }
        // Keep the sign-change bracket tight.
        if fx * flo < 0.0 {
            hi = x;
        } else {
            lo = x;
            flo = fx;
        }
        let newton = x - fx / dfx;
        x = if dfx != 0.0 && newton > lo.min(hi) && newton < lo.max(hi) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo).abs() <= f64::EPSILON * (x.abs() + 1.0) {
            return Ok(x);
        }
    }
    // Iteration cap: accept only if the final residual is within a loose factor.
    let (fx, _) = f(x);
    if fx.abs() <= tol * 1e3 {
        Ok(x)
    } else {
        Err(Error::NoRoot)
    }
}

/// Scan [a, b] and refine every bracketed root.
pub fn find_roots(
    mut f: impl FnMut(f64) -> (f64, f64),
    a: f64,
    b: f64,
    n: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let brackets = scan_brackets(|x| f(x).0, a, b, n);
    let mut roots = Vec::with_capacity(brackets.len());
    for br in brackets {
        roots.push(refine_root(&mut f, br, tol)?);
    }
    Ok(roots)
}

/// Adaptive Simpson quadrature. `tol` is an absolute target for the whole interval.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(&f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Maximum of a smooth function on [a, b): coarse scan, then golden-section
/// refinement around the best sample. Returns (argmax, max).
pub fn max_scalar(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, xtol: f64) -> (f64, f64) {
    let h = (b - a) / n as f64;
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let v = f(a + h * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let x0 = a + h * best_i as f64;
    let (lo, hi) = (x0 - h, x0 + h);
    golden_max(f, lo, hi, xtol)
}

/// Both extrema of a smooth function on [a, b): one scan pass, then golden
/// refinement around the best maximum and minimum samples.
/// Returns ((argmax, max), (argmin, min)).
pub fn extrema_scalar(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    n: usize,
    xtol: f64,
) -> ((f64, f64), (f64, f64)) {
    let h = (b - a) / n as f64;
    let mut hi = (0usize, f64::NEG_INFINITY);
    let mut lo = (0usize, f64::INFINITY);
    for i in 0..n {
        let v = f(a + h * i as f64);
        if v > hi.1 {
            hi = (i, v);
        }
        if v < lo.1 {
            lo = (i, v);
        }
    }
    let xh = a + h * hi.0 as f64;
    let xl = a + h * lo.0 as f64;
    let top = golden_max(&f, xh - h, xh + h, xtol);
    let (xm, fm) = golden_max(|x| -f(x), xl - h, xl + h, xtol);
    (top, (xm, -fm))
}

/// Golden-section maximization on [lo, hi].
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > xtol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Two-stage Richardson extrapolation for a quantity E(h) = L + c1 h + c2 h^2 + ...
/// sampled at h, h/2, h/4. Returns the extrapolated limit and the relative
/// disagreement between the two first-stage estimates.
pub fn richardson(e_h: f64, e_h2: f64, e_h4: f64) -> (f64, f64) {
    let r1a = 2.0 * e_h2 - e_h;
    let r1b = 2.0 * e_h4 - e_h2;
    let limit = (4.0 * r1b - r1a) / 3.0;
    let scale = r1a.abs().max(r1b.abs()).max(1e-300);
    (limit, (r1b - r1a).abs() / scale)
}

/// Least-squares line through (xs, ys). Returns (slope, intercept).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{PI, TAU};

    #[test]
    fn roots_of_shifted_cosine() {
        let f = |x: f64| (x.cos() - 0.3, -x.sin());
        let roots = find_roots(f, 0.0, TAU, SCAN_SAMPLES, 1e-14).unwrap();
        assert_eq!(roots.len(), 2);
        let r0 = 0.3f64.acos();
        assert!((roots[0] - r0).abs() < 1e-12);
        assert!((roots[1] - (TAU - r0)).abs() < 1e-12);
    }

    #[test]
    fn refine_survives_flat_derivative() {
        // Newton from the plateau would diverge; bisection must take over.
        let f = |x: f64| ((x - 1.0).powi(3), 3.0 * (x - 1.0) * (x - 1.0));
        let r = refine_root(f, (0.0, 3.0), 1e-30).unwrap();
        assert!((r - 1.0).abs() < 1e-5);
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let v = integrate(|x| x.sin(), 0.0, PI, 1e-13);
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate(|x| 1.0 / (2.0 + x.cos()), 0.0, TAU, 1e-13);
        assert!((v - TAU / 3.0f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn golden_finds_interior_maximum() {
        let (x, fx) = max_scalar(|x| -(x - 0.7) * (x - 0.7) + 2.0, 0.0, 2.0, 64, 1e-12);
        assert!((x - 0.7).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-13);
    }

    #[test]
    fn richardson_recovers_linear_limit() {
        let e = |h: f64| 5.0 - 3.0 * h + 0.4 * h * h;
        let (lim, rel) = richardson(e(1e-2), e(5e-3), e(2.5e-3));
        assert!((lim - 5.0).abs() < 1e-9);
        assert!(rel < 1e-4);
    }

    #[test]
    fn linear_fit_recovers_slope() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| -1.5 * x + 0.25).collect();
        let (s, b) = linear_fit(&xs, &ys);
        assert!((s + 1.5).abs() < 1e-12 && (b - 0.25).abs() < 1e-12);
    }
}
