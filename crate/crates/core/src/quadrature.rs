//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpsonConfig {
    pub rel_tol: f64,
    /// Hard cap on accepted subintervals.
    pub max_intervals: usize,
    pub max_depth: u32,
}

impl Default for SimpsonConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_intervals: 1 << 20,
            max_depth: 48,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

const INITIAL_PANELS: usize = 16;

/// `∫_a^b f`. The absolute target is `rel_tol` times the magnitude of a
/// coarse first estimate (or of `∫|f|` when the integrand changes sign),
/// split across panels in proportion to their width.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, config: &SimpsonConfig) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite bounds [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error_estimate: 0.0, intervals: 0 });
    }
    if b < a {
        let r = integrate(f, b, a, config)?;
        return Ok(Integral { value: -r.value, ..r });
    }

    let width = (b - a) / INITIAL_PANELS as f64;
    let mut stack = Vec::with_capacity(64);
    let mut coarse = 0.0;
    let mut fx_prev = f(a);
    for i in 0..INITIAL_PANELS {
        let pa = a + width * i as f64;
        let pb = if i + 1 == INITIAL_PANELS { b } else { pa + width };
        let fm = f(0.5 * (pa + pb));
        let fb = f(pb);
        let whole = simpson(pa, pb, fx_prev, fm, fb);
        coarse += whole.abs();
        stack.push(Panel { a: pa, b: pb, fa: fx_prev, fm, fb, whole, depth: 0 });
        fx_prev = fb;
    }
    if !coarse.is_finite() {
        return Err(Error::Quadrature { achieved: f64::INFINITY, requested: config.rel_tol });
    }
    let target = config.rel_tol * coarse.max(f64::MIN_POSITIVE);

    let mut value = CompensatedSum::new();
    let mut error = 0.0;
    let mut intervals = 0;
    let mut capped = false;
    // Process left to right so the summation order is fixed.
    stack.reverse();
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        let local = target * (p.b - p.a) / (b - a);
        if !delta.is_finite() {
            return Err(Error::Quadrature { achieved: f64::INFINITY, requested: config.rel_tol });
        }
        let out_of_budget = p.depth >= config.max_depth || intervals + stack.len() >= config.max_intervals;
        if delta.abs() <= 15.0 * local || out_of_budget {
            if out_of_budget && delta.abs() > 15.0 * local {
                capped = true;
            }
            value.add(left + right + delta / 15.0);
            error += delta.abs() / 15.0;
            intervals += 1;
        } else {
            stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, depth: p.depth + 1 });
            stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, depth: p.depth + 1 });
        }
    }
    let value = value.value();
    if capped {
        let achieved = error / value.abs().max(f64::MIN_POSITIVE);
        return Err(Error::Quadrature { achieved, requested: config.rel_tol });
    }
    Ok(Integral { value, error_estimate: error, intervals })
}
