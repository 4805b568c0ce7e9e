//! Independent reference integrator: adaptive Simpson with Richardson
//! correction, interval splitting at breakpoints and tail truncation.
//!
//! Shares no code with the Gauss-Kronrod path so it can check it.

use crate::error::{domain, Error, Result};

const MAX_DEPTH: u32 = 48;
const EVAL_BUDGET: usize = 20_000_000;

struct Budget {
    evals: usize,
    exhausted: bool,
}

/// Integrates `f` over `[lo, hi]` (either end may be infinite) to absolute
/// accuracy `tol`.
///
/// Infinite ends are truncated at the first probe distance past which `|f|`
/// stays below `tol / width` on a dense sample. On budget exhaustion the
/// error carries the best estimate so far.
pub fn oracle_integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breakpoints: &[f64], tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return domain("oracle tolerance must be positive");
    }
    if lo.is_nan() || hi.is_nan() {
        return domain("oracle domain has NaN end");
    }
    if lo >= hi {
        return Ok(0.0);
    }
    let anchor_lo = breakpoints.iter().copied().filter(|b| b.is_finite()).fold(0.0f64, f64::min);
    let anchor_hi = breakpoints.iter().copied().filter(|b| b.is_finite()).fold(0.0f64, f64::max);
    let a = if lo.is_finite() { lo } else { truncate(&f, hi.min(anchor_lo), -1.0, tol) };
    let b = if hi.is_finite() { hi } else { truncate(&f, lo.max(anchor_hi), 1.0, tol) };
    let mut edges: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges.insert(0, a);
    edges.push(b);

    let total = b - a;
    let mut budget = Budget { evals: 0, exhausted: false };
    let mut sum = 0.0;
    for w in edges.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let piece_tol = tol * (x1 - x0) / total;
        sum += simpson_piece(&f, x0, x1, piece_tol, &mut budget);
    }
    if budget.exhausted {
        return Err(Error::NoConvergence { message: "oracle evaluation budget exhausted".into(), estimate: sum });
    }
    Ok(sum)
}

/// Walks outward from `start` in direction `dir` (doubling steps) until
/// `|f|` on a dense sample of `[x, 2x]` is below `tol / (8 x)`.
fn truncate<F: Fn(f64) -> f64>(f: &F, start: f64, dir: f64, tol: f64) -> f64 {
    let mut reach = 1.0;
    while reach < 1e7 {
        let x0 = start + dir * reach;
        let samples = 64;
        let small = (0..=samples).all(|k| {
            let x = x0 + dir * reach * k as f64 / samples as f64;
            f(x).abs() * 8.0 * (2.0 * reach) < tol
        });
        if small {
            return x0;
        }
        reach *= 2.0;
    }
    start + dir * reach
}

fn simpson_piece<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, budget: &mut Budget) -> f64 {
    // seed with a few panels so narrow features are not missed
    let panels = 16;
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let x0 = a + k as f64 * h;
        let x1 = if k + 1 == panels { b } else { x0 + h };
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0), f(xm), f(x1));
        budget.evals += 3;
        let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        sum += refine(f, x0, xm, x1, f0, fm, f1, whole, tol / panels as f64, MAX_DEPTH, budget);
    }
    sum
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut Budget,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    budget.evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || budget.evals > EVAL_BUDGET {
        if delta.abs() > 15.0 * tol {
            budget.exhausted = true;
        }
        return left + right + delta / 15.0;
    }
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget)
        + refine(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget)
}
