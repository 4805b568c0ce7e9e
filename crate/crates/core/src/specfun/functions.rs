use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::linalg::Matrix;

/// Largest matrix size supported by the public evaluators.
pub const MAX_N: usize = 12;

pub(crate) fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        domain(format!("matrix size n={n} outside 1..={MAX_N}"))
    }
}

/// `pi^{-1/4}`, the value of `h_0(0)`.
pub fn pi_quarter_inv() -> f64 {
    PI.powf(-0.25)
}

/// Orthonormal Hermite functions `h_0(y) .. h_{n-1}(y)`.
pub fn hermite_vector(n: usize, y: f64) -> Result<Vec<f64>> {
    check_n(n)?;
    if !y.is_finite() {
        return domain("Hermite functions need a finite argument");
    }
    let mut out = vec![0.0; n];
    hermite_into(y, &mut out);
    Ok(out)
}

/// Fills `out[m] = h_m(y)` by the recurrence on the normalized functions,
/// `h_{m+1} = sqrt(2/(m+1)) y h_m - sqrt(m/(m+1)) h_{m-1}`. No size cap.
pub(crate) fn hermite_into(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = pi_quarter_inv() * (-0.5 * y * y).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * y * out[0];
    }
    for m in 1..out.len().saturating_sub(1) {
        let mf = m as f64;
        out[m + 1] = (2.0 / (mf + 1.0)).sqrt() * y * out[m] - (mf / (mf + 1.0)).sqrt() * out[m - 1];
    }
}

/// Signed Laguerre functions `l_m(y) = (-1)^m L_m(y) e^{-y/2}`, `m < n`.
pub fn laguerre_vector(n: usize, y: f64) -> Result<Vec<f64>> {
    check_n(n)?;
    if !(y >= 0.0) || !y.is_finite() {
        return domain(format!("Laguerre functions need y >= 0, got {y}"));
    }
    let mut out = vec![0.0; n];
    laguerre_into(y, &mut out);
    Ok(out)
}

/// Standard three-term Laguerre recurrence run on `L_m(y) e^{-y/2}` so the
/// exponential never overflows; the `(-1)^m` sign is applied afterwards.
pub(crate) fn laguerre_into(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let e = (-0.5 * y).exp();
    let (mut prev, mut cur) = (0.0, e);
    out[0] = e;
    for m in 1..out.len() {
        let mf = (m - 1) as f64;
        let next = ((2.0 * mf + 1.0 - y) * cur - mf * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
        out[m] = if m % 2 == 1 { -cur } else { cur };
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Lower-triangular `C` with `h_k(s) = e^{-s^2/2} sum_m C[k][m] s^m`.
///
/// Entry `C[k][k-2m] = (-1)^m k! 2^{k-2m} / (m! (k-2m)! sqrt(2^k k! sqrt(pi)))`.
pub fn hermite_coeff_matrix(n: usize) -> Result<Matrix> {
    check_n(n)?;
    let mut c = Matrix::zeros(n);
    for k in 0..n {
        let norm = (2f64.powi(k as i32) * factorial(k) * PI.sqrt()).sqrt();
        for m in 0..=k / 2 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let p = k - 2 * m;
            c[(k, p)] = sign * factorial(k) * 2f64.powi(p as i32) / (factorial(m) * factorial(p)) / norm;
        }
    }
    Ok(c)
}

/// `G_m(t) = int_t^inf s^m e^{-s^2} ds` for `m = 0..=max_order`.
///
/// Closed recurrence `G_m = t^{m-1} e^{-t^2}/2 + (m-1)/2 G_{m-2}` seeded with
/// `G_0 = sqrt(pi)/2 erfc(t)` and `G_1 = e^{-t^2}/2`. At `t = -inf` the
/// boundary term vanishes and the recurrence yields the Gaussian moments.
pub fn gaussian_tail_moments(max_order: usize, t: f64) -> Result<Vec<f64>> {
    if t.is_nan() {
        return domain("tail moment at NaN");
    }
    let mut g = vec![0.0; max_order + 1];
    if t == f64::INFINITY {
        return Ok(g);
    }
    let (g0, edge) = if t == f64::NEG_INFINITY {
        (PI.sqrt(), 0.0)
    } else {
        (0.5 * PI.sqrt() * libm::erfc(t), (-t * t).exp())
    };
    g[0] = g0;
    if max_order >= 1 {
        g[1] = 0.5 * edge;
    }
    for m in 2..=max_order {
        let boundary = if edge == 0.0 { 0.0 } else { 0.5 * t.powi(m as i32 - 1) * edge };
        g[m] = boundary + 0.5 * (m as f64 - 1.0) * g[m - 2];
    }
    Ok(g)
}

/// `M_t = int_t^inf e^{-s^2} S S^T ds` with `S = (1, s, .., s^{n-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailMomentMatrix {
    pub n: usize,
    pub t: f64,
    pub entries: Matrix,
}

pub fn gaussian_tail_moment_matrix(n: usize, t: f64) -> Result<TailMomentMatrix> {
    check_n(n)?;
    let g = gaussian_tail_moments(2 * n - 2, t)?;
    let mut m = Matrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = g[j + k];
        }
    }
    Ok(TailMomentMatrix { n, t, entries: m })
}
