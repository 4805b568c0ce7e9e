//! Invariant suites behind `polybergman verify`.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::algebra::{
    approx_identity_limit, eigencurves_with, eigendecompose_spd, generalized_eigen_check, membership_frak_c,
    membership_t, separation_exponent, ConstantField, FiberTolerances, MatrixField, PhiField,
};
use crate::error::{Error, Result};
use crate::exec::{try_map, Execution};
use crate::linalg::Matrix;
use crate::specfun::{
    build_quadrature, gaussian_tail_moments, hermite_coeff_matrix, hermite_vector, integrate_adaptive_scalar,
    laguerre_vector, AdaptiveOptions, QuadratureSpec, DEFAULT_SMAX, MAX_N,
};
use crate::spectral::{
    approach_point, gamma_a_matrix_with, gamma_b_boundary, gamma_b_with, phi_a_stratum, phi_a_with, phi_plus,
    CompactPoint, HalfLineEnd,
};
use crate::symbols::{half_line_catalog, line_catalog, Symbol1D};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Specfun,
    Spectral,
    Algebra,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Spectral => "spectral",
            Suite::Algebra => "algebra",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub checks: Vec<CheckOutcome>,
    pub verdict: bool,
}

impl VerifyReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<48} max_error={:.3e} tol={:.1e} ({:.1} ms)",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.max_error,
                c.tolerance,
                c.runtime_ms
            ));
            if let Some(d) = &c.detail {
                out.push_str(&format!(" [{d}]"));
            }
            out.push('\n');
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        out.push_str(&format!(
            "suite {}: {} ({} checks, {failed} failed)\n",
            self.suite,
            if self.verdict { "PASS" } else { "FAIL" },
            self.checks.len()
        ));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub quad: AdaptiveOptions,
    pub exec: Execution,
    /// Node count of the fixed rules in the specfun suite.
    pub nodes: usize,
    /// Truncation of the composite rule in the specfun suite.
    pub smax: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { quad: AdaptiveOptions::default(), exec: Execution::default(), nodes: 200, smax: DEFAULT_SMAX }
    }
}

pub fn run_suite(suite: Suite, opts: VerifyOptions) -> VerifyReport {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Specfun | Suite::All) {
        checks.extend(specfun_checks(opts));
    }
    if matches!(suite, Suite::Spectral | Suite::All) {
        checks.extend(spectral_checks(opts));
    }
    if matches!(suite, Suite::Algebra | Suite::All) {
        checks.extend(algebra_checks(opts));
    }
    let verdict = checks.iter().all(|c| c.pass);
    VerifyReport { suite: suite.name().into(), checks, verdict }
}

fn check<F: FnOnce() -> Result<f64>>(name: &str, tolerance: f64, f: F) -> CheckOutcome {
    let start = Instant::now();
    let res = f();
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let (max_error, detail) = match res {
        Ok(v) => (v, None),
        Err(e) => (f64::INFINITY, Some(e.to_string())),
    };
    CheckOutcome { name: name.into(), pass: max_error <= tolerance, max_error, tolerance, runtime_ms, detail }
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn gram(n: usize, spec: QuadratureSpec, basis: impl Fn(f64) -> Result<Vec<f64>>) -> Result<f64> {
    let rule = build_quadrature(&spec)?;
    let packed = rule.integrate_vec(n * n, |x, out| match basis(x) {
        Ok(v) => {
            for j in 0..n {
                for k in 0..n {
                    out[j * n + k] = v[j] * v[k];
                }
            }
        }
        Err(_) => out.fill(f64::NAN),
    });
    Ok(Matrix::from_row_major(n, packed).max_abs_diff(&Matrix::identity(n)))
}

pub fn specfun_checks(opts: VerifyOptions) -> Vec<CheckOutcome> {
    vec![
        check(&format!("hermite orthonormality (n<=8, {} nodes)", opts.nodes), 1e-9, || {
            gram(8, QuadratureSpec::gaussian(opts.nodes), |y| hermite_vector(8, y))
        }),
        check(&format!("laguerre orthonormality (n<=8, {} nodes)", opts.nodes), 1e-9, || {
            gram(8, QuadratureSpec::exponential(opts.nodes), |y| laguerre_vector(8, y.max(0.0)))
        }),
        check("composite rule tail of h0^2 equals erfc/2", 1e-10, || {
            let mut worst: f64 = 0.0;
            for t in [-2.0, -0.3, 0.0, 1.5] {
                let rule = build_quadrature(&QuadratureSpec::composite(t, f64::INFINITY, opts.nodes, opts.smax, &[0.0]))?;
                let v = rule.integrate(|y| hermite_vector(1, y).map_or(f64::NAN, |h| h[0] * h[0]));
                worst = worst.max((v - libm::erfc(t) / 2.0).abs());
            }
            Ok(worst)
        }),
        check("tail moments at -inf are gaussian moments", 1e-13, || {
            let g = gaussian_tail_moments(2 * MAX_N - 2, f64::NEG_INFINITY)?;
            Ok(max_of(g.iter().enumerate().map(|(m, &v)| {
                let want = if m % 2 == 1 { 0.0 } else { libm::tgamma((m as f64 + 1.0) / 2.0) };
                (v - want).abs() / want.abs().max(1.0)
            })))
        }),
        check("tail moments vs adaptive quadrature", 1e-10, || {
            let mut worst: f64 = 0.0;
            for t in [-2.0, -0.5, 0.0, 1.0, 3.0] {
                let g = gaussian_tail_moments(10, t)?;
                for (m, &v) in g.iter().enumerate() {
                    let q = integrate_adaptive_scalar(|s| s.powi(m as i32) * (-s * s).exp(), t, t.max(0.0) + 12.0, &[0.0], opts.quad)?;
                    worst = worst.max((v - q).abs() / v.abs().max(1.0));
                }
            }
            Ok(worst)
        }),
        check("hermite coefficients reproduce H (n<=12)", 1e-10, || {
            let c = hermite_coeff_matrix(MAX_N)?;
            let mut worst: f64 = 0.0;
            for y in linspace(-6.0, 6.0, 49) {
                let s: Vec<f64> = (0..MAX_N).map(|k| y.powi(k as i32) * (-y * y / 2.0).exp()).collect();
                let h = hermite_vector(MAX_N, y)?;
                worst = worst.max(max_of(c.mul_vec(&s).iter().zip(&h).map(|(a, b)| (a - b).abs())));
            }
            Ok(worst)
        }),
    ]
}

/// Errors along the approach path to `p` at `eps = 1e-2, 1e-3, 1e-4`.
pub fn approach_errors(a: &Symbol1D, n: usize, p: CompactPoint, quad: AdaptiveOptions) -> Result<[f64; 3]> {
    let target = phi_a_with(a, n, p, quad)?.entries;
    let mut out = [0.0; 3];
    for (o, eps) in out.iter_mut().zip([1e-2, 1e-3, 1e-4]) {
        *o = phi_a_with(a, n, approach_point(p, eps)?, quad)?.entries.max_abs_diff(&target);
    }
    Ok(out)
}

/// Boundary points exercised by the approach checks.
pub fn boundary_probe_points() -> Vec<CompactPoint> {
    let mut pts = Vec::new();
    for t1 in [-2.0, 0.0, 2.0] {
        pts.push(CompactPoint::Bottom { t1 });
        pts.push(CompactPoint::Top { t1 });
    }
    for t2 in [0.0, 0.5, 2.0, f64::INFINITY] {
        pts.push(CompactPoint::Left { t2 });
        pts.push(CompactPoint::Right { t2 });
    }
    pts
}

/// Errors below this count as converged even when they stop decreasing.
pub const APPROACH_FLOOR: f64 = 1e-9;

/// Strictly decreasing, or already at the rounding floor throughout.
pub fn approach_ok(e: &[f64; 3]) -> bool {
    e.iter().all(|&x| x <= APPROACH_FLOOR) || (e[0] > e[1] && e[1] > e[2])
}

pub fn spectral_checks(opts: VerifyOptions) -> Vec<CheckOutcome> {
    let quad = opts.quad;
    vec![
        check("phi+ closed form vs quadrature (n<=6, 41 pts)", 1e-8, || {
            let ts = linspace(-4.0, 4.0, 41);
            let chi = Symbol1D::chi_plus();
            let errs = try_map(opts.exec, &ts, |&t| {
                let mut worst: f64 = 0.0;
                for n in 1..=6 {
                    let q = gamma_a_matrix_with(&chi, n, t, 0.25, quad)?.entries;
                    worst = worst.max(phi_plus(n, t)?.entries.max_abs_diff(&q));
                }
                Ok::<_, Error>(worst)
            })?;
            Ok(max_of(errs))
        }),
        check("phi+ (n=1) equals erfc/2 on [-5, 5]", 1e-10, || {
            let mut worst: f64 = 0.0;
            for t in linspace(-5.0, 5.0, 101) {
                worst = worst.max((phi_plus(1, t)?.entries[(0, 0)] - libm::erfc(t) / 2.0).abs());
            }
            Ok(worst)
        }),
        check("phi+ exact endpoints (n<=12)", 1e-12, || {
            let mut worst: f64 = 0.0;
            for n in 1..=MAX_N {
                worst = worst.max(phi_plus(n, f64::NEG_INFINITY)?.entries.max_abs_diff(&Matrix::identity(n)));
                worst = worst.max(phi_plus(n, f64::INFINITY)?.entries.max_abs());
            }
            Ok(worst)
        }),
        check("phi+ spectrum within [0, 1] (n<=8)", 1e-10, || {
            let mut worst: f64 = 0.0;
            for n in 1..=8 {
                for t in linspace(-4.0, 4.0, 41) {
                    let (l, _) = eigendecompose_spd(&phi_plus(n, t)?.entries)?;
                    worst = worst.max(-l[0]).max(l[n - 1] - 1.0);
                }
            }
            Ok(worst)
        }),
        check("phi+ loewner monotone (n<=8)", 1e-10, || {
            let mut worst: f64 = 0.0;
            for n in 1..=8 {
                let ts = linspace(-4.0, 4.0, 41);
                for w in ts.windows(2) {
                    let d = &phi_plus(n, w[0])?.entries - &phi_plus(n, w[1])?.entries;
                    worst = worst.max(-eigendecompose_spd(&d)?.0[0]);
                }
            }
            Ok(worst)
        }),
        check("phi^a boundary approach (catalog, n=3)", 1e-2, || {
            let syms = line_catalog();
            let errs = try_map(opts.exec, &syms, |a| {
                let mut worst: f64 = 0.0;
                for p in boundary_probe_points() {
                    let e = approach_errors(a, 3, p, quad)?;
                    if !approach_ok(&e) {
                        return Err(Error::NoConvergence {
                            message: format!("{} at {p}: errors {e:?} do not decrease", a.name()),
                            estimate: e[2],
                        });
                    }
                    worst = worst.max(e[2]);
                }
                Ok(worst)
            })?;
            Ok(max_of(errs))
        }),
        check("phi^chi+ independent of t2 and equal to phi+", 1e-9, || {
            let chi = Symbol1D::chi_plus();
            let mut worst: f64 = 0.0;
            for t1 in linspace(-4.0, 4.0, 17) {
                let want = phi_plus(4, t1)?.entries;
                for t2 in [1e-3, 0.1, 1.0, 10.0, 1e3] {
                    let p = CompactPoint::interior(t1, t2)?;
                    worst = worst.max(phi_a_with(&chi, 4, p, quad)?.entries.max_abs_diff(&want));
                }
            }
            Ok(worst)
        }),
        check("corner coherence (catalog)", 1e-10, || {
            let inf = f64::INFINITY;
            let pairs = [
                (CompactPoint::Bottom { t1: -inf }, CompactPoint::Left { t2: 0.0 }),
                (CompactPoint::Bottom { t1: inf }, CompactPoint::Right { t2: 0.0 }),
                (CompactPoint::Top { t1: -inf }, CompactPoint::Left { t2: inf }),
                (CompactPoint::Top { t1: inf }, CompactPoint::Right { t2: inf }),
            ];
            let mut worst: f64 = 0.0;
            for a in line_catalog() {
                for (p, q) in pairs {
                    let x = phi_a_stratum(&a, 3, p, quad)?.entries;
                    worst = worst.max(x.max_abs_diff(&phi_a_stratum(&a, 3, q, quad)?.entries));
                }
            }
            Ok(worst)
        }),
        check("gamma^a operator norm <= sup|a|", 1e-8, || {
            let mut worst: f64 = 0.0;
            for a in line_catalog() {
                for x1 in [-3.0, 0.0, 1.5] {
                    for x2 in [1e-2, 1.0, 1e2] {
                        let g = gamma_a_matrix_with(&a, 4, x1, x2, quad)?.entries;
                        worst = worst.max(g.sym_norm() - a.sup_norm);
                    }
                }
            }
            Ok(worst)
        }),
    ]
}

pub fn algebra_checks(opts: VerifyOptions) -> Vec<CheckOutcome> {
    let quad = opts.quad;
    vec![
        check("eigencurve diagonalization residual (n<=6)", 1e-9, || {
            let mut worst: f64 = 0.0;
            for n in 1..=6 {
                let table = eigencurves_with(n, &linspace(-4.0, 4.0, 41), opts.exec)?;
                for (k, &t) in table.grid.iter().enumerate() {
                    let b = &table.diagonalizers[k];
                    let d = &(&b.transpose() * &phi_plus(n, t)?.entries) * b;
                    worst = worst.max(d.max_abs_diff(&Matrix::diag(&table.lambdas[k])));
                    worst = worst.max((&b.transpose() * b).max_abs_diff(&Matrix::identity(n)));
                }
            }
            Ok(worst)
        }),
        check("eigencurves in [0, 1] and nonincreasing (n<=6)", 1e-9, || {
            let mut worst: f64 = 0.0;
            for n in 1..=6 {
                let table = eigencurves_with(n, &linspace(-4.0, 4.0, 41), opts.exec)?;
                for j in 1..=n {
                    let c = table.curve(j);
                    worst = worst.max(max_of(c.iter().map(|&l| (-l).max(l - 1.0))));
                    worst = worst.max(max_of(c.windows(2).map(|w| w[1] - w[0])));
                }
            }
            Ok(worst)
        }),
        check("pencil spectrum equals phi+ spectrum (n<=4)", 1e-9, || {
            let mut worst: f64 = 0.0;
            for n in 1..=4 {
                for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                    let (l, _) = eigendecompose_spd(&phi_plus(n, t)?.entries)?;
                    let c = generalized_eigen_check(n, t, &l)?;
                    worst = worst.max(c.max_residual).max(c.spectrum_mismatch);
                }
            }
            Ok(worst)
        }),
        check("approximate identity order >= 1.8 (n<=3)", 1e-3, || {
            let (x1, x2) = (0.0, 0.25);
            let mut worst: f64 = 0.0;
            for n in 1..=3 {
                for r in [0.0, 1.0] {
                    let e = approx_identity_errors(n, x1, x2, r, quad)?;
                    let order = (e[1] / e[2]).log2().min((e[0] / e[1]).log2());
                    if !(order >= 1.8) {
                        return Err(Error::NoConvergence {
                            message: format!("order {order:.3} below 1.8 at n={n}, r={r}"),
                            estimate: e[2],
                        });
                    }
                    worst = worst.max(e[2]);
                }
            }
            Ok(worst)
        }),
        check("bottom fibers follow a- + (a+ - a-) lambda", 1e-8, || {
            let mut worst: f64 = 0.0;
            let table = eigencurves_with(4, &linspace(-4.0, 4.0, 41), opts.exec)?;
            for a in line_catalog() {
                for (k, &t1) in table.grid.iter().enumerate() {
                    let m = phi_a_with(&a, 4, CompactPoint::Bottom { t1 }, quad)?.entries;
                    for j in 0..4 {
                        let v = table.diagonalizers[k].column(j);
                        let want = a.limit_neg_inf + (a.limit_pos_inf - a.limit_neg_inf) * table.lambdas[k][j];
                        worst = worst.max((m.quadratic_form(&v, &v) - want).abs());
                    }
                }
            }
            Ok(worst)
        }),
        check("separation exponent soundness (2000 pairs)", 0.0, || {
            let mut rng = StdRng::seed_from_u64(7);
            let mut wrong = 0usize;
            for _ in 0..1000 {
                let p = (rng.random_range(-5.0..5.0), rng.random_range(1e-3..10.0));
                let mut q = (rng.random_range(-5.0..5.0), rng.random_range(1e-3..10.0));
                if q == p {
                    q.0 += 1.0;
                }
                wrong += usize::from(separation_exponent(p, p)?.separable);
                wrong += usize::from(!separation_exponent(p, q)?.separable);
            }
            Ok(wrong as f64)
        }),
        check("membership battery", 0.0, || {
            Ok(membership_battery(opts)?.iter().filter(|(_, ok)| !ok).count() as f64)
        }),
    ]
}

/// `||gamma^a - limit||` for the tent family `a = triangle(alpha / (2 sqrt(x2)), r)`
/// at `alpha = 0.04, 0.02, 0.01`.
pub fn approx_identity_errors(n: usize, x1: f64, x2: f64, r: f64, quad: AdaptiveOptions) -> Result<[f64; 3]> {
    let limit = approx_identity_limit(n, x1, x2, r)?.entries;
    let mut out = [0.0; 3];
    for (o, alpha) in out.iter_mut().zip([0.04, 0.02, 0.01]) {
        let a = Symbol1D::triangle(alpha / (2.0 * x2.sqrt()), r)?;
        *o = gamma_a_matrix_with(&a, n, x1, x2, quad)?.entries.max_abs_diff(&limit);
    }
    Ok(out)
}

/// `(x2, gamma^b(x2))` on `{0} u [1e-4, 1e4] (10 per decade) u {+inf}`.
pub fn gamma_b_samples(b: &crate::symbols::SymbolHalfLine, n: usize, quad: AdaptiveOptions) -> Result<Vec<(f64, Matrix)>> {
    let mut s = vec![(0.0, gamma_b_boundary(b, n, HalfLineEnd::Zero)?.entries)];
    for k in 0..=80 {
        let x2 = 10f64.powf(-4.0 + 0.1 * k as f64);
        s.push((x2, gamma_b_with(b, n, x2, quad)?.entries));
    }
    s.push((f64::INFINITY, gamma_b_boundary(b, n, HalfLineEnd::Infinity)?.entries));
    Ok(s)
}

/// Samples of a field on a strip grid covering all four boundary strata.
pub fn strip_samples(field: &dyn MatrixField, exec: Execution) -> Result<Vec<(CompactPoint, Matrix)>> {
    let mut pts = Vec::new();
    for t1 in linspace(-4.0, 4.0, 17) {
        pts.push(CompactPoint::Bottom { t1 });
        pts.push(CompactPoint::Top { t1 });
        for t2 in [0.1, 1.0, 10.0] {
            pts.push(CompactPoint::Interior { t1, t2 });
        }
    }
    for t2 in [0.0, 0.1, 1.0, 10.0, f64::INFINITY] {
        pts.push(CompactPoint::Left { t2 });
        pts.push(CompactPoint::Right { t2 });
    }
    let mats = try_map(exec, &pts, |&p| field.eval(p))?;
    Ok(pts.into_iter().zip(mats).collect())
}

/// Expected membership outcomes: every catalog `gamma^b` in the endpoint
/// algebra, every catalog `phi^a` in the strip algebra, and the constant
/// `diag(1, 0)` in neither. Returns `(label, outcome matched)`.
pub fn membership_battery(opts: VerifyOptions) -> Result<Vec<(String, bool)>> {
    const N: usize = 3;
    let mut out = Vec::new();
    for b in half_line_catalog() {
        let r = membership_frak_c(&gamma_b_samples(&b, N, opts.quad)?, 1e-8, 0.25)?;
        out.push((format!("gamma^b {} in C", b.name()), r.verdict));
    }
    let table = eigencurves_with(N, &linspace(-4.0, 4.0, 17), opts.exec)?;
    for a in line_catalog() {
        let field = PhiField { symbol: a.clone(), n: N, opts: opts.quad };
        let r = membership_t(&strip_samples(&field, opts.exec)?, &table, FiberTolerances::default())?;
        out.push((format!("phi^{} in T", a.name()), r.verdict));
    }
    let d = Matrix::diag(&[1.0, 0.0, 0.0]);
    let samples = vec![(0.0, d.clone()), (1.0, d.clone()), (f64::INFINITY, d.clone())];
    out.push(("diag(1,0,0) not in C".into(), !membership_frak_c(&samples, 1e-8, 0.25)?.verdict));
    let field = ConstantField(d);
    let r = membership_t(&strip_samples(&field, opts.exec)?, &table, FiberTolerances::default())?;
    out.push(("diag(1,0,0) not in T".into(), !r.verdict));
    Ok(out)
}
