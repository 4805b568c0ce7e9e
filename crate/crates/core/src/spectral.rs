//! Spectral matrix functions on the open strip and on the boundary strata of
//! the compactified strip `[-inf, +inf] x [0, +inf]`.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::linalg::Matrix;
use crate::specfun::{
    check_n, gaussian_tail_moment_matrix, hermite_coeff_matrix, hermite_into, hermite_truncation, integrate_adaptive,
    laguerre_into, laguerre_truncation, AdaptiveOptions, MAX_N,
};
use crate::symbols::{pc_decompose, Symbol1D, Symbol2D, SymbolHalfLine};

/// A point of the compactified strip.
///
/// Corners have two spellings; [`CompactPoint::canonical`] maps them onto the
/// left/right edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompactPoint {
    Interior { t1: f64, t2: f64 },
    Left { t2: f64 },
    Right { t2: f64 },
    Bottom { t1: f64 },
    Top { t1: f64 },
}

impl CompactPoint {
    pub fn interior(t1: f64, t2: f64) -> Result<Self> {
        if !t1.is_finite() || !(t2 > 0.0) || !t2.is_finite() {
            return domain(format!("interior point needs finite t1 and 0 < t2 < inf, got ({t1}, {t2})"));
        }
        Ok(CompactPoint::Interior { t1, t2 })
    }

    /// Classifies extended coordinates; corners come out canonical.
    pub fn from_coords(t1: f64, t2: f64) -> Result<Self> {
        if t1.is_nan() || t2.is_nan() || t2 < 0.0 {
            return domain(format!("({t1}, {t2}) is outside the compactified strip"));
        }
        Ok(if t1 == f64::NEG_INFINITY {
            CompactPoint::Left { t2 }
        } else if t1 == f64::INFINITY {
            CompactPoint::Right { t2 }
        } else if t2 == 0.0 {
            CompactPoint::Bottom { t1 }
        } else if t2 == f64::INFINITY {
            CompactPoint::Top { t1 }
        } else {
            CompactPoint::Interior { t1, t2 }
        })
    }

    /// Extended coordinates `(t1, t2)`.
    pub fn coords(&self) -> (f64, f64) {
        match *self {
            CompactPoint::Interior { t1, t2 } => (t1, t2),
            CompactPoint::Left { t2 } => (f64::NEG_INFINITY, t2),
            CompactPoint::Right { t2 } => (f64::INFINITY, t2),
            CompactPoint::Bottom { t1 } => (t1, 0.0),
            CompactPoint::Top { t1 } => (t1, f64::INFINITY),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CompactPoint::Interior { .. } => "interior",
            CompactPoint::Left { .. } => "left",
            CompactPoint::Right { .. } => "right",
            CompactPoint::Bottom { .. } => "bottom",
            CompactPoint::Top { .. } => "top",
        }
    }

    pub fn is_boundary(&self) -> bool {
        !matches!(self, CompactPoint::Interior { .. })
    }

    pub fn canonical(self) -> Self {
        let (t1, t2) = self.coords();
        CompactPoint::from_coords(t1, t2).unwrap_or(self)
    }
}

impl fmt::Display for CompactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (t1, t2) = self.coords();
        write!(f, "{}({t1}, {t2})", self.kind())
    }
}

/// How a [`SpectralMatrix`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Quadrature,
    ClosedForm,
    BoundaryFormula,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Quadrature => "quadrature",
            Provenance::ClosedForm => "closed-form",
            Provenance::BoundaryFormula => "boundary-formula",
        }
    }
}

/// An `n x n` spectral matrix value at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMatrix {
    pub n: usize,
    pub point: CompactPoint,
    pub entries: Matrix,
    pub provenance: Provenance,
}

impl SpectralMatrix {
    fn new(point: CompactPoint, entries: Matrix, provenance: Provenance) -> Self {
        SpectralMatrix { n: entries.n(), point, entries, provenance }
    }
}

/// Which poly-Bergman-type space the symbol acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// `A^2_(1,n)`: the Laguerre side carries the matrix structure.
    OneN,
    /// `A^2_(n,1)`: the Hermite side carries the matrix structure.
    NOne,
}

/// End of the half line for [`gamma_b_boundary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfLineEnd {
    Zero,
    Infinity,
}

fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Writes `w * u u^T` (upper triangle, row-major) into `out`.
fn pack_outer(u: &[f64], w: f64, out: &mut [f64]) {
    let mut idx = 0;
    for j in 0..u.len() {
        let wj = w * u[j];
        for k in j..u.len() {
            out[idx] = wj * u[k];
            idx += 1;
        }
    }
}

fn unpack(n: usize, packed: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(n);
    let mut idx = 0;
    for j in 0..n {
        for k in j..n {
            m[(j, k)] = packed[idx];
            m[(k, j)] = packed[idx];
            idx += 1;
        }
    }
    m
}

fn check_x2(x2: f64) -> Result<()> {
    if x2 > 0.0 && x2.is_finite() {
        Ok(())
    } else {
        domain(format!("x2 must be positive and finite, got {x2}"))
    }
}

fn check_x1(x1: f64) -> Result<()> {
    if x1.is_finite() {
        Ok(())
    } else {
        domain(format!("x1 must be finite, got {x1}"))
    }
}

/// Splits in the symbol variable `y` for a Hermite integrand centred at
/// `-x1 / scale` with width `~1 / scale`, plus the symbol's own features.
fn hermite_splits(symbol_splits: &[f64], x1: f64, scale: f64) -> Vec<f64> {
    let c = -x1 / scale;
    let mut s: Vec<f64> = symbol_splits.to_vec();
    s.extend([-1.0, 0.0, 1.0]);
    s.extend((-4..=4).map(|j| c + 2.0 * j as f64 / scale));
    s
}

/// Splits in `y` for a Laguerre integrand decaying on the scale `1 / scale`.
fn laguerre_splits(symbol_splits: &[f64], scale: f64) -> Vec<f64> {
    let mut s: Vec<f64> = symbol_splits.to_vec();
    s.push(1.0);
    s.extend([1.0, 4.0, 16.0, 64.0].iter().map(|k| k / scale));
    s
}

fn hermite_range(n: usize, x1: f64, scale: f64) -> (f64, f64) {
    let s = hermite_truncation(n);
    ((-s - x1) / scale, (s - x1) / scale)
}

/// `2 x2 int_0^inf b(y) N(2 x2 y) N(2 x2 y)^T dy` with `N = (l_0, ..., l_{n-1})`.
pub fn gamma_b(b: &SymbolHalfLine, n: usize, x2: f64) -> Result<SpectralMatrix> {
    gamma_b_with(b, n, x2, AdaptiveOptions::default())
}

pub fn gamma_b_with(b: &SymbolHalfLine, n: usize, x2: f64, opts: AdaptiveOptions) -> Result<SpectralMatrix> {
    check_n(n)?;
    check_x2(x2)?;
    let entries = laguerre_gram(n, x2, &|y| b.eval(y), &b.breakpoints, opts)?;
    Ok(SpectralMatrix::new(CompactPoint::Interior { t1: 0.0, t2: x2 }, entries, Provenance::Quadrature))
}

fn laguerre_gram(n: usize, x2: f64, b: &dyn Fn(f64) -> f64, splits: &[f64], opts: AdaptiveOptions) -> Result<Matrix> {
    let scale = 2.0 * x2;
    let hi = laguerre_truncation(n) / scale;
    let f = |y: f64, out: &mut [f64]| {
        let w = b(y);
        if w == 0.0 {
            out.fill(0.0);
            return;
        }
        let mut l = [0.0; MAX_N];
        laguerre_into(scale * y, &mut l[..n]);
        pack_outer(&l[..n], scale * w, out);
    };
    let packed = integrate_adaptive(f, packed_len(n), 0.0, hi, &laguerre_splits(splits, scale), opts)?;
    Ok(unpack(n, &packed))
}

/// Limits of `gamma_b` at the ends of the half line: `b(+inf) I` at `0` and
/// `b(0+) I` at `+inf`.
pub fn gamma_b_boundary(b: &SymbolHalfLine, n: usize, end: HalfLineEnd) -> Result<SpectralMatrix> {
    check_n(n)?;
    let (point, c) = match end {
        HalfLineEnd::Zero => (CompactPoint::Bottom { t1: 0.0 }, b.limit_inf),
        HalfLineEnd::Infinity => (CompactPoint::Top { t1: 0.0 }, b.limit_zero),
    };
    Ok(SpectralMatrix::new(point, Matrix::scalar(n, c), Provenance::BoundaryFormula))
}

/// The scalar `2 sqrt(x2) int a(y) h_0(2 sqrt(x2) y + x1)^2 dy`.
pub fn gamma_a_scalar(a: &Symbol1D, x1: f64, x2: f64) -> Result<f64> {
    gamma_a_scalar_with(a, x1, x2, AdaptiveOptions::default())
}

pub fn gamma_a_scalar_with(a: &Symbol1D, x1: f64, x2: f64, opts: AdaptiveOptions) -> Result<f64> {
    check_x1(x1)?;
    check_x2(x2)?;
    Ok(hermite_gram(1, x1, x2, &|y| a.eval(y), &a.split_points(), opts)?[(0, 0)])
}

/// `2 sqrt(x2) int a(y) H H^T(2 sqrt(x2) y + x1) dy` with `H = (h_0, ..., h_{n-1})`.
pub fn gamma_a_matrix(a: &Symbol1D, n: usize, x1: f64, x2: f64) -> Result<SpectralMatrix> {
    gamma_a_matrix_with(a, n, x1, x2, AdaptiveOptions::default())
}

pub fn gamma_a_matrix_with(a: &Symbol1D, n: usize, x1: f64, x2: f64, opts: AdaptiveOptions) -> Result<SpectralMatrix> {
    check_n(n)?;
    check_x1(x1)?;
    check_x2(x2)?;
    let entries = hermite_gram(n, x1, x2, &|y| a.eval(y), &a.split_points(), opts)?;
    Ok(SpectralMatrix::new(CompactPoint::Interior { t1: x1, t2: x2 }, entries, Provenance::Quadrature))
}

fn hermite_gram(
    n: usize,
    x1: f64,
    x2: f64,
    a: &dyn Fn(f64) -> f64,
    splits: &[f64],
    opts: AdaptiveOptions,
) -> Result<Matrix> {
    let scale = 2.0 * x2.sqrt();
    let (lo, hi) = hermite_range(n, x1, scale);
    let f = |y: f64, out: &mut [f64]| {
        let w = a(y);
        if w == 0.0 {
            out.fill(0.0);
            return;
        }
        let mut h = [0.0; MAX_N];
        hermite_into(scale * y + x1, &mut h[..n]);
        pack_outer(&h[..n], scale * w, out);
    };
    let packed = integrate_adaptive(f, packed_len(n), lo, hi, &hermite_splits(splits, x1, scale), opts)?;
    Ok(unpack(n, &packed))
}

/// Spectral matrix of a nilpotent symbol `c(u, v)` on either space.
///
/// Factored symbols `a(u) b(v)` go through the one-dimensional evaluators;
/// anything else is integrated over the full tensor product.
pub fn gamma_c(c: &Symbol2D, n: usize, x1: f64, x2: f64, space: Space) -> Result<SpectralMatrix> {
    gamma_c_with(c, n, x1, x2, space, AdaptiveOptions::default())
}

pub fn gamma_c_with(c: &Symbol2D, n: usize, x1: f64, x2: f64, space: Space, opts: AdaptiveOptions) -> Result<SpectralMatrix> {
    check_n(n)?;
    check_x1(x1)?;
    check_x2(x2)?;
    let point = CompactPoint::Interior { t1: x1, t2: x2 };
    if let Some((a, b)) = c.factors() {
        let entries = match space {
            Space::OneN => gamma_b_with(b, n, x2, opts)?.entries.scale(gamma_a_scalar_with(a, x1, x2, opts)?),
            Space::NOne => gamma_a_matrix_with(a, n, x1, x2, opts)?.entries.scale(gamma_b_with(b, 1, x2, opts)?.entries[(0, 0)]),
        };
        return Ok(SpectralMatrix::new(point, entries, Provenance::Quadrature));
    }
    Ok(SpectralMatrix::new(point, gamma_c_tensor(c, n, x1, x2, space, opts)?, Provenance::Quadrature))
}

/// Nested adaptive quadrature: outer over `u`, inner over `v`.
fn gamma_c_tensor(c: &Symbol2D, n: usize, x1: f64, x2: f64, space: Space, opts: AdaptiveOptions) -> Result<Matrix> {
    let (hn, ln) = match space {
        Space::OneN => (1, n),
        Space::NOne => (n, 1),
    };
    let hs = 2.0 * x2.sqrt();
    let ls = 2.0 * x2;
    let (ulo, uhi) = hermite_range(hn, x1, hs);
    let vhi = laguerre_truncation(ln) / ls;
    let usplits = hermite_splits(&c.u_splits, x1, hs);
    let vsplits = laguerre_splits(&c.v_splits, ls);
    let dim = packed_len(n);
    let failure = std::cell::RefCell::new(None::<Error>);

    let outer = |u: f64, out: &mut [f64]| {
        let mut h = [0.0; MAX_N];
        hermite_into(hs * u + x1, &mut h[..hn]);
        let inner = |v: f64, acc: &mut [f64]| {
            let w = c.eval(u, v);
            if w == 0.0 {
                acc.fill(0.0);
                return;
            }
            let mut l = [0.0; MAX_N];
            laguerre_into(ls * v, &mut l[..ln]);
            pack_outer(&l[..ln], ls * w, acc);
        };
        match integrate_adaptive(inner, packed_len(ln), 0.0, vhi, &vsplits, opts) {
            Ok(lv) => match space {
                Space::OneN => {
                    let w = hs * h[0] * h[0];
                    for (o, x) in out.iter_mut().zip(&lv) {
                        *o = w * x;
                    }
                }
                Space::NOne => pack_outer(&h[..hn], hs * lv[0], out),
            },
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                out.fill(0.0);
            }
        }
    };
    let outer_opts = AdaptiveOptions { tol: opts.tol * 10.0, ..opts };
    let packed = integrate_adaptive(outer, dim, ulo, uhi, &usplits, outer_opts)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(unpack(n, &packed))
}

/// `(x1, x2) -> (x1, x2 / (x1^2 + 1))`.
pub fn phi_map(x1: f64, x2: f64) -> (f64, f64) {
    (x1, x2 / (x1 * x1 + 1.0))
}

/// `(t1, t2) -> (t1, (t1^2 + 1) t2)`.
pub fn phi_inverse(t1: f64, t2: f64) -> (f64, f64) {
    (t1, (t1 * t1 + 1.0) * t2)
}

/// `phi_+(t) = int_t^inf H H^T = C M_t C^T`; exact `I` and `0` at `-inf`, `+inf`.
pub fn phi_plus(n: usize, t: f64) -> Result<SpectralMatrix> {
    check_n(n)?;
    if t.is_nan() {
        return domain("phi_plus at NaN");
    }
    let point = CompactPoint::Bottom { t1: t }.canonical();
    let entries = if t == f64::NEG_INFINITY {
        Matrix::identity(n)
    } else if t == f64::INFINITY {
        Matrix::zeros(n)
    } else {
        let c = hermite_coeff_matrix(n)?;
        let m = gaussian_tail_moment_matrix(n, t)?;
        let mut p = &(&c * &m.entries) * &c.transpose();
        // exact symmetry; the two triangles differ only by rounding
        for j in 0..n {
            for k in j + 1..n {
                let v = 0.5 * (p[(j, k)] + p[(k, j)]);
                p[(j, k)] = v;
                p[(k, j)] = v;
            }
        }
        p
    };
    Ok(SpectralMatrix::new(point, entries, Provenance::ClosedForm))
}

/// `phi^a = gamma^a o Phi^{-1}` on the compactified strip, for `a` continuous
/// or piecewise continuous with a single jump at `0`.
pub fn phi_a(a: &Symbol1D, n: usize, p: CompactPoint) -> Result<SpectralMatrix> {
    phi_a_with(a, n, p, AdaptiveOptions::default())
}

pub fn phi_a_with(a: &Symbol1D, n: usize, p: CompactPoint, opts: AdaptiveOptions) -> Result<SpectralMatrix> {
    phi_a_stratum(a, n, p.canonical(), opts)
}

/// Evaluates the formula of the stratum `p` is tagged with, without moving
/// corners onto the left/right edges first. Corner values computed through
/// the bottom/top formulas must match the edge formulas.
pub fn phi_a_stratum(a: &Symbol1D, n: usize, p: CompactPoint, opts: AdaptiveOptions) -> Result<SpectralMatrix> {
    check_n(n)?;
    a.require_pc_at_zero()?;
    let edge = |c: f64| Ok(SpectralMatrix::new(p, Matrix::scalar(n, c), Provenance::BoundaryFormula));
    match p {
        CompactPoint::Interior { t1, t2 } => {
            let (x1, x2) = phi_inverse(t1, t2);
            let mut m = gamma_a_matrix_with(a, n, x1, x2, opts)?;
            m.point = p;
            Ok(m)
        }
        CompactPoint::Bottom { t1 } => {
            let phi = phi_plus(n, t1)?.entries;
            let lo = a.limit_neg_inf;
            let entries = &Matrix::scalar(n, lo) + &phi.scale(a.limit_pos_inf - lo);
            Ok(SpectralMatrix::new(p, entries, Provenance::BoundaryFormula))
        }
        CompactPoint::Right { t2 } => {
            if t2 == 0.0 {
                edge(a.limit_neg_inf)
            } else if t2 == f64::INFINITY {
                edge(a.left_limit_at_zero())
            } else {
                edge(a.eval(-0.5 / t2.sqrt()))
            }
        }
        CompactPoint::Left { t2 } => {
            if t2 == 0.0 {
                edge(a.limit_pos_inf)
            } else if t2 == f64::INFINITY {
                edge(a.right_limit_at_zero())
            } else {
                edge(a.eval(0.5 / t2.sqrt()))
            }
        }
        CompactPoint::Top { t1 } => {
            let (cont, jump) = pc_decompose(a)?;
            let base = Matrix::scalar(n, cont.eval(0.0));
            let entries = if jump == 0.0 { base } else { &base + &phi_plus(n, t1)?.entries.scale(jump) };
            Ok(SpectralMatrix::new(p, entries, Provenance::BoundaryFormula))
        }
    }
}

/// Interior point at distance parameter `eps` on the approach path to the
/// boundary point `p`:
///
/// * bottom `(t1, eps^2)`, top `(t1, 1/eps^2)`;
/// * right `(1/eps, t2)` for finite `t2 > 0`, `(1/eps, eps^2)` at `t2 = 0`,
///   `(1/eps, 1/eps^2)` at `t2 = +inf`; left mirrors with `-1/eps`.
pub fn approach_point(p: CompactPoint, eps: f64) -> Result<CompactPoint> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("approach distance must lie in (0, 1), got {eps}"));
    }
    let lateral = |t1: f64, t2: f64| {
        let t2 = if t2 == 0.0 {
            eps * eps
        } else if t2 == f64::INFINITY {
            1.0 / (eps * eps)
        } else {
            t2
        };
        CompactPoint::interior(t1, t2)
    };
    match p.canonical() {
        CompactPoint::Interior { .. } => domain(format!("{p} is not a boundary point")),
        CompactPoint::Bottom { t1 } => CompactPoint::interior(t1, eps * eps),
        CompactPoint::Top { t1 } => CompactPoint::interior(t1, 1.0 / (eps * eps)),
        CompactPoint::Right { t2 } => lateral(1.0 / eps, t2),
        CompactPoint::Left { t2 } => lateral(-1.0 / eps, t2),
    }
}
