use num_complex::Complex64;

use super::curves::EigencurveTable;
use super::eigen::eigendecompose_spd;
use crate::error::{domain, Error, Result};
use crate::linalg::Matrix;
use crate::spectral::{phi_a_with, phi_plus, CompactPoint};
use crate::specfun::AdaptiveOptions;
use crate::symbols::Symbol1D;

/// A real symmetric matrix function on the compactified strip.
pub trait MatrixField: Sync {
    fn n(&self) -> usize;
    fn eval(&self, p: CompactPoint) -> Result<Matrix>;
}

/// `phi^a` as a [`MatrixField`].
#[derive(Debug, Clone)]
pub struct PhiField {
    pub symbol: Symbol1D,
    pub n: usize,
    pub opts: AdaptiveOptions,
}

impl PhiField {
    pub fn new(symbol: Symbol1D, n: usize) -> Self {
        PhiField { symbol, n, opts: AdaptiveOptions::default() }
    }
}

impl MatrixField for PhiField {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, p: CompactPoint) -> Result<Matrix> {
        Ok(phi_a_with(&self.symbol, self.n, p, self.opts)?.entries)
    }
}

/// The same matrix at every point.
#[derive(Debug, Clone)]
pub struct ConstantField(pub Matrix);

impl MatrixField for ConstantField {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn eval(&self, _p: CompactPoint) -> Result<Matrix> {
        Ok(self.0.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    Bottom,
    Top,
}

/// Point-evaluation functionals on the strip.
#[derive(Debug, Clone, PartialEq)]
pub enum PureState {
    /// `M -> <M(p) v, v>` at an interior point.
    Interior { point: CompactPoint, v: Vec<Complex64> },
    /// `M -> lambda` where `M(+-inf, t2) = lambda I`.
    Edge { side: Side, t2: f64 },
    /// `M -> <M(t1, 0 or +inf) v_j(t1), v_j(t1)>` with `v_j` the `j`-th
    /// (1-based) eigenvector of `phi_+(t1)`.
    Fiber { t1: f64, j: usize, stratum: Stratum },
}

impl PureState {
    pub fn interior(point: CompactPoint, v: Vec<Complex64>) -> Result<Self> {
        if point.is_boundary() {
            return domain(format!("{point} is not interior"));
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return domain(format!("state vector has norm {norm}, expected 1"));
        }
        Ok(PureState::Interior { point, v })
    }
}

/// Evaluates a pure state on a matrix field.
///
/// Fiber states take `v_j` from `table` when `t1` is on its grid and from a
/// direct decomposition of `phi_+(t1)` otherwise.
pub fn pure_state_eval(field: &dyn MatrixField, state: &PureState, table: Option<&EigencurveTable>) -> Result<f64> {
    let n = field.n();
    match state {
        PureState::Interior { point, v } => {
            if v.len() != n {
                return domain(format!("state vector has length {}, expected {n}", v.len()));
            }
            let m = field.eval(*point)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                for k in 0..n {
                    acc += v[j].conj() * m[(j, k)] * v[k];
                }
            }
            Ok(acc.re)
        }
        PureState::Edge { side, t2 } => {
            let p = match side {
                Side::Left => CompactPoint::Left { t2: *t2 },
                Side::Right => CompactPoint::Right { t2: *t2 },
            };
            let m = field.eval(p)?;
            let defect = m.scalar_defect();
            if defect > 1e-8 {
                return Err(Error::NonMember(format!("value at {p} is not scalar (defect {defect:e})")));
            }
            Ok(m.trace() / n as f64)
        }
        PureState::Fiber { t1, j, stratum } => {
            if *j == 0 || *j > n {
                return domain(format!("fiber index {j} outside 1..={n}"));
            }
            let p = match stratum {
                Stratum::Bottom => CompactPoint::Bottom { t1: *t1 },
                Stratum::Top => CompactPoint::Top { t1: *t1 },
            };
            let b = fiber_basis(n, *t1, table)?;
            let vj = b.column(j - 1);
            Ok(field.eval(p)?.quadratic_form(&vj, &vj))
        }
    }
}

pub(crate) fn fiber_basis(n: usize, t1: f64, table: Option<&EigencurveTable>) -> Result<Matrix> {
    if let Some(table) = table.filter(|tb| tb.n == n) {
        return Ok(table.at(t1)?.1);
    }
    if t1.is_infinite() {
        return Ok(Matrix::identity(n));
    }
    Ok(eigendecompose_spd(&phi_plus(n, t1)?.entries)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::parse_symbol;

    fn phi(spec: &str, n: usize) -> PhiField {
        PhiField::new(parse_symbol(spec).unwrap().into_line().unwrap(), n)
    }

    #[test]
    fn edge_state_of_sigmoid() {
        let v = pure_state_eval(&phi("sigmoid", 2), &PureState::Edge { side: Side::Right, t2: 2.0 }, None).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-15);
        let v = pure_state_eval(&phi("sigmoid", 2), &PureState::Edge { side: Side::Left, t2: 2.0 }, None).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_symbol_gives_constant() {
        let f = phi("const:2.5", 3);
        let s = 3f64.sqrt().recip();
        let v = vec![Complex64::new(s, 0.0), Complex64::new(0.0, s), Complex64::new(-s, 0.0)];
        let states = [
            PureState::interior(CompactPoint::Interior { t1: 0.3, t2: 1.0 }, v).unwrap(),
            PureState::Edge { side: Side::Left, t2: 0.0 },
            PureState::Edge { side: Side::Right, t2: f64::INFINITY },
            PureState::Fiber { t1: -1.0, j: 2, stratum: Stratum::Bottom },
            PureState::Fiber { t1: 1.0, j: 3, stratum: Stratum::Top },
        ];
        for st in &states {
            assert!((pure_state_eval(&f, st, None).unwrap() - 2.5).abs() < 1e-9, "{st:?}");
        }
    }

    #[test]
    fn chi_plus_fibers_are_eigenvalues() {
        let f = phi("chi+", 2);
        let got: Vec<f64> = (1..=2)
            .map(|j| pure_state_eval(&f, &PureState::Fiber { t1: 0.0, j, stratum: Stratum::Bottom }, None).unwrap())
            .collect();
        let r = (2.0 * std::f64::consts::PI).sqrt().recip();
        assert!((got[0] - (0.5 - r)).abs() < 1e-12 && (got[1] - (0.5 + r)).abs() < 1e-12);
    }

    #[test]
    fn non_scalar_edge_is_rejected() {
        let f = ConstantField(Matrix::diag(&[1.0, 0.0]));
        let r = pure_state_eval(&f, &PureState::Edge { side: Side::Left, t2: 1.0 }, None);
        assert!(matches!(r, Err(Error::NonMember(_))));
        assert!(PureState::interior(CompactPoint::Interior { t1: 0.0, t2: 1.0 }, vec![Complex64::new(2.0, 0.0)]).is_err());
    }
}
