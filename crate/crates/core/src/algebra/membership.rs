use serde::Serialize;

use super::curves::EigencurveTable;
use crate::error::{domain, Result};
use crate::linalg::Matrix;
use crate::spectral::CompactPoint;

/// One checked condition of a membership test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRecord {
    pub condition: String,
    pub max_violation: f64,
    pub tolerance: f64,
    /// Where the largest violation occurred.
    pub witness: String,
}

impl ConditionRecord {
    pub fn passed(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub verdict: bool,
    pub conditions: Vec<ConditionRecord>,
    pub notes: Vec<String>,
}

impl MembershipReport {
    fn new(conditions: Vec<ConditionRecord>, notes: Vec<String>) -> Self {
        MembershipReport { verdict: conditions.iter().all(ConditionRecord::passed), conditions, notes }
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|c| c.condition == name)
    }
}

fn worst<I>(condition: &str, tolerance: f64, items: I) -> ConditionRecord
where
    I: IntoIterator<Item = (f64, String)>,
{
    let (max_violation, witness) =
        items.into_iter().fold((0.0, String::from("-")), |acc, (v, w)| if v > acc.0 { (v, w) } else { acc });
    ConditionRecord { condition: condition.into(), max_violation, tolerance, witness }
}

/// Membership in `{M in C([0, +inf], M_n) : M(0), M(+inf) scalar}` from samples
/// `(x2, M(x2))` sorted by `x2`, including both endpoints.
///
/// Continuity is judged by the largest entrywise jump between neighbouring
/// samples against `jump_tol`.
pub fn membership_frak_c(samples: &[(f64, Matrix)], tol: f64, jump_tol: f64) -> Result<MembershipReport> {
    if samples.len() < 2 || samples[0].0 != 0.0 || samples[samples.len() - 1].0 != f64::INFINITY {
        return domain("samples must start at 0 and end at +inf");
    }
    if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return domain("sample abscissae must be strictly increasing");
    }
    let (first, last) = (&samples[0], &samples[samples.len() - 1]);
    let conditions = vec![
        worst("scalar at 0", tol, [(first.1.scalar_defect(), "x2=0".to_string())]),
        worst("scalar at +inf", tol, [(last.1.scalar_defect(), "x2=+inf".to_string())]),
        worst(
            "continuity",
            jump_tol,
            samples.windows(2).map(|w| (w[0].1.max_abs_diff(&w[1].1), format!("x2 in [{}, {}]", w[0].0, w[1].0))),
        ),
    ];
    Ok(MembershipReport::new(conditions, Vec::new()))
}

/// Tuning for [`membership_t`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberTolerances {
    /// Tolerance on scalar edges and on the fiber graph.
    pub tol_f: f64,
    /// Eigenvalue matching window.
    pub delta_lambda: f64,
    /// Assumed modulus-of-continuity slope of `lambda -> f`.
    pub slope: f64,
}

impl Default for FiberTolerances {
    fn default() -> Self {
        FiberTolerances { tol_f: 1e-8, delta_lambda: 1e-3, slope: 10.0 }
    }
}

/// Membership test for the algebra of matrix functions on the compactified
/// strip: scalar on the left/right edges, and on the bottom and top strata
/// the fiber values `f_j(t) = v_j(t)^T M v_j(t)` depend on `lambda_j(t)` only.
pub fn membership_t(
    samples: &[(CompactPoint, Matrix)],
    table: &EigencurveTable,
    tols: FiberTolerances,
) -> Result<MembershipReport> {
    let canon: Vec<(CompactPoint, &Matrix)> = samples.iter().map(|(p, m)| (p.canonical(), m)).collect();
    let edge = |want: &str| -> Vec<(f64, String)> {
        canon.iter().filter(|(p, _)| p.kind() == want).map(|(p, m)| (m.scalar_defect(), p.to_string())).collect()
    };
    let mut conditions = Vec::new();
    let mut notes = Vec::new();
    for side in ["left", "right"] {
        let items = edge(side);
        if items.is_empty() {
            return domain(format!("no samples on the {side} edge"));
        }
        conditions.push(worst(&format!("{side} edge scalar"), tols.tol_f, items));
    }
    for stratum in ["bottom", "top"] {
        let mut pairs: Vec<(f64, f64, CompactPoint)> = Vec::new();
        let mut all_scalar = true;
        for (p, m) in canon.iter().filter(|(p, _)| p.kind() == stratum) {
            let t1 = p.coords().0;
            let (lambda, b) = table.at(t1)?;
            all_scalar &= m.scalar_defect() <= tols.tol_f;
            for j in 0..table.n {
                let v = b.column(j);
                pairs.push((lambda[j], m.quadratic_form(&v, &v), *p));
            }
        }
        if pairs.is_empty() {
            return domain(format!("no samples on the {stratum} stratum"));
        }
        if all_scalar {
            notes.push(format!("{stratum} stratum is scalar; its fiber states coincide"));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut items = Vec::new();
        for (i, a) in pairs.iter().enumerate() {
            for b in pairs[i + 1..].iter().take_while(|b| b.0 - a.0 <= tols.delta_lambda) {
                items.push(((a.1 - b.1).abs(), format!("lambda={} at {} vs {}", a.0, a.2, b.2)));
            }
        }
        let tolerance = tols.tol_f + tols.slope * tols.delta_lambda;
        conditions.push(worst(&format!("{stratum} fiber graph"), tolerance, items));
    }
    Ok(MembershipReport::new(conditions, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::curves::eigencurves;
    use crate::algebra::states::{ConstantField, MatrixField, PhiField};
    use crate::spectral::{gamma_b, gamma_b_boundary, HalfLineEnd};
    use crate::symbols::{Symbol1D, SymbolHalfLine};

    fn gamma_b_samples(b: &SymbolHalfLine, n: usize) -> Vec<(f64, Matrix)> {
        let mut s = vec![(0.0, gamma_b_boundary(b, n, HalfLineEnd::Zero).unwrap().entries)];
        for k in 0..=80 {
            let x2 = 10f64.powf(-4.0 + 0.1 * k as f64);
            s.push((x2, gamma_b(b, n, x2).unwrap().entries));
        }
        s.push((f64::INFINITY, gamma_b_boundary(b, n, HalfLineEnd::Infinity).unwrap().entries));
        s
    }

    #[test]
    fn frak_c_examples() {
        let r = membership_frak_c(&gamma_b_samples(&SymbolHalfLine::ind01(), 3), 1e-8, 0.25).unwrap();
        assert!(r.verdict, "{r:?}");
        let r = membership_frak_c(&gamma_b_samples(&SymbolHalfLine::constant(1.0), 3), 1e-8, 0.25).unwrap();
        assert!(r.verdict);
        let d = Matrix::diag(&[1.0, 0.0]);
        let r = membership_frak_c(&[(0.0, d.clone()), (1.0, d.clone()), (f64::INFINITY, d)], 1e-8, 0.25).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.condition("scalar at 0").unwrap().witness, "x2=0");
        assert!(membership_frak_c(&[(1.0, Matrix::identity(1))], 1e-8, 0.25).is_err());
    }

    fn strip_samples(field: &dyn MatrixField) -> Vec<(CompactPoint, Matrix)> {
        let mut pts = Vec::new();
        for k in 0..=16 {
            let t1 = -4.0 + 0.5 * k as f64;
            pts.push(CompactPoint::Bottom { t1 });
            pts.push(CompactPoint::Top { t1 });
            pts.push(CompactPoint::Interior { t1, t2: 1.0 });
        }
        for t2 in [0.0, 0.1, 1.0, 10.0, f64::INFINITY] {
            pts.push(CompactPoint::Left { t2 });
            pts.push(CompactPoint::Right { t2 });
        }
        pts.into_iter().map(|p| (p, field.eval(p).unwrap())).collect()
    }

    fn table(n: usize) -> EigencurveTable {
        eigencurves(n, &(0..=16).map(|k| -4.0 + 0.5 * k as f64).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn sigmoid_and_chi_plus_are_members() {
        for a in [Symbol1D::sigmoid(), Symbol1D::chi_plus()] {
            let f = PhiField::new(a, 3);
            let r = membership_t(&strip_samples(&f), &table(3), FiberTolerances::default()).unwrap();
            assert!(r.verdict, "{r:?}");
        }
    }

    #[test]
    fn sigmoid_bottom_fibers_follow_affine_law() {
        let f = PhiField::new(Symbol1D::sigmoid(), 3);
        let tb = table(3);
        for (k, &t1) in tb.grid.iter().enumerate().filter(|(_, t)| t.is_finite()) {
            let m = f.eval(CompactPoint::Bottom { t1 }).unwrap();
            for j in 0..3 {
                let v = tb.diagonalizers[k].column(j);
                assert!((m.quadratic_form(&v, &v) - (2.0 * tb.lambdas[k][j] - 1.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_non_scalar_fails() {
        let f = ConstantField(Matrix::diag(&[1.0, 0.0]));
        let r = membership_t(&strip_samples(&f), &table(2), FiberTolerances::default()).unwrap();
        assert!(!r.verdict);
        assert!(!r.condition("left edge scalar").unwrap().passed());
    }
}
