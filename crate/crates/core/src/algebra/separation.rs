use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::linalg::Matrix;
use crate::spectral::{CompactPoint, Provenance, SpectralMatrix};
use crate::specfun::{check_n, hermite_vector};

/// `2 sqrt(x2) H(beta) H(beta)^T` with `beta = x1 + 2 sqrt(x2) r`: the limit of
/// `gamma^a` along the tent family concentrating at `r`.
pub fn approx_identity_limit(n: usize, x1: f64, x2: f64, r: f64) -> Result<SpectralMatrix> {
    check_n(n)?;
    if !(x2 > 0.0 && x2.is_finite()) || !x1.is_finite() || !r.is_finite() {
        return domain(format!("approximate identity needs finite x1, r and x2 > 0, got ({x1}, {x2}, {r})"));
    }
    let scale = 2.0 * x2.sqrt();
    let h = hermite_vector(n, x1 + scale * r)?;
    Ok(SpectralMatrix {
        n,
        point: CompactPoint::Interior { t1: x1, t2: x2 },
        entries: Matrix::outer(&h, scale),
        provenance: Provenance::ClosedForm,
    })
}

/// Coefficients of the exponent `c2 r^2 + c1 r + c0` comparing two interior
/// points through the tent family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationExponent {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    /// Some coefficient exceeds `1e-12` in magnitude.
    pub separable: bool,
}

/// `(4 (x2 - t2), 4 (x1 sqrt(x2) - t1 sqrt(t2)), x1^2 - t1^2)` for
/// `p = (x1, x2)` and `q = (t1, t2)`.
pub fn separation_exponent(p: (f64, f64), q: (f64, f64)) -> Result<SeparationExponent> {
    for (x1, x2) in [p, q] {
        CompactPoint::interior(x1, x2)?;
    }
    let ((x1, x2), (t1, t2)) = (p, q);
    let c2 = 4.0 * (x2 - t2);
    let c1 = 4.0 * (x1 * x2.sqrt() - t1 * t2.sqrt());
    let c0 = x1 * x1 - t1 * t1;
    let separable = [c2, c1, c0].iter().any(|c| c.abs() > 1e-12);
    Ok(SeparationExponent { c2, c1, c0, separable })
}

/// `det [H(y_1) ... H(y_n)]` for distinct `y_k`.
pub fn hermite_frame_det(ys: &[f64]) -> Result<f64> {
    let n = ys.len();
    check_n(n)?;
    for (i, a) in ys.iter().enumerate() {
        if !a.is_finite() {
            return domain(format!("non-finite node {a}"));
        }
        if ys[i + 1..].contains(a) {
            return domain(format!("repeated node {a}"));
        }
    }
    let mut m = Matrix::zeros(n);
    for (k, &y) in ys.iter().enumerate() {
        for (j, h) in hermite_vector(n, y)?.into_iter().enumerate() {
            m[(j, k)] = h;
        }
    }
    Ok(m.det())
}

/// Outcome of [`fiber_vector_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiberTest {
    pub coincide: bool,
    /// Largest `| |<H, v>| - |<H, w>| |` over the grid.
    pub modulus_gap: f64,
    /// Largest gap between the pair products `conj(p(r1)) p(r2)` of `v` and `w`.
    pub product_gap: f64,
}

pub const FIBER_TOL: f64 = 1e-9;

/// Decides whether `v` and `w` give the same functional along the tent
/// family at `(x1, x2)`: the moduli of `p(r) = <H(beta(r)), .>` must agree
/// and their phases must differ by a constant.
pub fn fiber_vector_test(
    n: usize,
    v: &[Complex64],
    w: &[Complex64],
    x1: f64,
    x2: f64,
    r_grid: &[f64],
) -> Result<FiberTest> {
    check_n(n)?;
    CompactPoint::interior(x1, x2)?;
    for u in [v, w] {
        if u.len() != n {
            return domain(format!("vector has length {}, expected {n}", u.len()));
        }
        let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return domain(format!("vector has norm {norm}, expected 1"));
        }
    }
    if r_grid.is_empty() {
        return domain("empty r grid");
    }
    let scale = 2.0 * x2.sqrt();
    let pairing = |u: &[Complex64], h: &[f64]| -> Complex64 { h.iter().zip(u).map(|(&a, z)| a * z.conj()).sum() };
    let mut pv = Vec::with_capacity(r_grid.len());
    let mut pw = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let h = hermite_vector(n, x1 + scale * r)?;
        pv.push(pairing(v, &h));
        pw.push(pairing(w, &h));
    }
    let modulus_gap = pv.iter().zip(&pw).map(|(a, b)| (a.norm() - b.norm()).abs()).fold(0.0, f64::max);
    let mut product_gap: f64 = 0.0;
    for i in 0..pv.len() {
        for j in i + 1..pv.len() {
            let gap = (pv[i].conj() * pv[j] - pw[i].conj() * pw[j]).norm();
            product_gap = product_gap.max(gap);
        }
    }
    Ok(FiberTest { coincide: modulus_gap <= FIBER_TOL && product_gap <= FIBER_TOL, modulus_gap, product_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::gamma_a_matrix;
    use crate::symbols::Symbol1D;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn approx_identity_values() {
        let m = approx_identity_limit(1, 0.0, 0.25, 0.0).unwrap().entries;
        assert!((m[(0, 0)] - PI.sqrt().recip()).abs() < 1e-15);
        assert!((m[(0, 0)] - 0.5641896).abs() < 1e-7);
        let m = approx_identity_limit(1, 0.0, 0.25, 1.0).unwrap().entries;
        assert!((m[(0, 0)] - (-1.0f64).exp() / PI.sqrt()).abs() < 1e-15);
        assert!((m[(0, 0)] - 0.2075537).abs() < 1e-7);
        for r in [0.0, 1.0] {
            let a = Symbol1D::triangle(1e-3, r).unwrap();
            let g = gamma_a_matrix(&a, 1, 0.0, 0.25).unwrap().entries;
            assert!((g[(0, 0)] - approx_identity_limit(1, 0.0, 0.25, r).unwrap().entries[(0, 0)]).abs() < 1e-6);
        }
        let (l, _) = crate::algebra::eigendecompose_spd(&approx_identity_limit(3, 0.2, 0.7, 0.4).unwrap().entries).unwrap();
        assert!(l[0].abs() < 1e-12 && l[1].abs() < 1e-12 && l[2] > 0.1);
    }

    #[test]
    fn exponent_examples() {
        let e = separation_exponent((1.0, 1.0), (1.0, 1.0)).unwrap();
        assert_eq!((e.c2, e.c1, e.c0, e.separable), (0.0, 0.0, 0.0, false));
        let e = separation_exponent((0.0, 1.0), (0.0, 4.0)).unwrap();
        assert_eq!((e.c2, e.c1, e.c0, e.separable), (-12.0, 0.0, 0.0, true));
        let e = separation_exponent((1.0, 1.0), (-1.0, 1.0)).unwrap();
        assert_eq!((e.c2, e.c1, e.c0, e.separable), (0.0, 8.0, 0.0, true));
        assert!(separation_exponent((0.0, 0.0), (0.0, 1.0)).is_err());
    }

    #[test]
    fn frame_det_examples() {
        let d = hermite_frame_det(&[0.0, 1.0]).unwrap();
        let h0 = hermite_vector(1, 0.0).unwrap()[0];
        let h1 = hermite_vector(2, 1.0).unwrap()[1];
        assert!((d - h0 * h1).abs() < 1e-15);
        assert!((d - 0.4839414).abs() < 1e-7);
        assert!(hermite_frame_det(&[-0.3]).unwrap() > 0.0);
        assert!(hermite_frame_det(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn fiber_examples() {
        let grid: Vec<f64> = (0..25).map(|k| -3.0 + 0.25 * k as f64).collect();
        let v = vec![c(0.6, 0.0), c(0.0, 0.8)];
        assert!(fiber_vector_test(2, &v, &v, 0.0, 0.25, &grid).unwrap().coincide);
        let phase = Complex64::from_polar(1.0, 0.7);
        let w: Vec<Complex64> = v.iter().map(|z| phase * z).collect();
        assert!(fiber_vector_test(2, &v, &w, 0.0, 0.25, &grid).unwrap().coincide);
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let e2 = vec![c(0.0, 0.0), c(1.0, 0.0)];
        let t = fiber_vector_test(2, &e1, &e2, 0.0, 0.25, &grid).unwrap();
        assert!(!t.coincide && t.modulus_gap > 0.1);
        // same moduli everywhere but a non-constant relative phase
        let conj: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
        let t = fiber_vector_test(2, &v, &conj, 0.0, 0.25, &grid).unwrap();
        assert!(t.modulus_gap < 1e-15);
        assert!(!t.coincide);
    }
}
