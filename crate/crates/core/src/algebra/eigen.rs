use crate::error::{domain, Result};
use crate::linalg::{jacobi_eigen, Matrix};
use crate::spectral::phi_plus;
use crate::specfun::gaussian_tail_moment_matrix;

/// Eigen-decomposition of a symmetric matrix: `M = B diag(lambda) B^T` with
/// `lambda` ascending and `B` orthogonal.
///
/// Each eigenvector is signed so that its first component above `1e-12` in
/// magnitude is positive.
pub fn eigendecompose_spd(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let asym = m.max_asymmetry();
    if !(asym <= 1e-10) {
        return domain(format!("matrix is not symmetric (defect {asym:e})"));
    }
    let n = m.n();
    let (values, vectors) = jacobi_eigen(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let lambda: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut b = Matrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        let v = vectors.column(src);
        let sign = v.iter().find(|x| x.abs() > 1e-12).map_or(1.0, |x| x.signum());
        for r in 0..n {
            b[(r, col)] = sign * v[r];
        }
    }
    Ok((lambda, b))
}

/// Outcome of [`generalized_eigen_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct PencilCheck {
    /// `|det(lambda M_{-inf} - M_t)| / ||M_{-inf}||^n` per candidate.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Spectrum of the pencil `(M_t, M_{-inf})`, ascending.
    pub pencil_eigenvalues: Vec<f64>,
    /// Spectrum of `phi_+(t)`, ascending.
    pub phi_eigenvalues: Vec<f64>,
    /// Max gap between the two spectra.
    pub spectrum_mismatch: f64,
}

/// Eigenvalues of the pencil `(M_t, M_{-inf})`, solved as the symmetric
/// problem `L^{-1} M_t L^{-T}` with `M_{-inf} = L L^T`.
pub fn pencil_eigenvalues(n: usize, t: f64) -> Result<Vec<f64>> {
    let m_inf = gaussian_tail_moment_matrix(n, f64::NEG_INFINITY)?.entries;
    let m_t = gaussian_tail_moment_matrix(n, t)?.entries;
    let l_inv = m_inf.cholesky()?.lower_inverse()?;
    let reduced = &(&l_inv * &m_t) * &l_inv.transpose();
    Ok(eigendecompose_spd(&reduced)?.0)
}

/// Checks `det(lambda I - phi_+(t)) = 0 <=> det(lambda M_{-inf} - M_t) = 0`
/// for the given candidates and by comparing both spectra directly.
pub fn generalized_eigen_check(n: usize, t: f64, candidates: &[f64]) -> Result<PencilCheck> {
    if !t.is_finite() {
        return domain(format!("pencil check needs finite t, got {t}"));
    }
    let m_inf = gaussian_tail_moment_matrix(n, f64::NEG_INFINITY)?.entries;
    let m_t = gaussian_tail_moment_matrix(n, t)?.entries;
    let norm = m_inf.sym_norm().powi(n as i32);
    let residuals: Vec<f64> = candidates.iter().map(|&l| (&m_inf.scale(l) - &m_t).det().abs() / norm).collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let pencil = pencil_eigenvalues(n, t)?;
    let phi = eigendecompose_spd(&phi_plus(n, t)?.entries)?.0;
    let spectrum_mismatch = pencil.iter().zip(&phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(PencilCheck { residuals, max_residual, pencil_eigenvalues: pencil, phi_eigenvalues: phi, spectrum_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_and_sorting() {
        let (l, b) = eigendecompose_spd(&Matrix::identity(3)).unwrap();
        assert_eq!(l, vec![1.0; 3]);
        assert_eq!(b, Matrix::identity(3));
        let (l, b) = eigendecompose_spd(&Matrix::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(l, vec![1.0, 3.0]);
        assert_eq!(b, Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]));
    }

    #[test]
    fn phi_plus_n2_at_zero() {
        let (l, b) = eigendecompose_spd(&phi_plus(2, 0.0).unwrap().entries).unwrap();
        // roots of the characteristic polynomial (1/2 - x)^2 - 1/(2 pi)
        let r = (2.0 * PI).sqrt().recip();
        assert!((l[0] - (0.5 - r)).abs() < 1e-14 && (l[1] - (0.5 + r)).abs() < 1e-14);
        assert!((l[0] - 0.1010577).abs() < 1e-7 && (l[1] - 0.8989423).abs() < 1e-7);
        let s = 0.5f64.sqrt();
        assert!(b.max_abs_diff(&Matrix::from_rows(&[[s, s], [-s, s]])) < 1e-14);
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(eigendecompose_spd(&Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]])).is_err());
    }

    #[test]
    fn pencil_examples() {
        let c = generalized_eigen_check(1, 0.0, &[0.5]).unwrap();
        assert!(c.max_residual < 1e-15);
        let (l, _) = eigendecompose_spd(&phi_plus(2, 0.0).unwrap().entries).unwrap();
        let c = generalized_eigen_check(2, 0.0, &l).unwrap();
        assert!(c.max_residual < 1e-9);
        assert!(c.spectrum_mismatch < 1e-12);
        let bad = generalized_eigen_check(2, 0.0, &[0.5]).unwrap();
        // det of [[0, -1/2], [-1/2, 0]] over pi
        assert!((bad.max_residual - 0.25 / PI).abs() < 1e-14);
    }
}
