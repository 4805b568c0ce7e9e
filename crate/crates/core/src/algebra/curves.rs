use super::eigen::eigendecompose_spd;
use crate::error::{domain, Result};
use crate::exec::{try_map, Execution};
use crate::linalg::Matrix;
use crate::spectral::phi_plus;

/// Eigenvalue curves of `phi_+` with a continuous choice of diagonalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct EigencurveTable {
    pub n: usize,
    /// Increasing, starting at `-inf` and ending at `+inf`.
    pub grid: Vec<f64>,
    /// `lambdas[k]` holds the ascending eigenvalues at `grid[k]`.
    pub lambdas: Vec<Vec<f64>>,
    /// `diagonalizers[k]` is the orthogonal `B(grid[k])`.
    pub diagonalizers: Vec<Matrix>,
    /// Largest `||b_j(t_{k+1}) - b_j(t_k)||` between adjacent finite columns.
    pub continuity_defect: f64,
    /// Adjacent column pairs where best-overlap matching disagrees with the
    /// ascending order, i.e. candidate eigenvalue crossings.
    pub reorderings: usize,
}

impl EigencurveTable {
    /// `lambda_j` (1-based `j`) along the grid.
    pub fn curve(&self, j: usize) -> Vec<f64> {
        self.lambdas.iter().map(|col| col[j - 1]).collect()
    }

    /// Column index of `t` on the grid, if present.
    pub fn position(&self, t: f64) -> Option<usize> {
        self.grid.iter().position(|&g| g == t)
    }

    /// `(lambda, B)` at `t`: looked up on the grid, computed directly off it.
    pub fn at(&self, t: f64) -> Result<(Vec<f64>, Matrix)> {
        match self.position(t) {
            Some(k) => Ok((self.lambdas[k].clone(), self.diagonalizers[k].clone())),
            None => eigen_at(self.n, t),
        }
    }
}

fn eigen_at(n: usize, t: f64) -> Result<(Vec<f64>, Matrix)> {
    if t == f64::NEG_INFINITY {
        Ok((vec![1.0; n], Matrix::identity(n)))
    } else if t == f64::INFINITY {
        Ok((vec![0.0; n], Matrix::identity(n)))
    } else {
        eigendecompose_spd(&phi_plus(n, t)?.entries)
    }
}

/// Eigenvalue curves of `phi_+` over `grid`, with `-inf` and `+inf` appended.
pub fn eigencurves(n: usize, grid: &[f64]) -> Result<EigencurveTable> {
    eigencurves_with(n, grid, Execution::default())
}

pub fn eigencurves_with(n: usize, grid: &[f64], exec: Execution) -> Result<EigencurveTable> {
    let finite: Vec<f64> = grid.iter().copied().filter(|t| t.is_finite()).collect();
    if finite.len() < 2 {
        return domain("eigencurves needs at least two finite grid points");
    }
    if grid.iter().any(|t| t.is_nan()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return domain("eigencurve grid must be strictly increasing");
    }
    let columns = try_map(exec, &finite, |&t| eigen_at(n, t))?;

    let mut lambdas = Vec::with_capacity(finite.len() + 2);
    let mut diagonalizers: Vec<Matrix> = Vec::with_capacity(finite.len() + 2);
    let mut continuity_defect: f64 = 0.0;
    let mut reorderings = 0;
    for (lambda, mut b) in columns {
        if let Some(prev) = diagonalizers.last() {
            let overlap = &prev.transpose() * &b;
            if greedy_match(&overlap).iter().enumerate().any(|(j, &m)| j != m) {
                reorderings += 1;
            }
            for j in 0..n {
                if overlap[(j, j)] < 0.0 {
                    for r in 0..n {
                        b[(r, j)] = -b[(r, j)];
                    }
                }
                let gap: f64 = (0..n).map(|r| (b[(r, j)] - prev[(r, j)]).powi(2)).sum::<f64>().sqrt();
                continuity_defect = continuity_defect.max(gap);
            }
        }
        lambdas.push(lambda);
        diagonalizers.push(b);
    }

    // any orthogonal matrix diagonalizes I and 0; reuse the neighbours
    let first = diagonalizers[0].clone();
    let last = diagonalizers[diagonalizers.len() - 1].clone();
    lambdas.insert(0, vec![1.0; n]);
    diagonalizers.insert(0, first);
    lambdas.push(vec![0.0; n]);
    diagonalizers.push(last);
    let mut full = Vec::with_capacity(finite.len() + 2);
    full.push(f64::NEG_INFINITY);
    full.extend_from_slice(&finite);
    full.push(f64::INFINITY);

    Ok(EigencurveTable { n, grid: full, lambdas, diagonalizers, continuity_defect, reorderings })
}

/// For each previous column `j`, the new column with the largest overlap,
/// chosen greedily in order of decreasing `|overlap|`.
fn greedy_match(overlap: &Matrix) -> Vec<usize> {
    let n = overlap.n();
    let mut cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    cells.sort_by(|a, b| overlap[*b].abs().total_cmp(&overlap[*a].abs()));
    let mut matched = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (i, j) in cells {
        if matched[i] == usize::MAX && !taken[j] {
            matched[i] = j;
            taken[j] = true;
        }
    }
    matched
}
