//! Small dense linear algebra helpers for the Hilbert-module layer.

use nalgebra::{Complex, DMatrix};

pub type C = Complex<f64>;

pub fn c(re: f64) -> C {
    Complex::new(re, 0.0)
}

/// Eigenvalues of a Hermitian matrix via the real symmetric embedding
/// `[[X, -Y], [Y, X]]`; each eigenvalue appears twice, which is harmless
/// for positivity thresholds.
pub fn hermitian_eigenvalues(h: &DMatrix<C>) -> Vec<f64> {
    let n = h.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = h[(i, j)];
            m[(i, j)] = v.re;
            m[(i, j + n)] = -v.im;
            m[(i + n, j)] = v.im;
            m[(i + n, j + n)] = v.re;
        }
    }
    let mut vals: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    vals
}

/// How far `h` is from being Hermitian, as a max-entry residual.
pub fn hermitian_defect(h: &DMatrix<C>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Numerical rank by Gaussian elimination with partial pivoting; the pivot
/// threshold is `tol` scaled by the largest entry.
pub fn rank(mat: &DMatrix<C>, tol: f64) -> usize {
    let mut a = mat.clone();
    let (rows, cols) = (a.nrows(), a.ncols());
    let scale = a.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1.0);
    let threshold = tol * scale;
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let mut pivot = row;
        let mut best = 0.0f64;
        for r in row..rows {
            let mag = a[(r, col)].norm();
            if mag > best {
                best = mag;
                pivot = r;
            }
        }
        if best <= threshold {
            continue;
        }
        a.swap_rows(row, pivot);
        for r in (row + 1)..rows {
            let factor = a[(r, col)] / a[(row, col)];
            for cc in col..cols {
                let v = a[(row, cc)];
                a[(r, cc)] -= factor * v;
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

pub fn max_abs_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_eigenvalues_of_pauli_y_like() {
        // [[0, -i], [i, 0]] has eigenvalues ±1
        let h = DMatrix::from_row_slice(2, 2, &[
            Complex::new(0.0, 0.0),
            Complex::new(0.0, -1.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, 0.0),
        ]);
        assert!(hermitian_defect(&h) < 1e-15);
        let vals = hermitian_eigenvalues(&h);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_of_rank_one_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        assert_eq!(rank(&m, 1e-12), 1);
        let id = DMatrix::<C>::identity(3, 3);
        assert_eq!(rank(&id, 1e-12), 3);
    }
}
