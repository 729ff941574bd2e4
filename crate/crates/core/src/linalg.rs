//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

/// Numerical rank of a matrix from its singular values.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let largest = svd.singular_values.max().max(1.0);
    svd.singular_values
        .iter()
        .filter(|&&s| s > tol * largest)
        .count()
}

/// Dimension of the affine hull of a point set (0 for a single point).
pub fn affine_rank(points: &[&DVector<f64>], tol: f64) -> usize {
    match points.split_first() {
        None => 0,
        Some((first, rest)) => {
            if rest.is_empty() {
                return 0;
            }
            let dim = first.len();
            let m = DMatrix::from_fn(rest.len(), dim, |r, c| rest[r][c] - first[c]);
            rank(&m, tol)
        }
    }
}

/// Solves the square system `a x = b`, returning `None` when `a` is singular.
pub fn solve_square(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let smallest = svd.singular_values.min();
    if largest == 0.0 || smallest <= 1e-12 * largest {
        return None;
    }
    svd.solve(b, 0.0).ok()
}

/// Unit vector spanning the null space of a `(n-1) x n` matrix of full row rank.
pub fn null_vector(m: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = m.ncols();
    if m.nrows() + 1 != n {
        return None;
    }
    if n == 1 {
        return Some(DVector::from_element(1, 1.0));
    }
    // Pad with a zero row so the SVD exposes the full right singular basis.
    let mut padded = DMatrix::zeros(n, n);
    padded.rows_mut(0, n - 1).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let largest = svd.singular_values.max().max(1e-300);
    let mut second_smallest = f64::INFINITY;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if i != idx {
            second_smallest = second_smallest.min(s);
        }
    }
    if second_smallest <= 1e-10 * largest {
        return None;
    }
    Some(v_t.row(idx).transpose().normalize())
}

/// Result of a nonnegative least-squares solve.
#[derive(Debug, Clone)]
pub struct Nnls {
    pub coefficients: DVector<f64>,
    pub residual: f64,
}

/// Lawson-Hanson active-set solver for `min ||a x - b||` subject to `x >= 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Nnls {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    if n == 0 {
        return Nnls {
            coefficients: x,
            residual: b.norm(),
        };
    }
    let tol = 1e-13 * (1.0 + a.norm()) * (1.0 + b.norm());
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;

        loop {
            let cols: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = a.select_columns(&cols);
            let z_sub = sub
                .clone()
                .svd(true, true)
                .solve(b, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(cols.len()));
            if z_sub.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (k, &c) in cols.iter().enumerate() {
                    x[c] = z_sub[k];
                }
                break;
            }
            // Step back toward feasibility and drop variables that hit zero.
            let mut alpha = f64::INFINITY;
            for (k, &c) in cols.iter().enumerate() {
                if z_sub[k] <= 0.0 {
                    let denom = x[c] - z_sub[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[c] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &c) in cols.iter().enumerate() {
                x[c] += alpha * (z_sub[k] - x[c]);
                if x[c] <= tol {
                    x[c] = 0.0;
                    passive[c] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }

    let residual = (a * &x - b).norm();
    Nnls {
        coefficients: x,
        residual,
    }
}
