//! Closed-form reference computations for the witnesses.
//!
//! Deliberately independent of the code under test: no nalgebra, no
//! gradient descent, just sums and Gaussian elimination.

use crate::error::{Error, Result};

/// Least-squares weight of the through-origin model `y = w·x`: `Σxy / Σx²`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    sxy / sxx
}

/// Solves `a·x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::contract("system must be square"));
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot][col] == 0.0 {
            return Err(Error::contract("singular system"));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            let (upper, lower) = a.split_at_mut(row);
            for (t, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *t -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

fn powers(x: f64, degree: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(degree + 1);
    let mut p = 1.0;
    for _ in 0..=degree {
        out.push(p);
        p *= x;
    }
    out
}

/// Polynomial least squares through the normal equations, coefficients in
/// ascending powers.
///
/// With fewer points than coefficients the minimum-norm interpolant is
/// returned, via the dual system `(V Vᵀ) a = y`, `c = Vᵀ a`.
pub fn normal_equations_fit(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::contract("need matching, non-empty x and y"));
    }
    let v: Vec<Vec<f64>> = xs.iter().map(|&x| powers(x, degree)).collect();
    let m = degree + 1;
    let n = xs.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    if n >= m {
        let gram: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..n).map(|r| v[r][i] * v[r][j]).sum())
                    .collect()
            })
            .collect();
        let rhs: Vec<f64> = (0..m)
            .map(|i| (0..n).map(|r| v[r][i] * ys[r]).sum())
            .collect();
        solve_linear(gram, rhs)
    } else {
        let gram: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| dot(&v[i], &v[j])).collect())
            .collect();
        let a = solve_linear(gram, ys.to_vec())?;
        Ok((0..m)
            .map(|k| (0..n).map(|r| v[r][k] * a[r]).sum())
            .collect())
    }
}

pub fn polyval(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn polynomial_mse(coefficients: &[f64], xs: &[f64], ys: &[f64]) -> f64 {
    let sum: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = polyval(coefficients, x) - y;
            r * r
        })
        .sum();
    sum / xs.len() as f64
}

/// `|a − b| / max(1, |a| + |b|)`: relative for large values, absolute near 0.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs() + b.abs()).max(1.0)
}
