//! Least-squares fit of the centro-medial fusion weights.

use crate::error::{Error, Result};

/// Relative pivot size below which an unregularized system counts as singular.
const SINGULAR_TOL: f64 = 1e-12;

/// Fits `(w1, w2, w3)` minimizing
/// `sum_j (w1 r_a[j] + w2 r_o[j] + w3 - r_u[j])^2 + lambda |w|^2`
/// through the 3x3 regularized normal equations.
pub fn cm_lse_fit(r_a: &[f64], r_o: &[f64], r_u: &[f64], lambda: f64) -> Result<[f64; 3]> {
    if r_a.len() != r_o.len() || r_a.len() != r_u.len() {
        return Err(Error::LengthMismatch {
            left: r_a.len(),
            right: r_o.len().max(r_u.len()),
        });
    }
    if r_a.is_empty() {
        return Err(Error::TooFewSamples {
            required: 1,
            actual: 0,
        });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("must be >= 0, got {lambda}")));
    }

    let mut gram = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for ((&a, &o), &u) in r_a.iter().zip(r_o).zip(r_u) {
        let row = [a, o, 1.0];
        for p in 0..3 {
            rhs[p] += row[p] * u;
            for q in 0..3 {
                gram[p][q] += row[p] * row[q];
            }
        }
    }
    for (p, row) in gram.iter_mut().enumerate() {
        row[p] += lambda;
    }
    solve3(gram, rhs, lambda == 0.0)
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3], check_rank: bool) -> Result<[f64; 3]> {
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::SingularSystem);
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        if p == 0.0 || (check_rank && p.abs() <= SINGULAR_TOL * scale) {
            return Err(Error::SingularSystem);
        }
        for row in col + 1..3 {
            let f = a[row][col] / p;
            let pivot_row = a[col];
            for (v, pv) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= f * pv;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}
