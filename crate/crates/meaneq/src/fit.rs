//! Small dense least-squares fits (at most a handful of basis columns).
//!
//! Solves the normal equations with a condition estimate; when conditioning
//! is poor the fit falls back to a modified Gram–Schmidt orthogonalization,
//! which is accurate where the normal equations squared the trouble away.

/// Conditioning above this switches from normal equations to QR.
pub const QR_FALLBACK_CONDITION: f64 = 1e8;

/// Conditioning above this is reported as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Clone, Debug)]
pub struct FitResult {
    pub coeffs: Vec<f64>,
    /// Largest absolute pointwise residual of the fit.
    pub max_residual: f64,
    /// Infinity-norm condition estimate of the Gram matrix.
    pub condition: f64,
    pub used_qr: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FitError {
    #[error("basis Gram matrix is numerically singular")]
    Singular,
    #[error("column lengths disagree or no samples were given")]
    ShapeMismatch,
}

/// Least squares `min ‖X·c − y‖₂` for column-major `X`.
pub fn least_squares(cols: &[&[f64]], y: &[f64]) -> Result<FitResult, FitError> {
    let m = cols.len();
    let n = y.len();
    if m == 0 || n < m || cols.iter().any(|c| c.len() != n) {
        return Err(FitError::ShapeMismatch);
    }

    // Gram matrix and right-hand side of the normal equations.
    let mut gram = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        for j in i..m {
            let s: f64 = cols[i].iter().zip(cols[j]).map(|(a, b)| a * b).sum();
            gram[i][j] = s;
            gram[j][i] = s;
        }
        rhs[i] = cols[i].iter().zip(y).map(|(a, b)| a * b).sum();
    }

    let condition = condition_estimate(&gram).unwrap_or(f64::INFINITY);
    if condition > SINGULAR_CONDITION {
        return Err(FitError::Singular);
    }

    let (coeffs, used_qr) = if condition > QR_FALLBACK_CONDITION {
        (mgs_qr_solve(cols, y).ok_or(FitError::Singular)?, true)
    } else {
        (gauss_solve(gram, rhs).ok_or(FitError::Singular)?, false)
    };

    let mut max_residual = 0.0f64;
    for k in 0..n {
        let fit: f64 = coeffs.iter().zip(cols).map(|(c, col)| c * col[k]).sum();
        max_residual = max_residual.max((y[k] - fit).abs());
    }
    Ok(FitResult { coeffs, max_residual, condition, used_qr })
}

/// Gaussian elimination with partial pivoting.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..m {
            let factor = a[row][col] / a[col][col];
            for k in col..m {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let mut s = b[row];
        for k in row + 1..m {
            s -= a[row][k] * x[k];
        }
        if a[row][row] == 0.0 {
            return None;
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// `‖A‖∞ · ‖A⁻¹‖∞` via explicit inversion (fine for tiny matrices).
fn condition_estimate(a: &[Vec<f64>]) -> Option<f64> {
    let m = a.len();
    let norm = |mat: &[Vec<f64>]| -> f64 {
        mat.iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    // Invert column by column.
    let mut inv = vec![vec![0.0; m]; m];
    for col in 0..m {
        let mut e = vec![0.0; m];
        e[col] = 1.0;
        let x = gauss_solve(a.to_vec(), e)?;
        for row in 0..m {
            inv[row][col] = x[row];
        }
    }
    Some(norm(a) * norm(&inv))
}

/// Thin QR by modified Gram–Schmidt, then `R·c = Qᵀy` by back substitution.
fn mgs_qr_solve(cols: &[&[f64]], y: &[f64]) -> Option<Vec<f64>> {
    let m = cols.len();
    let n = y.len();
    let mut q: Vec<Vec<f64>> = cols.iter().map(|c| c.to_vec()).collect();
    let mut r = vec![vec![0.0; m]; m];
    for i in 0..m {
        let norm = q[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        r[i][i] = norm;
        for v in &mut q[i] {
            *v /= norm;
        }
        let (head, tail) = q.split_at_mut(i + 1);
        let qi = &head[i];
        for (offset, qj) in tail.iter_mut().enumerate() {
            let j = i + 1 + offset;
            let dot: f64 = qi.iter().zip(qj.iter()).map(|(a, b)| a * b).sum();
            r[i][j] = dot;
            for k in 0..n {
                qj[k] -= dot * qi[k];
            }
        }
    }
    let qty: Vec<f64> = (0..m)
        .map(|i| q[i].iter().zip(y).map(|(a, b)| a * b).sum())
        .collect();
    let mut c = vec![0.0; m];
    for row in (0..m).rev() {
        let mut s = qty[row];
        for k in row + 1..m {
            s -= r[row][k] * c[k];
        }
        if r[row][row] == 0.0 {
            return None;
        }
        c[row] = s / r[row][row];
    }
    Some(c)
}

/// Simple linear regression `y ≈ slope·x + intercept` by centered formulas.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        var += (a - mx) * (a - mx);
    }
    if var == 0.0 {
        return None;
    }
    let slope = cov / var;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_quadratic_fit() {
        let xs: Vec<f64> = (0..50).map(|i| 0.1 * i as f64).collect();
        let c0: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let c1 = xs.clone();
        let c2 = vec![1.0; xs.len()];
        let y: Vec<f64> = xs.iter().map(|x| 2.0 * x * x - 3.0 * x + 0.5).collect();
        let fit = least_squares(&[&c0, &c1, &c2], &y).unwrap();
        assert!((fit.coeffs[0] - 2.0).abs() < 1e-10);
        assert!((fit.coeffs[1] + 3.0).abs() < 1e-10);
        assert!((fit.coeffs[2] - 0.5).abs() < 1e-10);
        assert!(fit.max_residual < 1e-10);
        assert!(!fit.used_qr);
    }

    #[test]
    fn ill_conditioned_basis_falls_back_to_qr() {
        // Collinearity of 1e-4 squares to a Gram condition near 2e10, inside
        // the fallback band but short of the singular cutoff.
        let xs: Vec<f64> = (1..200).map(|i| 1.0 + 0.01 * i as f64).collect();
        let c0 = xs.clone();
        let c1: Vec<f64> = xs.iter().map(|x| x * (1.0 + 1e-4) + 1e-4).collect();
        let y: Vec<f64> = xs.iter().map(|x| 3.0 * x).collect();
        let fit = least_squares(&[&c0, &c1], &y).unwrap();
        assert!(
            fit.used_qr,
            "condition = {}, expected fallback band",
            fit.condition
        );
        assert!(fit.max_residual < 1e-8, "residual = {}", fit.max_residual);
    }

    #[test]
    fn duplicate_columns_are_singular() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let err = least_squares(&[&xs, &xs], &xs).unwrap_err();
        assert_eq!(err, FitError::Singular);
    }

    #[test]
    fn regression_recovers_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -4.0 * v + 7.0).collect();
        let (slope, intercept) = linear_regression(&x, &y).unwrap();
        assert!((slope + 4.0).abs() < 1e-12);
        assert!((intercept - 7.0).abs() < 1e-12);
        assert!(linear_regression(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }
}
