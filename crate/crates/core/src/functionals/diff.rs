//! Forward-difference operators and their adjoints.
//!
//! 1D differences are unpadded (`n -> n-1`); the 2D gradient uses Neumann
//! padding so both components live on the pixel grid (`rows*cols` each, zero
//! in the last column/row). Adjoints are exact so primal-dual iterations see
//! `<Du, y> = <u, D^T y>` to rounding.

/// `out[i] = u[i+1] - u[i]`, `out.len() == u.len() - 1`.
pub(crate) fn forward_1d(u: &[f64], out: &mut [f64]) {
    debug_assert_eq!(out.len() + 1, u.len().max(1));
    for (o, w) in out.iter_mut().zip(u.windows(2)) {
        *o = w[1] - w[0];
    }
}

/// Adjoint of [`forward_1d`]: `out[i] = y[i-1] - y[i]` with `y[-1] = y[n-1] = 0`.
pub(crate) fn adjoint_1d(y: &[f64], out: &mut [f64]) {
    let n = out.len();
    debug_assert_eq!(y.len() + 1, n.max(1));
    for i in 0..n {
        let left = if i > 0 { y[i - 1] } else { 0.0 };
        let right = if i + 1 < n { y[i] } else { 0.0 };
        out[i] = left - right;
    }
}

pub(crate) fn sum_abs_diff_1d(u: &[f64]) -> f64 {
    u.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Neumann gradient on a row-major grid: `out[..n]` holds horizontal
/// differences, `out[n..]` vertical ones.
pub(crate) fn grad_2d(u: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    let n = rows * cols;
    debug_assert_eq!(out.len(), 2 * n);
    let (gx, gy) = out.split_at_mut(n);
    for i in 0..rows {
        for j in 0..cols {
            let k = i * cols + j;
            gx[k] = if j + 1 < cols { u[k + 1] - u[k] } else { 0.0 };
            gy[k] = if i + 1 < rows {
                u[k + cols] - u[k]
            } else {
                0.0
            };
        }
    }
}

/// Adjoint of [`grad_2d`] (negative divergence).
pub(crate) fn grad_2d_adjoint(y: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    let n = rows * cols;
    let (yx, yy) = y.split_at(n);
    for i in 0..rows {
        for j in 0..cols {
            let k = i * cols + j;
            let mut v = 0.0;
            if j > 0 {
                v += yx[k - 1];
            }
            if j + 1 < cols {
                v -= yx[k];
            }
            if i > 0 {
                v += yy[k - cols];
            }
            if i + 1 < rows {
                v -= yy[k];
            }
            out[k] = v;
        }
    }
}

/// Differences along the row index of a `rows x cols` array:
/// `out[i, j] = u[i+1, j] - u[i, j]` for `i < rows - 1`.
pub(crate) fn column_diff(u: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    debug_assert_eq!(out.len(), rows.saturating_sub(1) * cols);
    for i in 0..rows.saturating_sub(1) {
        for j in 0..cols {
            out[i * cols + j] = u[(i + 1) * cols + j] - u[i * cols + j];
        }
    }
}

pub(crate) fn column_diff_adjoint(y: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    for i in 0..rows {
        for j in 0..cols {
            let mut v = 0.0;
            if i > 0 {
                v += y[(i - 1) * cols + j];
            }
            if i + 1 < rows {
                v -= y[i * cols + j];
            }
            out[i * cols + j] = v;
        }
    }
}
