//! Orthonormal DCT-II (and its inverse, the transpose), separable in 2D.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math;

/// Row `k` holds basis vector `k`: `c_k cos(pi (2i + 1) k / 2n)`.
fn matrix(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    let a0 = math::sqrt(1.0 / n as f64);
    let a = math::sqrt(2.0 / n as f64);
    for k in 0..n {
        let scale = if k == 0 { a0 } else { a };
        for i in 0..n {
            m[k * n + i] = scale * math::cos(PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64);
        }
    }
    m
}

fn apply_rows(data: &mut [f64], rows: usize, cols: usize, m: &[f64], transpose: bool) {
    let mut buf = vec![0.0; cols];
    for r in 0..rows {
        let row = &mut data[r * cols..(r + 1) * cols];
        for (k, b) in buf.iter_mut().enumerate() {
            *b = if transpose {
                (0..cols).map(|i| m[i * cols + k] * row[i]).sum()
            } else {
                (0..cols).map(|i| m[k * cols + i] * row[i]).sum()
            };
        }
        row.copy_from_slice(&buf);
    }
}

fn apply_cols(data: &mut [f64], rows: usize, cols: usize, m: &[f64], transpose: bool) {
    let mut buf = vec![0.0; rows];
    for c in 0..cols {
        for (k, b) in buf.iter_mut().enumerate() {
            *b = if transpose {
                (0..rows)
                    .map(|i| m[i * rows + k] * data[i * cols + c])
                    .sum()
            } else {
                (0..rows)
                    .map(|i| m[k * rows + i] * data[i * cols + c])
                    .sum()
            };
        }
        for (k, b) in buf.iter().enumerate() {
            data[k * cols + c] = *b;
        }
    }
}

pub(crate) fn forward(x: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    transform(x, rows, cols, false)
}

pub(crate) fn inverse(z: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    transform(z, rows, cols, true)
}

fn transform(x: &[f64], rows: usize, cols: usize, transpose: bool) -> Vec<f64> {
    let mut out = x.to_vec();
    if cols > 1 {
        apply_rows(&mut out, rows, cols, &matrix(cols), transpose);
    }
    if rows > 1 {
        apply_cols(&mut out, rows, cols, &matrix(rows), transpose);
    }
    out
}
