//! Accelerated primal-dual (Chambolle-Pock) iteration for
//! `min_u 1/2 ||u - f||^2 + r * N(K u)`, where `K` is a difference operator
//! and `N` a norm whose dual ball admits a cheap projection.
//!
//! The data term is 1-strongly convex, so the step sizes follow the
//! accelerated schedule (`theta = 1/sqrt(1 + 2 tau)`) starting from
//! `sigma = tau = 0.99 / ||K||`. Stopping is on the duality gap relative to
//! `||f||^2`.

use alloc::vec;
use alloc::vec::Vec;

use super::diff;
use super::l1ball::project_l1_ball;
use super::SolverOptions;
use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy)]
pub(crate) enum DualOperator {
    /// Neumann gradient; dual ball is a box (anisotropic) or pointwise
    /// Euclidean discs (isotropic).
    Grad2d { rows: usize, cols: usize, iso: bool },
    /// Differences along rows of a `rows x cols` array; the norm is
    /// `sum_i max_j |.|`, so the dual ball is a product of l1 balls.
    ColumnDiff { rows: usize, cols: usize },
}

impl DualOperator {
    fn dual_len(&self) -> usize {
        match *self {
            DualOperator::Grad2d { rows, cols, .. } => 2 * rows * cols,
            DualOperator::ColumnDiff { rows, cols } => rows.saturating_sub(1) * cols,
        }
    }

    fn apply(&self, u: &[f64], out: &mut [f64]) {
        match *self {
            DualOperator::Grad2d { rows, cols, .. } => diff::grad_2d(u, rows, cols, out),
            DualOperator::ColumnDiff { rows, cols } => diff::column_diff(u, rows, cols, out),
        }
    }

    fn adjoint(&self, y: &[f64], out: &mut [f64]) {
        match *self {
            DualOperator::Grad2d { rows, cols, .. } => diff::grad_2d_adjoint(y, rows, cols, out),
            DualOperator::ColumnDiff { rows, cols } => {
                diff::column_diff_adjoint(y, rows, cols, out)
            }
        }
    }

    fn op_norm(&self) -> f64 {
        match self {
            DualOperator::Grad2d { .. } => math::sqrt(8.0),
            DualOperator::ColumnDiff { .. } => 2.0,
        }
    }

    fn project(&self, y: &mut [f64], radius: f64) {
        match *self {
            DualOperator::Grad2d { iso: false, .. } => {
                for v in y.iter_mut() {
                    *v = v.clamp(-radius, radius);
                }
            }
            DualOperator::Grad2d {
                rows,
                cols,
                iso: true,
            } => {
                let n = rows * cols;
                let (yx, yy) = y.split_at_mut(n);
                for (a, b) in yx.iter_mut().zip(yy.iter_mut()) {
                    let m = math::sqrt(*a * *a + *b * *b);
                    if m > radius {
                        let s = radius / m;
                        *a *= s;
                        *b *= s;
                    }
                }
            }
            DualOperator::ColumnDiff { cols, .. } => {
                for row in y.chunks_mut(cols) {
                    project_l1_ball(row, radius);
                }
            }
        }
    }

    /// The primal norm `N` evaluated on `K u`.
    pub(crate) fn norm_of(&self, ku: &[f64]) -> f64 {
        match *self {
            DualOperator::Grad2d { iso: false, .. } => ku.iter().map(|v| v.abs()).sum(),
            DualOperator::Grad2d {
                rows,
                cols,
                iso: true,
            } => {
                let n = rows * cols;
                ku[..n]
                    .iter()
                    .zip(&ku[n..])
                    .map(|(a, b)| math::sqrt(a * a + b * b))
                    .sum()
            }
            DualOperator::ColumnDiff { cols, .. } => ku
                .chunks(cols)
                .map(|row| row.iter().fold(0.0f64, |m, v| m.max(v.abs())))
                .sum(),
        }
    }

    pub(crate) fn value(&self, u: &[f64]) -> f64 {
        let mut ku = vec![0.0; self.dual_len()];
        self.apply(u, &mut ku);
        self.norm_of(&ku)
    }
}

pub(crate) struct Solution {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// `warm` carries the dual variable between calls; it is reused when the
/// length matches and overwritten with the final dual iterate.
pub(crate) fn solve(
    op: DualOperator,
    f: &[f64],
    radius: f64,
    options: &SolverOptions,
    warm: &mut Vec<f64>,
) -> Result<Solution> {
    let n = f.len();
    let m = op.dual_len();
    let f_norm_sq = math::norm_sq(f);
    if f_norm_sq == 0.0 || m == 0 {
        return Ok(Solution {
            u: f.to_vec(),
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut y = if warm.len() == m {
        warm.clone()
    } else {
        vec![0.0; m]
    };
    op.project(&mut y, radius);

    let mut kty = vec![0.0; n];
    op.adjoint(&y, &mut kty);
    let mut x: Vec<f64> = f.iter().zip(&kty).map(|(a, b)| a - b).collect();
    let mut x_bar = x.clone();
    let mut kx = vec![0.0; m];
    let mut scratch = vec![0.0; n];

    let l = op.op_norm();
    let mut tau = 0.99 / l;
    let mut sigma = 0.99 / l;
    let check_every = options.check_every.max(1);
    let target = options.tol * f_norm_sq;
    let mut last_gap = f64::INFINITY;

    for it in 1..=options.max_iter {
        op.apply(&x_bar, &mut kx);
        for (yj, kj) in y.iter_mut().zip(&kx) {
            *yj += sigma * kj;
        }
        op.project(&mut y, radius);
        op.adjoint(&y, &mut kty);

        let theta = 1.0 / math::sqrt(1.0 + 2.0 * tau);
        for i in 0..n {
            let x_new = (x[i] - tau * kty[i] + tau * f[i]) / (1.0 + tau);
            x_bar[i] = x_new + theta * (x_new - x[i]);
            x[i] = x_new;
        }
        tau *= theta;
        sigma /= theta;

        if it % check_every == 0 || it == options.max_iter {
            // dual value of y and the primal point it induces
            for i in 0..n {
                scratch[i] = f[i] - kty[i];
            }
            let dual = 0.5 * f_norm_sq - 0.5 * math::norm_sq(&scratch);
            let primal_y = 0.5 * math::norm_sq(&kty) + radius * op.value(&scratch);
            let primal_x = 0.5 * x.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
                + radius * op.value(&x);
            // zero is exact past extinction, where the iterates keep a
            // residual that r N(K u) amplifies
            let primal_zero = 0.5 * f_norm_sq;
            let (best, primal) = if primal_zero <= primal_y.min(primal_x) {
                (None, primal_zero)
            } else if primal_y <= primal_x {
                (Some(&scratch), primal_y)
            } else {
                (Some(&x), primal_x)
            };
            let gap = (primal - dual).max(0.0);
            last_gap = gap;
            if gap <= target {
                let u = best.map_or_else(|| vec![0.0; n], |b| b.clone());
                *warm = y;
                return Ok(Solution {
                    u,
                    iterations: it,
                    residual: gap / f_norm_sq,
                });
            }
        }
    }
    *warm = y;
    Err(Error::Solver {
        step: None,
        iterations: options.max_iter,
        residual: last_gap / f_norm_sq,
    })
}
