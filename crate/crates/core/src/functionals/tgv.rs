//! Second-order total generalized variation in 1D,
//! `TGV(u) = min_w beta ||Du - w||_1 + (1 - beta) ||Dw||_1`,
//! with `w` staggered on the `n - 1` difference sites.
//!
//! The value is computed exactly: the inner problem is 1D TV-L1 in `w`, whose
//! level sets decouple, so some minimizer takes values in `{(Du)_i}` and a
//! Viterbi pass with an L1 distance transform finds it in `O(n^2)`.
//! The prox solves the dual problem with a log-barrier Newton method. The
//! dual lives on the `n - 2` second-difference sites, its Hessian is
//! pentadiagonal and every iterate is strictly feasible, so `f - A z` comes
//! with an exact duality-gap certificate at any radius.

use alloc::vec;
use alloc::vec::Vec;

use super::diff;
use super::SolverOptions;
use crate::error::{Error, Result};
use crate::math;

pub(crate) fn value(u: &[f64], beta: f64) -> f64 {
    if u.len() < 3 {
        return 0.0;
    }
    let mut v = vec![0.0; u.len() - 1];
    diff::forward_1d(u, &mut v);
    inner_min(&v, beta)
}

/// `min_w beta sum |v_i - w_i| + (1 - beta) sum |w_{i+1} - w_i|`.
pub(crate) fn inner_min(v: &[f64], beta: f64) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let mut levels = v.to_vec();
    levels.sort_unstable_by(f64::total_cmp);
    levels.dedup();
    let jump = 1.0 - beta;
    let mut cost: Vec<f64> = levels.iter().map(|&c| beta * (v[0] - c).abs()).collect();
    for &vi in &v[1..] {
        for c in 1..levels.len() {
            let via = cost[c - 1] + jump * (levels[c] - levels[c - 1]);
            if via < cost[c] {
                cost[c] = via;
            }
        }
        for c in (0..levels.len() - 1).rev() {
            let via = cost[c + 1] + jump * (levels[c + 1] - levels[c]);
            if via < cost[c] {
                cost[c] = via;
            }
        }
        for (c, level) in cost.iter_mut().zip(&levels) {
            *c += beta * (vi - level).abs();
        }
    }
    cost.into_iter().fold(f64::INFINITY, f64::min)
}

pub(crate) struct Solution {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// `(A z)_k = z_{k-2} - 2 z_{k-1} + z_k`, the adjoint of the second
/// difference, mapping `n - 2` dual sites to `n` samples.
fn apply_a(z: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (j, &v) in z.iter().enumerate() {
        out[j] += v;
        out[j + 1] -= 2.0 * v;
        out[j + 2] += v;
    }
}

/// Solves `H x = rhs` in place for a symmetric positive definite matrix
/// with diagonals `d0`, `d1`, `d2`, by banded Cholesky.
fn solve_pentadiagonal(d0: &mut [f64], d1: &mut [f64], d2: &mut [f64], rhs: &mut [f64]) -> bool {
    let n = d0.len();
    // factor H = L L^T; L has diagonal d0, subdiagonals d1, d2
    for i in 0..n {
        let mut diag = d0[i];
        let mut l2 = 0.0;
        if i >= 2 {
            l2 = d2[i - 2] / d0[i - 2];
            d2[i - 2] = l2;
            diag -= l2 * l2;
        }
        if i >= 1 {
            let coupling = if i >= 2 { l2 * d1[i - 2] } else { 0.0 };
            let l1 = (d1[i - 1] - coupling) / d0[i - 1];
            d1[i - 1] = l1;
            diag -= l1 * l1;
        }
        if diag.is_nan() || diag <= 0.0 {
            return false;
        }
        d0[i] = math::sqrt(diag);
    }
    for i in 0..n {
        let mut v = rhs[i];
        if i >= 1 {
            v -= d1[i - 1] * rhs[i - 1];
        }
        if i >= 2 {
            v -= d2[i - 2] * rhs[i - 2];
        }
        rhs[i] = v / d0[i];
    }
    for i in (0..n).rev() {
        let mut v = rhs[i];
        if i + 1 < n {
            v -= d1[i] * rhs[i + 1];
        }
        if i + 2 < n {
            v -= d2[i] * rhs[i + 2];
        }
        rhs[i] = v / d0[i];
    }
    true
}

/// Dual of the prox: `min 1/2 ||f - A z||^2` over `|z| <= b`, `|B z| <= a`
/// with `a = beta r`, `b = (1 - beta) r`. `u = f - A z` is the primal point.
struct Dual<'a> {
    f: &'a [f64],
    a: f64,
    b: f64,
}

impl Dual<'_> {
    fn residual(&self, z: &[f64], au: &mut [f64]) {
        apply_a(z, au);
        for (r, fv) in au.iter_mut().zip(self.f) {
            *r = fv - *r;
        }
    }

    /// Barrier objective, or infinity outside the feasible set.
    fn barrier(&self, z: &[f64], mu: f64, res: &mut [f64], bz: &mut [f64]) -> f64 {
        self.residual(z, res);
        diff::adjoint_1d(z, bz);
        let mut logs = 0.0;
        for &v in z {
            let (p, q) = (self.b - v, self.b + v);
            if !(p > 0.0 && q > 0.0) {
                return f64::INFINITY;
            }
            logs += math::ln(p) + math::ln(q);
        }
        for &v in bz.iter() {
            let (p, q) = (self.a - v, self.a + v);
            if !(p > 0.0 && q > 0.0) {
                return f64::INFINITY;
            }
            logs += math::ln(p) + math::ln(q);
        }
        0.5 * math::norm_sq(res) - mu * logs
    }
}

/// Largest step in `(0, 1]` keeping `|x + s dx| < cap` for every entry,
/// with a fraction-to-boundary margin.
fn max_step(x: &[f64], dx: &[f64], cap: f64, mut s: f64) -> f64 {
    for (&v, &d) in x.iter().zip(dx) {
        if d > 0.0 {
            s = s.min(0.99 * (cap - v) / d);
        } else if d < 0.0 {
            s = s.min(0.99 * (cap + v) / -d);
        }
    }
    s
}

pub(crate) fn prox(f: &[f64], radius: f64, beta: f64, options: &SolverOptions) -> Result<Solution> {
    let n = f.len();
    let f_norm_sq = math::norm_sq(f);
    if n < 3 || f_norm_sq == 0.0 {
        return Ok(Solution {
            u: f.to_vec(),
            iterations: 0,
            residual: 0.0,
        });
    }
    let nz = n - 2;
    let dual = Dual {
        f,
        a: beta * radius,
        b: (1.0 - beta) * radius,
    };
    let target = options.tol * f_norm_sq;
    let constraints = (2 * nz + 2 * (nz + 1)) as f64;
    let mut mu = 0.5 * f_norm_sq / constraints;

    let mut z = vec![0.0; nz];
    let mut res = vec![0.0; n];
    let mut bz = vec![0.0; nz + 1];
    let mut grad = vec![0.0; nz];
    let mut dz = vec![0.0; nz];
    let mut bdz = vec![0.0; nz + 1];
    let mut wb = vec![0.0; nz + 1];
    let (mut d0, mut d1, mut d2) = (
        vec![0.0; nz],
        vec![0.0; nz.saturating_sub(1)],
        vec![0.0; nz.saturating_sub(2)],
    );
    let mut trial = vec![0.0; nz];
    let (mut res_t, mut bz_t) = (vec![0.0; n], vec![0.0; nz + 1]);
    let mut iterations = 0;
    let mut last_gap;

    // primal candidates: u = f - A z, and zero (exact past extinction,
    // where r J(u) would amplify the rounding left in f - A z)
    let gap_of = |z: &[f64], res: &mut [f64]| -> (f64, bool) {
        dual.residual(z, res);
        let fit: f64 = res.iter().zip(f).map(|(u, fv)| (u - fv) * (u - fv)).sum();
        let primal = 0.5 * fit + radius * value(res, beta);
        let dual_value = 0.5 * f_norm_sq - 0.5 * math::norm_sq(res);
        let zero_gap = 0.5 * f_norm_sq - dual_value;
        let gap = primal - dual_value;
        if zero_gap < gap {
            (zero_gap.max(0.0), true)
        } else {
            (gap.max(0.0), false)
        }
    };

    loop {
        // centre on the barrier path for the current mu
        let mut phi = dual.barrier(&z, mu, &mut res, &mut bz);
        for _ in 0..100 {
            iterations += 1;
            // gradient: -A^T res + barrier terms
            for j in 0..nz {
                let at_res = res[j] - 2.0 * res[j + 1] + res[j + 2];
                let (p, q) = (dual.b - z[j], dual.b + z[j]);
                grad[j] = -at_res + mu * (1.0 / p - 1.0 / q);
                d0[j] = 6.0 + mu * (1.0 / (p * p) + 1.0 / (q * q));
            }
            for (i, &v) in bz.iter().enumerate() {
                let (p, q) = (dual.a - v, dual.a + v);
                let g = mu * (1.0 / p - 1.0 / q);
                wb[i] = mu * (1.0 / (p * p) + 1.0 / (q * q));
                // (B^T x)_j = x_{j+1} - x_j
                if i < nz {
                    grad[i] -= g;
                }
                if i >= 1 {
                    grad[i - 1] += g;
                }
            }
            for j in 0..nz {
                d0[j] += wb[j] + wb[j + 1];
            }
            for j in 0..nz.saturating_sub(1) {
                d1[j] = -4.0 - wb[j + 1];
            }
            for v in d2.iter_mut() {
                *v = 1.0;
            }
            for (d, g) in dz.iter_mut().zip(&grad) {
                *d = -g;
            }
            if !solve_pentadiagonal(&mut d0, &mut d1, &mut d2, &mut dz) {
                break;
            }
            let decrement: f64 = -grad.iter().zip(&dz).map(|(g, d)| g * d).sum::<f64>();
            if decrement <= 1e-28 * f_norm_sq {
                break;
            }
            diff::adjoint_1d(&dz, &mut bdz);
            let mut step = max_step(&z, &dz, dual.b, 1.0);
            step = max_step(&bz, &bdz, dual.a, step);
            let mut accepted = false;
            for _ in 0..60 {
                for ((t, v), d) in trial.iter_mut().zip(&z).zip(&dz) {
                    *t = v + step * d;
                }
                let phi_t = dual.barrier(&trial, mu, &mut res_t, &mut bz_t);
                // once the decrease drops below the rounding in phi, the
                // Armijo test is noise; take the damped Newton step
                let noise = 1e-14 * phi.abs();
                if phi_t <= phi - 0.25 * step * decrement
                    || (decrement <= noise && phi_t <= phi + noise)
                {
                    z.clone_from(&trial);
                    res.clone_from(&res_t);
                    bz.clone_from(&bz_t);
                    phi = phi_t;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted || decrement <= 1e-10 * mu {
                break;
            }
            if iterations >= options.max_iter {
                break;
            }
        }
        let (g, zero) = gap_of(&z, &mut res);
        last_gap = g;
        if g <= target {
            if zero {
                res.iter_mut().for_each(|v| *v = 0.0);
            }
            return Ok(Solution {
                u: res,
                iterations,
                residual: g / f_norm_sq,
            });
        }
        if iterations >= options.max_iter || mu < 1e-30 * f_norm_sq {
            break;
        }
        mu *= 0.125;
    }
    Err(Error::Solver {
        step: None,
        iterations,
        residual: last_gap / f_norm_sq,
    })
}
