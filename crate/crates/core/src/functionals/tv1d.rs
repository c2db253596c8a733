//! Exact 1D total variation denoising,
//! `argmin_u 1/2 sum (u_i - f_i)^2 + lambda sum |u_{i+1} - u_i|`.
//!
//! Condat's direct algorithm: it walks the taut string tube `[F - lambda,
//! F + lambda]` around the cumulative sum of `f` and emits one segment at a
//! time, so the result is exact up to rounding and runs in `O(n)` on typical
//! data.

use alloc::vec;
use alloc::vec::Vec;

pub(crate) fn denoise(input: &[f64], lambda: f64) -> Vec<f64> {
    let width = input.len();
    if width == 0 {
        return Vec::new();
    }
    if lambda <= 0.0 || width == 1 || input.iter().all(|&v| v == input[0]) {
        return input.to_vec();
    }
    let mut output = vec![0.0; width];
    let (mut k, mut k0) = (0usize, 0usize);
    let (mut kplus, mut kminus) = (0usize, 0usize);
    let mut umin = lambda;
    let mut umax = -lambda;
    let mut vmin = input[0] - lambda;
    let mut vmax = input[0] + lambda;
    let twolambda = 2.0 * lambda;
    let minlambda = -lambda;

    loop {
        while k == width - 1 {
            if umin < 0.0 {
                // the segment must jump down
                fill(&mut output, &mut k0, kminus, vmin);
                k = k0;
                kminus = k0;
                vmin = input[k0];
                umin = lambda;
                umax = vmin + umin - vmax;
            } else if umax > 0.0 {
                fill(&mut output, &mut k0, kplus, vmax);
                k = k0;
                kplus = k0;
                vmax = input[k0];
                umax = minlambda;
                umin = vmax + umax - vmin;
            } else {
                vmin += umin / (k - k0 + 1) as f64;
                fill(&mut output, &mut k0, k, vmin);
                return output;
            }
        }
        umin += input[k + 1] - vmin;
        if umin < minlambda {
            fill(&mut output, &mut k0, kminus, vmin);
            k = k0;
            kminus = k0;
            kplus = k0;
            vmin = input[k0];
            vmax = vmin + twolambda;
            umin = lambda;
            umax = minlambda;
            continue;
        }
        umax += input[k + 1] - vmax;
        if umax > lambda {
            fill(&mut output, &mut k0, kplus, vmax);
            k = k0;
            kminus = k0;
            kplus = k0;
            vmax = input[k0];
            vmin = vmax - twolambda;
            umin = lambda;
            umax = minlambda;
        } else {
            k += 1;
            if umin >= lambda {
                kminus = k;
                vmin += (umin - lambda) / (k - k0 + 1) as f64;
                umin = lambda;
            }
            if umax <= minlambda {
                kplus = k;
                vmax += (umax + lambda) / (k - k0 + 1) as f64;
                umax = minlambda;
            }
        }
    }
}

/// Writes `value` to `output[*k0..=last]` and advances `k0` past it.
#[inline]
fn fill(output: &mut [f64], k0: &mut usize, last: usize, value: f64) {
    loop {
        output[*k0] = value;
        *k0 += 1;
        if *k0 > last {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Optimality certificate: with `r = f - u` and running sums `c_i`,
    /// `|c_i| <= lambda`, `c_{n-1} = 0`, and `c_i = -lambda * sign(u_{i+1} - u_i)`
    /// wherever `u` jumps.
    fn kkt_violation(f: &[f64], u: &[f64], lambda: f64) -> f64 {
        let mut c = 0.0;
        let mut worst: f64 = 0.0;
        for i in 0..f.len() {
            c += f[i] - u[i];
            if i + 1 == f.len() {
                worst = worst.max(c.abs());
            } else {
                worst = worst.max(c.abs() - lambda);
                let jump = u[i + 1] - u[i];
                if jump.abs() > 1e-12 {
                    worst = worst.max((c + lambda * jump.signum()).abs());
                }
            }
        }
        worst
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn step_eigenfunction_shrinks_linearly() {
        let f = [1.0, 1.0, -1.0, -1.0];
        let u = denoise(&f, 0.5);
        for (a, b) in u.iter().zip(&f) {
            assert!((a - 0.75 * b).abs() < 1e-15);
        }
        assert_eq!(denoise(&f, 2.0), vec![0.0; 4]);
        assert_eq!(denoise(&f, 5.0), vec![0.0; 4]);
    }

    #[test]
    fn satisfies_optimality_on_random_inputs() {
        let mut seed = 17;
        for trial in 0..400 {
            let n = 1 + trial % 40;
            let f: alloc::vec::Vec<f64> = (0..n).map(|_| 3.0 * lcg(&mut seed)).collect();
            let lambda = 0.01 + 2.0 * (lcg(&mut seed) + 1.0);
            let u = denoise(&f, lambda);
            let v = kkt_violation(&f, &u, lambda);
            assert!(v < 1e-10, "trial {trial}: violation {v}");
        }
    }

    #[test]
    fn constant_and_tiny_inputs() {
        assert_eq!(denoise(&[3.0], 1.0), vec![3.0]);
        assert_eq!(denoise(&[2.0, 2.0, 2.0], 1.0), vec![2.0; 3]);
        let u = denoise(&[0.0, 1.0], 0.25);
        assert!((u[0] - 0.25).abs() < 1e-15 && (u[1] - 0.75).abs() < 1e-15);
    }
}
