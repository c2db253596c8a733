//! Seeded synthetic signals for the demonstration scenarios and tests.
//!
//! Every generator draws from a ChaCha stream seeded by the caller, so equal
//! seeds give bit-identical data on every platform.

use nlspec_core::{Signal, Transform};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{CliError, CliResult};

/// A clean signal and its noisy observation.
#[derive(Debug, Clone)]
pub struct Sample {
    pub clean: Signal,
    pub noisy: Signal,
    /// Standard deviation of the added noise.
    pub sigma: f64,
}

/// Named generators exposed by `nlspec gen`.
pub const KINDS: [&str; 6] = [
    "step",
    "random",
    "pwlinear",
    "sinusoids",
    "collab-peaks",
    "collab-jumps",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn add_noise(clean: &[f64], sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if sigma == 0.0 {
        return clean.to_vec();
    }
    let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
    clean.iter().map(|v| v + normal.sample(rng)).collect()
}

fn one_d(v: Vec<f64>) -> Signal {
    Signal::new_1d(v).expect("generated values are finite")
}

fn two_d(rows: usize, cols: usize, v: Vec<f64>) -> Signal {
    Signal::new_2d(rows, cols, v).expect("generated values are finite")
}

/// `+height` on the first half, `-height` on the second.
pub fn step(n: usize, height: f64) -> CliResult<Signal> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(CliError::input("step signals need an even length >= 2"));
    }
    Ok(one_d(
        (0..n)
            .map(|i| if i < n / 2 { height } else { -height })
            .collect(),
    ))
}

/// Independent uniform samples on `[-1, 1]`.
pub fn random(n: usize, seed: u64) -> Signal {
    let mut r = rng(seed);
    one_d((0..n).map(|_| r.gen_range(-1.0..1.0)).collect())
}

/// Piecewise linear signal on `[0, 1]` with jumps, ramps and two narrow
/// peaks, observed with Gaussian noise of `noise` times its range.
pub fn piecewise_linear(n: usize, noise: f64, seed: u64) -> CliResult<Sample> {
    if n < 32 {
        return Err(CliError::input("piecewise linear signals need n >= 32"));
    }
    let mut r = rng(seed);
    let x = |i: usize| (i as f64 + 0.5) / n as f64;
    let clean: Vec<f64> = (0..n)
        .map(|i| {
            let x = x(i);
            let base = if x < 0.2 {
                0.2
            } else if x < 0.45 {
                0.3 + 1.6 * (x - 0.2)
            } else if x < 0.7 {
                0.9 - 0.8 * (x - 0.45)
            } else {
                0.1
            };
            let peak = |c: f64, w: f64| (1.0 - (x - c).abs() / w).max(0.0);
            base + 0.5 * peak(0.8, 0.03) + 0.4 * peak(0.9, 0.02)
        })
        .collect();
    let (lo, hi) = clean
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let sigma = noise * (hi - lo);
    let noisy = add_noise(&clean, sigma, &mut r);
    Ok(Sample {
        clean: one_d(clean),
        noisy: one_d(noisy),
        sigma,
    })
}

/// Sum of cosine atoms with coefficients `amplitudes` at DCT indices
/// `freqs`, plus white noise of standard deviation `sigma`. The atoms are
/// orthonormal, so the noisy coefficients are the amplitudes plus
/// `N(0, sigma^2)` perturbations.
pub fn sinusoid_mixture(
    n: usize,
    freqs: &[usize],
    amplitudes: &[f64],
    sigma: f64,
    seed: u64,
) -> CliResult<Sample> {
    if freqs.len() != amplitudes.len() || freqs.iter().any(|&k| k >= n) {
        return Err(CliError::input(
            "each frequency needs an amplitude and must be below n",
        ));
    }
    let mut z = vec![0.0; n];
    for (&k, &a) in freqs.iter().zip(amplitudes) {
        z[k] += a;
    }
    let clean = Transform::Dct.inverse(&z, nlspec_core::Shape::D1(n));
    let mut r = rng(seed);
    let noisy = add_noise(&clean, sigma, &mut r);
    Ok(Sample {
        clean: one_d(clean),
        noisy: one_d(noisy),
        sigma,
    })
}

/// `signals` sparse columns of length `n` that share `common` support rows
/// (amplitudes in `[0.5, 1.5]` with random signs), each with `extra`
/// individual peaks of amplitude at most `0.3` elsewhere. Returns the array
/// and the common support rows in increasing order.
pub fn collab_peaks(
    n: usize,
    signals: usize,
    common: usize,
    extra: usize,
    seed: u64,
) -> CliResult<(Signal, Vec<usize>)> {
    if signals == 0 || common + extra > n {
        return Err(CliError::input(
            "collaborative peaks need common + extra <= n",
        ));
    }
    let mut r = rng(seed);
    let mut support: Vec<usize> = sample(&mut r, n, common).into_vec();
    support.sort_unstable();
    let others: Vec<usize> = (0..n)
        .filter(|i| support.binary_search(i).is_err())
        .collect();
    let mut v = vec![0.0; n * signals];
    for j in 0..signals {
        for &i in &support {
            let sign = if r.gen::<bool>() { 1.0 } else { -1.0 };
            v[i * signals + j] = sign * r.gen_range(0.5..1.5);
        }
        for k in sample(&mut r, others.len(), extra).into_iter() {
            let sign = if r.gen::<bool>() { 1.0 } else { -1.0 };
            v[others[k] * signals + j] = sign * r.gen_range(0.1..0.3);
        }
    }
    Ok((two_d(n, signals, v), support))
}

/// `signals` piecewise constant columns of length `n` that all jump at one
/// shared row (height in `[1, 2]`, random sign) and carry `extra` small
/// individual jumps (height at most `0.2`). Returns the array and the
/// shared jump row `r`, meaning the jump sits between rows `r - 1` and `r`.
pub fn collab_jumps(
    n: usize,
    signals: usize,
    extra: usize,
    seed: u64,
) -> CliResult<(Signal, usize)> {
    if n < 8 || signals == 0 || extra + 1 >= n {
        return Err(CliError::input(
            "collaborative jumps need n >= 8 and extra + 1 < n",
        ));
    }
    let mut r = rng(seed);
    let shared = r.gen_range(n / 4..3 * n / 4);
    let mut v = vec![0.0; n * signals];
    for j in 0..signals {
        let mut jumps = vec![0.0; n];
        let sign = if r.gen::<bool>() { 1.0 } else { -1.0 };
        jumps[shared] = sign * r.gen_range(1.0..2.0);
        let candidates: Vec<usize> = (1..n).filter(|&i| i != shared).collect();
        for k in sample(&mut r, candidates.len(), extra).into_iter() {
            let sign = if r.gen::<bool>() { 1.0 } else { -1.0 };
            jumps[candidates[k]] = sign * r.gen_range(0.05..0.2);
        }
        let mut level = 0.0;
        for i in 0..n {
            level += jumps[i];
            v[i * signals + j] = level;
        }
    }
    Ok((two_d(n, signals, v), shared))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = piecewise_linear(128, 0.1, 3).unwrap();
        let b = piecewise_linear(128, 0.1, 3).unwrap();
        assert_eq!(a.noisy, b.noisy);
        assert_ne!(a.noisy, piecewise_linear(128, 0.1, 4).unwrap().noisy);
        assert_eq!(random(16, 9), random(16, 9));
    }

    #[test]
    fn sinusoid_coefficients_are_the_amplitudes() {
        let s = sinusoid_mixture(64, &[3, 10], &[2.0, -1.0], 0.0, 1).unwrap();
        let z = Transform::Dct.forward(s.clean.values(), s.clean.shape());
        assert!((z[3] - 2.0).abs() < 1e-12 && (z[10] + 1.0).abs() < 1e-12);
        assert!(z.iter().map(|v| v.abs()).sum::<f64>() - 3.0 < 1e-11);
    }

    #[test]
    fn collaborative_peaks_share_exactly_the_common_rows() {
        let (a, support) = collab_peaks(50, 6, 5, 2, 2).unwrap();
        assert_eq!(support.len(), 5);
        let v = a.values();
        for &i in &support {
            assert!((0..6).all(|j| v[i * 6 + j].abs() >= 0.5));
        }
        let small = v.iter().filter(|x| x.abs() > 0.0 && x.abs() < 0.5).count();
        assert_eq!(small, 12);
    }

    #[test]
    fn collaborative_jumps_share_one_row() {
        let (a, shared) = collab_jumps(40, 4, 3, 5).unwrap();
        let v = a.values();
        for j in 0..4 {
            let d = v[shared * 4 + j] - v[(shared - 1) * 4 + j];
            assert!(d.abs() >= 1.0);
        }
    }

    #[test]
    fn invalid_requests_are_rejected() {
        assert!(step(5, 1.0).is_err());
        assert!(sinusoid_mixture(8, &[9], &[1.0], 0.0, 0).is_err());
        assert!(collab_peaks(4, 2, 3, 2, 0).is_err());
    }
}
