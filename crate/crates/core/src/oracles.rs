//! Reference implementations that avoid the iterative machinery: closed
//! forms for the l1-analysis functional, eigenfunction certificates and a
//! brute-force prox for tiny problems.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flows::{Method, ScalePath};
use crate::functionals::{self, evaluate, FunctionalSpec, ProxWorkspace, SolverOptions, Transform};
use crate::grid::TimeGrid;
use crate::signal::Signal;

/// Path of the l1-analysis functional with orthonormal `V`, computed
/// coefficientwise: forward methods shrink `Vf` by `t / h^d`, the inverse
/// scale space switches coefficient `i` on once `s |(Vf)_i| h^d >= 1`.
///
/// `p` follows the conventions of the generic flows: difference quotients
/// for the gradient flow, `(f - u) / t` for the variational path, and the
/// continuous-time `q(s)` for the inverse scale space.
pub fn dct_closed_form_path(
    f: &Signal,
    transform: &Transform,
    method: Method,
    grid: &TimeGrid,
) -> Result<ScalePath> {
    let spec = FunctionalSpec::L1Analysis(transform.clone());
    spec.validate_for(f.shape())?;
    if grid.first() <= 0.0 {
        return Err(Error::param(
            "scale grids for flows must start at a positive node",
        ));
    }
    let shape = f.shape();
    let vol = f.cell_volume();
    let z = transform.forward(f.values(), shape);
    let to_signal = |c: &[f64]| f.like(transform.inverse(c, shape));

    let mut us = Vec::with_capacity(grid.len());
    let mut ps = Vec::with_capacity(grid.len());
    let mut extinction = None;
    match method {
        Method::GradientFlow | Method::Variational => {
            let mut prev = f.clone();
            for (k, &t) in grid.nodes().iter().enumerate() {
                let r = t / vol;
                let c: Vec<f64> = z
                    .iter()
                    .map(|&x| x.signum() * (x.abs() - r).max(0.0))
                    .collect();
                let u = if c.iter().all(|&x| x == 0.0) {
                    f.zeros_like()
                } else {
                    to_signal(&c)
                };
                if extinction.is_none() && u.max_abs() == 0.0 {
                    extinction = Some(k);
                }
                let p = match method {
                    Method::GradientFlow => prev.sub(&u)?.scaled(1.0 / grid.step_before(k)),
                    _ => f.sub(&u)?.scaled(1.0 / t),
                };
                prev = u.clone();
                us.push(u);
                ps.push(p);
            }
        }
        Method::InverseScaleSpace => {
            for &s in grid.nodes() {
                let mut v = vec![0.0; z.len()];
                let mut q = vec![0.0; z.len()];
                for i in 0..z.len() {
                    if s * z[i].abs() * vol >= 1.0 {
                        v[i] = z[i];
                        q[i] = z[i].signum() / vol;
                    } else {
                        q[i] = s * z[i];
                    }
                }
                us.push(to_signal(&v));
                ps.push(to_signal(&q));
            }
        }
    }
    ScalePath::from_parts(method, grid.clone(), us, ps, f.clone(), spec, extinction)
}

/// One peak of the exact spectrum of the l1-analysis functional: all
/// coefficients of magnitude `|z|` go extinct at `t = |z| h^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub t: f64,
    pub multiplicity: usize,
    /// Transform-domain L1 mass `multiplicity * |z|`.
    pub l1: f64,
    /// Height `sqrt(multiplicity) * |z|` of the energy response.
    pub energy: f64,
    /// `S^2` mass of the peak, `multiplicity * |z|^2 h^d`.
    pub energy_mass: f64,
}

/// Exact peak list for the l1-analysis functional, ordered by `t`.
/// Magnitudes equal to within `1e-12` relative are merged.
pub fn dct_spectrum(f: &Signal, transform: &Transform) -> Result<Vec<Peak>> {
    FunctionalSpec::L1Analysis(transform.clone()).validate_for(f.shape())?;
    let vol = f.cell_volume();
    let mut mags: Vec<f64> = transform
        .forward(f.values(), f.shape())
        .into_iter()
        .map(f64::abs)
        .filter(|&m| m > 0.0)
        .collect();
    mags.sort_unstable_by(f64::total_cmp);
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for m in mags {
        match groups.last_mut() {
            Some((g, count)) if (m - *g).abs() <= 1e-12 * m => *count += 1,
            _ => groups.push((m, 1)),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(m, count)| Peak {
            t: m * vol,
            multiplicity: count,
            l1: count as f64 * m,
            energy: crate::math::sqrt(count as f64) * m,
            energy_mass: count as f64 * m * m * vol,
        })
        .collect())
}

/// Evidence that `f` behaves as an eigenfunction: the prox at several
/// scales must equal `(1 - lambda t)+ f`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenpairCertificate {
    pub f: Signal,
    pub lambda: f64,
    pub residual: f64,
    pub tol: f64,
    pub accepted: bool,
}

/// `lambda = J(f) / ||f||^2` and the largest relative deviation of
/// `prox(f, tau)` from `(1 - lambda tau) f` over `tau in {0.1, 0.5, 0.9} / lambda`.
pub fn verify_eigenfunction(
    spec: &FunctionalSpec,
    f: &Signal,
    tol: f64,
) -> Result<EigenpairCertificate> {
    let norm_sq = f.norm_sq();
    if norm_sq == 0.0 {
        return Err(Error::param("the zero signal is not an eigenfunction"));
    }
    let lambda = evaluate(spec, f)? / norm_sq;
    if lambda <= 0.0 {
        return Err(Error::param("f lies in the nullspace of J"));
    }
    let options = SolverOptions {
        tol: 1e-12,
        max_iter: 200_000,
        check_every: 10,
    };
    let mut residual = 0.0f64;
    for frac in [0.1, 0.5, 0.9] {
        let tau = frac / lambda;
        let r = functionals::prox_with(spec, f, tau, &options, &mut ProxWorkspace::default())?;
        let expected = f.scaled(1.0 - frac);
        residual = residual.max(r.u.sub(&expected)?.norm() / f.norm());
    }
    Ok(EigenpairCertificate {
        f: f.clone(),
        lambda,
        residual,
        tol,
        accepted: residual <= tol,
    })
}

/// The zero-mean step `[1, .., 1, -1, .., -1]` of even length `n >= 4` as a
/// certified TV eigenfunction; `lambda = 2 / (n h)`.
pub fn make_tv_eigenfunction(n: usize, spacing: f64) -> Result<EigenpairCertificate> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::param(
            "TV eigenfunction length must be even and at least 4",
        ));
    }
    let values = (0..n).map(|i| if i < n / 2 { 1.0 } else { -1.0 }).collect();
    let f = Signal::new_1d(values)?.with_spacing(spacing)?;
    let tol = 1e-10;
    let cert = verify_eigenfunction(&FunctionalSpec::Tv1d, &f, tol)?;
    if !cert.accepted {
        return Err(Error::Certification {
            residual: cert.residual,
            tol,
        });
    }
    Ok(cert)
}

/// Minimizes `1/2 ||u - f||^2 + t J(u)` by lattice search: each round
/// evaluates a `9^d` lattice spanning a box around the current point, moves
/// to the best lattice point (shrinking the box slightly) or halves the box
/// when the center is already best, until `rounds` halvings. Starts are `f`,
/// zero and the mean of `f`. Only for signals of at most four samples.
///
/// The lattice axes are the sample axes, except for the l1-analysis
/// functional where they are the transform atoms: the kinks of `J` then lie
/// along lattice directions, which a grid search needs to approach a kinked
/// minimizer closely.
pub fn bruteforce_prox(spec: &FunctionalSpec, f: &Signal, t: f64, rounds: usize) -> Result<Signal> {
    let d = f.len();
    if d > 4 {
        return Err(Error::param("brute-force prox is limited to four samples"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("prox step t must be nonnegative"));
    }
    spec.validate_for(f.shape())?;
    if t == 0.0 || d == 0 {
        return Ok(f.clone());
    }
    let shape = f.shape();
    let fv = f.values();
    let weight = t * spec.scale(f) / f.cell_volume();
    let objective = |u: &[f64]| {
        let fid: f64 = u.iter().zip(fv).map(|(a, b)| (a - b) * (a - b)).sum();
        0.5 * fid + weight * functionals::raw_value(spec, u, shape)
    };
    let frame: Vec<Vec<f64>> = (0..d)
        .map(|a| {
            let mut e = vec![0.0; d];
            e[a] = 1.0;
            match spec {
                FunctionalSpec::L1Analysis(tr) => tr.inverse(&e, shape),
                _ => e,
            }
        })
        .collect();

    // nonexpansive prox with prox(0) = 0 keeps u inside the ball of radius ||f||
    let radius = crate::math::norm(fv).max(1e-300);
    let mean = fv.iter().sum::<f64>() / d as f64;
    let starts = [fv.to_vec(), vec![0.0; d], vec![mean; d]];
    const POINTS: usize = 9;
    let total = POINTS.pow(d as u32);

    let mut best_u = fv.to_vec();
    let mut best_val = objective(fv);
    let mut probe = vec![0.0; d];
    let mut offset = vec![0.0; d];
    for start in starts {
        let mut center = start;
        let mut center_val = objective(&center);
        let mut half = radius;
        let mut halvings = 0;
        let mut budget = 8 * rounds;
        while halvings < rounds && budget > 0 {
            budget -= 1;
            let step = 2.0 * half / (POINTS - 1) as f64;
            let mut round_best = center.clone();
            let mut round_val = center_val;
            for idx in 0..total {
                let mut rest = idx;
                for o in offset.iter_mut() {
                    *o = (rest % POINTS) as f64 * step - half;
                    rest /= POINTS;
                }
                for (j, x) in probe.iter_mut().enumerate() {
                    *x = center[j] + (0..d).map(|a| frame[a][j] * offset[a]).sum::<f64>();
                }
                let val = objective(&probe);
                if val < round_val {
                    round_val = val;
                    round_best.copy_from_slice(&probe);
                }
            }
            if round_val < center_val {
                center = round_best;
                center_val = round_val;
                half *= 0.8;
            } else {
                half *= 0.5;
                halvings += 1;
            }
        }
        if center_val < best_val {
            best_val = center_val;
            best_u = center;
        }
    }
    Ok(f.like(best_u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridKind;

    fn sig(v: &[f64]) -> Signal {
        Signal::new_1d(v.to_vec()).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let f = sig(&[3.0, 1.0, 0.5]);
        let grid = TimeGrid::from_nodes(vec![0.4, 2.0], GridKind::Custom).unwrap();
        let vm =
            dct_closed_form_path(&f, &Transform::Identity, Method::Variational, &grid).unwrap();
        assert_eq!(vm.u()[1].values(), &[1.0, 0.0, 0.0]);
        let is = dct_closed_form_path(&f, &Transform::Identity, Method::InverseScaleSpace, &grid)
            .unwrap();
        assert_eq!(is.u()[0].values(), &[3.0, 0.0, 0.0]);
        let zero = dct_closed_form_path(
            &sig(&[0.0; 3]),
            &Transform::Dct,
            Method::GradientFlow,
            &grid,
        )
        .unwrap();
        assert!(zero.u().iter().all(|u| u.max_abs() == 0.0));
    }

    #[test]
    fn spectrum_peaks() {
        let peaks = dct_spectrum(&sig(&[3.0, 1.0, 0.5]), &Transform::Identity).unwrap();
        let ts: Vec<f64> = peaks.iter().map(|p| p.t).collect();
        assert_eq!(ts, vec![0.5, 1.0, 3.0]);
        assert!(peaks.iter().all(|p| p.energy == p.t && p.multiplicity == 1));
        let peaks = dct_spectrum(&sig(&[2.0, -2.0, 1.0]), &Transform::Identity).unwrap();
        assert_eq!(peaks[1].multiplicity, 2);
        assert!((peaks[1].energy - 2.0 * crate::math::sqrt(2.0)).abs() < 1e-15);
        assert!(dct_spectrum(&sig(&[0.0; 4]), &Transform::Dct)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn tv_eigenfunctions() {
        assert_eq!(make_tv_eigenfunction(4, 1.0).unwrap().lambda, 0.5);
        assert_eq!(make_tv_eigenfunction(8, 1.0).unwrap().lambda, 0.25);
        assert!(make_tv_eigenfunction(3, 1.0).is_err());
        assert!(make_tv_eigenfunction(6, 1.0).unwrap().residual <= 1e-12);
    }

    #[test]
    fn generic_signal_is_rejected() {
        let f = sig(&[0.3, -1.2, 0.7, 0.1, -0.4, 0.5]);
        let cert = verify_eigenfunction(&FunctionalSpec::Tv1d, &f, 1e-6).unwrap();
        assert!(!cert.accepted);
        assert!(cert.residual > 1e-3);
    }

    #[test]
    fn single_transform_atom_is_an_eigenfunction() {
        let mut z = vec![0.0; 6];
        z[2] = -1.7;
        let f = sig(&Transform::Dct.inverse(&z, crate::signal::Shape::D1(6)));
        let cert =
            verify_eigenfunction(&FunctionalSpec::L1Analysis(Transform::Dct), &f, 1e-10).unwrap();
        assert!(cert.accepted, "{cert:?}");
        assert!((cert.lambda - 1.0 / 1.7).abs() < 1e-12);
    }

    #[test]
    fn bruteforce_trivial_cases() {
        let f = sig(&[1.0, -2.0, 0.5]);
        assert_eq!(
            bruteforce_prox(&FunctionalSpec::Tv1d, &f, 0.0, 10).unwrap(),
            f
        );
        let zero = sig(&[0.0; 3]);
        assert_eq!(
            bruteforce_prox(&FunctionalSpec::Tv1d, &zero, 1.0, 10).unwrap(),
            zero
        );
        assert!(bruteforce_prox(&FunctionalSpec::Tv1d, &sig(&[0.0; 5]), 1.0, 10).is_err());
    }

    #[test]
    fn bruteforce_finds_step_shrinkage() {
        let f = sig(&[1.0, 1.0, -1.0, -1.0]);
        let u = bruteforce_prox(&FunctionalSpec::Tv1d, &f, 0.5, 30).unwrap();
        assert!(u.max_abs_diff(&f.scaled(0.75)).unwrap() < 1e-4);
    }
}
