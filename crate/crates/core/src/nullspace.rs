//! Splitting off the nullspace of `J`.
//!
//! The decompositions act on the part of `f` orthogonal to `ker J`; the
//! removed component is carried along separately and added back on
//! reconstruction. For TV-type functionals the nullspace is the constants,
//! for 1D TGV-2 the affine functions, for the gradient-collaborative norm the
//! columnwise constants, and it is trivial for the l1-analysis and
//! collaborative norms.

use alloc::vec::Vec;

use crate::error::Result;
use crate::functionals::FunctionalSpec;
use crate::signal::{Shape, Signal};

/// Returns `(f0, n0)` with `f = f0 + n0`, `n0` in the nullspace of `J` and
/// `f0` orthogonal to it.
pub fn remove_nullspace(f: &Signal, spec: &FunctionalSpec) -> Result<(Signal, Signal)> {
    spec.validate_for(f.shape())?;
    let n0 = match spec {
        FunctionalSpec::L1Analysis(_) | FunctionalSpec::CollabLinf1 => f.zeros_like(),
        FunctionalSpec::Tv1d | FunctionalSpec::Tv2dAniso | FunctionalSpec::Tv2dIso => {
            let m = f.mean();
            f.map(|_| m)
        }
        FunctionalSpec::Tgv2 { .. } => f.like(affine_fit(f.values())),
        FunctionalSpec::GradCollabLinf1 => match f.shape() {
            Shape::D1(_) => {
                let m = f.mean();
                f.map(|_| m)
            }
            Shape::D2 { rows, cols } => {
                let v = f.values();
                let means: Vec<f64> = (0..cols)
                    .map(|j| (0..rows).map(|i| v[i * cols + j]).sum::<f64>() / rows as f64)
                    .collect();
                f.like((0..rows * cols).map(|k| means[k % cols]).collect())
            }
        },
    };
    let f0 = f.sub(&n0)?;
    Ok((f0, n0))
}

/// Least-squares line through `(i, v_i)`, evaluated on the grid.
fn affine_fit(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return alloc::vec![mean];
    }
    let center = (n - 1) as f64 / 2.0;
    let sxx: f64 = (0..n)
        .map(|i| (i as f64 - center) * (i as f64 - center))
        .sum();
    let sxy: f64 = v
        .iter()
        .enumerate()
        .map(|(i, y)| (i as f64 - center) * (y - mean))
        .sum();
    let slope = sxy / sxx;
    (0..n).map(|i| mean + slope * (i as f64 - center)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{evaluate, Transform};
    use alloc::vec;

    fn sig(v: &[f64]) -> Signal {
        Signal::new_1d(v.to_vec()).unwrap()
    }

    #[test]
    fn constant_is_tv_nullspace() {
        let (f0, n0) = remove_nullspace(&sig(&[2.0, 2.0, 2.0]), &FunctionalSpec::Tv1d).unwrap();
        assert_eq!(f0.values(), &[0.0; 3]);
        assert_eq!(n0.values(), &[2.0; 3]);
    }

    #[test]
    fn zero_mean_input_is_untouched() {
        let f = sig(&[3.0, 1.0, -1.0, -3.0]);
        let (f0, n0) = remove_nullspace(&f, &FunctionalSpec::Tv1d).unwrap();
        assert_eq!(f0, f);
        assert_eq!(n0.values(), &[0.0; 4]);
    }

    #[test]
    fn l1_analysis_has_trivial_nullspace() {
        let f = sig(&[1.0, 2.0, 3.0]);
        let (f0, n0) = remove_nullspace(&f, &FunctionalSpec::L1Analysis(Transform::Dct)).unwrap();
        assert_eq!(f0, f);
        assert_eq!(n0.values(), &[0.0; 3]);
    }

    #[test]
    fn tgv_removes_affine_part() {
        let f = sig(&[1.0, 2.5, 2.0, 7.0, 5.5]);
        let spec = FunctionalSpec::Tgv2 { beta: 0.2 };
        let (f0, n0) = remove_nullspace(&f, &spec).unwrap();
        assert!(evaluate(&spec, &n0).unwrap().abs() < 1e-12);
        assert!((evaluate(&spec, &f0).unwrap() - evaluate(&spec, &f).unwrap()).abs() < 1e-12);
        assert!(f0.dot(&n0).unwrap().abs() < 1e-12);
        let ramp: Vec<f64> = (0..5).map(|i| i as f64).collect();
        assert!(f0.dot(&sig(&ramp)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn columnwise_means_for_gradient_collaborative() {
        let f = Signal::new_2d(2, 2, vec![1.0, 5.0, 3.0, 7.0]).unwrap();
        let (f0, n0) = remove_nullspace(&f, &FunctionalSpec::GradCollabLinf1).unwrap();
        assert_eq!(n0.values(), &[2.0, 6.0, 2.0, 6.0]);
        assert_eq!(f0.values(), &[-1.0, -1.0, 1.0, 1.0]);
    }
}
