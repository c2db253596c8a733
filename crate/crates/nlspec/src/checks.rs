//! Self checks shared by `nlspec verify` and the acceptance suite.

use nlspec_core::oracles::{dct_closed_form_path, make_tv_eigenfunction};
use nlspec_core::{
    decompose, make_time_grid, orthogonality_report, parseval_report, reconstruct, run_path,
    FlowOptions, FunctionalSpec, GridKind, Method, Representation, Signal, SpectralDecomposition,
    Transform,
};
use serde::Serialize;

use crate::error::CliResult;

/// One named check with its measured value and threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// Whether `value` must stay at or below (`true`) or reach (`false`)
    /// the threshold.
    pub upper: bool,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            upper: true,
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            upper: false,
            passed: value >= threshold,
        }
    }

    pub fn line(&self) -> String {
        let op = if self.upper { "<=" } else { ">=" };
        format!(
            "{} {}: {:.3e} {op} {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold
        )
    }
}

/// Share of the total band L1 mass carried by the band whose bin contains
/// `target` and its two neighbours. Zero if no bin contains `target`.
pub fn purity(dec: &SpectralDecomposition, target: f64, rep: Representation) -> f64 {
    let bands = dec.bands();
    let total: f64 = bands.iter().map(|b| b.atom.norm_l1()).sum();
    let Some(idx) = bands.iter().position(|b| {
        let bin = b.bin(rep);
        bin.lo <= target && target <= bin.hi
    }) else {
        return 0.0;
    };
    if total == 0.0 {
        return 0.0;
    }
    let near: f64 = bands[idx.saturating_sub(1)..(idx + 2).min(bands.len())]
        .iter()
        .map(|b| b.atom.norm_l1())
        .sum();
    near / total
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::GradientFlow => "gf",
        Method::Variational => "vm",
        Method::InverseScaleSpace => "iss",
    }
}

/// Relative reconstruction error `||sum bands + tail + null - f|| / ||f||`
/// (absolute for `f = 0`).
pub fn reconstruction_error(dec: &SpectralDecomposition, f: &Signal) -> f64 {
    let diff = reconstruct(dec)
        .sub(f)
        .expect("decomposition matches its input")
        .norm();
    let norm = f.norm();
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}

/// Decomposes the certified TV step of length `n` with every method:
/// forward grids run uniformly to `1.5 / lambda`, the inverse grid to
/// `s = 3 lambda`, each with `steps` nodes. Checks reconstruction, band
/// purity at the eigenvalue, both Parseval identities and orthogonality.
pub fn eigenfunction_suite(n: usize, steps: usize, tol: f64) -> CliResult<Vec<Check>> {
    let cert = make_tv_eigenfunction(n, 1.0)?;
    let lambda = cert.lambda;
    let options = FlowOptions::with_tol(tol);
    let mut checks = Vec::new();
    let t_max = 1.5 / lambda;
    let forward = make_time_grid(GridKind::Uniform, t_max / steps as f64, t_max, steps)?;
    let s_max = 3.0 * lambda;
    let inverse = make_time_grid(GridKind::Uniform, s_max / steps as f64, s_max, steps)?;
    for method in [
        Method::GradientFlow,
        Method::Variational,
        Method::InverseScaleSpace,
    ] {
        let name = method_name(method);
        let grid = if method == Method::InverseScaleSpace {
            &inverse
        } else {
            &forward
        };
        let (path, dec) = decompose(&cert.f, &FunctionalSpec::Tv1d, method, grid, &options)?;
        checks.push(Check::at_most(
            format!("reconstruction_{name}"),
            reconstruction_error(&dec, &cert.f),
            1e-10,
        ));
        let (target, rep) = match method {
            Method::InverseScaleSpace => (lambda, Representation::Frequency),
            _ => (1.0 / lambda, Representation::Wavelength),
        };
        checks.push(Check::at_least(
            format!("purity_{name}"),
            purity(&dec, target, rep),
            0.95,
        ));
        if method == Method::GradientFlow {
            let p = parseval_report(path.f(), &path)?;
            checks.push(Check::at_most(
                "parseval_dissipation",
                p.dissipation_error,
                0.02,
            ));
            checks.push(Check::at_most("parseval_energy", p.energy_error, 0.05));
            let o = orthogonality_report(&path, &dec)?;
            checks.push(Check::at_most("orthogonality", o.max_ratio, 0.05));
        }
    }
    Ok(checks)
}

/// Generic solvers against the closed-form l1-DCT paths on a seeded
/// signal of length `n`, for both forward methods.
pub fn l1_closed_form_checks(f: &Signal, steps: usize, tol: f64) -> CliResult<Vec<Check>> {
    let spec = FunctionalSpec::L1Analysis(Transform::Dct);
    let z = Transform::Dct.forward(f.values(), f.shape());
    let z_max = z.iter().fold(0.0f64, |m, v| m.max(v.abs())) * f.cell_volume();
    let t_max = 1.5 * z_max.max(f64::MIN_POSITIVE);
    let grid = make_time_grid(GridKind::Uniform, t_max / steps as f64, t_max, steps)?;
    let mut checks = Vec::new();
    for method in [Method::GradientFlow, Method::Variational] {
        let generic = run_path(method, f, &spec, &grid, &FlowOptions::with_tol(tol))?;
        let exact = dct_closed_form_path(f, &Transform::Dct, method, &grid)?;
        let err = generic
            .u()
            .iter()
            .zip(exact.u())
            .map(|(a, b)| a.max_abs_diff(b).expect("same shape"))
            .fold(0.0, f64::max);
        checks.push(Check::at_most(
            format!("l1_closed_form_{}", method_name(method)),
            err,
            1e-8,
        ));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_eigenfunction_suite_passes() {
        let checks = eigenfunction_suite(16, 120, 1e-10).unwrap();
        for c in &checks {
            assert!(c.passed, "{}", c.line());
        }
        assert_eq!(checks.len(), 9);
    }

    #[test]
    fn check_lines() {
        assert!(Check::at_most("x", 1.0, 2.0).line().starts_with("PASS x"));
        assert!(Check::at_least("y", 1.0, 2.0).line().starts_with("FAIL y"));
    }
}
