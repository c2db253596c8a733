//! Identity-based diagnostics for gradient-flow decompositions.

use alloc::vec::Vec;

use super::{spectrum_energy, to_wavelength, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::flows::{Method, ScalePath};
use crate::functionals::evaluate;
use crate::signal::Signal;

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    /// `|<atom_k, u_k>| / (||atom_k|| ||u_k|| + eps)` per band.
    pub ratios: Vec<f64>,
    /// Largest ratio over all bands except the one at the last nonzero
    /// state before extinction.
    pub max_ratio: f64,
    /// Band index attaining `max_ratio`.
    pub worst: Option<usize>,
    /// Ratio of the band right before extinction, if the path went extinct
    /// after a nonzero state.
    pub extinction_ratio: Option<f64>,
}

/// Compares each band atom with the flow state at its node. In continuous
/// time they are orthogonal; on a grid the defect is first order in the step.
/// `eps = 1e-8 ||f||^2` keeps vanishing bands and extinct states at ratio 0.
///
/// The band at the last nonzero node is kept out of `max_ratio`: unless the
/// extinction time is a grid node, the interpolant places part of the final
/// atom there, parallel to `u_k`. In continuous time that atom sits where
/// `u = 0`, so this is a sampling effect that does not shrink with the step.
pub fn orthogonality_report(
    path: &ScalePath,
    dec: &SpectralDecomposition,
) -> Result<OrthogonalityReport> {
    if path.method() != Method::GradientFlow {
        return Err(Error::param("orthogonality is checked on gradient flows"));
    }
    let dec = to_wavelength(dec);
    if dec.len() + 1 != path.len() {
        return Err(Error::param("decomposition does not belong to this path"));
    }
    let eps = 1e-8 * path.f().norm_sq();
    let mut ratios = Vec::with_capacity(dec.len());
    for (band, u) in dec.bands().iter().zip(path.u()) {
        let num = band.atom.dot(u)?.abs();
        let den = band.atom.norm() * u.norm() + eps;
        ratios.push(if num == 0.0 { 0.0 } else { num / den });
    }
    let skip = match path.extinction_index() {
        Some(e) if e > 0 => Some(e - 1),
        _ => None,
    };
    let mut worst = None;
    let mut max_ratio = 0.0;
    for (i, &r) in ratios.iter().enumerate() {
        if Some(i) != skip && r > max_ratio {
            max_ratio = r;
            worst = Some(i);
        }
    }
    Ok(OrthogonalityReport {
        extinction_ratio: skip.map(|i| ratios[i]),
        ratios,
        max_ratio,
        worst,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsevalReport {
    pub norm_sq: f64,
    /// Trapezoidal `2 int J(u(t)) dt` from `t = 0` (where `u = f`).
    pub dissipation: f64,
    /// Total mass of `S^2` from the energy spectrum.
    pub energy: f64,
    pub dissipation_error: f64,
    pub energy_error: f64,
    /// Negative `S^2` mass clipped by the spectrum.
    pub clipped: f64,
    /// Whether the path went extinct on its grid; both identities assume it.
    pub extinct: bool,
}

impl ParsevalReport {
    pub fn max_error(&self) -> f64 {
        self.dissipation_error.max(self.energy_error)
    }
}

/// Checks `||f||^2 = 2 int J(u) dt = int S(t)^2 dt` on a gradient flow of `f`.
/// `f` must be the datum the path was started from. Errors are relative
/// to `||f||^2` (absolute when `f = 0`).
pub fn parseval_report(f: &Signal, path: &ScalePath) -> Result<ParsevalReport> {
    if path.method() != Method::GradientFlow {
        return Err(Error::param(
            "Parseval identities are checked on gradient flows",
        ));
    }
    f.check_compatible(path.f())?;
    let spec = path.functional();
    let t = path.times();
    let mut dissipation = 0.0;
    let mut t_prev = 0.0;
    let mut j_prev = evaluate(spec, f)?;
    for (k, u) in path.u().iter().enumerate() {
        let j = evaluate(spec, u)?;
        dissipation += (t[k] - t_prev) * (j_prev + j);
        t_prev = t[k];
        j_prev = j;
    }
    let spectrum = spectrum_energy(path)?;
    let energy = spectrum.total_mass();
    let norm_sq = f.norm_sq();
    let rel = |x: f64| {
        if norm_sq > 0.0 {
            (x - norm_sq).abs() / norm_sq
        } else {
            x.abs()
        }
    };
    Ok(ParsevalReport {
        norm_sq,
        dissipation,
        energy,
        dissipation_error: rel(dissipation),
        energy_error: rel(energy),
        clipped: spectrum.clipped,
        extinct: path.extinction_index().is_some(),
    })
}
