//! Spectral response curves.

use alloc::vec::Vec;

use super::{to_wavelength, wavelength_bands, Bin, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::flows::{Method, ScalePath};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumDefinition {
    /// `||atom||_L1` per unit wavelength.
    L1,
    /// `S(t)^2` per unit wavelength from the energy dissipation of the
    /// gradient flow; `values` hold `S`, not `S^2`.
    Energy,
}

/// Spectrum sampled on wavelength bins. `values` are densities, so
/// `value * bin width` is the mass collected in a bin.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bins: Vec<Bin>,
    pub values: Vec<f64>,
    pub definition: SpectrumDefinition,
    /// Total negative mass set to zero (energy spectrum only).
    pub clipped: f64,
}

impl Spectrum {
    pub fn t(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.at).collect()
    }

    /// Mass per bin: `S width` for L1, `S^2 width` for energy.
    pub fn masses(&self) -> Vec<f64> {
        self.bins
            .iter()
            .zip(&self.values)
            .map(|(b, v)| match self.definition {
                SpectrumDefinition::L1 => v * b.width(),
                SpectrumDefinition::Energy => v * v * b.width(),
            })
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses().iter().sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `S_k = ||atom_k||_L1 / width_k` over wavelength bins (frequency
/// decompositions are converted first).
pub fn spectrum_l1(dec: &SpectralDecomposition) -> Spectrum {
    let dec = to_wavelength(dec);
    let bins: Vec<Bin> = dec.bands().iter().map(|b| b.wavelength).collect();
    let values = dec
        .bands()
        .iter()
        .map(|b| b.atom.norm_l1() / b.wavelength.width())
        .collect();
    Spectrum {
        bins,
        values,
        definition: SpectrumDefinition::L1,
        clipped: 0.0,
    }
}

/// Energy spectrum of a gradient flow. With `p` constant on each step,
/// `d/dt J(u) = -||p||^2` jumps at the nodes and the mass of `S^2` at node
/// `t_k` is `t_k^2 (||p_k||^2 - ||p_{k+1}||^2)`.
pub fn spectrum_energy(path: &ScalePath) -> Result<Spectrum> {
    if path.method() != Method::GradientFlow {
        return Err(Error::param(
            "the energy spectrum is defined for gradient flows only",
        ));
    }
    let dec = wavelength_bands(path)?;
    let t = path.times();
    let p_sq: Vec<f64> = path.p().iter().map(|p| p.norm_sq()).collect();
    let mut clipped = 0.0;
    let mut bins = Vec::with_capacity(dec.len());
    let mut values = Vec::with_capacity(dec.len());
    for (k, band) in dec.bands().iter().enumerate() {
        let mut mass = t[k] * t[k] * (p_sq[k] - p_sq[k + 1]);
        if mass < 0.0 {
            clipped -= mass;
            mass = 0.0;
        }
        let bin = band.wavelength;
        values.push(crate::math::sqrt(mass / bin.width()));
        bins.push(bin);
    }
    Ok(Spectrum {
        bins,
        values,
        definition: SpectrumDefinition::Energy,
        clipped,
    })
}
