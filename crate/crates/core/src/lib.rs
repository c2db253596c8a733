//! Nonlinear spectral decompositions of signals and images with respect to
//! convex one-homogeneous regularizers.
//!
//! A datum `f` is driven through one of three scale-generating processes
//! (gradient flow, variational path, inverse scale space). The sampled
//! trajectory is turned into band atoms whose sum reproduces `f` exactly,
//! which in turn supports spectra, band-pass filtering and a set of
//! identity-based self checks.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! command-line tool and synthetic scenarios live in the `nlspec` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod flows;
pub mod functionals;
pub mod grid;
mod math;
pub mod nullspace;
pub mod oracles;
pub mod signal;
pub mod spectral;

pub use error::{Error, Result};
pub use flows::{
    run_gradient_flow, run_inverse_scale_space, run_path, run_variational_path, FlowOptions,
    Method, ScalePath, EXTINCTION_THRESHOLD,
};
pub use functionals::{
    evaluate, prox, prox_with, subgradient_at_zero_scale, FunctionalKind, FunctionalSpec,
    OrthonormalTransform, ProxResult, ProxWorkspace, SolverOptions, Transform,
};
pub use grid::{make_time_grid, GridKind, TimeGrid};
pub use nullspace::remove_nullspace;
pub use signal::{Shape, Signal};
pub use spectral::{
    apply_filter, frequency_bands, orthogonality_report, parseval_report, reconstruct,
    spectrum_energy, spectrum_l1, to_frequency, to_wavelength, wavelength_bands, Band, Bin,
    OrthogonalityReport, ParsevalReport, Representation, SpectralDecomposition, Spectrum,
    SpectrumDefinition, TransferFunction,
};

/// Removes the nullspace component, runs the requested scale path and
/// returns its band decomposition in the method's natural representation
/// (wavelength for gradient flow and variational path, frequency for the
/// inverse scale space).
pub fn decompose(
    f: &Signal,
    functional: &FunctionalSpec,
    method: Method,
    grid: &TimeGrid,
    options: &FlowOptions,
) -> Result<(ScalePath, SpectralDecomposition)> {
    let (f0, n0) = remove_nullspace(f, functional)?;
    let path = run_path(method, &f0, functional, grid, options)?;
    let mut dec = match method {
        Method::InverseScaleSpace => frequency_bands(&path)?,
        _ => wavelength_bands(&path)?,
    };
    dec.set_nullspace(n0)?;
    Ok((path, dec))
}
