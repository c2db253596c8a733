//! Band decompositions of scale paths, spectra, filtering and diagnostics.
//!
//! The spectral measure is kept as band integrals over grid cells: each band
//! carries an atom (a signal) and the scale bin it was collected from. A
//! Dirac concentration of the measure then shows up as one large atom, and
//! reconstruction or filtering are finite sums.
//!
//! Wavelength bands come from the piecewise linear interpolant of `u` over
//! the nodes `0 = T_0 < T_1 < ... < T_M` (with `U_0 = f` at the origin):
//! with slopes `D_j = (U_j - U_{j-1}) / (T_j - T_{j-1})` the atom at an
//! interior node is `T_j (D_{j+1} - D_j)` and the tail is `U_M - T_M D_M`.
//! Abel summation gives `sum atoms + tail = f` exactly. Frequency bands are
//! plain increments `v_{j+1} - v_j` of the inverse scale space path over
//! `[s_j, s_{j+1}]` with tail `f - v_M`.

mod filter;
mod reports;
mod spectrum;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flows::{Method, ScalePath};
use crate::signal::Signal;

pub use filter::{apply_filter, TransferFunction};
pub use reports::{orthogonality_report, parseval_report, OrthogonalityReport, ParsevalReport};
pub use spectrum::{spectrum_energy, spectrum_l1, Spectrum, SpectrumDefinition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Wavelength,
    Frequency,
}

/// Scale interval `[lo, hi]` with the representative label `at`. An
/// unbounded wavelength bin has `hi = inf` (its frequency bin starts at 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lo: f64,
    pub at: f64,
    pub hi: f64,
}

impl Bin {
    /// The same interval under `t = 1/s`.
    pub fn inverted(&self) -> Bin {
        Bin {
            lo: 1.0 / self.hi,
            at: 1.0 / self.at,
            hi: 1.0 / self.lo,
        }
    }

    /// Width used for densities; an unbounded bin counts as twice its lower
    /// half.
    pub fn width(&self) -> f64 {
        if self.hi.is_finite() {
            self.hi - self.lo
        } else {
            2.0 * (self.at - self.lo)
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }
}

/// One band atom with its bin in both representations.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub atom: Signal,
    pub wavelength: Bin,
    pub frequency: Bin,
}

impl Band {
    /// Band with the given wavelength bin; the frequency bin is its image
    /// under `s = 1/t`.
    pub fn from_wavelength(atom: Signal, bin: Bin) -> Self {
        Self::new_wavelength(atom, bin)
    }

    fn new_wavelength(atom: Signal, bin: Bin) -> Self {
        Band {
            atom,
            frequency: bin.inverted(),
            wavelength: bin,
        }
    }

    fn new_frequency(atom: Signal, bin: Bin) -> Self {
        Band {
            atom,
            wavelength: bin.inverted(),
            frequency: bin,
        }
    }

    pub fn bin(&self, representation: Representation) -> Bin {
        match representation {
            Representation::Wavelength => self.wavelength,
            Representation::Frequency => self.frequency,
        }
    }
}

/// Ordered band atoms plus tail and nullspace components.
/// `sum atoms + tail + nullspace` reproduces the input signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    bands: Vec<Band>,
    tail: Signal,
    nullspace: Signal,
    method: Method,
    representation: Representation,
}

impl SpectralDecomposition {
    /// Reassembles a decomposition from stored parts. Bands must be listed
    /// in increasing order of the given representation and share the
    /// geometry of `tail` and `nullspace`.
    pub fn from_parts(
        bands: Vec<Band>,
        tail: Signal,
        nullspace: Signal,
        method: Method,
        representation: Representation,
    ) -> Result<Self> {
        tail.check_compatible(&nullspace)?;
        for b in &bands {
            tail.check_compatible(&b.atom)?;
        }
        if bands.windows(2).any(|w| {
            w[0].bin(representation)
                .at
                .partial_cmp(&w[1].bin(representation).at)
                != Some(core::cmp::Ordering::Less)
        }) {
            return Err(Error::param("band labels must be strictly increasing"));
        }
        Ok(SpectralDecomposition {
            bands,
            tail,
            nullspace,
            method,
            representation,
        })
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// Band labels in the current representation.
    pub fn labels(&self) -> Vec<f64> {
        self.bands
            .iter()
            .map(|b| b.bin(self.representation).at)
            .collect()
    }

    pub fn tail(&self) -> &Signal {
        &self.tail
    }

    pub fn nullspace(&self) -> &Signal {
        &self.nullspace
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    /// Attaches the nullspace component split off before the path was run.
    pub fn set_nullspace(&mut self, n0: Signal) -> Result<()> {
        self.tail.check_compatible(&n0)?;
        self.nullspace = n0;
        Ok(())
    }

    /// Whether the tail sits at the large-scale end of the wavelength axis
    /// (forward methods) rather than the small-scale end (inverse scale
    /// space).
    pub fn tail_at_large_scales(&self) -> bool {
        self.method != Method::InverseScaleSpace
    }
}

fn check_len(path: &ScalePath) -> Result<()> {
    if path.len() < 2 {
        return Err(Error::param(
            "band decompositions need at least two path nodes besides the origin",
        ));
    }
    Ok(())
}

/// Wavelength bands of a gradient-flow or variational path. An inverse
/// scale space path is first turned into frequency bands and converted.
pub fn wavelength_bands(path: &ScalePath) -> Result<SpectralDecomposition> {
    if path.method() == Method::InverseScaleSpace {
        return Ok(to_wavelength(&frequency_bands(path)?));
    }
    check_len(path)?;
    let t = path.times();
    let u = path.u();
    let f = path.f();
    let n = t.len();

    // slopes D_j between extended nodes j-1 and j, for j = 1..=n
    let mut slopes: Vec<Signal> = Vec::with_capacity(n);
    for k in 0..n {
        let (t_prev, u_prev) = if k == 0 {
            (0.0, f)
        } else {
            (t[k - 1], &u[k - 1])
        };
        let mut d = u[k].sub(u_prev)?;
        d = d.scaled(1.0 / (t[k] - t_prev));
        slopes.push(d);
    }

    let mut bands = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let atom = slopes[k + 1].sub(&slopes[k])?.scaled(t[k]);
        let lo = if k == 0 {
            0.5 * t[0]
        } else {
            0.5 * (t[k - 1] + t[k])
        };
        let hi = 0.5 * (t[k] + t[k + 1]);
        bands.push(Band::new_wavelength(atom, Bin { lo, at: t[k], hi }));
    }
    let tail = u[n - 1].axpy(-t[n - 1], &slopes[n - 1])?;
    Ok(SpectralDecomposition {
        bands,
        nullspace: f.zeros_like(),
        tail,
        method: path.method(),
        representation: Representation::Wavelength,
    })
}

/// Frequency bands of an inverse scale space path; forward paths are
/// decomposed in wavelength and converted.
pub fn frequency_bands(path: &ScalePath) -> Result<SpectralDecomposition> {
    if path.method() != Method::InverseScaleSpace {
        return Ok(to_frequency(&wavelength_bands(path)?));
    }
    check_len(path)?;
    let s = path.times();
    let v = path.u();
    let f = path.f();
    let mut bands = Vec::with_capacity(s.len());
    for k in 0..s.len() {
        let (s_prev, atom) = if k == 0 {
            (0.0, v[0].clone())
        } else {
            (s[k - 1], v[k].sub(&v[k - 1])?)
        };
        let bin = Bin {
            lo: s_prev,
            at: 0.5 * (s_prev + s[k]),
            hi: s[k],
        };
        bands.push(Band::new_frequency(atom, bin));
    }
    let tail = f.sub(&v[s.len() - 1])?;
    Ok(SpectralDecomposition {
        bands,
        nullspace: f.zeros_like(),
        tail,
        method: path.method(),
        representation: Representation::Frequency,
    })
}

fn relabel(dec: &SpectralDecomposition, representation: Representation) -> SpectralDecomposition {
    let mut out = dec.clone();
    if dec.representation != representation {
        out.bands.reverse();
        out.representation = representation;
    }
    out
}

/// Same atoms, labelled and ordered by wavelength `t = 1/s`.
pub fn to_wavelength(dec: &SpectralDecomposition) -> SpectralDecomposition {
    relabel(dec, Representation::Wavelength)
}

/// Same atoms, labelled and ordered by frequency `s = 1/t`.
pub fn to_frequency(dec: &SpectralDecomposition) -> SpectralDecomposition {
    relabel(dec, Representation::Frequency)
}

/// `sum atoms + tail + nullspace`, summed in band order.
pub fn reconstruct(dec: &SpectralDecomposition) -> Signal {
    let mut out = dec.tail.zeros_like();
    for band in &dec.bands {
        out.add_assign_scaled(1.0, &band.atom);
    }
    out.add_assign_scaled(1.0, &dec.tail);
    out.add_assign_scaled(1.0, &dec.nullspace);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{run_gradient_flow, run_inverse_scale_space, FlowOptions};
    use crate::functionals::FunctionalSpec;
    use crate::grid::{GridKind, TimeGrid};
    use alloc::vec;

    fn step4() -> Signal {
        Signal::new_1d(vec![1.0, 1.0, -1.0, -1.0]).unwrap()
    }

    fn static_path(n: usize) -> ScalePath {
        let grid =
            TimeGrid::from_nodes((1..=n).map(|k| k as f64).collect(), GridKind::Uniform).unwrap();
        let f = step4();
        ScalePath::from_parts(
            Method::GradientFlow,
            grid,
            vec![f.clone(); n],
            vec![f.zeros_like(); n],
            f,
            FunctionalSpec::Tv1d,
            None,
        )
        .unwrap()
    }

    #[test]
    fn abel_identity_on_three_nodes() {
        // arbitrary states on a nonuniform grid; the identity is algebraic
        let grid = TimeGrid::from_nodes(vec![0.3, 0.7, 1.6], GridKind::Custom).unwrap();
        let f = Signal::new_1d(vec![2.0, -1.0, 0.5]).unwrap();
        let u = vec![
            Signal::new_1d(vec![1.0, 0.25, -3.0]).unwrap(),
            Signal::new_1d(vec![-0.5, 0.75, 2.0]).unwrap(),
            Signal::new_1d(vec![0.125, -2.0, 1.0]).unwrap(),
        ];
        let path = ScalePath::from_parts(
            Method::Variational,
            grid,
            u.clone(),
            u,
            f.clone(),
            FunctionalSpec::Tv1d,
            None,
        )
        .unwrap();
        let dec = wavelength_bands(&path).unwrap();
        assert_eq!(dec.len(), 2);
        assert!(reconstruct(&dec).max_abs_diff(&f).unwrap() < 1e-14);
    }

    #[test]
    fn static_path_is_all_tail() {
        let dec = wavelength_bands(&static_path(5)).unwrap();
        assert!(dec.bands().iter().all(|b| b.atom.max_abs() == 0.0));
        assert_eq!(dec.tail(), &step4());
    }

    #[test]
    fn two_node_path_has_one_band() {
        assert_eq!(wavelength_bands(&static_path(2)).unwrap().len(), 1);
    }

    #[test]
    fn eigenfunction_concentrates_in_one_band() {
        let grid =
            TimeGrid::from_nodes((1..=30).map(|k| 0.1 * k as f64).collect(), GridKind::Custom)
                .unwrap();
        let path = run_gradient_flow(
            &step4(),
            &FunctionalSpec::Tv1d,
            &grid,
            &FlowOptions::default(),
        )
        .unwrap();
        let dec = wavelength_bands(&path).unwrap();
        let peak = dec
            .bands()
            .iter()
            .find(|b| (b.wavelength.at - 2.0).abs() < 1e-9)
            .unwrap();
        assert!(peak.atom.max_abs_diff(&step4()).unwrap() < 1e-12);
        let rest: f64 = dec
            .bands()
            .iter()
            .filter(|b| (b.wavelength.at - 2.0).abs() > 1e-9)
            .map(|b| b.atom.norm_l1())
            .sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn frequency_bands_of_eigenfunction() {
        let grid =
            TimeGrid::from_nodes((1..=20).map(|k| 0.1 * k as f64).collect(), GridKind::Custom)
                .unwrap();
        let path = run_inverse_scale_space(
            &step4(),
            &FunctionalSpec::Tv1d,
            &grid,
            &FlowOptions::default(),
        )
        .unwrap();
        let dec = frequency_bands(&path).unwrap();
        let nonzero: Vec<&Band> = dec
            .bands()
            .iter()
            .filter(|b| b.atom.max_abs() > 1e-12)
            .collect();
        assert_eq!(nonzero.len(), 1);
        let bin = nonzero[0].frequency;
        assert!(bin.lo < 0.5 + 1e-9 && 0.5 - 1e-9 <= bin.hi, "{bin:?}");
        assert!(reconstruct(&dec).max_abs_diff(&step4()).unwrap() < 1e-14);
    }

    #[test]
    fn representation_round_trip_is_exact() {
        let grid = TimeGrid::from_nodes(vec![0.5, 1.0, 2.0, 4.0], GridKind::Geometric).unwrap();
        let path = run_inverse_scale_space(
            &step4(),
            &FunctionalSpec::Tv1d,
            &grid,
            &FlowOptions::default(),
        )
        .unwrap();
        let dec = frequency_bands(&path).unwrap();
        let wl = to_wavelength(&dec);
        assert_eq!(wl.representation(), Representation::Wavelength);
        assert_eq!(wl.bands()[0].atom, dec.bands()[3].atom);
        assert_eq!(to_frequency(&wl), dec);
        assert_eq!(to_wavelength(&wl), wl);
        // s = 2 labels at t = 0.5 after conversion
        let single = SpectralDecomposition {
            bands: vec![Band::new_frequency(
                step4(),
                Bin {
                    lo: 1.5,
                    at: 2.0,
                    hi: 2.5,
                },
            )],
            tail: step4().zeros_like(),
            nullspace: step4().zeros_like(),
            method: Method::InverseScaleSpace,
            representation: Representation::Frequency,
        };
        assert_eq!(to_wavelength(&single).labels(), vec![0.5]);
    }

    #[test]
    fn first_frequency_bin_maps_to_unbounded_wavelength_bin() {
        let bin = Bin {
            lo: 0.0,
            at: 0.25,
            hi: 0.5,
        }
        .inverted();
        assert_eq!(bin.hi, f64::INFINITY);
        assert_eq!(bin.lo, 2.0);
        assert_eq!(bin.width(), 4.0);
    }

    #[test]
    fn from_parts_rebuilds_and_checks_order() {
        let dec = wavelength_bands(&static_path(4)).unwrap();
        let again = SpectralDecomposition::from_parts(
            dec.bands().to_vec(),
            dec.tail().clone(),
            dec.nullspace().clone(),
            dec.method(),
            dec.representation(),
        )
        .unwrap();
        assert_eq!(again, dec);
        let mut reversed = dec.bands().to_vec();
        reversed.reverse();
        assert!(SpectralDecomposition::from_parts(
            reversed,
            dec.tail().clone(),
            dec.nullspace().clone(),
            dec.method(),
            dec.representation(),
        )
        .is_err());
    }
}
