//! Piecewise constant transfer functions on the wavelength axis.

use alloc::vec;
use alloc::vec::Vec;

use super::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::signal::Signal;

/// `H(t)` as a sum of gains on half-open wavelength intervals `[lo, hi)`
/// (`hi` may be infinite), plus gains for the tail and the nullspace part.
///
/// The tail of a forward decomposition collects the scales beyond the last
/// node, the tail of an inverse scale space decomposition the scales below
/// its first band, so two tail gains are kept and the one matching the
/// decomposition is used. The constructors set them to `H(inf)` and `H(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    pieces: Vec<(f64, f64, f64)>,
    tail_large: f64,
    tail_small: f64,
    nullspace: f64,
}

impl TransferFunction {
    /// Gains on intervals; tail and nullspace follow `H` at the matching end.
    pub fn from_pieces(pieces: Vec<(f64, f64, f64)>) -> Result<Self> {
        for &(lo, hi, gain) in &pieces {
            if !(lo >= 0.0 && lo < hi && !lo.is_infinite() && gain.is_finite()) {
                return Err(Error::param(
                    "filter intervals need 0 <= lo < hi and finite gains",
                ));
            }
        }
        let mut h = TransferFunction {
            pieces,
            tail_large: 0.0,
            tail_small: 0.0,
            nullspace: 0.0,
        };
        h.tail_large = h.at(f64::INFINITY);
        h.tail_small = h.at(0.0);
        h.nullspace = h.tail_large;
        Ok(h)
    }

    pub fn identity() -> Self {
        TransferFunction {
            pieces: vec![(0.0, f64::INFINITY, 1.0)],
            tail_large: 1.0,
            tail_small: 1.0,
            nullspace: 1.0,
        }
    }

    /// Keeps wavelengths `t >= t_c`, the large-scale tail and the nullspace.
    pub fn low_pass(t_c: f64) -> Result<Self> {
        Self::from_pieces(vec![(t_c, f64::INFINITY, 1.0)])
    }

    /// Keeps wavelengths `t < t_c` and the small-scale tail.
    pub fn high_pass(t_c: f64) -> Result<Self> {
        Ok(Self::low_pass(t_c)?.complement())
    }

    pub fn band_pass(lo: f64, hi: f64) -> Result<Self> {
        Self::from_pieces(vec![(lo, hi, 1.0)])
    }

    pub fn with_tail(mut self, gain: f64) -> Self {
        self.tail_large = gain;
        self.tail_small = gain;
        self
    }

    pub fn with_nullspace(mut self, gain: f64) -> Self {
        self.nullspace = gain;
        self
    }

    /// `1 - H`, including the tail and nullspace gains.
    pub fn complement(&self) -> Self {
        Self::identity().sum(&self.scaled(-1.0))
    }

    pub fn scaled(&self, a: f64) -> Self {
        TransferFunction {
            pieces: self
                .pieces
                .iter()
                .map(|&(lo, hi, g)| (lo, hi, a * g))
                .collect(),
            tail_large: a * self.tail_large,
            tail_small: a * self.tail_small,
            nullspace: a * self.nullspace,
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut pieces = self.pieces.clone();
        pieces.extend_from_slice(&other.pieces);
        TransferFunction {
            pieces,
            tail_large: self.tail_large + other.tail_large,
            tail_small: self.tail_small + other.tail_small,
            nullspace: self.nullspace + other.nullspace,
        }
    }

    /// `H(t)`; at `t = inf` the intervals reaching infinity count.
    pub fn at(&self, t: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|&&(lo, hi, _)| {
                if t.is_infinite() {
                    hi.is_infinite()
                } else {
                    lo <= t && t < hi
                }
            })
            .map(|p| p.2)
            .sum()
    }

    pub fn tail_gain(&self, large_scales: bool) -> f64 {
        if large_scales {
            self.tail_large
        } else {
            self.tail_small
        }
    }

    pub fn nullspace_gain(&self) -> f64 {
        self.nullspace
    }
}

/// `sum_k H(t_k) atom_k + H_tail tail + H_null nullspace`, with `t_k` the
/// wavelength label of each band.
pub fn apply_filter(dec: &SpectralDecomposition, h: &TransferFunction) -> Signal {
    let mut out = dec.tail().zeros_like();
    for band in dec.bands() {
        let g = h.at(band.wavelength.at);
        if g != 0.0 {
            out.add_assign_scaled(g, &band.atom);
        }
    }
    out.add_assign_scaled(h.tail_gain(dec.tail_at_large_scales()), dec.tail());
    out.add_assign_scaled(h.nullspace_gain(), dec.nullspace());
    out
}
