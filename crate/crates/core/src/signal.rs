//! Grid functions and the discrete inner product.
//!
//! Every quantity the decompositions produce (the datum, flow states,
//! subgradients, band atoms) is a [`Signal`]: a finite real array on a 1D or
//! 2D grid with a uniform spacing `h`. The inner product carries the cell
//! volume, `<a, b> = h^d * sum(a_i * b_i)`, so identities such as Parseval
//! stay consistent across resolutions.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    D1(usize),
    /// Row-major `rows x cols` array.
    D2 {
        rows: usize,
        cols: usize,
    },
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::D1(n) => n,
            Shape::D2 { rows, cols } => rows * cols,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid dimension `d` used in the cell volume `h^d`.
    pub fn dim(&self) -> i32 {
        match self {
            Shape::D1(_) => 1,
            Shape::D2 { .. } => 2,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::D1(n) => write!(f, "[{n}]"),
            Shape::D2 { rows, cols } => write!(f, "[{rows}x{cols}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
    shape: Shape,
    spacing: f64,
}

impl Signal {
    pub fn new_1d(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::from_parts(values, Shape::D1(n), 1.0)
    }

    pub fn new_2d(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::param(alloc::format!(
                "expected {} values for a {rows}x{cols} grid, got {}",
                rows * cols,
                values.len()
            )));
        }
        Self::from_parts(values, Shape::D2 { rows, cols }, 1.0)
    }

    pub fn from_parts(values: Vec<f64>, shape: Shape, spacing: f64) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::param(alloc::format!(
                "shape {shape} needs {} values, got {}",
                shape.len(),
                values.len()
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::param("grid spacing must be positive and finite"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Signal {
            values,
            shape,
            spacing,
        })
    }

    /// Same values on a grid with a different step.
    pub fn with_spacing(mut self, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::param("grid spacing must be positive and finite"));
        }
        self.spacing = spacing;
        Ok(self)
    }

    pub fn zeros(shape: Shape, spacing: f64) -> Self {
        Signal {
            values: vec![0.0; shape.len()],
            shape,
            spacing,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.shape, self.spacing)
    }

    /// Builds a signal with this geometry. Values are trusted to be finite;
    /// used for solver output.
    pub(crate) fn like(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Signal {
            values,
            shape: self.shape,
            spacing: self.spacing,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Cell volume `h^d`.
    pub fn cell_volume(&self) -> f64 {
        math::powi(self.spacing, self.shape.dim())
    }

    pub fn is_compatible(&self, other: &Signal) -> bool {
        self.shape == other.shape && self.spacing == other.spacing
    }

    pub(crate) fn check_compatible(&self, other: &Signal) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape,
                found: other.shape,
            });
        }
        if self.spacing != other.spacing {
            return Err(Error::param("signals have different grid spacing"));
        }
        Ok(())
    }

    pub fn dot(&self, other: &Signal) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.cell_volume() * math::dot(&self.values, &other.values))
    }

    pub fn norm_sq(&self) -> f64 {
        self.cell_volume() * math::norm_sq(&self.values)
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm_sq())
    }

    /// `h^d * sum |a_i|`, the discrete L1 norm.
    pub fn norm_l1(&self) -> f64 {
        self.cell_volume() * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scaled(&self, c: f64) -> Signal {
        self.map(|v| c * v)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Signal) -> Result<Signal> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + c * b))
    }

    pub(crate) fn add_assign_scaled(&mut self, c: f64, other: &Signal) {
        debug_assert!(self.is_compatible(other));
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub(crate) fn map(&self, op: impl Fn(f64) -> f64) -> Signal {
        self.like(self.values.iter().map(|&v| op(v)).collect())
    }

    pub(crate) fn zip_with(&self, other: &Signal, op: impl Fn(f64, f64) -> f64) -> Signal {
        self.like(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        )
    }

    /// Relative L2 distance `||self - other|| / ||other||` (absolute when
    /// `other` is zero).
    pub fn relative_error(&self, reference: &Signal) -> Result<f64> {
        let diff = self.sub(reference)?.norm();
        let scale = reference.norm();
        Ok(if scale > 0.0 { diff / scale } else { diff })
    }

    pub fn max_abs_diff(&self, other: &Signal) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.values.iter().sum::<f64>() / self.values.len() as f64
        }
    }
}
