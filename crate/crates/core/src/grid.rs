//! Sampling grids for the scale variable (`t` for the forward flows, `s = 1/t`
//! for the inverse scale space).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Uniform,
    Geometric,
    /// Arbitrary strictly increasing nodes.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    kind: GridKind,
}

const UNIFORM_RTOL: f64 = 1e-12;

impl TimeGrid {
    /// Validates externally supplied nodes: `t_0 >= 0`, strictly
    /// increasing, at least two of them. A `Uniform` claim is checked
    /// against the step tolerance.
    pub fn from_nodes(nodes: Vec<f64>, kind: GridKind) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::param("a time grid needs at least two nodes"));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite);
        }
        if nodes[0] < 0.0 {
            return Err(Error::param("time grid must start at a nonnegative node"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("time grid nodes must be strictly increasing"));
        }
        if kind == GridKind::Uniform {
            let step = nodes[1] - nodes[0];
            if nodes
                .windows(2)
                .any(|w| ((w[1] - w[0]) - step).abs() > UNIFORM_RTOL * nodes[nodes.len() - 1])
            {
                return Err(Error::param("nodes are not uniformly spaced"));
            }
        }
        Ok(TimeGrid { nodes, kind })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Common step of a uniform grid.
    pub fn step(&self) -> Option<f64> {
        match self.kind {
            GridKind::Uniform => Some(self.nodes[1] - self.nodes[0]),
            _ => None,
        }
    }

    /// Step preceding node `k`, with an implicit origin at zero before the
    /// first node.
    pub fn step_before(&self, k: usize) -> f64 {
        if k == 0 {
            self.nodes[0]
        } else {
            self.nodes[k] - self.nodes[k - 1]
        }
    }
}

/// `count` nodes from `t_min` to `t_max`, equally spaced (`Uniform`) or
/// equally spaced in `log t` (`Geometric`). Both endpoints are hit exactly.
pub fn make_time_grid(kind: GridKind, t_min: f64, t_max: f64, count: usize) -> Result<TimeGrid> {
    if !(t_min.is_finite() && t_max.is_finite()) || t_min <= 0.0 || t_max <= t_min {
        return Err(Error::param(
            "time grid bounds must satisfy 0 < t_min < t_max",
        ));
    }
    if count < 2 {
        return Err(Error::param("a time grid needs at least two nodes"));
    }
    let last = (count - 1) as f64;
    let nodes: Vec<f64> = match kind {
        GridKind::Uniform => {
            let step = (t_max - t_min) / last;
            (0..count)
                .map(|k| {
                    if k + 1 == count {
                        t_max
                    } else {
                        t_min + k as f64 * step
                    }
                })
                .collect()
        }
        GridKind::Geometric => {
            let (a, b) = (math::ln(t_min), math::ln(t_max));
            (0..count)
                .map(|k| match k {
                    0 => t_min,
                    k if k + 1 == count => t_max,
                    k => math::exp(a + (b - a) * k as f64 / last),
                })
                .collect()
        }
        GridKind::Custom => {
            return Err(Error::param(
                "custom grids are built with TimeGrid::from_nodes",
            ))
        }
    };
    TimeGrid::from_nodes(nodes, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(x, y)| (x - y).abs() <= 1e-12 * y.abs().max(1.0))
    }

    #[test]
    fn uniform_grid() {
        let g = make_time_grid(GridKind::Uniform, 0.1, 0.4, 4).unwrap();
        assert!(close(g.nodes(), &[0.1, 0.2, 0.3, 0.4]));
        assert!((g.step().unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn geometric_grid() {
        let g = make_time_grid(GridKind::Geometric, 0.01, 1.0, 3).unwrap();
        assert!(close(g.nodes(), &[0.01, 0.1, 1.0]));
        assert_eq!(g.step(), None);
    }

    #[test]
    fn invalid_bounds() {
        assert!(matches!(
            make_time_grid(GridKind::Uniform, 1.0, 0.5, 4),
            Err(Error::Parameter(_))
        ));
        assert!(make_time_grid(GridKind::Uniform, 0.0, 0.5, 4).is_err());
        assert!(make_time_grid(GridKind::Uniform, 0.1, 0.5, 1).is_err());
    }

    #[test]
    fn from_nodes_checks_order_and_uniformity() {
        assert!(TimeGrid::from_nodes(vec![0.0, 1.0, 1.0], GridKind::Custom).is_err());
        assert!(TimeGrid::from_nodes(vec![0.0, 1.0, 3.0], GridKind::Uniform).is_err());
        assert!(TimeGrid::from_nodes(vec![-1.0, 1.0], GridKind::Custom).is_err());
        let g = TimeGrid::from_nodes(vec![0.5, 1.0, 2.0], GridKind::Custom).unwrap();
        assert_eq!(g.step_before(0), 0.5);
        assert_eq!(g.step_before(2), 1.0);
    }
}
