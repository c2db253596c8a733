//! Scale paths: gradient flow, variational path and inverse scale space.
//!
//! Every path starts from an implicit origin before the first grid node
//! (`t = 0` with `u = f` for the forward methods, `s = 0` with `v = 0` for the
//! inverse scale space), so grids must start at a positive node and the first
//! step has length `t_0`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::functionals::{prox_with, FunctionalSpec, ProxWorkspace, SolverOptions};
use crate::grid::TimeGrid;
use crate::signal::Signal;

/// Relative norm below which a forward path counts as extinct.
pub const EXTINCTION_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GradientFlow,
    Variational,
    InverseScaleSpace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub solver: SolverOptions,
    pub extinction: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            solver: SolverOptions::default(),
            extinction: EXTINCTION_THRESHOLD,
        }
    }
}

impl FlowOptions {
    pub fn with_tol(tol: f64) -> Self {
        FlowOptions {
            solver: SolverOptions::with_tol(tol),
            ..Self::default()
        }
    }
}

/// Sampled trajectory `{t_k, u_k, p_k}` of one of the three methods. For the
/// inverse scale space the grid is in `s` and `u`/`p` hold `v_k`/`q_k`.
#[derive(Debug, Clone)]
pub struct ScalePath {
    method: Method,
    grid: TimeGrid,
    u: Vec<Signal>,
    p: Vec<Signal>,
    f: Signal,
    functional: FunctionalSpec,
    extinction_index: Option<usize>,
}

impl ScalePath {
    /// Assembles a path from precomputed states (used by closed-form
    /// references). Lengths must match the grid.
    pub fn from_parts(
        method: Method,
        grid: TimeGrid,
        u: Vec<Signal>,
        p: Vec<Signal>,
        f: Signal,
        functional: FunctionalSpec,
        extinction_index: Option<usize>,
    ) -> Result<Self> {
        if u.len() != grid.len() || p.len() != grid.len() {
            return Err(Error::param("path states must match the grid length"));
        }
        for s in u.iter().chain(&p) {
            f.check_compatible(s)?;
        }
        Ok(ScalePath {
            method,
            grid,
            u,
            p,
            f,
            functional,
            extinction_index,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn u(&self) -> &[Signal] {
        &self.u
    }

    pub fn p(&self) -> &[Signal] {
        &self.p
    }

    /// The (nullspace-free) datum the path started from.
    pub fn f(&self) -> &Signal {
        &self.f
    }

    pub fn functional(&self) -> &FunctionalSpec {
        &self.functional
    }

    pub fn extinction_index(&self) -> Option<usize> {
        self.extinction_index
    }

    pub fn extinction_time(&self) -> Option<f64> {
        self.extinction_index.map(|k| self.grid.nodes()[k])
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

fn check_inputs(f: &Signal, spec: &FunctionalSpec, grid: &TimeGrid) -> Result<()> {
    spec.validate_for(f.shape())?;
    if grid.first() <= 0.0 {
        return Err(Error::param(
            "scale grids for flows must start at a positive node",
        ));
    }
    Ok(())
}

/// Backward Euler: `u_k = prox(u_{k-1}, t_k - t_{k-1})`, `p_k` the
/// difference quotient, stopping once `||u_k|| <= eps ||f||` and padding with
/// zeros.
pub fn run_gradient_flow(
    f: &Signal,
    spec: &FunctionalSpec,
    grid: &TimeGrid,
    options: &FlowOptions,
) -> Result<ScalePath> {
    check_inputs(f, spec, grid)?;
    let threshold = options.extinction * f.norm();
    let mut ws = ProxWorkspace::default();
    let mut us = Vec::with_capacity(grid.len());
    let mut ps = Vec::with_capacity(grid.len());
    let mut extinction = None;
    let mut prev = f.clone();
    for k in 0..grid.len() {
        if extinction.is_some() {
            us.push(f.zeros_like());
            ps.push(f.zeros_like());
            continue;
        }
        let dt = grid.step_before(k);
        let r = prox_with(spec, &prev, dt, &options.solver, &mut ws).map_err(|e| e.at_step(k))?;
        let (mut u, mut p) = (r.u, r.p);
        if u.norm() <= threshold {
            u = f.zeros_like();
            p = prev.scaled(1.0 / dt);
            extinction = Some(k);
        }
        prev = u.clone();
        us.push(u);
        ps.push(p);
    }
    ScalePath::from_parts(
        Method::GradientFlow,
        grid.clone(),
        us,
        ps,
        f.clone(),
        spec.clone(),
        extinction,
    )
}

/// `u_k = prox(f, t_k)`, `p_k = (f - u_k) / t_k`, independently per node.
pub fn run_variational_path(
    f: &Signal,
    spec: &FunctionalSpec,
    grid: &TimeGrid,
    options: &FlowOptions,
) -> Result<ScalePath> {
    check_inputs(f, spec, grid)?;
    let threshold = options.extinction * f.norm();
    let mut ws = ProxWorkspace::default();
    let mut us = Vec::with_capacity(grid.len());
    let mut ps = Vec::with_capacity(grid.len());
    let mut extinction = None;
    for (k, &t) in grid.nodes().iter().enumerate() {
        if extinction.is_some() {
            // prox(f, t) stays zero once zero: f / t remains in dJ(0)
            us.push(f.zeros_like());
            ps.push(f.scaled(1.0 / t));
            continue;
        }
        let r = prox_with(spec, f, t, &options.solver, &mut ws).map_err(|e| e.at_step(k))?;
        if r.u.norm() <= threshold {
            extinction = Some(k);
            us.push(f.zeros_like());
            ps.push(f.scaled(1.0 / t));
        } else {
            us.push(r.u);
            ps.push(r.p);
        }
    }
    ScalePath::from_parts(
        Method::Variational,
        grid.clone(),
        us,
        ps,
        f.clone(),
        spec.clone(),
        extinction,
    )
}

/// Bregman iteration on an `s`-grid:
/// `v_k = argmin 1/2 ||v - f||^2 + (J(v) - <q_{k-1}, v>) / ds`,
/// `q_k = q_{k-1} + ds (f - v_k)`, from `v = q = 0` at `s = 0`.
///
/// Each step is the prox of `f + q_{k-1} / ds` with weight `1 / ds`, and the
/// new `q_k` is exactly that prox's subgradient.
pub fn run_inverse_scale_space(
    f: &Signal,
    spec: &FunctionalSpec,
    grid: &TimeGrid,
    options: &FlowOptions,
) -> Result<ScalePath> {
    check_inputs(f, spec, grid)?;
    let mut ws = ProxWorkspace::default();
    let mut vs = Vec::with_capacity(grid.len());
    let mut qs = Vec::with_capacity(grid.len());
    let mut q = f.zeros_like();
    for k in 0..grid.len() {
        let ds = grid.step_before(k);
        let mut g = f.clone();
        g.add_assign_scaled(1.0 / ds, &q);
        let r =
            prox_with(spec, &g, 1.0 / ds, &options.solver, &mut ws).map_err(|e| e.at_step(k))?;
        q = r.p;
        vs.push(r.u);
        qs.push(q.clone());
    }
    ScalePath::from_parts(
        Method::InverseScaleSpace,
        grid.clone(),
        vs,
        qs,
        f.clone(),
        spec.clone(),
        None,
    )
}

pub fn run_path(
    method: Method,
    f: &Signal,
    spec: &FunctionalSpec,
    grid: &TimeGrid,
    options: &FlowOptions,
) -> Result<ScalePath> {
    match method {
        Method::GradientFlow => run_gradient_flow(f, spec, grid, options),
        Method::Variational => run_variational_path(f, spec, grid, options),
        Method::InverseScaleSpace => run_inverse_scale_space(f, spec, grid, options),
    }
}
