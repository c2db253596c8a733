//! Run configuration: a JSON file (`--config`) overlaid by command-line
//! flags, validated into core types.

use std::path::Path;

use nlspec_core::{
    make_time_grid, prox, FunctionalSpec, GridKind, Method, Signal, TimeGrid, TransferFunction,
    Transform, EXTINCTION_THRESHOLD,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// All tunable run parameters. Unknown keys in a config file are errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `tv1d`, `tv2d-aniso`, `tv2d-iso`, `l1-dct`, `l1-identity`, `tgv2`,
    /// `collab`, `grad-collab`.
    pub functional: String,
    /// TGV weight in `(0, 1)`.
    pub beta: Option<f64>,
    /// `gf`, `vm` or `iss`.
    pub method: String,
    /// `uniform` or `geometric`.
    pub grid: String,
    /// Grid bounds; `s` bounds for `iss`. Derived from the data if absent.
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub steps: usize,
    /// Prox duality-gap tolerance relative to `||f||^2`.
    pub tol: f64,
    /// Sample spacing `h`.
    pub spacing: f64,
    /// Transfer function as `lo:hi:gain,...` on the wavelength axis.
    pub filter: Option<String>,
    /// Tail gain override, 0 or 1.
    pub tail: Option<u8>,
    /// Nullspace (mean) gain override, 0 or 1.
    pub mean: Option<u8>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            functional: "tv1d".into(),
            beta: None,
            method: "gf".into(),
            grid: "uniform".into(),
            tmin: None,
            tmax: None,
            steps: 200,
            tol: 1e-8,
            spacing: 1.0,
            filter: None,
            tail: None,
            mean: None,
            seed: 0,
        }
    }
}

/// Flag values that override the config file when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub functional: Option<String>,
    pub beta: Option<f64>,
    pub method: Option<String>,
    pub grid: Option<String>,
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub spacing: Option<f64>,
    pub filter: Option<String>,
    pub tail: Option<u8>,
    pub mean: Option<u8>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::input(format!("config: {e}")))
    }

    /// Config file (if any) overlaid with flags, then validated.
    pub fn load(path: Option<&Path>, flags: &Overrides) -> CliResult<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                Self::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = &o.$f {
                    self.$f = v.clone();
                }
            )*};
        }
        macro_rules! set_opt {
            ($($f:ident),*) => {$(
                if o.$f.is_some() {
                    self.$f = o.$f.clone();
                }
            )*};
        }
        set!(functional, method, grid, steps, tol, spacing, seed);
        set_opt!(beta, tmin, tmax, filter, tail, mean);
    }

    pub fn validate(&self) -> CliResult<()> {
        self.functional_spec()?;
        self.method()?;
        self.grid_kind()?;
        if self.steps < 2 {
            return Err(CliError::input("steps must be at least 2"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(CliError::input("tol must lie in (0, 1)"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(CliError::input("spacing must be positive"));
        }
        for (name, v) in [("tmin", self.tmin), ("tmax", self.tmax)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::input(format!("{name} must be positive")));
                }
            }
        }
        if let (Some(a), Some(b)) = (self.tmin, self.tmax) {
            if a >= b {
                return Err(CliError::input("tmin must be below tmax"));
            }
        }
        for (name, v) in [("tail", self.tail), ("mean", self.mean)] {
            if matches!(v, Some(g) if g > 1) {
                return Err(CliError::input(format!("{name} must be 0 or 1")));
            }
        }
        self.transfer_function()?;
        Ok(())
    }

    pub fn functional_spec(&self) -> CliResult<FunctionalSpec> {
        let spec = match self.functional.as_str() {
            "tv1d" => FunctionalSpec::Tv1d,
            "tv2d-aniso" => FunctionalSpec::Tv2dAniso,
            "tv2d-iso" => FunctionalSpec::Tv2dIso,
            "l1-dct" => FunctionalSpec::L1Analysis(Transform::Dct),
            "l1-identity" => FunctionalSpec::L1Analysis(Transform::Identity),
            "tgv2" => FunctionalSpec::tgv2(self.beta.unwrap_or(0.05))?,
            "collab" => FunctionalSpec::CollabLinf1,
            "grad-collab" => FunctionalSpec::GradCollabLinf1,
            other => return Err(CliError::input(format!("unknown functional {other:?}"))),
        };
        if self.beta.is_some() && !matches!(spec, FunctionalSpec::Tgv2 { .. }) {
            return Err(CliError::input("beta only applies to tgv2"));
        }
        Ok(spec)
    }

    pub fn method(&self) -> CliResult<Method> {
        match self.method.as_str() {
            "gf" => Ok(Method::GradientFlow),
            "vm" => Ok(Method::Variational),
            "iss" => Ok(Method::InverseScaleSpace),
            other => Err(CliError::input(format!("unknown method {other:?}"))),
        }
    }

    pub fn grid_kind(&self) -> CliResult<GridKind> {
        match self.grid.as_str() {
            "uniform" => Ok(GridKind::Uniform),
            "geometric" => Ok(GridKind::Geometric),
            other => Err(CliError::input(format!("unknown grid {other:?}"))),
        }
    }

    /// The configured filter with tail and mean overrides, if any.
    pub fn transfer_function(&self) -> CliResult<Option<TransferFunction>> {
        let Some(text) = &self.filter else {
            return Ok(None);
        };
        let mut h = parse_filter(text)?;
        if let Some(g) = self.tail {
            h = h.with_tail(g as f64);
        }
        if let Some(g) = self.mean {
            h = h.with_nullspace(g as f64);
        }
        Ok(Some(h))
    }

    /// Scale grid for `f0` (nullspace already removed). Missing bounds are
    /// derived from the extinction time `T` of the variational path: the
    /// forward grid runs to `2T` and the inverse grid to `s = steps / (2T)`,
    /// both starting one grid step above zero on uniform grids. A zero signal
    /// gets the unit span.
    pub fn time_grid(&self, f0: &Signal, spec: &FunctionalSpec) -> CliResult<TimeGrid> {
        let kind = self.grid_kind()?;
        let inverse = self.method()? == Method::InverseScaleSpace;
        let (tmin, tmax) = match (self.tmin, self.tmax) {
            (Some(a), Some(b)) => (a, b),
            (a, b) => {
                // only sizes the grid, so a loose solve is enough
                let t_ext = extinction_estimate(f0, spec, self.tol.max(1e-6))?;
                let span = if t_ext > 0.0 { 2.0 * t_ext } else { 1.0 };
                let n = self.steps as f64;
                let hi = b.unwrap_or(if inverse { n / span } else { span });
                let lo = a.unwrap_or(match kind {
                    GridKind::Geometric => hi * 1e-3,
                    _ => hi / n,
                });
                (lo, hi)
            }
        };
        if tmin >= tmax {
            return Err(CliError::input("derived grid is empty; set tmin and tmax"));
        }
        Ok(make_time_grid(kind, tmin, tmax, self.steps)?)
    }
}

/// Smallest `t` with `prox(f, t) = 0`, by doubling and bisection. Zero for
/// a zero signal.
pub fn extinction_estimate(f: &Signal, spec: &FunctionalSpec, tol: f64) -> CliResult<f64> {
    let norm = f.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let extinct = |t: f64| -> CliResult<bool> {
        Ok(prox(spec, f, t, tol)?.u.norm() <= EXTINCTION_THRESHOLD * norm)
    };
    let mut hi = norm * norm / f.len() as f64;
    let mut lo = 0.0;
    let mut doublings = 0;
    while !extinct(hi)? {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(CliError::input("signal does not extinguish; set tmax"));
        }
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if extinct(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-6 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Parses `lo:hi:gain,...`; `hi` may be `inf`.
pub fn parse_filter(text: &str) -> CliResult<TransferFunction> {
    let bad = |piece: &str| CliError::input(format!("filter piece {piece:?} is not lo:hi:gain"));
    let mut pieces = Vec::new();
    for piece in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let parts: Vec<&str> = piece.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(piece));
        }
        let num = |s: &str| -> CliResult<f64> {
            match s.trim() {
                "inf" | "+inf" | "Inf" => Ok(f64::INFINITY),
                v => v.parse().map_err(|_| bad(piece)),
            }
        };
        pieces.push((num(parts[0])?, num(parts[1])?, num(parts[2])?));
    }
    if pieces.is_empty() {
        return Err(CliError::input("filter has no pieces"));
    }
    Ok(TransferFunction::from_pieces(pieces)?)
}
