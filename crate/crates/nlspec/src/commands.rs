//! The five subcommands as library functions: `decompose`, `filter`,
//! `spectrum`, `verify` and `gen`.

use std::fs;
use std::path::{Path, PathBuf};

use nlspec_core::{
    apply_filter, decompose, orthogonality_report, parseval_report, remove_nullspace,
    spectrum_energy, spectrum_l1, to_wavelength, Band, Bin, FlowOptions, FunctionalSpec, Method,
    Representation, ScalePath, Shape, Signal, SpectralDecomposition, TransferFunction,
};
use serde::{Deserialize, Serialize};

use crate::checks::{self, method_name, reconstruction_error, Check};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io;
use crate::synth;

/// Bin edges that may be infinite, stored as the string `"inf"` in JSON.
mod edge {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            Repr::Text("inf".into()).serialize(s)
        } else {
            Repr::Num(*v).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid bin edge {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinEntry {
    #[serde(with = "edge")]
    pub lo: f64,
    #[serde(with = "edge")]
    pub at: f64,
    #[serde(with = "edge")]
    pub hi: f64,
}

impl From<Bin> for BinEntry {
    fn from(b: Bin) -> Self {
        BinEntry {
            lo: b.lo,
            at: b.at,
            hi: b.hi,
        }
    }
}

impl From<BinEntry> for Bin {
    fn from(b: BinEntry) -> Self {
        Bin {
            lo: b.lo,
            at: b.at,
            hi: b.hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandEntry {
    pub index: usize,
    pub wavelength: BinEntry,
    pub frequency: BinEntry,
    /// Lossless CSV of the atom, relative to the manifest directory.
    pub file: String,
    /// 16-bit PGM preview for 2D signals.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub preview: Option<String>,
}

/// Index of a decomposition written by `nlspec decompose`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub input: String,
    pub input_sha256: String,
    pub shape: Vec<usize>,
    pub config: RunConfig,
    /// Order of `bands`: `wavelength` or `frequency`.
    pub representation: String,
    pub extinction_time: Option<f64>,
    pub bands: Vec<BandEntry>,
    pub tail: String,
    pub nullspace: String,
    pub spectrum: String,
    pub diagnostics: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsevalSummary {
    pub dissipation_error: f64,
    pub energy_error: f64,
    pub clipped: f64,
    pub extinct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalitySummary {
    pub max_ratio: f64,
    pub extinction_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub method: String,
    pub functional: String,
    pub bands: usize,
    pub grid_first: f64,
    pub grid_last: f64,
    pub extinction_time: Option<f64>,
    pub reconstruction_error: f64,
    pub max_abs_reconstruction_error: f64,
    pub parseval: Option<ParsevalSummary>,
    pub orthogonality: Option<OrthogonalitySummary>,
}

fn shape_vec(s: Shape) -> Vec<usize> {
    match s {
        Shape::D1(n) => vec![n],
        Shape::D2 { rows, cols } => vec![rows, cols],
    }
}

fn rep_name(r: Representation) -> &'static str {
    match r {
        Representation::Wavelength => "wavelength",
        Representation::Frequency => "frequency",
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Writes a signal as CSV, or as PGM when the path ends in `.pgm`.
pub fn write_signal(path: &Path, s: &Signal) -> CliResult<()> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
    {
        io::write_pgm(path, s)
    } else {
        io::write_csv(path, s)
    }
}

/// Input signal, its file hash, the validated functional and the run.
pub struct Run {
    pub f: Signal,
    pub sha256: String,
    pub spec: FunctionalSpec,
    pub path: ScalePath,
    pub dec: SpectralDecomposition,
}

/// Reads `input` and decomposes it according to `cfg`.
pub fn run(input: &Path, cfg: &RunConfig) -> CliResult<Run> {
    let bytes = io::read_bytes(input)?;
    let sha256 = io::sha256_hex(&bytes);
    let f = io::read_signal(input, cfg.spacing)?;
    let (path, dec, spec) = run_signal(&f, cfg)?;
    Ok(Run {
        f,
        sha256,
        spec,
        path,
        dec,
    })
}

/// Decomposes an in-memory signal according to `cfg`.
pub fn run_signal(
    f: &Signal,
    cfg: &RunConfig,
) -> CliResult<(ScalePath, SpectralDecomposition, FunctionalSpec)> {
    let spec = cfg.functional_spec()?;
    spec.validate_for(f.shape())?;
    let method = cfg.method()?;
    let (f0, _) = remove_nullspace(f, &spec)?;
    let grid = cfg.time_grid(&f0, &spec)?;
    let (path, dec) = decompose(f, &spec, method, &grid, &FlowOptions::with_tol(cfg.tol))?;
    Ok((path, dec, spec))
}

pub fn diagnostics(run: &Run, cfg: &RunConfig) -> CliResult<Diagnostics> {
    let back = nlspec_core::reconstruct(&run.dec);
    let (parseval, orthogonality) = if run.path.method() == Method::GradientFlow {
        let p = parseval_report(run.path.f(), &run.path)?;
        let o = orthogonality_report(&run.path, &run.dec)?;
        (
            Some(ParsevalSummary {
                dissipation_error: p.dissipation_error,
                energy_error: p.energy_error,
                clipped: p.clipped,
                extinct: p.extinct,
            }),
            Some(OrthogonalitySummary {
                max_ratio: o.max_ratio,
                extinction_ratio: o.extinction_ratio,
            }),
        )
    } else {
        (None, None)
    };
    Ok(Diagnostics {
        method: cfg.method.clone(),
        functional: cfg.functional.clone(),
        bands: run.dec.len(),
        grid_first: run.path.grid().first(),
        grid_last: run.path.grid().last(),
        extinction_time: run.path.extinction_time(),
        reconstruction_error: reconstruction_error(&run.dec, &run.f),
        max_abs_reconstruction_error: back.max_abs_diff(&run.f)?,
        parseval,
        orthogonality,
    })
}

/// `t,s_l1` rows on the wavelength axis, plus `s_energy` for gradient flows.
pub fn spectrum_csv(path: &ScalePath, dec: &SpectralDecomposition) -> CliResult<String> {
    let l1 = spectrum_l1(dec);
    let energy = if path.method() == Method::GradientFlow {
        Some(spectrum_energy(path)?)
    } else {
        None
    };
    let mut out = String::from(if energy.is_some() {
        "t,s_l1,s_energy\n"
    } else {
        "t,s_l1\n"
    });
    for (k, bin) in l1.bins.iter().enumerate() {
        out.push_str(&io::format_f64(bin.at));
        out.push(',');
        out.push_str(&io::format_f64(l1.values[k]));
        if let Some(e) = &energy {
            out.push(',');
            out.push_str(&io::format_f64(e.values[k]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes bands, tail, nullspace, spectrum, diagnostics and the manifest
/// into `out_dir`. Returns the manifest.
pub fn decompose_cmd(input: &Path, out_dir: &Path, cfg: &RunConfig) -> CliResult<Manifest> {
    let run = run(input, cfg)?;
    let bands_dir = out_dir.join("bands");
    create_dir(&bands_dir)?;
    let is_2d = matches!(run.f.shape(), Shape::D2 { .. });
    let mut entries = Vec::with_capacity(run.dec.len());
    for (k, band) in run.dec.bands().iter().enumerate() {
        let file = format!("bands/band_{k:04}.csv");
        io::write_csv(&out_dir.join(&file), &band.atom)?;
        let preview = if is_2d {
            let p = format!("bands/band_{k:04}.pgm");
            io::write_pgm(&out_dir.join(&p), &band.atom)?;
            Some(p)
        } else {
            None
        };
        entries.push(BandEntry {
            index: k,
            wavelength: band.wavelength.into(),
            frequency: band.frequency.into(),
            file,
            preview,
        });
    }
    io::write_csv(&out_dir.join("tail.csv"), run.dec.tail())?;
    io::write_csv(&out_dir.join("nullspace.csv"), run.dec.nullspace())?;
    io::write_string(
        &out_dir.join("spectrum.csv"),
        &spectrum_csv(&run.path, &run.dec)?,
    )?;
    let diag = diagnostics(&run, cfg)?;
    io::write_string(&out_dir.join("diagnostics.json"), &to_json(&diag))?;
    let manifest = Manifest {
        input: input.display().to_string(),
        input_sha256: run.sha256.clone(),
        shape: shape_vec(run.f.shape()),
        config: cfg.clone(),
        representation: rep_name(run.dec.representation()).into(),
        extinction_time: run.path.extinction_time(),
        bands: entries,
        tail: "tail.csv".into(),
        nullspace: "nullspace.csv".into(),
        spectrum: "spectrum.csv".into(),
        diagnostics: "diagnostics.json".into(),
    };
    io::write_string(&out_dir.join("manifest.json"), &to_json(&manifest))?;
    Ok(manifest)
}

pub fn read_manifest(path: &Path) -> CliResult<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Rebuilds the decomposition stored under a manifest after checking that
/// `input` is the file it was computed from.
pub fn load_decomposition(
    manifest_path: &Path,
    input: &Path,
) -> CliResult<(Manifest, Signal, SpectralDecomposition)> {
    let manifest = read_manifest(manifest_path)?;
    let bytes = io::read_bytes(input)?;
    let hash = io::sha256_hex(&bytes);
    if hash != manifest.input_sha256 {
        return Err(CliError::ManifestMismatch(format!(
            "{} has sha256 {hash}, manifest records {}",
            input.display(),
            manifest.input_sha256
        )));
    }
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let spacing = manifest.config.spacing;
    let f = io::read_signal(input, spacing)?;
    let load = |name: &str| -> CliResult<Signal> {
        let s = io::read_signal(&dir.join(name), spacing)?;
        Signal::from_parts(s.into_values(), f.shape(), spacing)
            .map_err(|_| CliError::input(format!("{name}: shape differs from the input")))
    };
    let bands = manifest
        .bands
        .iter()
        .map(|b| {
            Ok(Band {
                atom: load(&b.file)?,
                wavelength: b.wavelength.into(),
                frequency: b.frequency.into(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let representation = match manifest.representation.as_str() {
        "wavelength" => Representation::Wavelength,
        "frequency" => Representation::Frequency,
        other => return Err(CliError::input(format!("unknown representation {other:?}"))),
    };
    let dec = SpectralDecomposition::from_parts(
        bands,
        load(&manifest.tail)?,
        load(&manifest.nullspace)?,
        manifest.config.method()?,
        representation,
    )?;
    Ok((manifest, f, dec))
}

/// Outcome of a filter run. `complement_error` is the largest deviation of
/// `H f + (1 - H) f` from `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterReport {
    pub output: String,
    pub complement_error: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Applies the configured transfer function to a stored (`manifest`) or
/// freshly computed decomposition of `input` and writes the result.
pub fn filter_cmd(
    input: &Path,
    manifest: Option<&Path>,
    out: &Path,
    cfg: &RunConfig,
) -> CliResult<FilterReport> {
    let h: TransferFunction = cfg
        .transfer_function()?
        .ok_or_else(|| CliError::input("filter needs --filter lo:hi:gain,..."))?;
    let (f, dec) = match manifest {
        Some(m) => {
            let (_, f, dec) = load_decomposition(m, input)?;
            (f, dec)
        }
        None => {
            let r = run(input, cfg)?;
            (r.f, r.dec)
        }
    };
    let filtered = apply_filter(&dec, &h);
    let rest = apply_filter(&dec, &h.complement());
    let complement_error = filtered.add(&rest)?.max_abs_diff(&f)?;
    let threshold = 1e-9 * (1.0 + f.max_abs());
    write_signal(out, &filtered)?;
    Ok(FilterReport {
        output: out.display().to_string(),
        complement_error,
        threshold,
        passed: complement_error <= threshold,
    })
}

/// Writes `spectrum.csv` content for `input` to `out`.
pub fn spectrum_cmd(input: &Path, out: &Path, cfg: &RunConfig) -> CliResult<()> {
    let r = run(input, cfg)?;
    io::write_string(out, &spectrum_csv(&r.path, &r.dec)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Default signal for non-TV functionals when `verify` gets no input.
fn default_verify_signal(spec: &FunctionalSpec, seed: u64) -> Signal {
    use rand::Rng;
    let mut r = synth::rng(seed);
    let (rows, cols) = match spec {
        FunctionalSpec::Tv2dAniso | FunctionalSpec::Tv2dIso => (12, 12),
        FunctionalSpec::CollabLinf1 | FunctionalSpec::GradCollabLinf1 => (32, 4),
        _ => (0, 64),
    };
    let v: Vec<f64> = (0..rows.max(1) * cols)
        .map(|_| r.gen_range(-1.0..1.0))
        .collect();
    if rows == 0 {
        Signal::new_1d(v).expect("finite")
    } else {
        Signal::new_2d(rows, cols, v).expect("finite")
    }
}

/// Runs the self-check suite. Without `input`, TV runs the eigenfunction
/// scenario and other functionals a seeded random signal. The l1-DCT
/// closed-form comparison always runs.
pub fn verify_cmd(input: Option<&Path>, cfg: &RunConfig) -> CliResult<VerifyReport> {
    let spec = cfg.functional_spec()?;
    let mut checks = Vec::new();
    let scenario;
    match input {
        None if matches!(spec, FunctionalSpec::Tv1d) => {
            scenario = "tv eigenfunction, n = 64".to_string();
            checks.extend(checks::eigenfunction_suite(
                64,
                cfg.steps,
                cfg.tol.min(1e-10),
            )?);
        }
        _ => {
            let f = match input {
                Some(p) => {
                    scenario = p.display().to_string();
                    io::read_signal(p, cfg.spacing)?
                }
                None => {
                    scenario = format!("seeded random signal, seed {}", cfg.seed);
                    default_verify_signal(&spec, cfg.seed)
                }
            };
            let (path, dec, _) = run_signal(&f, cfg)?;
            let name = method_name(path.method());
            checks.push(Check::at_most(
                format!("reconstruction_{name}"),
                reconstruction_error(&dec, &f),
                1e-10,
            ));
            if path.method() == Method::GradientFlow {
                let p = parseval_report(path.f(), &path)?;
                if p.extinct {
                    checks.push(Check::at_most(
                        "parseval_dissipation",
                        p.dissipation_error,
                        0.02,
                    ));
                    checks.push(Check::at_most("parseval_energy", p.energy_error, 0.05));
                }
                let o = orthogonality_report(&path, &to_wavelength(&dec))?;
                checks.push(Check::at_most("orthogonality", o.max_ratio, 0.05));
            }
        }
    }
    let f = synth::random(32, cfg.seed);
    checks.extend(checks::l1_closed_form_checks(
        &f,
        cfg.steps,
        cfg.tol.min(1e-12),
    )?);
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        scenario,
        checks,
        passed,
    })
}

/// Parameters of `nlspec gen`.
#[derive(Debug, Clone)]
pub struct GenRequest {
    pub kind: String,
    pub n: Option<usize>,
    pub seed: u64,
    pub noise: Option<f64>,
    pub out: PathBuf,
    pub clean: Option<PathBuf>,
}

/// Writes a synthetic signal (and optionally its clean version).
pub fn gen_cmd(req: &GenRequest) -> CliResult<()> {
    let (noisy, clean) = match req.kind.as_str() {
        "step" => (synth::step(req.n.unwrap_or(64), 1.0)?, None),
        "random" => (synth::random(req.n.unwrap_or(64), req.seed), None),
        "pwlinear" => {
            let s =
                synth::piecewise_linear(req.n.unwrap_or(256), req.noise.unwrap_or(0.1), req.seed)?;
            (s.noisy, Some(s.clean))
        }
        "sinusoids" => {
            let s = synth::sinusoid_mixture(
                req.n.unwrap_or(128),
                &[3, 7, 12, 20],
                &[2.0, -1.5, 1.0, 0.8],
                req.noise.unwrap_or(0.05),
                req.seed,
            )?;
            (s.noisy, Some(s.clean))
        }
        "collab-peaks" => (
            synth::collab_peaks(req.n.unwrap_or(100), 15, 10, 3, req.seed)?.0,
            None,
        ),
        "collab-jumps" => (
            synth::collab_jumps(req.n.unwrap_or(100), 15, 3, req.seed)?.0,
            None,
        ),
        other => {
            return Err(CliError::input(format!(
                "unknown generator {other:?}; expected one of {}",
                synth::KINDS.join(", ")
            )))
        }
    };
    write_signal(&req.out, &noisy)?;
    match (&req.clean, clean) {
        (Some(p), Some(c)) => write_signal(p, &c),
        (Some(_), None) => Err(CliError::input(format!(
            "{} has no separate clean signal",
            req.kind
        ))),
        _ => Ok(()),
    }
}
