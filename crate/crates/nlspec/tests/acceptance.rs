//! Acceptance suite: nine scenario and property criteria at their stated
//! tolerances. Prints one PASS/FAIL line per criterion and exits nonzero if
//! any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nlspec::checks::{self, reconstruction_error};
use nlspec::config::{extinction_estimate, RunConfig};
use nlspec::synth;
use nlspec_core::oracles::{
    bruteforce_prox, dct_closed_form_path, dct_spectrum, make_tv_eigenfunction,
};
use nlspec_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::result::Result;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(
        elapsed < limit,
        format!("runtime {:.2?} exceeds {:.0?}", elapsed, limit),
    )
}

/// Seeded zero-mean signal used by the Parseval and orthogonality criteria.
fn random_zero_mean(n: usize, seed: u64) -> Signal {
    let f = synth::random(n, seed);
    let mean = f.mean();
    Signal::new_1d(f.values().iter().map(|v| v - mean).collect()).unwrap()
}

/// Extinction time of the TV gradient flow, located on a fine grid
/// (the TV-1D prox is exact, so this is cheap).
fn gradient_flow_extinction(f: &Signal) -> Result<f64, String> {
    let t_vm = extinction_estimate(f, &FunctionalSpec::Tv1d, 1e-12).map_err(err)?;
    let step = t_vm / 4000.0;
    let grid = make_time_grid(GridKind::Uniform, step, 8.0 * t_vm, 32_000).map_err(err)?;
    let path =
        run_gradient_flow(f, &FunctionalSpec::Tv1d, &grid, &FlowOptions::default()).map_err(err)?;
    path.extinction_time()
        .ok_or_else(|| "gradient flow did not go extinct".to_string())
}

/// Uniform grid with step `tau` covering `[tau, 1.25 T]`.
fn grid_with_step(tau: f64, t_ext: f64) -> TimeGrid {
    let count = (1.25 * t_ext / tau).ceil() as usize;
    make_time_grid(GridKind::Uniform, tau, tau * count as f64, count).unwrap()
}

fn tv_flow(f: &Signal, grid: &TimeGrid) -> (ScalePath, SpectralDecomposition) {
    let path = run_gradient_flow(f, &FunctionalSpec::Tv1d, grid, &FlowOptions::default()).unwrap();
    let dec = wavelength_bands(&path).unwrap();
    (path, dec)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let all = checks::eigenfunction_suite(64, 200, 1e-10).map_err(err)?;
    let elapsed = start.elapsed();
    let purity: Vec<_> = all
        .iter()
        .filter(|c| c.name.starts_with("purity"))
        .collect();
    ensure(purity.len() == 3, "missing purity checks".into())?;
    let worst = purity.iter().map(|c| c.value).fold(1.0, f64::min);
    ensure(
        purity.iter().all(|c| c.passed),
        format!(
            "purity below 95%: {:?}",
            purity.iter().map(|c| c.value).collect::<Vec<_>>()
        ),
    )?;
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "min purity {worst:.4} over gf/vm/iss in {elapsed:.2?}"
    ))
}

/// Built-in synthetic suite: one signal per functional.
fn synthetic_suite() -> Vec<(&'static str, Signal)> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let image: Vec<f64> = (0..16 * 16)
        .map(|k| {
            let (i, j) = ((k / 16) as f64, (k % 16) as f64);
            let disc = if (i - 7.5).powi(2) + (j - 8.0).powi(2) < 20.0 {
                1.0
            } else {
                0.0
            };
            disc + 0.1 * rng.gen_range(-1.0..1.0)
        })
        .collect();
    let image = Signal::new_2d(16, 16, image).unwrap();
    let pw = synth::piecewise_linear(128, 0.1, 2).unwrap().noisy;
    let sines = synth::sinusoid_mixture(128, &[3, 7, 12, 20], &[2.0, -1.5, 1.0, 0.8], 0.05, 3)
        .unwrap()
        .noisy;
    vec![
        ("tv1d", pw.clone()),
        ("tv2d-aniso", image.clone()),
        ("tv2d-iso", image),
        ("l1-dct", sines.clone()),
        ("l1-identity", sines),
        ("tgv2", pw),
        ("collab", synth::collab_peaks(40, 6, 5, 2, 4).unwrap().0),
        ("grad-collab", synth::collab_jumps(40, 6, 2, 5).unwrap().0),
    ]
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for (name, f) in synthetic_suite() {
        for method in ["gf", "vm", "iss"] {
            let cfg = RunConfig {
                functional: name.into(),
                beta: (name == "tgv2").then_some(0.05),
                method: method.into(),
                steps: 60,
                ..RunConfig::default()
            };
            let (_, dec, _) = nlspec::commands::run_signal(&f, &cfg)
                .map_err(|e| format!("{name}/{method}: {e}"))?;
            let e = reconstruction_error(&dec, &f);
            ensure(e <= 1e-10, format!("{name}/{method}: relative error {e:e}"))?;
            worst = worst.max(e);
            pairs += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "{pairs} functional/method pairs, max relative error {worst:.2e}, {elapsed:.2?}"
    ))
}

/// Parseval errors at step `tau` and `tau / 2`.
fn parseval_pair(f: &Signal, t_ext: f64) -> Result<[(f64, f64); 2], String> {
    let mut out = [(0.0, 0.0); 2];
    for (slot, tau) in out.iter_mut().zip([t_ext / 400.0, t_ext / 800.0]) {
        let (path, _) = tv_flow(f, &grid_with_step(tau, t_ext));
        let p = parseval_report(f, &path).map_err(err)?;
        ensure(p.extinct, "flow did not go extinct on the grid".into())?;
        *slot = (p.dissipation_error, p.energy_error);
    }
    Ok(out)
}

/// Exact eigenfunction paths leave only roundoff, which does not refine.
fn refines(coarse: f64, fine: f64) -> bool {
    fine < coarse || (coarse < 1e-10 && fine < 1e-10)
}

fn criterion_3() -> Outcome {
    let eigen = make_tv_eigenfunction(64, 1.0).map_err(err)?;
    let random = random_zero_mean(64, 7);
    let mut notes = Vec::new();
    for (name, f, t_ext) in [
        ("eigenfunction", eigen.f.clone(), 1.0 / eigen.lambda),
        ("random", random.clone(), gradient_flow_extinction(&random)?),
    ] {
        let [(d1, e1), (d2, e2)] = parseval_pair(&f, t_ext)?;
        ensure(d1 <= 0.02, format!("{name}: dissipation error {d1:e} > 2%"))?;
        ensure(e1 <= 0.05, format!("{name}: energy error {e1:e} > 5%"))?;
        ensure(
            refines(d1, d2) && refines(e1, e2),
            format!(
                "{name}: halving tau did not reduce errors ({d1:e} -> {d2:e}, {e1:e} -> {e2:e})"
            ),
        )?;
        notes.push(format!("{name} {d1:.1e}/{e1:.1e} -> {d2:.1e}/{e2:.1e}"));
    }
    Ok(format!("dissipation/energy errors: {}", notes.join(", ")))
}

fn max_diff(a: &[Signal], b: &[Signal]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.max_abs_diff(y).unwrap())
        .fold(0.0, f64::max)
}

fn criterion_4() -> Outcome {
    let f = synth::random(128, 4);
    let spec = FunctionalSpec::L1Analysis(Transform::Dct);
    let z = Transform::Dct.forward(f.values(), f.shape());
    let z_max = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let forward = make_time_grid(GridKind::Uniform, 1.2 * z_max / 200.0, 1.2 * z_max, 200).unwrap();
    let mut worst = 0.0f64;
    for method in [Method::GradientFlow, Method::Variational] {
        let generic =
            run_path(method, &f, &spec, &forward, &FlowOptions::default()).map_err(err)?;
        let exact = dct_closed_form_path(&f, &Transform::Dct, method, &forward).map_err(err)?;
        let d = max_diff(generic.u(), exact.u());
        ensure(d <= 1e-8, format!("{method:?}: node difference {d:e}"))?;
        worst = worst.max(d);
    }

    // inverse scale space, compared coefficientwise away from jump steps
    let ds = 0.05;
    let inverse = make_time_grid(GridKind::Uniform, ds, 20.0, 400).unwrap();
    let generic =
        run_inverse_scale_space(&f, &spec, &inverse, &FlowOptions::default()).map_err(err)?;
    let exact = dct_closed_form_path(&f, &Transform::Dct, Method::InverseScaleSpace, &inverse)
        .map_err(err)?;
    let mut iss = 0.0f64;
    let mut skipped = 0;
    for (k, (a, b)) in generic.u().iter().zip(exact.u()).enumerate() {
        let s = inverse.nodes()[k];
        let za = Transform::Dct.forward(a.values(), a.shape());
        let zb = Transform::Dct.forward(b.values(), b.shape());
        for i in 0..z.len() {
            if (s - 1.0 / z[i].abs()).abs() <= ds * (1.0 + 1e-9) {
                skipped += 1;
                continue;
            }
            iss = iss.max((za[i] - zb[i]).abs());
        }
    }
    ensure(iss <= 1e-8, format!("iss coefficient difference {iss:e}"))?;

    // prox(prox(f, a), b) = prox(f, a + b)
    let mut semigroup = 0.0f64;
    for (a, b) in [(0.1, 0.2), (0.3, 0.05), (0.7, 0.9)] {
        let twice = prox(&spec, &prox(&spec, &f, a, 1e-12).unwrap().u, b, 1e-12)
            .unwrap()
            .u;
        let once = prox(&spec, &f, a + b, 1e-12).unwrap().u;
        semigroup = semigroup.max(twice.max_abs_diff(&once).unwrap());
    }
    ensure(
        semigroup <= 1e-12,
        format!("semigroup defect {semigroup:e}"),
    )?;
    Ok(format!(
        "gf/vm {worst:.1e}, iss {iss:.1e} ({skipped} jump-step entries skipped), semigroup {semigroup:.1e}"
    ))
}

fn criterion_5() -> Outcome {
    let sample = synth::sinusoid_mixture(128, &[3, 7, 12, 20], &[2.0, -1.5, 1.0, 0.8], 0.05, 11)
        .map_err(err)?;
    let f = sample.noisy;
    let spec = FunctionalSpec::L1Analysis(Transform::Dct);
    let grid = TimeGrid::from_nodes(
        (1..=300).map(|k| k as f64 / 100.0).collect(),
        GridKind::Custom,
    )
    .unwrap();
    let (_, dec) = decompose(
        &f,
        &spec,
        Method::GradientFlow,
        &grid,
        &FlowOptions::default(),
    )
    .map_err(err)?;

    // peaks: the four cosines stand well clear of the noise floor
    let peaks = dct_spectrum(&f, &Transform::Dct).map_err(err)?;
    let strong = peaks.iter().filter(|p| p.t >= 0.3).count();
    let in_gap = peaks.iter().filter(|p| p.t > 0.25 && p.t < 0.6).count();
    let spectrum = spectrum_l1(&dec);
    let gap_mass: f64 = spectrum
        .bins
        .iter()
        .zip(spectrum.masses())
        .filter(|(b, _)| b.at > 0.25 && b.at < 0.6)
        .map(|(_, m)| m)
        .sum();
    ensure(
        strong == 4 && in_gap == 0 && gap_mass < 1e-9,
        format!("peaks not separated: {strong} above 0.3, {in_gap} in gap, gap mass {gap_mass:e}"),
    )?;

    let filtered = apply_filter(&dec, &TransferFunction::low_pass(0.3).unwrap());
    let z = Transform::Dct.forward(f.values(), f.shape());
    let kept: Vec<f64> = z
        .iter()
        .map(|&c| if c.abs() >= 0.3 { c } else { 0.0 })
        .collect();
    let hard = Signal::new_1d(Transform::Dct.inverse(&kept, f.shape())).unwrap();
    let diff = filtered.max_abs_diff(&hard).unwrap();
    let zf = Transform::Dct.forward(filtered.values(), f.shape());
    let same_set = zf
        .iter()
        .zip(&kept)
        .all(|(a, b)| (a.abs() > 1e-9) == (*b != 0.0));
    ensure(same_set, "retained coefficient sets differ".into())?;
    ensure(
        diff <= 1e-10,
        format!("max difference to hard thresholding {diff:e}"),
    )?;
    Ok(format!(
        "4 separated peaks, max difference to hard thresholding {diff:.1e}"
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let sample = synth::piecewise_linear(256, 0.1, 1).map_err(err)?;
    let f = &sample.noisy;
    let spec = FunctionalSpec::tgv2(0.05).map_err(err)?;
    let grid = make_time_grid(GridKind::Uniform, 0.005, 0.6, 120).unwrap();
    let (_, dec) = decompose(
        f,
        &spec,
        Method::InverseScaleSpace,
        &grid,
        &FlowOptions::default(),
    )
    .map_err(err)?;
    // low-pass cutoff by the discrepancy principle: the first s at which
    // the retained part explains the data up to the noise level
    let noise = sample.sigma * (f.len() as f64).sqrt();
    let mut chosen = None;
    for &s in grid.nodes() {
        let low = apply_filter(&dec, &TransferFunction::low_pass(1.0 / s).unwrap());
        if low.sub(f).unwrap().norm() <= noise {
            chosen = Some((s, low));
            break;
        }
    }
    let (s, low) = chosen.ok_or("residual never reached the noise level")?;
    let err_low = low.relative_error(&sample.clean).unwrap();
    let err_noisy = f.relative_error(&sample.clean).unwrap();
    let elapsed = start.elapsed();
    ensure(
        err_low <= 0.5 * err_noisy,
        format!("low-pass error {err_low:.4} exceeds half the noisy error {err_noisy:.4}"),
    )?;
    within(elapsed, Duration::from_secs(600))?;
    Ok(format!(
        "low-pass at s = {s:.3}: error {err_low:.4} vs noisy {err_noisy:.4} (ratio {:.2}), {elapsed:.2?}",
        err_low / err_noisy
    ))
}

fn nonzero_rows(s: &Signal, cols: usize, all: bool) -> Vec<usize> {
    s.values()
        .chunks(cols)
        .enumerate()
        .filter(|(_, row)| {
            if all {
                row.iter().all(|v| *v != 0.0)
            } else {
                row.iter().any(|v| *v != 0.0)
            }
        })
        .map(|(i, _)| i)
        .collect()
}

fn criterion_7() -> Outcome {
    // shared sparse support: individual peaks are at most 0.3 per signal,
    // so their rows (whose l1 norm is the extinction time) die before
    // 15 * 0.3 = 4.5, while common rows live until at least 15 * 0.5 = 7.5
    let (peaks, support) = synth::collab_peaks(100, 15, 10, 3, 5).map_err(err)?;
    let grid = make_time_grid(GridKind::Uniform, 0.05, 25.0, 500).unwrap();
    let (_, dec) = decompose(
        &peaks,
        &FunctionalSpec::CollabLinf1,
        Method::GradientFlow,
        &grid,
        &FlowOptions::default(),
    )
    .map_err(err)?;
    let low = apply_filter(&dec, &TransferFunction::low_pass(6.0).unwrap());
    let touched = nonzero_rows(&low, 15, false);
    let full = nonzero_rows(&low, 15, true);
    ensure(
        touched == support && full == support,
        format!("low-pass support rows {touched:?}, expected {support:?}"),
    )?;

    // joint jumps: the coarsest band holds one jump shared by all signals
    let (jumps, shared) = synth::collab_jumps(100, 15, 3, 5).map_err(err)?;
    let spec = FunctionalSpec::GradCollabLinf1;
    let (f0, _) = remove_nullspace(&jumps, &spec).map_err(err)?;
    let t_ext = extinction_estimate(&f0, &spec, 1e-6).map_err(err)?;
    let grid = make_time_grid(GridKind::Geometric, 0.01, 2.0 * t_ext, 150).unwrap();
    let (path, dec) = decompose(
        &jumps,
        &spec,
        Method::GradientFlow,
        &grid,
        &FlowOptions::default(),
    )
    .map_err(err)?;
    ensure(
        path.extinction_index().is_some(),
        "joint-jump flow did not go extinct".into(),
    )?;
    let last = dec
        .bands()
        .iter()
        .rposition(|b| b.atom.max_abs() > 0.0)
        .ok_or("no nonzero band")?;
    let t_last = dec.bands()[last].wavelength.at;
    let strongest = apply_filter(&dec, &TransferFunction::low_pass(t_last).unwrap());
    let v = strongest.values();
    let diffs: Vec<f64> = (1..100)
        .map(|i| {
            (0..15)
                .map(|j| (v[i * 15 + j] - v[(i - 1) * 15 + j]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let top = diffs.iter().cloned().fold(0.0, f64::max);
    let jump_rows: Vec<usize> = (1..100).filter(|&i| diffs[i - 1] > 1e-6 * top).collect();
    let every_column_jumps =
        (0..15).all(|j| (v[shared * 15 + j] - v[(shared - 1) * 15 + j]).abs() > 1e-6 * top);
    ensure(
        jump_rows == vec![shared] && every_column_jumps,
        format!("strongest low-pass jumps at rows {jump_rows:?}, expected [{shared}]"),
    )?;
    Ok(format!(
        "peak support = {} common rows; coarsest low-pass (t >= {t_last:.1}) jumps only at row {shared}",
        support.len()
    ))
}

fn random_shape_signal(rng: &mut ChaCha8Rng, shape: Shape) -> Signal {
    let v: Vec<f64> = (0..shape.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    match shape {
        Shape::D1(_) => Signal::new_1d(v).unwrap(),
        Shape::D2 { rows, cols } => Signal::new_2d(rows, cols, v).unwrap(),
    }
}

fn criterion_8() -> Outcome {
    let square = Shape::D2 { rows: 2, cols: 2 };
    let line = Shape::D1(4);
    let cases = [
        ("tv1d", FunctionalSpec::Tv1d, line),
        ("tv2d-aniso", FunctionalSpec::Tv2dAniso, square),
        ("tv2d-iso", FunctionalSpec::Tv2dIso, square),
        ("l1-dct", FunctionalSpec::L1Analysis(Transform::Dct), line),
        ("tgv2", FunctionalSpec::tgv2(0.3).unwrap(), line),
        ("collab", FunctionalSpec::CollabLinf1, square),
        ("grad-collab", FunctionalSpec::GradCollabLinf1, square),
    ];
    let mut worst = 0.0f64;
    for (seed, (name, spec, shape)) in cases.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed as u64);
        for trial in 0..50 {
            let f = random_shape_signal(&mut rng, shape);
            let t = rng.gen_range(0.05..1.5);
            let fast = prox(&spec, &f, t, 1e-12)
                .map_err(|e| format!("{name} trial {trial}: {e}"))?
                .u;
            let slow = bruteforce_prox(&spec, &f, t, 24).map_err(err)?;
            let d = fast.max_abs_diff(&slow).unwrap();
            ensure(d < 1e-3, format!("{name} trial {trial}: difference {d:e}"))?;
            worst = worst.max(d);
        }
    }
    Ok(format!(
        "7 functionals x 50 instances, max difference {worst:.1e}"
    ))
}

fn criterion_9() -> Outcome {
    let f = random_zero_mean(64, 7);
    let t_ext = gradient_flow_extinction(&f)?;
    let mut ratios = [0.0; 2];
    for (slot, tau) in ratios.iter_mut().zip([t_ext / 400.0, t_ext / 800.0]) {
        let (path, dec) = tv_flow(&f, &grid_with_step(tau, t_ext));
        *slot = orthogonality_report(&path, &dec).map_err(err)?.max_ratio;
    }
    ensure(ratios[0] <= 0.05, format!("ratio {:e} > 0.05", ratios[0]))?;
    ensure(
        ratios[1] < ratios[0],
        format!("ratio did not decrease: {:e} -> {:e}", ratios[0], ratios[1]),
    )?;
    Ok(format!(
        "max ratio {:.2e} at T/400, {:.2e} at T/800",
        ratios[0], ratios[1]
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("eigenfunction purity", criterion_1),
        ("reconstruction", criterion_2),
        ("parseval", criterion_3),
        ("l1 method agreement", criterion_4),
        ("dct hard thresholding", criterion_5),
        ("tgv denoising", criterion_6),
        ("collaborative support", criterion_7),
        ("prox vs brute force", criterion_8),
        ("orthogonality", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
