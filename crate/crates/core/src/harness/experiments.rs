use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use super::{mean_and_stderr, Check, ExperimentConfig, ExperimentKind, ExperimentResult, HarnessError, Report};
use crate::combinatorics::{
    constants_table, jet_covariance, jet_multi_indices, predicted_euler, predicted_pairing, predicted_volume,
    ratio_to_f64, signed_permutation_sum_bruteforce, signed_permutation_sum_closed_form, sphere_volume,
    PermutationScope,
};
use crate::ensemble::{empirical_jet_covariance, exact_jet_covariance, stream_rng, Ensemble, TorusSpec, WaveSample};
use crate::grassmann::{leading_constant, quadratic_vanishing_check};
use crate::nodal::{
    conormal_pairing, find_zeros_circle, marching_cubes, marching_squares, nodal_volume, write_obj,
    write_polyline_csv, FormSpec, NodalError, PairingConfig, SpatialWeight, TestForm,
};

const MAX_ATTEMPTS: u32 = 1000;
const MAX_DISCARD_RATE: f64 = 1e-3;
const THREADS_ENV: &str = "NODAL_LAB_THREADS";

const SRC_CONSTANTS: &str = "B_n·(n+2)^(n/2) = C_n = 2(−1)^((n+1)/2)/(π·Vol S^(n−1)) for odd n, 0 for even n";
const SRC_COMB: &str = "(n−1)!/((n−1)/2)!·(2π²/((n+2)²·Vol))^((n−1)/2) for odd n, 0 for even n";
const SRC_BEREZIN: &str = "(n−1)!/((n−1)/2)! for odd n, 0 for even n";
const SRC_KERNEL: &str = "limiting jet covariance A0/Vol";
const SRC_JET: &str = "exact lattice-sum jet covariance";
const SRC_ZEROS: &str = "Kac–Rice zero count 2Λ/√3";
const SRC_LENGTH: &str = "nodal volume Vol(S^(n−1))/Vol(S^n)·Λ/√(n+2)·∫s dy";
const SRC_PAIRING: &str = "conormal pairing C_n·(Λ/√(n+2))^n·∫∫ω_(0),(1…1), C_n = 2(−1)^((n+1)/2)/(π·Vol S^(n−1)) for odd n, 0 for even n";
const SRC_EULER: &str = "mean Euler characteristic 2(−1)^((n−1)/2)/(π·Vol S^(n−1))·(Λ/√(n+2))^n·Vol";

/// Runs one experiment. Statistical kinds use `samples` independent trials,
/// each on its own RNG stream; the report does not depend on the thread count.
pub fn run(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    config.validate()?;
    let pool = thread_pool(config.threads)?;
    let start = Instant::now();
    let mut report = pool.install(|| match config.kind {
        ExperimentKind::ConstantsTable => constants(config),
        ExperimentKind::CombVerify => comb_verify(config),
        ExperimentKind::BerezinVerify => berezin_verify(config),
        ExperimentKind::KernelCheck => kernel_check(config),
        ExperimentKind::JetCov => jet_cov(config),
        ExperimentKind::ZeroCount => zero_count(config),
        ExperimentKind::NodalLength => nodal_length(config),
        ExperimentKind::Pairing => pairing(config),
        ExperimentKind::Euler3d => euler_3d(config),
    })?;
    let seconds = if config.no_timing { 0.0 } else { start.elapsed().as_secs_f64() };
    for r in &mut report.results {
        r.seconds = seconds;
    }
    Ok(report)
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, HarnessError> {
    let threads = match threads {
        Some(t) => t,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| HarnessError::InvalidConfig(format!("{THREADS_ENV}={v} is not a thread count")))?,
            Err(_) => 0,
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::ThreadPool(e.to_string()))
}

fn torus_volume(n: usize) -> f64 {
    (2.0 * PI).powi(n as i32)
}

fn exact_check(label: String, passed: bool, detail: String) -> Check {
    Check { label, passed, detail }
}

/// `|mean − predicted| ≤ 3·stderr + tol·scale`.
fn statistical_check(r: &ExperimentResult, tol: f64, scale: f64) -> Check {
    let dev = (r.mean - r.predicted).abs();
    let allowed = 3.0 * r.stderr + tol * scale;
    Check {
        label: r.kind.clone(),
        passed: dev <= allowed,
        detail: format!(
            "mean {:.6} vs predicted {:.6}: |Δ| = {dev:.4e}, allowed {allowed:.4e} (3·stderr + {tol}·{scale:.4e})",
            r.mean, r.predicted
        ),
    }
}

fn discard_check(label: &str, discards: usize, samples: usize) -> Check {
    let rate = discards as f64 / (samples + discards) as f64;
    Check {
        label: format!("{label} discards"),
        passed: rate <= MAX_DISCARD_RATE,
        detail: format!("{discards} degenerate draws resampled ({:.3}%)", 100.0 * rate),
    }
}

struct Trials<T> {
    values: Vec<T>,
    discards: usize,
}

/// Runs `f` on `samples` independent draws. A degenerate draw is discarded
/// and the trial redrawn from its next stream.
fn monte_carlo<T, F>(ens: &Ensemble, stream: &str, samples: usize, f: F) -> Result<Trials<T>, HarnessError>
where
    T: Send,
    F: Fn(&WaveSample<'_>) -> Result<T, NodalError> + Sync,
{
    let seed = ens.spec().seed;
    let outcomes: Vec<Result<(T, u32), HarnessError>> = (0..samples as u64)
        .into_par_iter()
        .map(|trial| {
            for attempt in 0..MAX_ATTEMPTS {
                let sample = ens.sample(&mut stream_rng(seed, stream, trial, attempt));
                match f(&sample) {
                    Ok(v) => return Ok((v, attempt)),
                    Err(NodalError::Degenerate { .. }) => continue,
                    Err(e) => return Err(e.into()),
                }
            }
            Err(HarnessError::ResampleExhausted {
                trial,
                attempts: MAX_ATTEMPTS,
            })
        })
        .collect();
    let mut values = Vec::with_capacity(samples);
    let mut discards = 0;
    for o in outcomes {
        let (v, attempts) = o?;
        values.push(v);
        discards += attempts as usize;
    }
    Ok(Trials { values, discards })
}

fn ensemble(config: &ExperimentConfig) -> Result<Ensemble, HarnessError> {
    let spec = TorusSpec::new(config.dimension()?, config.cutoff()?, config.seed)?;
    Ok(Ensemble::new(spec))
}

fn statistical_result(
    config: &ExperimentConfig,
    label: &str,
    values: &[f64],
    discards: usize,
    predicted: f64,
    source: &str,
) -> Result<ExperimentResult, HarnessError> {
    let (mean, stderr) = mean_and_stderr(values);
    let mut r = ExperimentResult::new(
        label,
        config.dimension()?,
        config.lambda,
        values.len(),
        mean,
        stderr,
        predicted,
        config.seed,
        source,
    );
    r.discards = discards;
    Ok(r)
}

fn constants(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let mut report = Report::default();
    for row in constants_table(config.dimension()?)? {
        let n = row.n as f64;
        let scaled = row.b_n * (n + 2.0).powf(n / 2.0);
        let r = ExperimentResult::new("constants-table", row.n, None, 1, row.c_n, 0.0, scaled, config.seed, SRC_CONSTANTS);
        let agree = (row.c_n - scaled).abs() <= 1e-12 * row.c_n.abs().max(1.0);
        report.checks.push(exact_check(
            format!("constants-table n={}", row.n),
            agree && row.matches,
            format!(
                "C_n = {:.15}, B_n·(n+2)^(n/2) = {scaled:.15}, signed sum {} (closed form {})",
                row.c_n, row.sum_bruteforce, row.sum_closed
            ),
        ));
        report.results.push(r);
    }
    Ok(report)
}

fn comb_verify(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let mut report = Report::default();
    for n in 1..=config.dimension()? {
        let brute = signed_permutation_sum_bruteforce(n, 0, PermutationScope::Involutions)?;
        let closed = signed_permutation_sum_closed_form(n);
        let vol = torus_volume(n);
        report.results.push(ExperimentResult::new(
            "comb-verify",
            n,
            None,
            1,
            brute.to_f64(vol),
            0.0,
            closed.to_f64(vol),
            config.seed,
            SRC_COMB,
        ));
        report.checks.push(exact_check(
            format!("comb-verify n={n}"),
            brute == closed,
            format!("partition sum {brute}, closed form {closed}"),
        ));
    }
    Ok(report)
}

fn berezin_expected(n: usize) -> BigRational {
    if n.is_multiple_of(2) {
        return BigRational::from_integer(BigInt::from(0));
    }
    let ratio: BigInt = ((n - 1) / 2 + 1..n).map(BigInt::from).product();
    BigRational::from_integer(ratio)
}

fn berezin_verify(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let mut report = Report::default();
    for n in 1..=config.dimension()? {
        let got = leading_constant(n, BigRational::one())?;
        let want = berezin_expected(n);
        report.results.push(ExperimentResult::new(
            "berezin-verify",
            n,
            None,
            1,
            ratio_to_f64(&got),
            0.0,
            ratio_to_f64(&want),
            config.seed,
            SRC_BEREZIN,
        ));
        report.checks.push(exact_check(
            format!("berezin-verify n={n}"),
            got == want,
            format!("leading constant {got}, expected {want}"),
        ));
        if n <= 6 {
            let mut holds = true;
            for r in 1..=n {
                holds &= quadratic_vanishing_check(n, r)?;
            }
            report.checks.push(exact_check(
                format!("quadratic vanishing n={n}"),
                holds,
                format!("all r = 1..{n}: {}", if holds { "vanishes" } else { "nonzero" }),
            ));
        }
    }
    Ok(report)
}

/// Jet slots whose multi-index appears for the first time (drops the
/// duplicated mixed second derivatives).
fn distinct_slots(n: usize) -> Vec<usize> {
    let idx = jet_multi_indices(n);
    (0..idx.len()).filter(|&a| !idx[..a].contains(&idx[a])).collect()
}

fn kernel_check(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let n = config.dimension()?;
    let spec = TorusSpec::new(n, config.cutoff()?, config.seed)?;
    let lattice = exact_jet_covariance(&spec);
    let limit = jet_covariance(n).to_f64() / spec.volume();
    let tol = config.tolerance();
    let slots = distinct_slots(n);
    let mut report = Report::default();
    let mut worst = 0.0f64;
    for (i, &a) in slots.iter().enumerate() {
        for &b in &slots[i..] {
            let r = ExperimentResult::new(
                format!("kernel-check[{a},{b}]"),
                n,
                config.lambda,
                1,
                lattice[(a, b)],
                0.0,
                limit[(a, b)],
                config.seed,
                SRC_KERNEL,
            );
            if limit[(a, b)].abs() >= 1e-3 {
                worst = worst.max((lattice[(a, b)] / limit[(a, b)] - 1.0).abs());
            }
            report.results.push(r);
        }
    }
    report.checks.push(exact_check(
        "kernel-check".into(),
        worst <= tol,
        format!("largest relative deviation {worst:.4} on entries ≥ 1e-3 (allowed {tol})"),
    ));
    Ok(report)
}

fn jet_cov(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let ens = ensemble(config)?;
    let n = ens.n();
    // A generic point, so that both phases of every mode contribute.
    let y: Vec<f64> = (0..n).map(|d| 0.7 * (d + 1) as f64).collect();
    let emp = empirical_jet_covariance(&ens, &y, config.samples, "jet-cov");
    let exact = exact_jet_covariance(ens.spec());
    let tol = config.tolerance();
    let slots = distinct_slots(n);
    let mut report = Report::default();
    let mut failures = Vec::new();
    for (i, &a) in slots.iter().enumerate() {
        for &b in &slots[i..] {
            let r = ExperimentResult::new(
                format!("jet-cov[{a},{b}]"),
                n,
                config.lambda,
                config.samples,
                emp.mean[(a, b)],
                emp.stderr[(a, b)],
                exact[(a, b)],
                config.seed,
                SRC_JET,
            );
            let check = statistical_check(&r, tol, r.predicted.abs());
            if !check.passed {
                failures.push(check.label.clone());
            }
            report.results.push(r);
        }
    }
    let worst = report
        .results
        .iter()
        .filter_map(|r| r.z)
        .fold(0.0f64, |m, z| m.max(z.abs()));
    report.checks.push(exact_check(
        "jet-cov".into(),
        failures.is_empty(),
        format!(
            "{} entries, largest |z| = {worst:.3}; outside 3·stderr: {}",
            report.results.len(),
            if failures.is_empty() { "none".to_string() } else { failures.join(" ") }
        ),
    ));
    Ok(report)
}

fn zero_count(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let ens = ensemble(config)?;
    let lambda = ens.spec().lambda;
    let grid = config.grid_points(lambda);
    let trials = monte_carlo(&ens, "zero-count", config.samples, |f| {
        Ok(find_zeros_circle(f, grid, 1e-12)?.len() as f64)
    })?;
    let predicted = predicted_euler(1, lambda, torus_volume(1))?;
    let r = statistical_result(config, "zero-count", &trials.values, trials.discards, predicted, SRC_ZEROS)?;
    Ok(Report {
        checks: vec![
            statistical_check(&r, config.tolerance(), predicted.abs()),
            discard_check("zero-count", trials.discards, config.samples),
        ],
        results: vec![r],
    })
}

fn nodal_length(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let ens = ensemble(config)?;
    let lambda = ens.spec().lambda;
    let grid = config.grid_points(lambda);
    let weight = SpatialWeight::CosSquared { axis: 0 };
    let trials = monte_carlo(&ens, "nodal-length", config.samples, |f| {
        let mesh = marching_squares(f, grid, 0.0)?;
        Ok((nodal_volume(&mesh, |_| 1.0), nodal_volume(&mesh, |x| weight.value(x))))
    })?;
    let vol = torus_volume(2);
    let plain: Vec<f64> = trials.values.iter().map(|v| v.0).collect();
    let weighted: Vec<f64> = trials.values.iter().map(|v| v.1).collect();
    let p0 = predicted_volume(2, lambda, vol, SpatialWeight::One.integral(2));
    let p1 = predicted_volume(2, lambda, vol, weight.integral(2));
    let r0 = statistical_result(config, "nodal-length", &plain, trials.discards, p0, SRC_LENGTH)?;
    let r1 = statistical_result(config, "nodal-length:cos2", &weighted, trials.discards, p1, SRC_LENGTH)?;
    Ok(Report {
        checks: vec![
            statistical_check(&r0, config.tolerance(), p0),
            statistical_check(&r1, config.tolerance.unwrap_or(0.07), p1),
            discard_check("nodal-length", trials.discards, config.samples),
        ],
        results: vec![r0, r1],
    })
}

/// Magnitude of the leading pairing term as if the dimension were odd; the
/// pass slack for even dimensions, where the prediction is zero.
fn pairing_scale(n: usize, lambda: f64, form_integral: f64) -> f64 {
    2.0 / (PI * sphere_volume(n - 1)) * (lambda / (n as f64 + 2.0).sqrt()).powi(n as i32) * form_integral.abs()
}

pub(crate) fn default_form() -> FormSpec {
    FormSpec {
        weight: SpatialWeight::CosSquared { axis: 0 },
        ..FormSpec::default()
    }
}

fn pairing(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let ens = ensemble(config)?;
    let n = ens.n();
    let lambda = ens.spec().lambda;
    let form = TestForm::new(n, config.form.clone().unwrap_or_else(default_form))?;
    let cfg = PairingConfig {
        nodes: config.quadrature_nodes,
        eps_grad_factor: 1e-8,
        grid: config.grid_points(lambda),
    };
    let trials = monte_carlo(&ens, "pairing", config.samples, |f| conormal_pairing(f, &form, &cfg))?;
    let integral = form.fiber_integral();
    let predicted = predicted_pairing(n, lambda, integral);
    let r = statistical_result(config, "pairing", &trials.values, trials.discards, predicted, SRC_PAIRING)?;
    Ok(Report {
        checks: vec![
            statistical_check(&r, config.tolerance(), pairing_scale(n, lambda, integral)),
            discard_check("pairing", trials.discards, config.samples),
        ],
        results: vec![r],
    })
}

fn euler_3d(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let ens = ensemble(config)?;
    let lambda = ens.spec().lambda;
    let grid = config.grid_points(lambda);
    let trials = monte_carlo(&ens, "euler-3d", config.samples, |f| {
        Ok(marching_cubes(f, grid, 0.0)?.euler_characteristic() as f64)
    })?;
    let predicted = predicted_euler(3, lambda, torus_volume(3))?;
    let r = statistical_result(config, "euler-3d", &trials.values, trials.discards, predicted, SRC_EULER)?;
    Ok(Report {
        checks: vec![
            statistical_check(&r, config.tolerance(), predicted.abs()),
            discard_check("euler-3d", trials.discards, config.samples),
        ],
        results: vec![r],
    })
}

/// Writes the nodal mesh of the first trial's draw: a polyline CSV for
/// `n = 2`, OBJ text for `n = 3`.
pub fn dump_mesh(config: &ExperimentConfig, path: &Path) -> Result<(), HarnessError> {
    config.validate()?;
    if !config.kind.is_statistical() || config.kind == ExperimentKind::JetCov {
        return Err(HarnessError::InvalidConfig(format!("{} has no nodal mesh", config.kind)));
    }
    let ens = ensemble(config)?;
    let grid = config.grid_points(ens.spec().lambda);
    let f = ens.sample(&mut stream_rng(config.seed, config.kind.as_str(), 0, 0));
    match ens.n() {
        2 => write_polyline_csv(&marching_squares(&f, grid, 0.0)?, path)?,
        3 => write_obj(&marching_cubes(&f, grid, 0.0)?, path)?,
        n => {
            return Err(HarnessError::InvalidConfig(format!(
                "mesh dumps exist for n = 2 and 3, not {n}"
            )))
        }
    }
    Ok(())
}
