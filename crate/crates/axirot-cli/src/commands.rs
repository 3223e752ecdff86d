//! Subcommand implementations. Parameters resolve in three layers:
//! built-in defaults, then the config file, then flags. The metadata
//! sidecar written next to each output echoes the resolved values, so a
//! run can be reproduced from its artifacts alone.

use crate::config::KeyValues;
use crate::{BatchArgs, Command, EstimateArgs, MethodArg, ShiftArgs, SynthArgs, UnitsArg};
use axirot::estimators::{
    histogram_estimate, median_estimate, ransac_estimate, EstimateError, EstimateResult,
    HistogramConfig, RansacConfig,
};
use axirot::experiments::{
    run_angle_sweep, run_conditioning_map, run_noise_sweep, run_shift_sensitivity, SweepConfig,
    DEFAULT_PIXEL_SCALE,
};
use axirot::geometry::{angle_from_correspondence, complete_pair, Angle, NormalizedPoint};
use axirot::io::{
    parse_correspondences, write_conditioning_table, write_correspondences, write_shift_table,
    write_sidecar, write_sweep_table, IoError,
};
use axirot::seeds::derive;
use axirot::synthetic::{generate_pair, sample_cylinder, CylinderSpec, LatticeSpec, NoiseSpec};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// The shift study probes this fixed first point and second-point x,
/// completed to a correspondence exactly consistent with the configured
/// angle.
const SHIFT_BASE_FIRST: (f64, f64) = (0.25, 0.2);
const SHIFT_BASE_SECOND_X: f64 = 0.2487;

/// A failure with its process exit code: 2 for anything wrong with the
/// input or configuration, 3 when no consensus forms, 4 when no histogram
/// peak clears the support floor, 5 for degenerate geometry.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    NoConsensus(String),
    NoPeak(String),
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NoConsensus(_) => 3,
            CliError::NoPeak(_) => 4,
            CliError::Degenerate(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(message)
            | CliError::NoConsensus(message)
            | CliError::NoPeak(message)
            | CliError::Degenerate(message) => message,
        }
    }
}

impl From<String> for CliError {
    fn from(message: String) -> Self {
        CliError::Usage(message)
    }
}

impl From<IoError> for CliError {
    fn from(error: IoError) -> Self {
        CliError::Usage(error.to_string())
    }
}

fn estimate_failure(error: EstimateError) -> CliError {
    let message = error.to_string();
    match error {
        EstimateError::NoConsensus { .. } => CliError::NoConsensus(message),
        EstimateError::NoPeak { .. } => CliError::NoPeak(message),
        _ => CliError::Usage(message),
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Noise(args) => cmd_noise(args),
        Command::Condmap(args) => cmd_condmap(args),
        Command::Shift(args) => cmd_shift(args),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<KeyValues, CliError> {
    match path {
        Some(path) => KeyValues::load(path).map_err(CliError::Usage),
        None => Ok(KeyValues::empty()),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("AXIROT_SEED") {
        Ok(text) => text.trim().parse().map_err(|_| {
            CliError::Usage(format!("AXIROT_SEED must be an unsigned integer, got '{text}'"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(error) => Err(CliError::Usage(format!("AXIROT_SEED: {error}"))),
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(count) = threads else {
        return Ok(());
    };
    if count == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(count)
        .build_global()
        .map_err(|error| CliError::Usage(format!("thread pool setup failed: {error}")))
}

fn finite_angle(degrees: f64) -> Result<Angle, CliError> {
    if !degrees.is_finite() {
        return Err(CliError::Usage(format!("angle must be finite, got {degrees}")));
    }
    Ok(Angle::from_degrees(degrees))
}

fn ransac_from_config(
    cfg: &mut KeyValues,
    defaults: RansacConfig,
    seed: u64,
) -> Result<RansacConfig, CliError> {
    Ok(RansacConfig {
        success_probability: cfg.take("success_probability", defaults.success_probability)?,
        outlier_fraction: cfg.take("outlier_fraction", defaults.outlier_fraction)?,
        sample_size: cfg.take("sample_size", defaults.sample_size)?,
        sampson_threshold: cfg.take("sampson_threshold", defaults.sampson_threshold)?,
        min_inlier_fraction: cfg.take("min_inlier_fraction", defaults.min_inlier_fraction)?,
        max_iterations_cap: cfg.take("max_iterations_cap", defaults.max_iterations_cap)?,
        rng_seed: seed,
    })
}

fn histogram_from_config(cfg: &mut KeyValues) -> Result<HistogramConfig, CliError> {
    let defaults = HistogramConfig::default();
    Ok(HistogramConfig {
        range_min: finite_angle(cfg.take("histogram_range_min_deg", defaults.range_min.degrees())?)?,
        range_max: finite_angle(cfg.take("histogram_range_max_deg", defaults.range_max.degrees())?)?,
        bin_width: finite_angle(cfg.take("histogram_bin_width_deg", defaults.bin_width.degrees())?)?,
        min_peak_count: cfg.take("histogram_min_peak_count", defaults.min_peak_count)?,
    })
}

fn validate_cylinder(
    axis_distance: f64,
    height: f64,
    radius: f64,
    sigma: f64,
) -> Result<(), CliError> {
    if !(axis_distance > 0.0) || !axis_distance.is_finite() {
        return Err(CliError::Usage("axis_distance must be positive and finite".into()));
    }
    if !(height > 0.0) || !height.is_finite() {
        return Err(CliError::Usage("height must be positive and finite".into()));
    }
    if !(radius > 0.0) || !(radius < axis_distance) {
        return Err(CliError::Usage(
            "radius must be positive and smaller than axis_distance".into(),
        ));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(CliError::Usage("sigma must be nonnegative and finite".into()));
    }
    Ok(())
}

/// Inclusive degree grid from min to max in positive steps.
fn degree_grid(min: f64, max: f64, step: f64) -> Result<Vec<Angle>, CliError> {
    if !min.is_finite() || !max.is_finite() || !(step > 0.0) || max < min {
        return Err(CliError::Usage(
            "angle grid needs finite bounds with max >= min and a positive step".into(),
        ));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| Angle::from_degrees(min + step * k as f64))
        .collect())
}

/// Log-spaced grid with both endpoints exact.
fn log_spaced(min: f64, max: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if !(min > 0.0) || !(max >= min) || !max.is_finite() || count < 2 {
        return Err(CliError::Usage(
            "sigma grid needs 0 < min <= max and at least 2 points".into(),
        ));
    }
    let (lo, hi) = (min.ln(), max.ln());
    Ok((0..count)
        .map(|i| match i {
            0 => min,
            i if i == count - 1 => max,
            i => (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect())
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".meta");
    PathBuf::from(name)
}

fn sidecar_head(command: &str) -> Vec<(&'static str, String)> {
    vec![
        ("artifact_version", env!("CARGO_PKG_VERSION").to_string()),
        ("command", command.to_string()),
    ]
}

fn push_estimator_entries(
    entries: &mut Vec<(&'static str, String)>,
    ransac: &RansacConfig,
    histogram: &HistogramConfig,
) {
    entries.push(("success_probability", ransac.success_probability.to_string()));
    entries.push(("outlier_fraction", ransac.outlier_fraction.to_string()));
    entries.push(("sample_size", ransac.sample_size.to_string()));
    entries.push(("sampson_threshold", ransac.sampson_threshold.to_string()));
    entries.push(("min_inlier_fraction", ransac.min_inlier_fraction.to_string()));
    entries.push(("max_iterations_cap", ransac.max_iterations_cap.to_string()));
    entries.push(("histogram_range_min_deg", histogram.range_min.degrees().to_string()));
    entries.push(("histogram_range_max_deg", histogram.range_max.degrees().to_string()));
    entries.push(("histogram_bin_width_deg", histogram.bin_width.degrees().to_string()));
    entries.push(("histogram_min_peak_count", histogram.min_peak_count.to_string()));
}

fn one_based_list(indices: &[usize]) -> String {
    indices
        .iter()
        .map(|index| (index + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn render_report(result: &EstimateResult, units: UnitsArg) -> String {
    let mut out = String::new();
    writeln!(out, "method={}", result.method).expect("string write cannot fail");
    match units {
        UnitsArg::Deg => writeln!(out, "angle_deg={:.6}", result.angle.degrees()),
        UnitsArg::Rad => writeln!(out, "angle_rad={:.9}", result.angle.radians()),
    }
    .expect("string write cannot fail");
    writeln!(out, "mean_squared_residual={:.16e}", result.mean_squared_residual)
        .expect("string write cannot fail");
    writeln!(out, "iterations={}", result.iterations_run).expect("string write cannot fail");
    writeln!(out, "inlier_rows={}", one_based_list(&result.inlier_indices))
        .expect("string write cannot fail");
    out
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&args.config)?;
    let seed = resolve_seed(args.seed)?;
    let ransac_cfg = ransac_from_config(&mut cfg, RansacConfig::default(), seed)?;
    let histogram_cfg = histogram_from_config(&mut cfg)?;
    cfg.finish()?;
    let parsed = parse_correspondences(&args.file)
        .map_err(|error| CliError::Usage(format!("{}: {error}", args.file.display())))?;
    if parsed
        .pairs
        .iter()
        .all(|pair| angle_from_correspondence(pair).is_err())
    {
        return Err(CliError::Degenerate(format!(
            "all {} correspondences are degenerate",
            parsed.pairs.len()
        )));
    }
    let result = match args.method {
        MethodArg::Ransac => ransac_estimate(&parsed.pairs, &ransac_cfg),
        MethodArg::Histogram => histogram_estimate(&parsed.pairs, &histogram_cfg),
        MethodArg::Median => median_estimate(&parsed.pairs),
    }
    .map_err(estimate_failure)?;
    let report = render_report(&result, args.units);
    print!("{report}");
    if let Some(path) = &args.output {
        std::fs::write(path, &report)
            .map_err(|error| CliError::Usage(format!("{}: {error}", path.display())))?;
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&args.config)?;
    let seed = resolve_seed(args.seed)?;
    let axis_distance = cfg.take("axis_distance", 200.0)?;
    let height = cfg.take("height", 230.0)?;
    let radius = cfg.take("radius", 115.0)?;
    let sigma = cfg.take("sigma", 1e-4)?;
    let inlier_count: usize = cfg.take("inlier_count", 30)?;
    let outlier_count: usize = cfg.take("outlier_count", 70)?;
    let angle_deg = {
        let configured = cfg.take("angle_deg", 15.0)?;
        args.angle_deg.unwrap_or(configured)
    };
    cfg.finish()?;
    validate_cylinder(axis_distance, height, radius, sigma)?;
    let point_count = inlier_count + outlier_count;
    if point_count == 0 {
        return Err(CliError::Usage("scene needs at least one point".into()));
    }
    let alpha = finite_angle(angle_deg)?;
    let spec = CylinderSpec {
        axis_distance,
        height,
        radius,
        point_count,
    };
    let points = sample_cylinder(&spec, derive(seed, 0));
    let noise = NoiseSpec {
        sigma,
        rng_seed: derive(seed, 1),
    };
    let set = generate_pair(&points, alpha, axis_distance, &noise, outlier_count)
        .map_err(|error| CliError::Usage(error.to_string()))?;
    write_correspondences(&args.output, &set.pairs)?;
    let inlier_rows = set
        .inlier_flags
        .iter()
        .enumerate()
        .filter_map(|(index, &genuine)| genuine.then(|| (index + 1).to_string()))
        .collect::<Vec<_>>()
        .join(",");
    let mut entries = sidecar_head("synth");
    entries.push(("seed", seed.to_string()));
    entries.push(("angle_deg", angle_deg.to_string()));
    entries.push(("axis_distance", axis_distance.to_string()));
    entries.push(("height", height.to_string()));
    entries.push(("radius", radius.to_string()));
    entries.push(("sigma", sigma.to_string()));
    entries.push(("inlier_count", inlier_count.to_string()));
    entries.push(("outlier_count", outlier_count.to_string()));
    entries.push(("inlier_rows", inlier_rows));
    write_sidecar(sidecar_path(&args.output), &entries)?;
    Ok(())
}

fn cmd_sweep(args: BatchArgs) -> Result<(), CliError> {
    configure_threads(args.threads)?;
    let mut cfg = load_config(&args.config)?;
    let seed = resolve_seed(args.seed)?;
    let axis_distance = cfg.take("axis_distance", 200.0)?;
    let height = cfg.take("height", 230.0)?;
    let radius = cfg.take("radius", 115.0)?;
    let sigma = cfg.take("sigma", 1e-4)?;
    let inlier_count: usize = cfg.take("inlier_count", 30)?;
    let outlier_count: usize = cfg.take("outlier_count", 70)?;
    let trials: usize = cfg.take("trials", 300)?;
    let angle_min: f64 = cfg.take("angle_min_deg", -80.0)?;
    let angle_max: f64 = cfg.take("angle_max_deg", 80.0)?;
    let angle_step: f64 = cfg.take("angle_step_deg", 5.0)?;
    let defaults = SweepConfig::default();
    let ransac = ransac_from_config(&mut cfg, defaults.ransac, 0)?;
    let histogram = histogram_from_config(&mut cfg)?;
    cfg.finish()?;
    validate_cylinder(axis_distance, height, radius, sigma)?;
    validate_counts(inlier_count, outlier_count, trials)?;
    let sweep = SweepConfig {
        angle_grid: degree_grid(angle_min, angle_max, angle_step)?,
        trials_per_angle: trials,
        scene: CylinderSpec {
            axis_distance,
            height,
            radius,
            point_count: inlier_count + outlier_count,
        },
        noise: NoiseSpec { sigma, rng_seed: 0 },
        outlier_count,
        inlier_count,
        ransac,
        histogram,
        master_seed: seed,
    };
    let rows = run_angle_sweep(&sweep);
    write_sweep_table(&args.output, &rows)?;
    let mut entries = sidecar_head("sweep");
    entries.push(("seed", seed.to_string()));
    entries.push(("angle_min_deg", angle_min.to_string()));
    entries.push(("angle_max_deg", angle_max.to_string()));
    entries.push(("angle_step_deg", angle_step.to_string()));
    entries.push(("trials", trials.to_string()));
    entries.push(("axis_distance", axis_distance.to_string()));
    entries.push(("height", height.to_string()));
    entries.push(("radius", radius.to_string()));
    entries.push(("sigma", sigma.to_string()));
    entries.push(("inlier_count", inlier_count.to_string()));
    entries.push(("outlier_count", outlier_count.to_string()));
    push_estimator_entries(&mut entries, &sweep.ransac, &sweep.histogram);
    write_sidecar(sidecar_path(&args.output), &entries)?;
    Ok(())
}

/// A single outlier cannot be re-paired away from its true partner, so the
/// generator would reject every trial.
fn validate_counts(
    inlier_count: usize,
    outlier_count: usize,
    trials: usize,
) -> Result<(), CliError> {
    if inlier_count + outlier_count == 0 {
        return Err(CliError::Usage("scene needs at least one point".into()));
    }
    if outlier_count == 1 {
        return Err(CliError::Usage(
            "outlier_count must be 0 or at least 2".into(),
        ));
    }
    if trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    Ok(())
}

fn cmd_noise(args: BatchArgs) -> Result<(), CliError> {
    configure_threads(args.threads)?;
    let mut cfg = load_config(&args.config)?;
    let seed = resolve_seed(args.seed)?;
    let axis_distance = cfg.take("axis_distance", 200.0)?;
    let height = cfg.take("height", 230.0)?;
    let radius = cfg.take("radius", 115.0)?;
    let inlier_count: usize = cfg.take("inlier_count", 100)?;
    let outlier_count: usize = cfg.take("outlier_count", 0)?;
    let trials: usize = cfg.take("trials", 300)?;
    let angle_deg: f64 = cfg.take("angle_deg", 30.0)?;
    let sigma_min: f64 = cfg.take("sigma_min", 1e-6)?;
    let sigma_max: f64 = cfg.take("sigma_max", 1e-3)?;
    let sigma_count: usize = cfg.take("sigma_count", 10)?;
    let defaults = SweepConfig::default();
    let ransac = ransac_from_config(&mut cfg, defaults.ransac, 0)?;
    let histogram = histogram_from_config(&mut cfg)?;
    cfg.finish()?;
    validate_cylinder(axis_distance, height, radius, 0.0)?;
    validate_counts(inlier_count, outlier_count, trials)?;
    if outlier_count != 0 {
        return Err(CliError::Usage(
            "the noise sweep runs on outlier-free scenes; set outlier_count=0".into(),
        ));
    }
    let alpha = finite_angle(angle_deg)?;
    let sigma_grid = log_spaced(sigma_min, sigma_max, sigma_count)?;
    let sweep = SweepConfig {
        angle_grid: vec![alpha],
        trials_per_angle: trials,
        scene: CylinderSpec {
            axis_distance,
            height,
            radius,
            point_count: inlier_count,
        },
        noise: NoiseSpec {
            sigma: 0.0,
            rng_seed: 0,
        },
        outlier_count: 0,
        inlier_count,
        ransac,
        histogram,
        master_seed: seed,
    };
    let rows = run_noise_sweep(&sweep, &sigma_grid);
    write_sweep_table(&args.output, &rows)?;
    let mut entries = sidecar_head("noise");
    entries.push(("seed", seed.to_string()));
    entries.push(("angle_deg", angle_deg.to_string()));
    entries.push(("sigma_min", sigma_min.to_string()));
    entries.push(("sigma_max", sigma_max.to_string()));
    entries.push(("sigma_count", sigma_count.to_string()));
    entries.push(("trials", trials.to_string()));
    entries.push(("axis_distance", axis_distance.to_string()));
    entries.push(("height", height.to_string()));
    entries.push(("radius", radius.to_string()));
    entries.push(("inlier_count", inlier_count.to_string()));
    entries.push(("outlier_count", outlier_count.to_string()));
    push_estimator_entries(&mut entries, &sweep.ransac, &sweep.histogram);
    write_sidecar(sidecar_path(&args.output), &entries)?;
    Ok(())
}

fn cmd_condmap(args: BatchArgs) -> Result<(), CliError> {
    configure_threads(args.threads)?;
    let mut cfg = load_config(&args.config)?;
    let seed = resolve_seed(args.seed)?;
    let side: f64 = cfg.take("lattice_side", 200.0)?;
    let points_per_edge: usize = cfg.take("points_per_edge", 21)?;
    let center_distance: f64 = cfg.take("center_distance", 200.0)?;
    let angle_deg: f64 = cfg.take("angle_deg", 21.0)?;
    let sigma: f64 = cfg.take("sigma", 0.004)?;
    let repeats: usize = cfg.take("repeats", 100)?;
    let discard_below_deg: f64 = cfg.take("discard_below_deg", 60.0)?;
    cfg.finish()?;
    if !(side > 0.0) || !side.is_finite() {
        return Err(CliError::Usage("lattice_side must be positive and finite".into()));
    }
    if points_per_edge < 2 {
        return Err(CliError::Usage("points_per_edge must be at least 2".into()));
    }
    // The cube's xz diagonal must clear the camera at every rotation phase.
    if !(center_distance > side * std::f64::consts::FRAC_1_SQRT_2) || !center_distance.is_finite() {
        return Err(CliError::Usage(
            "center_distance must exceed lattice_side / sqrt(2) so the rotated cube stays in front of the camera"
                .into(),
        ));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(CliError::Usage("sigma must be nonnegative and finite".into()));
    }
    if repeats == 0 {
        return Err(CliError::Usage("repeats must be at least 1".into()));
    }
    if !discard_below_deg.is_finite() {
        return Err(CliError::Usage("discard_below_deg must be finite".into()));
    }
    let alpha = finite_angle(angle_deg)?;
    let spec = LatticeSpec {
        side,
        center_distance,
        points_per_edge,
    };
    let noise = NoiseSpec {
        sigma,
        rng_seed: seed,
    };
    let retained = run_conditioning_map(&spec, alpha, &noise, repeats, discard_below_deg);
    write_conditioning_table(&args.output, &retained)?;
    let mut entries = sidecar_head("condmap");
    entries.push(("seed", seed.to_string()));
    entries.push(("lattice_side", side.to_string()));
    entries.push(("points_per_edge", points_per_edge.to_string()));
    entries.push(("center_distance", center_distance.to_string()));
    entries.push(("angle_deg", angle_deg.to_string()));
    entries.push(("sigma", sigma.to_string()));
    entries.push(("repeats", repeats.to_string()));
    entries.push(("discard_below_deg", discard_below_deg.to_string()));
    entries.push(("retained_count", retained.len().to_string()));
    write_sidecar(sidecar_path(&args.output), &entries)?;
    Ok(())
}

fn cmd_shift(args: ShiftArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&args.config)?;
    let angle_deg: f64 = cfg.take("angle_deg", 1.0)?;
    let extent: i64 = cfg.take("shift_extent_px", 1)?;
    let pixel_scale: f64 = cfg.take("pixel_scale", DEFAULT_PIXEL_SCALE)?;
    cfg.finish()?;
    if extent < 0 {
        return Err(CliError::Usage("shift_extent_px must be nonnegative".into()));
    }
    if !(pixel_scale > 0.0) || !pixel_scale.is_finite() {
        return Err(CliError::Usage("pixel_scale must be positive and finite".into()));
    }
    let alpha = finite_angle(angle_deg)?;
    let (base_x, base_y) = SHIFT_BASE_FIRST;
    let base = complete_pair(NormalizedPoint::new(base_x, base_y), SHIFT_BASE_SECOND_X, alpha);
    if angle_from_correspondence(&base).is_err() {
        return Err(CliError::Degenerate(format!(
            "the probe correspondence is degenerate at {angle_deg} degrees"
        )));
    }
    let mut grid = Vec::with_capacity(((2 * extent + 1) * (2 * extent + 1)) as usize);
    for dy in -extent..=extent {
        for dx in -extent..=extent {
            grid.push((dx as f64, dy as f64));
        }
    }
    let cells = run_shift_sensitivity(&base, alpha, &grid, pixel_scale);
    write_shift_table(&args.output, &cells)?;
    let mut entries = sidecar_head("shift");
    entries.push(("angle_deg", angle_deg.to_string()));
    entries.push(("shift_extent_px", extent.to_string()));
    entries.push(("pixel_scale", pixel_scale.to_string()));
    entries.push(("base_x", format!("{base_x:.16e}")));
    entries.push(("base_y", format!("{base_y:.16e}")));
    entries.push(("base_x_prime", format!("{:.16e}", base.second.x)));
    entries.push(("base_y_prime", format!("{:.16e}", base.second.y)));
    write_sidecar(sidecar_path(&args.output), &entries)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use axirot::estimators::Method;

    #[test]
    fn degree_grid_includes_both_endpoints() {
        let grid = degree_grid(-80.0, 80.0, 5.0).unwrap();
        assert_eq!(grid.len(), 33);
        assert_eq!(grid[0].degrees(), -80.0);
        assert!((grid[32].degrees() - 80.0).abs() < 1e-12);
        assert!(degree_grid(0.0, 10.0, 0.0).is_err());
        assert!(degree_grid(10.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn log_grid_pins_its_endpoints_exactly() {
        let grid = log_spaced(1e-6, 1e-3, 10).unwrap();
        assert_eq!(grid.len(), 10);
        assert_eq!(grid[0], 1e-6);
        assert_eq!(grid[9], 1e-3);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert!(log_spaced(0.0, 1e-3, 10).is_err());
        assert!(log_spaced(1e-6, 1e-3, 1).is_err());
    }

    #[test]
    fn report_rows_are_one_based() {
        let result = EstimateResult {
            angle: Angle::from_degrees(10.0),
            inlier_indices: vec![0, 2, 9],
            mean_squared_residual: 0.0,
            iterations_run: 7,
            method: Method::Ransac,
        };
        let report = render_report(&result, UnitsArg::Deg);
        assert!(report.contains("angle_deg=10.000000\n"));
        assert!(report.contains("inlier_rows=1,3,10\n"));
        let radians = render_report(&result, UnitsArg::Rad);
        assert!(radians.contains("angle_rad=0.174532925\n"));
    }

    #[test]
    fn sidecar_path_appends_meta() {
        assert_eq!(
            sidecar_path(Path::new("out/table.csv")),
            PathBuf::from("out/table.csv.meta")
        );
    }

    #[test]
    fn error_exit_codes_are_stable() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
        assert_eq!(CliError::NoConsensus(String::new()).exit_code(), 3);
        assert_eq!(CliError::NoPeak(String::new()).exit_code(), 4);
        assert_eq!(CliError::Degenerate(String::new()).exit_code(), 5);
    }
}
