//! Deterministic batch experiments over synthetic scenes: estimator
//! comparison across rotation angles, noise response at a fixed angle,
//! per-point conditioning of the closed-form angle over a lattice, and
//! sensitivity of a single correspondence to pixel-level shifts.
//!
//! Every run is a pure function of its configuration. Per-trial seeds are
//! derived from (master seed, parameter index, trial index), so results do
//! not depend on how trials are scheduled across threads.

use crate::estimators::{
    histogram_estimate, median_estimate, ransac_estimate, HistogramConfig, Method, RansacConfig,
};
use crate::geometry::{angle_from_correspondence, Angle, Correspondence, NormalizedPoint};
use crate::seeds::derive;
use crate::synthetic::{
    generate_pair, make_lattice, project, rotate_about_axis, sample_cylinder, CylinderSpec,
    LatticeSpec, NoiseSpec, ScenePoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use rayon::prelude::*;

/// Conversion from detector pixels to normalized image units, calibrated so
/// that a 1 degree rotation of the reference cylinder scene moves image
/// points by about 1.75 pixels vertically.
pub const DEFAULT_PIXEL_SCALE: f64 = 1e-3;

/// Configuration shared by the angle and noise sweeps. The defaults
/// reproduce the reference synthetic benchmark: a 100-point cylinder with
/// 70 outliers, detection noise 1e-4, and the matching consensus settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub angle_grid: Vec<Angle>,
    pub trials_per_angle: usize,
    /// Scene geometry; its point_count is ignored in favor of
    /// inlier_count + outlier_count.
    pub scene: CylinderSpec,
    pub noise: NoiseSpec,
    pub outlier_count: usize,
    pub inlier_count: usize,
    pub ransac: RansacConfig,
    pub histogram: HistogramConfig,
    pub master_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            angle_grid: (-16..=16)
                .map(|k| Angle::from_degrees(5.0 * k as f64))
                .collect(),
            trials_per_angle: 300,
            scene: CylinderSpec::default(),
            noise: NoiseSpec::default(),
            outlier_count: 70,
            inlier_count: 30,
            ransac: RansacConfig {
                outlier_fraction: 0.7,
                sampson_threshold: 0.01,
                min_inlier_fraction: 0.25,
                ..RansacConfig::default()
            },
            histogram: HistogramConfig::default(),
            master_seed: 0,
        }
    }
}

/// One aggregated table row: a parameter value (angle in degrees, or noise
/// sigma), a method, and its error statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter_value: f64,
    pub method: Method,
    /// Mean absolute angle error in degrees over successful trials; NaN
    /// when every trial failed.
    pub mean_absolute_error: f64,
    pub failure_count: usize,
    pub trials: usize,
}

/// One cell of the shift-sensitivity study: the second point of a fixed
/// correspondence displaced by a pixel offset.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCell {
    pub dx_px: f64,
    pub dy_px: f64,
    /// None when the shift lands the pair on a degenerate configuration.
    pub angle: Option<Angle>,
    /// Wrapped absolute deviation from the true angle, in degrees.
    pub delta_deg: Option<f64>,
}

/// Absolute difference of two angles on the circle, in degrees: the raw
/// difference is wrapped into (-180, 180] before taking the magnitude.
pub fn absolute_error_deg(estimate: Angle, truth: Angle) -> f64 {
    Angle::from_radians(estimate.radians() - truth.radians())
        .degrees()
        .abs()
}

/// Per-method absolute errors of one generated trial; None marks an
/// estimator failure.
fn run_trial(cfg: &SweepConfig, alpha: Angle, sigma: f64, trial_seed: u64) -> [Option<f64>; 3] {
    let scene = CylinderSpec {
        point_count: cfg.inlier_count + cfg.outlier_count,
        ..cfg.scene
    };
    let points = sample_cylinder(&scene, derive(trial_seed, 0));
    let noise = NoiseSpec {
        sigma,
        rng_seed: derive(trial_seed, 1),
    };
    let set = generate_pair(&points, alpha, scene.axis_distance, &noise, cfg.outlier_count)
        .expect("a valid sweep config always generates its scene");
    let ransac_cfg = RansacConfig {
        rng_seed: derive(trial_seed, 2),
        ..cfg.ransac.clone()
    };
    let error = |angle: Angle| absolute_error_deg(angle, alpha);
    [
        ransac_estimate(&set.pairs, &ransac_cfg).ok().map(|r| error(r.angle)),
        histogram_estimate(&set.pairs, &cfg.histogram).ok().map(|r| error(r.angle)),
        median_estimate(&set.pairs).ok().map(|r| error(r.angle)),
    ]
}

/// Aggregates per-trial outcomes into the three method rows. Summation runs
/// in trial order so the result is independent of how the trials were
/// scheduled.
fn rows_from_trials(parameter_value: f64, trials: &[[Option<f64>; 3]]) -> Vec<SweepRow> {
    [Method::Ransac, Method::Histogram, Method::Median]
        .into_iter()
        .enumerate()
        .map(|(index, method)| {
            let mut sum = 0.0;
            let mut successes = 0usize;
            let mut failure_count = 0usize;
            for trial in trials {
                match trial[index] {
                    Some(error) => {
                        sum += error;
                        successes += 1;
                    }
                    None => failure_count += 1,
                }
            }
            let mean_absolute_error = if successes > 0 {
                sum / successes as f64
            } else {
                f64::NAN
            };
            SweepRow {
                parameter_value,
                method,
                mean_absolute_error,
                failure_count,
                trials: trials.len(),
            }
        })
        .collect()
}

/// Runs all three estimators over every angle of the grid, trials_per_angle
/// times each, and reports mean absolute errors and failure counts per
/// (angle, method).
pub fn run_angle_sweep(cfg: &SweepConfig) -> Vec<SweepRow> {
    assert!(!cfg.angle_grid.is_empty(), "angle grid must be non-empty");
    assert!(cfg.trials_per_angle > 0, "trials_per_angle must be positive");
    let mut rows = Vec::with_capacity(3 * cfg.angle_grid.len());
    for (angle_index, &alpha) in cfg.angle_grid.iter().enumerate() {
        let angle_seed = derive(cfg.master_seed, angle_index as u64);
        let trials: Vec<[Option<f64>; 3]> = (0..cfg.trials_per_angle)
            .into_par_iter()
            .map(|trial| run_trial(cfg, alpha, cfg.noise.sigma, derive(angle_seed, trial as u64)))
            .collect();
        rows.extend(rows_from_trials(alpha.degrees(), &trials));
    }
    rows
}

/// Sweeps the detection noise level at a fixed rotation angle, the first
/// entry of cfg.angle_grid. The scene must be outlier-free; the consensus
/// threshold stays fixed across the grid on purpose, which is what produces
/// the high-noise crossover between the sampling estimator and the
/// baselines.
pub fn run_noise_sweep(cfg: &SweepConfig, sigma_grid: &[f64]) -> Vec<SweepRow> {
    assert_eq!(cfg.outlier_count, 0, "noise sweep runs on outlier-free scenes");
    assert!(!cfg.angle_grid.is_empty(), "angle grid must provide the fixed angle");
    assert!(cfg.trials_per_angle > 0, "trials_per_angle must be positive");
    assert!(
        !sigma_grid.is_empty() && sigma_grid.iter().all(|s| s.is_finite() && *s >= 0.0),
        "sigma grid must be non-empty, finite, and nonnegative"
    );
    let alpha = cfg.angle_grid[0];
    let mut rows = Vec::with_capacity(3 * sigma_grid.len());
    for (sigma_index, &sigma) in sigma_grid.iter().enumerate() {
        let sigma_seed = derive(cfg.master_seed, sigma_index as u64);
        let trials: Vec<[Option<f64>; 3]> = (0..cfg.trials_per_angle)
            .into_par_iter()
            .map(|trial| run_trial(cfg, alpha, sigma, derive(sigma_seed, trial as u64)))
            .collect();
        rows.extend(rows_from_trials(sigma, &trials));
    }
    rows
}

/// Evaluates the closed-form angle of `base` with its second point shifted
/// by each pixel offset of the grid. Cells whose shift lands on a
/// degenerate configuration carry no angle; they are data, not failures.
pub fn run_shift_sensitivity(
    base: &Correspondence,
    true_angle: Angle,
    shift_grid: &[(f64, f64)],
    pixel_scale: f64,
) -> Vec<ShiftCell> {
    assert!(pixel_scale > 0.0, "pixel_scale must be positive");
    assert!(
        angle_from_correspondence(base).is_ok(),
        "base correspondence must be non-degenerate"
    );
    shift_grid
        .iter()
        .map(|&(dx_px, dy_px)| {
            let shifted = Correspondence::new(
                base.first,
                NormalizedPoint::new(
                    base.second.x + dx_px * pixel_scale,
                    base.second.y + dy_px * pixel_scale,
                ),
            );
            match angle_from_correspondence(&shifted) {
                Ok(angle) => ShiftCell {
                    dx_px,
                    dy_px,
                    angle: Some(angle),
                    delta_deg: Some(absolute_error_deg(angle, true_angle)),
                },
                Err(_) => ShiftCell {
                    dx_px,
                    dy_px,
                    angle: None,
                    delta_deg: None,
                },
            }
        })
        .collect()
}

/// Maps how well a single lattice point determines the rotation angle:
/// each point is projected before and after rotation, perturbed `repeats`
/// times, and scored by its mean absolute angle error. Degenerate draws
/// score the maximum representable error of 180 degrees. Points whose mean
/// error falls below `discard_below_deg` are dropped, leaving the
/// ill-conditioned ones.
pub fn run_conditioning_map(
    spec: &LatticeSpec,
    alpha: Angle,
    noise: &NoiseSpec,
    repeats: usize,
    discard_below_deg: f64,
) -> Vec<(ScenePoint, f64)> {
    assert!(repeats >= 1, "repeats must be at least 1");
    assert!(
        noise.sigma >= 0.0 && noise.sigma.is_finite(),
        "noise sigma must be finite and nonnegative"
    );
    let points = make_lattice(spec);
    let rotated = rotate_about_axis(&points, alpha, spec.center_distance);
    let errors: Vec<f64> = (0..points.len())
        .into_par_iter()
        .map(|index| {
            let q = project(&points[index]).expect("lattice point must sit in front of the camera");
            let qp = project(&rotated[index])
                .expect("rotated lattice point must sit in front of the camera");
            let mut rng = ChaCha8Rng::seed_from_u64(derive(noise.rng_seed, index as u64));
            let normal = (noise.sigma > 0.0).then(|| {
                Normal::new(0.0, noise.sigma).expect("sigma checked above")
            });
            let mut sum = 0.0;
            for _ in 0..repeats {
                let mut c = Correspondence::new(q, qp);
                if let Some(dist) = normal {
                    c.first.x += rng.sample(dist);
                    c.first.y += rng.sample(dist);
                    c.second.x += rng.sample(dist);
                    c.second.y += rng.sample(dist);
                }
                sum += match angle_from_correspondence(&c) {
                    Ok(estimate) => absolute_error_deg(estimate, alpha),
                    Err(_) => 180.0,
                };
            }
            sum / repeats as f64
        })
        .collect();
    points
        .into_iter()
        .zip(errors)
        .filter(|(_, error)| *error >= discard_below_deg)
        .collect()
}
