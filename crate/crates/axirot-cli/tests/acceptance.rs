//! End-to-end acceptance checks. Each test covers one shipped guarantee and
//! prints a single `criterion N: PASS` or `criterion N: FAIL` line (visible
//! with --nocapture, and in the failure report); a FAIL line is followed by a
//! panic carrying the measured details.
//!
//! Three criteria are documented red in this build:
//!   criterion 1 fails at exactly the zero angle, where the constraint matrix
//!   vanishes and the consensus estimator must discard every hypothesis;
//!   criterion 3 fails because at the published sweep parameters the fixed
//!   0.01 Sampson gate admits a few high-leverage mismatched pairs into
//!   every consensus (a bias floor near 0.05 deg) while the histogram's
//!   1-degree peak bin filters them out (near 0.009 deg), and because
//!   consensus sets are occasionally captured by the spurious zero-angle
//!   objective minimum at true angles of 10 and 20 degrees;
//!   criterion 4's low-noise clause fails through the same zero-angle
//!   capture, which occurs at any positive noise level.
//! The remaining criteria must stay green.

use axirot::estimators::{
    histogram_estimate, median_estimate, ransac_estimate, required_iterations, EstimateError,
    HistogramConfig, RansacConfig,
};
use axirot::experiments::{
    absolute_error_deg, run_angle_sweep, run_conditioning_map, run_noise_sweep,
    run_shift_sensitivity, SweepConfig, SweepRow,
};
use axirot::geometry::{
    angle_from_correspondence, complete_pair, Angle, Correspondence, GeometryError,
    NormalizedPoint,
};
use axirot::io::correspondences_to_string;
use axirot::estimators::Method;
use axirot::synthetic::{
    generate_pair, make_lattice, sample_cylinder, CylinderSpec, LatticeSpec, NoiseSpec,
};
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_axirot"));
    cmd.env_remove("AXIROT_SEED");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary launches")
}

fn sweep_profile(seed: u64) -> RansacConfig {
    RansacConfig {
        outlier_fraction: 0.7,
        sampson_threshold: 0.01,
        min_inlier_fraction: 0.25,
        rng_seed: seed,
        ..RansacConfig::default()
    }
}

fn exact_cylinder_pairs(alpha: Angle, count: usize, seed: u64) -> Vec<Correspondence> {
    let spec = CylinderSpec {
        point_count: count,
        ..CylinderSpec::default()
    };
    let points = sample_cylinder(&spec, seed);
    let noise = NoiseSpec {
        sigma: 0.0,
        rng_seed: 0,
    };
    generate_pair(&points, alpha, spec.axis_distance, &noise, 0)
        .expect("cylinder scenes stay in front of the camera")
        .pairs
}

fn verdict(criterion: u32, ok: bool, detail: &str) {
    let word = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {word} ({detail})");
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_noiseless_recovery_across_the_angle_grid() {
    let started = Instant::now();
    let histogram_cfg = HistogramConfig::default();
    let mut violations: Vec<String> = Vec::new();
    let mut checks = 0u32;
    for deg in -89i32..=89 {
        let alpha = Angle::from_degrees(f64::from(deg));
        let pairs = exact_cylinder_pairs(alpha, 30, (deg + 90) as u64);
        let outcomes = [
            ("ransac", ransac_estimate(&pairs, &sweep_profile(1)).map(|r| r.angle)),
            ("histogram", histogram_estimate(&pairs, &histogram_cfg).map(|r| r.angle)),
            ("median", median_estimate(&pairs).map(|r| r.angle)),
        ];
        for (name, outcome) in outcomes {
            checks += 1;
            match outcome {
                Ok(angle) if absolute_error_deg(angle, alpha) <= 1e-6 => {}
                Ok(angle) => violations.push(format!(
                    "{name} at {deg} deg returned {:.8} deg",
                    angle.degrees()
                )),
                Err(error) => violations.push(format!("{name} at {deg} deg failed: {error}")),
            }
        }
    }
    let elapsed = started.elapsed();
    let in_time = elapsed.as_secs_f64() < 5.0;
    verdict(
        1,
        violations.is_empty() && in_time,
        &format!(
            "{} of {checks} method-angle checks recovered the angle within 1e-6 deg \
             in {:.2} s; violations: [{}]",
            checks - violations.len() as u32,
            elapsed.as_secs_f64(),
            violations.join("; ")
        ),
    );
}

#[test]
fn criterion_2_planned_iteration_counts() {
    let cases = [(0.999, 0.7, 20u64), (0.999, 0.5, 10), (0.999, 0.95, 135)];
    let mut observed = Vec::new();
    let mut ok = true;
    for (p, eps, expected) in cases {
        let got = required_iterations(p, eps, 1).expect("valid arguments");
        observed.push(format!("p={p}, eps={eps} -> {got}"));
        ok &= got == expected;
    }
    verdict(2, ok, &observed.join("; "));
}

fn mae_by_method(rows: &[SweepRow], parameter: f64) -> (f64, f64, f64) {
    let pick = |method: Method| {
        rows.iter()
            .find(|r| r.method == method && r.parameter_value == parameter)
            .map(|r| r.mean_absolute_error)
            .expect("row exists for every method and parameter")
    };
    (pick(Method::Ransac), pick(Method::Histogram), pick(Method::Median))
}

#[test]
fn criterion_3_consensus_beats_both_baselines_across_angles() {
    let started = Instant::now();
    let grid: Vec<Angle> = (-8..=8)
        .map(|k| Angle::from_degrees(f64::from(k) * 10.0))
        .collect();
    let cfg = SweepConfig {
        angle_grid: grid.clone(),
        master_seed: 0,
        ..SweepConfig::default()
    };
    let rows = run_angle_sweep(&cfg);
    let mut beats_histogram = 0usize;
    let mut beats_median = 0usize;
    let mut table = Vec::new();
    for alpha in &grid {
        let (r, h, m) = mae_by_method(&rows, alpha.degrees());
        if r <= h {
            beats_histogram += 1;
        }
        if r <= m {
            beats_median += 1;
        }
        table.push(format!("{:+.0} deg: {r:.4}/{h:.4}/{m:.4}", alpha.degrees()));
    }
    let elapsed = started.elapsed();
    let ok = beats_histogram >= 16 && beats_median >= 17 && elapsed.as_secs() <= 600;
    verdict(
        3,
        ok,
        &format!(
            "consensus MAE at or below histogram at {beats_histogram}/17 angles \
             (need 16) and at or below median at {beats_median}/17 (need 17) \
             in {:.0} s; per-angle MAE ransac/histogram/median: {}",
            elapsed.as_secs_f64(),
            table.join(", ")
        ),
    );
}

/// Ten log-spaced values with exact endpoints, matching the noise command.
fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else {
                (ln_lo + (ln_hi - ln_lo) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

#[test]
fn criterion_4_noise_crossover_against_the_median() {
    let sigmas = log_spaced(1e-6, 1e-3, 10);
    let cfg = SweepConfig {
        angle_grid: vec![Angle::from_degrees(30.0)],
        inlier_count: 100,
        outlier_count: 0,
        master_seed: 0,
        ..SweepConfig::default()
    };
    let rows = run_noise_sweep(&cfg, &sigmas);
    let mut crossover = None;
    let mut low_noise_violations = Vec::new();
    let mut table = Vec::new();
    for &sigma in &sigmas {
        let (r, _, m) = mae_by_method(&rows, sigma);
        table.push(format!("sigma={sigma:.3e}: ransac {r:.6} vs median {m:.6}"));
        if r > m {
            crossover.get_or_insert(sigma);
            if sigma <= 1e-5 {
                low_noise_violations.push(format!("{sigma:.3e}"));
            }
        }
    }
    let ok = crossover.is_some() && low_noise_violations.is_empty();
    verdict(
        4,
        ok,
        &format!(
            "crossover present at sigma={}; low-noise violations (sigma <= 1e-5): [{}]; \
             per-sigma MAE: {}",
            crossover.map_or("none".to_string(), |s| format!("{s:.3e}")),
            low_noise_violations.join(", "),
            table.join("; ")
        ),
    );
}

#[test]
fn criterion_5_ill_conditioned_loci_match_the_two_planes() {
    let spec = LatticeSpec::default();
    let alpha = Angle::from_degrees(21.0);
    let half = 0.5 * alpha.radians();

    let clean = run_conditioning_map(
        &spec,
        alpha,
        &NoiseSpec {
            sigma: 0.0,
            rng_seed: 0,
        },
        100,
        60.0,
    );
    let expected: Vec<_> = make_lattice(&spec)
        .into_iter()
        .filter(|p| {
            p.position.y == 0.0
                || (p.position.x == 0.0 && p.position.z == spec.center_distance)
        })
        .collect();
    let clean_matches = clean.len() == expected.len()
        && clean
            .iter()
            .zip(expected.iter())
            .all(|((got, _), want)| got.position == want.position);

    let noisy = run_conditioning_map(
        &spec,
        alpha,
        &NoiseSpec {
            sigma: 0.004,
            rng_seed: 0,
        },
        100,
        60.0,
    );
    let spacing = spec.side / (spec.points_per_edge - 1) as f64;
    let tolerance = 2.0 * spacing;
    let near_planes = noisy
        .iter()
        .filter(|(p, _)| {
            let horizontal = p.position.y.abs();
            let zeta = p.position.z - spec.center_distance;
            let bisecting = (p.position.x * half.cos() - zeta * half.sin()).abs();
            horizontal.min(bisecting) <= tolerance
        })
        .count();
    let fraction = near_planes as f64 / noisy.len().max(1) as f64;

    let ok = clean_matches && !noisy.is_empty() && fraction >= 0.8;
    verdict(
        5,
        ok,
        &format!(
            "noise-free retention matches the analytic loci exactly \
             ({} points, expected {}, match {}); noisy retention {} points with \
             {:.1}% within {tolerance} units of the two planes (need 80%)",
            clean.len(),
            expected.len(),
            clean_matches,
            noisy.len(),
            100.0 * fraction
        ),
    );
}

#[test]
fn criterion_6_shift_response_is_anisotropic() {
    let truth = Angle::from_degrees(1.0);
    let base = complete_pair(NormalizedPoint::new(0.25, 0.2), 0.2487, truth);
    let cells = run_shift_sensitivity(
        &base,
        truth,
        &[(0.0, 1.0), (0.0, -1.0), (1.0, 0.0), (-1.0, 0.0)],
        1e-3,
    );
    let mut ok = true;
    let mut details = Vec::new();
    for cell in &cells {
        let delta = cell.delta_deg.expect("shifted pairs stay non-degenerate");
        let vertical = cell.dy_px != 0.0;
        let within = if vertical { delta >= 1.0 } else { delta <= 0.1 };
        ok &= within;
        details.push(format!(
            "shift ({:+.0}, {:+.0}) px -> {delta:.6} deg",
            cell.dx_px, cell.dy_px
        ));
    }
    verdict(
        6,
        ok,
        &format!(
            "vertical single-pixel shifts move the angle by at least 1 deg and \
             horizontal ones by at most 0.1 deg: {}",
            details.join(", ")
        ),
    );
}

#[test]
fn criterion_7_degeneracy_is_typed_skipped_and_exit_coded() {
    let flat = Correspondence::new(NormalizedPoint::new(0.3, 0.0), NormalizedPoint::new(0.3, 0.0));
    let typed = matches!(
        angle_from_correspondence(&flat),
        Err(GeometryError::DegenerateCorrespondence { .. })
    );

    let pairs = vec![flat.clone(); 10];
    let consumed = match ransac_estimate(&pairs, &sweep_profile(0)) {
        Err(EstimateError::NoConsensus { iterations }) => iterations == 20,
        _ => false,
    };

    let dir = TempDir::new().expect("tempdir");
    let path = dir.path().join("degenerate.csv");
    std::fs::write(&path, correspondences_to_string(&pairs)).expect("write");
    let out = run(bin().arg("estimate").arg(&path));
    let exit_coded = out.status.code() == Some(5);

    verdict(
        7,
        typed && consumed && exit_coded,
        &format!(
            "typed error {typed}, iterations consumed on degenerate draws {consumed}, \
             command exit code 5 {exit_coded}"
        ),
    );
}

#[test]
fn criterion_8_outputs_are_byte_identical_across_thread_counts() {
    let dir = TempDir::new().expect("tempdir");
    let sweep_cfg = dir.path().join("sweep.cfg");
    std::fs::write(
        &sweep_cfg,
        "trials=10\nangle_min_deg=-40\nangle_max_deg=40\nangle_step_deg=20\n\
         inlier_count=12\noutlier_count=8\n",
    )
    .expect("write");
    let cond_cfg = dir.path().join("cond.cfg");
    std::fs::write(&cond_cfg, "points_per_edge=7\nrepeats=10\n").expect("write");

    let mut ok = true;
    let mut details = Vec::new();
    for (command, config) in [("sweep", &sweep_cfg), ("condmap", &cond_cfg)] {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let path: PathBuf = dir.path().join(format!("{command}_{threads}.csv"));
            let out = run(bin()
                .arg(command)
                .arg("--output")
                .arg(&path)
                .arg("--config")
                .arg(config)
                .args(["--seed", "9", "--threads", threads]));
            assert_eq!(out.status.code(), Some(0), "{command} run failed");
            outputs.push(std::fs::read_to_string(&path).expect("table exists"));
        }
        let identical = outputs[0] == outputs[1];
        ok &= identical;
        details.push(format!("{command} identical across 1 and 4 threads: {identical}"));
    }
    verdict(8, ok, &details.join("; "));
}

#[test]
fn criterion_9_file_ingestion_round_trips() {
    let dir = TempDir::new().expect("tempdir");

    let scene_cfg = dir.path().join("scene.cfg");
    std::fs::write(&scene_cfg, "sigma=0\ninlier_count=30\noutlier_count=5\n").expect("write");
    let scene = dir.path().join("scene.csv");
    let synth = run(bin()
        .arg("synth")
        .arg("--output")
        .arg(&scene)
        .arg("--config")
        .arg(&scene_cfg)
        .args(["--angle-deg", "15", "--seed", "7"]));
    assert_eq!(synth.status.code(), Some(0), "synth failed");

    let mut ok = true;
    let mut details = Vec::new();
    for method in ["ransac", "histogram", "median"] {
        let out = run(bin().arg("estimate").arg(&scene).args(["--method", method]));
        let text = String::from_utf8_lossy(&out.stdout).to_string();
        let recovered =
            out.status.code() == Some(0) && text.contains("angle_deg=15.000000");
        ok &= recovered;
        details.push(format!("synthesized scene via {method}: {recovered}"));
    }

    let single = dir.path().join("single.csv");
    let pair = complete_pair(NormalizedPoint::new(0.1, 0.2), 0.15, Angle::from_degrees(10.0));
    std::fs::write(&single, correspondences_to_string(std::slice::from_ref(&pair)))
        .expect("write");
    for method in ["ransac", "median"] {
        let out = run(bin().arg("estimate").arg(&single).args(["--method", method]));
        let text = String::from_utf8_lossy(&out.stdout).to_string();
        let recovered =
            out.status.code() == Some(0) && text.contains("angle_deg=10.000000");
        ok &= recovered;
        details.push(format!("hand-written pair via {method}: {recovered}"));
    }
    verdict(9, ok, &details.join("; "));
}
