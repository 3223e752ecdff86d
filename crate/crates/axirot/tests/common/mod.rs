//! Helpers shared by the integration suites: deterministic scene-backed
//! correspondence sets and error metrics on the circle.
#![allow(dead_code)]

use axirot::geometry::{
    epipolar_residual, essential_from_angle, Angle, Correspondence, NormalizedPoint,
};
use axirot::synthetic::{generate_pair, sample_cylinder, CylinderSpec, NoiseSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Genuine correspondences from a default-geometry cylinder; `count` pairs,
/// no outliers, Gaussian detection noise of the given spread.
pub fn scene_pairs(alpha: Angle, count: usize, sigma: f64, seed: u64) -> Vec<Correspondence> {
    let spec = CylinderSpec {
        point_count: count,
        ..CylinderSpec::default()
    };
    let points = sample_cylinder(&spec, seed);
    let noise = NoiseSpec {
        sigma,
        rng_seed: seed.wrapping_add(1),
    };
    generate_pair(&points, alpha, spec.axis_distance, &noise, 0)
        .expect("cylinder scenes stay in front of the camera")
        .pairs
}

/// Uniformly random image pairs with coordinates in [-0.5, 0.5). These carry
/// no consistent rotation between the two views.
pub fn junk_pairs(count: usize, seed: u64) -> Vec<Correspondence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Correspondence::new(
                NormalizedPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
                NormalizedPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
            )
        })
        .collect()
}

/// Magnitude of the wrapped difference between two angles, in radians.
pub fn wrapped_diff_rad(a: Angle, b: Angle) -> f64 {
    Angle::from_radians(a.radians() - b.radians()).radians().abs()
}

/// Mean squared epipolar residual of a set under the model at `alpha`,
/// evaluated through the full matrix form.
pub fn mean_squared_residual(pairs: &[Correspondence], alpha: Angle) -> f64 {
    let e = essential_from_angle(alpha);
    pairs
        .iter()
        .map(|c| epipolar_residual(c, &e).powi(2))
        .sum::<f64>()
        / pairs.len() as f64
}
