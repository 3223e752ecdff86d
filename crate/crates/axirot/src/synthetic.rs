//! Synthetic scene generation: 3D point clouds, their rotation about the
//! vertical axis, pinhole projection, Gaussian measurement noise, and
//! deterministic outlier injection.

use crate::geometry::{Angle, Correspondence, NormalizedPoint};
use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyntheticError {
    #[error("point at z = {z} is behind the camera")]
    BehindCamera { z: f64 },
    #[error("requested {requested} outliers from {available} points")]
    InsufficientPoints { requested: usize, available: usize },
    /// A single outlier cannot be re-paired away from its true partner, so
    /// the derangement construction has no valid output.
    #[error("outlier injection needs at least 2 outliers, got 1")]
    SingleOutlier,
}

/// A vertical cylinder of scene points, axis parallel to y through
/// (0, 0, axis_distance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSpec {
    /// Distance from the camera center to the cylinder axis, D.
    pub axis_distance: f64,
    pub height: f64,
    pub radius: f64,
    pub point_count: usize,
}

impl Default for CylinderSpec {
    fn default() -> Self {
        Self {
            axis_distance: 200.0,
            height: 230.0,
            radius: 115.0,
            point_count: 100,
        }
    }
}

/// A cubic lattice of scene points centered on the optical axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    /// Edge length of the cube.
    pub side: f64,
    /// Distance from the camera center to the cube center.
    pub center_distance: f64,
    pub points_per_edge: usize,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        Self {
            side: 200.0,
            center_distance: 200.0,
            points_per_edge: 21,
        }
    }
}

/// Zero-mean Gaussian noise applied independently to every observed image
/// coordinate, plus the seed that drives both the noise and the outlier
/// selection of a generated pair set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub rng_seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            sigma: 1e-4,
            rng_seed: 0,
        }
    }
}

/// A 3D point in the camera frame: x right, y up, z along the optical axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenePoint {
    pub position: Vector3<f64>,
}

impl ScenePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self {
            position: Vector3::new(x, y, z),
        }
    }
}

/// Correspondences generated from a known scene, together with the ground
/// truth they encode.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceSet {
    pub pairs: Vec<Correspondence>,
    pub ground_truth_angle: Angle,
    /// true at indices whose pairing is genuine, false at injected outliers.
    pub inlier_flags: Vec<bool>,
}

/// Uniform sample of the cylinder volume. The radial coordinate is drawn as
/// R sqrt(U) so that density is uniform per unit area, not per unit radius.
pub fn sample_cylinder(spec: &CylinderSpec, seed: u64) -> Vec<ScenePoint> {
    assert!(spec.axis_distance > 0.0, "axis_distance must be positive");
    assert!(spec.height > 0.0, "height must be positive");
    assert!(spec.radius > 0.0, "radius must be positive");
    assert!(spec.point_count > 0, "point_count must be positive");
    assert!(
        spec.radius < spec.axis_distance,
        "cylinder must sit fully in front of the camera"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..spec.point_count)
        .map(|_| {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let rho = spec.radius * rng.gen::<f64>().sqrt();
            let y = rng.gen_range(-0.5 * spec.height..0.5 * spec.height);
            ScenePoint::new(
                rho * theta.cos(),
                y,
                spec.axis_distance + rho * theta.sin(),
            )
        })
        .collect()
}

/// Regular grid of points_per_edge^3 points filling the cube. Iteration
/// order is x outermost, then y, then z.
pub fn make_lattice(spec: &LatticeSpec) -> Vec<ScenePoint> {
    assert!(spec.side > 0.0, "side must be positive");
    assert!(spec.center_distance > 0.0, "center_distance must be positive");
    assert!(spec.points_per_edge >= 2, "lattice needs at least 2 points per edge");
    assert!(
        0.5 * spec.side < spec.center_distance,
        "cube must sit fully in front of the camera"
    );
    let n = spec.points_per_edge;
    let step = spec.side / (n - 1) as f64;
    let coord = |index: usize| -0.5 * spec.side + index as f64 * step;
    let mut points = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                points.push(ScenePoint::new(
                    coord(i),
                    coord(j),
                    spec.center_distance + coord(k),
                ));
            }
        }
    }
    points
}

/// Rotates every point about the vertical axis through (0, 0, axis_distance)
/// by `alpha`. The rotation direction is calibrated so that the projected
/// correspondences recover +alpha from the closed-form angle.
pub fn rotate_about_axis(
    points: &[ScenePoint],
    alpha: Angle,
    axis_distance: f64,
) -> Vec<ScenePoint> {
    assert!(axis_distance > 0.0, "axis_distance must be positive");
    let (s, c) = alpha.radians().sin_cos();
    points
        .iter()
        .map(|p| {
            let xi = p.position.x;
            let zeta = p.position.z - axis_distance;
            ScenePoint::new(
                c * xi - s * zeta,
                p.position.y,
                axis_distance + (s * xi + c * zeta),
            )
        })
        .collect()
}

/// Pinhole projection onto the normalized image plane.
pub fn project(p: &ScenePoint) -> Result<NormalizedPoint, SyntheticError> {
    let z = p.position.z;
    if z <= 0.0 {
        return Err(SyntheticError::BehindCamera { z });
    }
    Ok(NormalizedPoint::new(p.position.x / z, p.position.y / z))
}

/// Projects the scene before and after rotation into one correspondence per
/// point, perturbs all observed coordinates with Gaussian noise, then turns
/// `outlier_count` pairs into outliers by re-pairing their second points
/// through a random derangement among themselves.
///
/// Noise and outlier selection run on separate streams of the same seed, so
/// switching noise on or off never changes which pairs become outliers.
pub fn generate_pair(
    points: &[ScenePoint],
    alpha: Angle,
    axis_distance: f64,
    noise: &NoiseSpec,
    outlier_count: usize,
) -> Result<CorrespondenceSet, SyntheticError> {
    assert!(
        noise.sigma >= 0.0 && noise.sigma.is_finite(),
        "noise sigma must be finite and nonnegative"
    );
    if outlier_count > points.len() {
        return Err(SyntheticError::InsufficientPoints {
            requested: outlier_count,
            available: points.len(),
        });
    }
    if outlier_count == 1 {
        return Err(SyntheticError::SingleOutlier);
    }

    let rotated = rotate_about_axis(points, alpha, axis_distance);
    let mut firsts = Vec::with_capacity(points.len());
    let mut seconds = Vec::with_capacity(points.len());
    for (p, r) in points.iter().zip(&rotated) {
        firsts.push(project(p)?);
        seconds.push(project(r)?);
    }

    if noise.sigma > 0.0 {
        let normal = Normal::new(0.0, noise.sigma).expect("sigma checked above");
        let mut rng = ChaCha8Rng::seed_from_u64(noise.rng_seed);
        rng.set_stream(0);
        for (q, qp) in firsts.iter_mut().zip(&mut seconds) {
            q.x += rng.sample(normal);
            q.y += rng.sample(normal);
            qp.x += rng.sample(normal);
            qp.y += rng.sample(normal);
        }
    }

    let mut inlier_flags = vec![true; points.len()];
    if outlier_count >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(noise.rng_seed);
        rng.set_stream(1);
        let mut indices: Vec<usize> = (0..points.len()).collect();
        indices.shuffle(&mut rng);
        let mut chosen = indices[..outlier_count].to_vec();
        chosen.sort_unstable();
        // Rejection-sample a derangement: reshuffle until no chosen index
        // keeps its own second point. Success probability never drops below
        // 1/e, so this terminates quickly for every count >= 2.
        let mut perm = chosen.clone();
        loop {
            perm.shuffle(&mut rng);
            if perm.iter().zip(&chosen).all(|(p, c)| p != c) {
                break;
            }
        }
        let snapshot = seconds.clone();
        for (k, &target) in chosen.iter().enumerate() {
            seconds[target] = snapshot[perm[k]];
            inlier_flags[target] = false;
        }
    }

    let pairs = firsts
        .into_iter()
        .zip(seconds)
        .map(|(q, qp)| Correspondence::new(q, qp))
        .collect();
    Ok(CorrespondenceSet {
        pairs,
        ground_truth_angle: alpha,
        inlier_flags,
    })
}
