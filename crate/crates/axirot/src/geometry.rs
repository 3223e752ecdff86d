//! The one-parameter epipolar model of rotation about a fixed vertical axis.
//!
//! The camera looks down +z and the axis is parallel to y, so the essential
//! matrix of the relative motion depends on the rotation angle alone. A
//! single correspondence then determines the angle in closed form, which is
//! what makes one-point consensus sampling possible in the first place.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Default gate for the 0/0-indeterminate case of the closed-form angle:
/// a correspondence is degenerate when |u| and |v| both fall at or below
/// this bound.
pub const DEFAULT_DEGENERACY_ETA: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    /// Both intermediate terms of the angle formula vanished. The observed
    /// point lies on an ill-conditioned plane and carries no angle
    /// information.
    #[error("degenerate correspondence: |u| = {u_abs:.3e} and |v| = {v_abs:.3e} are both within {eta:.3e}")]
    DegenerateCorrespondence { u_abs: f64, v_abs: f64, eta: f64 },
    /// All four epipolar line coefficients vanished, so no finite Sampson
    /// distance exists. The hypothesis that produced the matrix is unusable.
    #[error("Sampson distance undefined: epipolar line coefficients are all zero")]
    UndefinedDistance,
    #[error("circle radius must be > 0, got {0}")]
    NonPositiveRadius(f64),
}

/// A finite angle in radians, normalized into (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    /// Invariant: the stored value is finite and in (-pi, pi]. -pi itself
    /// maps to +pi.
    pub fn from_radians(radians: f64) -> Self {
        assert!(radians.is_finite(), "angle must be finite, got {radians}");
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut r = radians % two_pi;
        if r <= -std::f64::consts::PI {
            r += two_pi;
        } else if r > std::f64::consts::PI {
            r -= two_pi;
        }
        Angle(r)
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::from_radians(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }
}

/// A point in normalized image coordinates (unit focal length, principal
/// point at the origin). The homogeneous third coordinate is implicitly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedPoint {
    pub x: f64,
    pub y: f64,
}

impl NormalizedPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn homogeneous(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, 1.0)
    }
}

/// A pair of image points believed to depict the same scene point: `first`
/// is q in the first view, `second` is q' in the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub first: NormalizedPoint,
    pub second: NormalizedPoint,
}

impl Correspondence {
    pub fn new(first: NormalizedPoint, second: NormalizedPoint) -> Self {
        Self { first, second }
    }

    /// The same pairing with the two views exchanged.
    pub fn swapped(self) -> Self {
        Self {
            first: self.second,
            second: self.first,
        }
    }
}

/// The essential matrix of the circular motion together with the angle that
/// generated it. The matrix is zero iff the angle is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssentialMatrix {
    pub matrix: Matrix3<f64>,
    pub alpha: Angle,
}

/// Rigid motion of the second camera pose relative to the first: a rotation
/// about the y axis plus the chord translation on a circle of the given
/// radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
    pub radius: f64,
}

/// sin of the angle paired with 1 - cos of it, the latter computed as
/// 2 sin^2(a/2) so that small angles keep full precision.
fn sin_versin(alpha: Angle) -> (f64, f64) {
    let a = alpha.radians();
    let half_sin = (0.5 * a).sin();
    (a.sin(), 2.0 * half_sin * half_sin)
}

pub fn essential_from_angle(alpha: Angle) -> EssentialMatrix {
    let (s, m) = sin_versin(alpha);
    #[rustfmt::skip]
    let matrix = Matrix3::new(
        0.0,  -m, 0.0,
         -m, 0.0,  -s,
        0.0,   s, 0.0,
    );
    EssentialMatrix { matrix, alpha }
}

/// Skew-symmetric matrix with cross_matrix(a) * b = a x b.
pub fn cross_matrix(v: Vector3<f64>) -> Matrix3<f64> {
    #[rustfmt::skip]
    let m = Matrix3::new(
        0.0, -v.z,  v.y,
        v.z,  0.0, -v.x,
       -v.y,  v.x,  0.0,
    );
    m
}

pub fn motion_from_angle(alpha: Angle, radius: f64) -> Result<RigidMotion, GeometryError> {
    if !(radius > 0.0) {
        return Err(GeometryError::NonPositiveRadius(radius));
    }
    let (s, m) = sin_versin(alpha);
    let c = alpha.radians().cos();
    #[rustfmt::skip]
    let rotation = Matrix3::new(
          c, 0.0,  -s,
        0.0, 1.0, 0.0,
          s, 0.0,   c,
    );
    Ok(RigidMotion {
        rotation,
        translation: radius * Vector3::new(s, 0.0, m),
        radius,
    })
}

/// The two intermediate terms of the closed-form angle: u = y - y' and
/// v = x'y + xy'. Both vanish exactly when the scene point sits on the
/// horizontal plane through the optical center or on the vertical plane
/// through the rotation axis at half the rotation angle.
pub(crate) fn angle_terms(c: &Correspondence) -> (f64, f64) {
    let u = c.first.y - c.second.y;
    let v = c.second.x * c.first.y + c.first.x * c.second.y;
    (u, v)
}

/// Closed-form rotation angle of a single correspondence, alpha = 2 atan(u/v).
pub fn angle_from_correspondence(c: &Correspondence) -> Result<Angle, GeometryError> {
    angle_from_correspondence_with_eta(c, DEFAULT_DEGENERACY_ETA)
}

pub fn angle_from_correspondence_with_eta(
    c: &Correspondence,
    eta: f64,
) -> Result<Angle, GeometryError> {
    let (u, v) = angle_terms(c);
    if u.abs() <= eta && v.abs() <= eta {
        return Err(GeometryError::DegenerateCorrespondence {
            u_abs: u.abs(),
            v_abs: v.abs(),
            eta,
        });
    }
    // v = 0 with u != 0 falls through on purpose: u/v is then infinite, the
    // primitive arctan saturates at +-pi/2, and the doubled angle lands on
    // the +-pi limit, which normalization folds onto +pi.
    Ok(Angle::from_radians(2.0 * (u / v).atan()))
}

/// The scalar q'^T E q; zero for a geometrically consistent correspondence.
pub fn epipolar_residual(c: &Correspondence, e: &EssentialMatrix) -> f64 {
    c.second.homogeneous().dot(&(e.matrix * c.first.homogeneous()))
}

/// First-order geometric distance of a correspondence to the epipolar
/// constraint surface of `e`.
pub fn sampson_distance(c: &Correspondence, e: &EssentialMatrix) -> Result<f64, GeometryError> {
    let line_second = e.matrix * c.first.homogeneous();
    let line_first = e.matrix.transpose() * c.second.homogeneous();
    let denom = line_second.x * line_second.x
        + line_second.y * line_second.y
        + line_first.x * line_first.x
        + line_first.y * line_first.y;
    if denom == 0.0 {
        return Err(GeometryError::UndefinedDistance);
    }
    Ok(c.second.homogeneous().dot(&line_second).abs() / denom.sqrt())
}

/// Builds the correspondence whose closed-form angle is exactly `alpha`:
/// given the first point and the second point's x coordinate, the epipolar
/// constraint determines y', here solved from u/v = tan(alpha/2). Useful
/// for constructing consistent fixtures without a 3D scene.
pub fn complete_pair(q: NormalizedPoint, x_prime: f64, alpha: Angle) -> Correspondence {
    let t = (0.5 * alpha.radians()).tan();
    let y_prime = q.y * (1.0 - t * x_prime) / (1.0 + t * q.x);
    Correspondence::new(q, NormalizedPoint::new(x_prime, y_prime))
}
