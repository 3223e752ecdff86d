//! Angle estimators over sets of correspondences: one-point consensus
//! sampling with least-squares refinement, plus histogram-peak and median
//! baselines that need no sampling at all.

use crate::geometry::{
    angle_from_correspondence, angle_terms, essential_from_angle, sampson_distance, Angle,
    Correspondence,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use thiserror::Error;

/// Bracket width below which the 1-D minimizer stops, in radians.
const BRACKET_TOLERANCE: f64 = 1e-10;

/// Interval reduction factor of the golden-section search, 1/phi.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("{name} = {value} is outside its admissible range")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },
    /// Every iteration either drew a degenerate pair or failed the inlier
    /// fraction gate.
    #[error("no valid consensus found in {iterations} iterations")]
    NoConsensus { iterations: u64 },
    /// The best histogram bin holds fewer angles than the configured floor.
    #[error("histogram peak count {peak} is below the required {required}")]
    NoPeak { peak: usize, required: usize },
    #[error("no usable correspondences")]
    EmptyInput,
}

/// Which estimator produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ransac,
    Histogram,
    Median,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ransac => "ransac",
            Method::Histogram => "histogram",
            Method::Median => "median",
        })
    }
}

/// Parameters of the one-point consensus estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct RansacConfig {
    /// Probability p of drawing at least one all-inlier sample. In (0, 1).
    pub success_probability: f64,
    /// Assumed outlier share of the input. In [0, 1).
    pub outlier_fraction: f64,
    /// Correspondences per sample. The circular motion needs only 1.
    pub sample_size: u32,
    /// Sampson distance at or below which a correspondence supports a
    /// hypothesis.
    pub sampson_threshold: f64,
    /// Fraction of the input a consensus set must reach to count as valid.
    /// In (0, 1].
    pub min_inlier_fraction: f64,
    /// Hard ceiling on iterations regardless of what the probability model
    /// asks for.
    pub max_iterations_cap: u64,
    pub rng_seed: u64,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self {
            success_probability: 0.999,
            outlier_fraction: 0.95,
            sample_size: 1,
            sampson_threshold: 8e-4,
            min_inlier_fraction: 0.6,
            max_iterations_cap: 100_000,
            rng_seed: 0,
        }
    }
}

impl RansacConfig {
    pub fn validate(&self) -> Result<(), EstimateError> {
        if !(self.success_probability > 0.0 && self.success_probability < 1.0) {
            return Err(EstimateError::InvalidProbability {
                name: "success_probability",
                value: self.success_probability,
            });
        }
        if !(self.outlier_fraction >= 0.0 && self.outlier_fraction < 1.0) {
            return Err(EstimateError::InvalidProbability {
                name: "outlier_fraction",
                value: self.outlier_fraction,
            });
        }
        if self.sample_size == 0 {
            return Err(EstimateError::InvalidConfig {
                reason: "sample_size must be at least 1".into(),
            });
        }
        if !(self.sampson_threshold > 0.0 && self.sampson_threshold.is_finite()) {
            return Err(EstimateError::InvalidConfig {
                reason: format!("sampson_threshold must be finite and > 0, got {}", self.sampson_threshold),
            });
        }
        if !(self.min_inlier_fraction > 0.0 && self.min_inlier_fraction <= 1.0) {
            return Err(EstimateError::InvalidConfig {
                reason: format!("min_inlier_fraction must lie in (0, 1], got {}", self.min_inlier_fraction),
            });
        }
        if self.max_iterations_cap == 0 {
            return Err(EstimateError::InvalidConfig {
                reason: "max_iterations_cap must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// Iterations the estimator will actually run: the probability-model
    /// count clipped to the cap. The flag reports whether clipping happened.
    pub fn planned_iterations(&self) -> Result<(u64, bool), EstimateError> {
        let required = required_iterations(
            self.success_probability,
            self.outlier_fraction,
            self.sample_size,
        )?;
        Ok((required.min(self.max_iterations_cap), required > self.max_iterations_cap))
    }
}

/// Parameters of the histogram-peak estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramConfig {
    /// Lower edge of the binned range, inclusive.
    pub range_min: Angle,
    /// Upper edge of the binned range, exclusive.
    pub range_max: Angle,
    pub bin_width: Angle,
    /// Minimum count the winning bin must hold.
    pub min_peak_count: usize,
}

impl Default for HistogramConfig {
    fn default() -> Self {
        Self {
            range_min: Angle::from_degrees(-90.0),
            range_max: Angle::from_degrees(90.0),
            bin_width: Angle::from_degrees(1.0),
            min_peak_count: 2,
        }
    }
}

impl HistogramConfig {
    /// Number of whole bin widths needed to cover the range, at least 2.
    fn bin_count(&self) -> Result<usize, EstimateError> {
        let span = self.range_max.radians() - self.range_min.radians();
        if !(span > 0.0) {
            return Err(EstimateError::InvalidConfig {
                reason: "histogram range_min must be below range_max".into(),
            });
        }
        if !(self.bin_width.radians() > 0.0) {
            return Err(EstimateError::InvalidConfig {
                reason: "histogram bin_width must be positive".into(),
            });
        }
        let bins = (span / self.bin_width.radians()).ceil() as usize;
        if bins < 2 {
            return Err(EstimateError::InvalidConfig {
                reason: format!("histogram needs at least 2 bins, bin_width yields {bins}"),
            });
        }
        Ok(bins)
    }
}

/// The outcome of any of the three estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub angle: Angle,
    /// Indices into the input list that support the model, sorted ascending.
    /// Always empty for the median, which has no support notion.
    pub inlier_indices: Vec<usize>,
    /// Mean of squared epipolar residuals of the supporting set under the
    /// returned angle. Zero when the set is empty.
    pub mean_squared_residual: f64,
    /// Sampling iterations consumed; zero for the single-pass baselines.
    pub iterations_run: u64,
    pub method: Method,
}

/// Iteration count that yields at least one all-inlier sample with
/// probability `p` when a fraction `epsilon` of the data is outliers and
/// each sample draws `n` correspondences: ceil(log(1-p) / log(1-(1-e)^n)).
pub fn required_iterations(p: f64, epsilon: f64, n: u32) -> Result<u64, EstimateError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(EstimateError::InvalidProbability {
            name: "success_probability",
            value: p,
        });
    }
    if !(epsilon >= 0.0 && epsilon < 1.0) {
        return Err(EstimateError::InvalidProbability {
            name: "outlier_fraction",
            value: epsilon,
        });
    }
    if n == 0 {
        return Err(EstimateError::InvalidConfig {
            reason: "sample_size must be at least 1".into(),
        });
    }
    if epsilon == 0.0 {
        return Ok(1);
    }
    let all_inlier_sample = (1.0 - epsilon).powi(n as i32);
    let count = ((1.0 - p).ln() / (1.0 - all_inlier_sample).ln()).ceil();
    Ok((count as u64).max(1))
}

/// One-point consensus estimation. Each iteration draws a single
/// correspondence from a per-iteration RNG stream, turns it into an angle
/// hypothesis, and gates every other correspondence by Sampson distance. The
/// drawn pair itself always belongs to its own consensus set. Every valid
/// consensus is refined over its inliers, and the refined model with the
/// smallest mean squared epipolar residual wins, first found on ties.
pub fn ransac_estimate(
    corrs: &[Correspondence],
    cfg: &RansacConfig,
) -> Result<EstimateResult, EstimateError> {
    cfg.validate()?;
    if corrs.is_empty() {
        return Err(EstimateError::EmptyInput);
    }
    let (planned, _) = cfg.planned_iterations()?;

    let mut best: Option<(Angle, Vec<usize>, f64)> = None;
    for iteration in 0..planned {
        // Stream-per-iteration keeps every draw a pure function of
        // (rng_seed, iteration), independent of evaluation order.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(iteration);
        let drawn = rng.gen_range(0..corrs.len());

        let hypothesis = match angle_from_correspondence(&corrs[drawn]) {
            Ok(angle) => angle,
            Err(_) => continue,
        };
        let e = essential_from_angle(hypothesis);

        // An undefined Sampson distance (zero denominator, as with the zero
        // matrix at a zero-angle hypothesis) marks the whole hypothesis
        // unusable, not just the member pair under test.
        let mut usable = true;
        let mut inliers = Vec::new();
        for (index, c) in corrs.iter().enumerate() {
            if index == drawn {
                inliers.push(index);
                continue;
            }
            match sampson_distance(c, &e) {
                Ok(d) if d <= cfg.sampson_threshold => inliers.push(index),
                Ok(_) => {}
                Err(_) => {
                    usable = false;
                    break;
                }
            }
        }
        if !usable || (inliers.len() as f64) < cfg.min_inlier_fraction * (corrs.len() as f64) {
            continue;
        }

        let members: Vec<Correspondence> = inliers.iter().map(|&i| corrs[i]).collect();
        let (refined, msr) = refine_angle_ls(&members, hypothesis)?;
        if best.as_ref().map_or(true, |(_, _, best_msr)| msr < *best_msr) {
            best = Some((refined, inliers, msr));
        }
    }

    match best {
        Some((angle, inlier_indices, mean_squared_residual)) => Ok(EstimateResult {
            angle,
            inlier_indices,
            mean_squared_residual,
            iterations_run: planned,
            method: Method::Ransac,
        }),
        None => Err(EstimateError::NoConsensus { iterations: planned }),
    }
}

/// Least-squares refinement of an angle over a correspondence set: minimizes
/// f(a) = sum_i (sin(a) u_i - (1 - cos(a)) v_i)^2 locally around `initial`,
/// inside a window of [initial - 5 deg, initial + 5 deg] that widens
/// whenever the descent runs into its edge. Returns the angle and f at it
/// divided by the set size. The result is never worse than the initial
/// angle.
///
/// The minimization is deliberately local. f always has a spurious global
/// zero at a = 0 where the essential matrix itself vanishes, so descending
/// from the initial hypothesis is what keeps refinement from discarding it.
pub fn refine_angle_ls(
    corrs: &[Correspondence],
    initial: Angle,
) -> Result<(Angle, f64), EstimateError> {
    if corrs.is_empty() {
        return Err(EstimateError::EmptyInput);
    }
    // f expands to s^2 Suu - 2sm Suv + m^2 Svv over the pair sums, so each
    // evaluation costs a handful of multiplies regardless of the set size.
    // The expanded form is evaluated as a completed square: near a zero of f
    // the three raw terms cancel to roundoff and would flatten the minimum
    // into a noise basin wider than the bracket tolerance.
    let (mut suu, mut suv, mut svv) = (0.0, 0.0, 0.0);
    for c in corrs {
        let (u, v) = angle_terms(c);
        suu += u * u;
        suv += u * v;
        svv += v * v;
    }
    let ratio = if suu > 0.0 { suv / suu } else { 0.0 };
    let tail = (svv - suv * ratio).max(0.0);
    let objective = move |a: f64| {
        let s = a.sin();
        let half = (0.5 * a).sin();
        let m = 2.0 * half * half;
        let d = s - m * ratio;
        suu * d * d + m * m * tail
    };

    let mut best_x = initial.radians();
    let mut best_f = objective(best_x);
    let mut center = initial.radians();
    let mut half_width = 5.0_f64.to_radians();
    loop {
        let lo = center - half_width;
        let hi = center + half_width;
        let (x, fx) = descend(&objective, lo, hi, center);
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
        let on_edge = (x - lo).abs() <= 2.0 * BRACKET_TOLERANCE
            || (hi - x).abs() <= 2.0 * BRACKET_TOLERANCE;
        if !on_edge || half_width >= std::f64::consts::PI {
            break;
        }
        center = x;
        half_width = (2.0 * half_width).min(std::f64::consts::PI);
    }
    Ok((Angle::from_radians(best_x), best_f / corrs.len() as f64))
}

/// Walks downhill from `start` in doubling steps until f rises, then
/// golden-sections the resulting unimodal sub-bracket. Descent that reaches
/// a window edge while still falling returns the edge itself, which signals
/// the caller to widen.
fn descend(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, start: f64) -> (f64, f64) {
    let h = (hi - lo) / 100.0;
    let f_start = f(start);
    let f_right = f((start + h).min(hi));
    let f_left = f((start - h).max(lo));
    if f_right >= f_start && f_left >= f_start {
        return golden_section_min(f, (start - h).max(lo), (start + h).min(hi));
    }
    let dir = if f_right <= f_left { 1.0 } else { -1.0 };

    let mut behind = start;
    let mut x_prev = start;
    let mut f_prev = f_start;
    let mut dist = h;
    loop {
        let x = (start + dir * dist).clamp(lo, hi);
        let fx = f(x);
        if fx >= f_prev {
            let (a, b) = if dir > 0.0 { (behind, x) } else { (x, behind) };
            return golden_section_min(f, a, b);
        }
        if x == lo || x == hi {
            return (x, fx);
        }
        behind = x_prev;
        x_prev = x;
        f_prev = fx;
        dist *= 2.0;
    }
}

fn golden_section_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > BRACKET_TOLERANCE {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Histogram-peak estimation: per-pair closed-form angles inside
/// [range_min, range_max) are assigned to the nearest of the bin centers
/// range_min + k * bin_width, the fullest bin wins (ties: center closer to
/// zero, then lower index), and its members are refined from that center.
pub fn histogram_estimate(
    corrs: &[Correspondence],
    cfg: &HistogramConfig,
) -> Result<EstimateResult, EstimateError> {
    // Centers sit on both range endpoints, so there is one more center than
    // whole bin widths in the range.
    let bins = cfg.bin_count()? + 1;
    if corrs.is_empty() {
        return Err(EstimateError::EmptyInput);
    }
    let lo = cfg.range_min.radians();
    let width = cfg.bin_width.radians();

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); bins];
    for (index, c) in corrs.iter().enumerate() {
        let Ok(angle) = angle_from_correspondence(c) else {
            continue;
        };
        let a = angle.radians();
        if a < lo || a >= cfg.range_max.radians() {
            continue;
        }
        let bin = (((a - lo) / width).round() as usize).min(bins - 1);
        members[bin].push(index);
    }

    let mut peak_bin = 0;
    for bin in 1..bins {
        let count = members[bin].len();
        let best_count = members[peak_bin].len();
        let center = |b: usize| (lo + b as f64 * width).abs();
        if count > best_count || (count == best_count && center(bin) < center(peak_bin)) {
            peak_bin = bin;
        }
    }
    let peak = members[peak_bin].len();
    if peak < cfg.min_peak_count {
        return Err(EstimateError::NoPeak {
            peak,
            required: cfg.min_peak_count,
        });
    }

    let inlier_indices = std::mem::take(&mut members[peak_bin]);
    let selected: Vec<Correspondence> = inlier_indices.iter().map(|&i| corrs[i]).collect();
    let bin_center = Angle::from_radians(lo + peak_bin as f64 * width);
    let (angle, mean_squared_residual) = refine_angle_ls(&selected, bin_center)?;
    Ok(EstimateResult {
        angle,
        inlier_indices,
        mean_squared_residual,
        iterations_run: 0,
        method: Method::Histogram,
    })
}

/// Median of the per-pair closed-form angles; the even-count convention is
/// the mean of the two central values. Degenerate pairs contribute nothing.
pub fn median_estimate(corrs: &[Correspondence]) -> Result<EstimateResult, EstimateError> {
    let mut angles: Vec<f64> = corrs
        .iter()
        .filter_map(|c| angle_from_correspondence(c).ok())
        .map(Angle::radians)
        .collect();
    if angles.is_empty() {
        return Err(EstimateError::EmptyInput);
    }
    angles.sort_by(f64::total_cmp);
    let mid = angles.len() / 2;
    let median = if angles.len() % 2 == 1 {
        angles[mid]
    } else {
        0.5 * (angles[mid - 1] + angles[mid])
    };
    Ok(EstimateResult {
        angle: Angle::from_radians(median),
        inlier_indices: Vec::new(),
        mean_squared_residual: 0.0,
        iterations_run: 0,
        method: Method::Median,
    })
}
