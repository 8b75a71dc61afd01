//! Ray bundles emitted by object points.
//!
//! Bundles are parameterized by the height `h` at which each ray crosses the
//! plane of the first lens vertex (z = 0). The set of heights that survive a
//! given path is found by bisection so that fans span exactly what passes.

use super::ray::Ray2D;
use super::surface::LensPrescription;

/// A light source in object space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Source {
    /// Point at axial position `z` (< 0) and height `y`.
    Point { z: f64, y: f64 },
    /// Collimated light arriving at `angle` from the axis.
    Infinity { angle: f64 },
}

impl Source {
    /// On-axis point at distance `a` in front of the first vertex.
    pub fn on_axis(a: f64) -> Self {
        if a.is_infinite() {
            Source::Infinity { angle: 0.0 }
        } else {
            Source::Point { z: -a, y: 0.0 }
        }
    }

    /// Ray from this source crossing the z = 0 plane at height `h`.
    pub fn ray(&self, h: f64, lens: &LensPrescription) -> Ray2D {
        match *self {
            Source::Point { z, y } => Ray2D::through((z, y), (0.0, h)),
            Source::Infinity { angle } => {
                let z0 = -(lens.front_semi_aperture() + 1.0);
                Ray2D::new(z0, h + angle.tan() * z0, angle.cos(), angle.sin())
            }
        }
    }

    /// Launch height of the ray aimed at the paraxial entrance pupil center.
    pub fn chief_height(&self, lens: &LensPrescription) -> f64 {
        let z_ep = lens.entrance_pupil_z();
        match *self {
            Source::Point { z, y } => {
                if (z_ep - z).abs() < 1e-12 {
                    0.0
                } else {
                    y * z_ep / (z_ep - z)
                }
            }
            Source::Infinity { angle } => -angle.tan() * z_ep,
        }
    }
}

const BISECTION_STEPS: usize = 48;
const SCAN_POINTS: usize = 256;

/// Finds the contiguous interval around a passing point of `pred` within
/// `[lo, hi]`. `guess` is tried first, then a uniform scan.
pub fn find_interval(pred: impl Fn(f64) -> bool, lo: f64, hi: f64, guess: Option<f64>) -> Option<(f64, f64)> {
    find_interval_with(pred, lo, hi, guess, BISECTION_STEPS)
}

/// [`find_interval`] with a chosen number of bisection steps per edge.
pub fn find_interval_with(
    pred: impl Fn(f64) -> bool,
    lo: f64,
    hi: f64,
    guess: Option<f64>,
    steps: usize,
) -> Option<(f64, f64)> {
    let seed = guess
        .filter(|g| *g >= lo && *g <= hi && pred(*g))
        .or_else(|| {
            let mut best: Option<f64> = None;
            let target = guess.unwrap_or(0.5 * (lo + hi));
            for i in 0..SCAN_POINTS {
                let h = lo + (hi - lo) * (i as f64 + 0.5) / SCAN_POINTS as f64;
                if pred(h) && best.is_none_or(|b| (h - target).abs() < (b - target).abs()) {
                    best = Some(h);
                }
            }
            best
        })?;
    let edge = |outer: f64| {
        if pred(outer) {
            return outer;
        }
        let (mut inside, mut outside) = (seed, outer);
        for _ in 0..steps {
            let mid = 0.5 * (inside + outside);
            if pred(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    Some((edge(lo), edge(hi)))
}

/// `n` launch heights uniformly spanning `[lo, hi]` including both ends.
pub fn uniform_heights(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Heights of rays from `source` that pass the main lens with the stop at
/// `stop_radius`.
pub fn main_lens_interval(lens: &LensPrescription, source: Source, stop_radius: f64) -> Option<(f64, f64)> {
    main_lens_interval_with(lens, source, stop_radius, BISECTION_STEPS)
}

pub(crate) fn main_lens_interval_with(
    lens: &LensPrescription,
    source: Source,
    stop_radius: f64,
    steps: usize,
) -> Option<(f64, f64)> {
    let bound = 2.0 * lens.front_semi_aperture();
    let pass = |h: f64| {
        let out = lens.trace_forward(source.ray(h, lens), stop_radius);
        out.alive && out.dz > 0.0
    };
    let guess = match source {
        Source::Point { y, .. } if y == 0.0 => 0.0,
        Source::Infinity { angle } if angle == 0.0 => 0.0,
        _ => source.chief_height(lens),
    };
    find_interval_with(pass, -bound, bound, Some(guess), steps)
}

/// Fan of `n` rays from `source` uniformly spanning the passing aperture.
pub fn entrance_fan(lens: &LensPrescription, source: Source, stop_radius: f64, n: usize) -> Vec<Ray2D> {
    match main_lens_interval(lens, source, stop_radius) {
        Some((lo, hi)) => uniform_heights(lo, hi, n).into_iter().map(|h| source.ray(h, lens)).collect(),
        None => Vec::new(),
    }
}

/// Near-axis heights used for paraxial estimates.
pub fn paraxial_heights(lens: &LensPrescription) -> (f64, f64) {
    let sa = lens
        .surfaces()
        .iter()
        .map(|s| s.semi_aperture)
        .fold(f64::INFINITY, f64::min);
    (1e-3 * sa, 2e-3 * sa)
}
