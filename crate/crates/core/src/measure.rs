//! Ray-tracing-based measurements of a camera: focus points, magnification,
//! visible microlens image size, disparity and depth of field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{
    entrance_fan, find_interval, main_lens_interval, paraxial_heights, trace_main_lens_only, uniform_heights, Camera, CameraDesign,
    CameraPath, LensPrescription, Ray2D, Source,
};

/// Environment variable overriding the default bundle size.
pub const RAYS_ENV: &str = "PLENOPTIFORGE_RAYS";

/// Weight of the minimum-blur offset in the best visual focus.
pub const BEST_VISUAL_WEIGHT: f64 = 0.531 / 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    /// Rays per bundle for all measurements.
    pub bundle_rays: usize,
    /// Angular acceptance of sensor pixels (radians).
    pub alpha: f64,
    /// Backward rays per pixel when testing whether it receives light.
    pub mli_rays: usize,
    pub min_cluster_hits: usize,
    /// Rays per scene point when testing a pixel's focus.
    pub dof_rays: usize,
    /// Relative step when marching along a pixel's mean ray.
    pub dof_step: f64,
    /// Relative precision of DoF boundaries.
    pub dof_tolerance: f64,
    /// March is abandoned (bound = infinity) beyond this multiple of the start distance.
    pub dof_far_limit: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            bundle_rays: 255,
            alpha: 40f64.to_radians(),
            mli_rays: 128,
            min_cluster_hits: 5,
            dof_rays: 48,
            dof_step: 0.01,
            dof_tolerance: 1e-4,
            dof_far_limit: 50.0,
        }
    }
}

impl MeasureConfig {
    /// Defaults with `PLENOPTIFORGE_RAYS` applied when set.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(n) = std::env::var(RAYS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            if n >= 3 {
                cfg.bundle_rays = n;
            }
        }
        cfg
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocusReport {
    pub b_parax: f64,
    pub b_blur: f64,
    pub b_bv: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DofInterval {
    pub delta_min: f64,
    pub delta_max: f64,
}

impl DofInterval {
    pub fn new(delta_min: f64, delta_max: f64) -> Self {
        Self { delta_min, delta_max }
    }

    pub fn width(&self) -> f64 {
        self.delta_max - self.delta_min
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.delta_min + self.delta_max)
    }

    pub fn contains(&self, d: f64) -> bool {
        d >= self.delta_min && d <= self.delta_max
    }

    pub fn is_subset_of(&self, other: &DofInterval) -> bool {
        self.delta_min >= other.delta_min && self.delta_max <= other.delta_max
    }
}

/// Intersection of per-pixel intervals: `[max of minima, min of maxima]`.
pub fn intersect_dofs(intervals: &[DofInterval]) -> Result<DofInterval> {
    let lo = intervals.iter().map(|d| d.delta_min).fold(f64::NEG_INFINITY, f64::max);
    let hi = intervals.iter().map(|d| d.delta_max).fold(f64::INFINITY, f64::min);
    if intervals.is_empty() || lo > hi || !(lo > 0.0) {
        return Err(Error::EmptyDof {
            delta_min: lo,
            delta_max: hi,
        });
    }
    Ok(DofInterval::new(lo, hi))
}

/// Position minimizing the envelope diameter of a bundle of lines, searched
/// on `z >= z_start`. The envelope is convex and piecewise linear, so its
/// minimum sits on a pairwise crossing or on `z_start` itself.
///
/// Each ray is used as a line; returns `(z, diameter)`.
pub fn caustic_minimum(rays: &[Ray2D], z_start: f64) -> Option<(f64, f64)> {
    let lines: Vec<(f64, f64)> = rays
        .iter()
        .filter(|r| r.alive && r.dz != 0.0)
        .map(|r| (r.height_at(z_start), r.slope()))
        .collect();
    if lines.len() < 2 {
        return None;
    }
    let diameter = |z: f64| {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(y, u) in &lines {
            let h = y + u * (z - z_start);
            lo = lo.min(h);
            hi = hi.max(h);
        }
        hi - lo
    };
    let (umin, umax) = lines
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, u)| (a.min(u), b.max(u)));
    if umax - umin <= 0.0 {
        return None;
    }
    let mut candidates = vec![z_start];
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let du = lines[i].1 - lines[j].1;
            if du != 0.0 {
                let z = z_start + (lines[j].0 - lines[i].0) / du;
                if z > z_start && z.is_finite() {
                    candidates.push(z);
                }
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    // convexity: binary search for the first candidate not smaller than its successor
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if diameter(candidates[mid]) <= diameter(candidates[mid + 1]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let z = candidates[lo];
    Some((z, diameter(z)))
}

fn axis_crossing(ray: &Ray2D) -> Option<f64> {
    if !ray.alive || ray.dz <= 0.0 {
        return None;
    }
    let u = ray.slope();
    if u == 0.0 || ray.y * u >= 0.0 {
        return None;
    }
    Some(ray.z - ray.y / u)
}

/// Axial distance from the last vertex to the paraxial image of an on-axis
/// point, extrapolating near-axis crossings to zero height.
pub fn paraxial_focus(lens: &LensPrescription, a_main: f64) -> Result<f64> {
    let source = Source::on_axis(a_main);
    let (h1, h2) = paraxial_heights(lens);
    let cross = |h: f64| {
        axis_crossing(&lens.trace_forward(source.ray(h, lens), f64::INFINITY))
            .ok_or_else(|| Error::NoFocus(format!("near-axis rays diverge behind {}", lens.name)))
    };
    let (l1, l2) = (cross(h1)?, cross(h2)?);
    let l0 = (l1 * h2 * h2 - l2 * h1 * h1) / (h2 * h2 - h1 * h1);
    let b = l0 - lens.last_vertex_z();
    if !(b > 0.0) {
        return Err(Error::NoFocus(format!("virtual image at {b} mm")));
    }
    Ok(b)
}

/// Caustic minimum of a full-aperture bundle from an on-axis point.
pub fn min_blur_focus(lens: &LensPrescription, a_main: f64, d_main: f64, cfg: &MeasureConfig) -> Result<f64> {
    let fan = entrance_fan(lens, Source::on_axis(a_main), 0.5 * d_main, cfg.bundle_rays);
    let out = trace_main_lens_only(&fan, lens, d_main);
    let z0 = lens.last_vertex_z();
    let (z, _) = caustic_minimum(&out, z0).ok_or_else(|| Error::NoFocus("bundle does not converge".into()))?;
    if z <= z0 {
        return Err(Error::NoFocus("bundle diverges behind the lens".into()));
    }
    Ok(z - z0)
}

/// Best visual focus located from the paraxial and minimum-blur points.
/// The ratio of the two wavefront-based distances fixes it at
/// `b_parax - 0.354 * (b_parax - b_blur)`.
pub fn best_visual_point(b_parax: f64, b_blur: f64) -> f64 {
    b_parax - BEST_VISUAL_WEIGHT * (b_parax - b_blur)
}

pub fn best_visual_focus(lens: &LensPrescription, a_main: f64, d_main: f64, cfg: &MeasureConfig) -> Result<FocusReport> {
    let b_parax = paraxial_focus(lens, a_main)?;
    let b_blur = min_blur_focus(lens, a_main, d_main, cfg)?;
    Ok(FocusReport {
        b_parax,
        b_blur,
        b_bv: best_visual_point(b_parax, b_blur),
    })
}

/// Ratio of MLI pitch to lenslet pitch from a chief ray leaving the stop
/// center through a virtual lenslet centered on the ray.
pub fn measure_magnification(design: &CameraDesign) -> Result<f64> {
    let camera = Camera::new(design)?;
    let lens = &design.lens;
    let probe = Ray2D::with_slope(lens.stop_z(), 0.0, 1e-3, true);
    let out = lens.trace_forward_from(probe, lens.stop_index() + 1, design.stop_radius());
    if !out.alive || out.dz <= 0.0 {
        return Err(Error::RayBlocked("magnification probe blocked in the main lens".into()));
    }
    let at_mla = out.advance_to(camera.mla_z);
    let at_sensor = at_mla.advance_to(camera.sensor_z);
    if at_mla.y == 0.0 {
        return Err(Error::RayBlocked("magnification probe crosses the MLA on axis".into()));
    }
    Ok(at_sensor.y / at_mla.y)
}

/// Pixels receiving light through one lenslet.
#[derive(Clone, Debug, PartialEq)]
pub struct VisibleMli {
    pub lenslet: i64,
    pub center: f64,
    pub pixels: Vec<usize>,
    /// `2 * max |pixel edge - center|` over lit pixels.
    pub size: f64,
}

fn pixel_lit(camera: &Camera, y: f64, k: i64, alpha: f64, n: usize) -> bool {
    let mla = &camera.design.mla;
    let (c, d) = (mla.center(k), mla.d_ml);
    (0..n).any(|j| {
        let x = c - 0.5 * d + d * (j as f64 + 0.5) / n as f64;
        camera.backward(y, x, k, alpha).is_some()
    })
}

/// Linear search outward from the MLI center for pixels lit through lenslet `k`.
pub fn visible_mli(design: &CameraDesign, lenslet: i64, alpha: f64, cfg: &MeasureConfig) -> Result<VisibleMli> {
    let camera = Camera::new(design)?;
    let sensor = &design.sensor;
    let m = measure_magnification(design).unwrap_or_else(|_| {
        let l = design.b_main + design.a_ml;
        (l + design.b_ml) / l
    });
    let center = m * design.mla.center(lenslet);
    let mut pixels = Vec::new();
    if let Some(start) = sensor.pixel_at(center) {
        let lit = |i: usize| pixel_lit(&camera, sensor.pixel_center(i), lenslet, alpha, cfg.mli_rays);
        if lit(start) {
            pixels.push(start);
            let mut i = start;
            while i > 0 && lit(i - 1) {
                i -= 1;
                pixels.push(i);
            }
            let mut i = start;
            while i + 1 < sensor.pixel_count() && lit(i + 1) {
                i += 1;
                pixels.push(i);
            }
        }
    }
    pixels.sort_unstable();
    let size = pixels
        .iter()
        .map(|&i| 2.0 * (sensor.pixel_center(i) - center).abs() + sensor.pixel_size)
        .fold(0.0, f64::max);
    Ok(VisibleMli {
        lenslet,
        center,
        pixels,
        size,
    })
}

pub fn visible_mli_size(design: &CameraDesign, lenslet: i64, alpha: f64, cfg: &MeasureConfig) -> Result<f64> {
    Ok(visible_mli(design, lenslet, alpha, cfg)?.size)
}

/// Number of pixels between the centers of MLI 0 and MLI 1 that receive light
/// through both lenslets.
pub fn mli_overlap_pixels(design: &CameraDesign, alpha: f64, cfg: &MeasureConfig) -> Result<usize> {
    let camera = Camera::new(design)?;
    let sensor = &design.sensor;
    let m = measure_magnification(design)?;
    let (c0, c1) = (0.0, m * design.mla.d_ml);
    Ok((0..sensor.pixel_count())
        .map(|i| sensor.pixel_center(i))
        .filter(|y| *y >= c0 && *y <= c1)
        .filter(|&y| {
            pixel_lit(&camera, y, 0, alpha, cfg.mli_rays) && pixel_lit(&camera, y, 1, alpha, cfg.mli_rays)
        })
        .count())
}

/// Sub-bundle of rays from `source` that reach the sensor through lenslet `k`.
pub fn lenslet_bundle(camera: &Camera, source: Source, k: i64, n: usize, guess: Option<f64>) -> Vec<CameraPath> {
    let lens = camera.lens();
    let bound = 2.0 * lens.front_semi_aperture();
    let pred = |h: f64| camera.forward(source.ray(h, lens)).is_some_and(|p| p.lenslet == k);
    let interval = match guess.filter(|g| pred(*g)) {
        Some(g) => find_interval(pred, -bound, bound, Some(g)),
        // scan within the main-lens aperture only
        None => main_lens_interval(lens, source, camera.design.stop_radius())
            .and_then(|(alo, ahi)| find_interval(pred, alo, ahi, guess)),
    };
    let Some((lo, hi)) = interval else {
        return Vec::new();
    };
    uniform_heights(lo, hi, n)
        .into_iter()
        .filter_map(|h| camera.forward(source.ray(h, lens)))
        .filter(|p| p.lenslet == k)
        .collect()
}

/// Disparity coefficient of an on-axis point from the cluster means of
/// adjacent lenslet images closest to the axis.
///
/// Hits are clustered by the lenslet they passed through.
pub fn measure_disparity(design: &CameraDesign, scene_point_distance: f64, cfg: &MeasureConfig) -> Result<f64> {
    let camera = Camera::new(design)?;
    let source = Source::on_axis(scene_point_distance);
    let means: Vec<(i64, f64)> = (-2i64..=2)
        .filter_map(|k| {
            let guess = (k == 0).then_some(0.0);
            let paths = lenslet_bundle(&camera, source, k, cfg.bundle_rays, guess);
            (paths.len() >= cfg.min_cluster_hits)
                .then(|| (k, paths.iter().map(|p| p.sensor_y).sum::<f64>() / paths.len() as f64))
        })
        .collect();
    let pairs: Vec<(f64, f64, f64)> = means
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| ((w[0].0 as f64 + 0.5).abs(), w[0].1, w[1].1))
        .collect();
    let nearest = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let chosen: Vec<_> = pairs.iter().filter(|p| p.0 == nearest).collect();
    if chosen.is_empty() {
        return Err(Error::InsufficientClusters {
            min_hits: cfg.min_cluster_hits,
        });
    }
    let d_mli = measure_magnification(design)? * design.mla.d_ml;
    let gamma = chosen.iter().map(|(_, a, b)| ((b - a).abs() - d_mli) / d_mli).sum::<f64>() / chosen.len() as f64;
    Ok(gamma)
}

/// Distance behind the MLA at which the center lenslet focuses the image of
/// an on-axis point (caustic minimum of the lenslet sub-bundle).
pub fn mla_focus(design: &CameraDesign, scene_point_distance: f64, cfg: &MeasureConfig) -> Result<f64> {
    let camera = Camera::new(design)?;
    let paths = lenslet_bundle(&camera, Source::on_axis(scene_point_distance), 0, cfg.bundle_rays, Some(0.0));
    let rays: Vec<Ray2D> = paths.iter().map(|p| p.after_mla).collect();
    let (z, _) = caustic_minimum(&rays, camera.mla_z).ok_or_else(|| Error::NoFocus("lenslet bundle is collimated".into()))?;
    if z <= camera.mla_z {
        return Err(Error::NoFocus("lenslet image is virtual".into()));
    }
    Ok(z - camera.mla_z)
}

/// Blur diameter on the sensor of a point seen through lenslet `k`.
fn point_blur(camera: &Camera, point: (f64, f64), k: i64, guess: f64, n: usize) -> f64 {
    let paths = lenslet_bundle(camera, Source::Point { z: point.0, y: point.1 }, k, n, Some(guess));
    if paths.len() < 2 {
        return f64::INFINITY;
    }
    let (lo, hi) = paths
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.sensor_y), b.max(p.sensor_y)));
    hi - lo
}

/// Scene points along the mean ray of the bundle seen by one pixel.
struct PixelProbe<'a> {
    camera: Camera<'a>,
    pixel_y: f64,
    lenslet: i64,
    y0: f64,
    u0: f64,
    start: f64,
    rays: usize,
    pixel_size: f64,
}

impl<'a> PixelProbe<'a> {
    fn new(design: &'a CameraDesign, m: f64, pixel_y: f64, alpha: f64, cfg: &MeasureConfig) -> Result<Self> {
        let camera = Camera::new(design)?;
        let d = design.mla.d_ml;
        let k = (pixel_y / (m * d)).round() as i64;
        let c = design.mla.center(k);
        let n = cfg.bundle_rays.max(2);
        let scene: Vec<(f64, f64)> = (0..n)
            .filter_map(|j| camera.backward(pixel_y, c - 0.5 * d + d * (j as f64 + 0.5) / n as f64, k, alpha))
            .map(|r| (r.height_at(0.0), r.slope()))
            .collect();
        if scene.is_empty() {
            return Err(Error::DarkPixel { pixel_y });
        }
        let cnt = scene.len() as f64;
        let y0 = scene.iter().map(|s| s.0).sum::<f64>() / cnt;
        let u0 = scene.iter().map(|s| s.1).sum::<f64>() / cnt;
        let crossings: Vec<f64> = scene
            .iter()
            .filter(|s| (u0 - s.1).abs() > 1e-12)
            .map(|s| (s.0 - y0) / (u0 - s.1))
            .filter(|z| *z < 0.0 && z.is_finite())
            .collect();
        if crossings.is_empty() {
            return Err(Error::NeverInFocus {
                pixel_y,
                best_blur: f64::INFINITY,
            });
        }
        Ok(Self {
            camera,
            pixel_y,
            lenslet: k,
            y0,
            u0,
            start: -crossings.iter().sum::<f64>() / crossings.len() as f64,
            rays: cfg.dof_rays.max(2),
            pixel_size: design.sensor.pixel_size,
        })
    }

    fn blur(&self, delta: f64) -> f64 {
        let point = (-delta, self.y0 - self.u0 * delta);
        point_blur(&self.camera, point, self.lenslet, self.y0, self.rays)
    }

    fn in_focus(&self, delta: f64) -> bool {
        self.blur(delta) <= self.pixel_size
    }

    fn interval(&self, cfg: &MeasureConfig) -> Result<DofInterval> {
        let mut start = self.start;
        if !self.in_focus(start) {
            // golden-section search for the sharpest point on the mean ray
            let (mut a, mut b) = ((0.5 * start).ln(), (2.0 * start).ln());
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let mut x1 = b - g * (b - a);
            let mut x2 = a + g * (b - a);
            let (mut f1, mut f2) = (self.blur(x1.exp()), self.blur(x2.exp()));
            for _ in 0..60 {
                if f1 <= f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - g * (b - a);
                    f1 = self.blur(x1.exp());
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + g * (b - a);
                    f2 = self.blur(x2.exp());
                }
            }
            let (best, best_blur) = if f1 <= f2 { (x1.exp(), f1) } else { (x2.exp(), f2) };
            if best_blur > self.pixel_size {
                return Err(Error::NeverInFocus {
                    pixel_y: self.pixel_y,
                    best_blur,
                });
            }
            start = best;
        }
        let refine = |mut inside: f64, mut outside: f64| {
            while (outside - inside).abs() > cfg.dof_tolerance * inside {
                let mid = 0.5 * (inside + outside);
                if self.in_focus(mid) {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            inside
        };
        let far = {
            let mut delta = start;
            loop {
                let next = delta * (1.0 + cfg.dof_step);
                if next > cfg.dof_far_limit * start {
                    break f64::INFINITY;
                }
                if !self.in_focus(next) {
                    break refine(delta, next);
                }
                delta = next;
            }
        };
        let near = {
            let mut delta = start;
            loop {
                let next = delta / (1.0 + cfg.dof_step);
                if next < 1e-3 * start || !self.in_focus(next) {
                    break refine(delta, next);
                }
                delta = next;
            }
        };
        Ok(DofInterval::new(near, far))
    }
}

/// Scene-side depth of field of one pixel, as axial distances from the first
/// lens vertex. An unbounded far limit is reported as infinity.
pub fn pixel_dof(design: &CameraDesign, pixel_y: f64, alpha: f64, cfg: &MeasureConfig) -> Result<DofInterval> {
    let m = measure_magnification(design)?;
    PixelProbe::new(design, m, pixel_y, alpha, cfg)?.interval(cfg)
}

/// Camera DoF: intersection of the pixel intervals of one microlens image.
///
/// Pixels are visited from the MLI center outwards. Since each pixel's
/// in-focus set is an interval, a pixel sharp at both ends of the running
/// intersection cannot narrow it and needs no full search.
pub fn camera_dof(design: &CameraDesign, mli_index: i64, alpha: f64, cfg: &MeasureConfig) -> Result<DofInterval> {
    let vis = visible_mli(design, mli_index, alpha, cfg)?;
    let m = measure_magnification(design)?;
    let mut pixels: Vec<f64> = vis.pixels.iter().map(|&i| design.sensor.pixel_center(i)).collect();
    pixels.sort_by(|a, b| (a - vis.center).abs().total_cmp(&(b - vis.center).abs()).then(a.total_cmp(b)));
    let mut current: Option<DofInterval> = None;
    for y in pixels {
        let probe = match PixelProbe::new(design, m, y, alpha, cfg) {
            Ok(p) => p,
            Err(Error::DarkPixel { .. }) => continue,
            Err(e) => return Err(e),
        };
        if let Some(cur) = current {
            if cur.delta_max.is_finite() && probe.in_focus(cur.delta_min) && probe.in_focus(cur.delta_max) {
                continue;
            }
        }
        let dof = probe.interval(cfg)?;
        current = Some(match current {
            None => dof,
            Some(cur) => intersect_dofs(&[cur, dof])?,
        });
    }
    current.ok_or(Error::EmptyDof {
        delta_min: f64::NAN,
        delta_max: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(z: f64, y: f64, u: f64) -> Ray2D {
        Ray2D::with_slope(z, y, u, true)
    }

    #[test]
    fn three_ray_caustic_matches_brute_force() {
        let rays = [line(0.0, 1.0, -0.1), line(0.0, -0.5, 0.02), line(0.0, 0.2, -0.01)];
        let (z, d) = caustic_minimum(&rays, 0.0).unwrap();
        // brute force over a 1e-4 mm grid
        let diam = |z: f64| {
            let hs: Vec<f64> = rays.iter().map(|r| r.height_at(z)).collect();
            hs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - hs.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        let (mut bz, mut bd) = (0.0, f64::INFINITY);
        for i in 0..300_000 {
            let zz = i as f64 * 1e-4;
            let dd = diam(zz);
            if dd < bd {
                bd = dd;
                bz = zz;
            }
        }
        assert!((z - bz).abs() < 2e-4, "{z} vs {bz}");
        assert!((d - bd).abs() < 1e-5);
        assert!((z - 12.5).abs() < 1e-9);
    }

    #[test]
    fn caustic_of_parallel_rays_has_no_minimum() {
        let rays = [line(0.0, 1.0, 0.0), line(0.0, -1.0, 0.0)];
        assert!(caustic_minimum(&rays, 0.0).is_none());
    }

    #[test]
    fn best_visual_point_fixed_point_and_ordering() {
        assert_eq!(best_visual_point(100.0, 100.0), 100.0);
        let bv = best_visual_point(100.0, 97.0);
        assert!((bv - 98.938).abs() < 1e-12);
        assert!(bv >= 97.0 && bv <= 100.0);
    }

    #[test]
    fn dof_intersection() {
        let a = DofInterval::new(90.0, 110.0);
        let b = DofInterval::new(95.0, 120.0);
        assert_eq!(intersect_dofs(&[a, b]).unwrap(), DofInterval::new(95.0, 110.0));
        assert_eq!(intersect_dofs(&[a]).unwrap(), a);
        let c = DofInterval::new(111.0, 130.0);
        assert!(matches!(intersect_dofs(&[a, c]), Err(Error::EmptyDof { .. })));
    }

    #[test]
    fn ideal_lens_conjugates() {
        let lens = LensPrescription::ideal_thin(50.0, 10.0);
        assert!((paraxial_focus(&lens, 100.0).unwrap() - 100.0).abs() < 1e-9);
        let far = paraxial_focus(&lens, 5e7).unwrap();
        assert!((far - 50.0).abs() < 0.05);
        let blur = min_blur_focus(&lens, 100.0, 10.0, &MeasureConfig::default()).unwrap();
        assert!((blur - 100.0).abs() < 1e-6);
    }
}
