//! Rendering of 1D test patterns through a camera and the contrast and
//! disparity metrics computed on the rendered microlens images.
//!
//! Sources are sampled along a line at the pattern distance; each emits a
//! fan spanning the main-lens aperture. The sensor footprint between two
//! neighbouring rays of a fan that pass the same lenslet is spread over the
//! pixels it covers, weighted by the launch-height spacing.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::measure_magnification;
use crate::paraxial::principal_planes;
use crate::optics::{main_lens_interval_with, uniform_heights, Camera, CameraDesign, SensorSpec, Source};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Stripes,
    /// Radial profile of a star chart: stripes whose period grows with distance.
    StarRadialProfile,
    White,
}

/// Binary pattern on a plane `distance` in front of the first vertex,
/// centered on the axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pattern1D {
    pub kind: PatternKind,
    /// Full period in mm at this distance.
    pub period: f64,
    pub distance: f64,
    pub lateral_extent: f64,
    /// Position of a dark-to-bright edge.
    pub phase: f64,
}

impl Pattern1D {
    pub fn stripes(period: f64, distance: f64, lateral_extent: f64) -> Self {
        Self {
            kind: PatternKind::Stripes,
            period,
            distance,
            lateral_extent,
            phase: 0.0,
        }
    }

    /// Star profile with `angular_period` radians per period.
    pub fn star(angular_period: f64, distance: f64, lateral_extent: f64) -> Self {
        Self {
            kind: PatternKind::StarRadialProfile,
            period: angular_period * distance,
            ..Self::stripes(1.0, distance, lateral_extent)
        }
    }

    pub fn white(distance: f64, lateral_extent: f64) -> Self {
        Self {
            kind: PatternKind::White,
            period: f64::INFINITY,
            ..Self::stripes(1.0, distance, lateral_extent)
        }
    }

    /// A single edge at height `position`: dark below, bright above.
    pub fn edge(position: f64, distance: f64, lateral_extent: f64) -> Self {
        Self {
            phase: position,
            ..Self::stripes(4.0 * lateral_extent, distance, lateral_extent)
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn intensity(&self, y: f64) -> f64 {
        match self.kind {
            PatternKind::White => 1.0,
            _ => {
                if ((y - self.phase) / self.period).rem_euclid(1.0) < 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Mean intensity over `[a, b]`.
    pub fn mean_intensity(&self, a: f64, b: f64) -> f64 {
        if self.kind == PatternKind::White {
            return 1.0;
        }
        if b <= a {
            return self.intensity(a);
        }
        // bright measure of [phase, phase + x * period), in periods
        let bright = |x: f64| 0.5 * x.floor() + (x - x.floor()).min(0.5);
        let (xa, xb) = ((a - self.phase) / self.period, (b - self.phase) / self.period);
        ((bright(xb) - bright(xa)) * self.period / (b - a)).clamp(0.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance > 0.0) || !(self.lateral_extent > 0.0) {
            return Err(Error::Validation("pattern distance and extent must be positive".into()));
        }
        if self.kind != PatternKind::White && !(self.period > 0.0) {
            return Err(Error::Validation(format!("pattern period {} must be positive", self.period)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorImage1D {
    pub intensities: Vec<f64>,
    pub exposure_rays: usize,
}

impl SensorImage1D {
    pub fn zeros(n: usize) -> Self {
        Self {
            intensities: vec![0.0; n],
            exposure_rays: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.intensities.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderSettings {
    pub rays_per_source: usize,
    /// Sources per scene footprint of one pixel.
    pub sources_per_pixel: usize,
    /// Edge bisection steps when fitting each source fan to the aperture.
    pub aperture_steps: usize,
    /// Seeded jitter of source positions within their sampling cells.
    pub jitter_seed: Option<u64>,
    /// White-normalization floor relative to the white maximum.
    pub white_floor: f64,
}

impl Default for RenderSettings {
    fn default() -> Self {
        Self {
            rays_per_source: 64,
            sources_per_pixel: 4,
            aperture_steps: 24,
            jitter_seed: None,
            white_floor: 0.01,
        }
    }
}

impl RenderSettings {
    pub fn with_rays(mut self, rays_per_source: usize) -> Self {
        self.rays_per_source = rays_per_source;
        self
    }
}

const MAX_SOURCES: usize = 40_000;
const CHUNK: usize = 128;

fn splat(image: &mut [f64], sensor: &SensorSpec, y1: f64, y2: f64, w: f64) {
    let n = image.len() as f64;
    let f1 = y1.min(y2) / sensor.pixel_size + 0.5 * n;
    let f2 = y1.max(y2) / sensor.pixel_size + 0.5 * n;
    if f2 <= 0.0 || f1 >= n {
        return;
    }
    if f2 - f1 < 1e-9 {
        let i = f1.floor();
        if i >= 0.0 && i < n {
            image[i as usize] += w;
        }
        return;
    }
    let (first, last) = (f1.floor().max(0.0) as usize, (f2.floor() as usize).min(image.len() - 1));
    for (i, px) in image.iter_mut().enumerate().take(last + 1).skip(first) {
        let overlap = (f2.min(i as f64 + 1.0) - f1.max(i as f64)).max(0.0);
        *px += w * overlap / (f2 - f1);
    }
}

/// Scene-plane length per unit sensor length inside the center MLI, from
/// chief rays through the center lenslet with the stop fully open.
pub fn scene_scale(design: &CameraDesign, distance: f64) -> Result<f64> {
    let mut open = design.clone();
    open.d_main = open.max_d_main();
    let camera = Camera::new(&open)?;
    let dy = 0.25 * design.mla.d_ml;
    let scene = |y: f64| {
        camera
            .backward(y, 0.0, 0, std::f64::consts::FRAC_PI_2)
            .map(|r| r.height_at(-distance))
            .ok_or_else(|| Error::RayBlocked("chief ray through the center lenslet is blocked".into()))
    };
    Ok(((scene(dy)? - scene(-dy)?) / (2.0 * dy)).abs())
}

/// Full width of the scene region feeding the central five microlens images.
pub fn scene_field(design: &CameraDesign, distance: f64) -> Result<f64> {
    let camera = Camera::new(design)?;
    let m = measure_magnification(design)?;
    let (sensor, mla) = (&design.sensor, &design.mla);
    let reach = 2.5 * m * mla.d_ml;
    let mut half: f64 = 0.0;
    for i in 0..sensor.pixel_count() {
        let y = sensor.pixel_center(i);
        if y.abs() > reach {
            continue;
        }
        for k in -3i64..=3 {
            for t in [-0.45, 0.0, 0.45] {
                if let Some(r) = camera.backward(y, mla.center(k) + t * mla.d_ml, k, std::f64::consts::FRAC_PI_2) {
                    half = half.max(r.height_at(-distance).abs());
                }
            }
        }
    }
    if half == 0.0 {
        half = 0.5 * reach * scene_scale(design, distance)?;
    }
    Ok(2.1 * half)
}

/// Sparse light transport from a line of scene cells to the sensor.
///
/// Each cell is a point source at its (optionally jittered) sample position;
/// a pattern is applied by weighting cells with the pattern's mean
/// intensity over the cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Transport {
    pub distance: f64,
    pub extent: f64,
    pixels: usize,
    cells: Vec<(f64, f64)>,
    entries: Vec<Vec<(u32, f64)>>,
    traced: usize,
}

impl Transport {
    pub fn build(design: &CameraDesign, distance: f64, extent: f64, settings: &RenderSettings) -> Result<Self> {
        if settings.rays_per_source < 32 {
            return Err(Error::Validation(format!(
                "at least 32 rays per source required, got {}",
                settings.rays_per_source
            )));
        }
        if !(distance > 0.0) || !(extent > 0.0) {
            return Err(Error::Validation("pattern distance and extent must be positive".into()));
        }
        let camera = Camera::new(design)?;
        let sensor = design.sensor;
        let lens = &design.lens;
        let footprint = sensor.pixel_size * scene_scale(design, distance)?;
        let n_src = ((extent * settings.sources_per_pixel as f64 / footprint).ceil() as usize).clamp(1, MAX_SOURCES);
        let cell = extent / n_src as f64;
        let n_px = sensor.pixel_count();
        let n_rays = settings.rays_per_source;

        let chunks: Vec<(Vec<(f64, f64)>, Vec<Vec<(u32, f64)>>, usize)> = (0..n_src.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut rng = settings
                    .jitter_seed
                    .map(|s| ChaCha8Rng::seed_from_u64(s ^ (c as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
                let mut scratch = vec![0.0; n_px];
                let (mut cells, mut entries, mut traced) = (Vec::new(), Vec::new(), 0);
                for i in c * CHUNK..((c + 1) * CHUNK).min(n_src) {
                    let lo = -0.5 * extent + i as f64 * cell;
                    cells.push((lo, lo + cell));
                    let offset = rng.as_mut().map_or(0.0, |r| r.gen_range(-0.5..0.5));
                    let source = Source::Point {
                        z: -distance,
                        y: lo + (0.5 + offset) * cell,
                    };
                    let mut row = Vec::new();
                    if let Some((h0, h1)) =
                        main_lens_interval_with(lens, source, design.stop_radius(), settings.aperture_steps)
                    {
                        let hs = uniform_heights(h0, h1, n_rays);
                        let paths: Vec<_> = hs.iter().map(|&h| camera.forward(source.ray(h, lens))).collect();
                        traced += n_rays;
                        for j in 0..n_rays - 1 {
                            if let (Some(p), Some(q)) = (&paths[j], &paths[j + 1]) {
                                if p.lenslet == q.lenslet {
                                    splat(&mut scratch, &sensor, p.sensor_y, q.sensor_y, hs[j + 1] - hs[j]);
                                }
                            }
                        }
                        for (k, v) in scratch.iter_mut().enumerate() {
                            if *v != 0.0 {
                                row.push((k as u32, *v));
                                *v = 0.0;
                            }
                        }
                    }
                    entries.push(row);
                }
                (cells, entries, traced)
            })
            .collect();
        let mut t = Transport {
            distance,
            extent,
            pixels: n_px,
            cells: Vec::with_capacity(n_src),
            entries: Vec::with_capacity(n_src),
            traced: 0,
        };
        for (cells, entries, traced) in chunks {
            t.cells.extend(cells);
            t.entries.extend(entries);
            t.traced += traced;
        }
        Ok(t)
    }

    pub fn source_count(&self) -> usize {
        self.cells.len()
    }

    pub fn apply(&self, pattern: &Pattern1D) -> Result<SensorImage1D> {
        pattern.validate()?;
        let mut image = SensorImage1D::zeros(self.pixels);
        for ((a, b), row) in self.cells.iter().zip(&self.entries) {
            let w = pattern.mean_intensity(*a, *b);
            if w > 0.0 {
                for &(k, v) in row {
                    image.intensities[k as usize] += w * v;
                }
            }
        }
        image.exposure_rays = self.traced;
        Ok(image)
    }

    pub fn white(&self) -> SensorImage1D {
        self.apply(&Pattern1D::white(self.distance, self.extent)).expect("white pattern is valid")
    }
}

/// Renders `pattern` and the matching white image.
pub fn render_with_white(
    design: &CameraDesign,
    pattern: &Pattern1D,
    settings: &RenderSettings,
) -> Result<(SensorImage1D, SensorImage1D)> {
    pattern.validate()?;
    let t = Transport::build(design, pattern.distance, pattern.lateral_extent, settings)?;
    Ok((t.apply(pattern)?, t.white()))
}

pub fn render_pattern(design: &CameraDesign, pattern: &Pattern1D, settings: &RenderSettings) -> Result<SensorImage1D> {
    Ok(render_with_white(design, pattern, settings)?.0)
}

/// Per-pixel division by the white image; pixels under `floor` times the
/// white maximum become zero.
pub fn normalize_white(image: &SensorImage1D, white: &SensorImage1D, floor: f64) -> Result<SensorImage1D> {
    if image.len() != white.len() {
        return Err(Error::ShapeMismatch {
            left: image.len(),
            right: white.len(),
        });
    }
    let cut = floor * white.max();
    Ok(SensorImage1D {
        intensities: image
            .intensities
            .iter()
            .zip(&white.intensities)
            .map(|(v, w)| if *w > cut && *w > 0.0 { v / w } else { 0.0 })
            .collect(),
        exposure_rays: image.exposure_rays,
    })
}

/// Difference between the means of the values above and at-or-below the
/// region mean.
pub fn contrast(region: &[f64]) -> Result<f64> {
    if region.is_empty() {
        return Err(Error::DegenerateRegion);
    }
    let mu = region.iter().sum::<f64>() / region.len() as f64;
    let (mut hi, mut nh, mut lo, mut nl) = (0.0, 0usize, 0.0, 0usize);
    for &v in region {
        if v > mu {
            hi += v;
            nh += 1;
        } else {
            lo += v;
            nl += 1;
        }
    }
    if nh == 0 || nl == 0 {
        return Err(Error::DegenerateRegion);
    }
    Ok(hi / nh as f64 - lo / nl as f64)
}

/// Pixel indices whose centers lie in the central `fraction` of MLI `k`.
pub fn mli_region(design: &CameraDesign, k: i64, fraction: f64) -> Result<Vec<usize>> {
    let m = measure_magnification(design)?;
    let (c, half) = (m * design.mla.center(k), 0.5 * fraction * m * design.mla.d_ml);
    Ok((0..design.sensor.pixel_count())
        .filter(|&i| (design.sensor.pixel_center(i) - c).abs() <= half)
        .collect())
}

/// Border pixels on each side of an MLI excluded from contrast regions.
pub const CONTRAST_BORDER_PX: f64 = 1.0;

/// Pixels of the nominal MLI `k` (pitch `m * d_ML`) minus `border_px`
/// pixels on each side.
pub fn mli_inner_region(design: &CameraDesign, k: i64, border_px: f64) -> Result<Vec<usize>> {
    let m = measure_magnification(design)?;
    let s = design.sensor.pixel_size;
    let c = m * design.mla.center(k);
    let half = 0.5 * m * design.mla.d_ml - border_px * s;
    Ok((0..design.sensor.pixel_count())
        .filter(|&i| (design.sensor.pixel_center(i) - c).abs() + 0.5 * s <= half)
        .collect())
}

/// Contrast of the center MLI of a normalized image without its border pixels.
pub fn center_mli_contrast(design: &CameraDesign, normalized: &SensorImage1D) -> Result<f64> {
    let region: Vec<f64> = mli_inner_region(design, 0, CONTRAST_BORDER_PX)?
        .into_iter()
        .map(|i| normalized.intensities[i])
        .collect();
    contrast(&region)
}

/// Sub-pixel position of the 50% crossing between pixels `i` and `i + 1`.
pub fn edge_position(values: &[f64], i: usize) -> Option<f64> {
    let (a, b) = (*values.get(i)?, *values.get(i + 1)?);
    if (a - 0.5) * (b - 0.5) > 0.0 || a == b {
        return None;
    }
    Some(i as f64 + (0.5 - a) / (b - a))
}

/// All 50% crossings among consecutive pixels of `indices`.
pub fn edge_crossings(values: &[f64], indices: &[usize]) -> Vec<f64> {
    indices
        .windows(2)
        .filter(|w| w[1] == w[0] + 1)
        .filter_map(|w| edge_position(values, w[0]))
        .collect()
}

/// Disparity coefficient from the pixel distance between the same edge in
/// two adjacent microlens images.
pub fn measured_gamma(image: &SensorImage1D, design: &CameraDesign, edge_pair: (usize, usize)) -> Result<f64> {
    let v = &image.intensities;
    let p0 = edge_position(v, edge_pair.0).ok_or(Error::EdgeNotFound(edge_pair.0))?;
    let p1 = edge_position(v, edge_pair.1).ok_or(Error::EdgeNotFound(edge_pair.1))?;
    let d_mli = measure_magnification(design)? * design.mla.d_ml;
    Ok(((p1 - p0).abs() * design.sensor.pixel_size - d_mli) / d_mli)
}

/// Renders one edge whose main-lens image sits midway between lenslets 0
/// and 1 and measures its disparity between MLIs 0 and 1.
pub fn edge_gamma(design: &CameraDesign, settings: &RenderSettings) -> Result<f64> {
    let distance = design.a_main;
    let scale = scene_scale(design, distance)?;
    let m = measure_magnification(design)?;
    // scene height whose main-lens image lies midway between lenslets 0 and 1
    let pp = principal_planes(&design.lens)?;
    let edge = -0.5 * design.mla.d_ml * (distance - pp.p1) / (design.b_main - pp.p2);
    let extent = scene_field(design, distance)?.max(4.0 * scale * m * design.mla.d_ml);
    let pattern = Pattern1D::edge(edge, distance, extent);
    let (img, white) = render_with_white(design, &pattern, settings)?;
    let norm = normalize_white(&img, &white, settings.white_floor)?;
    let v = &norm.intensities;
    let crossing = |k: i64| -> Result<f64> {
        let region = mli_region(design, k, 0.95)?;
        let target = m * design.mla.center(k);
        edge_crossings(v, &region)
            .into_iter()
            .map(|p| (p, (design.sensor.pixel_center(0) + p * design.sensor.pixel_size - target).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|p| p.0)
            .ok_or(Error::EdgeNotFound(region.first().copied().unwrap_or(0)))
    };
    let (p0, p1) = (crossing(0)?, crossing(1)?);
    let d_mli = m * design.mla.d_ml;
    Ok(((p1 - p0).abs() * design.sensor.pixel_size - d_mli) / d_mli)
}

/// Scene period giving an image period of `pixels` pixels at `distance`.
pub fn period_for_pixels(design: &CameraDesign, distance: f64, pixels: f64) -> Result<f64> {
    Ok(pixels * design.sensor.pixel_size * scene_scale(design, distance)?)
}

/// Widest stripe of a line-width sweep, in image pixels: half of
/// [`SWEEP_IMAGE_PERIOD_PX`], so the sweep ends at the contrast-sweep pattern.
pub const SWEEP_MAX_LINE_PX: f64 = 4.0;

/// Scene line width imaging onto [`SWEEP_MAX_LINE_PX`] pixels at `distance`.
/// Each design gets its own scale so sweeps compare in image space.
pub fn default_max_line_width(design: &CameraDesign, distance: f64) -> Result<f64> {
    period_for_pixels(design, distance, SWEEP_MAX_LINE_PX)
}

/// Image period used by contrast sweeps, in pixels.
pub const SWEEP_IMAGE_PERIOD_PX: f64 = 8.0;

/// Center-MLI contrast at each distance. Stripes keep the period tuned at the
/// design's focus distance; the star profile scales it with distance.
pub fn contrast_sweep(
    design: &CameraDesign,
    distances: &[f64],
    kind: PatternKind,
    settings: &RenderSettings,
) -> Result<Vec<(f64, f64)>> {
    if distances.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Validation("sweep distances must be ascending".into()));
    }
    let base = period_for_pixels(design, design.a_main, SWEEP_IMAGE_PERIOD_PX)?;
    distances
        .iter()
        .map(|&dist| {
            let norm = render_sweep_image(design, kind, base, dist, settings)?;
            Ok((dist, center_mli_contrast(design, &norm)?))
        })
        .collect()
}

fn render_sweep_image(
    design: &CameraDesign,
    kind: PatternKind,
    base_period: f64,
    distance: f64,
    settings: &RenderSettings,
) -> Result<SensorImage1D> {
    let extent = scene_field(design, distance)?;
    let pattern = match kind {
        PatternKind::Stripes => Pattern1D::stripes(base_period, distance, extent),
        PatternKind::StarRadialProfile => Pattern1D::star(base_period / design.a_main, distance, extent),
        PatternKind::White => Pattern1D::white(distance, extent),
    };
    let (img, white) = render_with_white(design, &pattern, settings)?;
    normalize_white(&img, &white, settings.white_floor)
}

/// White-normalized sensor image of the sweep pattern at one distance.
pub fn render_normalized(
    design: &CameraDesign,
    kind: PatternKind,
    distance: f64,
    settings: &RenderSettings,
) -> Result<SensorImage1D> {
    let base = period_for_pixels(design, design.a_main, SWEEP_IMAGE_PERIOD_PX)?;
    render_sweep_image(design, kind, base, distance, settings)
}

/// Divides each contrast by the maximum of the sweep.
pub fn normalize_sweep(sweep: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let max = sweep.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    sweep.iter().map(|&(d, c)| (d, if max > 0.0 { c / max } else { 0.0 })).collect()
}

/// Center-MLI contrast for stripe widths `w_max * k / steps`, `k = 1..=steps`.
pub fn line_width_sweep(
    design: &CameraDesign,
    distance: f64,
    w_max: f64,
    steps: usize,
    settings: &RenderSettings,
) -> Result<Vec<(f64, f64)>> {
    let extent = scene_field(design, distance)?;
    let transport = Transport::build(design, distance, extent, settings)?;
    let white = transport.white();
    (1..=steps)
        .map(|k| {
            let w = w_max * k as f64 / steps as f64;
            let img = transport.apply(&Pattern1D::stripes(2.0 * w, distance, extent))?;
            let norm = normalize_white(&img, &white, settings.white_floor)?;
            Ok((w, center_mli_contrast(design, &norm)?))
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(out: W, sweep: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["distance_mm", "contrast"])?;
    for (d, c) in sweep {
        w.write_record([d.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile_csv<W: Write>(out: W, image: &SensorImage1D) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["pixel_index", "intensity"])?;
    for (i, v) in image.intensities.iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contrast_examples() {
        assert!((contrast(&[0.0, 1.0, 0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((contrast(&[0.0, 0.0, 0.5, 1.0]).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(contrast(&[0.3; 5]), Err(Error::DegenerateRegion)));
        assert!(matches!(contrast(&[]), Err(Error::DegenerateRegion)));
    }

    #[test]
    fn normalization_rules() {
        let white = SensorImage1D {
            intensities: vec![10.0, 10.0, 0.05, 0.0],
            exposure_rays: 1,
        };
        let half = SensorImage1D {
            intensities: vec![5.0, 5.0, 0.025, 0.0],
            exposure_rays: 1,
        };
        let n = normalize_white(&half, &white, 0.01).unwrap();
        assert_eq!(n.intensities, vec![0.5, 0.5, 0.0, 0.0]);
        let same = normalize_white(&white, &white, 0.01).unwrap();
        assert_eq!(same.intensities, vec![1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            normalize_white(&half, &SensorImage1D::zeros(3), 0.01),
            Err(Error::ShapeMismatch { left: 4, right: 3 })
        ));
    }

    #[test]
    fn splat_conserves_weight() {
        let sensor = SensorSpec::new(1.0, 10.0);
        let mut img = vec![0.0; 10];
        splat(&mut img, &sensor, -1.25, 0.75, 2.0);
        assert!((img.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!((img[3] - 0.25).abs() < 1e-12 && (img[4] - 1.0).abs() < 1e-12 && (img[5] - 0.75).abs() < 1e-12);
        splat(&mut img, &sensor, 0.2, 0.2, 1.0);
        assert!((img[5] - 1.75).abs() < 1e-12);
    }

    #[test]
    fn edges_and_gamma_formula() {
        let v = [0.0, 0.2, 0.8, 1.0];
        assert!((edge_position(&v, 1).unwrap() - 1.5).abs() < 1e-12);
        assert!(edge_position(&v, 0).is_none());
        assert_eq!(edge_crossings(&v, &[0, 1, 2, 3]), vec![1.5]);
    }

    #[test]
    fn pattern_intensities() {
        let p = Pattern1D::stripes(2.0, 100.0, 10.0);
        assert_eq!((p.intensity(0.5), p.intensity(1.5), p.intensity(-0.5)), (1.0, 0.0, 0.0));
        assert!((p.mean_intensity(0.0, 2.0) - 0.5).abs() < 1e-12);
        assert!((p.mean_intensity(0.5, 1.5) - 0.5).abs() < 1e-12);
        assert!((p.mean_intensity(0.0, 0.5) - 1.0).abs() < 1e-12);
        assert!((p.mean_intensity(-0.5, 0.25) - 1.0 / 3.0).abs() < 1e-12);
        let e = Pattern1D::edge(0.3, 100.0, 10.0);
        assert_eq!((e.intensity(0.2), e.intensity(0.4), e.intensity(4.9)), (0.0, 1.0, 1.0));
        assert_eq!(e.intensity(-4.9), 0.0);
        let s = Pattern1D::star(0.01, 200.0, 10.0);
        assert!((s.period - 2.0).abs() < 1e-12);
    }
}
