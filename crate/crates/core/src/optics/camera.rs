use serde::{Deserialize, Serialize};

use super::ray::{thin_lens_transfer, Ray2D};
use super::surface::LensPrescription;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MlaModel {
    #[default]
    IdealThin,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlaSpec {
    pub f_ml: f64,
    /// Lens pitch; lenslet `k` is centered at `k * d_ml`.
    pub d_ml: f64,
    #[serde(default)]
    pub model: MlaModel,
}

impl MlaSpec {
    pub fn new(f_ml: f64, d_ml: f64) -> Self {
        Self {
            f_ml,
            d_ml,
            model: MlaModel::IdealThin,
        }
    }

    pub fn center(&self, k: i64) -> f64 {
        k as f64 * self.d_ml
    }

    pub fn lenslet_of(&self, y: f64) -> i64 {
        (y / self.d_ml).round() as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub pixel_size: f64,
    pub width: f64,
}

impl SensorSpec {
    pub fn new(pixel_size: f64, width: f64) -> Self {
        Self { pixel_size, width }
    }

    pub fn pixel_count(&self) -> usize {
        ((self.width / self.pixel_size) * (1.0 + 1e-12)).floor() as usize
    }

    /// Height of the center of pixel `i`; the pixel row is centered on the axis.
    pub fn pixel_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5 - self.pixel_count() as f64 / 2.0) * self.pixel_size
    }

    pub fn pixel_at(&self, y: f64) -> Option<usize> {
        let n = self.pixel_count();
        let idx = (y / self.pixel_size + n as f64 / 2.0).floor();
        if idx >= 0.0 && (idx as usize) < n {
            Some(idx as usize)
        } else {
            None
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pixel_size > 0.0) || !(self.width > 0.0) || self.pixel_count() < 1 {
            return Err(Error::Validation("sensor needs positive pixel size and width >= one pixel".into()));
        }
        Ok(())
    }
}

/// Full parameter set of a Keplerian focused plenoptic camera.
///
/// Image-side distances are measured from the last lens vertex: the MLA sits
/// at `b_main + a_ml` and the sensor at `b_main + a_ml + b_ml` behind it. The
/// object distance `a_main` is measured from the first vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraDesign {
    pub lens: LensPrescription,
    pub mla: MlaSpec,
    pub sensor: SensorSpec,
    pub a_main: f64,
    pub b_main: f64,
    pub a_ml: f64,
    pub b_ml: f64,
    pub d_main: f64,
}

impl CameraDesign {
    pub fn validate(&self) -> Result<()> {
        let geom = |m: String| Err(Error::DesignGeometry(m));
        if !(self.a_main > 0.0) {
            return geom(format!("a_main = {} must be positive", self.a_main));
        }
        if !(self.a_ml > 0.0) || !(self.b_ml > 0.0) {
            return geom(format!("a_ml = {}, b_ml = {} must be positive", self.a_ml, self.b_ml));
        }
        if !(self.b_main + self.a_ml > 0.0) {
            return geom(format!("MLA at {} lies in front of the last vertex", self.b_main + self.a_ml));
        }
        if !self.b_main.is_finite() {
            return geom("b_main is not finite".into());
        }
        if !(self.d_main > 0.0) {
            return geom(format!("d_main = {} must be positive", self.d_main));
        }
        if !(self.mla.f_ml > 0.0) || !(self.mla.d_ml > 0.0) {
            return geom("MLA focal length and pitch must be positive".into());
        }
        self.sensor.validate()
    }

    pub fn mla_z(&self) -> f64 {
        self.lens.last_vertex_z() + self.b_main + self.a_ml
    }

    pub fn sensor_z(&self) -> f64 {
        self.mla_z() + self.b_ml
    }

    pub fn stop_radius(&self) -> f64 {
        0.5 * self.d_main
    }

    /// Aperture diameter capped at the physical stop.
    pub fn max_d_main(&self) -> f64 {
        2.0 * self.lens.stop_surface().semi_aperture
    }
}

/// One ray arriving on the sensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorHit {
    pub y: f64,
    pub incident_angle: f64,
    pub source_ray_index: usize,
    /// Lenslet the ray passed through.
    pub lenslet: i64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceReport {
    pub sensor_hits: Vec<SensorHit>,
    pub blocked_count: usize,
}

/// Where a single ray ends up after the full camera.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraPath {
    /// Ray leaving the lenslet, positioned at the MLA plane.
    pub after_mla: Ray2D,
    pub lenslet: i64,
    pub sensor_y: f64,
}

/// Validated design with cached axial positions.
#[derive(Clone, Copy, Debug)]
pub struct Camera<'a> {
    pub design: &'a CameraDesign,
    pub mla_z: f64,
    pub sensor_z: f64,
}

impl<'a> Camera<'a> {
    pub fn new(design: &'a CameraDesign) -> Result<Self> {
        design.validate()?;
        Ok(Self {
            design,
            mla_z: design.mla_z(),
            sensor_z: design.sensor_z(),
        })
    }

    pub fn lens(&self) -> &'a LensPrescription {
        &self.design.lens
    }

    pub fn main_lens(&self, ray: Ray2D) -> Ray2D {
        self.design.lens.trace_forward(ray, self.design.stop_radius())
    }

    /// Traces an object-space ray to the sensor. `None` if blocked anywhere,
    /// including landing off the sensor or travelling backwards.
    pub fn forward(&self, ray: Ray2D) -> Option<CameraPath> {
        let out = self.main_lens(ray);
        if !out.alive || out.dz <= 0.0 {
            return None;
        }
        self.from_image_space(out)
    }

    /// Continues an image-space ray through MLA and onto the sensor.
    pub fn from_image_space(&self, out: Ray2D) -> Option<CameraPath> {
        let at_mla = out.advance_to(self.mla_z);
        if !at_mla.alive {
            return None;
        }
        let mla = &self.design.mla;
        let lenslet = mla.lenslet_of(at_mla.y);
        let after = thin_lens_transfer(at_mla, mla.center(lenslet), mla.f_ml);
        let hit = after.advance_to(self.sensor_z);
        if !hit.alive || hit.y.abs() > 0.5 * self.design.sensor.width {
            return None;
        }
        Some(CameraPath {
            after_mla: after,
            lenslet,
            sensor_y: hit.y,
        })
    }

    /// Backward ray from a sensor point through a point on lenslet `k`, traced
    /// out of the main lens. Returns the object-space ray if it escapes.
    pub fn backward(&self, sensor_y: f64, mla_y: f64, k: i64, alpha: f64) -> Option<Ray2D> {
        let mla = &self.design.mla;
        if (mla_y - mla.center(k)).abs() > 0.5 * mla.d_ml {
            return None;
        }
        let ray = Ray2D::through((self.sensor_z, sensor_y), (self.mla_z, mla_y));
        if ray.angle().abs() > alpha {
            return None;
        }
        let at_mla = ray.advance_to(self.mla_z);
        let after = thin_lens_transfer(at_mla, mla.center(k), mla.f_ml);
        let out = self.design.lens.trace_backward(after, self.design.stop_radius());
        (out.alive && out.dz < 0.0).then_some(out)
    }
}

/// Traces each ray through main lens, MLA and onto the sensor.
pub fn trace_through_camera(rays: &[Ray2D], design: &CameraDesign) -> Result<TraceReport> {
    let camera = Camera::new(design)?;
    let mut report = TraceReport::default();
    for (i, ray) in rays.iter().enumerate() {
        match ray.alive.then(|| camera.forward(*ray)).flatten() {
            Some(path) => {
                let hit = path.after_mla.advance_to(camera.sensor_z);
                report.sensor_hits.push(SensorHit {
                    y: path.sensor_y,
                    incident_angle: hit.angle(),
                    source_ray_index: i,
                    lenslet: path.lenslet,
                })
            }
            None => report.blocked_count += 1,
        }
    }
    Ok(report)
}

/// Image-space rays behind the last main-lens surface; blocked rays come back
/// with `alive = false`.
pub fn trace_main_lens_only(rays: &[Ray2D], lens: &LensPrescription, d_main: f64) -> Vec<Ray2D> {
    rays.iter().map(|r| lens.trace_forward(*r, 0.5 * d_main)).collect()
}
