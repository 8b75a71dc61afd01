//! Geometric primitives and the sequential 2D tracer: main lens surfaces, an
//! ideal thin-lens microlens array and the sensor plane.

mod bundle;
mod camera;
mod ray;
mod surface;

pub(crate) use bundle::main_lens_interval_with;
pub use bundle::{entrance_fan, find_interval, find_interval_with, main_lens_interval, paraxial_heights, uniform_heights, Source};
pub use camera::{
    trace_main_lens_only, trace_through_camera, Camera, CameraDesign, CameraPath, MlaModel, MlaSpec, SensorHit,
    SensorSpec, TraceReport,
};
pub use ray::{snell, thin_lens_transfer, Ray2D};
pub use surface::{refract_at_surface, LensPrescription, Profile, Surface};

/// Applies the ideal thin microlens centered at `lens_center_y` to a ray
/// sitting on the MLA plane.
pub fn apply_thin_microlens(ray: Ray2D, lens_center_y: f64, f_ml: f64) -> Ray2D {
    thin_lens_transfer(ray, lens_center_y, f_ml)
}
