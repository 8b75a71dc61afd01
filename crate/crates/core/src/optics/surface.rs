use serde::{Deserialize, Serialize};

use super::ray::{snell, thin_lens_transfer, Ray2D};
use crate::error::{Error, Result};

/// Shape of a refracting interface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Profile {
    Planar,
    /// Sphere with signed radius; positive means the center lies on the image side.
    Spherical { radius: f64 },
    /// Aberration-free thin lens in air, used for reference systems.
    Ideal { focal_length: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    #[serde(flatten)]
    pub profile: Profile,
    /// Axial distance to the next vertex.
    pub thickness: f64,
    /// Refractive index of the medium behind this surface.
    pub index_after: f64,
    pub semi_aperture: f64,
    #[serde(default)]
    pub is_stop: bool,
}

impl Surface {
    pub fn spherical(radius: f64, thickness: f64, index_after: f64, semi_aperture: f64) -> Self {
        let profile = if radius.is_infinite() {
            Profile::Planar
        } else {
            Profile::Spherical { radius }
        };
        Self {
            profile,
            thickness,
            index_after,
            semi_aperture,
            is_stop: false,
        }
    }

    pub fn planar(thickness: f64, index_after: f64, semi_aperture: f64) -> Self {
        Self::spherical(f64::INFINITY, thickness, index_after, semi_aperture)
    }

    pub fn ideal(focal_length: f64, thickness: f64, semi_aperture: f64) -> Self {
        Self {
            profile: Profile::Ideal { focal_length },
            thickness,
            index_after: 1.0,
            semi_aperture,
            is_stop: false,
        }
    }

    pub fn stop(mut self) -> Self {
        self.is_stop = true;
        self
    }

    /// Signed radius, infinite for planar and ideal surfaces.
    pub fn radius(&self) -> f64 {
        match self.profile {
            Profile::Spherical { radius } => radius,
            _ => f64::INFINITY,
        }
    }
}

/// Intersects `ray` with the surface whose vertex sits at `vertex_z`, then
/// refracts from `n1` into `n2`. Works for rays travelling in either direction.
/// `clip` is the clear semi-aperture applied at the intersection.
pub(crate) fn interact(
    ray: Ray2D,
    profile: Profile,
    vertex_z: f64,
    clip: f64,
    n1: f64,
    n2: f64,
) -> Ray2D {
    if !ray.alive {
        return ray;
    }
    let at_plane = ray.advance_to(vertex_z);
    if !at_plane.alive {
        return at_plane;
    }
    match profile {
        Profile::Planar => {
            if at_plane.y.abs() > clip {
                return at_plane.killed();
            }
            match snell((ray.dz, ray.dy), (1.0, 0.0), n1, n2) {
                Some((dz, dy)) => Ray2D { dz, dy, ..at_plane },
                None => at_plane.killed(),
            }
        }
        Profile::Ideal { focal_length } => {
            if at_plane.y.abs() > clip {
                return at_plane.killed();
            }
            thin_lens_transfer(at_plane, 0.0, focal_length)
        }
        Profile::Spherical { radius } => {
            let cz = vertex_z + radius;
            let (oz, oy) = (at_plane.z - cz, at_plane.y);
            let b = ray.dz * oz + ray.dy * oy;
            let c = oz * oz + oy * oy - radius * radius;
            let disc = b * b - c;
            if disc < 0.0 {
                return at_plane.killed();
            }
            let q = -b - b.signum() * disc.sqrt();
            let roots = if q == 0.0 { [0.0, 0.0] } else { [q, c / q] };
            // the cap containing the vertex is the one closest to the vertex plane
            let t = if (roots[0] * ray.dz).abs() <= (roots[1] * ray.dz).abs() {
                roots[0]
            } else {
                roots[1]
            };
            let z = at_plane.z + t * ray.dz;
            let y = at_plane.y + t * ray.dy;
            if (z - vertex_z).abs() >= radius.abs() || y.abs() > clip {
                return Ray2D { z, y, ..at_plane }.killed();
            }
            let normal = ((z - cz) / radius, y / radius);
            match snell((ray.dz, ray.dy), normal, n1, n2) {
                Some((dz, dy)) => Ray2D {
                    z,
                    y,
                    dz,
                    dy,
                    alive: true,
                },
                None => Ray2D { z, y, ..at_plane }.killed(),
            }
        }
    }
}

/// Refracts a forward ray at one surface of a prescription.
pub fn refract_at_surface(ray: Ray2D, surface: &Surface, surface_vertex_z: f64, n_before: f64) -> Ray2D {
    interact(
        ray,
        surface.profile,
        surface_vertex_z,
        surface.semi_aperture,
        n_before,
        surface.index_after,
    )
}

#[derive(Deserialize)]
struct RawPrescription {
    name: String,
    #[serde(default)]
    focal_length_nominal: Option<f64>,
    surfaces: Vec<Surface>,
}

impl TryFrom<RawPrescription> for LensPrescription {
    type Error = Error;

    fn try_from(raw: RawPrescription) -> Result<Self> {
        LensPrescription::new(raw.name, raw.focal_length_nominal, raw.surfaces)
    }
}

/// Main lens geometry, object side first. The first vertex sits at z = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPrescription")]
pub struct LensPrescription {
    pub name: String,
    pub focal_length_nominal: Option<f64>,
    surfaces: Vec<Surface>,
    #[serde(skip)]
    vertices: Vec<f64>,
    #[serde(skip)]
    stop: usize,
}

impl LensPrescription {
    /// Validates the surface list. Without an explicit stop marker the surface
    /// with the smallest semi-aperture becomes the stop.
    pub fn new(name: impl Into<String>, focal_length_nominal: Option<f64>, mut surfaces: Vec<Surface>) -> Result<Self> {
        if surfaces.is_empty() {
            return Err(Error::Validation("prescription has no surfaces".into()));
        }
        for (i, s) in surfaces.iter().enumerate() {
            if !(s.semi_aperture > 0.0) || !s.semi_aperture.is_finite() {
                return Err(Error::Validation(format!("surface {i}: semi-aperture must be positive")));
            }
            if !(s.index_after >= 1.0) || !s.index_after.is_finite() {
                return Err(Error::Validation(format!("surface {i}: refractive index must be >= 1")));
            }
            if !(s.thickness >= 0.0) || !s.thickness.is_finite() {
                return Err(Error::Validation(format!("surface {i}: thickness must be finite and >= 0")));
            }
            match s.profile {
                Profile::Spherical { radius } if radius == 0.0 || radius.is_nan() => {
                    return Err(Error::Validation(format!("surface {i}: zero radius")));
                }
                Profile::Ideal { focal_length } if focal_length == 0.0 || !focal_length.is_finite() => {
                    return Err(Error::Validation(format!("surface {i}: invalid focal length")));
                }
                _ => {}
            }
        }
        if surfaces.last().map(|s| s.index_after) != Some(1.0) {
            return Err(Error::Validation("image space must be air (last index 1)".into()));
        }
        let stops: Vec<usize> = (0..surfaces.len()).filter(|&i| surfaces[i].is_stop).collect();
        let stop = match stops.as_slice() {
            [] => {
                let mut best = 0;
                for (i, s) in surfaces.iter().enumerate() {
                    if s.semi_aperture < surfaces[best].semi_aperture {
                        best = i;
                    }
                }
                surfaces[best].is_stop = true;
                best
            }
            [one] => *one,
            _ => return Err(Error::Validation("more than one aperture stop".into())),
        };
        let mut vertices = Vec::with_capacity(surfaces.len());
        let mut z = 0.0;
        for s in &surfaces {
            vertices.push(z);
            z += s.thickness;
        }
        Ok(Self {
            name: name.into(),
            focal_length_nominal,
            surfaces,
            vertices,
            stop,
        })
    }

    /// Single ideal thin lens that doubles as the stop.
    pub fn ideal_thin(focal_length: f64, semi_aperture: f64) -> Self {
        Self::new(
            format!("ideal f={focal_length}"),
            Some(focal_length),
            vec![Surface::ideal(focal_length, 0.0, semi_aperture).stop()],
        )
        .expect("valid ideal lens")
    }

    pub fn surfaces(&self) -> &[Surface] {
        &self.surfaces
    }

    pub fn vertex_z(&self, i: usize) -> f64 {
        self.vertices[i]
    }

    pub fn last_vertex_z(&self) -> f64 {
        *self.vertices.last().unwrap()
    }

    pub fn stop_index(&self) -> usize {
        self.stop
    }

    pub fn stop_surface(&self) -> &Surface {
        &self.surfaces[self.stop]
    }

    pub fn stop_z(&self) -> f64 {
        self.vertices[self.stop]
    }

    /// Index of the medium in front of surface `i`.
    pub fn index_before(&self, i: usize) -> f64 {
        if i == 0 {
            1.0
        } else {
            self.surfaces[i - 1].index_after
        }
    }

    fn clip(&self, i: usize, stop_radius: f64) -> f64 {
        let sa = self.surfaces[i].semi_aperture;
        if i == self.stop {
            sa.min(stop_radius)
        } else {
            sa
        }
    }

    /// Traces a forward ray through surfaces `from..` with the stop opened to
    /// `stop_radius`.
    pub fn trace_forward_from(&self, mut ray: Ray2D, from: usize, stop_radius: f64) -> Ray2D {
        for i in from..self.surfaces.len() {
            if !ray.alive {
                break;
            }
            let s = &self.surfaces[i];
            ray = interact(
                ray,
                s.profile,
                self.vertices[i],
                self.clip(i, stop_radius),
                self.index_before(i),
                s.index_after,
            );
        }
        ray
    }

    pub fn trace_forward(&self, ray: Ray2D, stop_radius: f64) -> Ray2D {
        self.trace_forward_from(ray, 0, stop_radius)
    }

    /// Traces a backward ray (dz < 0) from image space through surfaces
    /// `last..=to` in reverse order.
    pub fn trace_backward_to(&self, mut ray: Ray2D, to: usize, stop_radius: f64) -> Ray2D {
        for i in (to..self.surfaces.len()).rev() {
            if !ray.alive {
                break;
            }
            let s = &self.surfaces[i];
            ray = interact(
                ray,
                s.profile,
                self.vertices[i],
                self.clip(i, stop_radius),
                s.index_after,
                self.index_before(i),
            );
        }
        ray
    }

    pub fn trace_backward(&self, ray: Ray2D, stop_radius: f64) -> Ray2D {
        self.trace_backward_to(ray, 0, stop_radius)
    }

    /// Axial position of the paraxial entrance pupil.
    pub fn entrance_pupil_z(&self) -> f64 {
        if self.stop == 0 {
            return self.vertices[0];
        }
        let u = 1e-6;
        let probe = Ray2D::with_slope(self.stop_z(), 0.0, u, false);
        let out = self.trace_backward_to(probe, 0, f64::INFINITY);
        if !out.alive || out.dy == 0.0 {
            return self.vertices[0];
        }
        out.z - out.y / out.slope()
    }

    /// Height at which a backward image-space ray meets the stop surface,
    /// ignoring the stop's own clipping. `None` if an earlier surface blocks it.
    pub fn backward_height_at_stop(&self, ray: Ray2D) -> Option<f64> {
        let ray = self.trace_backward_to(ray, self.stop + 1, f64::INFINITY);
        if !ray.alive {
            return None;
        }
        let s = &self.surfaces[self.stop];
        let at = interact(
            ray,
            s.profile,
            self.vertices[self.stop],
            f64::INFINITY,
            s.index_after,
            self.index_before(self.stop),
        );
        at.alive.then_some(at.y)
    }

    /// Largest semi-aperture of the front surface, used to bound launch heights.
    pub fn front_semi_aperture(&self) -> f64 {
        self.surfaces[0].semi_aperture
    }
}
