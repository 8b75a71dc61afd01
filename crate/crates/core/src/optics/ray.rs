/// A meridional ray: position on the (z, y) plane plus a unit direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray2D {
    pub z: f64,
    pub y: f64,
    pub dz: f64,
    pub dy: f64,
    pub alive: bool,
}

impl Ray2D {
    /// Builds a live ray, normalizing the direction.
    pub fn new(z: f64, y: f64, dz: f64, dy: f64) -> Self {
        let norm = dz.hypot(dy);
        Self {
            z,
            y,
            dz: dz / norm,
            dy: dy / norm,
            alive: norm > 0.0 && norm.is_finite(),
        }
    }

    /// Ray starting at `from` and heading towards `to`.
    pub fn through(from: (f64, f64), to: (f64, f64)) -> Self {
        Self::new(from.0, from.1, to.0 - from.0, to.1 - from.1)
    }

    /// Ray with slope `u = dy/dz`, travelling towards +z if `forward`.
    pub fn with_slope(z: f64, y: f64, u: f64, forward: bool) -> Self {
        let s = if forward { 1.0 } else { -1.0 };
        Self::new(z, y, s, s * u)
    }

    pub fn slope(&self) -> f64 {
        self.dy / self.dz
    }

    pub fn forward(&self) -> bool {
        self.dz > 0.0
    }

    /// Height of the ray's supporting line at axial position `z`.
    pub fn height_at(&self, z: f64) -> f64 {
        self.y + (z - self.z) * self.slope()
    }

    pub fn killed(mut self) -> Self {
        self.alive = false;
        self
    }

    /// Moves the ray along its line to the plane at `z`.
    pub fn advance_to(self, z: f64) -> Self {
        if !self.alive {
            return self;
        }
        if self.dz == 0.0 {
            return self.killed();
        }
        Self {
            y: self.height_at(z),
            z,
            ..self
        }
    }

    pub fn mirrored(self) -> Self {
        Self {
            y: -self.y,
            dy: -self.dy,
            ..self
        }
    }

    /// Incident angle against the axis (radians).
    pub fn angle(&self) -> f64 {
        self.dy.atan2(self.dz.abs())
    }
}

/// Ideal thin-lens transfer at the current position: `u' = u - (y - c)/f` for
/// forward rays. Backward rays see the same lens, so the reverse relation
/// `u = u' + (y - c)/f` applies.
pub fn thin_lens_transfer(ray: Ray2D, center: f64, focal_length: f64) -> Ray2D {
    if !ray.alive {
        return ray;
    }
    let u = ray.slope();
    let h = ray.y - center;
    let u_out = if ray.forward() {
        u - h / focal_length
    } else {
        u + h / focal_length
    };
    Ray2D::with_slope(ray.z, ray.y, u_out, ray.forward())
}

/// Vector form of Snell's law. `normal` is any unit normal of the interface;
/// it is re-oriented against the incoming direction. Returns `None` on total
/// internal reflection.
pub fn snell(dir: (f64, f64), normal: (f64, f64), n1: f64, n2: f64) -> Option<(f64, f64)> {
    let (mut nz, mut ny) = normal;
    if nz * dir.0 + ny * dir.1 > 0.0 {
        nz = -nz;
        ny = -ny;
    }
    let eta = n1 / n2;
    let cos_i = -(nz * dir.0 + ny * dir.1);
    let k = 1.0 - eta * eta * (1.0 - cos_i * cos_i);
    if k < 0.0 {
        return None;
    }
    let c = eta * cos_i - k.sqrt();
    let tz = eta * dir.0 + c * nz;
    let ty = eta * dir.1 + c * ny;
    let norm = tz.hypot(ty);
    Some((tz / norm, ty / norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagation_keeps_unit_direction() {
        let r = Ray2D::new(0.0, 1.0, 3.0, 4.0);
        assert!((r.dz * r.dz + r.dy * r.dy - 1.0).abs() < 1e-12);
        let r2 = r.advance_to(3.0);
        assert!((r2.y - 5.0).abs() < 1e-12);
    }

    #[test]
    fn dead_rays_stay_dead() {
        let r = Ray2D::new(0.0, 1.0, 1.0, 0.0).killed();
        let r2 = r.advance_to(10.0);
        assert_eq!(r, r2);
        assert_eq!(thin_lens_transfer(r, 0.0, 1.0), r);
    }

    #[test]
    fn thin_transfer_matches_ray_transfer_matrix() {
        // [y', u'] = [[1, 0], [-1/f, 1]] [y, u]
        let (y, u, f) = (0.05, 0.1, 1.0);
        let out = thin_lens_transfer(Ray2D::with_slope(0.0, y, u, true), 0.0, f);
        let matrix_u = -y / f + u;
        assert!((out.slope() - matrix_u).abs() < 1e-12);
        assert!((out.slope() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn thin_transfer_is_reversible() {
        let fwd = thin_lens_transfer(Ray2D::with_slope(0.0, 0.3, -0.02, true), 0.1, 2.0);
        let back = thin_lens_transfer(Ray2D::with_slope(0.0, 0.3, fwd.slope(), false), 0.1, 2.0);
        assert!((back.slope() + 0.02).abs() < 1e-12);
    }

    #[test]
    fn snell_planar_textbook_case() {
        let theta = 30f64.to_radians();
        let (tz, ty) = snell((theta.cos(), theta.sin()), (-1.0, 0.0), 1.0, 1.5).unwrap();
        let refracted = ty.atan2(tz).to_degrees();
        assert!((refracted - 19.471_220_634_490_69).abs() < 1e-9);
    }

    #[test]
    fn snell_total_internal_reflection() {
        let theta = 60f64.to_radians();
        assert!(snell((theta.cos(), theta.sin()), (1.0, 0.0), 1.5, 1.0).is_none());
    }
}
