//! Closed-form initial designs: thin-lens constraints and their thick-lens
//! correction with traced principal planes and aperture.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::DofInterval;
use crate::optics::{paraxial_heights, CameraDesign, LensPrescription, MlaSpec, Ray2D, SensorSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignConstraints {
    pub a_main: f64,
    pub gamma: f64,
    pub f_ml: f64,
    pub d_ml: f64,
    pub sensor: SensorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dof_target: Option<DofInterval>,
}

impl DesignConstraints {
    pub fn new(a_main: f64, gamma: f64, f_ml: f64, d_ml: f64, sensor: SensorSpec) -> Self {
        Self {
            a_main,
            gamma,
            f_ml,
            d_ml,
            sensor,
            dof_target: None,
        }
    }

    pub fn with_dof_target(mut self, target: DofInterval) -> Self {
        self.dof_target = Some(target);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::Validation(format!("gamma = {} must lie in (0, 1]", self.gamma)));
        }
        if !(self.a_main > 0.0) || !(self.f_ml > 0.0) || !(self.d_ml > 0.0) {
            return Err(Error::Validation("a_main, f_ml and d_ml must be positive".into()));
        }
        if let Some(t) = self.dof_target {
            if !(t.delta_min > 0.0 && t.delta_max > t.delta_min) {
                return Err(Error::Validation(format!(
                    "DoF target [{}, {}] is not a positive interval",
                    t.delta_min, t.delta_max
                )));
            }
        }
        self.sensor.validate()
    }
}

/// Principal plane offsets and focal distances of a prescription.
///
/// `p1` is measured from the first vertex towards the object, `p2` from the
/// last vertex towards the image, so a thin lens has both at zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalPlanes {
    pub p1: f64,
    pub p2: f64,
    /// Effective focal length.
    pub efl: f64,
    /// Back focal distance from the last vertex.
    pub bfd: f64,
    /// Front focal distance from the first vertex.
    pub ffd: f64,
}

fn richardson(h1: f64, v1: f64, h2: f64, v2: f64) -> f64 {
    (v1 * h2 * h2 - v2 * h1 * h1) / (h2 * h2 - h1 * h1)
}

/// Traces one collimated ray of height `h` from either side and returns
/// (focal point z, focal length) in that direction.
fn collimated_focus(lens: &LensPrescription, h: f64, forward: bool) -> Option<(f64, f64)> {
    let out = if forward {
        lens.trace_forward(Ray2D::new(-1.0, h, 1.0, 0.0), f64::INFINITY)
    } else {
        lens.trace_backward(Ray2D::new(lens.last_vertex_z() + 1.0, h, -1.0, 0.0), f64::INFINITY)
    };
    if !out.alive || out.dz.signum() != if forward { 1.0 } else { -1.0 } {
        return None;
    }
    let u = out.slope();
    if u == 0.0 {
        return None;
    }
    let zf = out.z - out.y / u;
    // focal length from the ray slope in the travel direction
    let f = if forward { -h / u } else { h / u };
    Some((zf, f))
}

pub fn principal_planes(lens: &LensPrescription) -> Result<PrincipalPlanes> {
    let (h1, h2) = paraxial_heights(lens);
    let afocal = || Error::NoFocus(format!("{} has no focal point", lens.name));
    let (zb1, fb1) = collimated_focus(lens, h1, true).ok_or_else(afocal)?;
    let (zb2, fb2) = collimated_focus(lens, h2, true).ok_or_else(afocal)?;
    let (zf1, ff1) = collimated_focus(lens, h1, false).ok_or_else(afocal)?;
    let (zf2, ff2) = collimated_focus(lens, h2, false).ok_or_else(afocal)?;
    let z_back = richardson(h1, zb1, h2, zb2);
    let efl = richardson(h1, fb1, h2, fb2);
    let z_front = richardson(h1, zf1, h2, zf2);
    let efl_front = richardson(h1, ff1, h2, ff2);
    if !(efl > 0.0) || !efl.is_finite() {
        return Err(Error::NoFocus(format!("{} has non-positive power (f = {efl})", lens.name)));
    }
    let z_last = lens.last_vertex_z();
    let bfd = z_back - z_last;
    let ffd = -z_front;
    Ok(PrincipalPlanes {
        p1: ffd - efl_front,
        p2: bfd - efl,
        efl,
        bfd,
        ffd,
    })
}

/// Disparity coefficient implied by the MLA distances for image distance `b_main`.
pub fn gamma_of(b_main: f64, a_ml: f64, b_ml: f64) -> f64 {
    // (a + b)(B + a) / (a (B + a + b)) - 1, simplified to avoid cancellation
    b_main * b_ml / (a_ml * (b_main + a_ml + b_ml))
}

/// Relative MLI pitch of the thin model.
pub fn thin_magnification(b_main: f64, a_ml: f64, b_ml: f64) -> f64 {
    (b_main + a_ml + b_ml) / (b_main + a_ml)
}

/// Lenslet object distance for disparity `gamma` (positive root).
pub fn mla_object_distance(b_main: f64, f_ml: f64, gamma: f64) -> f64 {
    -0.5 * b_main + (f_ml * b_main * (1.0 + gamma) / gamma + 0.25 * b_main * b_main).sqrt()
}

/// Lenslet-to-sensor distance realizing `gamma` with the lenslet at `a_ml`.
pub fn mla_image_distance(b_main: f64, a_ml: f64, gamma: f64) -> Result<f64> {
    let denom = (b_main + a_ml) - (1.0 + gamma) * a_ml;
    if !(denom > 0.0) {
        return Err(Error::Infeasible(format!(
            "no sensor distance for gamma = {gamma} with a_ml = {a_ml} behind b_main = {b_main}"
        )));
    }
    Ok(gamma * a_ml * (b_main + a_ml) / denom)
}

/// `(a_ml, b_ml)` satisfying the lenslet focus and disparity constraints.
pub fn mla_distances(b_main: f64, f_ml: f64, gamma: f64) -> Result<(f64, f64)> {
    if !(b_main > 0.0) {
        return Err(Error::Infeasible(format!("image distance {b_main} is not positive")));
    }
    let a_ml = mla_object_distance(b_main, f_ml, gamma);
    let b_ml = mla_image_distance(b_main, a_ml, gamma)?;
    if !(a_ml > f_ml) {
        return Err(Error::Infeasible(format!("a_ml = {a_ml} does not exceed f_ml = {f_ml}")));
    }
    Ok((a_ml, b_ml))
}

fn thin_image_distance(f: f64, a: f64) -> Result<f64> {
    if !(a > f) {
        return Err(Error::Infeasible(format!(
            "object distance {a} does not exceed the focal length {f}; only real intermediate images are supported"
        )));
    }
    Ok(1.0 / (1.0 / f - 1.0 / a))
}

fn thin_values(constraints: &DesignConstraints, f_main: f64) -> Result<(f64, f64, f64, f64)> {
    constraints.validate()?;
    let b_main = thin_image_distance(f_main, constraints.a_main)?;
    let (a_ml, b_ml) = mla_distances(b_main, constraints.f_ml, constraints.gamma)?;
    let d_main = constraints.d_ml * (b_main + a_ml) / b_ml;
    Ok((b_main, a_ml, b_ml, d_main))
}

fn assemble(lens: LensPrescription, c: &DesignConstraints, b_main: f64, a_ml: f64, b_ml: f64, d_main: f64) -> CameraDesign {
    CameraDesign {
        lens,
        mla: MlaSpec::new(c.f_ml, c.d_ml),
        sensor: c.sensor,
        a_main: c.a_main,
        b_main,
        a_ml,
        b_ml,
        d_main,
    }
}

/// Thin-model design around an ideal main lens of focal length `f_main`.
pub fn thin_lens_design(constraints: &DesignConstraints, f_main: f64) -> Result<CameraDesign> {
    let (b, a_ml, b_ml, d_main) = thin_values(constraints, f_main)?;
    let lens = LensPrescription::ideal_thin(f_main, d_main.max(1.0));
    Ok(assemble(lens, constraints, b, a_ml, b_ml, d_main))
}

/// Thin-model distances applied unchanged to a real prescription, with the
/// traced effective focal length standing in for the thin focal length.
pub fn thin_design_for_lens(constraints: &DesignConstraints, lens: &LensPrescription) -> Result<CameraDesign> {
    let pp = principal_planes(lens)?;
    let (b, a_ml, b_ml, d_main) = thin_values(constraints, pp.efl)?;
    Ok(assemble(lens.clone(), constraints, b, a_ml, b_ml, d_main))
}

/// Image distance from the last vertex by the thick-lens equation.
pub fn thick_image_distance(pp: &PrincipalPlanes, a_main: f64) -> Result<f64> {
    Ok(pp.p2 + thin_image_distance(pp.efl, a_main - pp.p1)?)
}

/// Aperture diameter from the lenslet-edge ray through the MLA center,
/// measured at the stop.
pub fn traced_aperture(
    lens: &LensPrescription,
    b_main: f64,
    a_ml: f64,
    b_ml: f64,
    d_ml: f64,
) -> Result<f64> {
    let mla_z = lens.last_vertex_z() + b_main + a_ml;
    let ray = Ray2D::through((mla_z + b_ml, 0.5 * d_ml), (mla_z, 0.0));
    let h = lens
        .backward_height_at_stop(ray)
        .ok_or_else(|| Error::RayBlocked("aperture probe leaves the main lens".into()))?;
    Ok(2.0 * h.abs())
}

pub fn thick_lens_design(constraints: &DesignConstraints, lens: &LensPrescription) -> Result<CameraDesign> {
    constraints.validate()?;
    let pp = principal_planes(lens)?;
    let b_main = thick_image_distance(&pp, constraints.a_main)?;
    let (a_ml, b_ml) = mla_distances(b_main, constraints.f_ml, constraints.gamma)?;
    let d_main = traced_aperture(lens, b_main, a_ml, b_ml, constraints.d_ml)?;
    Ok(assemble(lens.clone(), constraints, b_main, a_ml, b_ml, d_main))
}
