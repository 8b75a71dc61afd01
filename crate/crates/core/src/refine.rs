//! Ray-traced refinement of the MLA distances and main-lens aperture, and
//! the outer loop matching a requested depth of field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{
    best_visual_focus, camera_dof, measure_disparity, measure_magnification, mla_focus, mli_overlap_pixels,
    visible_mli_size, DofInterval, MeasureConfig,
};
use crate::optics::{CameraDesign, LensPrescription};
use crate::paraxial::{gamma_of, mla_distances, thick_lens_design, DesignConstraints};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineSettings {
    pub eps_gamma: f64,
    pub eps_focus: f64,
    pub eps_mli: f64,
    pub max_iters: usize,
    pub step_init: f64,
    pub damping: f64,
    /// Outer iterations of DoF matching.
    pub max_outer: usize,
    pub measure: MeasureConfig,
}

impl RefineSettings {
    /// Defaults scaled to the sensor pixel and microlens focal length.
    pub fn for_constraints(c: &DesignConstraints) -> Self {
        Self {
            eps_gamma: 0.005,
            eps_focus: 0.1 * c.sensor.pixel_size,
            eps_mli: c.sensor.pixel_size,
            max_iters: 200,
            step_init: 0.05 * c.f_ml,
            damping: 0.5,
            max_outer: 25,
            measure: MeasureConfig::from_env(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.eps_gamma, self.eps_focus, self.eps_mli, self.step_init];
        if positive.iter().any(|v| !(*v > 0.0)) || self.max_iters == 0 {
            return Err(Error::Validation("refine tolerances and step must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::Validation(format!("damping {} must lie in (0, 1)", self.damping)));
        }
        Ok(())
    }
}

/// Which parameter a refinement iteration moved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineAction {
    IncreaseAml,
    DecreaseAml,
    IncreaseBml,
    DecreaseBml,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineIteration {
    pub a_ml: f64,
    pub b_ml: f64,
    pub d_main: f64,
    pub gamma_tilde: f64,
    pub b_ml_tilde: f64,
    pub d_vis: f64,
    pub step: f64,
    pub action: RefineAction,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RefineTrace {
    pub iterations: Vec<RefineIteration>,
    pub converged: bool,
    /// Aperture after the final overlap search.
    pub d_main_final: f64,
    pub d_vis_final: f64,
    pub m_final: f64,
}

impl RefineTrace {
    /// Number of iterations that moved a parameter.
    pub fn moves(&self) -> usize {
        self.iterations.iter().filter(|i| i.action != RefineAction::None).count()
    }
}

/// Closed-form partial derivatives of the disparity coefficient with respect
/// to `a_ml` and `b_ml`.
pub fn gamma_partials(b_main: f64, a_ml: f64, b_ml: f64) -> (f64, f64) {
    let (bm, a, b) = (b_main, a_ml, b_ml);
    let s = bm + a + b;
    let da = -b * bm * (bm + 2.0 * a + b) / (a * a * s * s);
    let db = bm * (bm + a) / (a * s * s);
    (da, db)
}

fn choose_action(r_gamma: f64, r_focus: f64, gamma_ok: bool, focus_ok: bool) -> RefineAction {
    use RefineAction::*;
    match (gamma_ok, focus_ok) {
        (true, true) => None,
        // focus only: move the sensor towards the lenslet image
        (true, false) => {
            if r_focus > 0.0 {
                IncreaseBml
            } else {
                DecreaseBml
            }
        }
        // disparity only: slide along the focus curve
        (false, true) => {
            if r_gamma > 0.0 {
                IncreaseAml
            } else {
                DecreaseAml
            }
        }
        (false, false) => match (r_gamma > 0.0, r_focus > 0.0) {
            (true, true) => IncreaseAml,
            (true, false) => DecreaseBml,
            (false, true) => IncreaseBml,
            (false, false) => DecreaseAml,
        },
    }
}

/// Largest aperture below `hi` for which the microlens images neither
/// overlap nor exceed their pitch.
fn polish_aperture(design: &mut CameraDesign, settings: &RefineSettings) -> Result<(f64, f64)> {
    let cfg = &settings.measure;
    let check = |d: &CameraDesign| -> Result<(bool, f64, f64)> {
        let m = measure_magnification(d)?;
        let d_vis = visible_mli_size(d, 0, cfg.alpha, cfg)?;
        let ok = d_vis <= m * d.mla.d_ml + settings.eps_mli && mli_overlap_pixels(d, cfg.alpha, cfg)? == 0;
        Ok((ok, d_vis, m))
    };
    let hi = design.max_d_main();
    let mut probe = design.clone();
    probe.d_main = hi;
    let top = check(&probe)?;
    if top.0 {
        design.d_main = hi;
        return Ok((top.1, top.2));
    }
    let (mut good, mut bad) = (1e-3 * hi, hi);
    probe.d_main = good;
    let mut best = check(&probe)?;
    if !best.0 {
        return Err(Error::Infeasible("microlens images overlap at any aperture".into()));
    }
    while bad - good > 1e-4 * good {
        probe.d_main = 0.5 * (good + bad);
        let r = check(&probe)?;
        if r.0 {
            good = probe.d_main;
            best = r;
        } else {
            bad = probe.d_main;
        }
    }
    design.d_main = good;
    Ok((best.1, best.2))
}

/// Refines a thick-lens design against traced disparity and lenslet focus.
pub fn refine(
    design: &CameraDesign,
    constraints: &DesignConstraints,
    settings: &RefineSettings,
) -> Result<(CameraDesign, RefineTrace)> {
    settings.validate()?;
    let cfg = &settings.measure;
    let mut d = design.clone();
    let focus = best_visual_focus(&d.lens, d.a_main, d.d_main, cfg)?;
    d.b_main = focus.b_bv;
    let (a_ml, b_ml) = mla_distances(d.b_main, constraints.f_ml, constraints.gamma)?;
    d.a_ml = a_ml;
    d.b_ml = b_ml;
    d.validate()?;

    let mut trace = RefineTrace::default();
    let mut step = settings.step_init;
    let mut prev: Option<(bool, bool)> = None;
    for _ in 0..settings.max_iters {
        let gamma_tilde = measure_disparity(&d, d.a_main, cfg)?;
        let b_tilde = mla_focus(&d, d.a_main, cfg)?;
        let d_vis = visible_mli_size(&d, 0, cfg.alpha, cfg)?;
        let r_gamma = gamma_tilde - constraints.gamma;
        let r_focus = b_tilde - d.b_ml;
        let gamma_ok = r_gamma.abs() <= settings.eps_gamma;
        let focus_ok = r_focus.abs() <= settings.eps_focus;
        let signs = (r_gamma > 0.0, r_focus > 0.0);
        if let Some(p) = prev {
            if p != signs {
                step *= 0.5;
            }
        }
        prev = Some(signs);
        let action = choose_action(r_gamma, r_focus, gamma_ok, focus_ok);
        trace.iterations.push(RefineIteration {
            a_ml: d.a_ml,
            b_ml: d.b_ml,
            d_main: d.d_main,
            gamma_tilde,
            b_ml_tilde: b_tilde,
            d_vis,
            step,
            action,
        });
        match action {
            RefineAction::None => {
                trace.converged = true;
                break;
            }
            RefineAction::IncreaseAml => d.a_ml += step,
            RefineAction::DecreaseAml => d.a_ml -= step,
            RefineAction::IncreaseBml => d.b_ml += step,
            RefineAction::DecreaseBml => d.b_ml -= step,
        }
        if d.validate().is_err() {
            return Err(Error::Infeasible(format!(
                "refinement left the feasible region (a_ml = {}, b_ml = {})",
                d.a_ml, d.b_ml
            )));
        }
    }
    if !trace.converged {
        return Err(Error::NoConvergence { trace: Box::new(trace) });
    }
    let (d_vis, m) = polish_aperture(&mut d, settings)?;
    trace.d_main_final = d.d_main;
    trace.d_vis_final = d_vis;
    trace.m_final = m;
    Ok((d, trace))
}

/// Thick-lens seed followed by refinement.
pub fn refined_design(
    constraints: &DesignConstraints,
    lens: &LensPrescription,
    settings: &RefineSettings,
) -> Result<(CameraDesign, RefineTrace)> {
    let seed = thick_lens_design(constraints, lens)?;
    refine(&seed, constraints, settings)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DofMatchIteration {
    pub a_main: f64,
    pub d_ml: f64,
    pub dof: DofInterval,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DofMatchTrace {
    /// State after the initial design, then after each outer iteration.
    pub history: Vec<DofMatchIteration>,
    pub outer_iterations: usize,
    pub converged: bool,
}

fn dof_errors(dof: &DofInterval, target: &DofInterval) -> bool {
    (dof.delta_min - target.delta_min).abs() <= target.delta_min / 1000.0
        && (dof.delta_max - target.delta_max).abs() <= target.delta_max / 1000.0
}

/// Adjusts `d_ml` and `a_main` until the camera DoF matches the target.
///
/// The microlens pitch is updated multiplicatively from the DoF width ratio,
/// the object distance additively from the center offset; each update
/// re-runs the complete design and measurement.
pub fn dof_match(
    constraints: &DesignConstraints,
    lens: &LensPrescription,
    settings: &RefineSettings,
) -> Result<(CameraDesign, DofMatchTrace)> {
    let target = constraints
        .dof_target
        .ok_or_else(|| Error::Validation("DoF matching needs a target interval".into()))?;
    constraints.validate()?;
    let cfg = &settings.measure;
    let run = |c: &DesignConstraints| -> Result<(CameraDesign, DofInterval)> {
        let (d, _) = refined_design(c, lens, settings)?;
        let dof = camera_dof(&d, 0, cfg.alpha, cfg)?;
        Ok((d, dof))
    };
    let mut c = *constraints;
    c.a_main = target.center();
    let (mut design, mut dof) = run(&c)?;
    let mut trace = DofMatchTrace::default();
    trace.history.push(DofMatchIteration {
        a_main: c.a_main,
        d_ml: c.d_ml,
        dof,
    });
    let mut slope = 1.0;
    let width = |d: &DofInterval| if d.delta_max.is_finite() { d.width() } else { 4.0 * target.width() };
    while !dof_errors(&dof, &target) {
        if trace.outer_iterations >= settings.max_outer {
            return Err(Error::DofNoConvergence { trace: Box::new(trace) });
        }
        trace.outer_iterations += 1;

        let ratio = (width(&dof) / target.width()).clamp(0.25, 4.0);
        let old = (c.d_ml, width(&dof));
        c.d_ml *= ratio.powf(settings.damping / slope);
        dof = run(&c)?.1;
        let dln_d = (c.d_ml / old.0).ln();
        let dln_w = (width(&dof) / old.1).ln();
        if dln_d.abs() > 1e-9 && dln_w.is_finite() {
            slope = (-dln_w / dln_d).clamp(0.25, 4.0);
        }

        c.a_main += settings.damping * (target.center() - dof.center());
        (design, dof) = run(&c)?;
        trace.history.push(DofMatchIteration {
            a_main: c.a_main,
            d_ml: c.d_ml,
            dof,
        });
    }
    trace.converged = true;
    Ok((design, trace))
}

/// Disparity coefficient of the thin model for a design's distances.
pub fn model_gamma(design: &CameraDesign) -> f64 {
    gamma_of(design.b_main, design.a_ml, design.b_ml)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partials_match_finite_differences_at_example() {
        let (b, a, bl) = (100.0, 2.915, 1.522);
        let (da, db) = gamma_partials(b, a, bl);
        let h = 1e-6;
        let fa = (gamma_of(b, a + h, bl) - gamma_of(b, a - h, bl)) / (2.0 * h);
        let fb = (gamma_of(b, a, bl + h) - gamma_of(b, a, bl - h)) / (2.0 * h);
        assert!(((da - fa) / fa).abs() < 1e-6, "{da} {fa}");
        assert!(((db - fb) / fb).abs() < 1e-6, "{db} {fb}");
        assert!(da < 0.0 && db > 0.0);
    }

    #[test]
    fn partials_scale_inversely() {
        let (da, db) = gamma_partials(100.0, 3.0, 1.5);
        let (ka, kb) = gamma_partials(300.0, 9.0, 4.5);
        assert!((ka * 3.0 - da).abs() < 1e-12 && (kb * 3.0 - db).abs() < 1e-12);
    }

    #[test]
    fn case_table() {
        use RefineAction::*;
        assert_eq!(choose_action(0.1, 0.1, false, false), IncreaseAml);
        assert_eq!(choose_action(0.1, -0.1, false, false), DecreaseBml);
        assert_eq!(choose_action(-0.1, 0.1, false, false), IncreaseBml);
        assert_eq!(choose_action(-0.1, -0.1, false, false), DecreaseAml);
        assert_eq!(choose_action(0.0, 0.0, true, true), None);
        assert_eq!(choose_action(0.001, 0.1, true, false), IncreaseBml);
        assert_eq!(choose_action(-0.1, 0.0001, false, true), DecreaseAml);
    }
}
