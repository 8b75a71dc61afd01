//! Refinement loop invariants on traced designs.

mod common;

use plenoptiforge::measure::{measure_magnification, mli_overlap_pixels, visible_mli_size, MeasureConfig};
use plenoptiforge::refine::{gamma_partials, refined_design, RefineAction, RefineSettings, RefineTrace};
use plenoptiforge::optics::CameraDesign;
use plenoptiforge::paraxial::gamma_of;
use proptest::prelude::*;

use common::{constraints, lens, BUNDLED};

fn settings(gamma: f64) -> RefineSettings {
    let mut s = RefineSettings::for_constraints(&constraints(gamma));
    s.measure = MeasureConfig::default();
    s
}

fn cases() -> Vec<(&'static str, f64, CameraDesign, RefineTrace)> {
    let mut out = Vec::new();
    for (name, gamma) in BUNDLED.iter().map(|n| (*n, 0.4)).chain([("double_gauss", 0.2), ("triplet", 0.6)]) {
        let (d, t) = refined_design(&constraints(gamma), &lens(name), &settings(gamma)).unwrap();
        out.push((name, gamma, d, t));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn partial_signs_hold(b in 1e-3f64..1e4, a in 1e-3f64..1e3, bml in 1e-3f64..1e3) {
        let (da, db) = gamma_partials(b, a, bml);
        prop_assert!(da < 0.0, "d/da = {}", da);
        prop_assert!(db > 0.0, "d/db = {}", db);
    }

    #[test]
    fn partials_match_central_differences(b in 1.0f64..1000.0, a in 0.5f64..50.0, bml in 0.5f64..50.0) {
        let (da, db) = gamma_partials(b, a, bml);
        let (ha, hb) = (1e-5 * a, 1e-5 * bml);
        let fa = (gamma_of(b, a + ha, bml) - gamma_of(b, a - ha, bml)) / (2.0 * ha);
        let fb = (gamma_of(b, a, bml + hb) - gamma_of(b, a, bml - hb)) / (2.0 * hb);
        prop_assert!((da - fa).abs() <= 1e-5 * da.abs(), "{} vs {}", da, fa);
        prop_assert!((db - fb).abs() <= 1e-5 * db.abs(), "{} vs {}", db, fb);
    }
}

#[test]
fn refine_trace_invariants() {
    for (name, gamma, d, trace) in cases() {
        let s = settings(gamma);
        assert!(trace.converged, "{name}");
        let its = &trace.iterations;
        for w in its.windows(2) {
            let (prev, next) = (&w[0], &w[1]);
            let a_moved = prev.a_ml != next.a_ml;
            let b_moved = prev.b_ml != next.b_ml;
            assert!(a_moved ^ b_moved, "{name}: one parameter per iteration");
            let expected = match prev.action {
                RefineAction::IncreaseAml => (next.a_ml > prev.a_ml) && a_moved,
                RefineAction::DecreaseAml => (next.a_ml < prev.a_ml) && a_moved,
                RefineAction::IncreaseBml => (next.b_ml > prev.b_ml) && b_moved,
                RefineAction::DecreaseBml => (next.b_ml < prev.b_ml) && b_moved,
                RefineAction::None => false,
            };
            assert!(expected, "{name}: action {:?} not applied", prev.action);
            assert!(next.step <= prev.step, "{name}: step grew");
        }
        let last = its.last().unwrap();
        assert_eq!(last.action, RefineAction::None);
        let r = ((last.gamma_tilde - gamma).abs() / s.eps_gamma).max((last.b_ml_tilde - last.b_ml).abs() / s.eps_focus);
        assert!(r <= 1.0, "{name}: normalized residual {r}");
        assert_eq!((d.a_ml, d.b_ml), (last.a_ml, last.b_ml));

        let cfg = &s.measure;
        let m = measure_magnification(&d).unwrap();
        let d_vis = visible_mli_size(&d, 0, cfg.alpha, cfg).unwrap();
        let pitch = m * d.mla.d_ml;
        assert!(d_vis <= pitch + s.eps_mli && d_vis >= pitch - s.eps_mli, "{name}: {d_vis} vs {pitch}");
        assert_eq!(mli_overlap_pixels(&d, cfg.alpha, cfg).unwrap(), 0, "{name}");
    }
}

#[test]
fn dof_match_lands_inside_target() {
    use plenoptiforge::measure::DofInterval;
    use plenoptiforge::refine::dof_match;
    let target = DofInterval::new(1200.0, 2000.0);
    let c = constraints(0.3).with_dof_target(target);
    let (d, trace) = dof_match(&c, &lens("triplet"), &settings(0.3)).unwrap();
    assert!(trace.converged);
    assert!(target.contains(d.a_main), "a_main {}", d.a_main);
    let dof = trace.history.last().unwrap().dof;
    assert!((dof.delta_min - target.delta_min).abs() <= target.delta_min / 1000.0, "{dof:?}");
    assert!((dof.delta_max - target.delta_max).abs() <= target.delta_max / 1000.0, "{dof:?}");
}
