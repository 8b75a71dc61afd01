//! Rendering, normalization, contrast and sweep behavior.

mod common;

use std::sync::OnceLock;

use plenoptiforge::eval::{
    center_mli_contrast, contrast, contrast_sweep, edge_gamma, measured_gamma, normalize_white, render_pattern,
    render_with_white, scene_field, Pattern1D, PatternKind, RenderSettings, SensorImage1D,
};
use plenoptiforge::measure::{camera_dof, measure_magnification, visible_mli, MeasureConfig};
use plenoptiforge::optics::CameraDesign;
use plenoptiforge::refine::{refined_design, RefineSettings};
use plenoptiforge::Error;
use proptest::prelude::*;

use common::{constraints, lens};

fn refined(name: &str) -> CameraDesign {
    let c = constraints(0.4);
    let mut s = RefineSettings::for_constraints(&c);
    s.measure = MeasureConfig::default();
    refined_design(&c, &lens(name), &s).unwrap().0
}

fn refined_dg() -> &'static CameraDesign {
    static D: OnceLock<CameraDesign> = OnceLock::new();
    D.get_or_init(|| refined("double_gauss"))
}

fn argmax(sweep: &[(f64, f64)]) -> f64 {
    sweep.iter().fold((f64::NAN, f64::NEG_INFINITY), |acc, &x| if x.1 > acc.1 { x } else { acc }).0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn contrast_in_unit_interval(values in prop::collection::vec(0.0f64..=1.0, 2..64)) {
        match contrast(&values) {
            Ok(c) => prop_assert!(c > 0.0 && c <= 1.0, "c = {}", c),
            Err(Error::DegenerateRegion) => {
                let mu = values.iter().sum::<f64>() / values.len() as f64;
                prop_assert!(values.iter().all(|v| *v <= mu) || values.iter().all(|v| *v > mu));
            }
            Err(e) => prop_assert!(false, "unexpected {}", e),
        }
    }

    #[test]
    fn contrast_is_shift_invariant_and_scales(
        values in prop::collection::vec(0.0f64..=1.0, 2..64),
        shift in -5.0f64..5.0,
        k in 0.01f64..100.0,
    ) {
        // Dyadic shifts and power-of-two scales keep the mean split exact.
        let shift = (shift * 8.0).round() / 8.0;
        let k = 2f64.powi(k.log2().round() as i32);
        if let Ok(c) = contrast(&values) {
            let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
            let scaled: Vec<f64> = values.iter().map(|v| v * k).collect();
            prop_assert!((contrast(&shifted).unwrap() - c).abs() <= 1e-12 * (1.0 + shift.abs()));
            prop_assert!((contrast(&scaled).unwrap() - k * c).abs() <= 1e-12 * k);
        }
    }

    #[test]
    fn contrast_affine_with_arbitrary_factors(
        n in 4usize..40,
        lo in 0.0f64..0.4,
        hi in 0.6f64..1.0,
        shift in -5.0f64..5.0,
        k in 0.01f64..100.0,
    ) {
        // Two-level regions have a split that no rounding can move.
        let values: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { hi } else { lo }).collect();
        let c = contrast(&values).unwrap();
        prop_assert!((c - (hi - lo)).abs() < 1e-12);
        let t: Vec<f64> = values.iter().map(|v| k * v + shift).collect();
        prop_assert!((contrast(&t).unwrap() - k * c).abs() <= 1e-9 * k);
    }
}

#[test]
fn contrast_examples() {
    assert_eq!(contrast(&[0.0, 1.0, 1.0, 0.0]).unwrap(), 1.0);
    assert_eq!(contrast(&[0.0, 0.0, 0.5, 1.0]).unwrap(), 0.75);
    assert!(matches!(contrast(&[0.4; 7]), Err(Error::DegenerateRegion)));
}

#[test]
fn seeded_rendering_is_reproducible() {
    let d = refined_dg();
    let extent = scene_field(d, d.a_main).unwrap();
    let pattern = Pattern1D::stripes(0.4, d.a_main, extent);
    for seed in [None, Some(7), Some(8)] {
        let s = RenderSettings {
            jitter_seed: seed,
            ..RenderSettings::default()
        };
        let a = render_pattern(d, &pattern, &s).unwrap();
        let b = render_pattern(d, &pattern, &s).unwrap();
        assert_eq!(a, b, "seed {seed:?}");
        assert_eq!(a.len(), d.sensor.pixel_count());
        assert!(a.intensities.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
    let with = |seed| RenderSettings {
        jitter_seed: Some(seed),
        ..RenderSettings::default()
    };
    assert_ne!(render_pattern(d, &pattern, &with(7)).unwrap(), render_pattern(d, &pattern, &with(8)).unwrap());
    assert!(render_pattern(d, &pattern, &RenderSettings::default().with_rays(16)).is_err());
}

#[test]
fn white_lights_every_visible_mli_and_dark_lights_nothing() {
    let d = refined_dg();
    let cfg = MeasureConfig::default();
    let s = RenderSettings::default();
    let extent = scene_field(d, d.a_main).unwrap();
    let white = render_pattern(d, &Pattern1D::white(d.a_main, extent), &s).unwrap();
    for k in -2..=2 {
        let vis = visible_mli(d, k, cfg.alpha, &cfg).unwrap();
        assert!(!vis.pixels.is_empty());
        for &i in &vis.pixels {
            assert!(white.intensities[i] > 0.0, "MLI {k} pixel {i}");
        }
    }
    // An edge at the field boundary leaves the whole field dark.
    let dark = render_pattern(d, &Pattern1D::edge(extent, d.a_main, extent), &s).unwrap();
    assert!(dark.intensities.iter().all(|v| *v == 0.0));
}

#[test]
fn normalization_examples() {
    let d = refined_dg();
    let extent = scene_field(d, d.a_main).unwrap();
    let s = RenderSettings::default();
    let (_, white) = render_with_white(d, &Pattern1D::white(d.a_main, extent), &s).unwrap();
    let floor = s.white_floor * white.max();
    let same = normalize_white(&white, &white, s.white_floor).unwrap();
    let half = SensorImage1D {
        intensities: white.intensities.iter().map(|v| 0.5 * v).collect(),
        exposure_rays: white.exposure_rays,
    };
    let halved = normalize_white(&half, &white, s.white_floor).unwrap();
    for (i, &w) in white.intensities.iter().enumerate() {
        if w > floor {
            assert!((same.intensities[i] - 1.0).abs() < 1e-12);
            assert!((halved.intensities[i] - 0.5).abs() < 1e-12);
        } else {
            assert_eq!(same.intensities[i], 0.0);
        }
    }
    let short = SensorImage1D::zeros(3);
    assert!(matches!(normalize_white(&short, &white, 0.01), Err(Error::ShapeMismatch { .. })));
}

#[test]
fn wide_stripe_gives_a_sharp_edge_in_the_center_mli() {
    let d = refined_dg();
    let extent = scene_field(d, d.a_main).unwrap();
    let s = RenderSettings::default();
    let (img, white) = render_with_white(d, &Pattern1D::edge(0.0, d.a_main, extent), &s).unwrap();
    let norm = normalize_white(&img, &white, s.white_floor).unwrap();
    let c = center_mli_contrast(d, &norm).unwrap();
    assert!(c > 0.8, "edge contrast {c}");
}

/// Image with 0-to-1 crossings at sub-pixel positions `p0 < p1`.
fn two_edges(n: usize, p0: f64, p1: f64) -> SensorImage1D {
    let mut v = vec![0.0; n];
    let mut set = |p: f64| {
        let i = p.floor() as usize;
        let f = p - i as f64;
        // crossing at i + (0.5 - a) / (b - a)
        let (a, b) = if f >= 0.5 { (0.0, 0.5 / f) } else { ((0.5 - f) / (1.0 - f), 1.0) };
        v[i] = a;
        v[i + 1] = b;
        for x in v.iter_mut().skip(i + 2).take(3) {
            *x = 1.0;
        }
    };
    set(p0);
    set(p1);
    SensorImage1D {
        intensities: v,
        exposure_rays: 1,
    }
}

#[test]
fn measured_gamma_examples() {
    let d = refined_dg();
    let pitch_px = measure_magnification(d).unwrap() * d.mla.d_ml / d.sensor.pixel_size;
    for (factor, expected) in [(1.0, 0.0), (1.5, 0.5)] {
        let p0 = 100.3;
        let p1 = p0 + factor * pitch_px;
        let img = two_edges(d.sensor.pixel_count(), p0, p1);
        let g = measured_gamma(&img, d, (p0.floor() as usize, p1.floor() as usize)).unwrap();
        assert!((g - expected).abs() < 1e-9, "factor {factor}: {g}");
    }
    let flat = SensorImage1D::zeros(d.sensor.pixel_count());
    assert!(matches!(measured_gamma(&flat, d, (10, 60)), Err(Error::EdgeNotFound(10))));
}

#[test]
fn rendered_edge_disparity_matches_target() {
    let g = edge_gamma(refined_dg(), &RenderSettings::default()).unwrap();
    assert!((g - 0.4).abs() <= 0.03, "gamma {g}");
}

#[test]
fn sweep_peaks_inside_measured_dof() {
    let d = refined_dg();
    let cfg = MeasureConfig::default();
    let dof = camera_dof(d, 0, cfg.alpha, &cfg).unwrap();
    let distances: Vec<f64> = (0..=10).map(|i| 1500.0 + 100.0 * i as f64).collect();
    assert!(distances.contains(&d.a_main));
    let sweep = contrast_sweep(d, &distances, PatternKind::StarRadialProfile, &RenderSettings::default()).unwrap();
    assert!(dof.contains(argmax(&sweep)), "peak {} outside {dof:?}", argmax(&sweep));

    let same = contrast_sweep(d, &[1800.0; 3], PatternKind::Stripes, &RenderSettings::default()).unwrap();
    assert!(same.iter().all(|s| s.1 == same[0].1));
    assert!(contrast_sweep(d, &[2000.0, 1500.0], PatternKind::Stripes, &RenderSettings::default()).is_err());
}

#[test]
fn star_and_stripe_peaks_agree() {
    let step = 100.0;
    let distances: Vec<f64> = (0..=10).map(|i| 1500.0 + step * i as f64).collect();
    let s = RenderSettings::default();
    for name in ["double_gauss", "triplet", "biconvex"] {
        let d = refined(name);
        let stripes = contrast_sweep(&d, &distances, PatternKind::Stripes, &s).unwrap();
        let star = contrast_sweep(&d, &distances, PatternKind::StarRadialProfile, &s).unwrap();
        let (a, b) = (argmax(&stripes), argmax(&star));
        assert!((a - b).abs() <= step, "{name}: stripes {a}, star {b}");
    }
}
