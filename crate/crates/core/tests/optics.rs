//! Tracer invariants on full camera designs.

mod common;

use plenoptiforge::optics::{entrance_fan, CameraDesign, trace_through_camera, LensPrescription, Ray2D, Source, Surface};
use plenoptiforge::paraxial::principal_planes;
use proptest::prelude::*;

use common::{lens, rel, thick, BUNDLED};

/// Fan from the point `(-a, y0)` overfilling the design's stop by 30%, so
/// both passing and blocked rays are present.
fn fan(d: &CameraDesign, a: f64, t: f64, n: usize) -> Vec<Ray2D> {
    entrance_fan(&d.lens, Source::Point { z: -a, y: field_height(d, a, t) }, 1.3 * d.stop_radius(), n)
}

/// Object height imaged about `t * 1.5` mm off axis, inside the 4 mm sensor.
fn field_height(d: &CameraDesign, a: f64, t: f64) -> f64 {
    let efl = principal_planes(&d.lens).unwrap().efl;
    t * 1.5 * a / efl
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identical_inputs_give_identical_reports(idx in 0usize..5, a in 500.0f64..5000.0, t in -1.0f64..1.0) {
        let d = thick(BUNDLED[idx], 0.4);
        let rays = fan(&d, a, t, 101);
        prop_assert_eq!(trace_through_camera(&rays, &d).unwrap(), trace_through_camera(&rays, &d).unwrap());
    }

    #[test]
    fn mirrored_fan_gives_mirrored_hits(idx in 0usize..5, a in 500.0f64..5000.0, t in -1.0f64..1.0) {
        let d = thick(BUNDLED[idx], 0.4);
        let rays = fan(&d, a, t, 101);
        let mirrored: Vec<Ray2D> = rays.iter().map(|r| r.mirrored()).collect();
        let r1 = trace_through_camera(&rays, &d).unwrap();
        let r2 = trace_through_camera(&mirrored, &d).unwrap();
        prop_assert!(!r1.sensor_hits.is_empty());
        prop_assert_eq!(r1.blocked_count, r2.blocked_count);
        prop_assert_eq!(r1.sensor_hits.len(), r2.sensor_hits.len());
        for (h1, h2) in r1.sensor_hits.iter().zip(&r2.sensor_hits) {
            prop_assert_eq!(h1.source_ray_index, h2.source_ray_index);
            prop_assert!((h1.y + h2.y).abs() <= 1e-12 * (1.0 + h1.y.abs()));
            prop_assert!((h1.incident_angle + h2.incident_angle).abs() <= 1e-12);
            prop_assert_eq!(h1.lenslet, -h2.lenslet);
        }
    }

    #[test]
    fn shrinking_the_aperture_never_adds_hits(
        idx in 0usize..5,
        a in 500.0f64..5000.0,
        t in -1.0f64..1.0,
        f1 in 0.05f64..1.0,
        f2 in 0.05f64..1.0,
    ) {
        let mut d = thick(BUNDLED[idx], 0.4);
        let rays = entrance_fan(&d.lens, Source::Point { z: -a, y: field_height(&d, a, t) }, d.max_d_main(), 201);
        let (small, large) = (f1.min(f2), f1.max(f2));
        d.d_main = large * d.max_d_main();
        let wide = trace_through_camera(&rays, &d).unwrap();
        d.d_main = small * d.max_d_main();
        let narrow = trace_through_camera(&rays, &d).unwrap();
        prop_assert!(!wide.sensor_hits.is_empty());
        prop_assert!(narrow.sensor_hits.len() <= wide.sensor_hits.len());
        // Surviving rays under the small stop are a subset of the wide ones.
        let wide_ids: Vec<usize> = wide.sensor_hits.iter().map(|h| h.source_ray_index).collect();
        prop_assert!(narrow.sensor_hits.iter().all(|h| wide_ids.contains(&h.source_ray_index)));
    }

    #[test]
    fn every_ray_is_counted_once(idx in 0usize..5, a in 100.0f64..5000.0, t in -3.0f64..3.0, dead in 0usize..20) {
        let d = thick(BUNDLED[idx], 0.4);
        let mut rays = fan(&d, a, t, 60);
        for r in rays.iter_mut().take(dead) {
            *r = r.killed();
        }
        let report = trace_through_camera(&rays, &d).unwrap();
        prop_assert_eq!(report.blocked_count + report.sensor_hits.len(), rays.len());
        prop_assert!(report.sensor_hits.iter().all(|h| h.source_ray_index >= dead));
    }
}

/// Traced paraxial focus of a collimated beam behind a singlet.
fn traced_back_focus(lens: &LensPrescription) -> f64 {
    let sa = lens.surfaces()[0].semi_aperture;
    let rays: Vec<Ray2D> = [1e-3, 2e-3]
        .iter()
        .map(|&h| lens.trace_forward(Ray2D::with_slope(-1.0, h * sa, 0.0, true), 10.0 * sa))
        .collect();
    let z = |r: &Ray2D| r.z - r.y / r.slope();
    // Spherical aberration grows with h^2; extrapolate the crossing to h = 0.
    let (z1, z2) = (z(&rays[0]), z(&rays[1]));
    (4.0 * z1 - z2) / 3.0 - lens.last_vertex_z()
}

#[test]
fn thin_singlet_focus_obeys_lensmaker() {
    for &(r1, r2, n) in &[(100.0, -100.0, 1.5), (60.0, -240.0, 1.7), (-300.0, -80.0, 1.6)] {
        let t = 1e-4;
        let lens = LensPrescription::new(
            "thin",
            None,
            vec![Surface::spherical(r1, t, n, 5.0), Surface::spherical(r2, 0.0, 1.0, 5.0)],
        )
        .unwrap();
        let f: f64 = 1.0 / ((n - 1.0) * (1.0 / r1 - 1.0 / r2));
        if f <= 0.0 {
            continue;
        }
        assert!(rel(traced_back_focus(&lens), f) < 5e-3, "R1 {r1} R2 {r2} n {n}");
    }
}

#[test]
fn bundled_lenses_focus_infinity() {
    for name in BUNDLED {
        let l = lens(name);
        let fan = entrance_fan(&l, Source::on_axis(f64::INFINITY), l.stop_surface().semi_aperture, 33);
        assert_eq!(fan.len(), 33, "{name}");
        let out: Vec<Ray2D> = fan.iter().map(|r| l.trace_forward(*r, l.stop_surface().semi_aperture)).collect();
        assert!(out.iter().all(|r| r.alive && r.dz > 0.0), "{name}");
        let f = traced_back_focus(&l);
        assert!(f > 0.0 && f.is_finite(), "{name}: back focus {f}");
    }
}
