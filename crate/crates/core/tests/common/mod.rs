#![allow(dead_code)]

use plenoptiforge::lenses::builtin;
use plenoptiforge::optics::{CameraDesign, LensPrescription, SensorSpec};
use plenoptiforge::paraxial::{thick_lens_design, DesignConstraints};

pub const BUNDLED: [&str; 5] = ["double_gauss", "triplet", "biconvex", "achromat", "planoconvex"];

pub fn sensor() -> SensorSpec {
    SensorSpec::new(0.006, 4.0)
}

pub fn constraints(gamma: f64) -> DesignConstraints {
    DesignConstraints::new(2000.0, gamma, 2.0, 0.3, sensor())
}

pub fn lens(name: &str) -> LensPrescription {
    builtin(name).unwrap_or_else(|| panic!("builtin lens {name}"))
}

pub fn thick(name: &str, gamma: f64) -> CameraDesign {
    thick_lens_design(&constraints(gamma), &lens(name)).expect("thick design")
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
