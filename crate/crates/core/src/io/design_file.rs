//! TOML design files.
//!
//! All lengths are millimeters (recorded once as `units = "mm"`). Floats are
//! written with 12 significant digits, so a parsed file re-serializes to the
//! same bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::DofInterval;
use crate::optics::CameraDesign;
use crate::paraxial::DesignConstraints;

pub const SCHEMA_VERSION: &str = "plenoptiforge-design/1";

const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignMethod {
    Thin,
    Thick,
    Refined,
    DofMatched,
}

impl DesignMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DesignMethod::Thin => "thin",
            DesignMethod::Thick => "thick",
            DesignMethod::Refined => "refined",
            DesignMethod::DofMatched => "dof_matched",
        }
    }
}

impl std::fmt::Display for DesignMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: DesignMethod,
    pub tool_version: String,
    pub timestamp: String,
    /// Command-line flags or batch parameters that produced the design.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
}

impl Provenance {
    /// Provenance stamped with `SOURCE_DATE_EPOCH` when set, else the current time.
    pub fn now(method: DesignMethod) -> Self {
        Self {
            method,
            tool_version: crate::TOOL_VERSION.to_string(),
            timestamp: timestamp(),
            parameters: BTreeMap::new(),
        }
    }

    pub fn with_parameter(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }
}

fn timestamp() -> String {
    let epoch = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.trim().parse::<i64>().ok());
    let time = match epoch.and_then(|s| chrono::DateTime::from_timestamp(s, 0)) {
        Some(t) => t,
        None => chrono::Utc::now(),
    };
    time.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_tilde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dof: Option<DofInterval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_vis: Option<f64>,
}

impl Derived {
    pub fn is_empty(&self) -> bool {
        self.m.is_none() && self.gamma_tilde.is_none() && self.dof.is_none() && self.d_vis.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignFile {
    pub schema_version: String,
    pub units: String,
    pub design: CameraDesign,
    pub constraints: DesignConstraints,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived: Option<Derived>,
}

impl DesignFile {
    pub fn new(design: CameraDesign, constraints: DesignConstraints, provenance: Provenance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            units: "mm".to_string(),
            design,
            constraints,
            provenance,
            derived: None,
        }
    }

    pub fn with_derived(mut self, derived: Derived) -> Self {
        self.derived = (!derived.is_empty()).then_some(derived);
        self
    }

    /// Rounds the microlens pitch to the nearest whole number of pixels.
    pub fn snap_pitch_to_pixels(mut self) -> Self {
        let s = self.design.sensor.pixel_size;
        let snapped = ((self.design.mla.d_ml / s).round()).max(1.0) * s;
        self.design.mla.d_ml = snapped;
        self.constraints.d_ml = snapped;
        self
    }
}

/// Rounds `x` to 12 significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: &mut toml::Value) {
    match v {
        toml::Value::Float(f) => *f = round_significant(*f),
        toml::Value::Array(items) => items.iter_mut().for_each(round_value),
        toml::Value::Table(t) => t.iter_mut().for_each(|(_, v)| round_value(v)),
        _ => {}
    }
}

fn ser_error(e: impl std::fmt::Display) -> Error {
    Error::Validation(format!("cannot serialize design: {e}"))
}

pub fn serialize_design(file: &DesignFile) -> Result<String> {
    let mut value = toml::Value::try_from(file).map_err(ser_error)?;
    round_value(&mut value);
    toml::to_string(&value).map_err(ser_error)
}

pub fn parse_design(text: &str) -> Result<DesignFile> {
    let value: toml::Value = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
        message: e.message().to_string(),
    })?;
    let found = value.get("schema_version").and_then(|v| v.as_str()).unwrap_or("");
    if found != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: found.to_string(),
            expected: SCHEMA_VERSION.to_string(),
        });
    }
    let file: DesignFile = value.try_into().map_err(|e: toml::de::Error| Error::Parse {
        line: 0,
        message: e.message().to_string(),
    })?;
    file.design.validate()?;
    Ok(file)
}

pub fn write_design(path: &std::path::Path, file: &DesignFile) -> Result<()> {
    std::fs::write(path, serialize_design(file)?)?;
    Ok(())
}

pub fn read_design(path: &std::path::Path) -> Result<DesignFile> {
    parse_design(&crate::io::read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::SensorSpec;
    use crate::paraxial::thin_lens_design;

    fn sample() -> DesignFile {
        let c = DesignConstraints::new(1000.0, 0.3, 2.0, 0.3, SensorSpec::new(0.006, 4.0));
        let d = thin_lens_design(&c, 50.0).unwrap();
        DesignFile::new(d, c, Provenance::now(DesignMethod::Thin).with_parameter("flag", "--x 1"))
    }

    #[test]
    fn round_trip_is_stable() {
        let text = serialize_design(&sample()).unwrap();
        let parsed = parse_design(&text).unwrap();
        assert_eq!(serialize_design(&parsed).unwrap(), text);
        assert_eq!(parse_design(&serialize_design(&parsed).unwrap()).unwrap(), parsed);
    }

    #[test]
    fn unknown_schema_rejected() {
        let text = serialize_design(&sample()).unwrap().replace(SCHEMA_VERSION, "other/9");
        assert!(matches!(parse_design(&text), Err(Error::SchemaVersion { .. })));
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_significant(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_significant(-123456.7890123456), -123456.789012);
        assert_eq!(round_significant(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn infinite_dof_survives() {
        let f = sample().with_derived(Derived {
            dof: Some(DofInterval::new(500.0, f64::INFINITY)),
            ..Default::default()
        });
        let parsed = parse_design(&serialize_design(&f).unwrap()).unwrap();
        assert_eq!(parsed.derived.unwrap().dof.unwrap().delta_max, f64::INFINITY);
    }

    #[test]
    fn pitch_snapping() {
        let mut f = sample();
        f.design.mla.d_ml = 0.2282;
        let f = f.snap_pitch_to_pixels();
        assert!((f.design.mla.d_ml - 0.228).abs() < 1e-12);
    }
}
