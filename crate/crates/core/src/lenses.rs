//! Bundled main-lens prescriptions.

use crate::error::{Error, Result};
use crate::io::parse_prescription;
use crate::optics::LensPrescription;

const BUILTINS: &[(&str, &str)] = &[
    ("double_gauss", include_str!("../lenses/double_gauss.lens")),
    ("triplet", include_str!("../lenses/triplet.lens")),
    ("biconvex", include_str!("../lenses/biconvex.lens")),
    ("achromat", include_str!("../lenses/achromat.lens")),
    ("planoconvex", include_str!("../lenses/planoconvex.lens")),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn builtin(name: &str) -> Option<LensPrescription> {
    BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_prescription(text).expect("bundled prescription parses"))
}

pub fn all_builtins() -> Vec<LensPrescription> {
    builtin_names().filter_map(builtin).collect()
}

/// Resolves `builtin:<name>`, a bare builtin name, or a file path.
pub fn load_lens(spec: &str) -> Result<LensPrescription> {
    let name = spec.strip_prefix("builtin:").unwrap_or(spec);
    if let Some(lens) = builtin(name) {
        return Ok(lens);
    }
    if spec.starts_with("builtin:") {
        return Err(Error::Validation(format!("unknown builtin lens {name:?}")));
    }
    parse_prescription(&crate::io::read_text(std::path::Path::new(spec))?)
}
