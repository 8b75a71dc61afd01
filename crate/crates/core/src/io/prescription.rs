//! Tabular lens prescription format.
//!
//! ```text
//! # comment
//! name: Double Gauss 50mm
//! focal_length: 50
//! # radius  thickness  index  semi_aperture  [STOP]
//! 29.475    3.76       1.67   12.6
//! INF       4.5        1.0    8.55           STOP
//! IDEAL:50  0          1.0    10             # ideal thin lens, focal length 50
//! ```
//!
//! Lengths are millimeters. `INF` marks a planar surface.

use crate::error::{Error, Result};
use crate::optics::{LensPrescription, Profile, Surface};

fn parse_num(tok: &str, line: usize, what: &str) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} {tok:?}"),
    })
}

pub fn parse_prescription(text: &str) -> Result<LensPrescription> {
    let mut name = String::from("unnamed");
    let mut focal = None;
    let mut surfaces = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("name:") {
            name = rest.trim().to_string();
            continue;
        }
        if let Some(rest) = content.strip_prefix("focal_length:") {
            focal = Some(parse_num(rest.trim(), line, "focal length")?);
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() < 4 || toks.len() > 5 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 or 5 columns, found {}", toks.len()),
            });
        }
        let is_stop = match toks.get(4) {
            None => false,
            Some(t) if t.eq_ignore_ascii_case("STOP") => true,
            Some(t) => {
                return Err(Error::Parse {
                    line,
                    message: format!("unexpected trailing token {t:?}"),
                })
            }
        };
        let profile = if toks[0].eq_ignore_ascii_case("INF") {
            Profile::Planar
        } else if let Some(f) = toks[0].strip_prefix("IDEAL:") {
            Profile::Ideal {
                focal_length: parse_num(f, line, "focal length")?,
            }
        } else {
            let radius = parse_num(toks[0], line, "radius")?;
            if radius.is_infinite() {
                Profile::Planar
            } else {
                Profile::Spherical { radius }
            }
        };
        surfaces.push(Surface {
            profile,
            thickness: parse_num(toks[1], line, "thickness")?,
            index_after: parse_num(toks[2], line, "index")?,
            semi_aperture: parse_num(toks[3], line, "semi-aperture")?,
            is_stop,
        });
    }
    LensPrescription::new(name, focal, surfaces)
}

/// Inverse of [`parse_prescription`].
pub fn format_prescription(lens: &LensPrescription) -> String {
    let mut out = format!("name: {}\n", lens.name);
    if let Some(f) = lens.focal_length_nominal {
        out.push_str(&format!("focal_length: {f}\n"));
    }
    out.push_str("# radius thickness index semi_aperture [STOP]\n");
    for s in lens.surfaces() {
        let r = match s.profile {
            Profile::Planar => "INF".to_string(),
            Profile::Spherical { radius } => format!("{radius}"),
            Profile::Ideal { focal_length } => format!("IDEAL:{focal_length}"),
        };
        out.push_str(&format!("{r} {} {} {}", s.thickness, s.index_after, s.semi_aperture));
        if s.is_stop {
            out.push_str(" STOP");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biconvex_two_lines() {
        let lens = parse_prescription("50 5 1.5 12\n-50 0 1.0 12\n").unwrap();
        assert_eq!(lens.surfaces().len(), 2);
        let idx: Vec<f64> = lens.surfaces().iter().map(|s| s.index_after).collect();
        assert_eq!(idx, vec![1.5, 1.0]);
    }

    #[test]
    fn inf_is_planar() {
        let lens = parse_prescription("INF 2.0 1.5 10.0\nINF 0 1 10\n").unwrap();
        assert_eq!(lens.surfaces()[0].profile, Profile::Planar);
    }

    #[test]
    fn parse_error_carries_line_number() {
        match parse_prescription("# header\n50 5 1.5 12\n-50 zero 1.0 12\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_prescription("50 5\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(parse_prescription("50 5 0.8 12\n-50 0 1 12\n"), Err(Error::Validation(_))));
        assert!(matches!(parse_prescription("50 5 1.5 0\n-50 0 1 12\n"), Err(Error::Validation(_))));
    }

    #[test]
    fn format_round_trip() {
        let text = "name: test\nfocal_length: 50\n50 5 1.5 12 STOP\n-50 0 1 12\nIDEAL:20 0 1 3\n";
        let lens = parse_prescription(text).unwrap();
        assert_eq!(parse_prescription(&format_prescription(&lens)).unwrap(), lens);
    }
}
