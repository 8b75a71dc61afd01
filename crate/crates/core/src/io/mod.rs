//! File formats: lens prescriptions, design files and batch experiments.

mod design_file;
mod experiment;
mod prescription;

pub use design_file::{
    parse_design, read_design, round_significant, serialize_design, write_design, Derived, DesignFile, DesignMethod,
    Provenance, SCHEMA_VERSION,
};
pub use experiment::{
    build_design, parse_experiment, read_experiment, read_summary_csv, run_experiment, write_summary_csv,
    ConstraintSet, ExperimentSpec, Summary, SummaryRow, SweepSpec, SUMMARY_FILE,
};
pub use prescription::{format_prescription, parse_prescription};

/// Reads a file, naming the path in the error.
pub(crate) fn read_text(path: &std::path::Path) -> crate::Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}
