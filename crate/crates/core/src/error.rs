use thiserror::Error;

use crate::refine::{DofMatchTrace, RefineTrace};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Axial ordering of lens, MLA and sensor is violated.
    #[error("invalid camera geometry: {0}")]
    DesignGeometry(String),

    #[error("no real focus: {0}")]
    NoFocus(String),

    #[error("probe ray blocked: {0}")]
    RayBlocked(String),

    #[error("fewer than two adjacent microlens clusters with at least {min_hits} hits")]
    InsufficientClusters { min_hits: usize },

    #[error("pixel at y = {pixel_y} mm receives no light")]
    DarkPixel { pixel_y: f64 },

    /// The pixel never reaches sub-pixel blur anywhere along its mean ray.
    #[error("pixel at y = {pixel_y} mm is never in focus (best blur {best_blur} mm)")]
    NeverInFocus { pixel_y: f64, best_blur: f64 },

    #[error("depth of field intersection is empty: [{delta_min}, {delta_max}]")]
    EmptyDof { delta_min: f64, delta_max: f64 },

    #[error("infeasible design: {0}")]
    Infeasible(String),

    #[error("refinement did not converge after {} iterations", .trace.iterations.len())]
    NoConvergence { trace: Box<RefineTrace> },

    #[error("depth of field matching did not converge after {} outer iterations", .trace.outer_iterations)]
    DofNoConvergence { trace: Box<DofMatchTrace> },

    #[error("shape mismatch: {left} vs {right} pixels")]
    ShapeMismatch { left: usize, right: usize },

    #[error("degenerate contrast region (all values equal)")]
    DegenerateRegion,

    #[error("edge not found near pixel {0}")]
    EdgeNotFound(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported schema version {found:?} (expected {expected:?})")]
    SchemaVersion { found: String, expected: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
