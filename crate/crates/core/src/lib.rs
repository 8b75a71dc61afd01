//! Design and evaluation of focused plenoptic cameras with a meridional ray
//! tracer.
//!
//! The pipeline starts from closed-form thin-lens constraints
//! ([`paraxial::thin_lens_design`]), corrects them for a real prescription
//! ([`paraxial::thick_lens_design`]) and then refines the microlens distances
//! and main-lens aperture against traced measurements ([`refine::refine`]).
//! [`eval`] renders 1D test patterns through a finished camera.

pub mod error;
pub mod eval;
pub mod io;
pub mod lenses;
pub mod measure;
pub mod optics;
pub mod paraxial;
pub mod refine;

pub use error::{Error, Result};

/// Version string recorded in exported design files.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
