//! Super-directive weight synthesis for compact circular receive arrays.
//!
//! The pipeline: build the noise-power matrix `A` of an array by spherical
//! quadrature, maximize directivity under mainlobe constraints, then pin the
//! worst sidelobes to a target level while a norm ball on the weights keeps
//! the ratio of external to internal noise (REIN) above a floor. Circular
//! sub-arrays designed this way can be tiled along a line into a composite
//! receive array.

pub mod composite;
pub mod error;
pub mod fmt;
pub mod geometry;
pub mod metrics;
pub mod par;
pub mod qp;
pub mod reallift;
pub mod sweep;
pub mod synthesis;

pub use error::{Error, Result};
