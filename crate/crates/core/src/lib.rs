//! Near-field beam shaping for linear arrays: caustic-based phase design
//! that concentrates power along an extended receiver trajectory instead of
//! a single focal point, plus focusing/multipoint/tracking baselines and
//! coverage metrics.
//!
//! Everything is wavelength-normalized: lengths are in units of the carrier
//! wavelength and the wavenumber is 2*pi.

pub mod aperture;
pub mod baselines;
pub mod error;
mod fnv;
pub mod metrics;
pub mod nearfield;
pub mod phase;
pub mod scenario;
pub mod specfun;
pub mod trajectory;

pub use error::{Error, ErrorKind, Result};
