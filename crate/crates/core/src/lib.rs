//! Exact adelic and spectral measures of group-ring operators on finite sofic samples.
//!
//! Everything here is `no_std` with `alloc`; file formats, configuration and the
//! command line live in the companion `adelic-cli` crate.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod group;
pub mod group_ring;
pub mod linalg;
pub mod measure;
pub mod quasitile;
pub mod ring;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{ExactMatrix, SmithForm};
pub use ring::{PrimeIdeal, Ring, RingElement, Valuation};

/// Exact rationals used for all masses and moments.
pub type Rational = num_rational::BigRational;
