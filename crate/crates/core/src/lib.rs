//! Executable thresholds for monotone set systems: expectation and
//! probability thresholds, exact minimum-cost covers, the round-based
//! fragmentation process, and exact-rational certification of the series
//! constants behind it.
//!
//! The ground set is small by design (≤ 63 elements): everything here is
//! exact, enumerable desk-scale computation, not asymptotics. All types are
//! immutable after construction and safe to share across threads; no
//! operation mutates its inputs.

pub mod caps;
pub mod certify;
pub mod cover;
pub mod error;
pub mod families;
pub mod fragment;
pub mod measure;
pub mod rng;
pub mod sets;
pub mod thresholds;

/// Arbitrary-precision rational, the carrier for every certified bound.
pub type Rational = num_rational::BigRational;

pub use caps::Caps;
pub use error::{Error, Result};
pub use measure::{ProbEstimate, ProbVector};
pub use sets::{GroundSet, SetFamily, SubsetMask};
