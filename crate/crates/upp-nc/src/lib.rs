//! Ultimately pseudo-periodic (UPP) piecewise-affine curves over exact
//! rationals, with the network-calculus operators built on them.
//!
//! - [`numeric`]: exact rationals and `+inf`/`-inf`.
//! - [`curve`]: sequences, UPP curves, evaluation, cut, classification, minimization.
//! - [`pseudoinverse`]: lower and upper pseudo-inverses, by sequence and by curve.
//! - [`composition`]: `f ∘ g` with the ultimately affine and ultimately constant shortcuts.
//! - [`ncops`]: curve builders, convolution with a rate-latency curve,
//!   horizontal deviation and the IWRR per-flow service curve.
//! - [`oracle`] (feature `testing`): brute-force reference implementations and a
//!   random curve generator.
//! - [`cli`]: the `upp` command-line front end.

pub mod cli;
pub mod composition;
pub mod curve;
pub mod error;
pub mod ncops;
pub mod numeric;
#[cfg(feature = "testing")]
pub mod oracle;
pub mod pseudoinverse;
pub mod visits;

pub use curve::{Classification, Curve, Element, Point, Segment, Sequence, UaInfo};
pub use error::{Error, Result};
pub use numeric::{ExtendedValue, Rational};
