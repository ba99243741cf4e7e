//! Weighted superimposed codes (WSCs) for constrained integer compressed sensing.
//!
//! A WSC is a codebook `C ∈ R^{m×N}` of unit-norm columns such that all
//! weighted superpositions `Cb`, with `b` drawn from the bounded-integer
//! ball `ℬ_K = {b ∈ [-t,t]^N : ‖b‖₀ ≤ K}`, are pairwise separated by at
//! least `d` in the code norm (`l2` for WESCs, `l1` otherwise). The library
//! provides:
//!
//! * exact enumeration and counting of `ℬ_K` and its difference set ([`signals`]),
//! * random codebook generators for the Gaussian, scaled-Gaussian `l1` and
//!   half-Gaussian nonnegative `l1` families, plus a rejection-sampling
//!   constructor with certified minimum distance ([`construct`]),
//! * exact minimum-distance certification ([`distance`]),
//! * executable sphere-packing and rate-exponent bounds ([`bounds`]),
//! * certified minimum-distance decoding ([`decode`]),
//! * Monte Carlo probes of the concentration and tail inequalities behind
//!   the random-coding arguments ([`probes`]),
//! * end-to-end adder-channel and microarray simulations ([`scenarios`]).
//!
//! Codeword-space math is generic over the scalar type via [`Scalar`]
//! (`f32` or `f64`); counting is exact big-integer and the mean squared
//! superposition norm is an exact rational. The `f64` instantiations are
//! aliased at the crate root and are what the CLI uses.

pub mod bounds;
pub mod codebook;
pub mod construct;
pub mod decode;
pub mod distance;
pub mod error;
pub mod params;
pub mod probes;
pub mod rng;
pub mod scalar;
pub mod scenarios;
pub mod signals;

pub use error::Error;
pub use params::{CodeParameters, NormKind};
pub use rng::RngSpec;
pub use scalar::Scalar;
pub use signals::{DifferenceVector, SparseIntegerVector};

/// `f64` codebook, the default instantiation.
pub type Codebook64 = codebook::Codebook<f64>;
/// `f32` codebook.
pub type Codebook32 = codebook::Codebook<f32>;
/// `f64` distance certificate.
pub type DistanceCertificate64 = distance::DistanceCertificate<f64>;
/// `f64` decode result.
pub type DecodeResult64 = decode::DecodeResult<f64>;

/// Convenience result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
