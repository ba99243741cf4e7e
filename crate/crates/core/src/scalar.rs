//! Scalar abstraction: the codeword-space math runs on `f32` or `f64`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar for codebook entries, norms and residuals.
///
/// Everything the codeword-space math needs beyond `num_traits::Float`:
/// standard-normal sampling, text round-tripping for the codebook file
/// format, and a per-type unit-norm tolerance.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + std::fmt::Display
    + std::fmt::Debug
    + std::str::FromStr
    + Send
    + Sync
    + 'static
{
    /// Draw one standard normal deviate.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Tolerance for the unit-column-norm invariant (rounding slack only).
    fn unit_norm_tolerance() -> Self;

    fn of_f64(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).unwrap()
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap()
    }
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn unit_norm_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn unit_norm_tolerance() -> Self {
        1e-5
    }
}

/// Compensated (Kahan) accumulator.
///
/// All norm evaluations feed through this so that two scans visiting the
/// same terms in the same order produce bitwise-identical sums.
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<F> {
    sum: F,
    carry: F,
}

impl<F: num_traits::Float> KahanSum<F> {
    pub fn new() -> Self {
        KahanSum {
            sum: F::zero(),
            carry: F::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: F) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> F {
        self.sum
    }
}

impl<F: num_traits::Float> Default for KahanSum<F> {
    fn default() -> Self {
        Self::new()
    }
}

/// Compensated sum of an iterator of `f64` values, in iteration order.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}
