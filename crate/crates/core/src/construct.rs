//! Random codebook generators for the three WSC families, and the
//! rejection-sampling constructor that turns the random-coding existence
//! argument into an operational builder.
//!
//! * WESC: standard Gaussian columns, normalized to unit `l2` norm.
//! * `l1`-WSC: Gaussian entries scaled by `√(2π)/2` (so the raw column
//!   `l1` norm has mean `m`), normalized to unit `l1` norm.
//! * nonnegative `l1`-WSC: `√(2π)/2 · |A|` entries (one-sided Gaussian,
//!   each with mean one), normalized to unit `l1` norm.
//!
//! Columns are sampled from per-column streams, so generation order (or
//! parallelism) cannot change the output.

use rand_chacha::ChaCha8Rng;

use crate::bounds;
use crate::codebook::{vector_norm, Codebook, Provenance};
use crate::distance::{check_distance_at_least, ScanBudget};
use crate::error::Error;
use crate::params::{CodeParameters, NormKind};
use crate::rng::RngSpec;
use crate::scalar::Scalar;

/// The three generator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Wesc,
    L1Wsc,
    NonnegL1Wsc,
}

impl Family {
    pub fn norm(self) -> NormKind {
        match self {
            Family::Wesc => NormKind::L2,
            Family::L1Wsc | Family::NonnegL1Wsc => NormKind::L1,
        }
    }

    pub fn nonneg(self) -> bool {
        matches!(self, Family::NonnegL1Wsc)
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::Wesc => "wesc",
            Family::L1Wsc => "l1wsc",
            Family::NonnegL1Wsc => "ngl1wsc",
        }
    }

    pub fn from_parameters(p: &CodeParameters) -> Family {
        match (p.norm, p.nonneg) {
            (NormKind::L2, _) => Family::Wesc,
            (NormKind::L1, false) => Family::L1Wsc,
            (NormKind::L1, true) => Family::NonnegL1Wsc,
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "wesc" => Ok(Family::Wesc),
            "l1wsc" | "l1" => Ok(Family::L1Wsc),
            "ngl1wsc" | "ngl1" => Ok(Family::NonnegL1Wsc),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

/// `√(2π)/2`, the scale that gives the `l1` families unit-mean entries
/// (in absolute value).
pub fn l1_scale() -> f64 {
    (2.0 * std::f64::consts::PI).sqrt() / 2.0
}

/// One raw (pre-normalization) column of the given family.
pub(crate) fn raw_column<F: Scalar>(family: Family, m: usize, rng: &mut ChaCha8Rng) -> Vec<F> {
    let scale = F::of_f64(l1_scale());
    (0..m)
        .map(|_| {
            let a = F::standard_normal(rng);
            match family {
                Family::Wesc => a,
                Family::L1Wsc => scale * a,
                Family::NonnegL1Wsc => scale * a.abs(),
            }
        })
        .collect()
}

fn normalized_columns<F: Scalar>(
    family: Family,
    m: usize,
    n: usize,
    rng: &RngSpec,
    label: &str,
) -> Vec<Vec<F>> {
    let norm_kind = family.norm();
    let floor = F::of_f64(1e-300).max(F::min_positive_value());
    (0..n)
        .map(|j| {
            let mut stream = rng.stream(label, j as u64);
            let mut raw = raw_column::<F>(family, m, &mut stream);
            let mut norm = vector_norm(&raw, norm_kind);
            // Degenerate draw (norm below the floor): keep drawing from
            // the same per-column stream.
            while norm < floor {
                raw = raw_column::<F>(family, m, &mut stream);
                norm = vector_norm(&raw, norm_kind);
            }
            raw.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

fn generate<F: Scalar>(family: Family, m: usize, n: usize, rng: &RngSpec) -> Result<Codebook<F>, Error> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameters(
            "generator dimensions must be positive".to_string(),
        ));
    }
    Codebook::from_columns(
        normalized_columns(family, m, n, rng, family.label()),
        family.norm(),
        family.nonneg(),
        Provenance {
            generator: family.label().to_string(),
            seed: Some(rng.seed),
        },
    )
}

/// Gaussian WESC: unit `l2`-norm columns.
pub fn gen_wesc<F: Scalar>(m: usize, n: usize, rng: &RngSpec) -> Result<Codebook<F>, Error> {
    generate(Family::Wesc, m, n, rng)
}

/// Scaled-Gaussian `l1`-WSC: unit `l1`-norm columns.
pub fn gen_l1wsc<F: Scalar>(m: usize, n: usize, rng: &RngSpec) -> Result<Codebook<F>, Error> {
    generate(Family::L1Wsc, m, n, rng)
}

/// Half-Gaussian nonnegative `l1`-WSC: unit `l1`-norm nonnegative columns.
pub fn gen_nonneg_l1wsc<F: Scalar>(m: usize, n: usize, rng: &RngSpec) -> Result<Codebook<F>, Error> {
    generate(Family::NonnegL1Wsc, m, n, rng)
}

pub fn gen_family<F: Scalar>(
    family: Family,
    m: usize,
    n: usize,
    rng: &RngSpec,
) -> Result<Codebook<F>, Error> {
    generate(family, m, n, rng)
}

/// Rejection sampling: regenerate until the exact verifier certifies
/// minimum distance at least `p.d`, or the attempt budget runs out.
///
/// A sphere-packing feasibility pre-check short-circuits provably
/// impossible requests. Attempt `a` draws its columns from streams keyed
/// by `(seed, "<family>/attempt/<a>", column)`, so the result depends only
/// on `(p, seed, max_attempts)`.
pub fn construct_with_distance<F: Scalar>(
    p: &CodeParameters,
    rng: &RngSpec,
    max_attempts: u64,
    budget: &ScanBudget,
) -> Result<(Codebook<F>, u64), Error> {
    p.validate()?;
    if max_attempts == 0 {
        return Err(Error::InvalidParameters(
            "max_attempts must be at least 1".to_string(),
        ));
    }
    let packing = bounds::sphere_packing_report(p.n, p.m, p.k, p.d, p.t);
    if !packing.feasible {
        return Err(Error::ConstructionInfeasible(format!(
            "sphere packing bound rules out (N={}, m={}, K={}, d={}, t={}): \
             log |superpositions| = {:.6} exceeds m·log((tK + d/2)/(d/2)) = {:.6}",
            p.n, p.m, p.k, p.d, p.t, packing.log_lhs, packing.log_rhs
        )));
    }
    let family = Family::from_parameters(p);
    let threshold = F::of_f64(p.d);
    for attempt in 1..=max_attempts {
        let label = format!("{}/attempt/{}", family.label(), attempt);
        let candidate = Codebook::from_columns(
            normalized_columns(family, p.m, p.n, rng, &label),
            family.norm(),
            family.nonneg(),
            Provenance {
                generator: format!("{}+distance", family.label()),
                seed: Some(rng.seed),
            },
        )?;
        let check = check_distance_at_least(&candidate, p.k, p.t, threshold, budget)?;
        if check.ok {
            return Ok((candidate, attempt));
        }
    }
    Err(Error::ConstructionFailed {
        attempts: max_attempts,
        reason: format!(
            "no draw of family {} reached minimum distance {} at (N={}, m={}, K={}, t={})",
            family.label(),
            p.d,
            p.n,
            p.m,
            p.k,
            p.t
        ),
    })
}
