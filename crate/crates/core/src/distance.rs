//! Exact computation and certification of the minimum superposition
//! distance `d_p(C, K, B_t) = min ‖C(b1 - b2)‖` over distinct
//! `b1, b2 ∈ ℬ_K`.
//!
//! Two routes compute the same value: [`min_distance_pairs`] is the
//! literal double loop over signal pairs (the oracle), while
//! [`min_distance`] scans the sign-reduced feasible difference set and
//! does roughly square-root the work. Both evaluate each difference with
//! the same canonical accumulation, so the minima agree bit for bit.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::codebook::Codebook;
use crate::error::Error;
use crate::params::NormKind;
use crate::scalar::Scalar;
use crate::signals::{
    count_signals, difference, enumerate_feasible_differences, enumerate_signals,
    DifferenceVector,
};

/// Explicit cap on how many candidates a scan may evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanBudget {
    pub max_candidates: u64,
}

impl Default for ScanBudget {
    fn default() -> Self {
        ScanBudget {
            max_candidates: 4_000_000,
        }
    }
}

impl ScanBudget {
    pub fn new(max_candidates: u64) -> Self {
        ScanBudget { max_candidates }
    }
}

mod u128_string {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        v.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Result of an exhaustive minimum-distance scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceCertificate<F> {
    /// The achieved minimum.
    pub value: F,
    /// A feasible difference vector achieving it (first in enumeration
    /// order on ties).
    pub witness: DifferenceVector,
    pub norm: NormKind,
    /// True iff the scan covered the whole difference set.
    pub exhaustive: bool,
    /// How many difference vectors (or ordered pairs) were evaluated.
    #[serde(with = "u128_string")]
    pub examined: u128,
}

impl<F: Scalar> DistanceCertificate<F> {
    /// Re-evaluate the witness against a codebook; true iff it reproduces
    /// the certified value within rounding tolerance.
    pub fn check_witness(&self, cb: &Codebook<F>, tol: F) -> bool {
        if self.witness.n != cb.columns() {
            return false;
        }
        let again = cb.superposition_norm(&self.witness.entries);
        (again - self.value).abs() <= tol
    }
}

/// Outcome of a threshold check, with a counterexample on failure.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCheck<F> {
    pub ok: bool,
    pub counterexample: Option<(DifferenceVector, F)>,
    pub examined: u128,
}

fn require_k_le_n(cb_columns: usize, k: usize) -> Result<(), Error> {
    if k > cb_columns {
        return Err(Error::InvalidParameters(format!(
            "K={k} exceeds codebook size N={cb_columns}"
        )));
    }
    Ok(())
}

/// Minimum distance over the sign-reduced feasible difference set.
pub fn min_distance<F: Scalar>(
    cb: &Codebook<F>,
    k: usize,
    t: i32,
    budget: &ScanBudget,
) -> Result<DistanceCertificate<F>, Error> {
    require_k_le_n(cb.columns(), k)?;
    let mut best: Option<(F, DifferenceVector)> = None;
    let mut examined: u128 = 0;
    for v in enumerate_feasible_differences(cb.columns(), k, t, budget.max_candidates)? {
        let norm = cb.superposition_norm(&v.entries);
        examined += 1;
        match &best {
            Some((val, _)) if norm >= *val => {}
            _ => best = Some((norm, v)),
        }
    }
    let (value, witness) = best.expect("difference set is never empty for valid (N, K, t)");
    Ok(DistanceCertificate {
        value,
        witness,
        norm: cb.norm_kind(),
        exhaustive: true,
        examined,
    })
}

/// Oracle route: the literal double loop over ordered distinct pairs
/// `b1 ≠ b2 ∈ ℬ_K`.
pub fn min_distance_pairs<F: Scalar>(
    cb: &Codebook<F>,
    k: usize,
    t: i32,
    budget: &ScanBudget,
) -> Result<DistanceCertificate<F>, Error> {
    require_k_le_n(cb.columns(), k)?;
    let n = cb.columns();
    let count = count_signals(n, k, t, true);
    let pairs = &count * &count;
    if pairs.to_u64().map(|p| p > budget.max_candidates).unwrap_or(true) {
        return Err(Error::BudgetExceeded {
            what: "pairwise distance scan",
            needed: pairs.to_string(),
            cap: budget.max_candidates,
        });
    }
    let outer = enumerate_signals(n, k, t, budget.max_candidates)?;
    let mut best: Option<(F, DifferenceVector)> = None;
    let mut examined: u128 = 0;
    for b1 in outer.clone() {
        for b2 in outer.clone() {
            let Some(v) = difference(&b1, &b2)? else {
                continue;
            };
            let norm = cb.superposition_norm(&v.entries);
            examined += 1;
            match &best {
                Some((val, _)) if norm >= *val => {}
                _ => best = Some((norm, v)),
            }
        }
    }
    let (value, witness) = best.expect("at least two distinct signals exist");
    Ok(DistanceCertificate {
        value,
        witness,
        norm: cb.norm_kind(),
        exhaustive: true,
        examined,
    })
}

/// Early-abort threshold check: true iff the minimum distance is at least
/// `d`; on failure returns the first violating difference found.
pub fn check_distance_at_least<F: Scalar>(
    cb: &Codebook<F>,
    k: usize,
    t: i32,
    d: F,
    budget: &ScanBudget,
) -> Result<DistanceCheck<F>, Error> {
    require_k_le_n(cb.columns(), k)?;
    let mut examined: u128 = 0;
    for v in enumerate_feasible_differences(cb.columns(), k, t, budget.max_candidates)? {
        let norm = cb.superposition_norm(&v.entries);
        examined += 1;
        if norm < d {
            return Ok(DistanceCheck {
                ok: false,
                counterexample: Some((v, norm)),
                examined,
            });
        }
    }
    Ok(DistanceCheck {
        ok: true,
        counterexample: None,
        examined,
    })
}
