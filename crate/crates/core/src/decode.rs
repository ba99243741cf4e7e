//! Certified minimum-distance decoding: recover `b ∈ ℬ_K` from
//! `y = Cb + e` by exact nearest-superposition search.
//!
//! Whenever the codebook has certified minimum distance `d` and
//! `‖e‖ < d/2`, the nearest superposition is unique and equals the
//! transmitted signal (triangle inequality), so the exhaustive argmin is
//! a certified decoder. [`decode_pruned`] returns the identical result
//! (same estimate, same residual bits) via a depth-first search that
//! discards subtrees whose best possible residual cannot beat the
//! incumbent; ties defer to the exhaustive enumeration order.

use serde::{Deserialize, Serialize};

use crate::codebook::Codebook;
use crate::distance::{min_distance, ScanBudget};
use crate::error::Error;
use crate::params::NormKind;
use crate::scalar::Scalar;
use crate::signals::{
    count_signals, enumerate_nonneg_signals, enumerate_signals, enumeration_order,
    nonneg_value_alphabet, value_alphabet, SparseIntegerVector,
};

/// Which nonzero weights the search considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchAlphabet {
    /// `[-t, t] \ {0}`, the full weight set.
    Symmetric,
    /// `[1, t]`, for nonnegative signals.
    Nonnegative,
}

/// Decoder options: alphabet restriction and, when known, the certified
/// radius used to stamp the result.
#[derive(Debug, Clone, Copy)]
pub struct DecodeOptions<F> {
    pub alphabet: SearchAlphabet,
    /// Half the certified minimum distance, when the caller has one.
    pub certified_radius: Option<F>,
}

impl<F> Default for DecodeOptions<F> {
    fn default() -> Self {
        DecodeOptions {
            alphabet: SearchAlphabet::Symmetric,
            certified_radius: None,
        }
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult<F> {
    pub estimate: SparseIntegerVector,
    /// `‖y - C·estimate‖` in the codebook norm, canonical evaluation.
    pub residual: F,
    /// True iff a certified radius was supplied and `residual` is inside
    /// it, which guarantees the estimate equals the transmitted signal.
    pub certified: bool,
    /// Candidates evaluated by the scan.
    #[serde(with = "u128_string")]
    pub examined: u128,
}

fn check_inputs<F: Scalar>(cb: &Codebook<F>, y: &[F], k: usize) -> Result<(), Error> {
    if y.len() != cb.rows() {
        return Err(Error::DimensionMismatch(format!(
            "observation length {} does not match codeword length {}",
            y.len(),
            cb.rows()
        )));
    }
    if k > cb.columns() {
        return Err(Error::InvalidParameters(format!(
            "K={k} exceeds codebook size N={}",
            cb.columns()
        )));
    }
    Ok(())
}

fn signal_stream<F: Scalar>(
    cb: &Codebook<F>,
    k: usize,
    t: i32,
    alphabet: SearchAlphabet,
    budget: &ScanBudget,
) -> Result<crate::signals::SignalEnumerator, Error> {
    match alphabet {
        SearchAlphabet::Symmetric => enumerate_signals(cb.columns(), k, t, budget.max_candidates),
        SearchAlphabet::Nonnegative => {
            enumerate_nonneg_signals(cb.columns(), k, t, budget.max_candidates)
        }
    }
}

/// Exact exhaustive decoder: argmin over the whole ball, ties broken by
/// enumeration order.
pub fn decode_exhaustive<F: Scalar>(
    cb: &Codebook<F>,
    y: &[F],
    k: usize,
    t: i32,
    opts: &DecodeOptions<F>,
    budget: &ScanBudget,
) -> Result<DecodeResult<F>, Error> {
    check_inputs(cb, y, k)?;
    let mut best: Option<(F, SparseIntegerVector)> = None;
    let mut examined: u128 = 0;
    for b in signal_stream(cb, k, t, opts.alphabet, budget)? {
        let residual = cb.residual_norm(y, &b.entries);
        examined += 1;
        match &best {
            Some((r, _)) if residual >= *r => {}
            _ => best = Some((residual, b)),
        }
    }
    let (residual, estimate) = best.expect("ball contains at least the zero signal");
    Ok(DecodeResult {
        estimate,
        residual,
        certified: opts
            .certified_radius
            .map(|r| residual < r)
            .unwrap_or(false),
        examined,
    })
}

struct PrunedSearch<'a, F> {
    cb: &'a Codebook<F>,
    y: &'a [F],
    n: usize,
    k: usize,
    alphabet: Vec<i32>,
    /// Largest norm reduction one further entry can cause: `max |w|`
    /// times the unit column norm.
    per_entry: F,
    margin: F,
    incumbent_res: F,
    incumbent: SparseIntegerVector,
    examined: u128,
}

impl<F: Scalar> PrunedSearch<'_, F> {
    fn l2(v: &[F]) -> F {
        let mut s = F::zero();
        for &x in v {
            s = s + x * x;
        }
        s.sqrt()
    }

    fn consider(&mut self, entries: &[(usize, i32)], incremental_norm: F) {
        self.examined += 1;
        // The incremental norm tracks the canonical one within `margin`;
        // only candidates near the incumbent need the canonical pass.
        if incremental_norm > self.incumbent_res + self.margin {
            return;
        }
        let canonical = self.cb.residual_norm(self.y, entries);
        let replace = canonical < self.incumbent_res
            || (canonical == self.incumbent_res
                && enumeration_order(
                    &SparseIntegerVector {
                        n: self.n,
                        entries: entries.to_vec(),
                    },
                    &self.incumbent,
                    &self.alphabet,
                ) == std::cmp::Ordering::Less);
        if replace {
            self.incumbent_res = canonical;
            self.incumbent = SparseIntegerVector {
                n: self.n,
                entries: entries.to_vec(),
            };
        }
    }

    fn visit(&mut self, start: usize, entries: &mut Vec<(usize, i32)>, residual: &[F]) {
        let depth_left = self.k - entries.len();
        if depth_left == 0 {
            return;
        }
        let partial = Self::l2(residual);
        // Subtree lower bound: each remaining entry moves the residual by
        // at most `per_entry`; the slack keeps rounding from ever pruning
        // a candidate the exhaustive scan would keep.
        let floor = partial - F::from_usize(depth_left).unwrap() * self.per_entry;
        if floor >= self.incumbent_res + self.margin {
            return;
        }
        let alphabet = self.alphabet.clone();
        for i in start..self.n {
            let col = self.cb.column(i);
            for &w in &alphabet {
                let wf = F::of_f64(w as f64);
                let child: Vec<F> = residual
                    .iter()
                    .zip(col)
                    .map(|(&r, &c)| r - wf * c)
                    .collect();
                entries.push((i, w));
                self.consider(entries, Self::l2(&child));
                self.visit(i + 1, entries, &child);
                entries.pop();
            }
        }
    }
}

/// Depth-first decoder with residual lower-bound pruning.
///
/// Identical output to [`decode_exhaustive`] on the same inputs; for
/// `l1` codebooks pruning has no sound cheap bound here, so it falls
/// back to the exhaustive scan.
pub fn decode_pruned<F: Scalar>(
    cb: &Codebook<F>,
    y: &[F],
    k: usize,
    t: i32,
    opts: &DecodeOptions<F>,
    budget: &ScanBudget,
) -> Result<DecodeResult<F>, Error> {
    if cb.norm_kind() != NormKind::L2 {
        return decode_exhaustive(cb, y, k, t, opts, budget);
    }
    check_inputs(cb, y, k)?;
    let count = match opts.alphabet {
        SearchAlphabet::Symmetric => count_signals(cb.columns(), k, t, true),
        SearchAlphabet::Nonnegative => {
            // (t)^j values per support entry.
            let mut total = num_bigint::BigUint::from(1u32);
            let mut acc = num_bigint::BigUint::from(0u32);
            for kk in 1..=k.min(cb.columns()) {
                total *= num_bigint::BigUint::from(t as u64);
                acc += num_integer::binomial(
                    num_bigint::BigUint::from(cb.columns()),
                    num_bigint::BigUint::from(kk),
                ) * &total;
            }
            acc + num_bigint::BigUint::from(1u32)
        }
    };
    if num_traits::ToPrimitive::to_u64(&count)
        .map(|c| c > budget.max_candidates)
        .unwrap_or(true)
    {
        return Err(Error::BudgetExceeded {
            what: "pruned decode",
            needed: count.to_string(),
            cap: budget.max_candidates,
        });
    }
    let alphabet = match opts.alphabet {
        SearchAlphabet::Symmetric => value_alphabet(t),
        SearchAlphabet::Nonnegative => nonneg_value_alphabet(t),
    };
    let root_residual = y.to_vec();
    let root_norm = cb.residual_norm(y, &[]);
    let mut search = PrunedSearch {
        cb,
        y,
        n: cb.columns(),
        k,
        alphabet,
        per_entry: F::of_f64(t as f64),
        margin: F::of_f64(1e-9).max(F::unit_norm_tolerance()),
        incumbent_res: root_norm,
        incumbent: SparseIntegerVector::zero(cb.columns()),
        examined: 1,
    };
    let mut entries = Vec::with_capacity(k);
    search.visit(0, &mut entries, &root_residual);
    Ok(DecodeResult {
        estimate: search.incumbent,
        residual: search.incumbent_res,
        certified: opts
            .certified_radius
            .map(|r| search.incumbent_res < r)
            .unwrap_or(false),
        examined: search.examined,
    })
}

/// Half the exact minimum distance: any observation within this radius of
/// some superposition decodes to exactly that signal.
pub fn certified_radius<F: Scalar>(
    cb: &Codebook<F>,
    k: usize,
    t: i32,
    budget: &ScanBudget,
) -> Result<F, Error> {
    Ok(min_distance(cb, k, t, budget)?.value / F::of_f64(2.0))
}
