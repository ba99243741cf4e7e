//! The bounded-integer signal ball `ℬ_K`, its exact counting and
//! enumeration, and the feasible difference set `{b1 - b2 : b1, b2 ∈ ℬ_K}`.
//!
//! Enumeration order is fixed so every downstream scan is reproducible:
//! support size ascending, support sets in colexicographic order, values in
//! odometer order over the per-entry alphabet (last support position spins
//! fastest; alphabet ordered by magnitude with the positive value first,
//! i.e. `1, -1, 2, -2, ...`).

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A signal `b ∈ [-t,t]^N` with small support, stored sparsely.
///
/// Entries are index-ascending and nonzero. The magnitude bound `t` and
/// support bound `K` are properties of a use site, checked via
/// [`SparseIntegerVector::is_within`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SparseIntegerVector {
    /// Ambient dimension `N`.
    pub n: usize,
    /// `(index, value)` pairs, indices ascending, values nonzero.
    pub entries: Vec<(usize, i32)>,
}

impl SparseIntegerVector {
    /// Build from unsorted entries; rejects out-of-range indices, zero
    /// values and duplicate indices.
    pub fn new(n: usize, mut entries: Vec<(usize, i32)>) -> Result<Self, Error> {
        entries.sort_unstable_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameters(format!(
                    "duplicate index {} in sparse vector",
                    w[0].0
                )));
            }
        }
        for &(i, v) in &entries {
            if i >= n {
                return Err(Error::InvalidParameters(format!(
                    "index {i} out of range for dimension {n}"
                )));
            }
            if v == 0 {
                return Err(Error::InvalidParameters(format!(
                    "stored value at index {i} must be nonzero"
                )));
            }
        }
        Ok(SparseIntegerVector { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        SparseIntegerVector {
            n,
            entries: Vec::new(),
        }
    }

    /// `‖b‖₀`.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> i32 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0)
    }

    /// Does the vector lie in `ℬ_K` for the given `(K, t)`?
    pub fn is_within(&self, k: usize, t: i32) -> bool {
        self.support_size() <= k && self.entries.iter().all(|&(_, v)| v.abs() <= t)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }
}

/// A nonzero difference `b1 - b2` of two `ℬ_K` signals, entries in
/// `[-2t, 2t] \ {0}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DifferenceVector {
    pub n: usize,
    pub entries: Vec<(usize, i32)>,
}

impl DifferenceVector {
    pub fn new(n: usize, mut entries: Vec<(usize, i32)>) -> Result<Self, Error> {
        entries.sort_unstable_by_key(|&(i, _)| i);
        if entries.is_empty() {
            return Err(Error::InvalidParameters(
                "difference vector must be nonzero".to_string(),
            ));
        }
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameters(format!(
                    "duplicate index {} in difference vector",
                    w[0].0
                )));
            }
        }
        for &(i, v) in &entries {
            if i >= n {
                return Err(Error::InvalidParameters(format!(
                    "index {i} out of range for dimension {n}"
                )));
            }
            if v == 0 {
                return Err(Error::InvalidParameters(
                    "difference entries must be nonzero".to_string(),
                ));
            }
        }
        Ok(DifferenceVector { n, entries })
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn negated(&self) -> DifferenceVector {
        DifferenceVector {
            n: self.n,
            entries: self.entries.iter().map(|&(i, v)| (i, -v)).collect(),
        }
    }

    /// Representative of the `{v, -v}` pair: first entry positive.
    pub fn sign_canonical(&self) -> DifferenceVector {
        if self.entries[0].1 > 0 {
            self.clone()
        } else {
            self.negated()
        }
    }

    /// `(#{|v_i| > t}, #{0 < |v_i| <= t})`.
    pub fn magnitude_counts(&self, t: i32) -> (usize, usize) {
        let over = self.entries.iter().filter(|&&(_, v)| v.abs() > t).count();
        (over, self.entries.len() - over)
    }

    /// Whether the vector is realizable as `b1 - b2` with `b1, b2 ∈ ℬ_K`:
    /// entries exceeding `t` force both operands nonzero at that index, the
    /// remaining support splits between the two sides, so the condition is
    /// `2·#{|v_i| > t} + #{0 < |v_i| <= t} <= 2K` (validated against the
    /// pair-enumeration oracle in the tests).
    pub fn is_feasible(&self, k: usize, t: i32) -> bool {
        if self.entries.iter().any(|&(_, v)| v.abs() > 2 * t) {
            return false;
        }
        let (over, small) = self.magnitude_counts(t);
        2 * over + small <= 2 * k
    }

    /// One explicit pair `(b1, b2)` with `b1 - b2 = self`, both in `ℬ_K`.
    pub fn realize(&self, k: usize, t: i32) -> Result<(SparseIntegerVector, SparseIntegerVector), Error> {
        if !self.is_feasible(k, t) {
            return Err(Error::InvalidParameters(format!(
                "difference vector is not realizable within (K={k}, t={t})"
            )));
        }
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        // Entries above t are split across both sides; small entries go to
        // b1 until it is full, then to b2 (negated).
        let (over, _) = self.magnitude_counts(t);
        let mut b1_small_left = k - over;
        for &(i, v) in &self.entries {
            if v.abs() > t {
                // v = s(t + r) with 1 <= r <= t; put s*t on b1, -s*r on b2.
                let s = v.signum();
                b1.push((i, s * t));
                b2.push((i, s * t - v));
            } else if b1_small_left > 0 {
                b1.push((i, v));
                b1_small_left -= 1;
            } else {
                b2.push((i, -v));
            }
        }
        let b1 = SparseIntegerVector::new(self.n, b1)?;
        let b2 = SparseIntegerVector::new(self.n, b2)?;
        debug_assert!(b1.is_within(k, t) && b2.is_within(k, t));
        Ok((b1, b2))
    }
}

/// Entrywise `b1 - b2`; `Ok(None)` is the zero marker for `b1 = b2`.
pub fn difference(
    b1: &SparseIntegerVector,
    b2: &SparseIntegerVector,
) -> Result<Option<DifferenceVector>, Error> {
    if b1.n != b2.n {
        return Err(Error::DimensionMismatch(format!(
            "difference of dimension {} and {}",
            b1.n, b2.n
        )));
    }
    let mut entries = Vec::with_capacity(b1.entries.len() + b2.entries.len());
    let (mut i, mut j) = (0, 0);
    while i < b1.entries.len() || j < b2.entries.len() {
        let a = b1.entries.get(i);
        let b = b2.entries.get(j);
        match (a, b) {
            (Some(&(ia, va)), Some(&(ib, vb))) => {
                use std::cmp::Ordering::*;
                match ia.cmp(&ib) {
                    Less => {
                        entries.push((ia, va));
                        i += 1;
                    }
                    Greater => {
                        entries.push((ib, -vb));
                        j += 1;
                    }
                    Equal => {
                        if va != vb {
                            entries.push((ia, va - vb));
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
            (Some(&(ia, va)), None) => {
                entries.push((ia, va));
                i += 1;
            }
            (None, Some(&(ib, vb))) => {
                entries.push((ib, -vb));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    if entries.is_empty() {
        Ok(None)
    } else {
        Ok(Some(DifferenceVector {
            n: b1.n,
            entries,
        }))
    }
}

/// Per-entry value alphabet in enumeration order: `1, -1, 2, -2, ..., t, -t`.
pub fn value_alphabet(t: i32) -> Vec<i32> {
    let mut a = Vec::with_capacity(2 * t as usize);
    for mag in 1..=t {
        a.push(mag);
        a.push(-mag);
    }
    a
}

/// Value alphabet for nonnegative signals: `1, 2, ..., t`.
pub fn nonneg_value_alphabet(t: i32) -> Vec<i32> {
    (1..=t).collect()
}

/// `Σ_{k=k0}^{K} C(N,k) · s^k` with `s = per_entry`, exact.
fn count_with_per_entry(n: usize, k: usize, per_entry: u64, include_zero: bool) -> BigUint {
    let k0 = usize::from(!include_zero);
    let s = BigUint::from(per_entry);
    let mut total = BigUint::zero();
    let mut s_pow = if k0 == 0 { BigUint::one() } else { s.clone() };
    for kk in k0..=k.min(n) {
        total += binomial(BigUint::from(n), BigUint::from(kk)) * &s_pow;
        s_pow *= &s;
    }
    total
}

/// `|ℬ_K|`, counted exactly: `Σ_k C(N,k)(2t)^k`, `k` from 0 or 1.
///
/// Nonzero entries range over `B_t \ {0}`, hence the `(2t)^k` factor; the
/// `(2t+1)^k` variant (entries ranging over all of `B_t`, which overcounts)
/// is available as [`count_signals_full_alphabet`] for reporting.
pub fn count_signals(n: usize, k: usize, t: i32, include_zero: bool) -> BigUint {
    assert!(k <= n, "count_signals requires K <= N");
    count_with_per_entry(n, k, 2 * t as u64, include_zero)
}

/// `Σ_k C(N,k)(2t+1)^k`, the overcounting variant surfaced in reports.
pub fn count_signals_full_alphabet(n: usize, k: usize, t: i32, include_zero: bool) -> BigUint {
    assert!(k <= n, "count requires K <= N");
    count_with_per_entry(n, k, 2 * t as u64 + 1, include_zero)
}

/// Number of candidates [`FeasibleDifferences`] walks before filtering:
/// `Σ_{k=1}^{min(N,2K)} C(N,k) · (2t) · (4t)^{k-1}` (first support position
/// is sign-canonicalized to the positive half of the alphabet).
pub fn count_difference_candidates(n: usize, k: usize, t: i32) -> BigUint {
    let mut total = BigUint::zero();
    let full = BigUint::from(4 * t as u64);
    let half = BigUint::from(2 * t as u64);
    let mut tail_pow = BigUint::one();
    for kk in 1..=(2 * k).min(n) {
        total += binomial(BigUint::from(n), BigUint::from(kk)) * &half * &tail_pow;
        tail_pow *= &full;
    }
    total
}

fn check_budget(what: &'static str, needed: &BigUint, cap: u64) -> Result<(), Error> {
    if needed > &BigUint::from(cap) {
        return Err(Error::BudgetExceeded {
            what,
            needed: needed.to_string(),
            cap,
        });
    }
    Ok(())
}

/// Combinations of `[0, n)` of a fixed size in colexicographic order.
#[derive(Debug, Clone)]
struct ColexSupports {
    n: usize,
    current: Option<Vec<usize>>,
}

impl ColexSupports {
    fn new(n: usize, k: usize) -> Self {
        let current = if k <= n {
            Some((0..k).collect())
        } else {
            None
        };
        ColexSupports { n, current }
    }

    fn advance(&mut self) {
        let Some(c) = self.current.as_mut() else {
            return;
        };
        let k = c.len();
        for i in 0..k {
            let limit = if i + 1 < k { c[i + 1] } else { self.n };
            if c[i] + 1 < limit {
                c[i] += 1;
                for (j, slot) in c.iter_mut().enumerate().take(i) {
                    *slot = j;
                }
                return;
            }
        }
        self.current = None;
    }
}

/// Streaming enumeration of `ℬ_K` in the fixed order described in the
/// module docs. Restartable and cheap to clone.
#[derive(Debug, Clone)]
pub struct SignalEnumerator {
    n: usize,
    k_max: usize,
    alphabet: Vec<i32>,
    k: usize,
    supports: ColexSupports,
    digits: Vec<usize>,
    done: bool,
}

impl SignalEnumerator {
    fn with_alphabet(n: usize, k_max: usize, alphabet: Vec<i32>) -> Self {
        SignalEnumerator {
            n,
            k_max: k_max.min(n),
            alphabet,
            k: 0,
            supports: ColexSupports::new(n, 0),
            digits: Vec::new(),
            done: false,
        }
    }

    /// Advance the value odometer; on wrap, advance the support, then the
    /// support size. Returns false when the whole ball is exhausted.
    fn step(&mut self) -> bool {
        for pos in (0..self.digits.len()).rev() {
            if self.digits[pos] + 1 < self.alphabet.len() {
                self.digits[pos] += 1;
                for d in self.digits[pos + 1..].iter_mut() {
                    *d = 0;
                }
                return true;
            }
        }
        self.supports.advance();
        if self.supports.current.is_some() {
            self.digits.iter_mut().for_each(|d| *d = 0);
            return true;
        }
        while self.k < self.k_max {
            self.k += 1;
            self.supports = ColexSupports::new(self.n, self.k);
            if self.supports.current.is_some() {
                self.digits = vec![0; self.k];
                return true;
            }
        }
        false
    }
}

impl Iterator for SignalEnumerator {
    type Item = SparseIntegerVector;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let support = self.supports.current.as_ref()?;
        let entries = support
            .iter()
            .zip(&self.digits)
            .map(|(&i, &d)| (i, self.alphabet[d]))
            .collect();
        let item = SparseIntegerVector {
            n: self.n,
            entries,
        };
        if !self.step() {
            self.done = true;
        }
        Some(item)
    }
}

/// Enumerate every `b ∈ ℬ_K` (including zero) exactly once.
///
/// Errors with [`Error::BudgetExceeded`] if `|ℬ_K|` exceeds `cap`.
pub fn enumerate_signals(
    n: usize,
    k: usize,
    t: i32,
    cap: u64,
) -> Result<SignalEnumerator, Error> {
    if k > n {
        return Err(Error::InvalidParameters(format!(
            "enumerate_signals requires K <= N (got K={k}, N={n})"
        )));
    }
    check_budget("signal enumeration", &count_signals(n, k, t, true), cap)?;
    Ok(SignalEnumerator::with_alphabet(n, k, value_alphabet(t)))
}

/// Like [`enumerate_signals`] but with nonzero values restricted to
/// `[1, t]` (nonnegative signals).
pub fn enumerate_nonneg_signals(
    n: usize,
    k: usize,
    t: i32,
    cap: u64,
) -> Result<SignalEnumerator, Error> {
    if k > n {
        return Err(Error::InvalidParameters(format!(
            "enumerate_nonneg_signals requires K <= N (got K={k}, N={n})"
        )));
    }
    let needed = count_with_per_entry(n, k, t as u64, true);
    check_budget("signal enumeration", &needed, cap)?;
    Ok(SignalEnumerator::with_alphabet(n, k, nonneg_value_alphabet(t)))
}

/// Streaming enumeration of the feasible difference set, one representative
/// per `{v, -v}` pair (first entry restricted to positive values).
#[derive(Debug, Clone)]
pub struct FeasibleDifferences {
    n: usize,
    k: usize,
    t: i32,
    head_alphabet: Vec<i32>,
    tail_alphabet: Vec<i32>,
    size: usize,
    size_max: usize,
    supports: ColexSupports,
    digits: Vec<usize>,
    exhausted: bool,
}

impl FeasibleDifferences {
    fn current_candidate(&self) -> Option<DifferenceVector> {
        let support = self.supports.current.as_ref()?;
        let entries = support
            .iter()
            .zip(&self.digits)
            .enumerate()
            .map(|(pos, (&i, &d))| {
                let v = if pos == 0 {
                    self.head_alphabet[d]
                } else {
                    self.tail_alphabet[d]
                };
                (i, v)
            })
            .collect();
        Some(DifferenceVector {
            n: self.n,
            entries,
        })
    }

    fn step(&mut self) -> bool {
        for pos in (0..self.digits.len()).rev() {
            let len = if pos == 0 {
                self.head_alphabet.len()
            } else {
                self.tail_alphabet.len()
            };
            if self.digits[pos] + 1 < len {
                self.digits[pos] += 1;
                for d in self.digits[pos + 1..].iter_mut() {
                    *d = 0;
                }
                return true;
            }
        }
        self.supports.advance();
        if self.supports.current.is_some() {
            self.digits.iter_mut().for_each(|d| *d = 0);
            return true;
        }
        while self.size < self.size_max {
            self.size += 1;
            self.supports = ColexSupports::new(self.n, self.size);
            if self.supports.current.is_some() {
                self.digits = vec![0; self.size];
                return true;
            }
        }
        false
    }
}

impl Iterator for FeasibleDifferences {
    type Item = DifferenceVector;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.exhausted {
                return None;
            }
            let candidate = self.current_candidate();
            if !self.step() {
                self.exhausted = true;
            }
            match candidate {
                Some(v) if v.is_feasible(self.k, self.t) => return Some(v),
                Some(_) => continue,
                None => return None,
            }
        }
    }
}

/// Enumerate every realizable nonzero difference of two `ℬ_K` signals, up
/// to sign. Yields are exactly the vectors with entries in
/// `[-2t, 2t] \ {0}` that pass [`DifferenceVector::is_feasible`].
pub fn enumerate_feasible_differences(
    n: usize,
    k: usize,
    t: i32,
    cap: u64,
) -> Result<FeasibleDifferences, Error> {
    if k > n {
        return Err(Error::InvalidParameters(format!(
            "enumerate_feasible_differences requires K <= N (got K={k}, N={n})"
        )));
    }
    check_budget(
        "difference enumeration",
        &count_difference_candidates(n, k, t),
        cap,
    )?;
    let size_max = (2 * k).min(n);
    Ok(FeasibleDifferences {
        n,
        k,
        t,
        head_alphabet: (1..=2 * t).collect(),
        tail_alphabet: value_alphabet(2 * t),
        size: 1,
        supports: ColexSupports::new(n, 1),
        digits: vec![0],
        size_max,
        exhausted: false,
    })
}

/// Compare two sparse vectors by their position in the fixed enumeration
/// order (support size, then support colex, then value odometer rank).
pub fn enumeration_order(
    a: &SparseIntegerVector,
    b: &SparseIntegerVector,
    alphabet: &[i32],
) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let by_size = a.support_size().cmp(&b.support_size());
    if by_size != Ordering::Equal {
        return by_size;
    }
    // Colex: compare largest support elements first.
    for (&(ia, _), &(ib, _)) in a.entries.iter().rev().zip(b.entries.iter().rev()) {
        let c = ia.cmp(&ib);
        if c != Ordering::Equal {
            return c;
        }
    }
    // Same support: first position is the most significant odometer wheel.
    let rank = |v: i32| {
        alphabet
            .iter()
            .position(|&x| x == v)
            .expect("value outside enumeration alphabet")
    };
    for (&(_, va), &(_, vb)) in a.entries.iter().zip(b.entries.iter()) {
        let c = rank(va).cmp(&rank(vb));
        if c != Ordering::Equal {
            return c;
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn vecs(it: impl Iterator<Item = SparseIntegerVector>) -> Vec<SparseIntegerVector> {
        it.collect()
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_signals(2, 1, 1, true), BigUint::from(5u32));
        assert_eq!(count_signals(2, 1, 1, false), BigUint::from(4u32));
        assert_eq!(count_signals(3, 2, 1, false), BigUint::from(18u32));
        assert_eq!(count_signals(2, 2, 2, true), BigUint::from(25u32));
    }

    #[test]
    fn count_matches_enumeration_everywhere_small() {
        for n in 1..=6usize {
            for k in 1..=3usize.min(n) {
                for t in 1..=2 {
                    let count = count_signals(n, k, t, true).to_u64().unwrap();
                    let listed = enumerate_signals(n, k, t, 1 << 20).unwrap().count() as u64;
                    assert_eq!(count, listed, "n={n} k={k} t={t}");
                }
            }
        }
    }

    #[test]
    fn enumeration_order_is_fixed_for_tiny_ball() {
        let got = vecs(enumerate_signals(1, 1, 1, 100).unwrap());
        let want: Vec<SparseIntegerVector> = vec![
            SparseIntegerVector::zero(1),
            SparseIntegerVector::new(1, vec![(0, 1)]).unwrap(),
            SparseIntegerVector::new(1, vec![(0, -1)]).unwrap(),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn enumeration_yields_five_for_n2_k1_t1() {
        let got = vecs(enumerate_signals(2, 1, 1, 100).unwrap());
        assert_eq!(got.len(), 5);
        let set: BTreeSet<_> = got.iter().cloned().collect();
        assert_eq!(set.len(), 5, "no duplicates");
        assert!(got.iter().all(|b| b.is_within(1, 1)));
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let err = enumerate_signals(6, 3, 2, 10).unwrap_err();
        match err {
            Error::BudgetExceeded { cap, .. } => assert_eq!(cap, 10),
            other => panic!("expected budget error, got {other}"),
        }
    }

    #[test]
    fn difference_examples() {
        let t = 3;
        let b1 = SparseIntegerVector::new(4, vec![(0, t)]).unwrap();
        let b2 = SparseIntegerVector::new(4, vec![(0, -t)]).unwrap();
        let v = difference(&b1, &b2).unwrap().unwrap();
        assert_eq!(v.entries, vec![(0, 2 * t)]);

        assert!(difference(&b1, &b1).unwrap().is_none());

        let b1 = SparseIntegerVector::new(2, vec![(0, 1)]).unwrap();
        let b2 = SparseIntegerVector::new(2, vec![(1, 1)]).unwrap();
        let v = difference(&b1, &b2).unwrap().unwrap();
        assert_eq!(v.entries, vec![(0, 1), (1, -1)]);
        assert!(v.is_feasible(1, 1));

        let short = SparseIntegerVector::zero(3);
        assert!(matches!(
            difference(&b1, &short),
            Err(Error::DimensionMismatch(_))
        ));
    }

    /// Oracle: the sign-reduced set of pairwise differences of `ℬ_K`.
    fn pairwise_difference_set(n: usize, k: usize, t: i32) -> BTreeSet<DifferenceVector> {
        let ball = vecs(enumerate_signals(n, k, t, 1 << 20).unwrap());
        let mut set = BTreeSet::new();
        for b1 in &ball {
            for b2 in &ball {
                if let Some(v) = difference(b1, b2).unwrap() {
                    set.insert(v.sign_canonical());
                }
            }
        }
        set
    }

    #[test]
    fn feasible_differences_match_pair_oracle() {
        for n in 1..=4usize {
            for k in 1..=2usize.min(n) {
                for t in 1..=2 {
                    let oracle = pairwise_difference_set(n, k, t);
                    let listed: Vec<_> = enumerate_feasible_differences(n, k, t, 1 << 22)
                        .unwrap()
                        .collect();
                    let set: BTreeSet<_> = listed.iter().cloned().collect();
                    assert_eq!(set.len(), listed.len(), "duplicates at n={n} k={k} t={t}");
                    assert_eq!(set, oracle, "mismatch at n={n} k={k} t={t}");
                }
            }
        }
    }

    #[test]
    fn feasible_differences_tiny_case() {
        let got: Vec<_> = enumerate_feasible_differences(1, 1, 1, 100)
            .unwrap()
            .collect();
        let want = vec![
            DifferenceVector::new(1, vec![(0, 1)]).unwrap(),
            DifferenceVector::new(1, vec![(0, 2)]).unwrap(),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn infeasible_candidate_is_not_yielded() {
        // 2t at one index plus 1 at another needs support 3 > 2K for K=1.
        let v = DifferenceVector::new(2, vec![(0, 2), (1, 1)]).unwrap();
        assert!(!v.is_feasible(1, 1));
        let all: Vec<_> = enumerate_feasible_differences(2, 1, 1, 1000)
            .unwrap()
            .collect();
        assert!(!all.contains(&v));
        // It is realizable once K=2.
        assert!(v.is_feasible(2, 1));
    }

    #[test]
    fn double_extreme_is_yielded_for_k2() {
        let v = DifferenceVector::new(2, vec![(0, 2), (1, 2)]).unwrap();
        let all: Vec<_> = enumerate_feasible_differences(2, 2, 1, 1000)
            .unwrap()
            .collect();
        assert!(all.contains(&v));
        let (b1, b2) = v.realize(2, 1).unwrap();
        assert_eq!(difference(&b1, &b2).unwrap().unwrap(), v);
    }

    #[test]
    fn no_sign_pair_is_yielded_twice() {
        for (n, k, t) in [(3, 1, 1), (3, 2, 2), (4, 2, 1)] {
            let listed: Vec<_> = enumerate_feasible_differences(n, k, t, 1 << 22)
                .unwrap()
                .collect();
            let set: BTreeSet<_> = listed.iter().cloned().collect();
            for v in &listed {
                assert!(!set.contains(&v.negated()), "{v:?} and its negation both yielded");
                assert!(v.is_feasible(k, t));
            }
        }
    }

    #[test]
    fn realize_round_trips_every_feasible_difference() {
        for v in enumerate_feasible_differences(4, 2, 2, 1 << 22).unwrap() {
            let (b1, b2) = v.realize(2, 2).unwrap();
            assert!(b1.is_within(2, 2));
            assert!(b2.is_within(2, 2));
            assert_eq!(difference(&b1, &b2).unwrap().unwrap(), v);
        }
    }

    #[test]
    fn sparse_vector_json_shape() {
        let b = SparseIntegerVector::new(5, vec![(3, -2), (0, 1)]).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, r#"{"n":5,"entries":[[0,1],[3,-2]]}"#);
        let back: SparseIntegerVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn comparator_reproduces_the_enumeration_sequence() {
        // Sorting a shuffled ball by the comparator must reconstruct the
        // exact yield order of the enumerator.
        for (n, k, t) in [(4usize, 2usize, 1i32), (3, 3, 2), (5, 2, 2)] {
            let alphabet = value_alphabet(t);
            let in_order: Vec<SparseIntegerVector> =
                enumerate_signals(n, k, t, 1 << 20).unwrap().collect();
            let mut shuffled = in_order.clone();
            shuffled.reverse();
            shuffled.sort_by(|a, b| enumeration_order(a, b, &alphabet));
            assert_eq!(shuffled, in_order, "n={n} k={k} t={t}");
        }
    }

    proptest! {
        #[test]
        fn enumeration_has_no_duplicates_and_respects_bounds(
            n in 1usize..6,
            k in 1usize..4,
            t in 1i32..3,
        ) {
            let k = k.min(n);
            let listed = vecs(enumerate_signals(n, k, t, 1 << 20).unwrap());
            let set: BTreeSet<_> = listed.iter().cloned().collect();
            prop_assert_eq!(set.len(), listed.len());
            for b in &listed {
                prop_assert!(b.is_within(k, t));
            }
            prop_assert_eq!(
                BigUint::from(listed.len() as u64),
                count_signals(n, k, t, true)
            );
        }

        #[test]
        fn difference_of_ball_members_is_always_feasible(
            n in 1usize..5,
            k in 1usize..3,
            t in 1i32..3,
        ) {
            let k = k.min(n);
            let ball = vecs(enumerate_signals(n, k, t, 1 << 20).unwrap());
            for b1 in ball.iter().take(40) {
                for b2 in ball.iter().take(40) {
                    if let Some(v) = difference(b1, b2).unwrap() {
                        prop_assert!(v.is_feasible(k, t));
                    }
                }
            }
        }
    }
}
