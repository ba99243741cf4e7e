//! Executable forms of the packing and rate-exponent bounds.
//!
//! All logarithms are natural. Counting sums are evaluated exactly in
//! big-integer arithmetic when they fit a float, and by compensated
//! log-sum-exp otherwise, so the packing predicates stay monotone over
//! the search ranges the CLI exposes.
//!
//! Lower-bound rate formulas can have a negative parenthesized factor at
//! small `K`; values are reported raw together with a positivity flag
//! rather than clamped, because the statements are asymptotic.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::scalar::{kahan_sum, KahanSum};
use crate::signals::{count_signals, count_signals_full_alphabet};

/// `ln C(n, k)`.
///
/// For small `min(k, n-k)` this is a direct sum of logs; the log-gamma
/// difference loses all precision there once `n` is huge.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if k <= 4096 {
        let mut acc = KahanSum::new();
        for i in 0..k {
            acc.add(((n - i) as f64).ln());
        }
        acc.value() - ln_gamma(k as f64 + 1.0)
    } else {
        ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
    }
}

/// `ln Σ_{k=1}^{K} C(N,k)(2t)^k`, the log of the nonzero signal count.
pub fn ln_signal_count(n: u64, k: u64, t: i32) -> f64 {
    let k = k.min(n);
    // Exact path at desk scale; the count converts to f64 with one
    // rounding.
    if k <= 64 && n <= 1_000_000 {
        let count = count_signals(n as usize, k as usize, t, false);
        if let Some(c) = count.to_f64() {
            if c.is_finite() {
                return c.ln();
            }
        }
    }
    let ln_2t = (2.0 * t as f64).ln();
    let terms: Vec<f64> = (1..=k)
        .map(|kk| ln_binomial(n, kk) + kk as f64 * ln_2t)
        .collect();
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + kahan_sum(terms.iter().map(|&x| (x - max).exp())).ln()
}

/// Both sides of the packing inequality, in log domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub feasible: bool,
    pub log_lhs: f64,
    pub log_rhs: f64,
}

/// Classic packing: `Σ_{k=1}^K C(N,k)(2t)^k <= ((tK + d/2)/(d/2))^m`.
pub fn sphere_packing_report(n: usize, m: usize, k: usize, d: f64, t: i32) -> PackingReport {
    assert!(d > 0.0, "packing bound requires d > 0");
    let log_lhs = ln_signal_count(n as u64, k as u64, t);
    let log_rhs = m as f64 * (1.0 + 2.0 * t as f64 * k as f64 / d).ln();
    PackingReport {
        feasible: log_lhs <= log_rhs,
        log_lhs,
        log_rhs,
    }
}

pub fn sphere_packing_feasible(n: usize, m: usize, k: usize, d: f64, t: i32) -> bool {
    sphere_packing_report(n, m, k, d, t).feasible
}

/// Largest `N` passing the packing bound; capped at `2^63` with a flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxCodebookSize {
    pub max_n: u64,
    pub capped: bool,
}

pub fn max_n_sphere_packing(m: usize, k: usize, d: f64, t: i32) -> MaxCodebookSize {
    assert!(d > 0.0 && d < 1.0, "requires d in (0, 1)");
    const CAP: u64 = 1 << 63;
    let feasible = |n: u64| {
        let log_lhs = ln_signal_count(n, k as u64, t);
        let log_rhs = m as f64 * (1.0 + 2.0 * t as f64 * k as f64 / d).ln();
        log_lhs <= log_rhs
    };
    if !feasible(1) {
        return MaxCodebookSize {
            max_n: 0,
            capped: false,
        };
    }
    if feasible(CAP) {
        return MaxCodebookSize {
            max_n: CAP,
            capped: true,
        };
    }
    // Exponential bracket, then binary search on the monotone predicate.
    let mut lo = 1u64;
    let mut hi = 2u64;
    while feasible(hi) {
        lo = hi;
        hi = (hi * 2).min(CAP);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    MaxCodebookSize {
        max_n: lo,
        capped: false,
    }
}

/// One rate-exponent bound: the value, its higher-order term, and whether
/// the parenthesized factor `1 + o` is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBound {
    pub value: f64,
    pub o_term: f64,
    pub factor_positive: bool,
}

fn rate(leading: f64, o_term: f64) -> RateBound {
    RateBound {
        value: leading * (1.0 + o_term),
        o_term,
        factor_positive: 1.0 + o_term > 0.0,
    }
}

/// General `l_p` upper bound: `(log K / K)(1 + o)` with
/// `o = log(2t/d + 1/K) / log K`.
pub fn rate_ub_lp(k: u64, d: f64, t: i32) -> RateBound {
    assert!(k >= 2 && d > 0.0 && d < 1.0 && t >= 1);
    let ln_k = (k as f64).ln();
    let o = (2.0 * t as f64 / d + 1.0 / k as f64).ln() / ln_k;
    rate(ln_k / k as f64, o)
}

/// Euclidean upper bound with the Markov radius argument at a chosen
/// `lambda > 1`: `(log K / 2K)(1 + o)` with
/// `o = (2/log K)·log(λ(t+1)/d + 1/√K)`.
pub fn rate_ub_l2_lambda(k: u64, d: f64, t: i32, lambda: f64) -> RateBound {
    assert!(k >= 2 && d > 0.0 && d < 1.0 && t >= 1 && lambda > 1.0);
    let ln_k = (k as f64).ln();
    let o = 2.0 / ln_k * (lambda * (t as f64 + 1.0) / d + 1.0 / (k as f64).sqrt()).ln();
    rate(ln_k / (2.0 * k as f64), o)
}

/// Euclidean upper bound at the default `λ = 2`.
pub fn rate_ub_l2(k: u64, d: f64, t: i32) -> RateBound {
    rate_ub_l2_lambda(k, d, t, 2.0)
}

/// WESC lower bound: `(log K / 4K)(1 + (log 2 - 1)/log K)`.
pub fn rate_lb_wesc(k: u64) -> RateBound {
    assert!(k >= 2);
    let ln_k = (k as f64).ln();
    let o = (std::f64::consts::LN_2 - 1.0) / ln_k;
    rate(ln_k / (4.0 * k as f64), o)
}

/// `l1`-WSC lower bound: `(log K / 4K)(1 + (2/log K)(log π - 1 - log 2))`.
pub fn rate_lb_l1(k: u64) -> RateBound {
    assert!(k >= 2);
    let ln_k = (k as f64).ln();
    let o = 2.0 / ln_k * (std::f64::consts::PI.ln() - 1.0 - std::f64::consts::LN_2);
    rate(ln_k / (4.0 * k as f64), o)
}

/// The `δ`-dependent form of the `l1` lower bound:
/// `o_δ = (2/log K)(log(π/(2δ)) - 1)`.
pub fn rate_lb_l1_delta(k: u64, delta: f64) -> RateBound {
    assert!(k >= 2 && delta > 0.0);
    let ln_k = (k as f64).ln();
    let o = 2.0 / ln_k * ((std::f64::consts::PI / (2.0 * delta)).ln() - 1.0);
    rate(ln_k / (4.0 * k as f64), o)
}

fn rate_lb_ngl1_with_coeff(k: u64, t: i32, coeff: f64) -> RateBound {
    assert!(k >= 2 && t >= 1);
    let ln_k = (k as f64).ln();
    let ln_2k = (2.0 * k as f64).ln();
    let inner = 1.0 + ln_2k / 4.0 + coeff * (t as f64).powi(3);
    let o = -(2.0 + 2.0 * inner.ln()) / ln_2k;
    rate(ln_k / (4.0 * k as f64), o)
}

/// Nonnegative `l1`-WSC lower bound (normalized-superposition form):
/// `o_t = -(2 + 2·log(1 + log(2K)/4 + 648 t³)) / log(2K)`.
///
/// The factor `1 + o_t` is negative until `K` is large (it needs
/// `t = o(K^{1/3})`); see [`ngl1_positive_crossover`].
pub fn rate_lb_ngl1(k: u64, t: i32) -> RateBound {
    rate_lb_ngl1_with_coeff(k, t, 648.0)
}

/// The raw-superposition variant of the nonnegative bound, with `24 t³`
/// in place of `648 t³`.
pub fn rate_lb_ngl1_base(k: u64, t: i32) -> RateBound {
    rate_lb_ngl1_with_coeff(k, t, 24.0)
}

/// Smallest `K` at which the nonnegative lower bound's factor `1 + o_t`
/// turns positive, or `None` if it stays negative up to `2^40`.
pub fn ngl1_positive_crossover(t: i32) -> Option<u64> {
    let positive = |k: u64| rate_lb_ngl1(k, t).factor_positive;
    let mut hi = 4u64;
    while !positive(hi) {
        if hi >= 1 << 40 {
            return None;
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if positive(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Reference interval for ESCs (binary weights): `(log K/4K, log K/2K)`.
pub fn esc_reference_bounds(k: u64) -> (f64, f64) {
    assert!(k >= 2);
    let ln_k = (k as f64).ln();
    (ln_k / (4.0 * k as f64), ln_k / (2.0 * k as f64))
}

/// `E[ξ²]` for `ξ = ‖Cb‖₂`, `b` uniform on `ℬ_K \ {0}`, exact:
/// the cross terms cancel for any unit-`l2`-column codebook, leaving
/// `Σ_k C(N,k)(2t)^k · k(t+1)(2t+1)/6  /  Σ_k C(N,k)(2t)^k`.
pub fn expected_xi_squared(n: usize, k: usize, t: i32) -> Ratio<BigUint> {
    assert!(k <= n, "requires K <= N");
    let two_t = BigUint::from(2 * t as u64);
    let mut numerator = BigUint::zero();
    let mut pow = two_t.clone();
    let weight = BigUint::from((t as u64 + 1) * (2 * t as u64 + 1));
    for kk in 1..=k {
        numerator += num_integer::binomial(BigUint::from(n), BigUint::from(kk))
            * &pow
            * BigUint::from(kk as u64)
            * &weight;
        pow *= &two_t;
    }
    let denominator = BigUint::from(6u32) * count_signals(n, k, t, false);
    Ratio::new(numerator, denominator)
}

/// The closed-form cap `μ² = E[ξ²] <= (K/3)(t+1)²`.
pub fn mu_squared_upper(k: usize, t: i32) -> f64 {
    k as f64 / 3.0 * (t as f64 + 1.0) * (t as f64 + 1.0)
}

/// Improved Euclidean packing at radius `λμ`, `μ = √E[ξ²]`:
/// `(1 - 1/λ)·|ℬ_K \ {0}| <= ((λμ + d/2)/(d/2))^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprovedPackingReport {
    pub feasible: bool,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub mu: f64,
}

pub fn improved_packing_report(
    n: usize,
    m: usize,
    k: usize,
    d: f64,
    t: i32,
    lambda: f64,
) -> ImprovedPackingReport {
    assert!(lambda > 1.0, "requires lambda > 1");
    assert!(d > 0.0, "requires d > 0");
    let mu = ratio_to_f64(&expected_xi_squared(n, k, t)).sqrt();
    let log_lhs = (1.0 - 1.0 / lambda).ln() + ln_signal_count(n as u64, k as u64, t);
    let log_rhs = m as f64 * ((lambda * mu + d / 2.0) / (d / 2.0)).ln();
    ImprovedPackingReport {
        feasible: log_lhs <= log_rhs,
        log_lhs,
        log_rhs,
        mu,
    }
}

pub fn improved_packing_feasible(n: usize, m: usize, k: usize, d: f64, t: i32, lambda: f64) -> bool {
    improved_packing_report(n, m, k, d, t, lambda).feasible
}

/// Lossy conversion of an exact nonnegative ratio to `f64`.
pub fn ratio_to_f64(r: &Ratio<BigUint>) -> f64 {
    // Scale down in tandem when the parts overflow f64.
    let (mut num, mut den) = (r.numer().clone(), r.denom().clone());
    loop {
        match (num.to_f64(), den.to_f64()) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b > 0.0 => return a / b,
            _ => {
                num >>= 32;
                den >>= 32;
                if den.is_zero() {
                    return f64::INFINITY;
                }
            }
        }
    }
}

/// Every bound for one parameter point, flattened for JSON output.
///
/// The `o_*` keys name the higher-order term of each bound; packing
/// entries appear only when `n` (and `m`) are supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub k: u64,
    pub d: f64,
    pub t: i32,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    pub rate_ub_lp: f64,
    #[serde(rename = "o_ub_WSCs")]
    pub o_ub_wscs: f64,
    pub rate_ub_l2: f64,
    #[serde(rename = "o_ub_WESC")]
    pub o_ub_wesc: f64,
    pub rate_lb_wesc: f64,
    #[serde(rename = "o_lb_WESC")]
    pub o_lb_wesc: f64,
    pub rate_lb_l1: f64,
    #[serde(rename = "o_lb_L1WSC_1")]
    pub o_lb_l1wsc_1: f64,
    #[serde(rename = "o_lb_L1WSC_2")]
    pub o_lb_l1wsc_2: f64,
    pub rate_lb_ngl1: f64,
    #[serde(rename = "o_lb_ngL1WSC_1")]
    pub o_lb_ngl1wsc_1: f64,
    #[serde(rename = "o_lb_ngL1WSC_2")]
    pub o_lb_ngl1wsc_2: f64,
    pub ngl1_factor_positive: bool,
    pub esc_reference_lower: f64,
    pub esc_reference_upper: f64,
    pub mu_squared_upper: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_xi_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_xi_squared_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_count_full_alphabet: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sphere_packing_feasible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub improved_packing_feasible: Option<bool>,
    /// Largest codebook size the packing bound admits at (m, K, d, t).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n_packing: Option<MaxCodebookSize>,
}

/// Evaluate every bound at `(K, d, t)`, plus the packing predicates and
/// the exact `E[ξ²]` when `n`/`m` are given.
pub fn bound_summary(
    k: u64,
    d: f64,
    t: i32,
    n: Option<usize>,
    m: Option<usize>,
    lambda: f64,
) -> BoundSummary {
    let ub_lp = rate_ub_lp(k, d, t);
    let ub_l2 = rate_ub_l2_lambda(k, d, t, lambda);
    let lb_wesc = rate_lb_wesc(k);
    let lb_l1 = rate_lb_l1(k);
    let lb_l1_delta = rate_lb_l1_delta(k, d);
    let lb_ngl1 = rate_lb_ngl1(k, t);
    let lb_ngl1_base = rate_lb_ngl1_base(k, t);
    let (esc_lo, esc_hi) = esc_reference_bounds(k);

    let small_enough = |n: usize| k as usize <= n;
    let xi = n.filter(|&n| small_enough(n)).map(|n| expected_xi_squared(n, k as usize, t));
    let counts = n.filter(|&n| small_enough(n)).map(|n| {
        (
            count_signals(n, k as usize, t, false).to_string(),
            count_signals_full_alphabet(n, k as usize, t, false).to_string(),
        )
    });

    BoundSummary {
        k,
        d,
        t,
        lambda,
        n: n.map(|v| v as u64),
        m: m.map(|v| v as u64),
        rate_ub_lp: ub_lp.value,
        o_ub_wscs: ub_lp.o_term,
        rate_ub_l2: ub_l2.value,
        o_ub_wesc: ub_l2.o_term,
        rate_lb_wesc: lb_wesc.value,
        o_lb_wesc: lb_wesc.o_term,
        rate_lb_l1: lb_l1.value,
        o_lb_l1wsc_1: lb_l1_delta.o_term,
        o_lb_l1wsc_2: lb_l1.o_term,
        rate_lb_ngl1: lb_ngl1.value,
        o_lb_ngl1wsc_1: lb_ngl1_base.o_term,
        o_lb_ngl1wsc_2: lb_ngl1.o_term,
        ngl1_factor_positive: lb_ngl1.factor_positive,
        esc_reference_lower: esc_lo,
        esc_reference_upper: esc_hi,
        mu_squared_upper: mu_squared_upper(k as usize, t),
        expected_xi_squared: xi.as_ref().map(ratio_to_f64),
        expected_xi_squared_exact: xi.map(|r| r.to_string()),
        signal_count: counts.as_ref().map(|(a, _)| a.clone()),
        signal_count_full_alphabet: counts.map(|(_, b)| b),
        sphere_packing_feasible: n
            .zip(m)
            .map(|(n, m)| sphere_packing_feasible(n, m, k as usize, d, t)),
        improved_packing_feasible: n
            .zip(m)
            .filter(|&(n, _)| small_enough(n))
            .map(|(n, m)| improved_packing_feasible(n, m, k as usize, d, t, lambda)),
        max_n_packing: m.map(|m| max_n_sphere_packing(m, k as usize, d, t)),
    }
}

/// Brute-force `E[ξ²]` oracle: the plain average of `‖Cb‖₂²` over all
/// nonzero `b ∈ ℬ_K`, and the accumulated cross-term total
/// `Σ_b (‖Cb‖₂² - Σ_j b_j²‖v_j‖₂²)`.
pub fn xi_squared_brute_force<F: crate::scalar::Scalar>(
    cb: &crate::codebook::Codebook<F>,
    k: usize,
    t: i32,
    cap: u64,
) -> Result<(f64, f64), crate::error::Error> {
    let n = cb.columns();
    let col_sq: Vec<f64> = (0..n)
        .map(|j| {
            let norm = crate::codebook::vector_norm(cb.column(j), crate::params::NormKind::L2);
            let nf = norm.as_f64();
            nf * nf
        })
        .collect();
    let mut mean = KahanSum::new();
    let mut cross = KahanSum::new();
    let mut count: u64 = 0;
    for b in crate::signals::enumerate_signals(n, k, t, cap)? {
        if b.is_zero() {
            continue;
        }
        let y = cb.superposition(&b.entries);
        let sq = kahan_sum(y.iter().map(|v| {
            let x = v.as_f64();
            x * x
        }));
        let diag = kahan_sum(
            b.entries
                .iter()
                .map(|&(j, w)| (w as f64) * (w as f64) * col_sq[j]),
        );
        mean.add(sq);
        cross.add(sq - diag);
        count += 1;
    }
    Ok((mean.value() / count as f64, cross.value()))
}
