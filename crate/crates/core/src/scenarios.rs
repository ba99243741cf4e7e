//! End-to-end simulations of the two motivating applications: the
//! weighted adder channel (active users convey data through integer
//! power levels on their signatures) and compressive-sensing microarrays
//! (sparse nonnegative integer concentrations measured through a
//! nonnegative unit-`l1`-column matrix).
//!
//! Both build a certified codebook, then run seeded noisy decode trials
//! and report recovery statistics per noise level.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::codebook::Codebook;
use crate::construct::construct_with_distance;
use crate::decode::{decode_exhaustive, DecodeOptions, SearchAlphabet};
use crate::distance::{min_distance, ScanBudget};
use crate::error::Error;
use crate::params::{CodeParameters, NormKind};
use crate::rng::RngSpec;
use crate::scalar::kahan_sum;
use crate::signals::SparseIntegerVector;

fn default_max_attempts() -> u64 {
    64
}

fn default_max_signals() -> u64 {
    4_000_000
}

fn default_true() -> bool {
    true
}

/// Adder-channel simulation: up to `k` of `n` users transmit their unit
/// signature scaled by an integer level in `[-t, t] \ {0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdderChannelConfig {
    /// Number of users (codebook size).
    pub n: usize,
    /// Signature length.
    pub m: usize,
    /// Maximum simultaneously active users.
    pub k: usize,
    /// Power-level magnitude bound.
    pub t: i32,
    /// Per-dimension Gaussian noise levels to sweep.
    pub sigmas: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Minimum distance the constructed codebook must certify.
    pub target_d: f64,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u64,
    #[serde(default = "default_max_signals")]
    pub max_signals: u64,
}

/// Microarray simulation: up to `k` of `n` target types present at
/// integer concentration multiples in `[1, t]`, measured through a
/// nonnegative unit-`l1`-column matrix, decoded in `l1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroarrayConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub t: i32,
    pub sigmas: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub target_d: f64,
    /// Restrict the decoder's search to nonnegative signals.
    #[serde(default = "default_true")]
    pub restrict_nonneg: bool,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u64,
    #[serde(default = "default_max_signals")]
    pub max_signals: u64,
}

/// Statistics for one noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub trials: u64,
    /// Fraction of trials with the estimate equal to the transmitted
    /// signal (restricted decode when the scenario restricts).
    pub exact_recovery_rate: f64,
    pub support_recovery_rate: f64,
    /// Paired unrestricted decode, when the primary decode is restricted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_recovery_rate_unrestricted: Option<f64>,
    /// Fraction of trials whose noise norm reached the certified radius.
    pub noise_exceedance_rate: f64,
    /// Analytic counterpart: exact chi tail for `l2` noise, central-limit
    /// approximation for `l1` noise.
    pub noise_exceedance_analytic: f64,
    /// Noise norm relative to the certified radius.
    pub mean_noise_ratio: f64,
    pub max_noise_ratio: f64,
}

/// Output of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioStats {
    pub scenario: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub t: i32,
    pub seed: u64,
    pub construction_attempts: u64,
    pub certified_distance: f64,
    pub certified_radius: f64,
    pub rows: Vec<SweepRow>,
}

struct TrialOutcome {
    exact: bool,
    support: bool,
    exact_unrestricted: Option<bool>,
    noise_norm: f64,
}

fn draw_signal(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: usize,
    t: i32,
    nonneg: bool,
) -> SparseIntegerVector {
    let active = rng.random_range(1..=k);
    let mut support = Vec::with_capacity(active);
    while support.len() < active {
        let idx = rng.random_range(0..n);
        if !support.contains(&idx) {
            support.push(idx);
        }
    }
    support.sort_unstable();
    let entries = support
        .into_iter()
        .map(|i| {
            let mag = rng.random_range(1..=t);
            let v = if nonneg || rng.random::<bool>() {
                mag
            } else {
                -mag
            };
            (i, v)
        })
        .collect();
    SparseIntegerVector { n, entries }
}

fn chi_exceedance(m: usize, radius: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let chi = ChiSquared::new(m as f64).expect("m >= 1");
    1.0 - chi.cdf((radius / sigma).powi(2))
}

/// Noise level with `Pr(‖e‖₂ >= radius) = prob` for `e ~ N(0, σ²I_m)`.
pub fn sigma_for_l2_exceedance(m: usize, radius: f64, prob: f64) -> f64 {
    let chi = ChiSquared::new(m as f64).expect("m >= 1");
    radius / chi.inverse_cdf(1.0 - prob).sqrt()
}

/// Central-limit approximation of `Pr(Σ|e_i| >= radius)`.
fn l1_exceedance_approx(m: usize, radius: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let mean = sigma * (2.0 / std::f64::consts::PI).sqrt() * m as f64;
    let sd = sigma * ((1.0 - 2.0 / std::f64::consts::PI) * m as f64).sqrt();
    let z = (radius - mean) / sd;
    0.5 * statrs::function::erf::erfc(z / std::f64::consts::SQRT_2)
}

fn validate_common(
    n: usize,
    m: usize,
    k: usize,
    t: i32,
    sigmas: &[f64],
    trials: u64,
) -> Result<(), Error> {
    let mut violations = Vec::new();
    if n < 1 || m < 1 || k < 1 || t < 1 {
        violations.push("n, m, k, t must be positive".to_string());
    }
    if k > n {
        violations.push(format!("K <= N required (K={k}, N={n})"));
    }
    if sigmas.is_empty() {
        violations.push("at least one noise level required".to_string());
    }
    if sigmas.iter().any(|&s| s.is_nan() || s < 0.0) {
        violations.push("noise levels must be nonnegative".to_string());
    }
    if trials < 1 {
        violations.push("trials must be at least 1".to_string());
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(violations.join("; ")))
    }
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    cb: &Codebook<f64>,
    scenario: &str,
    k: usize,
    t: i32,
    sigmas: &[f64],
    trials: u64,
    seed: u64,
    radius: f64,
    nonneg_signals: bool,
    restrict: bool,
    budget: &ScanBudget,
) -> Result<Vec<SweepRow>, Error> {
    let spec = RngSpec::new(seed);
    let m = cb.rows();
    let n = cb.columns();
    let primary_alphabet = if restrict {
        SearchAlphabet::Nonnegative
    } else {
        SearchAlphabet::Symmetric
    };
    let mut rows = Vec::with_capacity(sigmas.len());
    for (si, &sigma) in sigmas.iter().enumerate() {
        let label = format!("{scenario}/sweep/{si}");
        let outcomes: Vec<Result<TrialOutcome, Error>> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = spec.stream(&label, trial);
                let b = draw_signal(&mut rng, n, k, t, nonneg_signals);
                let clean = cb.superposition(&b.entries);
                let noise: Vec<f64> = (0..m)
                    .map(|_| sigma * <f64 as crate::scalar::Scalar>::standard_normal(&mut rng))
                    .collect();
                let y: Vec<f64> = clean.iter().zip(&noise).map(|(&s, &e)| s + e).collect();
                let noise_norm = match cb.norm_kind() {
                    NormKind::L2 => kahan_sum(noise.iter().map(|x| x * x)).sqrt(),
                    NormKind::L1 => kahan_sum(noise.iter().map(|x| x.abs())),
                };
                let opts = DecodeOptions {
                    alphabet: primary_alphabet,
                    certified_radius: Some(radius),
                };
                let primary = decode_exhaustive(cb, &y, k, t, &opts, budget)?;
                let exact_unrestricted = if restrict {
                    let full = DecodeOptions {
                        alphabet: SearchAlphabet::Symmetric,
                        certified_radius: Some(radius),
                    };
                    Some(decode_exhaustive(cb, &y, k, t, &full, budget)?.estimate == b)
                } else {
                    None
                };
                Ok(TrialOutcome {
                    exact: primary.estimate == b,
                    support: primary.estimate.support().eq(b.support()),
                    exact_unrestricted,
                    noise_norm,
                })
            })
            .collect();
        let mut exact = 0u64;
        let mut support = 0u64;
        let mut exact_unres = 0u64;
        let mut exceed = 0u64;
        let mut ratios = Vec::with_capacity(trials as usize);
        for outcome in outcomes {
            let o = outcome?;
            exact += u64::from(o.exact);
            support += u64::from(o.support);
            exact_unres += u64::from(o.exact_unrestricted.unwrap_or(false));
            exceed += u64::from(o.noise_norm >= radius);
            ratios.push(o.noise_norm / radius);
        }
        let tf = trials as f64;
        let analytic = match cb.norm_kind() {
            NormKind::L2 => chi_exceedance(m, radius, sigma),
            NormKind::L1 => l1_exceedance_approx(m, radius, sigma),
        };
        rows.push(SweepRow {
            sigma,
            trials,
            exact_recovery_rate: exact as f64 / tf,
            support_recovery_rate: support as f64 / tf,
            exact_recovery_rate_unrestricted: restrict.then(|| exact_unres as f64 / tf),
            noise_exceedance_rate: exceed as f64 / tf,
            noise_exceedance_analytic: analytic,
            mean_noise_ratio: kahan_sum(ratios.iter().copied()) / tf,
            max_noise_ratio: ratios.iter().cloned().fold(0.0, f64::max),
        });
    }
    Ok(rows)
}

/// Build a certified WESC and sweep noisy decode trials over the
/// configured noise levels.
pub fn simulate_adder(cfg: &AdderChannelConfig) -> Result<ScenarioStats, Error> {
    validate_common(cfg.n, cfg.m, cfg.k, cfg.t, &cfg.sigmas, cfg.trials)?;
    let p = CodeParameters {
        n: cfg.n,
        m: cfg.m,
        k: cfg.k,
        d: cfg.target_d,
        t: cfg.t,
        norm: NormKind::L2,
        nonneg: false,
    };
    let budget = ScanBudget::new(cfg.max_signals);
    let (cb, attempts) =
        construct_with_distance::<f64>(&p, &RngSpec::new(cfg.seed), cfg.max_attempts, &budget)?;
    let cert = min_distance(&cb, cfg.k, cfg.t, &budget)?;
    let radius = cert.value / 2.0;
    let rows = run_sweep(
        &cb,
        "adder",
        cfg.k,
        cfg.t,
        &cfg.sigmas,
        cfg.trials,
        cfg.seed,
        radius,
        false,
        false,
        &budget,
    )?;
    Ok(ScenarioStats {
        scenario: "adder".to_string(),
        n: cfg.n,
        m: cfg.m,
        k: cfg.k,
        t: cfg.t,
        seed: cfg.seed,
        construction_attempts: attempts,
        certified_distance: cert.value,
        certified_radius: radius,
        rows,
    })
}

/// Build a certified nonnegative `l1`-WSC and sweep noisy decode trials.
pub fn simulate_microarray(cfg: &MicroarrayConfig) -> Result<ScenarioStats, Error> {
    validate_common(cfg.n, cfg.m, cfg.k, cfg.t, &cfg.sigmas, cfg.trials)?;
    let p = CodeParameters {
        n: cfg.n,
        m: cfg.m,
        k: cfg.k,
        d: cfg.target_d,
        t: cfg.t,
        norm: NormKind::L1,
        nonneg: true,
    };
    let budget = ScanBudget::new(cfg.max_signals);
    let (cb, attempts) =
        construct_with_distance::<f64>(&p, &RngSpec::new(cfg.seed), cfg.max_attempts, &budget)?;
    let cert = min_distance(&cb, cfg.k, cfg.t, &budget)?;
    let radius = cert.value / 2.0;
    let rows = run_sweep(
        &cb,
        "microarray",
        cfg.k,
        cfg.t,
        &cfg.sigmas,
        cfg.trials,
        cfg.seed,
        radius,
        true,
        cfg.restrict_nonneg,
        &budget,
    )?;
    Ok(ScenarioStats {
        scenario: "microarray".to_string(),
        n: cfg.n,
        m: cfg.m,
        k: cfg.k,
        t: cfg.t,
        seed: cfg.seed,
        construction_attempts: attempts,
        certified_distance: cert.value,
        certified_radius: radius,
        rows,
    })
}
