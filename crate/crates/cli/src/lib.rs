//! `wsc`: generation, certification, decoding, bound tabulation, Monte
//! Carlo probes and application simulations for weighted superimposed
//! codes.
//!
//! Results are written as JSON (or the codebook text format) to `--out`,
//! with a short human summary on standard output; without `--out` the
//! result itself goes to standard output. Identical command lines with
//! identical seeds produce byte-identical outputs.
//!
//! Exit codes: 0 success, 1 validation error, 2 budget exceeded,
//! 3 construction failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use wsc_core::bounds::bound_summary;
use wsc_core::codebook::Codebook;
use wsc_core::construct::{construct_with_distance, Family};
use wsc_core::decode::{decode_exhaustive, decode_pruned, DecodeOptions, SearchAlphabet};
use wsc_core::distance::{
    check_distance_at_least, min_distance, min_distance_pairs, ScanBudget,
};
use wsc_core::params::CodeParameters;
use wsc_core::probes;
use wsc_core::scenarios::{simulate_adder, simulate_microarray, AdderChannelConfig, MicroarrayConfig};
use wsc_core::{Error, RngSpec};

#[derive(Parser)]
#[command(name = "wsc", version, about = "Weighted superimposed codes toolkit")]
struct Cli {
    /// Worker thread cap (falls back to WSC_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Root seed for all random streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the result (JSON or codebook format) here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a codebook with a certified minimum distance.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Code family: wesc | l1wsc | ngl1wsc.
        #[arg(long)]
        family: String,
        /// Codeword length.
        #[arg(long)]
        m: usize,
        /// Codebook size.
        #[arg(long)]
        n: usize,
        /// Maximum superposition support.
        #[arg(long)]
        k: usize,
        /// Weight magnitude bound.
        #[arg(long, default_value_t = 1)]
        t: i32,
        /// Required minimum distance, in (0, 1).
        #[arg(long)]
        d: f64,
        /// Rejection-sampling attempt cap.
        #[arg(long, default_value_t = 64)]
        max_attempts: u64,
        /// Cap on candidates any verification scan may evaluate.
        #[arg(long, default_value_t = 4_000_000)]
        max_signals: u64,
    },
    /// Certify the exact minimum distance of a codebook file.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        t: i32,
        /// Check only `min distance >= threshold` (early abort).
        #[arg(long)]
        at_least: Option<f64>,
        /// Use the literal pairwise double loop instead of the
        /// sign-reduced difference scan.
        #[arg(long)]
        pairs: bool,
        #[arg(long, default_value_t = 4_000_000)]
        max_signals: u64,
    },
    /// Decode an observation by exact nearest-superposition search.
    Decode {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        codebook: PathBuf,
        /// JSON request file {"y": [..], "K": k, "t": t}.
        #[arg(long, conflicts_with = "y")]
        request: Option<PathBuf>,
        /// Inline observation, comma-separated reals.
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<i32>,
        /// Restrict the search to nonnegative weights [1, t].
        #[arg(long)]
        nonneg: bool,
        /// Compute the certified radius first and stamp the result.
        #[arg(long)]
        certify: bool,
        /// Use the pruned depth-first search.
        #[arg(long)]
        pruned: bool,
        #[arg(long, default_value_t = 4_000_000)]
        max_signals: u64,
    },
    /// Evaluate every rate and packing bound at one parameter point.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 1)]
        t: i32,
        /// Codebook size for the packing predicates and exact E[ξ²].
        #[arg(long)]
        n: Option<usize>,
        /// Codeword length for the packing predicates.
        #[arg(long)]
        m: Option<usize>,
        /// Markov radius multiplier for the Euclidean bound.
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
    },
    /// Run one Monte Carlo probe.
    Probe {
        #[command(flatten)]
        common: Common,
        /// chi-square-tail | l2-superposition | l1-column |
        /// l1-superposition | ngl1-mgf | berry-esseen | subgaussian-shift
        #[arg(long)]
        name: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1)]
        t: i32,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Run an end-to-end application simulation.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// adder | microarray
        #[arg(long)]
        scenario: String,
        /// JSON config file; overrides the inline flags.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1)]
        t: i32,
        /// Noise level; repeat for a sweep.
        #[arg(long = "sigma")]
        sigmas: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// Target certified distance for the constructed codebook.
        #[arg(long)]
        d: Option<f64>,
        /// Decode over the full signed alphabet even for nonnegative
        /// signals (microarray only).
        #[arg(long)]
        unrestricted: bool,
        #[arg(long, default_value_t = 64)]
        max_attempts: u64,
        #[arg(long, default_value_t = 4_000_000)]
        max_signals: u64,
    },
}

/// Parse and execute; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version through the error path too.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var("WSC_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Emit the result: to `--out` when given (summary on stdout), else the
/// result itself on stdout.
fn emit(common: &Common, payload: &str, summary: &str) -> Result<(), Error> {
    match &common.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(payload.as_bytes())?;
            if !payload.ends_with('\n') {
                f.write_all(b"\n")?;
            }
            println!("{summary}");
            println!("result written to {}", path.display());
        }
        None => println!("{payload}"),
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

#[derive(serde::Serialize, serde::Deserialize)]
struct DecodeRequest {
    y: Vec<f64>,
    #[serde(rename = "K")]
    k: usize,
    t: i32,
}

fn dispatch(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Gen {
            common,
            family,
            m,
            n,
            k,
            t,
            d,
            max_attempts,
            max_signals,
        } => {
            let family: Family = family.parse()?;
            let p = CodeParameters {
                n,
                m,
                k,
                d,
                t,
                norm: family.norm(),
                nonneg: family.nonneg(),
            };
            let budget = ScanBudget::new(max_signals);
            let (cb, attempts) =
                construct_with_distance::<f64>(&p, &RngSpec::new(common.seed), max_attempts, &budget)?;
            let mut payload = Vec::new();
            cb.write_to(&mut payload)?;
            let payload = String::from_utf8(payload).expect("codebook text is ASCII");
            emit(
                &common,
                &payload,
                &format!(
                    "generated {} codebook m={m} n={n} with certified distance >= {d} \
                     (attempt {attempts} of {max_attempts}, seed {})",
                    family.label(),
                    common.seed
                ),
            )
        }
        Command::Verify {
            common,
            codebook,
            k,
            t,
            at_least,
            pairs,
            max_signals,
        } => {
            let cb = Codebook::<f64>::read_file(&codebook)?;
            let budget = ScanBudget::new(max_signals);
            match at_least {
                Some(d) => {
                    let check = check_distance_at_least(&cb, k, t, d, &budget)?;
                    let payload = to_json(&serde_json::json!({
                        "threshold": d,
                        "ok": check.ok,
                        "counterexample": check.counterexample.as_ref().map(|(v, norm)| {
                            serde_json::json!({"witness": v, "norm": norm})
                        }),
                        "examined": check.examined.to_string(),
                    }));
                    let verdict = if check.ok { "holds" } else { "fails" };
                    emit(
                        &common,
                        &payload,
                        &format!("distance >= {d} {verdict} (examined {})", check.examined),
                    )
                }
                None => {
                    let cert = if pairs {
                        min_distance_pairs(&cb, k, t, &budget)?
                    } else {
                        min_distance(&cb, k, t, &budget)?
                    };
                    let payload = to_json(&cert);
                    emit(
                        &common,
                        &payload,
                        &format!(
                            "min distance {} ({}, witness support {}, examined {})",
                            cert.value,
                            cert.norm,
                            cert.witness.support_size(),
                            cert.examined
                        ),
                    )
                }
            }
        }
        Command::Decode {
            common,
            codebook,
            request,
            y,
            k,
            t,
            nonneg,
            certify,
            pruned,
            max_signals,
        } => {
            let cb = Codebook::<f64>::read_file(&codebook)?;
            let req = match (request, y) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path)?;
                    serde_json::from_str::<DecodeRequest>(&text)
                        .map_err(|e| Error::Parse(format!("bad decode request: {e}")))?
                }
                (None, Some(csv)) => {
                    let y = csv
                        .split(',')
                        .map(|s| {
                            s.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::Parse(format!("bad observation value {s:?}")))
                        })
                        .collect::<Result<Vec<f64>, Error>>()?;
                    let k = k.ok_or_else(|| {
                        Error::InvalidParameters("--k is required with --y".to_string())
                    })?;
                    let t = t.ok_or_else(|| {
                        Error::InvalidParameters("--t is required with --y".to_string())
                    })?;
                    DecodeRequest { y, k, t }
                }
                (None, None) => {
                    return Err(Error::InvalidParameters(
                        "decode needs --request or --y".to_string(),
                    ))
                }
            };
            let budget = ScanBudget::new(max_signals);
            let radius = if certify {
                Some(min_distance(&cb, req.k, req.t, &budget)?.value / 2.0)
            } else {
                None
            };
            let opts = DecodeOptions {
                alphabet: if nonneg {
                    SearchAlphabet::Nonnegative
                } else {
                    SearchAlphabet::Symmetric
                },
                certified_radius: radius,
            };
            let result = if pruned {
                decode_pruned(&cb, &req.y, req.k, req.t, &opts, &budget)?
            } else {
                decode_exhaustive(&cb, &req.y, req.k, req.t, &opts, &budget)?
            };
            let payload = to_json(&result);
            emit(
                &common,
                &payload,
                &format!(
                    "estimate {:?} residual {} certified={} examined={}",
                    result.estimate.entries, result.residual, result.certified, result.examined
                ),
            )
        }
        Command::Bounds {
            common,
            k,
            d,
            t,
            n,
            m,
            lambda,
        } => {
            let mut violations = Vec::new();
            if k < 2 {
                violations.push("K >= 2".to_string());
            }
            if !(d > 0.0 && d < 1.0) {
                violations.push(format!("d in (0, 1) (got {d})"));
            }
            if t < 1 {
                violations.push("t >= 1".to_string());
            }
            if lambda <= 1.0 {
                violations.push("lambda > 1".to_string());
            }
            if let Some(n) = n {
                if (k as usize) > n {
                    violations.push(format!("K <= N (got K={k}, N={n})"));
                }
            }
            if !violations.is_empty() {
                return Err(Error::InvalidParameters(violations.join("; ")));
            }
            let summary = bound_summary(k, d, t, n, m, lambda);
            let payload = to_json(&summary);
            emit(
                &common,
                &payload,
                &format!(
                    "K={k} d={d} t={t}: rate_ub_l2={:.6} rate_ub_lp={:.6} rate_lb_wesc={:.6} \
                     rate_lb_l1={:.6} rate_lb_ngl1={:.6}{}",
                    summary.rate_ub_l2,
                    summary.rate_ub_lp,
                    summary.rate_lb_wesc,
                    summary.rate_lb_l1,
                    summary.rate_lb_ngl1,
                    if summary.ngl1_factor_positive {
                        ""
                    } else {
                        " (ngl1 factor negative: vacuous at this K)"
                    }
                ),
            )
        }
        Command::Probe {
            common,
            name,
            m,
            k,
            t,
            delta,
            alpha,
            c,
            trials,
        } => {
            let need = |opt: Option<f64>, flag: &str| {
                opt.ok_or_else(|| {
                    Error::InvalidParameters(format!("probe {name} requires {flag}"))
                })
            };
            let need_usize = |opt: Option<usize>, flag: &str| {
                opt.ok_or_else(|| {
                    Error::InvalidParameters(format!("probe {name} requires {flag}"))
                })
            };
            let report = match name.as_str() {
                "chi-square-tail" => probes::probe_chi_square_tail(
                    need_usize(m, "--m")?,
                    need(delta, "--delta")?,
                    trials,
                    common.seed,
                )?,
                "l2-superposition" => probes::probe_l2_superposition_tail(
                    need_usize(m, "--m")?,
                    need_usize(k, "--k")?,
                    t,
                    need(delta, "--delta")?,
                    trials,
                    common.seed,
                )?,
                "l1-column" => probes::probe_l1_column_tail(
                    need_usize(m, "--m")?,
                    need(delta, "--delta")?,
                    trials,
                    common.seed,
                )?,
                "l1-superposition" => probes::probe_l1_superposition_tail(
                    need_usize(m, "--m")?,
                    need_usize(k, "--k")?,
                    t,
                    need(delta, "--delta")?,
                    trials,
                    common.seed,
                )?,
                "ngl1-mgf" => probes::probe_ngl1_mgf(
                    need_usize(k, "--k")?,
                    t,
                    need(alpha, "--alpha")?,
                    trials,
                    common.seed,
                )?,
                "berry-esseen" => probes::probe_berry_esseen_lemma(
                    need_usize(k, "--k")?,
                    t,
                    need(c, "--c")?,
                    trials,
                    common.seed,
                )?,
                "subgaussian-shift" => probes::probe_subgaussian_shift(trials, common.seed)?,
                other => {
                    return Err(Error::InvalidParameters(format!(
                        "unknown probe {other:?}"
                    )))
                }
            };
            let payload = to_json(&report);
            let verdict = match (report.pass, report.vacuous) {
                (true, true) => "PASS (vacuous bound)",
                (true, false) => "PASS",
                (false, _) => "FAIL",
            };
            emit(
                &common,
                &payload,
                &format!(
                    "{}: empirical {} vs {} bound {} -> {verdict}",
                    report.probe,
                    report.empirical,
                    report.pass_key,
                    report
                        .bounds
                        .get(&report.pass_key)
                        .copied()
                        .unwrap_or(f64::NAN)
                ),
            )
        }
        Command::Simulate {
            common,
            scenario,
            config,
            n,
            m,
            k,
            t,
            sigmas,
            trials,
            d,
            unrestricted,
            max_attempts,
            max_signals,
        } => {
            let stats = match scenario.as_str() {
                "adder" => {
                    let cfg: AdderChannelConfig = match config {
                        Some(path) => {
                            let text = std::fs::read_to_string(path)?;
                            serde_json::from_str(&text)
                                .map_err(|e| Error::Parse(format!("bad adder config: {e}")))?
                        }
                        None => AdderChannelConfig {
                            n: need_flag(n, "--n")?,
                            m: need_flag(m, "--m")?,
                            k: need_flag(k, "--k")?,
                            t,
                            sigmas: if sigmas.is_empty() { vec![0.0] } else { sigmas },
                            trials,
                            seed: common.seed,
                            target_d: need_flag(d, "--d")?,
                            max_attempts,
                            max_signals,
                        },
                    };
                    simulate_adder(&cfg)?
                }
                "microarray" => {
                    let cfg: MicroarrayConfig = match config {
                        Some(path) => {
                            let text = std::fs::read_to_string(path)?;
                            serde_json::from_str(&text)
                                .map_err(|e| Error::Parse(format!("bad microarray config: {e}")))?
                        }
                        None => MicroarrayConfig {
                            n: need_flag(n, "--n")?,
                            m: need_flag(m, "--m")?,
                            k: need_flag(k, "--k")?,
                            t,
                            sigmas: if sigmas.is_empty() { vec![0.0] } else { sigmas },
                            trials,
                            seed: common.seed,
                            target_d: need_flag(d, "--d")?,
                            restrict_nonneg: !unrestricted,
                            max_attempts,
                            max_signals,
                        },
                    };
                    simulate_microarray(&cfg)?
                }
                other => {
                    return Err(Error::InvalidParameters(format!(
                        "unknown scenario {other:?}"
                    )))
                }
            };
            let payload = to_json(&stats);
            let mut summary = format!(
                "{} n={} m={} K={} t={}: certified distance {:.6} (attempt {})",
                stats.scenario,
                stats.n,
                stats.m,
                stats.k,
                stats.t,
                stats.certified_distance,
                stats.construction_attempts
            );
            for row in &stats.rows {
                summary.push_str(&format!(
                    "\n  sigma={:<8} exact={:.4} support={:.4} noise>=radius {:.4} (analytic {:.4})",
                    row.sigma,
                    row.exact_recovery_rate,
                    row.support_recovery_rate,
                    row.noise_exceedance_rate,
                    row.noise_exceedance_analytic
                ));
            }
            emit(&common, &payload, &summary)
        }
    }
}

fn need_flag<T>(opt: Option<T>, flag: &str) -> Result<T, Error> {
    opt.ok_or_else(|| Error::InvalidParameters(format!("{flag} is required without --config")))
}
