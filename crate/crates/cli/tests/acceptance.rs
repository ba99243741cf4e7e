//! Acceptance suite: runs every release criterion end to end and prints
//! one PASS/FAIL line per criterion. Exits nonzero if any fail.
//!
//! Run with `cargo test -p wsc-cli --test acceptance` (plain binary, no
//! libtest harness).

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use wsc_core::bounds::{
    expected_xi_squared, max_n_sphere_packing, mu_squared_upper, rate_lb_l1, rate_lb_wesc,
    rate_ub_l2, rate_ub_lp, ratio_to_f64, sphere_packing_feasible, xi_squared_brute_force,
};
use wsc_core::codebook::Codebook;
use wsc_core::construct::{construct_with_distance, gen_family, Family};
use wsc_core::decode::{decode_exhaustive, decode_pruned, DecodeOptions};
use wsc_core::distance::{min_distance, min_distance_pairs, ScanBudget};
use wsc_core::params::{CodeParameters, NormKind};
use wsc_core::probes::{probe_berry_esseen_lemma, probe_chi_square_tail, probe_l1_column_tail};
use wsc_core::scalar::kahan_sum;
use wsc_core::scenarios::{
    simulate_adder, simulate_microarray, AdderChannelConfig, MicroarrayConfig,
};
use wsc_core::signals::{difference, enumerate_feasible_differences, enumerate_signals};
use wsc_core::{RngSpec, SparseIntegerVector};

fn budget() -> ScanBudget {
    ScanBudget::new(1 << 24)
}

// 1. The sign-reduced difference scan and the literal pairwise double
// loop certify the same minimum, exactly, on 100 random codebooks of
// both norms (N <= 5, K <= 2, t <= 2).
fn distance_oracle_equivalence() {
    let mut counted = 0u32;
    let mut seed = 1000u64;
    'outer: loop {
        for n in 2..=5usize {
            for k in 1..=2usize.min(n) {
                for t in 1..=2i32 {
                    for family in [Family::Wesc, Family::L1Wsc] {
                        seed += 1;
                        let m = 3 + (seed % 4) as usize;
                        let cb = gen_family::<f64>(family, m, n, &RngSpec::new(seed)).unwrap();
                        let fast = min_distance(&cb, k, t, &budget()).unwrap();
                        let slow = min_distance_pairs(&cb, k, t, &budget()).unwrap();
                        assert_eq!(
                            fast.value.to_bits(),
                            slow.value.to_bits(),
                            "routes disagree at n={n} k={k} t={t} {family:?}: {} vs {}",
                            fast.value,
                            slow.value
                        );
                        assert!(fast.check_witness(&cb, 1e-10));
                        assert!(slow.check_witness(&cb, 1e-10));
                        counted += 1;
                        if counted >= 100 {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
}

// 2. The feasibility characterization of the difference set matches the
// pairwise enumeration oracle exactly for all N <= 5, K <= 2, t <= 2.
fn difference_set_characterization() {
    for n in 1..=5usize {
        for k in 1..=2usize.min(n) {
            for t in 1..=2i32 {
                let ball: Vec<SparseIntegerVector> =
                    enumerate_signals(n, k, t, 1 << 22).unwrap().collect();
                let mut oracle = BTreeSet::new();
                for b1 in &ball {
                    for b2 in &ball {
                        if let Some(v) = difference(b1, b2).unwrap() {
                            oracle.insert(v.sign_canonical());
                        }
                    }
                }
                let listed: Vec<_> = enumerate_feasible_differences(n, k, t, 1 << 24)
                    .unwrap()
                    .collect();
                let set: BTreeSet<_> = listed.iter().cloned().collect();
                assert_eq!(set.len(), listed.len(), "duplicate yield at n={n} k={k} t={t}");
                assert_eq!(set, oracle, "set mismatch at n={n} k={k} t={t}");
            }
        }
    }
}

// 3. The closed-form mean squared superposition norm is exact: it
// matches the brute-force average over the nonzero ball to 1e-9
// relative on 50 random unit-l2 codebooks, the accumulated cross terms
// vanish, and the (K/3)(t+1)^2 cap holds on a full small grid.
fn xi_squared_exactness() {
    let mut checked = 0u32;
    let mut seed = 9000u64;
    'outer: loop {
        for n in 2..=6usize {
            for k in 1..=3usize.min(n) {
                for t in 1..=2i32 {
                    seed += 1;
                    let m = 4 + (seed % 4) as usize;
                    let cb = gen_family::<f64>(Family::Wesc, m, n, &RngSpec::new(seed)).unwrap();
                    let (brute, cross) = xi_squared_brute_force(&cb, k, t, 1 << 22).unwrap();
                    let exact = ratio_to_f64(&expected_xi_squared(n, k, t));
                    assert!(
                        (brute - exact).abs() / exact < 1e-9,
                        "n={n} k={k} t={t}: brute {brute} vs exact {exact}"
                    );
                    assert!(cross.abs() < 1e-9, "cross terms {cross} at n={n} k={k} t={t}");
                    checked += 1;
                    if checked >= 50 {
                        break 'outer;
                    }
                }
            }
        }
    }
    for n in 1..=8usize {
        for k in 1..=4usize.min(n) {
            for t in 1..=3i32 {
                let exact = ratio_to_f64(&expected_xi_squared(n, k, t));
                assert!(
                    exact <= mu_squared_upper(k, t) + 1e-12,
                    "cap violated at n={n} k={k} t={t}"
                );
            }
        }
    }
}

// 4. Sphere packing hand cases: (N=2, m=1, K=1, d=0.5, t=1) feasible,
// (N=3, ...) infeasible, and the maximal N at those parameters is 2.
fn sphere_packing_hand_cases() {
    assert!(sphere_packing_feasible(2, 1, 1, 0.5, 1));
    assert!(!sphere_packing_feasible(3, 1, 1, 0.5, 1));
    let r = max_n_sphere_packing(1, 1, 0.5, 1);
    assert_eq!(r.max_n, 2);
    assert!(!r.capped);
}

// 5. Sandwich ordering at t=1, d=0.5 over a geometric K grid in
// [1e2, 1e6]: each family's lower bound sits strictly below its upper
// bound at every grid point.
fn bound_sandwich_sweeps() {
    let grid = [
        100u64, 316, 1_000, 3_162, 10_000, 31_623, 100_000, 316_228, 1_000_000,
    ];
    for &k in &grid {
        let lb_wesc = rate_lb_wesc(k).value;
        let ub_l2 = rate_ub_l2(k, 0.5, 1).value;
        assert!(lb_wesc < ub_l2, "WESC sandwich fails at K={k}: {lb_wesc} !< {ub_l2}");
        let lb_l1 = rate_lb_l1(k).value;
        let ub_lp = rate_ub_lp(k, 0.5, 1).value;
        assert!(lb_l1 < ub_lp, "l1 sandwich fails at K={k}: {lb_l1} !< {ub_lp}");
    }
}

// 6. Bound spot values at K=100, d=0.5, t=1, frozen from independent
// hand evaluation before the build.
fn bound_spot_values() {
    let ub = rate_ub_l2(100, 0.5, 1).value;
    assert!((ub - 0.04394).abs() <= 1e-4, "rate_ub_l2 = {ub}");
    let lb = rate_lb_wesc(100).value;
    assert!((lb - 0.010746).abs() <= 1e-5, "rate_lb_wesc = {lb}");
    let lb1 = rate_lb_l1(100).value;
    assert!((lb1 - 0.008771).abs() <= 1e-5, "rate_lb_l1 = {lb1}");
}

// 7. Chi-square tail probe over m in {50, 64, 200}, delta in
// {0.3, 0.5} at 1e5 trials: empirical within the Chernoff bound plus
// 3 SE everywhere, with the overshooting simplification flagged.
fn chi_square_probe_grid() {
    for m in [50usize, 64, 200] {
        for delta in [0.3f64, 0.5] {
            let r = probe_chi_square_tail(m, delta, 100_000, 7).unwrap();
            assert!(
                r.pass,
                "chi-square probe fails at m={m} delta={delta}: empirical {} vs {}",
                r.empirical, r.bounds["chernoff_two_sided"]
            );
            assert!(
                r.notes.iter().any(|n| n.contains("exp(-m δ²/8)")),
                "missing simplification flag"
            );
            assert!(r.bounds.contains_key("simplified_quarter"));
            assert!(r.bounds.contains_key("simplified_eighth"));
        }
    }
}

// 8. l1 column-norm concentration: tail decreasing along m in
// {25, 50, 100} at delta = 0.3, with fitted decay rate c2 > 0.
fn l1_column_concentration() {
    let r = probe_l1_column_tail(25, 0.3, 100_000, 11).unwrap();
    let p25 = r.details["tail_m25"];
    let p50 = r.details["tail_m50"];
    let p100 = r.details["tail_m100"];
    assert!(
        p25 > p50 && p50 > p100,
        "tails not decreasing: {p25} {p50} {p100}"
    );
    assert!(r.details["c2"] > 0.0, "fitted c2 = {}", r.details["c2"]);
    assert!(r.pass);
}

// 9. Berry-Esseen small-ball probe: informative at k=1e6 (empirical
// within the 0.0202 figure), vacuous and flagged at k=4.
fn berry_esseen_probe() {
    let r = probe_berry_esseen_lemma(1_000_000, 1, 1.0, 10_000, 19).unwrap();
    assert!(!r.vacuous, "bound {} should be informative", r.bounds["berry_esseen"]);
    assert!(
        r.empirical <= 0.0202,
        "empirical {} exceeds 0.0202",
        r.empirical
    );
    assert!(r.pass);

    let small = probe_berry_esseen_lemma(4, 1, 1.0, 10_000, 19).unwrap();
    assert!(small.vacuous, "k=4 bound {} must be vacuous", small.bounds["berry_esseen"]);
    assert!(small.notes.iter().any(|n| n.contains("vacuous")));
}

// 10. Decoder guarantee on a certified WESC (N=8, m=64, K=2, t=1):
// 1000/1000 exact recoveries at noise norm 0.49 x certified distance,
// and an adversarial push 1.01 radii along the distance witness makes
// the decoder fail.
fn decoder_guarantee() {
    let p = CodeParameters {
        n: 8,
        m: 64,
        k: 2,
        d: 0.1,
        t: 1,
        norm: NormKind::L2,
        nonneg: false,
    };
    let (cb, _attempts) =
        construct_with_distance::<f64>(&p, &RngSpec::new(42), 10, &budget()).unwrap();
    let cert = min_distance(&cb, 2, 1, &budget()).unwrap();
    let d_cert = cert.value;
    assert!(d_cert >= 0.1);

    let spec = RngSpec::new(4242);
    let ball: Vec<SparseIntegerVector> = enumerate_signals(8, 2, 1, 1 << 20).unwrap().collect();
    for trial in 0..1000u64 {
        use rand::Rng;
        let mut rng = spec.stream("guarantee", trial);
        let b = ball[rng.random_range(0..ball.len())].clone();
        let mut e: Vec<f64> = (0..64)
            .map(|_| <f64 as wsc_core::Scalar>::standard_normal(&mut rng))
            .collect();
        let scale = 0.49 * d_cert / kahan_sum(e.iter().map(|x| x * x)).sqrt();
        for v in e.iter_mut() {
            *v *= scale;
        }
        let y: Vec<f64> = cb
            .superposition(&b.entries)
            .iter()
            .zip(&e)
            .map(|(&s, &n)| s + n)
            .collect();
        let r = decode_exhaustive(&cb, &y, 2, 1, &DecodeOptions::default(), &budget()).unwrap();
        assert_eq!(r.estimate, b, "recovery failed at trial {trial}");
    }

    // Adversarial: transmit b1 from the witness pair and push 1.01 radii
    // toward the competing superposition.
    let (b1, b2) = cert.witness.realize(2, 1).unwrap();
    let toward: Vec<f64> = {
        let y1 = cb.superposition(&b1.entries);
        let y2 = cb.superposition(&b2.entries);
        let diff: Vec<f64> = y2.iter().zip(&y1).map(|(&a, &b)| a - b).collect();
        let norm = kahan_sum(diff.iter().map(|x| x * x)).sqrt();
        diff.into_iter()
            .map(|x| x * 1.01 * (d_cert / 2.0) / norm)
            .collect()
    };
    let y: Vec<f64> = cb
        .superposition(&b1.entries)
        .iter()
        .zip(&toward)
        .map(|(&s, &n)| s + n)
        .collect();
    let r = decode_exhaustive(&cb, &y, 2, 1, &DecodeOptions::default(), &budget()).unwrap();
    assert_ne!(
        r.estimate, b1,
        "adversarial noise past the radius must break recovery"
    );
}

// 11. The pruned decoder reproduces the exhaustive decoder exactly
// (same estimate, same residual bits) on 200 random instances.
fn pruned_decoder_equivalence() {
    let spec = RngSpec::new(2200);
    for trial in 0..200u64 {
        use rand::Rng;
        let mut rng = spec.stream("pruned-eq", trial);
        let n = 4 + (trial % 7) as usize;
        let k = 1 + (trial % 2) as usize;
        let t = 1 + ((trial / 2) % 2) as i32;
        let m = 6 + (trial % 5) as usize;
        let cb = gen_family::<f64>(Family::Wesc, m, n, &RngSpec::new(3000 + trial)).unwrap();
        let y: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let a = decode_exhaustive(&cb, &y, k, t, &DecodeOptions::default(), &budget()).unwrap();
        let b = decode_pruned(&cb, &y, k, t, &DecodeOptions::default(), &budget()).unwrap();
        assert_eq!(a.estimate, b.estimate, "estimate mismatch at trial {trial}");
        assert_eq!(
            a.residual.to_bits(),
            b.residual.to_bits(),
            "residual bits mismatch at trial {trial}"
        );
        assert!(b.examined <= a.examined);
    }
}

// 12. Zero-noise scenarios recover everything, and the CLI round trip
// (gen to file, verify and decode from the file alone) reproduces the
// in-process results byte for byte.
fn scenario_zero_noise_and_cli_round_trip() {
    let adder = simulate_adder(&AdderChannelConfig {
        n: 6,
        m: 32,
        k: 2,
        t: 1,
        sigmas: vec![0.0],
        trials: 200,
        seed: 5,
        target_d: 0.15,
        max_attempts: 50,
        max_signals: 1 << 22,
    })
    .unwrap();
    assert_eq!(adder.rows[0].exact_recovery_rate, 1.0, "adder zero-noise");

    let microarray = simulate_microarray(&MicroarrayConfig {
        n: 6,
        m: 32,
        k: 2,
        t: 2,
        sigmas: vec![0.0],
        trials: 200,
        seed: 9,
        target_d: 0.1,
        restrict_nonneg: true,
        max_attempts: 50,
        max_signals: 1 << 22,
    })
    .unwrap();
    assert_eq!(
        microarray.rows[0].exact_recovery_rate, 1.0,
        "microarray zero-noise"
    );

    // CLI round trip against the in-process API.
    let dir = std::env::temp_dir().join(format!("wsc-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cb_path = dir.join("cb.txt");
    let cert_path = dir.join("cert.json");
    let decode_path = dir.join("decode.json");
    let req_path = dir.join("req.json");
    let bin = env!("CARGO_BIN_EXE_wsc");

    let status = Command::new(bin)
        .args([
            "gen", "--family", "wesc", "--m", "64", "--n", "8", "--k", "2", "--t", "1", "--d",
            "0.1", "--seed", "7",
        ])
        .arg("--out")
        .arg(&cb_path)
        .status()
        .unwrap();
    assert!(status.success(), "gen exit {status:?}");

    let p = CodeParameters {
        n: 8,
        m: 64,
        k: 2,
        d: 0.1,
        t: 1,
        norm: NormKind::L2,
        nonneg: false,
    };
    let (cb, _) = construct_with_distance::<f64>(&p, &RngSpec::new(7), 64, &budget()).unwrap();
    let mut expected_file = Vec::new();
    cb.write_to(&mut expected_file).unwrap();
    let actual_file = std::fs::read(&cb_path).unwrap();
    assert_eq!(actual_file, expected_file, "gen file differs from in-process bytes");

    let status = Command::new(bin)
        .args(["verify", "--k", "2", "--t", "1"])
        .arg("--codebook")
        .arg(&cb_path)
        .arg("--out")
        .arg(&cert_path)
        .status()
        .unwrap();
    assert!(status.success(), "verify exit {status:?}");
    let from_file = Codebook::<f64>::read_file(&cb_path).unwrap();
    let expected_cert = min_distance(&from_file, 2, 1, &ScanBudget::new(4_000_000)).unwrap();
    let mut expected_json = serde_json::to_string_pretty(&expected_cert).unwrap();
    expected_json.push('\n');
    let actual_json = std::fs::read_to_string(&cert_path).unwrap();
    assert_eq!(actual_json, expected_json, "verify JSON differs");

    // Decode from the file alone.
    let b = SparseIntegerVector::new(8, vec![(1, 1), (5, -1)]).unwrap();
    let y = from_file.superposition(&b.entries);
    std::fs::write(
        &req_path,
        serde_json::to_string(&serde_json::json!({"y": y, "K": 2, "t": 1})).unwrap(),
    )
    .unwrap();
    let status = Command::new(bin)
        .arg("decode")
        .arg("--codebook")
        .arg(&cb_path)
        .arg("--request")
        .arg(&req_path)
        .arg("--out")
        .arg(&decode_path)
        .status()
        .unwrap();
    assert!(status.success(), "decode exit {status:?}");
    let expected_decode = decode_exhaustive(
        &from_file,
        &y,
        2,
        1,
        &DecodeOptions::default(),
        &ScanBudget::new(4_000_000),
    )
    .unwrap();
    assert_eq!(expected_decode.estimate, b);
    let mut expected_json = serde_json::to_string_pretty(&expected_decode).unwrap();
    expected_json.push('\n');
    let actual_json = std::fs::read_to_string(&decode_path).unwrap();
    assert_eq!(actual_json, expected_json, "decode JSON differs");

    let _ = std::fs::remove_dir_all(&dir);
}

fn main() {
    let criteria: &[(&str, fn())] = &[
        (
            "01 distance oracle equivalence (100 codebooks, both norms)",
            distance_oracle_equivalence,
        ),
        (
            "02 difference-set characterization vs pair oracle",
            difference_set_characterization,
        ),
        ("03 E[xi^2] closed form exactness and cap", xi_squared_exactness),
        ("04 sphere packing hand cases and max-N", sphere_packing_hand_cases),
        ("05 bound sandwich sweeps on the K grid", bound_sandwich_sweeps),
        ("06 bound spot values at K=100", bound_spot_values),
        ("07 chi-square tail probe grid", chi_square_probe_grid),
        ("08 l1 column-norm concentration", l1_column_concentration),
        ("09 Berry-Esseen small-ball probe", berry_esseen_probe),
        ("10 decoder guarantee and adversarial failure", decoder_guarantee),
        (
            "11 pruned decoder equivalence (200 instances)",
            pruned_decoder_equivalence,
        ),
        (
            "12 scenario zero-noise and CLI round trip",
            scenario_zero_noise_and_cli_round_trip,
        ),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        match catch_unwind(AssertUnwindSafe(f)) {
            Ok(()) => println!("[PASS] {name} ({:.1}s)", start.elapsed().as_secs_f64()),
            Err(payload) => {
                failures += 1;
                let msg = payload
                    .downcast_ref::<String>()
                    .map(String::as_str)
                    .or_else(|| payload.downcast_ref::<&str>().copied())
                    .unwrap_or("panic");
                println!(
                    "[FAIL] {name} ({:.1}s): {msg}",
                    start.elapsed().as_secs_f64()
                );
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
