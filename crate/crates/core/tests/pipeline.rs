//! Cross-module integration: rejection-sampled construction feeding the
//! independent verifier, file round trips feeding decode, and the decay
//! of every rate bound's higher-order term along a K sweep.

use wsc_core::bounds::{
    ngl1_positive_crossover, rate_lb_l1, rate_lb_ngl1, rate_lb_wesc, rate_ub_l2, rate_ub_lp,
};
use wsc_core::codebook::Codebook;
use wsc_core::construct::{construct_with_distance, Family};
use wsc_core::decode::{certified_radius, decode_exhaustive, DecodeOptions, SearchAlphabet};
use wsc_core::distance::{check_distance_at_least, min_distance, ScanBudget};
use wsc_core::params::{CodeParameters, NormKind};
use wsc_core::scalar::kahan_sum;
use wsc_core::{RngSpec, SparseIntegerVector};

fn budget() -> ScanBudget {
    ScanBudget::new(1 << 22)
}

fn params(family: Family, d: f64) -> CodeParameters {
    CodeParameters {
        n: 6,
        m: 40,
        k: 2,
        d,
        t: 1,
        norm: family.norm(),
        nonneg: family.nonneg(),
    }
}

#[test]
fn constructed_codebooks_pass_independent_reverification() {
    for (family, d) in [
        (Family::Wesc, 0.15),
        (Family::L1Wsc, 0.05),
        (Family::NonnegL1Wsc, 0.05),
    ] {
        let p = params(family, d);
        let (cb, attempts) =
            construct_with_distance::<f64>(&p, &RngSpec::new(13), 60, &budget()).unwrap();
        assert!(attempts >= 1);
        let check = check_distance_at_least(&cb, p.k, p.t, d, &budget()).unwrap();
        assert!(check.ok, "{family:?} failed re-verification at d={d}");
        let cert = min_distance(&cb, p.k, p.t, &budget()).unwrap();
        assert!(cert.value >= d);
        assert!(cert.check_witness(&cb, 1e-10));
    }
}

#[test]
fn certified_file_round_trip_preserves_distance_and_decoding() {
    let p = params(Family::Wesc, 0.2);
    let (cb, _) = construct_with_distance::<f64>(&p, &RngSpec::new(3), 60, &budget()).unwrap();
    let cert = min_distance(&cb, 2, 1, &budget()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cb.txt");
    cb.write_file(&path).unwrap();
    let loaded = Codebook::<f64>::read_file(&path).unwrap();
    let cert2 = min_distance(&loaded, 2, 1, &budget()).unwrap();
    assert_eq!(cert.value.to_bits(), cert2.value.to_bits());
    assert_eq!(cert.witness, cert2.witness);

    // Decode through the file-loaded codebook at half the certified
    // radius.
    let radius = certified_radius(&loaded, 2, 1, &budget()).unwrap();
    let b = SparseIntegerVector::new(6, vec![(2, -1), (4, 1)]).unwrap();
    let mut rng = RngSpec::new(4).stream("pipeline-noise", 0);
    let mut e: Vec<f64> = (0..40)
        .map(|_| <f64 as wsc_core::Scalar>::standard_normal(&mut rng))
        .collect();
    let scale = 0.5 * radius / kahan_sum(e.iter().map(|x| x * x)).sqrt();
    e.iter_mut().for_each(|x| *x *= scale);
    let y: Vec<f64> = loaded
        .superposition(&b.entries)
        .iter()
        .zip(&e)
        .map(|(&s, &n)| s + n)
        .collect();
    let opts = DecodeOptions {
        alphabet: SearchAlphabet::Symmetric,
        certified_radius: Some(radius),
    };
    let r = decode_exhaustive(&loaded, &y, 2, 1, &opts, &budget()).unwrap();
    assert_eq!(r.estimate, b);
    assert!(r.certified);
}

#[test]
fn construction_fails_cleanly_when_distance_is_unreachable() {
    // d close to 1 with several columns in few rows: the packing bound
    // passes but random draws cannot reach the distance.
    let p = CodeParameters {
        n: 6,
        m: 4,
        k: 2,
        d: 0.95,
        t: 1,
        norm: NormKind::L2,
        nonneg: false,
    };
    let err = construct_with_distance::<f64>(&p, &RngSpec::new(1), 5, &budget()).unwrap_err();
    assert!(matches!(err, wsc_core::Error::ConstructionFailed { attempts: 5, .. }), "{err}");
}

/// Frozen decay sweep for every higher-order term at t=1, d=0.5. The
/// magnitudes shrink along K = 1e4, 1e6, 1e8 and match independent
/// evaluation; the general-lp term falls below 0.05 by K = 1e13.
#[test]
fn bound_o_terms_decay_along_k() {
    let expect = [
        // (K, o_ub_lp, o_ub_l2, o_lb_wesc, o_lb_l1)
        (10_000u64, 0.150517712, 0.451816258, -0.033316122, -0.119087302),
        (1_000_000, 0.100343350, 0.301048090, -0.022210748, -0.079391535),
        (100_000_000, 0.075257499, 0.225773854, -0.016658061, -0.059543651),
    ];
    let mut prev: Option<[f64; 4]> = None;
    for &(k, e_lp, e_l2, e_wesc, e_l1) in &expect {
        let got = [
            rate_ub_lp(k, 0.5, 1).o_term,
            rate_ub_l2(k, 0.5, 1).o_term,
            rate_lb_wesc(k).o_term,
            rate_lb_l1(k).o_term,
        ];
        for (g, e) in got.iter().zip([e_lp, e_l2, e_wesc, e_l1]) {
            assert!((g - e).abs() < 1e-8, "K={k}: {g} vs {e}");
        }
        if let Some(p) = prev {
            for (now, before) in got.iter().zip(p) {
                assert!(now.abs() < before.abs(), "no decay at K={k}");
            }
        }
        prev = Some(got);
    }
    assert!(rate_ub_lp(10_000_000_000_000, 0.5, 1).o_term < 0.05);
    // The nonnegative-family term is tested for its eventual sign change.
    let crossover = ngl1_positive_crossover(1).unwrap();
    assert!(!rate_lb_ngl1(crossover - 1, 1).factor_positive);
    assert!(rate_lb_ngl1(crossover, 1).factor_positive);
}

#[test]
fn value_and_factor_flags_survive_serialization() {
    let summary = wsc_core::bounds::bound_summary(1_000_000, 0.5, 1, None, None, 2.0);
    let json = serde_json::to_string(&summary).unwrap();
    let back: wsc_core::bounds::BoundSummary = serde_json::from_str(&json).unwrap();
    assert_eq!(summary, back);
    assert!(!back.ngl1_factor_positive);
}
