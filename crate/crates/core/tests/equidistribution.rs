//! Trace statistics of real curves and of synthetic Haar draws.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use stlab_core::endo_galois::{gaussian_example, GaloisTwistGroup};
use stlab_core::equidist::{
    analyze_records, analyze_sample, component_conditional_test, discrepancy_of_sample, empirical_moments,
    identify, Policy, Verdict,
};
use stlab_core::frobenius::{scan_primes, CurveSpec, TraceRecord};
use stlab_core::haar::{sample_traces, CompactGroup, CompactGroupId, Component};

fn cm_records() -> &'static [TraceRecord] {
    static RECORDS: OnceLock<Vec<TraceRecord>> = OnceLock::new();
    RECORDS.get_or_init(|| {
        let (_, g) = gaussian_example();
        let curve = CurveSpec::new(1, &[0, 1, 0, 1]).unwrap();
        scan_primes(&curve, 100_000, Some(&g), 0).unwrap()
    })
}

fn generic_records() -> &'static [TraceRecord] {
    static RECORDS: OnceLock<Vec<TraceRecord>> = OnceLock::new();
    RECORDS.get_or_init(|| {
        let curve = CurveSpec::new(1, &[1, 1, 0, 1]).unwrap();
        scan_primes(&curve, 100_000, None, 0).unwrap()
    })
}

fn whole(g: CompactGroup) -> CompactGroupId {
    CompactGroupId::whole(g)
}

fn cm_hypothesis(identity_group: CompactGroup) -> BTreeMap<String, CompactGroupId> {
    let mut h = BTreeMap::new();
    h.insert("id".into(), CompactGroupId::new(identity_group, Component::Identity).unwrap());
    h.insert("s1".into(), CompactGroupId::new(CompactGroup::NU1, Component::Nontrivial).unwrap());
    h
}

#[test]
fn cm_curve_nontrivial_class_is_supersingular() {
    let records = cm_records();
    assert_eq!(records.len(), 9591);
    for r in records.iter().filter(|r| r.class_label.as_deref() == Some("s1")) {
        assert_eq!((r.s1, r.t), (0, 0.0), "p={}", r.p);
        assert_eq!(r.p % 4, 3);
    }
}

#[test]
fn cm_curve_matches_normalizer_of_torus() {
    let records = cm_records();
    let m = empirical_moments(records, 4, None).unwrap();
    assert!((m.values[2] - 1.0).abs() <= 0.05, "M2={}", m.values[2]);
    assert!((m.values[4] - 3.0).abs() <= 0.15, "M4={}", m.values[4]);
    let policy = Policy::default();
    let report = component_conditional_test(records, &gaussian_example().1, &cm_hypothesis(CompactGroup::U1), &policy)
        .unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report:#?}");
    assert!(report.frequency_gate.pass);
    let id_class = report.classes.iter().find(|c| c.class == "id").unwrap().report.as_ref().unwrap();
    assert!(id_class.moments.z[1].abs() <= 4.0 && id_class.moments.z[3].abs() <= 4.0);
    let nt = report.classes.iter().find(|c| c.class == "s1").unwrap().report.as_ref().unwrap();
    assert_eq!(nt.discrepancy, Some(0.0));
}

#[test]
fn cm_curve_rejects_wrong_identity_component() {
    let policy = Policy::default();
    let report =
        component_conditional_test(cm_records(), &gaussian_example().1, &cm_hypothesis(CompactGroup::SU2), &policy)
            .unwrap();
    let id_class = report.classes.iter().find(|c| c.class == "id").unwrap();
    assert_eq!(id_class.verdict, Verdict::Fail);
    assert_eq!(report.verdict, Verdict::Fail);
}

#[test]
fn cm_curve_is_identified_as_normalizer() {
    let catalog = [whole(CompactGroup::U1), whole(CompactGroup::NU1), whole(CompactGroup::SU2)];
    let ranked = identify(cm_records(), &catalog, &Policy::default()).unwrap();
    assert_eq!(ranked[0].report.candidate, CompactGroup::NU1);
}

#[test]
fn generic_curve_follows_semicircle() {
    let records = generic_records();
    let m = empirical_moments(records, 4, None).unwrap();
    assert!((m.values[2] - 1.0).abs() <= 0.1, "M2={}", m.values[2]);
    assert!((m.values[4] - 2.0).abs() <= 0.2, "M4={}", m.values[4]);
    let catalog: Vec<_> = CompactGroup::ALL.into_iter().map(whole).collect();
    let ranked = identify(records, &catalog, &Policy::default()).unwrap();
    assert_eq!(ranked[0].report.candidate, CompactGroup::SU2);
    assert_eq!(ranked[0].report.verdict, Verdict::Pass);
}

#[test]
fn trivial_group_reduces_to_single_comparison() {
    let records = &generic_records()[..2000];
    let trivial = GaloisTwistGroup::trivial(1);
    let mut h = BTreeMap::new();
    h.insert("id".to_string(), whole(CompactGroup::SU2));
    let policy = Policy::default();
    let conditional = component_conditional_test(records, &trivial, &h, &policy).unwrap();
    let direct = analyze_records(records, whole(CompactGroup::SU2), &policy).unwrap();
    assert_eq!(conditional.classes.len(), 1);
    assert_eq!(conditional.classes[0].report.as_ref().unwrap(), &direct);
}

#[test]
fn synthetic_draws_pass_their_own_group() {
    let policy = Policy::default();
    for g in CompactGroup::ALL {
        let ids: Vec<CompactGroupId> = if g == CompactGroup::NU1 {
            vec![whole(g), CompactGroupId::new(g, Component::Identity).unwrap()]
        } else {
            vec![whole(g)]
        };
        for id in ids {
            let ts = sample_traces(id, 100_000, 2024);
            let report = analyze_sample(&ts, id, &policy).unwrap();
            assert!(report.moments.z.iter().all(|z| z.abs() <= 4.0), "{id}: {:?}", report.moments.z);
            assert_eq!(report.verdict, Verdict::Pass);
        }
    }
}

#[test]
fn su2_draws_are_close_in_distribution() {
    let id = whole(CompactGroup::SU2);
    let d = discrepancy_of_sample(&sample_traces(id, 100_000, 9), id).unwrap();
    assert!(d < 0.01, "{d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn statistics_ignore_record_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = generic_records()[..500].to_vec();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let id = whole(CompactGroup::SU2);
        let policy = Policy::default();
        prop_assert_eq!(
            analyze_records(&shuffled, id, &policy).unwrap(),
            analyze_records(&generic_records()[..500], id, &policy).unwrap()
        );
    }
}
