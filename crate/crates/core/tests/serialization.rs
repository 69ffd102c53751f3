use ncblow_core::intersection::{ledger, ExtRankProfile, Ledger, MsDot, PairRelation};
use ncblow_core::{FactBase, HilbertSeries, Literal, Predicate, Provenance};

#[test]
fn ledger_survives_json() {
    for rel in [
        PairRelation::SameLine,
        PairRelation::OnOrbit(3),
        PairRelation::OffOrbit,
    ] {
        let l = ledger(rel);
        let text = serde_json::to_string(&l).unwrap();
        let back: Ledger = serde_json::from_str(&text).unwrap();
        assert_eq!(back, l);
    }
    let json = serde_json::to_value(PairRelation::OnOrbit(-2)).unwrap();
    assert_eq!(json, serde_json::json!({"kind": "on_orbit", "j": -2}));
}

#[test]
fn series_serialize_as_text() {
    let h = HilbertSeries::monomial_over(-1, 2);
    assert_eq!(serde_json::to_string(&h).unwrap(), "\"(s^-1) / (1-s)^2\"");
    assert!(serde_json::from_str::<HilbertSeries>("\"(1) / (1+s)\"").is_err());
}

#[test]
fn facts_and_profiles_round_trip() {
    let mut f = FactBase::new();
    f.insert(
        Literal::line("E1", Predicate::Exceptional, true),
        Provenance::Established("blowup".into()),
    );
    f.declare(Literal::pair("E1", "E2", Predicate::Isomorphic, false));
    let back: FactBase = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
    assert_eq!(back, f);

    let p = ExtRankProfile::persistent_self_extension();
    let back: ExtRankProfile = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back.ms_dot(), MsDot::Undefined);
    assert_eq!(
        serde_json::to_string(&MsDot::Defined(-1)).unwrap(),
        r#"{"outcome":"defined","value":-1}"#
    );
}
