use trifill::formats::{PovmSpec, StateSpec};
use trifill::{
    average_gap, evaluate, search_violation, verify_certificate, MeasureId, Party, SearchConfig, State, StateDd,
    ViolationCertificate,
};

const MAIN_STATE: &str = r#"{"acin": {"l1": 0.096, "l2": 0.238, "l3": 0.173, "l4": 0, "phi": 0}}"#;
const MAIN_POVM: &str = r#"{"angles": {"varphi1": "pi*2/5", "varphi2": "pi/5", "psi1": "-pi/2", "psi2": "-pi/10"}}"#;

#[test]
fn specs_build_the_main_counterexample_in_both_precisions() {
    let spec = StateSpec::from_json(MAIN_STATE).unwrap();
    let povm = PovmSpec::from_json(MAIN_POVM).unwrap();
    let s: State = spec.build().unwrap();
    let sd: StateDd = spec.build().unwrap();
    let g = average_gap(&MeasureId::fill(), &s, &povm.build().unwrap(), Party(0)).unwrap();
    let gd = average_gap(&MeasureId::fill(), &sd, &povm.build().unwrap(), Party(0)).unwrap();
    assert!((-0.0096..=-0.0076).contains(&g.gap));
    assert!((g.gap - f64::from(gd.gap)).abs() < 1e-12);
    assert!((g.total_probability() - 1.0).abs() < 1e-12);
}

#[test]
fn fill_powers_are_consistent() {
    let s: State = StateSpec::from_json(MAIN_STATE).unwrap().build().unwrap();
    let f = evaluate(&MeasureId::fill(), &s).unwrap();
    let f2 = evaluate(&"fill^1/2".parse().unwrap(), &s).unwrap();
    assert!((f2 - f.sqrt()).abs() < 1e-14);
}

#[test]
fn small_search_is_deterministic_and_round_trips() {
    let mut cfg = SearchConfig::new(MeasureId::fill());
    cfg.restarts = 8;
    cfg.max_iters_per_restart = 1500;
    cfg.seed = 3;
    let a = search_violation(&cfg).unwrap();
    let b = search_violation(&cfg).unwrap();
    assert_eq!(a.best.gap.to_bits(), b.best.gap.to_bits());
    assert_eq!(a.certificate, b.certificate);
    if let Some(c) = a.certificate {
        let back = ViolationCertificate::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(verify_certificate(&back).unwrap().gap.to_bits(), c.claimed_gap.to_bits());
    }
}
