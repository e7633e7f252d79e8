use respgap_verify::{
    verify, verify_lemmas, verify_theorem1, verify_theorem2, verify_theorem3, EnumerationConfig, Mode, PartitionMode, Suite,
    VerifyError, LEMMAS,
};

fn small_partitioned() -> EnumerationConfig {
    EnumerationConfig { max_depth: 2, max_decision_nodes: Some(2), partitions: PartitionMode::Exhaustive, ..Default::default() }
}

fn sampled(samples: u64) -> EnumerationConfig {
    EnumerationConfig { max_depth: 3, mode: Mode::Sampled, partitions: PartitionMode::Sampled, samples, seed: 5, ..Default::default() }
}

#[test]
fn theorem1_holds_on_depth_one() {
    let cfg = EnumerationConfig { max_depth: 1, ..Default::default() };
    let r = verify_theorem1(&cfg, 2).unwrap();
    assert_eq!(r.mechanisms, 43);
    assert!(r.passed());
    let t = &r.properties[0];
    assert_eq!(t.checked, 43);
    assert_eq!(t.failed, 0);
    assert!(r.to_string().ends_with("failed: 0\n"));
}

#[test]
fn theorem1_needs_perfect_information() {
    let cfg = EnumerationConfig { partitions: PartitionMode::Exhaustive, ..Default::default() };
    assert!(matches!(verify_theorem1(&cfg, 1), Err(VerifyError::Config(_))));
}

#[test]
fn implications_hold_and_converses_fail() {
    let cfg = small_partitioned();
    for (r, witness) in [(verify_theorem2(&cfg, 4).unwrap(), "mechanism-M"), (verify_theorem3(&cfg, 4).unwrap(), "mechanism-N")] {
        assert!(r.passed(), "{r}");
        assert_eq!(r.properties.len(), 2);
        assert_eq!(r.properties[0].checked, r.mechanisms);
        let converse = &r.properties[1];
        assert!(converse.property.contains(witness));
        assert_eq!((converse.checked, converse.passed), (1, 1));
    }
}

#[test]
fn lemmas_hold_on_partitioned_and_sampled_spaces() {
    for cfg in [small_partitioned(), sampled(300)] {
        let r = verify_lemmas(&cfg, 4).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.properties.len(), LEMMAS.len());
        assert!(r.properties.iter().all(|t| t.checked == r.mechanisms));
        // Imperfect information makes uniform forcing and knowledge differ.
        assert!(r.findings[0].mechanisms > 0);
        assert!(!r.findings[0].examples.is_empty());
    }
}

#[test]
fn perfect_information_has_no_findings() {
    let r = verify_lemmas(&EnumerationConfig { max_depth: 1, ..Default::default() }, 1).unwrap();
    assert!(r.passed());
    assert_eq!(r.findings[0].mechanisms, 0);
}

#[test]
fn reports_do_not_depend_on_workers() {
    for (cfg, suite) in [(small_partitioned(), Suite::Theorem2), (sampled(500), Suite::Lemmas), (EnumerationConfig::default(), Suite::Theorem1)] {
        let one = verify(&cfg, suite, 1).unwrap().to_json();
        let many = verify(&cfg, suite, 8).unwrap().to_json();
        assert_eq!(one, many);
    }
}

#[test]
fn json_report_shape() {
    let r = verify_theorem3(&EnumerationConfig { max_depth: 1, ..Default::default() }, 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["suite"], "theorem 3");
    assert_eq!(v["failed"], 0);
    assert_eq!(v["config"]["max-depth"], 1);
    assert_eq!(v["config"]["partitions"], "perfect");
    assert!(v["scope"].as_str().unwrap().contains("not a proof"));
    assert!(v.get("wall_time").is_none());
}

#[test]
fn budget_stops_large_runs() {
    let cfg = EnumerationConfig { max_depth: 3, budget: 1000, ..Default::default() };
    assert!(matches!(verify_theorem1(&cfg, 1), Err(VerifyError::BudgetExceeded { limit: 1000, .. })));
}

#[test]
fn suite_names() {
    for (s, suite) in [("1", Suite::Theorem1), ("2", Suite::Theorem2), ("3", Suite::Theorem3), ("lemmas", Suite::Lemmas)] {
        assert_eq!(s.parse::<Suite>().unwrap(), suite);
    }
    assert!("4".parse::<Suite>().is_err());
    assert_eq!(Suite::Theorem2.to_string(), "theorem 2");
}
