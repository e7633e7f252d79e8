use std::collections::BTreeSet;

use respgap_core::*;

fn ex(name: &str) -> Mechanism {
    example(name).unwrap()
}

fn node(m: &Mechanism, name: &str) -> NodeIx {
    m.node_id(name).unwrap()
}

fn agent(m: &Mechanism, name: &str) -> AgentIx {
    m.agent_id(name).unwrap()
}

fn names(m: &Mechanism, nodes: impl IntoIterator<Item = NodeIx>) -> BTreeSet<String> {
    nodes.into_iter().map(|v| m.node_name(v).to_string()).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn solved(m: &Mechanism, a: &str, o: Outcome, s: Semantics) -> BTreeSet<String> {
    names(m, solve(m, agent(m, a), o, s).nodes())
}

// ---- mechanism accessors ----

#[test]
fn two_person_rule_shape() {
    let m = ex("two-person-rule");
    assert_eq!(names(&m, m.decision_nodes()), set(&["u1", "u2"]));
    assert_eq!(names(&m, m.leaves()), set(&["v1", "v2", "v3"]));
    assert_eq!(names(&m, m.children(node(&m, "u1")).iter().copied()), set(&["v1", "u2"]));
    assert!(m.children(node(&m, "v3")).is_empty());
    assert!(m.is_perfect_information());
}

#[test]
fn academic_root_children() {
    let m = ex("academic");
    assert_eq!(names(&m, m.children(node(&m, "u1")).iter().copied()), set(&["v1", "u2", "v4"]));
}

#[test]
fn next_sets() {
    let m = ex("two-person-rule");
    let (a, p, u2) = (agent(&m, "A"), agent(&m, "P"), node(&m, "u2"));
    let left = m.action_id(a, u2, "Left").unwrap();
    let right = m.action_id(a, u2, "Right").unwrap();
    let idle = m.action_id(p, u2, IDLE).unwrap();
    assert_eq!(names(&m, m.next(a, left, u2).unwrap().iter().copied()), set(&["v2"]));
    assert_eq!(names(&m, m.next(a, right, u2).unwrap().iter().copied()), set(&["v2", "v3"]));
    assert_eq!(names(&m, m.next(p, idle, u2).unwrap().iter().copied()), set(&["v2", "v3"]));
    assert!(matches!(m.next(a, left, node(&m, "v1")), Err(MechanismError::NotDecisionNode(_))));
    assert!(matches!(m.action_id(a, u2, "Sideways"), Err(MechanismError::UnknownAction { .. })));
}

#[test]
fn next_of_class_sets() {
    let m = ex("mechanism-M");
    let b = agent(&m, "B");
    let class = [node(&m, "u2"), node(&m, "u4")];
    assert_eq!(names(&m, m.next_of_class(b, ActionIx::new(0), &class).unwrap()), set(&["u5", "v2"]));

    let n = ex("mechanism-N");
    let b = agent(&n, "B");
    let class = [node(&n, "u2"), node(&n, "u3")];
    assert_eq!(names(&n, n.next_of_class(b, ActionIx::new(2), &class).unwrap()), set(&["v2", "v3"]));
    assert!(n.next_of_class(b, ActionIx::new(0), &[]).unwrap().is_empty());
}

#[test]
fn decision_paths() {
    let m = ex("two-person-rule");
    let path: Vec<&str> = m.decision_path(node(&m, "v3")).into_iter().map(|v| m.node_name(v)).collect();
    assert_eq!(path, ["u1", "u2", "v3"]);
    assert_eq!(m.decision_path(m.root()), vec![m.root()]);
    let s = ex("senate");
    let path: Vec<&str> = s.decision_path(node(&s, "v4")).into_iter().map(|v| s.node_name(v)).collect();
    assert_eq!(path, ["u1", "v4"]);
}

#[test]
fn equivalence_classes() {
    let m = ex("drawing-straws");
    let class = m.equivalence_class(agent(&m, "B"), node(&m, "u2")).unwrap();
    assert_eq!(names(&m, class.iter().copied()), set(&["u2", "u3"]));
    let class = m.equivalence_class(agent(&m, "A"), node(&m, "u1")).unwrap();
    assert_eq!(names(&m, class.iter().copied()), set(&["u1"]));
    let c = ex("confusion");
    let class = c.equivalence_class(agent(&c, "A"), node(&c, "u6")).unwrap();
    assert_eq!(names(&c, class.iter().copied()), set(&["u5", "u6"]));
    assert!(matches!(m.equivalence_class(agent(&m, "A"), node(&m, "v1")), Err(MechanismError::NotDecisionNode(_))));
}

#[test]
fn action_mismatch_across_a_class() {
    let text = include_str!("../mechanisms/drawing-straws.mech").replace(
        "  actions: B = [0, 1]\n  map: [0] -> v3 ; [1] -> v4",
        "  actions: B = [0, 1, 2]\n  map: [0] -> v3 ; [1] -> v4 ; [2] -> v4",
    );
    let err = load(&text).unwrap_err();
    let LoadError::Invalid(errors) = err else { panic!("{err:?}") };
    assert!(errors.0.iter().any(|e| matches!(e, ValidationError::ActionMismatch { agent, .. } if agent == "B")));
}

// ---- strategy sets ----

#[test]
fn two_person_rule_win_sets() {
    let m = ex("two-person-rule");
    assert_eq!(solved(&m, "P", Outcome::No, Semantics::Win), set(&["u1", "v1", "v2"]));
    assert_eq!(solved(&m, "P", Outcome::Yes, Semantics::Win), set(&["v3"]));
    assert_eq!(solved(&m, "A", Outcome::No, Semantics::Win), set(&["u1", "v1", "u2", "v2"]));
    assert_eq!(solved(&m, "A", Outcome::Yes, Semantics::Win), set(&["v3"]));
}

#[test]
fn drawing_straws_sets() {
    let m = ex("drawing-straws");
    assert_eq!(solved(&m, "B", Outcome::Yes, Semantics::Ewin), set(&["v1", "v4"]));
    assert_eq!(solved(&m, "B", Outcome::Yes, Semantics::Uwin), set(&["v1", "v4"]));
    // B is idle at the root, so whatever A does leads into B's winning
    // region: the root is in win_B(Yes) together with u2 and u3.
    assert_eq!(solved(&m, "B", Outcome::Yes, Semantics::Win), set(&["u1", "u2", "u3", "v1", "v4"]));
}

#[test]
fn confusion_sets() {
    let m = ex("confusion");
    let a = agent(&m, "A");
    let uwin = solve(&m, a, Outcome::Yes, Semantics::Uwin);
    let ewin = solve(&m, a, Outcome::Yes, Semantics::Ewin);
    assert!(!uwin.contains(node(&m, "u4")));
    assert!(ewin.contains(node(&m, "u4")));
    assert!(uwin.contains(node(&m, "u7")));
    assert_eq!(ewin.witness(node(&m, "u4")), Some(Witness::Action(ActionIx::new(2))));
    assert_eq!(ewin.witness(node(&m, "u6")), Some(Witness::AllActions));
}

#[test]
fn single_leaf_sets() {
    let m = load("agents: A, B\nroot: r\nleaf r = Yes").unwrap();
    for a in m.agents() {
        for s in Semantics::ALL {
            assert_eq!(solve(&m, a, Outcome::Yes, s).nodes(), vec![m.root()]);
            assert!(solve(&m, a, Outcome::No, s).is_empty());
        }
    }
}

// ---- oracles ----

#[test]
fn oracle_examples() {
    let lim = OracleLimits::default();
    let m = ex("two-person-rule");
    let (p, a) = (agent(&m, "P"), agent(&m, "A"));
    assert!(oracle_win(&m, a, Outcome::No, node(&m, "u2"), lim).unwrap());
    assert!(!oracle_win(&m, p, Outcome::Yes, node(&m, "u1"), lim).unwrap());
    assert!(oracle_win(&m, p, Outcome::Yes, node(&m, "v3"), lim).unwrap());
    assert!(oracle_uwin(&m, a, Outcome::No, node(&m, "u2"), lim).unwrap());

    let d = ex("drawing-straws");
    let b = agent(&d, "B");
    assert!(!oracle_uwin(&d, b, Outcome::Yes, node(&d, "u2"), lim).unwrap());
    assert!(!oracle_uwin(&d, b, Outcome::No, node(&d, "u2"), lim).unwrap());
    assert!(oracle_win(&d, b, Outcome::Yes, node(&d, "u1"), lim).unwrap());
}

#[test]
fn oracle_node_cap() {
    let m = ex("confusion");
    let err = oracle_win(&m, AgentIx::new(0), Outcome::Yes, m.root(), OracleLimits { max_nodes: 5 }).unwrap_err();
    assert_eq!(err, OracleError::TooLarge { nodes: m.node_count(), limit: 5 });
}

#[test]
fn oracles_agree_with_solver_on_examples() {
    let lim = OracleLimits::default();
    for e in EXAMPLES {
        let m = ex(e.name);
        for a in m.agents() {
            for o in Outcome::ALL {
                let win = oracle_win_all(&m, a, o, lim).unwrap();
                let uwin = oracle_uwin_all(&m, a, o, lim).unwrap();
                assert_eq!(&win, solve(&m, a, o, Semantics::Win).members(), "{} win", e.name);
                assert_eq!(&uwin, solve(&m, a, o, Semantics::Uwin).members(), "{} uwin", e.name);
                for v in m.nodes() {
                    assert_eq!(oracle_win(&m, a, o, v, lim).unwrap(), win.contains(v.index()));
                    assert_eq!(oracle_uwin(&m, a, o, v, lim).unwrap(), uwin.contains(v.index()));
                }
                for s in Semantics::ALL {
                    assert_eq!(&solve_naive(&m, a, o, s), solve(&m, a, o, s).members(), "{} {s}", e.name);
                }
            }
        }
    }
}

#[test]
fn forcing_without_knowledge_differs_on_confusion() {
    // Playing 2 at u4 and at u7 forces Yes from u4, although A cannot know
    // that at u6, which it confuses with u5.
    let m = ex("confusion");
    let forcing = uniform_forcing_all(&m, AgentIx::new(0), Outcome::Yes, OracleLimits::default()).unwrap();
    assert!(forcing.contains(node(&m, "u4").index()));
    assert!(!solve(&m, AgentIx::new(0), Outcome::Yes, Semantics::Uwin).contains(node(&m, "u4")));
}

// ---- responsibility ----

fn gap(m: &Mechanism, kind: ResponsibilityKind) -> BTreeSet<String> {
    names(m, report(m, kind).gap().iter().copied())
}

#[test]
fn counterfactual_verdicts() {
    let m = ex("two-person-rule");
    let p = agent(&m, "P");
    let v = responsible(&m, p, node(&m, "v3"), ResponsibilityKind::Counterfactual).unwrap();
    assert_eq!(v.witness, Some(node(&m, "u1")));
    assert!(!responsible(&m, p, node(&m, "v1"), ResponsibilityKind::Counterfactual).unwrap().responsible());
    assert!(matches!(
        responsible(&m, p, node(&m, "u1"), ResponsibilityKind::Counterfactual),
        Err(MechanismError::NotLeaf(_))
    ));

    let d = ex("drawing-straws");
    let (b, v1) = (agent(&d, "B"), node(&d, "v1"));
    assert!(responsible(&d, b, v1, ResponsibilityKind::Counterfactual).unwrap().responsible());
    assert!(!responsible(&d, b, v1, ResponsibilityKind::Epistemic).unwrap().responsible());

    let c = ex("confusion");
    assert!(responsible(&c, agent(&c, "A"), node(&c, "v3"), ResponsibilityKind::Epistemic).unwrap().responsible());
}

#[test]
fn gap_sets() {
    assert_eq!(gap(&ex("two-person-rule"), ResponsibilityKind::Counterfactual), set(&["v1", "v2"]));
    assert_eq!(gap(&ex("senate"), ResponsibilityKind::Counterfactual), set(&["v1", "v4"]));
    assert!(gap(&ex("academic"), ResponsibilityKind::Counterfactual).is_empty());
    assert!(gap(&ex("mechanism-M"), ResponsibilityKind::Epistemic).is_empty());
    assert!(gap(&ex("mechanism-N"), ResponsibilityKind::Epistemic).contains("v2"));
}

#[test]
fn confusion_agent_is_epistemically_responsible_everywhere() {
    let m = ex("confusion");
    let r = report(&m, ResponsibilityKind::Epistemic);
    for leaf in m.leaves() {
        assert!(r.verdict(leaf, AgentIx::new(0)).unwrap().responsible(), "{}", m.node_name(leaf));
    }
}

#[test]
fn single_leaf_is_never_gap_free() {
    let m = load("agents: A\nroot: r\nleaf r = No").unwrap();
    for kind in ResponsibilityKind::ALL {
        assert_eq!(report(&m, kind).gap(), &[m.root()]);
    }
}

// ---- classification ----

#[test]
fn dictators_at_nodes() {
    let s = ex("senate");
    assert!(dictator_at(&s, agent(&s, "V"), node(&s, "u2"), DictatorKind::Plain));
    let a = ex("academic");
    assert!(dictator_at(&a, agent(&a, "D"), node(&a, "u1"), DictatorKind::Plain));
    let m = ex("mechanism-M");
    let (b, u2) = (agent(&m, "B"), node(&m, "u2"));
    assert!(dictator_at(&m, b, u2, DictatorKind::SemiEpistemic));
    assert!(!dictator_at(&m, b, u2, DictatorKind::Epistemic));
    for leaf in m.leaves() {
        for k in DictatorKind::ALL {
            assert!(!dictator_at(&m, b, leaf, k));
        }
    }
}

#[test]
fn elections() {
    let a = ex("academic");
    let c = classify(&a);
    assert!(c.is_elected(DictatorKind::Plain));
    assert_eq!(c.election(DictatorKind::Plain).certificates(), vec![(node(&a, "u1"), agent(&a, "D"))]);

    let t = ex("two-person-rule");
    let c = classify(&t);
    for v in t.nodes() {
        assert!(c.dictators_at(v).is_empty());
    }
    for k in DictatorKind::ALL {
        assert!(!c.is_elected(k));
    }

    let m = ex("mechanism-M");
    let c = classify(&m);
    assert!(c.is_elected(DictatorKind::SemiEpistemic));
    assert!(!c.is_elected(DictatorKind::Epistemic));
    assert_eq!(
        c.election(DictatorKind::SemiEpistemic).certificates(),
        vec![(node(&m, "u2"), agent(&m, "B")), (node(&m, "u3"), agent(&m, "C"))]
    );

    let n = ex("mechanism-N");
    assert!(classify(&n).is_elected(DictatorKind::SemiEpistemic));
}

#[test]
fn converse_witnesses() {
    let m = ex("mechanism-M");
    assert!(report(&m, ResponsibilityKind::Epistemic).is_gap_free());
    assert!(!classify(&m).is_elected(DictatorKind::Epistemic));
    let n = ex("mechanism-N");
    assert!(classify(&n).is_elected(DictatorKind::SemiEpistemic));
    assert!(!report(&n, ResponsibilityKind::Epistemic).is_gap_free());
}

#[test]
fn mechanism_m_constraints() {
    let m = ex("mechanism-M");
    let b = agent(&m, "B");
    let ewin_no = solve(&m, b, Outcome::No, Semantics::Ewin);
    assert!(ewin_no.contains(node(&m, "u5")) && ewin_no.contains(node(&m, "v2")));
    assert!(!solve(&m, b, Outcome::Yes, Semantics::Win).contains(node(&m, "u6")));
    assert_eq!(m.leaves().count(), 8);
    assert!(dictator_at(&m, agent(&m, "C"), node(&m, "u3"), DictatorKind::Epistemic));
}

#[test]
fn mechanism_n_sets() {
    let n = ex("mechanism-N");
    assert_eq!(solved(&n, "A", Outcome::Yes, Semantics::Ewin), set(&["v1", "v4"]));
    assert_eq!(solved(&n, "B", Outcome::Yes, Semantics::Ewin), set(&["v1", "v4"]));
}
