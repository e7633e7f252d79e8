mod common;

use proptest::prelude::*;
use respgap_core::*;

use common::mechanism_from_bytes;

fn mechanisms(max_decisions: usize) -> impl Strategy<Value = Mechanism> {
    proptest::collection::vec(any::<u8>(), 0..160).prop_map(move |b| mechanism_from_bytes(&b, max_decisions))
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(256)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn next_sets_cover_exactly_the_children(m in mechanisms(8)) {
        for v in m.decision_nodes() {
            for a in m.agents() {
                let mut union: Vec<NodeIx> = (0..m.action_count(a, v))
                    .flat_map(|d| m.next(a, ActionIx::new(d), v).unwrap().to_vec())
                    .collect();
                union.sort();
                union.dedup();
                let mut children = m.children(v).to_vec();
                children.sort();
                prop_assert_eq!(union, children);
            }
        }
    }

    #[test]
    fn decision_paths_walk_down_from_the_root(m in mechanisms(8)) {
        for v in m.nodes() {
            let path = m.decision_path(v);
            prop_assert_eq!(path[0], m.root());
            prop_assert_eq!(*path.last().unwrap(), v);
            for w in path.windows(2) {
                prop_assert!(m.children(w[0]).contains(&w[1]));
            }
        }
    }

    #[test]
    fn partitions_are_partitions(m in mechanisms(8)) {
        for a in m.agents() {
            let mut seen = vec![0; m.node_count()];
            for class in m.partition(a).classes() {
                for &u in class {
                    seen[u.index()] += 1;
                    prop_assert!(!m.is_leaf(u));
                    prop_assert_eq!(m.actions(a, u).unwrap(), m.actions(a, class[0]).unwrap());
                    prop_assert!(m.equivalence_class(a, u).unwrap().contains(&u));
                }
            }
            for v in m.nodes() {
                prop_assert_eq!(seen[v.index()], usize::from(!m.is_leaf(v)));
            }
        }
    }

    #[test]
    fn text_round_trip(m in mechanisms(8)) {
        let text = m.to_text();
        let again = load(&text).unwrap();
        prop_assert_eq!(&again, &m);
        prop_assert_eq!(again.to_text(), text);
        prop_assert_eq!(Mechanism::validate(&parse(&serialize(&m.to_document())).unwrap()).unwrap(), m);
    }

    #[test]
    fn worklist_matches_naive_iteration(m in mechanisms(8)) {
        for a in m.agents() {
            for o in Outcome::ALL {
                for s in Semantics::ALL {
                    prop_assert_eq!(solve(&m, a, o, s).members().clone(), solve_naive(&m, a, o, s));
                }
            }
        }
    }

    #[test]
    fn containment_chain_and_perfect_information_collapse(m in mechanisms(8)) {
        let p = m.with_perfect_information();
        for a in m.agents() {
            for o in Outcome::ALL {
                let win = solve(&m, a, o, Semantics::Win);
                let uwin = solve(&m, a, o, Semantics::Uwin);
                let ewin = solve(&m, a, o, Semantics::Ewin);
                prop_assert!(uwin.is_subset(&ewin));
                prop_assert!(ewin.is_subset(&win));
                for s in Semantics::ALL {
                    prop_assert_eq!(solve(&p, a, o, s).members().clone(), win.members().clone());
                }
            }
        }
    }

    #[test]
    fn appendix_lemmas(m in mechanisms(8)) {
        let t = StrategyTable::compute(&m);
        for a in m.agents() {
            for o in Outcome::ALL {
                let win = t.get(a, o, Semantics::Win);
                let ewin = t.get(a, o, Semantics::Ewin);
                for b in m.agents().filter(|&b| b != a) {
                    prop_assert!(win.members().is_disjoint(t.get(b, o.complement(), Semantics::Win).members()));
                }
                for v in m.nodes() {
                    if ewin.contains(v) && m.is_leaf(v) {
                        prop_assert_eq!(m.label(v), Some(o));
                    }
                    if m.is_leaf(v) {
                        continue;
                    }
                    let into = |set: &StrategySet, d: usize| m.next(a, ActionIx::new(d), v).unwrap().iter().all(|&x| set.contains(x));
                    let actions = m.action_count(a, v);
                    if ewin.contains(v) {
                        prop_assert!((0..actions).any(|d| into(ewin, d)));
                        if !t.contains(a, o.complement(), Semantics::Win, v) {
                            prop_assert!(m.children(v).iter().any(|&u| ewin.contains(u) && !t.contains(a, o.complement(), Semantics::Win, u)));
                        }
                    }
                    if !win.contains(v) {
                        prop_assert!((0..actions).all(|d| !into(win, d)));
                    }
                }
            }
        }
    }

    #[test]
    fn oracles_match_solver(m in mechanisms(5)) {
        let lim = OracleLimits::default();
        for a in m.agents() {
            for o in Outcome::ALL {
                prop_assert_eq!(oracle_win_all(&m, a, o, lim).unwrap(), solve(&m, a, o, Semantics::Win).members().clone());
                prop_assert_eq!(oracle_uwin_all(&m, a, o, lim).unwrap(), solve(&m, a, o, Semantics::Uwin).members().clone());
            }
        }
    }

    #[test]
    fn responsibility_witnesses_are_sound(m in mechanisms(8)) {
        let t = StrategyTable::compute(&m);
        let cf = report_with(&m, &t, ResponsibilityKind::Counterfactual);
        let ep = report_with(&m, &t, ResponsibilityKind::Epistemic);
        for r in [&cf, &ep] {
            for v in r.verdicts() {
                let set = t.get(v.agent, m.label(v.leaf).unwrap().complement(), r.kind().semantics());
                let path = m.decision_path(v.leaf);
                match v.witness {
                    Some(u) => {
                        prop_assert!(path.contains(&u) && !m.is_leaf(u) && set.contains(u));
                        prop_assert!(path.iter().take_while(|&&x| x != u).all(|&x| !set.contains(x)));
                    }
                    None => prop_assert!(path.iter().all(|&x| m.is_leaf(x) || !set.contains(x))),
                }
            }
            for leaf in m.leaves() {
                prop_assert_eq!(r.gap().contains(&leaf), r.at(leaf).iter().all(|v| !v.responsible()));
            }
        }
        for (e, c) in ep.verdicts().iter().zip(cf.verdicts()) {
            prop_assert!(!e.responsible() || c.responsible());
        }
        if m.is_perfect_information() {
            prop_assert_eq!(cf.verdicts(), ep.verdicts());
        }
    }

    #[test]
    fn dictator_kinds_nest(m in mechanisms(8)) {
        let c = classify(&m);
        for v in m.nodes() {
            for a in m.agents() {
                let [plain, epistemic, semi] = DictatorKind::ALL.map(|k| c.is_dictator(a, v, k));
                prop_assert!(!epistemic || semi);
                prop_assert!(!semi || plain);
                if m.is_perfect_information() {
                    prop_assert!(plain == epistemic && epistemic == semi);
                }
                if m.is_leaf(v) {
                    prop_assert!(!plain);
                }
            }
        }
        for k in DictatorKind::ALL {
            let e = c.election(k);
            let covered = m.leaves().all(|leaf| {
                m.decision_path(leaf).into_iter().any(|u| m.agents().any(|a| c.is_dictator(a, u, k)))
            });
            prop_assert_eq!(e.holds(), covered);
        }
    }

    #[test]
    fn elected_dictatorship_iff_gap_free_with_perfect_information(m in mechanisms(8)) {
        let p = m.with_perfect_information();
        prop_assert_eq!(
            report(&p, ResponsibilityKind::Counterfactual).is_gap_free(),
            classify(&p).is_elected(DictatorKind::Plain)
        );
    }
}
