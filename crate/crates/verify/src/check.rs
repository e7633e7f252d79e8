//! Universally quantified properties evaluated on one mechanism.

use std::fmt::Write;

use fixedbitset::FixedBitSet;
use respgap_core::{
    classify_with, oracle_uwin_all, oracle_win_all, report_with, solve_naive, uniform_forcing_all, ActionIx, AgentIx,
    Classification, DictatorKind, Mechanism, NodeIx, OracleLimits, Outcome, ResponsibilityKind, ResponsibilityReport,
    OracleError, Semantics, StrategyTable,
};

type OracleFn = fn(&Mechanism, AgentIx, Outcome, OracleLimits) -> Result<FixedBitSet, OracleError>;

/// Mechanisms above this size are not compared against the exponential
/// oracles.
pub const ORACLE_MAX_NODES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    GapFreeIffElectedDictatorship,
    ElectedEpistemicImpliesEpistemicGapFree,
    EpistemicGapFreeImpliesElectedSemiEpistemic,
    EwinWithinWin,
    UwinWithinEwin,
    TwoHares,
    Base,
    NextAll,
    NextExists,
    StepDown,
    StepUp,
    PerfectInformationCollapse,
    WorklistMatchesNaive,
    OracleWin,
    OracleUwin,
    DictatorKindsNest,
    EpistemicImpliesCounterfactual,
    PerfectInformationReportsCoincide,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::GapFreeIffElectedDictatorship => "gap-free iff elected dictatorship",
            Property::ElectedEpistemicImpliesEpistemicGapFree => "elected epistemic dictatorship implies epistemic-gap-free",
            Property::EpistemicGapFreeImpliesElectedSemiEpistemic => {
                "epistemic-gap-free implies elected semi-epistemic dictatorship"
            }
            Property::EwinWithinWin => "ewin within win",
            Property::UwinWithinEwin => "uwin within ewin",
            Property::TwoHares => "two hares: win_a(o) and win_b(not o) disjoint",
            Property::Base => "base: leaves of ewin_a(o) are labelled o",
            Property::NextAll => "next-all: ewin decision nodes have an action staying in ewin",
            Property::NextExists => "next-exists: outside win every action can leave win",
            Property::StepDown => "step-down",
            Property::StepUp => "step-up (epistemic-gap-free mechanisms)",
            Property::PerfectInformationCollapse => "perfect information: ewin = uwin = win",
            Property::WorklistMatchesNaive => "worklist solver matches naive iteration",
            Property::OracleWin => "win matches strategy enumeration",
            Property::OracleUwin => "uwin matches uniform strategy enumeration",
            Property::DictatorKindsNest => "epistemic dictator implies semi-epistemic implies plain",
            Property::EpistemicImpliesCounterfactual => "epistemic responsibility implies counterfactual",
            Property::PerfectInformationReportsCoincide => "perfect information: reports and elections coincide",
        }
    }
}

pub const LEMMAS: &[Property] = &[
    Property::EwinWithinWin,
    Property::UwinWithinEwin,
    Property::TwoHares,
    Property::Base,
    Property::NextAll,
    Property::NextExists,
    Property::StepDown,
    Property::StepUp,
    Property::PerfectInformationCollapse,
    Property::WorklistMatchesNaive,
    Property::OracleWin,
    Property::OracleUwin,
    Property::DictatorKindsNest,
    Property::EpistemicImpliesCounterfactual,
    Property::PerfectInformationReportsCoincide,
];

/// Observations that are not failures but deserve a look.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Finding {
    /// Some uniform strategy forces the outcome from every node of a class
    /// although the node is not in `uwin`: the agent cannot know the
    /// strategy works, since it may lose track of where it is.
    ForcingWithoutKnowledge,
}

impl Finding {
    pub fn name(self) -> &'static str {
        match self {
            Finding::ForcingWithoutKnowledge => "uniform forcing without knowledge exceeds uwin",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The property's hypothesis does not hold here.
    Vacuous,
    /// Not evaluated (mechanism too large for an oracle).
    Skipped,
    Fail(String),
}

/// Precomputed analysis of one mechanism.
pub struct Context<'a> {
    m: &'a Mechanism,
    table: StrategyTable,
    counterfactual: ResponsibilityReport,
    epistemic: ResponsibilityReport,
    classification: Classification,
}

impl<'a> Context<'a> {
    pub fn new(m: &'a Mechanism) -> Self {
        let table = StrategyTable::compute(m);
        let counterfactual = report_with(m, &table, ResponsibilityKind::Counterfactual);
        let epistemic = report_with(m, &table, ResponsibilityKind::Epistemic);
        let classification = classify_with(m, &table);
        Context { m, table, counterfactual, epistemic, classification }
    }

    fn set(&self, a: AgentIx, o: Outcome, s: Semantics) -> &FixedBitSet {
        self.table.get(a, o, s).members()
    }

    fn has(&self, a: AgentIx, o: Outcome, s: Semantics, v: NodeIx) -> bool {
        self.table.contains(a, o, s, v)
    }

    fn nodes(&self, set: &FixedBitSet) -> String {
        let names: Vec<&str> = set.ones().map(|i| self.m.node_name(NodeIx::new(i))).collect();
        format!("{{{}}}", names.join(", "))
    }

    fn leaves(&self, nodes: &[NodeIx]) -> String {
        let names: Vec<&str> = nodes.iter().map(|&v| self.m.node_name(v)).collect();
        format!("{{{}}}", names.join(", "))
    }

    fn each_agent_outcome(&self) -> impl Iterator<Item = (AgentIx, Outcome)> + '_ {
        self.m.agents().flat_map(|a| Outcome::ALL.into_iter().map(move |o| (a, o)))
    }

    fn next_within(&self, a: AgentIx, d: usize, v: NodeIx, set: &FixedBitSet) -> bool {
        self.m.next(a, ActionIx::new(d), v).unwrap().iter().all(|x| set.contains(x.index()))
    }

    pub fn check(&self, p: Property) -> Verdict {
        let m = self.m;
        let agent = |a: AgentIx| m.agent_name(a);
        let node = |v: NodeIx| m.node_name(v);
        match p {
            Property::GapFreeIffElectedDictatorship => {
                let gap_free = self.counterfactual.is_gap_free();
                let elected = self.classification.is_elected(DictatorKind::Plain);
                if gap_free == elected {
                    Verdict::Pass
                } else {
                    Verdict::Fail(format!(
                        "gap-free: {gap_free} (gap {}), elected dictatorship: {elected}",
                        self.leaves(self.counterfactual.gap())
                    ))
                }
            }
            Property::ElectedEpistemicImpliesEpistemicGapFree => {
                if !self.classification.is_elected(DictatorKind::Epistemic) {
                    Verdict::Vacuous
                } else if self.epistemic.is_gap_free() {
                    Verdict::Pass
                } else {
                    Verdict::Fail(format!(
                        "elected epistemic dictatorship with epistemic gap {}",
                        self.leaves(self.epistemic.gap())
                    ))
                }
            }
            Property::EpistemicGapFreeImpliesElectedSemiEpistemic => {
                if !self.epistemic.is_gap_free() {
                    Verdict::Vacuous
                } else if self.classification.is_elected(DictatorKind::SemiEpistemic) {
                    Verdict::Pass
                } else {
                    let uncovered: Vec<NodeIx> = self
                        .classification
                        .election(DictatorKind::SemiEpistemic)
                        .paths
                        .iter()
                        .filter(|(_, w)| w.is_none())
                        .map(|(leaf, _)| *leaf)
                        .collect();
                    Verdict::Fail(format!(
                        "epistemic-gap-free but paths to {} have no semi-epistemic dictator",
                        self.leaves(&uncovered)
                    ))
                }
            }
            Property::EwinWithinWin | Property::UwinWithinEwin => {
                let (small, big) = match p {
                    Property::EwinWithinWin => (Semantics::Ewin, Semantics::Win),
                    _ => (Semantics::Uwin, Semantics::Ewin),
                };
                for (a, o) in self.each_agent_outcome() {
                    let mut extra = self.set(a, o, small).clone();
                    extra.difference_with(self.set(a, o, big));
                    if !extra.is_clear() {
                        return Verdict::Fail(format!("{small}_{}({o}) has {} outside {big}", agent(a), self.nodes(&extra)));
                    }
                }
                Verdict::Pass
            }
            Property::TwoHares => {
                for (a, o) in self.each_agent_outcome() {
                    for b in m.agents().filter(|&b| b != a) {
                        let mut both = self.set(a, o, Semantics::Win).clone();
                        both.intersect_with(self.set(b, o.complement(), Semantics::Win));
                        if !both.is_clear() {
                            return Verdict::Fail(format!(
                                "win_{}({o}) and win_{}({}) share {}",
                                agent(a),
                                agent(b),
                                o.complement(),
                                self.nodes(&both)
                            ));
                        }
                    }
                }
                Verdict::Pass
            }
            Property::Base => {
                for (a, o) in self.each_agent_outcome() {
                    if let Some(v) = m.leaves().find(|&v| self.has(a, o, Semantics::Ewin, v) && m.label(v) != Some(o)) {
                        return Verdict::Fail(format!("leaf {} in ewin_{}({o})", node(v), agent(a)));
                    }
                }
                Verdict::Pass
            }
            Property::NextAll => {
                for (a, o) in self.each_agent_outcome() {
                    let ewin = self.set(a, o, Semantics::Ewin);
                    for v in m.decision_nodes().filter(|&v| ewin.contains(v.index())) {
                        if !(0..m.action_count(a, v)).any(|d| self.next_within(a, d, v, ewin)) {
                            return Verdict::Fail(format!("{} in ewin_{}({o}) with no action staying inside", node(v), agent(a)));
                        }
                    }
                }
                Verdict::Pass
            }
            Property::NextExists => {
                for (a, o) in self.each_agent_outcome() {
                    let win = self.set(a, o, Semantics::Win);
                    for v in m.decision_nodes().filter(|&v| !win.contains(v.index())) {
                        if let Some(d) = (0..m.action_count(a, v)).find(|&d| self.next_within(a, d, v, win)) {
                            return Verdict::Fail(format!(
                                "{} outside win_{}({o}) but action {} stays inside",
                                node(v),
                                agent(a),
                                m.actions(a, v).unwrap()[d]
                            ));
                        }
                    }
                }
                Verdict::Pass
            }
            Property::StepDown => {
                for (a, o) in self.each_agent_outcome() {
                    let good = |v: NodeIx| self.has(a, o, Semantics::Ewin, v) && !self.has(a, o.complement(), Semantics::Win, v);
                    for v in m.decision_nodes().filter(|&v| good(v)) {
                        if !m.children(v).iter().any(|&u| good(u)) {
                            return Verdict::Fail(format!(
                                "{} in ewin_{a}({o}) outside win_{a}({}) but no child is",
                                node(v),
                                o.complement(),
                                a = agent(a)
                            ));
                        }
                    }
                }
                Verdict::Pass
            }
            Property::StepUp => {
                if !self.epistemic.is_gap_free() {
                    return Verdict::Vacuous;
                }
                for v in m.nodes() {
                    let path = m.decision_path(v);
                    let above = &path[..path.len() - 1];
                    for (a, o) in self.each_agent_outcome() {
                        if !self.has(a, o, Semantics::Ewin, v) || self.has(a, o.complement(), Semantics::Win, v) {
                            continue;
                        }
                        let lifted = above
                            .iter()
                            .any(|&u| m.agents().any(|b| self.has(b, o.complement(), Semantics::Ewin, u)));
                        if !lifted {
                            return Verdict::Fail(format!(
                                "{} in ewin_{a}({o}) outside win_{a}({}) with no earlier node in any ewin(_)({})",
                                node(v),
                                o.complement(),
                                o.complement(),
                                a = agent(a)
                            ));
                        }
                    }
                }
                Verdict::Pass
            }
            Property::PerfectInformationCollapse => {
                let p = m.with_perfect_information();
                let t = StrategyTable::compute(&p);
                for (a, o) in self.each_agent_outcome() {
                    let win = t.get(a, o, Semantics::Win);
                    for s in [Semantics::Uwin, Semantics::Ewin] {
                        if t.get(a, o, s).members() != win.members() {
                            return Verdict::Fail(format!("with perfect information {s}_{}({o}) differs from win", agent(a)));
                        }
                    }
                    if win.members() != self.set(a, o, Semantics::Win) {
                        return Verdict::Fail(format!("win_{}({o}) depends on the partitions", agent(a)));
                    }
                }
                Verdict::Pass
            }
            Property::WorklistMatchesNaive => {
                for (a, o) in self.each_agent_outcome() {
                    for s in Semantics::ALL {
                        let naive = solve_naive(m, a, o, s);
                        if &naive != self.set(a, o, s) {
                            return Verdict::Fail(format!(
                                "{s}_{}({o}): worklist {} vs naive {}",
                                agent(a),
                                self.nodes(self.set(a, o, s)),
                                self.nodes(&naive)
                            ));
                        }
                    }
                }
                Verdict::Pass
            }
            Property::OracleWin | Property::OracleUwin => {
                if m.node_count() > ORACLE_MAX_NODES {
                    return Verdict::Skipped;
                }
                let limits = OracleLimits { max_nodes: ORACLE_MAX_NODES };
                let (s, oracle): (Semantics, OracleFn) = match p {
                    Property::OracleWin => (Semantics::Win, oracle_win_all),
                    _ => (Semantics::Uwin, oracle_uwin_all),
                };
                for (a, o) in self.each_agent_outcome() {
                    let expected = oracle(m, a, o, limits).expect("within the node cap");
                    if &expected != self.set(a, o, s) {
                        return Verdict::Fail(format!(
                            "{s}_{}({o}) = {} but strategy enumeration gives {}",
                            agent(a),
                            self.nodes(self.set(a, o, s)),
                            self.nodes(&expected)
                        ));
                    }
                }
                Verdict::Pass
            }
            Property::DictatorKindsNest => {
                let c = &self.classification;
                for v in m.nodes() {
                    for a in m.agents() {
                        let [plain, epistemic, semi] = DictatorKind::ALL.map(|k| c.is_dictator(a, v, k));
                        if (epistemic && !semi) || (semi && !plain) {
                            return Verdict::Fail(format!(
                                "{} at {}: plain {plain}, epistemic {epistemic}, semi-epistemic {semi}",
                                agent(a),
                                node(v)
                            ));
                        }
                    }
                }
                Verdict::Pass
            }
            Property::EpistemicImpliesCounterfactual => {
                for (e, c) in self.epistemic.verdicts().iter().zip(self.counterfactual.verdicts()) {
                    if e.responsible() && !c.responsible() {
                        return Verdict::Fail(format!(
                            "{} epistemically but not counterfactually responsible at {}",
                            agent(e.agent),
                            node(e.leaf)
                        ));
                    }
                }
                Verdict::Pass
            }
            Property::PerfectInformationReportsCoincide => {
                let p = m.with_perfect_information();
                let t = StrategyTable::compute(&p);
                let ep = report_with(&p, &t, ResponsibilityKind::Epistemic);
                if ep.verdicts() != self.counterfactual.verdicts() {
                    return Verdict::Fail("with perfect information epistemic and counterfactual verdicts differ".into());
                }
                let c = classify_with(&p, &t);
                let flags = DictatorKind::ALL.map(|k| c.is_elected(k));
                if flags.iter().any(|&f| f != flags[0]) {
                    return Verdict::Fail(format!("with perfect information the elections differ: {flags:?}"));
                }
                for v in p.nodes() {
                    for a in p.agents() {
                        let kinds = DictatorKind::ALL.map(|k| c.is_dictator(a, v, k));
                        if kinds.iter().any(|&f| f != kinds[0]) {
                            return Verdict::Fail(format!("with perfect information dictator kinds differ at {}", node(v)));
                        }
                    }
                }
                Verdict::Pass
            }
        }
    }

    /// Description of the finding if it occurs in this mechanism.
    pub fn finding(&self, f: Finding) -> Option<String> {
        match f {
            Finding::ForcingWithoutKnowledge => {
                let m = self.m;
                if m.node_count() > ORACLE_MAX_NODES || m.is_perfect_information() {
                    return None;
                }
                let limits = OracleLimits { max_nodes: ORACLE_MAX_NODES };
                let mut out = String::new();
                for (a, o) in self.each_agent_outcome() {
                    let mut forcing = uniform_forcing_all(m, a, o, limits).expect("within the node cap");
                    forcing.difference_with(self.set(a, o, Semantics::Uwin));
                    if !forcing.is_clear() {
                        if !out.is_empty() {
                            out.push_str("; ");
                        }
                        write!(out, "{} forces {o} from {} outside uwin", m.agent_name(a), self.nodes(&forcing)).unwrap();
                    }
                }
                (!out.is_empty()).then_some(out)
            }
        }
    }
}
