//! Dictators at nodes and elected dictatorships.

use std::fmt;

use crate::mechanism::{AgentIx, Mechanism, NodeIx, Outcome};
use crate::solver::{Semantics, StrategyTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DictatorKind {
    /// In `win` for both outcomes.
    Plain,
    /// In `ewin` for both outcomes.
    Epistemic,
    /// In `ewin` for one outcome and `win` for the other.
    SemiEpistemic,
}

impl DictatorKind {
    pub const ALL: [DictatorKind; 3] = [DictatorKind::Plain, DictatorKind::Epistemic, DictatorKind::SemiEpistemic];

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for DictatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DictatorKind::Plain => "plain",
            DictatorKind::Epistemic => "epistemic",
            DictatorKind::SemiEpistemic => "semi-epistemic",
        })
    }
}

/// Whether `agent` is a dictator of the given kind at `node`, using
/// precomputed strategy sets. Leaves are never dictator nodes.
pub fn dictator_in(table: &StrategyTable, agent: AgentIx, node: NodeIx, kind: DictatorKind) -> bool {
    let has = |o, s| table.contains(agent, o, s, node);
    match kind {
        DictatorKind::Plain => has(Outcome::Yes, Semantics::Win) && has(Outcome::No, Semantics::Win),
        DictatorKind::Epistemic => has(Outcome::Yes, Semantics::Ewin) && has(Outcome::No, Semantics::Ewin),
        DictatorKind::SemiEpistemic => Outcome::ALL
            .iter()
            .any(|&o| has(o, Semantics::Ewin) && has(o.complement(), Semantics::Win)),
    }
}

pub fn dictator_at(m: &Mechanism, agent: AgentIx, node: NodeIx, kind: DictatorKind) -> bool {
    dictator_in(&StrategyTable::compute(m), agent, node, kind)
}

/// The node and agent certifying one root-to-leaf path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathWitness {
    pub leaf: NodeIx,
    pub node: NodeIx,
    pub agent: AgentIx,
}

/// Coverage of root-to-leaf paths by dictators of one kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    /// One entry per leaf in preorder; `None` for uncovered paths.
    pub paths: Vec<(NodeIx, Option<PathWitness>)>,
}

impl Election {
    /// True iff every root-to-leaf path passes through a dictator node.
    pub fn holds(&self) -> bool {
        self.paths.iter().all(|(_, w)| w.is_some())
    }

    /// Distinct (node, agent) certificates in order of first use.
    pub fn certificates(&self) -> Vec<(NodeIx, AgentIx)> {
        let mut out = Vec::new();
        for (_, w) in &self.paths {
            if let Some(w) = w {
                if !out.contains(&(w.node, w.agent)) {
                    out.push((w.node, w.agent));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    agent_count: usize,
    /// `flags[(node * agents + agent) * 3 + kind]`.
    flags: Vec<bool>,
    elections: [Election; 3],
}

impl Classification {
    pub fn is_dictator(&self, agent: AgentIx, node: NodeIx, kind: DictatorKind) -> bool {
        self.flags[(node.index() * self.agent_count + agent.index()) * 3 + kind.slot()]
    }

    /// Every (agent, kind) dictator pair at `node`.
    pub fn dictators_at(&self, node: NodeIx) -> Vec<(AgentIx, DictatorKind)> {
        (0..self.agent_count)
            .flat_map(|a| DictatorKind::ALL.into_iter().map(move |k| (AgentIx::new(a), k)))
            .filter(|&(a, k)| self.is_dictator(a, node, k))
            .collect()
    }

    pub fn election(&self, kind: DictatorKind) -> &Election {
        &self.elections[kind.slot()]
    }

    pub fn is_elected(&self, kind: DictatorKind) -> bool {
        self.election(kind).holds()
    }
}

pub fn classify(m: &Mechanism) -> Classification {
    classify_with(m, &StrategyTable::compute(m))
}

/// [`classify`] reusing precomputed strategy sets.
pub fn classify_with(m: &Mechanism, table: &StrategyTable) -> Classification {
    let agents = m.agent_count();
    let mut flags = vec![false; m.node_count() * agents * 3];
    for v in m.decision_nodes() {
        for a in m.agents() {
            for k in DictatorKind::ALL {
                flags[(v.index() * agents + a.index()) * 3 + k.slot()] = dictator_in(table, a, v, k);
            }
        }
    }
    let election = |kind: DictatorKind| {
        let paths = m
            .leaves()
            .map(|leaf| {
                let witness = m.decision_path(leaf).into_iter().find_map(|u| {
                    m.agents()
                        .find(|a| flags[(u.index() * agents + a.index()) * 3 + kind.slot()])
                        .map(|agent| PathWitness { leaf, node: u, agent })
                });
                (leaf, witness)
            })
            .collect();
        Election { paths }
    };
    let elections = [
        election(DictatorKind::Plain),
        election(DictatorKind::Epistemic),
        election(DictatorKind::SemiEpistemic),
    ];
    Classification {
        agent_count: agents,
        flags,
        elections,
    }
}
