//! Counterfactual and epistemic responsibility at leaves, and gap sets.
//!
//! An agent is responsible at a leaf when some decision node on the path to
//! it lies in its strategy set for the opposite outcome: `win` for
//! counterfactual responsibility, `ewin` for epistemic.

use std::fmt;
use std::str::FromStr;

use crate::error::MechanismError;
use crate::mechanism::{AgentIx, Mechanism, NodeIx};
use crate::solver::{solve, Semantics, StrategySet, StrategyTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResponsibilityKind {
    Counterfactual,
    Epistemic,
}

impl ResponsibilityKind {
    pub const ALL: [ResponsibilityKind; 2] = [ResponsibilityKind::Counterfactual, ResponsibilityKind::Epistemic];

    pub fn semantics(self) -> Semantics {
        match self {
            ResponsibilityKind::Counterfactual => Semantics::Win,
            ResponsibilityKind::Epistemic => Semantics::Ewin,
        }
    }
}

impl fmt::Display for ResponsibilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResponsibilityKind::Counterfactual => "counterfactual",
            ResponsibilityKind::Epistemic => "epistemic",
        })
    }
}

impl FromStr for ResponsibilityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "counterfactual" => Ok(ResponsibilityKind::Counterfactual),
            "epistemic" => Ok(ResponsibilityKind::Epistemic),
            other => Err(format!("expected counterfactual or epistemic, found `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub leaf: NodeIx,
    pub agent: AgentIx,
    /// First decision node on the root-to-leaf path in the agent's set for
    /// the opposite outcome.
    pub witness: Option<NodeIx>,
}

impl Verdict {
    pub fn responsible(&self) -> bool {
        self.witness.is_some()
    }
}

fn verdict(m: &Mechanism, agent: AgentIx, leaf: NodeIx, set: &StrategySet) -> Verdict {
    let witness = m
        .decision_path(leaf)
        .into_iter()
        .filter(|&u| !m.is_leaf(u))
        .find(|&u| set.contains(u));
    Verdict { leaf, agent, witness }
}

fn require_leaf(m: &Mechanism, leaf: NodeIx) -> Result<crate::mechanism::Outcome, MechanismError> {
    if leaf.index() >= m.node_count() {
        return Err(MechanismError::UnknownNode(format!("#{}", leaf.index())));
    }
    m.label(leaf).ok_or_else(|| MechanismError::NotLeaf(m.node_name(leaf).to_string()))
}

/// Responsibility of one agent at one leaf.
pub fn responsible(m: &Mechanism, agent: AgentIx, leaf: NodeIx, kind: ResponsibilityKind) -> Result<Verdict, MechanismError> {
    let label = require_leaf(m, leaf)?;
    if agent.index() >= m.agent_count() {
        return Err(MechanismError::UnknownAgent(format!("#{}", agent.index())));
    }
    let set = solve(m, agent, label.complement(), kind.semantics());
    Ok(verdict(m, agent, leaf, &set))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponsibilityReport {
    kind: ResponsibilityKind,
    agent_count: usize,
    /// Leaf-major, leaves in preorder, agents in declaration order.
    verdicts: Vec<Verdict>,
    gap: Vec<NodeIx>,
}

impl ResponsibilityReport {
    pub fn kind(&self) -> ResponsibilityKind {
        self.kind
    }

    pub fn verdicts(&self) -> &[Verdict] {
        &self.verdicts
    }

    /// Verdicts for one leaf, or an empty slice if it is not a leaf.
    pub fn at(&self, leaf: NodeIx) -> &[Verdict] {
        match self.verdicts.iter().position(|v| v.leaf == leaf) {
            Some(i) => &self.verdicts[i..i + self.agent_count],
            None => &[],
        }
    }

    pub fn verdict(&self, leaf: NodeIx, agent: AgentIx) -> Option<&Verdict> {
        self.at(leaf).get(agent.index())
    }

    /// Leaves at which nobody is responsible, in preorder.
    pub fn gap(&self) -> &[NodeIx] {
        &self.gap
    }

    pub fn is_gap_free(&self) -> bool {
        self.gap.is_empty()
    }
}

/// Verdicts for every (leaf, agent) pair.
pub fn report(m: &Mechanism, kind: ResponsibilityKind) -> ResponsibilityReport {
    report_with(m, &StrategyTable::compute(m), kind)
}

/// [`report`] reusing precomputed strategy sets.
pub fn report_with(m: &Mechanism, table: &StrategyTable, kind: ResponsibilityKind) -> ResponsibilityReport {
    let mut verdicts = Vec::new();
    let mut gap = Vec::new();
    for leaf in m.leaves() {
        let label = m.label(leaf).unwrap();
        let start = verdicts.len();
        for a in m.agents() {
            verdicts.push(verdict(m, a, leaf, table.get(a, label.complement(), kind.semantics())));
        }
        if !verdicts[start..].iter().any(Verdict::responsible) {
            gap.push(leaf);
        }
    }
    ResponsibilityReport {
        kind,
        agent_count: m.agent_count(),
        verdicts,
        gap,
    }
}
