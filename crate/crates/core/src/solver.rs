//! Strategic ability sets `win`, `uwin` and `ewin` as least fixed points.
//!
//! All three start from the leaves labelled with the target outcome. A
//! decision node joins when, for some action `d`, every child reachable
//! under `d` from every node of its class is already in the set (the class
//! is the singleton for `win`). `ewin` additionally admits a node all of
//! whose children are in the set, whatever the agent does there.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::mechanism::{ActionIx, AgentIx, Mechanism, NodeIx, Outcome, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semantics {
    /// Some strategy, not necessarily knowable.
    Win,
    /// A uniform strategy known at every step.
    Uwin,
    /// `Uwin` closed under "every action leads into the set".
    Ewin,
}

impl Semantics {
    pub const ALL: [Semantics; 3] = [Semantics::Win, Semantics::Uwin, Semantics::Ewin];
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Win => "win",
            Semantics::Uwin => "uwin",
            Semantics::Ewin => "ewin",
        })
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "win" => Ok(Semantics::Win),
            "uwin" => Ok(Semantics::Uwin),
            "ewin" => Ok(Semantics::Ewin),
            other => Err(format!("expected win, uwin or ewin, found `{other}`")),
        }
    }
}

/// Why a node belongs to a strategy set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A leaf with the target label.
    Leaf,
    /// The lowest-index action whose successors over the whole class lie in
    /// the set.
    Action(ActionIx),
    /// Every action leads into the set (`ewin` only).
    AllActions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategySet {
    agent: AgentIx,
    outcome: Outcome,
    semantics: Semantics,
    members: FixedBitSet,
    witnesses: Vec<Option<Witness>>,
}

impl StrategySet {
    pub fn agent(&self) -> AgentIx {
        self.agent
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn contains(&self, node: NodeIx) -> bool {
        self.members.contains(node.index())
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    /// Members in preorder.
    pub fn nodes(&self) -> Vec<NodeIx> {
        self.members.ones().map(NodeIx::new).collect()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn witness(&self, node: NodeIx) -> Option<Witness> {
        self.witnesses[node.index()]
    }

    pub fn is_subset(&self, other: &StrategySet) -> bool {
        self.members.is_subset(&other.members)
    }
}

fn classes_for(m: &Mechanism, agent: AgentIx, semantics: Semantics) -> &Partition {
    match semantics {
        Semantics::Win => m.trivial_partition(),
        Semantics::Uwin | Semantics::Ewin => m.partition(agent),
    }
}

/// Computes the strategy set by worklist propagation.
///
/// For each class and action we count successors not yet in the set; a node
/// entering the set decrements the counters of its parent's class. Because
/// every node has one parent, a node lies in `Next_d` of exactly one class
/// member, so the per-class counts are plain sums.
pub fn solve(m: &Mechanism, agent: AgentIx, outcome: Outcome, semantics: Semantics) -> StrategySet {
    let n = m.node_count();
    let partition = classes_for(m, agent, semantics);
    let classes = partition.classes();

    let mut offset = Vec::with_capacity(classes.len() + 1);
    offset.push(0usize);
    for class in classes {
        offset.push(offset.last().unwrap() + m.action_count(agent, class[0]));
    }
    let mut pending = vec![0u32; *offset.last().unwrap()];
    for (c, class) in classes.iter().enumerate() {
        for &v in class {
            for d in 0..m.action_count(agent, v) {
                pending[offset[c] + d] += m.next_raw(agent, d, v).len() as u32;
            }
        }
    }
    let mut unresolved_children: Vec<u32> = m.nodes().map(|v| m.children(v).len() as u32).collect();

    let mut members = FixedBitSet::with_capacity(n);
    let mut queue = VecDeque::new();
    for v in m.leaves() {
        if m.label(v) == Some(outcome) {
            members.insert(v.index());
            queue.push_back(v);
        }
    }

    while let Some(x) = queue.pop_front() {
        let Some(p) = m.parent(x) else { continue };
        let c = partition.class_of(p).expect("parents are decision nodes");
        for d in 0..m.action_count(agent, p) {
            if m.next_raw(agent, d, p).binary_search(&x).is_ok() {
                let slot = &mut pending[offset[c] + d];
                *slot -= 1;
                if *slot == 0 {
                    for &u in partition.class(c) {
                        if !members.put(u.index()) {
                            queue.push_back(u);
                        }
                    }
                }
            }
        }
        if semantics == Semantics::Ewin {
            let slot = &mut unresolved_children[p.index()];
            *slot -= 1;
            if *slot == 0 && !members.put(p.index()) {
                queue.push_back(p);
            }
        }
    }

    let witnesses = m
        .nodes()
        .map(|v| members.contains(v.index()).then(|| witness(m, agent, partition, &members, v)))
        .collect();
    StrategySet {
        agent,
        outcome,
        semantics,
        members,
        witnesses,
    }
}

fn witness(m: &Mechanism, agent: AgentIx, partition: &Partition, members: &FixedBitSet, v: NodeIx) -> Witness {
    let Some(c) = partition.class_of(v) else {
        return Witness::Leaf;
    };
    let class = partition.class(c);
    (0..m.action_count(agent, v))
        .find(|&d| {
            class
                .iter()
                .all(|&u| m.next_raw(agent, d, u).iter().all(|x| members.contains(x.index())))
        })
        .map(|d| Witness::Action(ActionIx::new(d)))
        .unwrap_or(Witness::AllActions)
}

/// Straightforward Kleene iteration straight from the definitions, reading
/// successors off the choice tables. Quadratic; used to cross-check
/// [`solve`].
pub fn solve_naive(m: &Mechanism, agent: AgentIx, outcome: Outcome, semantics: Semantics) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(m.node_count());
    for v in m.leaves() {
        if m.label(v) == Some(outcome) {
            set.insert(v.index());
        }
    }
    // Successors of `u` when `agent` plays action position `d`.
    let successors = |u: NodeIx, d: usize| -> Vec<NodeIx> {
        let dec = m.decision(u).expect("decision node");
        match dec.decider_position(agent) {
            Some(pos) => dec
                .profiles()
                .filter(|(profile, _)| profile[pos].index() == d)
                .map(|(_, t)| t)
                .collect(),
            None => dec.table().to_vec(),
        }
    };
    loop {
        let mut changed = false;
        for v in m.decision_nodes() {
            if set.contains(v.index()) {
                continue;
            }
            let class: Vec<NodeIx> = match semantics {
                Semantics::Win => vec![v],
                _ => m.equivalence_class(agent, v).expect("decision node").to_vec(),
            };
            let dec = m.decision(v).unwrap();
            let by_action = (0..dec.actions(agent).len()).any(|d| {
                class
                    .iter()
                    .all(|&u| successors(u, d).iter().all(|x| set.contains(x.index())))
            });
            let by_all = semantics == Semantics::Ewin && dec.table().iter().all(|x| set.contains(x.index()));
            if by_action || by_all {
                set.insert(v.index());
                changed = true;
            }
        }
        if !changed {
            return set;
        }
    }
}

/// Every strategy set of a mechanism: all agents, both outcomes, all three
/// semantics.
#[derive(Clone, Debug)]
pub struct StrategyTable {
    sets: Vec<StrategySet>,
}

impl StrategyTable {
    pub fn compute(m: &Mechanism) -> Self {
        let mut sets = Vec::with_capacity(m.agent_count() * 6);
        for a in m.agents() {
            for o in Outcome::ALL {
                for s in Semantics::ALL {
                    sets.push(solve(m, a, o, s));
                }
            }
        }
        StrategyTable { sets }
    }

    fn slot(agent: AgentIx, outcome: Outcome, semantics: Semantics) -> usize {
        let o = match outcome {
            Outcome::Yes => 0,
            Outcome::No => 1,
        };
        let s = match semantics {
            Semantics::Win => 0,
            Semantics::Uwin => 1,
            Semantics::Ewin => 2,
        };
        agent.index() * 6 + o * 3 + s
    }

    pub fn get(&self, agent: AgentIx, outcome: Outcome, semantics: Semantics) -> &StrategySet {
        &self.sets[Self::slot(agent, outcome, semantics)]
    }

    pub fn contains(&self, agent: AgentIx, outcome: Outcome, semantics: Semantics, node: NodeIx) -> bool {
        self.get(agent, outcome, semantics).contains(node)
    }

    pub fn agent_count(&self) -> usize {
        self.sets.len() / 6
    }
}
