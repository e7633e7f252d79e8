//! Exponential strategy-enumeration oracles, independent of the fixed-point
//! solver. Successors are read directly off the choice tables.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::mechanism::{AgentIx, Mechanism, NodeIx, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_nodes: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_nodes: 40 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("mechanism has {nodes} nodes; strategy enumeration is capped at {limit}")]
    TooLarge { nodes: usize, limit: usize },
}

/// `succ[node][action]` for one agent: children reachable when the agent
/// plays that action, with repetitions.
fn successor_table(m: &Mechanism, agent: AgentIx) -> Vec<Vec<Vec<NodeIx>>> {
    m.nodes()
        .map(|v| match m.decision(v) {
            None => Vec::new(),
            Some(dec) => {
                let mut out = vec![Vec::new(); dec.actions(agent).len()];
                match dec.decider_position(agent) {
                    Some(pos) => {
                        for (profile, t) in dec.profiles() {
                            out[profile[pos].index()].push(t);
                        }
                    }
                    None => out[0] = dec.table().to_vec(),
                }
                out
            }
        })
        .collect()
}

fn check(m: &Mechanism, limits: OracleLimits) -> Result<(), OracleError> {
    if m.node_count() > limits.max_nodes {
        Err(OracleError::TooLarge {
            nodes: m.node_count(),
            limit: limits.max_nodes,
        })
    } else {
        Ok(())
    }
}

/// Advances a mixed-radix counter; false once it wraps around.
fn advance(digits: &mut [usize], radix: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radix) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

/// Nodes from which `choice` (one action per node, indexed by node) forces
/// `outcome` against every behaviour of the other agents.
fn forced_under(m: &Mechanism, succ: &[Vec<Vec<NodeIx>>], outcome: Outcome, choice: impl Fn(NodeIx) -> usize) -> FixedBitSet {
    let mut forced = FixedBitSet::with_capacity(m.node_count());
    // Preorder indices: children come after parents.
    for v in m.nodes().rev() {
        let ok = match m.label(v) {
            Some(label) => label == outcome,
            None => succ[v.index()][choice(v)].iter().all(|x| forced.contains(x.index())),
        };
        forced.set(v.index(), ok);
    }
    forced
}

fn subtree(m: &Mechanism, root: NodeIx) -> Vec<NodeIx> {
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        out.push(v);
        stack.extend_from_slice(m.children(v));
    }
    out
}

/// True iff `agent` has some assignment of actions to the decision nodes
/// below `node` such that every reachable leaf is labelled `outcome`.
pub fn oracle_win(m: &Mechanism, agent: AgentIx, outcome: Outcome, node: NodeIx, limits: OracleLimits) -> Result<bool, OracleError> {
    check(m, limits)?;
    let succ = successor_table(m, agent);
    let decisions: Vec<NodeIx> = subtree(m, node).into_iter().filter(|&v| !m.is_leaf(v)).collect();
    let radix: Vec<usize> = decisions.iter().map(|&v| succ[v.index()].len()).collect();
    let mut slot = vec![usize::MAX; m.node_count()];
    for (i, v) in decisions.iter().enumerate() {
        slot[v.index()] = i;
    }
    let mut digits = vec![0; decisions.len()];
    loop {
        let forced = forced_under(m, &succ, outcome, |v| match slot[v.index()] {
            usize::MAX => 0,
            i => digits[i],
        });
        if forced.contains(node.index()) {
            return Ok(true);
        }
        if !advance(&mut digits, &radix) {
            return Ok(false);
        }
    }
}

/// [`oracle_win`] for every node at once, enumerating global strategies.
pub fn oracle_win_all(m: &Mechanism, agent: AgentIx, outcome: Outcome, limits: OracleLimits) -> Result<FixedBitSet, OracleError> {
    check(m, limits)?;
    let succ = successor_table(m, agent);
    let radix: Vec<usize> = m.nodes().map(|v| succ[v.index()].len().max(1)).collect();
    let mut digits = vec![0; m.node_count()];
    let mut union = FixedBitSet::with_capacity(m.node_count());
    loop {
        union.union_with(&forced_under(m, &succ, outcome, |v| digits[v.index()]));
        if !advance(&mut digits, &radix) {
            return Ok(union);
        }
    }
}

/// Uniform strategies: one action per class of the agent's partition.
struct UniformSpace {
    succ: Vec<Vec<Vec<NodeIx>>>,
    radix: Vec<usize>,
}

impl UniformSpace {
    fn new(m: &Mechanism, agent: AgentIx) -> Self {
        let succ = successor_table(m, agent);
        let radix = m
            .partition(agent)
            .classes()
            .iter()
            .map(|c| succ[c[0].index()].len())
            .collect();
        UniformSpace { succ, radix }
    }

    /// Classes from which `choice` wins while the agent knows only the
    /// class it is in at every step: all nodes of the class are possible,
    /// every play through them ends, and every leaf reached is `outcome`.
    fn knowing_wins(&self, m: &Mechanism, agent: AgentIx, outcome: Outcome, choice: &[usize]) -> Vec<bool> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Won,
            Lost,
        }
        let partition = m.partition(agent);
        let mut mark = vec![Mark::New; partition.classes().len()];
        for start in 0..mark.len() {
            if mark[start] != Mark::New {
                continue;
            }
            // Iterative DFS over the class graph; an edge to an open class
            // closes a cycle, which rules out every class on it.
            let mut stack: Vec<(usize, Vec<NodeIx>, usize)> = Vec::new();
            let succ_of = |c: usize| -> Vec<NodeIx> {
                partition
                    .class(c)
                    .iter()
                    .flat_map(|u| self.succ[u.index()][choice[c]].iter().copied())
                    .collect()
            };
            mark[start] = Mark::Open;
            stack.push((start, succ_of(start), 0));
            while let Some((c, succs, i)) = stack.last_mut() {
                if *i == succs.len() {
                    let c = *c;
                    if mark[c] == Mark::Open {
                        mark[c] = Mark::Won;
                    }
                    stack.pop();
                    if let (Some(parent), Mark::Lost) = (stack.last(), mark[c]) {
                        mark[parent.0] = Mark::Lost;
                    }
                    continue;
                }
                let x = succs[*i];
                *i += 1;
                let c = *c;
                if mark[c] == Mark::Lost {
                    continue;
                }
                match m.label(x) {
                    Some(label) => {
                        if label != outcome {
                            mark[c] = Mark::Lost;
                        }
                    }
                    None => {
                        let next = partition.class_of(x).unwrap();
                        match mark[next] {
                            Mark::Won => {}
                            Mark::Lost | Mark::Open => mark[c] = Mark::Lost,
                            Mark::New => {
                                mark[next] = Mark::Open;
                                let s = succ_of(next);
                                stack.push((next, s, 0));
                            }
                        }
                    }
                }
            }
        }
        mark.into_iter().map(|k| k == Mark::Won).collect()
    }
}

/// True iff some uniform strategy (equal actions on indistinguishable
/// nodes, across the whole mechanism) forces `outcome` from `node` for an
/// agent who at each decision only knows its current class: every play
/// starting anywhere in `[node]`, and continuing from any classmate of each
/// node reached, terminates in a leaf labelled `outcome`.
pub fn oracle_uwin(m: &Mechanism, agent: AgentIx, outcome: Outcome, node: NodeIx, limits: OracleLimits) -> Result<bool, OracleError> {
    check(m, limits)?;
    if let Some(label) = m.label(node) {
        return Ok(label == outcome);
    }
    let class = m.partition(agent).class_of(node).unwrap();
    let space = UniformSpace::new(m, agent);
    let mut digits = vec![0; space.radix.len()];
    loop {
        if space.knowing_wins(m, agent, outcome, &digits)[class] {
            return Ok(true);
        }
        if !advance(&mut digits, &space.radix) {
            return Ok(false);
        }
    }
}

/// [`oracle_uwin`] for every node at once.
pub fn oracle_uwin_all(m: &Mechanism, agent: AgentIx, outcome: Outcome, limits: OracleLimits) -> Result<FixedBitSet, OracleError> {
    check(m, limits)?;
    let space = UniformSpace::new(m, agent);
    let partition = m.partition(agent);
    let mut won_classes = vec![false; space.radix.len()];
    let mut digits = vec![0; space.radix.len()];
    loop {
        for (acc, w) in won_classes.iter_mut().zip(space.knowing_wins(m, agent, outcome, &digits)) {
            *acc |= w;
        }
        if !advance(&mut digits, &space.radix) {
            break;
        }
    }
    let mut out = FixedBitSet::with_capacity(m.node_count());
    for v in m.nodes() {
        let ok = match m.label(v) {
            Some(label) => label == outcome,
            None => won_classes[partition.class_of(v).unwrap()],
        };
        out.set(v.index(), ok);
    }
    Ok(out)
}

/// The weaker, memory-unaware reading: some uniform strategy forces
/// `outcome` from every node of `[node]`, with the agent's later choices
/// fixed by the strategy rather than re-derived from what it knows. This
/// differs from `uwin` when an agent can lose track of where it is, and is
/// only used to report such mechanisms.
pub fn uniform_forcing_all(m: &Mechanism, agent: AgentIx, outcome: Outcome, limits: OracleLimits) -> Result<FixedBitSet, OracleError> {
    check(m, limits)?;
    let space = UniformSpace::new(m, agent);
    let partition = m.partition(agent);
    let mut digits = vec![0; space.radix.len()];
    let mut out = FixedBitSet::with_capacity(m.node_count());
    loop {
        let forced = forced_under(m, &space.succ, outcome, |v| digits[partition.class_of(v).unwrap()]);
        for v in m.nodes() {
            let ok = match partition.class_of(v) {
                None => forced.contains(v.index()),
                Some(c) => partition.class(c).iter().all(|u| forced.contains(u.index())),
            };
            if ok {
                out.insert(v.index());
            }
        }
        if !advance(&mut digits, &space.radix) {
            return Ok(out);
        }
    }
}
