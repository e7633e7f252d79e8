//! The mechanism data model: a finite rooted tree whose decision nodes route
//! on the simultaneous actions of agents and whose leaves carry an outcome,
//! optionally with per-agent indistinguishability partitions.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{MechanismError, ValidationError, ValidationErrors};
use crate::text::{is_identifier, MechanismDocument, NodeDecl};

/// Action name given to every agent that does not take part in a decision.
pub const IDLE: &str = "idle";

/// Index of a node. Nodes are stored in preorder, so the root is always `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIx(pub(crate) u32);

/// Index of an agent in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentIx(pub(crate) u32);

/// Position of an action in an agent's ordered action list at a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionIx(pub(crate) u32);

macro_rules! index_impl {
    ($t:ty) => {
        impl $t {
            pub fn new(index: usize) -> Self {
                Self(u32::try_from(index).expect("index overflows u32"))
            }

            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

index_impl!(NodeIx);
index_impl!(AgentIx);
index_impl!(ActionIx);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Yes,
    No,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Yes, Outcome::No];

    /// The other outcome.
    pub fn complement(self) -> Outcome {
        match self {
            Outcome::Yes => Outcome::No,
            Outcome::No => Outcome::Yes,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Yes => "Yes",
            Outcome::No => "No",
        })
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Yes" => Ok(Outcome::Yes),
            "No" => Ok(Outcome::No),
            other => Err(format!("expected `Yes` or `No`, found `{other}`")),
        }
    }
}

/// Internal node: the deciders' action lists and the choice table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionNode {
    deciders: Vec<AgentIx>,
    /// Indexed by agent; non-deciders hold `[idle]`.
    actions: Vec<Vec<String>>,
    /// Row-major over the deciders' action positions, last decider fastest.
    table: Vec<NodeIx>,
    /// Distinct targets of `table` in order of first occurrence.
    children: Vec<NodeIx>,
}

impl DecisionNode {
    pub fn deciders(&self) -> &[AgentIx] {
        &self.deciders
    }

    pub fn is_decider(&self, agent: AgentIx) -> bool {
        self.decider_position(agent).is_some()
    }

    pub fn decider_position(&self, agent: AgentIx) -> Option<usize> {
        self.deciders.iter().position(|&a| a == agent)
    }

    /// The ordered action list of `agent` at this node.
    pub fn actions(&self, agent: AgentIx) -> &[String] {
        &self.actions[agent.index()]
    }

    pub fn children(&self) -> &[NodeIx] {
        &self.children
    }

    /// Iterates over every decider profile (action positions in deciders
    /// order) together with the child it selects.
    pub fn profiles(&self) -> impl Iterator<Item = (Vec<ActionIx>, NodeIx)> + '_ {
        let counts: Vec<usize> = self
            .deciders
            .iter()
            .map(|a| self.actions[a.index()].len())
            .collect();
        self.table.iter().enumerate().map(move |(row, &target)| {
            let mut profile = vec![ActionIx(0); counts.len()];
            let mut rest = row;
            for (slot, &count) in profile.iter_mut().zip(&counts).rev() {
                *slot = ActionIx::new(rest % count);
                rest /= count;
            }
            (profile, target)
        })
    }

    /// The choice table itself, row-major over the deciders' action positions.
    pub fn table(&self) -> &[NodeIx] {
        &self.table
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Decision(DecisionNode),
    Leaf(Outcome),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct NodeData {
    name: String,
    kind: NodeKind,
}

const NO_CLASS: u32 = u32::MAX;

/// An agent's indistinguishability partition of the decision nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<u32>,
    classes: Vec<Vec<NodeIx>>,
}

impl Partition {
    fn singletons(nodes: &[NodeData]) -> Self {
        let mut class_of = vec![NO_CLASS; nodes.len()];
        let mut classes = Vec::new();
        for (i, node) in nodes.iter().enumerate() {
            if matches!(node.kind, NodeKind::Decision(_)) {
                class_of[i] = classes.len() as u32;
                classes.push(vec![NodeIx::new(i)]);
            }
        }
        Partition { class_of, classes }
    }

    /// Class index of a decision node, `None` for leaves.
    pub fn class_of(&self, node: NodeIx) -> Option<usize> {
        match self.class_of[node.index()] {
            NO_CLASS => None,
            c => Some(c as usize),
        }
    }

    /// Members of a class in preorder.
    pub fn class(&self, class: usize) -> &[NodeIx] {
        &self.classes[class]
    }

    pub fn classes(&self) -> &[Vec<NodeIx>] {
        &self.classes
    }

    pub fn is_trivial(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }
}

/// A validated decision-making mechanism. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mechanism {
    name: Option<String>,
    agents: Vec<String>,
    nodes: Vec<NodeData>,
    parent: Vec<Option<NodeIx>>,
    partitions: Vec<Partition>,
    trivial: Partition,
    /// `next[agent][node][action]`, sorted; empty for leaves.
    next: Vec<Vec<Vec<Vec<NodeIx>>>>,
}

impl Mechanism {
    /// Checks every structural invariant of `doc` and builds the mechanism,
    /// or returns all violations found.
    pub fn validate(doc: &MechanismDocument) -> Result<Mechanism, ValidationErrors> {
        Builder::new(doc).build()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn root(&self) -> NodeIx {
        NodeIx(0)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn nodes(&self) -> impl DoubleEndedIterator<Item = NodeIx> + ExactSizeIterator + Clone {
        (0..self.nodes.len()).map(NodeIx::new)
    }

    pub fn agents(&self) -> impl DoubleEndedIterator<Item = AgentIx> + ExactSizeIterator + Clone {
        (0..self.agents.len()).map(AgentIx::new)
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeIx> + '_ {
        self.nodes().filter(|&v| self.is_leaf(v))
    }

    pub fn decision_nodes(&self) -> impl Iterator<Item = NodeIx> + '_ {
        self.nodes().filter(|&v| !self.is_leaf(v))
    }

    pub fn node_name(&self, node: NodeIx) -> &str {
        &self.nodes[node.index()].name
    }

    pub fn agent_name(&self, agent: AgentIx) -> &str {
        &self.agents[agent.index()]
    }

    pub fn node_id(&self, name: &str) -> Result<NodeIx, MechanismError> {
        self.nodes
            .iter()
            .position(|n| n.name == name)
            .map(NodeIx::new)
            .ok_or_else(|| MechanismError::UnknownNode(name.to_string()))
    }

    pub fn agent_id(&self, name: &str) -> Result<AgentIx, MechanismError> {
        self.agents
            .iter()
            .position(|a| a == name)
            .map(AgentIx::new)
            .ok_or_else(|| MechanismError::UnknownAgent(name.to_string()))
    }

    /// Position of the named action in `agent`'s list at `node`.
    pub fn action_id(&self, agent: AgentIx, node: NodeIx, name: &str) -> Result<ActionIx, MechanismError> {
        let decision = self.require_decision(node)?;
        decision
            .actions(agent)
            .iter()
            .position(|a| a == name)
            .map(ActionIx::new)
            .ok_or_else(|| MechanismError::UnknownAction {
                node: self.node_name(node).to_string(),
                agent: self.agent_name(agent).to_string(),
                action: name.to_string(),
            })
    }

    pub fn kind(&self, node: NodeIx) -> &NodeKind {
        &self.nodes[node.index()].kind
    }

    pub fn is_leaf(&self, node: NodeIx) -> bool {
        matches!(self.kind(node), NodeKind::Leaf(_))
    }

    pub fn label(&self, node: NodeIx) -> Option<Outcome> {
        match self.kind(node) {
            NodeKind::Leaf(o) => Some(*o),
            NodeKind::Decision(_) => None,
        }
    }

    pub fn decision(&self, node: NodeIx) -> Option<&DecisionNode> {
        match self.kind(node) {
            NodeKind::Decision(d) => Some(d),
            NodeKind::Leaf(_) => None,
        }
    }

    fn require_decision(&self, node: NodeIx) -> Result<&DecisionNode, MechanismError> {
        self.decision(node)
            .ok_or_else(|| MechanismError::NotDecisionNode(self.node_name(node).to_string()))
    }

    /// Ordered action list of `agent` at a decision node (`[idle]` when the
    /// agent is not a decider there).
    pub fn actions(&self, agent: AgentIx, node: NodeIx) -> Result<&[String], MechanismError> {
        Ok(self.require_decision(node)?.actions(agent))
    }

    /// Number of actions of `agent` at `node`; zero for leaves.
    pub fn action_count(&self, agent: AgentIx, node: NodeIx) -> usize {
        self.next[agent.index()][node.index()].len()
    }

    pub fn parent(&self, node: NodeIx) -> Option<NodeIx> {
        self.parent[node.index()]
    }

    /// Children of `node`, empty for leaves, in order of first occurrence in
    /// the choice table.
    pub fn children(&self, node: NodeIx) -> &[NodeIx] {
        match self.kind(node) {
            NodeKind::Decision(d) => d.children(),
            NodeKind::Leaf(_) => &[],
        }
    }

    /// Children reachable from `node` when `agent` plays `action` and
    /// everybody else plays anything. Sorted by node index.
    pub fn next(&self, agent: AgentIx, action: ActionIx, node: NodeIx) -> Result<&[NodeIx], MechanismError> {
        self.require_decision(node)?;
        self.next[agent.index()][node.index()]
            .get(action.index())
            .map(Vec::as_slice)
            .ok_or_else(|| MechanismError::UnknownAction {
                node: self.node_name(node).to_string(),
                agent: self.agent_name(agent).to_string(),
                action: format!("#{}", action.index()),
            })
    }

    /// Unchecked variant of [`Mechanism::next`] for hot loops; empty for leaves.
    pub(crate) fn next_raw(&self, agent: AgentIx, action: usize, node: NodeIx) -> &[NodeIx] {
        &self.next[agent.index()][node.index()][action]
    }

    /// Union of `next` over a set of decision nodes sharing the agent's
    /// action list.
    pub fn next_of_class(
        &self,
        agent: AgentIx,
        action: ActionIx,
        nodes: &[NodeIx],
    ) -> Result<Vec<NodeIx>, MechanismError> {
        let mut out = Vec::new();
        let mut reference: Option<(NodeIx, &[String])> = None;
        for &v in nodes {
            let actions = self.actions(agent, v)?;
            match reference {
                None => reference = Some((v, actions)),
                Some((first, expected)) if expected != actions => {
                    return Err(MechanismError::ActionMismatch {
                        agent: self.agent_name(agent).to_string(),
                        first: self.node_name(first).to_string(),
                        second: self.node_name(v).to_string(),
                    })
                }
                Some(_) => {}
            }
            out.extend_from_slice(self.next(agent, action, v)?);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// The unique root-to-`node` path.
    pub fn decision_path(&self, node: NodeIx) -> Vec<NodeIx> {
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Indistinguishability partition of `agent`.
    pub fn partition(&self, agent: AgentIx) -> &Partition {
        &self.partitions[agent.index()]
    }

    /// The partition in which every decision node is alone.
    pub fn trivial_partition(&self) -> &Partition {
        &self.trivial
    }

    /// `[node]_agent`.
    pub fn equivalence_class(&self, agent: AgentIx, node: NodeIx) -> Result<&[NodeIx], MechanismError> {
        self.require_decision(node)?;
        let p = self.partition(agent);
        let c = p.class_of(node).expect("decision nodes always have a class");
        Ok(p.class(c))
    }

    pub fn is_perfect_information(&self) -> bool {
        self.partitions.iter().all(Partition::is_trivial)
    }

    /// A copy of this mechanism with every partition made trivial.
    pub fn with_perfect_information(&self) -> Mechanism {
        let mut m = self.clone();
        for p in &mut m.partitions {
            *p = m.trivial.clone();
        }
        m
    }

    /// Rebuilds the document this mechanism was validated from, in canonical
    /// order.
    pub fn to_document(&self) -> MechanismDocument {
        use crate::text::{DecisionDecl, IndistDecl};
        let nodes = self
            .nodes
            .iter()
            .map(|n| match &n.kind {
                NodeKind::Leaf(o) => NodeDecl::Leaf {
                    id: n.name.clone(),
                    label: *o,
                },
                NodeKind::Decision(d) => NodeDecl::Decision(DecisionDecl {
                    id: n.name.clone(),
                    deciders: d.deciders.iter().map(|&a| self.agent_name(a).to_string()).collect(),
                    actions: d
                        .deciders
                        .iter()
                        .map(|&a| (self.agent_name(a).to_string(), d.actions(a).to_vec()))
                        .collect(),
                    map: d
                        .profiles()
                        .map(|(profile, target)| {
                            let tuple = profile
                                .iter()
                                .zip(&d.deciders)
                                .map(|(act, &a)| d.actions(a)[act.index()].clone())
                                .collect();
                            (tuple, self.node_name(target).to_string())
                        })
                        .collect(),
                }),
            })
            .collect();
        let mut indist = Vec::new();
        for a in self.agents() {
            for class in self.partition(a).classes() {
                if class.len() > 1 {
                    indist.push(IndistDecl {
                        agent: self.agent_name(a).to_string(),
                        nodes: class.iter().map(|&v| self.node_name(v).to_string()).collect(),
                    });
                }
            }
        }
        MechanismDocument {
            name: self.name.clone(),
            agents: self.agents.clone(),
            root: self.node_name(self.root()).to_string(),
            nodes,
            indist,
        }
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        crate::text::serialize(&self.to_document())
    }
}

/// Collects every violation before giving up.
/// Actions, choice rows and targets of one decision node, by declaration index.
type DecisionTable = (Vec<usize>, Vec<Vec<String>>, Vec<usize>);

struct Builder<'a> {
    doc: &'a MechanismDocument,
    errors: Vec<ValidationError>,
}

impl<'a> Builder<'a> {
    fn new(doc: &'a MechanismDocument) -> Self {
        Builder { doc, errors: Vec::new() }
    }

    fn ident(&mut self, kind: &'static str, id: &str) {
        if !is_identifier(id) {
            self.errors.push(ValidationError::InvalidIdentifier {
                kind,
                id: id.to_string(),
            });
        }
    }

    fn build(mut self) -> Result<Mechanism, ValidationErrors> {
        let doc = self.doc;

        // Agents.
        if doc.agents.is_empty() {
            self.errors.push(ValidationError::NoAgents);
        }
        let mut agent_ix: HashMap<&str, usize> = HashMap::new();
        for (i, a) in doc.agents.iter().enumerate() {
            self.ident("agent", a);
            if agent_ix.insert(a.as_str(), i).is_some() {
                self.errors.push(ValidationError::DuplicateId {
                    kind: "agent",
                    id: a.clone(),
                });
            }
        }

        // Node declarations.
        let mut decl_ix: HashMap<&str, usize> = HashMap::new();
        for (i, n) in doc.nodes.iter().enumerate() {
            self.ident("node", n.id());
            if decl_ix.insert(n.id(), i).is_some() {
                self.errors.push(ValidationError::DuplicateId {
                    kind: "node",
                    id: n.id().to_string(),
                });
            }
        }
        if !decl_ix.contains_key(doc.root.as_str()) {
            self.errors.push(ValidationError::UnknownNode {
                node: doc.root.clone(),
                context: "root".to_string(),
            });
        }

        // Per decision node: action lists and choice tables, still by
        // declaration index.
        let agent_count = doc.agents.len();
        let mut tables: HashMap<usize, DecisionTable> = HashMap::new();
        let mut undeclared_targets: Vec<String> = Vec::new();
        for (i, n) in doc.nodes.iter().enumerate() {
            let NodeDecl::Decision(d) = n else { continue };
            if let Some(entry) = self.decision_table(d, &agent_ix, &decl_ix, &mut undeclared_targets) {
                tables.insert(i, entry);
            }
        }
        for t in undeclared_targets {
            self.errors.push(ValidationError::UnlabeledLeaf { node: t });
        }

        // Tree shape.
        let mut parents: Vec<Vec<usize>> = vec![Vec::new(); doc.nodes.len()];
        for (&i, (_, _, table)) in &tables {
            let mut seen = HashSet::new();
            for &t in table {
                if seen.insert(t) {
                    parents[t].push(i);
                }
            }
        }
        let root = decl_ix.get(doc.root.as_str()).copied();
        for (i, ps) in parents.iter_mut().enumerate() {
            ps.sort_unstable();
            let id = doc.nodes[i].id().to_string();
            if Some(i) == root {
                if !ps.is_empty() {
                    self.errors.push(ValidationError::NonTree {
                        node: id,
                        reason: "the root has a parent".to_string(),
                    });
                }
            } else if ps.len() > 1 {
                let names: Vec<&str> = ps.iter().map(|&p| doc.nodes[p].id()).collect();
                self.errors.push(ValidationError::NonTree {
                    node: id,
                    reason: format!("{} parents ({})", ps.len(), names.join(", ")),
                });
            }
        }
        let mut order = Vec::new();
        if let Some(root) = root {
            // Preorder; `visited` guards against cycles through multiply
            // parented nodes, which were reported above.
            let mut visited = vec![false; doc.nodes.len()];
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                if std::mem::replace(&mut visited[v], true) {
                    continue;
                }
                order.push(v);
                if let Some((_, _, table)) = tables.get(&v) {
                    let mut kids: Vec<usize> = Vec::new();
                    for &t in table {
                        if !kids.contains(&t) {
                            kids.push(t);
                        }
                    }
                    stack.extend(kids.into_iter().rev());
                }
            }
            for (i, seen) in visited.iter().enumerate() {
                if !seen && parents[i].len() <= 1 {
                    self.errors.push(ValidationError::NonTree {
                        node: doc.nodes[i].id().to_string(),
                        reason: "unreachable from the root".to_string(),
                    });
                }
            }
        }

        // Partitions, keyed by declaration index.
        let mut class_decls: Vec<Vec<Vec<usize>>> = vec![Vec::new(); agent_count];
        let mut owner: Vec<HashMap<usize, usize>> = vec![HashMap::new(); agent_count];
        for decl in &doc.indist {
            let Some(&a) = agent_ix.get(decl.agent.as_str()) else {
                self.errors.push(ValidationError::UnknownAgent {
                    agent: decl.agent.clone(),
                    context: "indist".to_string(),
                });
                continue;
            };
            let mut cell = Vec::new();
            for name in &decl.nodes {
                let Some(&v) = decl_ix.get(name.as_str()) else {
                    self.errors.push(ValidationError::UnknownNode {
                        node: name.clone(),
                        context: format!("indist {}", decl.agent),
                    });
                    continue;
                };
                if matches!(doc.nodes[v], NodeDecl::Leaf { .. }) {
                    self.errors.push(ValidationError::MixedClass {
                        agent: decl.agent.clone(),
                        node: name.clone(),
                    });
                    continue;
                }
                if owner[a].insert(v, class_decls[a].len()).is_some() || cell.contains(&v) {
                    self.errors.push(ValidationError::OverlappingClasses {
                        agent: decl.agent.clone(),
                        node: name.clone(),
                    });
                    continue;
                }
                cell.push(v);
            }
            for w in cell.windows(2) {
                let (Some(x), Some(y)) = (tables.get(&w[0]), tables.get(&w[1])) else { continue };
                if x.1[a] != y.1[a] {
                    self.errors.push(ValidationError::ActionMismatch {
                        agent: decl.agent.clone(),
                        first: doc.nodes[w[0]].id().to_string(),
                        second: doc.nodes[w[1]].id().to_string(),
                    });
                }
            }
            class_decls[a].push(cell);
        }

        if !self.errors.is_empty() {
            return Err(ValidationErrors(self.errors));
        }

        // Reindex into preorder.
        let mut new_ix = vec![usize::MAX; doc.nodes.len()];
        for (pos, &old) in order.iter().enumerate() {
            new_ix[old] = pos;
        }
        let mut nodes = Vec::with_capacity(order.len());
        let mut parent = vec![None; order.len()];
        for &old in &order {
            let name = doc.nodes[old].id().to_string();
            let kind = match &doc.nodes[old] {
                NodeDecl::Leaf { label, .. } => NodeKind::Leaf(*label),
                NodeDecl::Decision(_) => {
                    let (deciders, actions, table) = tables.remove(&old).expect("table built");
                    let table: Vec<NodeIx> = table.into_iter().map(|t| NodeIx::new(new_ix[t])).collect();
                    let mut children: Vec<NodeIx> = Vec::new();
                    for &t in &table {
                        if !children.contains(&t) {
                            children.push(t);
                            parent[t.index()] = Some(NodeIx::new(new_ix[old]));
                        }
                    }
                    NodeKind::Decision(DecisionNode {
                        deciders: deciders.into_iter().map(AgentIx::new).collect(),
                        actions,
                        table,
                        children,
                    })
                }
            };
            nodes.push(NodeData { name, kind });
        }

        let trivial = Partition::singletons(&nodes);
        let partitions = (0..agent_count)
            .map(|a| {
                let mut class_of = trivial.class_of.clone();
                let mut classes: Vec<Vec<NodeIx>> = Vec::new();
                // Declared cells first, then the remaining singletons; both
                // sorted so that equal partitions compare equal.
                let mut cells: Vec<Vec<NodeIx>> = class_decls[a]
                    .iter()
                    .map(|cell| {
                        let mut c: Vec<NodeIx> = cell.iter().map(|&v| NodeIx::new(new_ix[v])).collect();
                        c.sort_unstable();
                        c
                    })
                    .filter(|c| !c.is_empty())
                    .collect();
                let covered: HashSet<NodeIx> = cells.iter().flatten().copied().collect();
                for (i, n) in nodes.iter().enumerate() {
                    if matches!(n.kind, NodeKind::Decision(_)) && !covered.contains(&NodeIx::new(i)) {
                        cells.push(vec![NodeIx::new(i)]);
                    }
                }
                cells.sort_unstable();
                for cell in cells {
                    for &v in &cell {
                        class_of[v.index()] = classes.len() as u32;
                    }
                    classes.push(cell);
                }
                Partition { class_of, classes }
            })
            .collect();

        let next = compute_next(&nodes, agent_count);
        Ok(Mechanism {
            name: doc.name.clone(),
            agents: doc.agents.clone(),
            nodes,
            parent,
            partitions,
            trivial,
            next,
        })
    }

    /// Checks one decision declaration; returns (deciders, per-agent action
    /// lists, choice table of declaration indices) when it is well formed.
    #[allow(clippy::type_complexity)]
    fn decision_table(
        &mut self,
        d: &crate::text::DecisionDecl,
        agent_ix: &HashMap<&str, usize>,
        decl_ix: &HashMap<&str, usize>,
        undeclared: &mut Vec<String>,
    ) -> Option<DecisionTable> {
        let node = d.id.clone();
        let errors_before = self.errors.len();
        if d.deciders.is_empty() {
            self.errors.push(ValidationError::NoDeciders { node: node.clone() });
        }
        let mut deciders = Vec::new();
        for name in &d.deciders {
            match agent_ix.get(name.as_str()) {
                Some(&a) if deciders.contains(&a) => self.errors.push(ValidationError::DuplicateId {
                    kind: "decider",
                    id: format!("{name} at {node}"),
                }),
                Some(&a) => deciders.push(a),
                None => self.errors.push(ValidationError::UnknownAgent {
                    agent: name.clone(),
                    context: format!("deciders of {node}"),
                }),
            }
        }
        let mut actions: Vec<Option<Vec<String>>> = vec![None; agent_ix.len()];
        for (name, list) in &d.actions {
            let Some(&a) = agent_ix.get(name.as_str()) else {
                self.errors.push(ValidationError::UnknownAgent {
                    agent: name.clone(),
                    context: format!("actions of {node}"),
                });
                continue;
            };
            if !deciders.contains(&a) {
                self.errors.push(ValidationError::ActionsForNonDecider {
                    node: node.clone(),
                    agent: name.clone(),
                });
                continue;
            }
            if actions[a].is_some() {
                self.errors.push(ValidationError::DuplicateId {
                    kind: "action list",
                    id: format!("{name} at {node}"),
                });
                continue;
            }
            if list.is_empty() {
                self.errors.push(ValidationError::EmptyActionSet {
                    node: node.clone(),
                    agent: name.clone(),
                });
            }
            let mut seen = HashSet::new();
            for act in list {
                self.ident("action", act);
                if !seen.insert(act.as_str()) {
                    self.errors.push(ValidationError::DuplicateId {
                        kind: "action",
                        id: format!("{act} of {name} at {node}"),
                    });
                }
            }
            actions[a] = Some(list.clone());
        }
        for &a in &deciders {
            if actions[a].is_none() {
                self.errors.push(ValidationError::EmptyActionSet {
                    node: node.clone(),
                    agent: self.doc.agents[a].clone(),
                });
            }
        }
        if self.errors.len() > errors_before {
            return None;
        }

        let counts: Vec<usize> = deciders.iter().map(|&a| actions[a].as_ref().unwrap().len()).collect();
        let rows: usize = counts.iter().product();
        let mut table: Vec<Option<usize>> = vec![None; rows];
        let mut ok = true;
        for (tuple, target) in &d.map {
            if tuple.len() != deciders.len() {
                self.errors.push(ValidationError::ProfileArity {
                    node: node.clone(),
                    expected: deciders.len(),
                    found: tuple.len(),
                });
                ok = false;
                continue;
            }
            let mut row = 0;
            let mut known = true;
            for ((act, &a), &count) in tuple.iter().zip(&deciders).zip(&counts) {
                match actions[a].as_ref().unwrap().iter().position(|x| x == act) {
                    Some(p) => row = row * count + p,
                    None => {
                        self.errors.push(ValidationError::UnknownAction {
                            node: node.clone(),
                            agent: self.doc.agents[a].clone(),
                            action: act.clone(),
                        });
                        known = false;
                    }
                }
            }
            let Some(&t) = decl_ix.get(target.as_str()) else {
                if !undeclared.contains(target) {
                    undeclared.push(target.clone());
                }
                ok = false;
                continue;
            };
            if !known {
                ok = false;
                continue;
            }
            match table[row] {
                Some(prev) if prev != t => {
                    self.errors.push(ValidationError::ConflictingProfile {
                        node: node.clone(),
                        profile: format!("[{}]", tuple.join(", ")),
                    });
                    ok = false;
                }
                _ => table[row] = Some(t),
            }
        }
        if !ok {
            return None;
        }
        let mut full = Vec::with_capacity(rows);
        for (row, entry) in table.iter().enumerate() {
            match entry {
                Some(t) => full.push(*t),
                None => {
                    let mut rest = row;
                    let mut tuple = vec![String::new(); counts.len()];
                    for ((slot, &count), &a) in tuple.iter_mut().zip(&counts).zip(&deciders).rev() {
                        *slot = actions[a].as_ref().unwrap()[rest % count].clone();
                        rest /= count;
                    }
                    self.errors.push(ValidationError::PartialChoiceFunction {
                        node: node.clone(),
                        profile: format!("[{}]", tuple.join(", ")),
                    });
                    ok = false;
                }
            }
        }
        if !ok {
            return None;
        }
        let actions = actions
            .into_iter()
            .map(|list| list.unwrap_or_else(|| vec![IDLE.to_string()]))
            .collect();
        Some((deciders, actions, full))
    }
}

fn compute_next(nodes: &[NodeData], agent_count: usize) -> Vec<Vec<Vec<Vec<NodeIx>>>> {
    (0..agent_count)
        .map(|a| {
            let agent = AgentIx::new(a);
            nodes
                .iter()
                .map(|n| match &n.kind {
                    NodeKind::Leaf(_) => Vec::new(),
                    NodeKind::Decision(d) => {
                        let mut sets = vec![Vec::new(); d.actions(agent).len()];
                        match d.decider_position(agent) {
                            Some(pos) => {
                                for (profile, target) in d.profiles() {
                                    sets[profile[pos].index()].push(target);
                                }
                            }
                            None => sets[0].extend_from_slice(d.children()),
                        }
                        for s in &mut sets {
                            s.sort_unstable();
                            s.dedup();
                        }
                        sets
                    }
                })
                .collect()
        })
        .collect()
}
