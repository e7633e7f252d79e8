//! Exhaustive generation of mechanisms up to relabeling of nodes and actions.
//!
//! Trees are built bottom-up by depth. A decision node is a decider set, an
//! action count per decider, a surjective choice table written as a
//! restricted growth string over profiles (child blocks numbered by first
//! use), and one canonical subtree per block. Among all action relabelings
//! of a node only the one giving the lexicographically least (table,
//! children) pair is kept, which makes every subtree the unique
//! representative of its isomorphism class. Partitions are then enumerated
//! per tree and reduced modulo the tree's automorphisms.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use respgap_core::{DecisionDecl, IndistDecl, Mechanism, MechanismDocument, NodeDecl, Outcome};

use crate::config::EnumerationConfig;

/// Marks leaves in a per-node class label vector.
pub const NO_CLASS: u32 = u32::MAX;

/// A tree in preorder with positional names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatTree {
    pub nodes: Vec<FlatNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FlatNode {
    Leaf(Outcome),
    Decision(FlatDecision),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatDecision {
    /// Agent indices, ascending.
    pub deciders: Vec<usize>,
    /// Action count of each decider.
    pub counts: Vec<usize>,
    /// Child block of each profile, row-major with the last decider
    /// fastest; blocks are numbered by first use.
    pub table: Vec<usize>,
    /// Node index of each block's child.
    pub children: Vec<usize>,
}

/// Class label of every node for every agent, `labels[agent][node]`,
/// numbered by first occurrence in preorder; `NO_CLASS` on leaves.
pub type Labels = Vec<Vec<u32>>;

/// Action names by position, `names[agent][node][position]`; empty where
/// the agent is idle. Positions keep the tree's table, so two members of a
/// class whose names differ route the same named action differently.
pub type Names = Vec<Vec<Vec<u8>>>;

/// Indistinguishability classes plus action naming.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partitions {
    pub labels: Labels,
    pub names: Names,
}

/// One mechanism to check: a tree plus optional partitions (trivial when
/// absent).
#[derive(Clone, Debug)]
pub struct Candidate {
    pub tree: Arc<FlatTree>,
    pub partitions: Option<Partitions>,
}

pub fn agent_name(i: usize) -> String {
    const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    match LETTERS.get(i) {
        Some(&c) => (c as char).to_string(),
        None => format!("A{i}"),
    }
}

impl FlatTree {
    pub fn decision_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, FlatNode::Decision(_))).count()
    }

    /// Position-order names for every agent at every decision node.
    pub fn identity_names(&self, agents: usize) -> Names {
        (0..agents)
            .map(|a| {
                self.nodes
                    .iter()
                    .map(|n| match n {
                        FlatNode::Decision(d) => match d.deciders.iter().position(|&x| x == a) {
                            Some(k) => (0..d.counts[k] as u8).collect(),
                            None => Vec::new(),
                        },
                        FlatNode::Leaf(_) => Vec::new(),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_document(&self, agents: usize, partitions: Option<&Partitions>) -> MechanismDocument {
        let agent_names: Vec<String> = (0..agents).map(agent_name).collect();
        let node_name = |i: usize| format!("n{i}");
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| match n {
                FlatNode::Leaf(o) => NodeDecl::Leaf { id: node_name(i), label: *o },
                FlatNode::Decision(d) => {
                    let actions: Vec<(String, Vec<String>)> = d
                        .deciders
                        .iter()
                        .zip(&d.counts)
                        .map(|(&a, &k)| (agent_names[a].clone(), (0..k).map(|x| format!("a{x}")).collect()))
                        .collect();
                    let map = d
                        .table
                        .iter()
                        .enumerate()
                        .map(|(p, &block)| {
                            let mut rest = p;
                            let mut tuple = vec![String::new(); d.counts.len()];
                            for k in (0..d.counts.len()).rev() {
                                let x = rest % d.counts[k];
                                let name = partitions.map_or(x, |p| p.names[d.deciders[k]][i][x] as usize);
                                tuple[k] = format!("a{name}");
                                rest /= d.counts[k];
                            }
                            (tuple, node_name(d.children[block]))
                        })
                        .collect();
                    NodeDecl::Decision(DecisionDecl {
                        id: node_name(i),
                        deciders: d.deciders.iter().map(|&a| agent_names[a].clone()).collect(),
                        actions,
                        map,
                    })
                }
            })
            .collect();
        let mut indist = Vec::new();
        if let Some(p) = partitions {
            for (a, row) in p.labels.iter().enumerate() {
                let classes = row.iter().filter(|&&c| c != NO_CLASS).max().map_or(0, |&c| c as usize + 1);
                for c in 0..classes as u32 {
                    let members: Vec<String> = (0..row.len()).filter(|&i| row[i] == c).map(node_name).collect();
                    if members.len() > 1 {
                        indist.push(IndistDecl { agent: agent_names[a].clone(), nodes: members });
                    }
                }
            }
        }
        MechanismDocument {
            name: None,
            agents: agent_names,
            root: node_name(0),
            nodes,
            indist,
        }
    }

    pub fn to_mechanism(&self, agents: usize, partitions: Option<&Partitions>) -> Mechanism {
        Mechanism::validate(&self.to_document(agents, partitions)).expect("generated mechanisms are valid")
    }
}

impl Candidate {
    pub fn to_mechanism(&self, agents: usize) -> Mechanism {
        self.tree.to_mechanism(agents, self.partitions.as_ref())
    }
}

// ---- permutations ----

fn permutations(n: usize) -> Vec<Vec<usize>> {
    // Lexicographic order, identity first.
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { return out };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// An action relabeling of a node: one permutation per decider and the
/// induced map on profile indices.
#[derive(Clone, Debug)]
struct Relabel {
    per_decider: Vec<Vec<usize>>,
    profile: Vec<usize>,
}

fn relabelings(counts: &[usize]) -> Vec<Relabel> {
    let mut out = vec![Relabel { per_decider: Vec::new(), profile: vec![0] }];
    for &k in counts {
        let perms = permutations(k);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for r in &out {
            for p in &perms {
                let mut per_decider = r.per_decider.clone();
                per_decider.push(p.clone());
                let profile = r.profile.iter().flat_map(|&base| p.iter().map(move |&x| base * k + x)).collect();
                next.push(Relabel { per_decider, profile });
            }
        }
        out = next;
    }
    // Profiles were built in order `base * k + original`, so `profile[q]`
    // is the image of original profile `q`.
    out
}

/// Restricted growth strings of length `n` using exactly `blocks` values.
fn growth_strings(n: usize, blocks: usize) -> Vec<Vec<u8>> {
    fn go(prefix: &mut Vec<u8>, used: usize, n: usize, blocks: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == n {
            if used == blocks {
                out.push(prefix.clone());
            }
            return;
        }
        if blocks - used > n - prefix.len() {
            return;
        }
        for b in 0..=used.min(blocks - 1) {
            prefix.push(b as u8);
            go(prefix, used.max(b + 1), n, blocks, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 0, n, blocks, &mut out);
    out
}

// ---- canonical subtrees ----

struct Header {
    deciders: Vec<usize>,
    counts: Vec<usize>,
    profiles: usize,
    relabelings: Vec<Relabel>,
}

#[derive(Clone, Debug)]
enum Shape {
    Leaf(Outcome),
    Decision { header: u32, table: Vec<u8>, children: Vec<u32> },
}

#[derive(Clone, Debug)]
struct Entry {
    shape: Shape,
    decisions: usize,
}

/// Canonical subtrees of depth below the maximum, grouped by depth.
struct Library {
    headers: Vec<Header>,
    growth: HashMap<(usize, usize), Vec<Vec<u8>>>,
    entries: Vec<Entry>,
    /// `level_end[d]`: number of entries of depth at most `d`.
    level_end: Vec<usize>,
    max_children: usize,
    decision_cap: usize,
}

impl Library {
    fn new(cfg: &EnumerationConfig) -> Self {
        let mut headers = Vec::new();
        for mask in 1u32..(1 << cfg.agents) {
            let deciders: Vec<usize> = (0..cfg.agents).filter(|&a| mask >> a & 1 == 1).collect();
            let mut counts = vec![1; deciders.len()];
            loop {
                let profiles = counts.iter().product();
                headers.push(Header {
                    deciders: deciders.clone(),
                    counts: counts.clone(),
                    profiles,
                    relabelings: relabelings(&counts),
                });
                let Some(k) = (0..counts.len()).rev().find(|&k| counts[k] < cfg.max_actions) else { break };
                counts[k] += 1;
                for c in &mut counts[k + 1..] {
                    *c = 1;
                }
            }
        }
        let mut growth = HashMap::new();
        for h in &headers {
            for c in 1..=cfg.max_children.min(h.profiles) {
                growth.entry((h.profiles, c)).or_insert_with(|| growth_strings(h.profiles, c));
            }
        }
        let entries = vec![
            Entry { shape: Shape::Leaf(Outcome::Yes), decisions: 0 },
            Entry { shape: Shape::Leaf(Outcome::No), decisions: 0 },
        ];
        Library {
            headers,
            growth,
            entries,
            level_end: vec![2],
            max_children: cfg.max_children,
            decision_cap: cfg.decision_cap(),
        }
    }

    fn extend_to(&mut self, depth: usize) {
        while self.level_end.len() <= depth {
            let d = self.level_end.len();
            let mut fresh = Vec::new();
            let _ = self.each_at_depth(d, &mut |e| {
                fresh.push(e);
                ControlFlow::Continue(())
            });
            self.entries.extend(fresh);
            self.level_end.push(self.entries.len());
        }
    }

    /// Every canonical decision node of depth exactly `d >= 1` whose
    /// subtrees are library entries.
    fn each_at_depth(&self, d: usize, f: &mut dyn FnMut(Entry) -> ControlFlow<()>) -> ControlFlow<()> {
        if self.decision_cap == 0 {
            return ControlFlow::Continue(());
        }
        let pool = self.level_end[d - 1];
        let deep_from = if d >= 2 { self.level_end[d - 2] } else { 0 };
        for (hi, h) in self.headers.iter().enumerate() {
            for c in 1..=self.max_children.min(h.profiles) {
                for table in &self.growth[&(h.profiles, c)] {
                    let mut children = Vec::with_capacity(c);
                    self.tuples(h, table, c, pool, deep_from, 1, &mut children, hi as u32, f)?;
                }
            }
        }
        ControlFlow::Continue(())
    }

    #[allow(clippy::too_many_arguments)]
    fn tuples(
        &self,
        h: &Header,
        table: &[u8],
        c: usize,
        pool: usize,
        deep_from: usize,
        decisions: usize,
        children: &mut Vec<u32>,
        header: u32,
        f: &mut dyn FnMut(Entry) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if children.len() == c {
            if children.iter().all(|&x| (x as usize) < deep_from) {
                return ControlFlow::Continue(());
            }
            if !is_canonical(h, table, children) {
                return ControlFlow::Continue(());
            }
            return f(Entry {
                shape: Shape::Decision { header, table: table.to_vec(), children: children.clone() },
                decisions,
            });
        }
        for id in 0..pool {
            let extra = self.entries[id].decisions;
            if decisions + extra > self.decision_cap {
                continue;
            }
            children.push(id as u32);
            let flow = self.tuples(h, table, c, pool, deep_from, decisions + extra, children, header, f);
            children.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn flatten_shape(&self, shape: &Shape, out: &mut Vec<FlatNode>) -> usize {
        let at = out.len();
        match shape {
            Shape::Leaf(o) => out.push(FlatNode::Leaf(*o)),
            Shape::Decision { header, table, children } => {
                let h = &self.headers[*header as usize];
                out.push(FlatNode::Leaf(Outcome::Yes));
                let kids: Vec<usize> = children
                    .iter()
                    .map(|&id| self.flatten_shape(&self.entries[id as usize].shape, out))
                    .collect();
                out[at] = FlatNode::Decision(FlatDecision {
                    deciders: h.deciders.clone(),
                    counts: h.counts.clone(),
                    table: table.iter().map(|&b| b as usize).collect(),
                    children: kids,
                });
            }
        }
        at
    }

    fn flatten(&self, shape: &Shape) -> FlatTree {
        let mut nodes = Vec::new();
        self.flatten_shape(shape, &mut nodes);
        FlatTree { nodes }
    }
}

/// Whether no action relabeling yields a smaller (table, children) pair.
fn is_canonical(h: &Header, table: &[u8], children: &[u32]) -> bool {
    let mut permuted = vec![0u8; table.len()];
    let mut rename = [u8::MAX; 32];
    for r in h.relabelings.iter().skip(1) {
        for (q, &b) in table.iter().enumerate() {
            permuted[r.profile[q]] = b;
        }
        rename.fill(u8::MAX);
        let mut used = 0u8;
        let mut order = [0u8; 32];
        let mut decided = std::cmp::Ordering::Equal;
        for (q, &b) in permuted.iter().enumerate() {
            if rename[b as usize] == u8::MAX {
                rename[b as usize] = used;
                order[used as usize] = b;
                used += 1;
            }
            let cmp = rename[b as usize].cmp(&table[q]);
            if cmp != std::cmp::Ordering::Equal {
                decided = cmp;
                break;
            }
        }
        if decided == std::cmp::Ordering::Equal {
            decided = order[..children.len()]
                .iter()
                .map(|&old| children[old as usize])
                .cmp(children.iter().copied());
        }
        if decided == std::cmp::Ordering::Less {
            return false;
        }
    }
    true
}

// ---- automorphisms and partitions ----

/// A structure-preserving self-map of a tree: node images and, per node,
/// the action permutation of each decider.
/// A node pair of an isomorphism with the action permutation per agent.
type NodePairing = (usize, usize, Vec<Vec<usize>>);

/// One agent's class row with its action names.
type AgentOption = (Vec<u32>, Vec<Vec<u8>>);

#[derive(Clone, Debug)]
struct Automorphism {
    image: Vec<usize>,
    actions: Vec<Vec<Vec<usize>>>,
}

fn isomorphisms(tree: &FlatTree, v: usize, w: usize, cache: &mut HashMap<Vec<usize>, Vec<Relabel>>) -> Vec<Vec<NodePairing>> {
    match (&tree.nodes[v], &tree.nodes[w]) {
        (FlatNode::Leaf(a), FlatNode::Leaf(b)) => {
            if a == b {
                vec![vec![(v, w, Vec::new())]]
            } else {
                Vec::new()
            }
        }
        (FlatNode::Decision(x), FlatNode::Decision(y)) => {
            if x.deciders != y.deciders || x.counts != y.counts || x.children.len() != y.children.len() {
                return Vec::new();
            }
            let relabels = cache.entry(x.counts.clone()).or_insert_with(|| relabelings(&x.counts)).clone();
            let mut out = Vec::new();
            'relabel: for r in relabels {
                let mut block_map = vec![usize::MAX; x.children.len()];
                let mut hit = vec![false; y.children.len()];
                for (q, &bx) in x.table.iter().enumerate() {
                    let by = y.table[r.profile[q]];
                    if block_map[bx] == usize::MAX {
                        if hit[by] {
                            continue 'relabel;
                        }
                        block_map[bx] = by;
                        hit[by] = true;
                    } else if block_map[bx] != by {
                        continue 'relabel;
                    }
                }
                let mut combined = vec![vec![(v, w, r.per_decider.clone())]];
                for (bx, &cx) in x.children.iter().enumerate() {
                    let sub = isomorphisms(tree, cx, y.children[block_map[bx]], cache);
                    if sub.is_empty() {
                        continue 'relabel;
                    }
                    combined = combined
                        .into_iter()
                        .flat_map(|prefix| {
                            sub.iter().map(move |s| {
                                let mut p = prefix.clone();
                                p.extend(s.iter().cloned());
                                p
                            })
                        })
                        .collect();
                }
                out.extend(combined);
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Every automorphism except the identity.
fn automorphisms(tree: &FlatTree) -> Vec<Automorphism> {
    let mut cache = HashMap::new();
    isomorphisms(tree, 0, 0, &mut cache)
        .into_iter()
        .filter_map(|pairs| {
            let mut image = vec![0; tree.nodes.len()];
            let mut actions = vec![Vec::new(); tree.nodes.len()];
            for (v, w, perms) in pairs {
                image[v] = w;
                actions[v] = perms;
            }
            let identity = image.iter().enumerate().all(|(i, &j)| i == j)
                && actions.iter().flatten().all(|p| p.iter().enumerate().all(|(x, &y)| x == y));
            (!identity).then_some(Automorphism { image, actions })
        })
        .collect()
}

/// Renumbers labels by first occurrence in preorder.
fn normalize(row: &mut [u32]) {
    let mut rename: HashMap<u32, u32> = HashMap::new();
    for c in row.iter_mut().filter(|c| **c != NO_CLASS) {
        let next = rename.len() as u32;
        *c = *rename.entry(*c).or_insert(next);
    }
}

/// Groups of decision nodes that may share a class for `agent`: equal
/// action lists (`None` stands for the implicit idle action).
fn groups(tree: &FlatTree, agent: usize) -> Vec<Vec<usize>> {
    let mut keys: Vec<Option<usize>> = Vec::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, n) in tree.nodes.iter().enumerate() {
        let FlatNode::Decision(d) = n else { continue };
        let key = d.deciders.iter().position(|&a| a == agent).map(|k| d.counts[k]);
        match keys.iter().position(|&k| k == key) {
            Some(g) => out[g].push(i),
            None => {
                keys.push(key);
                out.push(vec![i]);
            }
        }
    }
    out
}

/// Partitions of a group of `n` nodes, each block of size `b` weighted by
/// `w^(b-1)` for the ways its members can line up their actions.
fn weighted_bell(n: usize, w: u128) -> u128 {
    // Stirling numbers of the second kind, row by row.
    let mut row = vec![1u128];
    for i in 1..=n {
        let mut next = vec![0u128; i + 1];
        for j in 1..=i {
            let stay = if j < i { row[j].saturating_mul(j as u128) } else { 0 };
            next[j] = row[j - 1].saturating_add(stay);
        }
        row = next;
    }
    (0..=n).fold(0u128, |acc, j| acc.saturating_add(row[j].saturating_mul(w.saturating_pow((n - j) as u32))))
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Action-list key of a group: the agent's action count, `None` when idle.
fn group_key(tree: &FlatTree, agent: usize, node: usize) -> Option<usize> {
    match &tree.nodes[node] {
        FlatNode::Decision(d) => d.deciders.iter().position(|&a| a == agent).map(|k| d.counts[k]),
        FlatNode::Leaf(_) => None,
    }
}

/// Partition choices before symmetry reduction.
pub(crate) fn raw_partition_count(tree: &FlatTree, agents: usize) -> u128 {
    (0..agents)
        .flat_map(|a| groups(tree, a).into_iter().map(move |g| (a, g)))
        .map(|(a, g)| weighted_bell(g.len(), group_key(tree, a, g[0]).map_or(1, factorial)))
        .fold(1u128, |acc, b| acc.saturating_mul(b))
}

/// All (labels, names) rows of one agent: a set partition per group, and
/// for every class member after the first an ordering of its actions.
fn agent_options(tree: &FlatTree, agent: usize) -> Vec<AgentOption> {
    let identity = tree.identity_names(agent + 1).swap_remove(agent);
    let mut rows = vec![vec![NO_CLASS; tree.nodes.len()]];
    let mut offset = 0u32;
    for group in groups(tree, agent) {
        let strings: Vec<Vec<u8>> = (1..=group.len()).flat_map(|b| growth_strings(group.len(), b)).collect();
        let mut next = Vec::with_capacity(rows.len() * strings.len());
        for row in &rows {
            for s in &strings {
                let mut r = row.clone();
                for (&node, &b) in group.iter().zip(s) {
                    r[node] = offset + b as u32;
                }
                next.push(r);
            }
        }
        rows = next;
        offset += group.len() as u32;
    }
    let mut out = Vec::new();
    for mut row in rows {
        normalize(&mut row);
        let mut options = vec![identity.clone()];
        let mut first_seen = std::collections::HashSet::new();
        for (i, &c) in row.iter().enumerate() {
            if c == NO_CLASS || first_seen.insert(c) || identity[i].len() < 2 {
                continue;
            }
            let perms = permutations(identity[i].len());
            options = options
                .into_iter()
                .flat_map(|names| {
                    perms.iter().map(move |p| {
                        let mut names = names.clone();
                        names[i] = p.iter().map(|&x| x as u8).collect();
                        names
                    })
                })
                .collect();
        }
        out.extend(options.into_iter().map(|names| (row.clone(), names)));
    }
    out
}

/// The image of a labeled mechanism under `g`, renamed so that the first
/// member of every class names its actions in position order.
fn apply(g: &Automorphism, tree: &FlatTree, p: &Partitions) -> Partitions {
    let n = tree.nodes.len();
    let mut labels = Vec::with_capacity(p.labels.len());
    let mut names = Vec::with_capacity(p.names.len());
    for (agent, (row, agent_names)) in p.labels.iter().zip(&p.names).enumerate() {
        let mut out = vec![NO_CLASS; n];
        let mut moved: Vec<Vec<u8>> = vec![Vec::new(); n];
        for (i, &c) in row.iter().enumerate() {
            if c == NO_CLASS {
                continue;
            }
            let w = g.image[i];
            out[w] = c;
            let FlatNode::Decision(d) = &tree.nodes[i] else { unreachable!() };
            if let Some(k) = d.deciders.iter().position(|&a| a == agent) {
                let perm = &g.actions[i][k];
                let mut m = vec![0u8; perm.len()];
                for (x, &y) in perm.iter().enumerate() {
                    m[y] = agent_names[i][x];
                }
                moved[w] = m;
            }
        }
        normalize(&mut out);
        // Rename relative to each class's first member.
        let mut inverse_of_first: HashMap<u32, Vec<u8>> = HashMap::new();
        for (w, &c) in out.iter().enumerate() {
            if c == NO_CLASS || moved[w].is_empty() {
                continue;
            }
            let inv = inverse_of_first.entry(c).or_insert_with(|| {
                let mut inv = vec![0u8; moved[w].len()];
                for (x, &y) in moved[w].iter().enumerate() {
                    inv[y as usize] = x as u8;
                }
                inv
            });
            moved[w] = moved[w].iter().map(|&y| inv[y as usize]).collect();
        }
        labels.push(out);
        names.push(moved);
    }
    Partitions { labels, names }
}

/// Every partition tuple of `tree` with its action alignments, one per
/// isomorphism class of labeled mechanisms.
pub fn each_partition(tree: &FlatTree, agents: usize, f: &mut dyn FnMut(Partitions) -> ControlFlow<()>) -> ControlFlow<()> {
    let per_agent: Vec<Vec<AgentOption>> = (0..agents).map(|a| agent_options(tree, a)).collect();
    let autos = automorphisms(tree);
    let mut index = vec![0usize; agents];
    loop {
        let p = Partitions {
            labels: index.iter().enumerate().map(|(a, &i)| per_agent[a][i].0.clone()).collect(),
            names: index.iter().enumerate().map(|(a, &i)| per_agent[a][i].1.clone()).collect(),
        };
        if autos.iter().all(|g| apply(g, tree, &p) >= p) {
            f(p)?;
        }
        let Some(a) = (0..agents).rev().find(|&a| index[a] + 1 < per_agent[a].len()) else {
            return ControlFlow::Continue(());
        };
        index[a] += 1;
        for i in &mut index[a + 1..] {
            *i = 0;
        }
    }
}

/// Every canonical tree within the bounds, shallow ones first.
pub fn each_tree(cfg: &EnumerationConfig, f: &mut dyn FnMut(FlatTree) -> ControlFlow<()>) -> ControlFlow<()> {
    let mut lib = Library::new(cfg);
    if cfg.max_depth > 0 {
        lib.extend_to(cfg.max_depth - 1);
    }
    for e in &lib.entries {
        f(lib.flatten(&e.shape))?;
    }
    if cfg.max_depth > 0 {
        lib.each_at_depth(cfg.max_depth, &mut |e| f(lib.flatten(&e.shape)))?;
    }
    ControlFlow::Continue(())
}
