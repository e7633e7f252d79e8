//! Random mechanisms built from a byte string, for property tests.

use respgap_core::{DecisionDecl, IndistDecl, Mechanism, MechanismDocument, NodeDecl, Outcome};

struct Bytes<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Bytes<'_> {
    fn next(&mut self, bound: usize) -> usize {
        let b = self.data.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b as usize % bound
    }
}

struct Gen<'a> {
    bytes: Bytes<'a>,
    agents: Vec<String>,
    nodes: Vec<NodeDecl>,
    budget: usize,
}

impl Gen<'_> {
    fn node(&mut self, depth: usize) -> String {
        let id = format!("n{}", self.nodes.len());
        let leaf = depth == 0 || self.budget == 0 || self.bytes.next(3) == 0;
        if leaf {
            let label = if self.bytes.next(2) == 0 { Outcome::Yes } else { Outcome::No };
            self.nodes.push(NodeDecl::Leaf { id: id.clone(), label });
            return id;
        }
        self.budget -= 1;
        let slot = self.nodes.len();
        self.nodes.push(NodeDecl::Leaf { id: id.clone(), label: Outcome::Yes });

        let n = self.agents.len();
        let mask = 1 + self.bytes.next((1 << n) - 1);
        let deciders: Vec<String> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.agents[i].clone()).collect();
        let actions: Vec<(String, Vec<String>)> = deciders
            .iter()
            .map(|d| (d.clone(), (0..1 + self.bytes.next(3)).map(|k| format!("a{k}")).collect()))
            .collect();
        let mut profiles: Vec<Vec<String>> = vec![Vec::new()];
        for (_, list) in &actions {
            profiles = profiles
                .into_iter()
                .flat_map(|p| list.iter().map(move |x| [p.clone(), vec![x.clone()]].concat()))
                .collect();
        }
        let width = 1 + self.bytes.next(3);
        let picks: Vec<usize> = profiles.iter().map(|_| self.bytes.next(width)).collect();
        let mut child_ids: Vec<(usize, String)> = Vec::new();
        let mut map = Vec::new();
        for (profile, pick) in profiles.into_iter().zip(picks) {
            let target = match child_ids.iter().find(|(k, _)| *k == pick) {
                Some((_, id)) => id.clone(),
                None => {
                    let id = self.node(depth - 1);
                    child_ids.push((pick, id.clone()));
                    id
                }
            };
            map.push((profile, target));
        }
        self.nodes[slot] = NodeDecl::Decision(DecisionDecl { id: id.clone(), deciders, actions, map });
        id
    }
}

/// A mechanism with up to three agents, depth at most three and at most
/// `max_decisions` decision nodes, with random indistinguishability
/// classes among nodes offering an agent the same actions.
pub fn mechanism_from_bytes(data: &[u8], max_decisions: usize) -> Mechanism {
    let mut bytes = Bytes { data, pos: 0 };
    let agents: Vec<String> = (0..1 + bytes.next(3)).map(|i| format!("A{i}")).collect();
    let mut g = Gen { bytes, agents, nodes: Vec::new(), budget: max_decisions };
    let root = g.node(3);

    let mut indist = Vec::new();
    for agent in g.agents.clone() {
        let mut groups: Vec<(Vec<String>, Vec<Vec<String>>)> = Vec::new();
        for decl in &g.nodes {
            let NodeDecl::Decision(d) = decl else { continue };
            let list = d
                .actions
                .iter()
                .find(|(a, _)| *a == agent)
                .map(|(_, l)| l.clone())
                .unwrap_or_else(|| vec!["idle".to_string()]);
            let group = match groups.iter().position(|(l, _)| *l == list) {
                Some(i) => i,
                None => {
                    groups.push((list, Vec::new()));
                    groups.len() - 1
                }
            };
            let cells = &mut groups[group].1;
            let pick = g.bytes.next(cells.len() + 1);
            if pick == cells.len() {
                cells.push(vec![d.id.clone()]);
            } else {
                cells[pick].push(d.id.clone());
            }
        }
        for (_, cells) in groups {
            for nodes in cells.into_iter().filter(|c| c.len() > 1) {
                indist.push(IndistDecl { agent: agent.clone(), nodes });
            }
        }
    }
    let doc = MechanismDocument { name: None, agents: g.agents, root, nodes: g.nodes, indist };
    Mechanism::validate(&doc).expect("generated documents are valid")
}
