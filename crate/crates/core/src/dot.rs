//! Graphviz export.

use std::fmt::Write;

use crate::mechanism::{Mechanism, NodeKind};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Decision nodes are circles, leaves boxes; tree edges are labelled with
/// the decider profiles selecting them, and each pair of indistinguishable
/// nodes gets a dashed undirected edge labelled with the agent.
pub fn export_dot(m: &Mechanism) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(m.name().unwrap_or("mechanism"))).unwrap();
    for v in m.nodes() {
        let name = m.node_name(v);
        match m.kind(v) {
            NodeKind::Decision(_) => writeln!(out, "  {} [shape=circle];", quote(name)).unwrap(),
            NodeKind::Leaf(o) => writeln!(out, "  {} [shape=box, label={}];", quote(name), quote(&format!("{name}\\n{o}"))).unwrap(),
        }
    }
    for v in m.decision_nodes() {
        let dec = m.decision(v).unwrap();
        for &child in dec.children() {
            let profiles: Vec<String> = dec
                .profiles()
                .filter(|&(_, t)| t == child)
                .map(|(profile, _)| {
                    let names: Vec<&str> = profile
                        .iter()
                        .zip(dec.deciders())
                        .map(|(act, &agent)| dec.actions(agent)[act.index()].as_str())
                        .collect();
                    format!("({})", names.join(","))
                })
                .collect();
            writeln!(out, "  {} -> {} [label={}];", quote(m.node_name(v)), quote(m.node_name(child)), quote(&profiles.join(" "))).unwrap();
        }
    }
    for a in m.agents() {
        for class in m.partition(a).classes() {
            for (i, &u) in class.iter().enumerate() {
                for &w in &class[i + 1..] {
                    writeln!(
                        out,
                        "  {} -> {} [dir=none, style=dashed, constraint=false, label={}];",
                        quote(m.node_name(u)),
                        quote(m.node_name(w)),
                        quote(m.agent_name(a))
                    )
                    .unwrap();
                }
            }
        }
    }
    out.push_str("}\n");
    out
}
