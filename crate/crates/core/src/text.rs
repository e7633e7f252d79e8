//! Line-oriented mechanism text format.
//!
//! ```text
//! mechanism "Two-person Rule"
//! agents: P, A, B
//! root: u1
//! decision u1
//!   deciders: P
//!   actions: P = [Left, Right]
//!   map: [Left] -> v1 ; [Right] -> u2
//! leaf v1 = No
//! indist B: {u2, u3}
//! ```
//!
//! `#` starts a comment. Map tuples list actions in `deciders:` order.
//! Semantic checks (totality, tree shape, partitions) belong to
//! [`Mechanism::validate`](crate::Mechanism::validate).

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{LoadError, ParseError, ParseErrorKind, ParseErrors};
use crate::mechanism::{Mechanism, Outcome};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MechanismDocument {
    pub name: Option<String>,
    pub agents: Vec<String>,
    pub root: String,
    pub nodes: Vec<NodeDecl>,
    pub indist: Vec<IndistDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeDecl {
    Decision(DecisionDecl),
    Leaf { id: String, label: Outcome },
}

impl NodeDecl {
    pub fn id(&self) -> &str {
        match self {
            NodeDecl::Decision(d) => &d.id,
            NodeDecl::Leaf { id, .. } => id,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecisionDecl {
    pub id: String,
    pub deciders: Vec<String>,
    /// One entry per decider: agent and ordered action list.
    pub actions: Vec<(String, Vec<String>)>,
    /// Decider action tuple and target node.
    pub map: Vec<(Vec<String>, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndistDecl {
    pub agent: String,
    pub nodes: Vec<String>,
}

/// `[A-Za-z0-9_][A-Za-z0-9_-]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Parses and validates in one go.
pub fn load(text: &str) -> Result<Mechanism, LoadError> {
    let doc = parse(text)?;
    Ok(Mechanism::validate(&doc)?)
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

type Step<T> = Result<T, ParseError>;

impl<'a> Cursor<'a> {
    fn new(rest: &'a str, line: usize) -> Self {
        Cursor { rest, line }
    }

    fn fail<T>(&self, expected: impl Into<String>) -> Step<T> {
        Err(ParseError {
            line: self.line,
            kind: ParseErrorKind::Syntax {
                expected: expected.into(),
            },
        })
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        match self.rest.strip_prefix(token) {
            Some(r) => {
                self.rest = r;
                true
            }
            None => false,
        }
    }

    fn expect(&mut self, token: &str) -> Step<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.fail(format!("`{token}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Step<String> {
        self.skip_ws();
        let end = self
            .rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '-'))
            .unwrap_or(self.rest.len());
        let word = &self.rest[..end];
        if !is_identifier(word) {
            return self.fail(what);
        }
        self.rest = &self.rest[end..];
        Ok(word.to_string())
    }

    fn quoted(&mut self) -> Step<String> {
        self.skip_ws();
        let Some(r) = self.rest.strip_prefix('"') else {
            return self.fail("quoted mechanism name");
        };
        let Some(end) = r.find('"') else {
            return self.fail("closing `\"`");
        };
        self.rest = &r[end + 1..];
        Ok(r[..end].to_string())
    }

    /// `id (, id)*`
    fn ident_list(&mut self, what: &str) -> Step<Vec<String>> {
        let mut out = vec![self.ident(what)?];
        while self.eat(",") {
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    /// `open [id (, id)*] close`; empty lists are syntactically allowed.
    fn bracketed(&mut self, open: &str, close: &str, what: &str) -> Step<Vec<String>> {
        self.expect(open)?;
        if self.eat(close) {
            return Ok(Vec::new());
        }
        let items = self.ident_list(what)?;
        self.expect(close)?;
        Ok(items)
    }

    fn end(&mut self) -> Step<()> {
        self.skip_ws();
        if self.rest.is_empty() {
            Ok(())
        } else {
            self.fail("end of line")
        }
    }
}

#[derive(Default)]
struct OpenDecision {
    decl: DecisionDecl,
    line: usize,
    has_deciders: bool,
    has_actions: bool,
    has_map: bool,
}

#[derive(Default)]
struct Parser {
    doc: MechanismDocument,
    seen_name: bool,
    seen_agents: bool,
    seen_root: bool,
    node_ids: HashSet<String>,
    open: Option<OpenDecision>,
    errors: Vec<ParseError>,
}

impl Parser {
    fn duplicate(&mut self, line: usize, what: impl Into<String>) {
        self.errors.push(ParseError {
            line,
            kind: ParseErrorKind::DuplicateDeclaration { what: what.into() },
        });
    }

    fn close_decision(&mut self) {
        let Some(open) = self.open.take() else { return };
        for (present, what) in [
            (open.has_deciders, "`deciders:` line"),
            (open.has_actions, "`actions:` line"),
            (open.has_map, "`map:` line"),
        ] {
            if !present {
                self.errors.push(ParseError {
                    line: open.line,
                    kind: ParseErrorKind::Syntax {
                        expected: format!("{what} for decision {}", open.decl.id),
                    },
                });
            }
        }
        self.doc.nodes.push(NodeDecl::Decision(open.decl));
    }

    fn declare_node(&mut self, line: usize, id: &str) {
        if !self.node_ids.insert(id.to_string()) {
            self.duplicate(line, format!("node {id}"));
        }
    }

    fn line(&mut self, line: usize, text: &str) -> Step<()> {
        let mut c = Cursor::new(text, line);
        let keyword = {
            let end = text
                .find(|ch: char| ch.is_whitespace() || ch == ':')
                .unwrap_or(text.len());
            &text[..end]
        };
        match keyword {
            "deciders" | "actions" | "map" => return self.block_line(keyword, c),
            _ => self.close_decision(),
        }
        match keyword {
            "mechanism" => {
                c.expect("mechanism")?;
                let name = c.quoted()?;
                c.end()?;
                if std::mem::replace(&mut self.seen_name, true) {
                    self.duplicate(line, "mechanism name");
                } else {
                    self.doc.name = Some(name);
                }
            }
            "agents" => {
                c.expect("agents")?;
                c.expect(":")?;
                let agents = c.ident_list("agent identifier")?;
                c.end()?;
                if std::mem::replace(&mut self.seen_agents, true) {
                    self.duplicate(line, "agents");
                } else {
                    self.doc.agents = agents;
                }
            }
            "root" => {
                c.expect("root")?;
                c.expect(":")?;
                let root = c.ident("node identifier")?;
                c.end()?;
                if std::mem::replace(&mut self.seen_root, true) {
                    self.duplicate(line, "root");
                } else {
                    self.doc.root = root;
                }
            }
            "decision" => {
                c.expect("decision")?;
                let id = c.ident("node identifier")?;
                c.end()?;
                self.declare_node(line, &id);
                self.open = Some(OpenDecision {
                    decl: DecisionDecl {
                        id,
                        ..DecisionDecl::default()
                    },
                    line,
                    ..OpenDecision::default()
                });
            }
            "leaf" => {
                c.expect("leaf")?;
                let id = c.ident("node identifier")?;
                c.expect("=")?;
                let label = match c.ident("`Yes` or `No`")?.as_str() {
                    "Yes" => Outcome::Yes,
                    "No" => Outcome::No,
                    _ => return c.fail("`Yes` or `No`"),
                };
                c.end()?;
                self.declare_node(line, &id);
                self.doc.nodes.push(NodeDecl::Leaf { id, label });
            }
            "indist" => {
                c.expect("indist")?;
                let agent = c.ident("agent identifier")?;
                c.expect(":")?;
                let nodes = c.bracketed("{", "}", "node identifier")?;
                c.end()?;
                self.doc.indist.push(IndistDecl { agent, nodes });
            }
            _ => {
                return c.fail("one of `mechanism`, `agents:`, `root:`, `decision`, `leaf`, `indist`");
            }
        }
        Ok(())
    }

    fn block_line(&mut self, keyword: &str, mut c: Cursor<'_>) -> Step<()> {
        let line = c.line;
        let Some(open) = self.open.as_mut() else {
            return c.fail(format!("`decision` before `{keyword}:`"));
        };
        c.expect(keyword)?;
        c.expect(":")?;
        match keyword {
            "deciders" => {
                let deciders = c.ident_list("agent identifier")?;
                c.end()?;
                if std::mem::replace(&mut open.has_deciders, true) {
                    let what = format!("deciders of {}", open.decl.id);
                    self.duplicate(line, what);
                } else {
                    open.decl.deciders = deciders;
                }
            }
            "actions" => {
                let mut entries = Vec::new();
                loop {
                    let agent = c.ident("agent identifier")?;
                    c.expect("=")?;
                    let list = c.bracketed("[", "]", "action identifier")?;
                    entries.push((agent, list));
                    if !c.eat(";") {
                        break;
                    }
                }
                c.end()?;
                if std::mem::replace(&mut open.has_actions, true) {
                    let what = format!("actions of {}", open.decl.id);
                    self.duplicate(line, what);
                } else {
                    open.decl.actions = entries;
                }
            }
            _ => {
                // Several `map:` lines accumulate.
                loop {
                    let tuple = c.bracketed("[", "]", "action identifier")?;
                    c.expect("->")?;
                    let target = c.ident("node identifier")?;
                    open.decl.map.push((tuple, target));
                    if !c.eat(";") {
                        break;
                    }
                }
                c.end()?;
                open.has_map = true;
            }
        }
        Ok(())
    }
}

/// Parses a mechanism description. Reports every syntax error found.
pub fn parse(text: &str) -> Result<MechanismDocument, ParseErrors> {
    let mut p = Parser::default();
    for (i, raw) in text.lines().enumerate() {
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        if let Err(e) = p.line(i + 1, body) {
            p.errors.push(e);
        }
    }
    p.close_decision();
    let last = text.lines().count().max(1);
    if !p.seen_agents {
        p.errors.push(ParseError {
            line: last,
            kind: ParseErrorKind::Syntax {
                expected: "`agents:` line".to_string(),
            },
        });
    }
    if !p.seen_root {
        p.errors.push(ParseError {
            line: last,
            kind: ParseErrorKind::Syntax {
                expected: "`root:` line".to_string(),
            },
        });
    }
    if p.errors.is_empty() {
        Ok(p.doc)
    } else {
        p.errors.sort_by_key(|e| e.line);
        Err(ParseErrors(p.errors))
    }
}

/// Canonical text: agents as declared, nodes in preorder from the root, map
/// entries in lexicographic order of action positions, one `indist` line per
/// non-singleton class.
pub fn serialize(doc: &MechanismDocument) -> String {
    let mut out = String::new();
    if let Some(name) = &doc.name {
        writeln!(out, "mechanism \"{name}\"").unwrap();
    }
    writeln!(out, "agents: {}", doc.agents.join(", ")).unwrap();
    writeln!(out, "root: {}", doc.root).unwrap();

    let order = preorder(doc);
    let rank: HashMap<&str, usize> = order.iter().enumerate().map(|(r, &i)| (doc.nodes[i].id(), r)).collect();
    for &i in &order {
        match &doc.nodes[i] {
            NodeDecl::Leaf { id, label } => writeln!(out, "leaf {id} = {label}").unwrap(),
            NodeDecl::Decision(d) => {
                writeln!(out, "decision {}", d.id).unwrap();
                writeln!(out, "  deciders: {}", d.deciders.join(", ")).unwrap();
                let actions: Vec<String> = d
                    .actions
                    .iter()
                    .map(|(a, list)| format!("{a} = [{}]", list.join(", ")))
                    .collect();
                writeln!(out, "  actions: {}", actions.join(" ; ")).unwrap();
                let entries: Vec<String> = sorted_map(d)
                    .into_iter()
                    .map(|(tuple, target)| format!("[{}] -> {target}", tuple.join(", ")))
                    .collect();
                writeln!(out, "  map: {}", entries.join(" ; ")).unwrap();
            }
        }
    }

    let agent_rank: HashMap<&str, usize> = doc.agents.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    let mut classes: Vec<(usize, Vec<usize>, &IndistDecl)> = doc
        .indist
        .iter()
        .filter(|c| c.nodes.len() > 1)
        .map(|c| {
            let mut ranks: Vec<usize> = c.nodes.iter().map(|n| rank.get(n.as_str()).copied().unwrap_or(usize::MAX)).collect();
            ranks.sort_unstable();
            (agent_rank.get(c.agent.as_str()).copied().unwrap_or(usize::MAX), ranks, c)
        })
        .collect();
    classes.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    for (_, _, c) in classes {
        let mut nodes = c.nodes.clone();
        nodes.sort_by_key(|n| rank.get(n.as_str()).copied().unwrap_or(usize::MAX));
        writeln!(out, "indist {}: {{{}}}", c.agent, nodes.join(", ")).unwrap();
    }
    out
}

fn sorted_map(d: &DecisionDecl) -> Vec<&(Vec<String>, String)> {
    let position = |agent: &str, action: &str| -> usize {
        d.actions
            .iter()
            .find(|(a, _)| a == agent)
            .and_then(|(_, list)| list.iter().position(|x| x == action))
            .unwrap_or(usize::MAX)
    };
    let mut entries: Vec<&(Vec<String>, String)> = d.map.iter().collect();
    entries.sort_by_cached_key(|(tuple, _)| {
        tuple
            .iter()
            .zip(&d.deciders)
            .map(|(act, agent)| position(agent, act))
            .collect::<Vec<_>>()
    });
    entries
}

/// Declaration indices in preorder from the root; anything unreachable
/// follows in declaration order.
fn preorder(doc: &MechanismDocument) -> Vec<usize> {
    let index: HashMap<&str, usize> = doc.nodes.iter().enumerate().map(|(i, n)| (n.id(), i)).collect();
    let mut visited = vec![false; doc.nodes.len()];
    let mut order = Vec::with_capacity(doc.nodes.len());
    let mut stack: Vec<usize> = index.get(doc.root.as_str()).copied().into_iter().collect();
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut visited[v], true) {
            continue;
        }
        order.push(v);
        if let NodeDecl::Decision(d) = &doc.nodes[v] {
            let mut kids: Vec<usize> = Vec::new();
            for (_, target) in sorted_map(d) {
                if let Some(&t) = index.get(target.as_str()) {
                    if !kids.contains(&t) {
                        kids.push(t);
                    }
                }
            }
            stack.extend(kids.into_iter().rev());
        }
    }
    order.extend((0..doc.nodes.len()).filter(|&i| !visited[i]));
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_leaf_document() {
        let doc = parse("agents: A\nroot: r\nleaf r = Yes").unwrap();
        assert_eq!(doc.name, None);
        assert_eq!(doc.agents, vec!["A"]);
        assert_eq!(doc.nodes, vec![NodeDecl::Leaf { id: "r".into(), label: Outcome::Yes }]);
        assert_eq!(serialize(&doc), "agents: A\nroot: r\nleaf r = Yes\n");
    }

    #[test]
    fn decision_without_map_is_a_syntax_error() {
        let err = parse("agents: A\nroot: u1\ndecision u1\n  deciders: A\n  actions: A = [x]\n").unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].line, 3);
        assert!(matches!(&err.0[0].kind, ParseErrorKind::Syntax { expected } if expected.contains("map")));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let doc = parse("# header\n\nagents: A # trailing\nroot: r\n\nleaf r = No\n").unwrap();
        assert_eq!(doc.root, "r");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse("agents: A\nroot: r\nleaf r = Maybe\nbogus line\n").unwrap_err();
        let lines: Vec<usize> = err.0.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![3, 4]);
    }

    #[test]
    fn duplicate_declarations() {
        let err = parse("agents: A\nagents: B\nroot: r\nleaf r = No\nleaf r = Yes\n").unwrap_err();
        assert_eq!(err.0.len(), 2);
        assert!(err
            .0
            .iter()
            .all(|e| matches!(e.kind, ParseErrorKind::DuplicateDeclaration { .. })));
    }

    #[test]
    fn block_line_outside_decision() {
        let err = parse("agents: A\nroot: r\nmap: [x] -> r\nleaf r = No\n").unwrap_err();
        assert_eq!(err.0[0].line, 3);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("u1"));
        assert!(is_identifier("_x-y"));
        assert!(is_identifier("0"));
        assert!(!is_identifier("-x"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("a b"));
    }

    #[test]
    fn map_lines_accumulate_and_serialize_sorted() {
        let text = "agents: A\nroot: u\ndecision u\n  deciders: A\n  actions: A = [b, a]\n  map: [a] -> y\n  map: [b] -> x\nleaf x = Yes\nleaf y = No\n";
        let doc = parse(text).unwrap();
        let out = serialize(&doc);
        assert!(out.contains("  map: [b] -> x ; [a] -> y\n"), "{out}");
        assert!(out.find("leaf x").unwrap() < out.find("leaf y").unwrap());
    }
}
