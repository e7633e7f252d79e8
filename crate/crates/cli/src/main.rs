use std::io::{self, Read, Write};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use respgap_core::{
    classify, example, export_dot, load, report, solve, AgentIx, DictatorKind, Mechanism, NodeIx, Outcome,
    ResponsibilityKind, Semantics, Witness, EXAMPLES,
};
use respgap_verify::{verify, EnumerationConfig, Mode, PartitionMode, Suite, VerifyError, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "respgap", version, about = "Strategy sets, responsibility gaps and elected dictatorships in decision-making mechanisms")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a mechanism.
    Validate(Input),
    /// Nodes from which an agent can force an outcome.
    Solve {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        agent: String,
        #[arg(long)]
        outcome: Outcome,
        #[arg(long, default_value_t = Semantics::Win)]
        semantics: Semantics,
    },
    /// Leaves where nobody is responsible.
    Gaps {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = ResponsibilityKind::Counterfactual)]
        semantics: ResponsibilityKind,
        /// Exit with status 1 when the gap is not empty.
        #[arg(long)]
        strict: bool,
    },
    /// Dictators at nodes and elected dictatorships.
    Classify(Input),
    /// Check a theorem or the lemma suite over a bounded mechanism space.
    Verify(VerifyArgs),
    /// Bundled example mechanisms.
    Examples {
        #[command(subcommand)]
        action: Option<ExamplesAction>,
    },
    /// Graphviz rendering of a mechanism.
    Dot(Input),
}

#[derive(Subcommand)]
enum ExamplesAction {
    List,
    Show { name: String },
}

/// A mechanism file, `-` for standard input, or a bundled example.
#[derive(Args)]
struct Input {
    file: Option<String>,
    #[arg(long, conflicts_with = "file")]
    example: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// 1, 2, 3 or lemmas.
    #[arg(long)]
    theorem: Suite,
    #[arg(long, default_value_t = 2)]
    max_depth: usize,
    #[arg(long, default_value_t = 2)]
    max_children: usize,
    #[arg(long, default_value_t = 2)]
    agents: usize,
    #[arg(long, default_value_t = 2)]
    max_actions: usize,
    #[arg(long)]
    max_decision_nodes: Option<usize>,
    /// perfect, exhaustive or sampled; perfect for theorem 1, exhaustive
    /// otherwise.
    #[arg(long)]
    partitions: Option<PartitionMode>,
    #[arg(long, default_value_t = Mode::Exhaustive)]
    mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest exhaustive space to attempt.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads; the report does not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    /// Findings that the invocation asked to treat as failure.
    Findings,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match run(cli, &mut out) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Findings) => ExitCode::from(1),
        // A closed pipe (`respgap ... | head`) is not an error.
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<Status> {
    let json = cli.format == Format::Json;
    match cli.command {
        Command::Validate(input) => {
            let m = input.load()?;
            if json {
                emit(out, &validate_json(&m))?;
            } else {
                let leaves = m.leaves().count();
                let agents: Vec<&str> = m.agents().map(|a| m.agent_name(a)).collect();
                writeln!(
                    out,
                    "ok: {} nodes ({} decision, {} leaves); agents {}; {} information",
                    m.node_count(),
                    m.node_count() - leaves,
                    leaves,
                    agents.join(", "),
                    if m.is_perfect_information() { "perfect" } else { "imperfect" }
                )?;
            }
        }
        Command::Solve { input, agent, outcome, semantics } => {
            let m = input.load()?;
            let a = m.agent_id(&agent)?;
            let set = solve(&m, a, outcome, semantics);
            let describe = |v: NodeIx| match set.witness(v).expect("member has a witness") {
                Witness::Leaf => "leaf".to_string(),
                Witness::Action(x) => format!("action {}", m.actions(a, v).expect("decision node")[x.index()]),
                Witness::AllActions => "all actions".to_string(),
            };
            if json {
                let witnesses: Vec<Value> = set
                    .nodes()
                    .into_iter()
                    .map(|v| json!({ "node": m.node_name(v), "witness": describe(v) }))
                    .collect();
                emit(
                    out,
                    &json!({
                        "agent": agent,
                        "outcome": outcome.to_string(),
                        "semantics": semantics.to_string(),
                        "nodes": names(&m, &set.nodes()),
                        "witnesses": witnesses,
                    }),
                )?;
            } else {
                writeln!(out, "{semantics}_{agent}({outcome}) = {{{}}}", names(&m, &set.nodes()).join(", "))?;
                for v in set.nodes() {
                    writeln!(out, "  {}: {}", m.node_name(v), describe(v))?;
                }
            }
        }
        Command::Gaps { input, semantics, strict } => {
            let m = input.load()?;
            let r = report(&m, semantics);
            let leaves: Vec<NodeIx> = m.leaves().collect();
            if json {
                let rows: Vec<Value> = leaves
                    .iter()
                    .map(|&leaf| {
                        let responsible: Vec<Value> = r
                            .at(leaf)
                            .iter()
                            .filter_map(|v| v.witness.map(|w| json!({ "agent": m.agent_name(v.agent), "witness": m.node_name(w) })))
                            .collect();
                        json!({
                            "leaf": m.node_name(leaf),
                            "label": m.label(leaf).map(|o| o.to_string()),
                            "responsible": responsible,
                        })
                    })
                    .collect();
                emit(out, &json!({ "semantics": semantics.to_string(), "gap": names(&m, r.gap()), "leaves": rows }))?;
            } else {
                writeln!(out, "{semantics} gap: {{{}}}", names(&m, r.gap()).join(", "))?;
                for &leaf in &leaves {
                    let responsible: Vec<String> = r
                        .at(leaf)
                        .iter()
                        .filter_map(|v| v.witness.map(|w| format!("{} @ {}", m.agent_name(v.agent), m.node_name(w))))
                        .collect();
                    let label = m.label(leaf).expect("leaf");
                    let who = if responsible.is_empty() { "nobody (gap)".to_string() } else { responsible.join(", ") };
                    writeln!(out, "  {} ({label}): {who}", m.node_name(leaf))?;
                }
            }
            if strict && !r.is_gap_free() {
                return Ok(Status::Findings);
            }
        }
        Command::Classify(input) => {
            let m = input.load()?;
            let c = classify(&m);
            let dictators: Vec<(NodeIx, AgentIx, Vec<DictatorKind>)> = m
                .decision_nodes()
                .flat_map(|v| {
                    let found = c.dictators_at(v);
                    m.agents()
                        .map(|a| (v, a, found.iter().filter(|(b, _)| *b == a).map(|(_, k)| *k).collect::<Vec<_>>()))
                        .filter(|(_, _, kinds)| !kinds.is_empty())
                        .collect::<Vec<_>>()
                })
                .collect();
            if json {
                let mut elections = serde_json::Map::new();
                for kind in DictatorKind::ALL {
                    let e = c.election(kind);
                    let certificates: Vec<Value> = e
                        .certificates()
                        .iter()
                        .map(|&(v, a)| json!({ "node": m.node_name(v), "agent": m.agent_name(a) }))
                        .collect();
                    let uncovered: Vec<NodeIx> = e.paths.iter().filter(|(_, w)| w.is_none()).map(|(l, _)| *l).collect();
                    elections.insert(
                        kind.to_string(),
                        json!({ "elected": e.holds(), "certificates": certificates, "uncovered": names(&m, &uncovered) }),
                    );
                }
                let rows: Vec<Value> = dictators
                    .iter()
                    .map(|(v, a, kinds)| {
                        json!({
                            "node": m.node_name(*v),
                            "agent": m.agent_name(*a),
                            "kinds": kinds.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                emit(out, &json!({ "elections": elections, "dictators": rows }))?;
            } else {
                for kind in DictatorKind::ALL {
                    let e = c.election(kind);
                    let title = match kind {
                        DictatorKind::Plain => "elected dictatorship".to_string(),
                        k => format!("elected {k} dictatorship"),
                    };
                    if e.holds() {
                        let certs: Vec<String> = e
                            .certificates()
                            .iter()
                            .map(|&(v, a)| format!("{} @ {}", m.agent_name(a), m.node_name(v)))
                            .collect();
                        writeln!(out, "{title}: yes ({})", certs.join(", "))?;
                    } else {
                        let uncovered: Vec<NodeIx> = e.paths.iter().filter(|(_, w)| w.is_none()).map(|(l, _)| *l).collect();
                        writeln!(out, "{title}: no (uncovered: {})", names(&m, &uncovered).join(", "))?;
                    }
                }
                if dictators.is_empty() {
                    writeln!(out, "dictators: none")?;
                } else {
                    writeln!(out, "dictators:")?;
                    for (v, a, kinds) in &dictators {
                        let kinds: Vec<String> = kinds.iter().map(|k| k.to_string()).collect();
                        writeln!(out, "  {} @ {}: {}", m.agent_name(*a), m.node_name(*v), kinds.join(", "))?;
                    }
                }
            }
        }
        Command::Verify(args) => {
            let jobs = args.jobs;
            let suite = args.theorem;
            let cfg = args.config();
            let r = match verify(&cfg, suite, jobs) {
                Ok(r) => r,
                Err(e @ VerifyError::BudgetExceeded { .. }) => bail!("{e}; tighten the bounds or raise --budget"),
                Err(e) => return Err(e.into()),
            };
            if json {
                out.write_all(r.to_json().as_bytes())?;
            } else {
                write!(out, "{r}")?;
            }
            if !r.passed() {
                return Ok(Status::Findings);
            }
        }
        Command::Examples { action } => match action.unwrap_or(ExamplesAction::List) {
            ExamplesAction::List => {
                if json {
                    let rows: Vec<Value> = EXAMPLES.iter().map(|e| json!({ "name": e.name, "summary": e.summary })).collect();
                    emit(out, &Value::Array(rows))?;
                } else {
                    let width = EXAMPLES.iter().map(|e| e.name.len()).max().unwrap_or(0);
                    for e in EXAMPLES {
                        writeln!(out, "{:<width$}  {}", e.name, e.summary)?;
                    }
                }
            }
            ExamplesAction::Show { name } => {
                let e = EXAMPLES
                    .iter()
                    .find(|e| e.name == name)
                    .ok_or_else(|| anyhow!("unknown example `{name}`; try `respgap examples list`"))?;
                if json {
                    emit(out, &json!({ "name": e.name, "summary": e.summary, "source": e.source }))?;
                } else {
                    out.write_all(e.source.as_bytes())?;
                }
            }
        },
        Command::Dot(input) => {
            let m = input.load()?;
            out.write_all(export_dot(&m).as_bytes())?;
        }
    }
    Ok(Status::Ok)
}

impl Input {
    fn load(&self) -> Result<Mechanism> {
        match (&self.file, &self.example) {
            (_, Some(name)) => Ok(example(name)?),
            (Some(path), None) => {
                let text = if path == "-" {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s).context("reading standard input")?;
                    s
                } else {
                    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?
                };
                let source = if path == "-" { "<stdin>" } else { path.as_str() };
                load(&text).map_err(|e| anyhow!("{source}: invalid mechanism\n{e}"))
            }
            (None, None) => bail!("no input: give a file, `-` for standard input, or --example NAME"),
        }
    }
}

impl VerifyArgs {
    fn config(&self) -> EnumerationConfig {
        let partitions = self.partitions.unwrap_or(match self.theorem {
            Suite::Theorem1 => PartitionMode::Perfect,
            _ => PartitionMode::Exhaustive,
        });
        EnumerationConfig {
            max_depth: self.max_depth,
            max_children: self.max_children,
            agents: self.agents,
            max_actions: self.max_actions,
            max_decision_nodes: self.max_decision_nodes,
            partitions,
            mode: self.mode,
            samples: self.samples,
            seed: self.seed,
            budget: self.budget,
        }
    }
}

fn names(m: &Mechanism, nodes: &[NodeIx]) -> Vec<String> {
    nodes.iter().map(|&v| m.node_name(v).to_string()).collect()
}

fn validate_json(m: &Mechanism) -> Value {
    let leaves = m.leaves().count();
    json!({
        "valid": true,
        "name": m.name(),
        "agents": m.agents().map(|a| m.agent_name(a)).collect::<Vec<_>>(),
        "nodes": m.node_count(),
        "decision_nodes": m.node_count() - leaves,
        "leaves": leaves,
        "perfect_information": m.is_perfect_information(),
    })
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}
