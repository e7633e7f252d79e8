//! Bounded verification: enumerate or sample small mechanisms and check the
//! dictatorship/responsibility theorems and auxiliary lemmas on each.

pub mod check;
pub mod config;
pub mod enumerate;
pub mod report;
pub mod sample;

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use respgap_core::{classify, example, report as responsibility_report, DictatorKind, Mechanism, ResponsibilityKind};

pub use check::{Context, Finding, Property, Verdict, LEMMAS, ORACLE_MAX_NODES};
pub use config::{EnumerationConfig, Mode, PartitionMode, DEFAULT_BUDGET};
pub use enumerate::{Candidate, FlatTree, Labels, Names, Partitions};
pub use report::{Counterexample, FindingTally, Tally, VerificationReport};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("exhaustive enumeration stopped: more than {limit} mechanisms (counted {counted} before giving up)")]
    BudgetExceeded { limit: u64, counted: u64 },
    #[error("could not start worker threads: {0}")]
    Workers(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Gap-free iff elected dictatorship.
    Theorem1,
    /// Elected epistemic dictatorship implies epistemic-gap-free.
    Theorem2,
    /// Epistemic-gap-free implies elected semi-epistemic dictatorship.
    Theorem3,
    Lemmas,
}

impl Suite {
    pub fn properties(self) -> &'static [Property] {
        match self {
            Suite::Theorem1 => &[Property::GapFreeIffElectedDictatorship],
            Suite::Theorem2 => &[Property::ElectedEpistemicImpliesEpistemicGapFree],
            Suite::Theorem3 => &[Property::EpistemicGapFreeImpliesElectedSemiEpistemic],
            Suite::Lemmas => LEMMAS,
        }
    }

    pub fn findings(self) -> &'static [Finding] {
        match self {
            Suite::Lemmas => &[Finding::ForcingWithoutKnowledge],
            _ => &[],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Theorem1 => "theorem 1",
            Suite::Theorem2 => "theorem 2",
            Suite::Theorem3 => "theorem 3",
            Suite::Lemmas => "lemmas",
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" => Ok(Suite::Theorem1),
            "2" => Ok(Suite::Theorem2),
            "3" => Ok(Suite::Theorem3),
            "lemmas" => Ok(Suite::Lemmas),
            other => Err(format!("expected 1, 2, 3 or lemmas, found `{other}`")),
        }
    }
}

/// Candidates drawn from a sampled tree or passed on from an enumerated one.
fn with_partitions(
    cfg: &EnumerationConfig,
    tree: FlatTree,
    index: u64,
    f: &mut dyn FnMut(Candidate) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let tree = Arc::new(tree);
    match cfg.partitions {
        PartitionMode::Perfect => f(Candidate { tree, partitions: None }),
        PartitionMode::Sampled => {
            let mut rng = sample::rng_for(cfg.seed, index);
            let p = sample::sample_partitions(&tree, cfg.agents, &mut rng);
            f(Candidate { tree, partitions: Some(p) })
        }
        PartitionMode::Exhaustive => enumerate::each_partition(&tree, cfg.agents, &mut |p| {
            f(Candidate { tree: Arc::clone(&tree), partitions: Some(p) })
        }),
    }
}

/// Upper bound on the mechanisms an exhaustive run would produce, counting
/// at most `limit + 1`.
fn precount(cfg: &EnumerationConfig, limit: u64) -> u64 {
    let mut total = 0u64;
    let _ = enumerate::each_tree(cfg, &mut |tree| {
        let n = match cfg.partitions {
            PartitionMode::Exhaustive => enumerate::raw_partition_count(&tree, cfg.agents),
            _ => 1,
        };
        total = total.saturating_add(u64::try_from(n).unwrap_or(u64::MAX));
        if total > limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    total
}

/// Feeds every candidate of the configured space to `f`, in a fixed order.
pub fn for_each_candidate(cfg: &EnumerationConfig, f: &mut dyn FnMut(Candidate) -> ControlFlow<()>) -> Result<(), VerifyError> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Exhaustive => {
            let counted = precount(cfg, cfg.budget);
            if counted > cfg.budget {
                return Err(VerifyError::BudgetExceeded { limit: cfg.budget, counted });
            }
            let mut index = 0u64;
            let _ = enumerate::each_tree(cfg, &mut |tree| {
                index += 1;
                with_partitions(cfg, tree, index - 1, f)
            });
        }
        Mode::Sampled => {
            for i in 0..cfg.samples {
                let mut rng = sample::rng_for(cfg.seed, i);
                let tree = sample::sample_tree(cfg, &mut rng);
                // A sampled partition continues the tree's stream.
                let flow = match cfg.partitions {
                    PartitionMode::Sampled => {
                        let p = sample::sample_partitions(&tree, cfg.agents, &mut rng);
                        f(Candidate { tree: Arc::new(tree), partitions: Some(p) })
                    }
                    _ => with_partitions(cfg, tree, i, f),
                };
                if flow.is_break() {
                    break;
                }
            }
        }
    }
    Ok(())
}

/// Every mechanism of the configured space.
pub fn enumerate(cfg: &EnumerationConfig) -> Result<Vec<Mechanism>, VerifyError> {
    let mut out = Vec::new();
    for_each_candidate(cfg, &mut |c| {
        out.push(c.to_mechanism(cfg.agents));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Number of mechanisms in the configured space.
pub fn count(cfg: &EnumerationConfig) -> Result<u64, VerifyError> {
    let mut n = 0;
    for_each_candidate(cfg, &mut |_| {
        n += 1;
        ControlFlow::Continue(())
    })?;
    Ok(n)
}

const CHUNK: usize = 2048;

struct Outcome {
    verdicts: Vec<Verdict>,
    findings: Vec<Option<String>>,
    text: Option<String>,
}

fn evaluate(c: &Candidate, agents: usize, suite: Suite) -> Outcome {
    let m = c.to_mechanism(agents);
    let ctx = Context::new(&m);
    let verdicts: Vec<Verdict> = suite.properties().iter().map(|&p| ctx.check(p)).collect();
    let findings: Vec<Option<String>> = suite.findings().iter().map(|&f| ctx.finding(f)).collect();
    let interesting = verdicts.iter().any(|v| matches!(v, Verdict::Fail(_))) || findings.iter().any(Option::is_some);
    Outcome { verdicts, findings, text: interesting.then(|| m.to_text()) }
}

/// Runs `suite` over the configured space on `jobs` worker threads. The
/// report does not depend on `jobs`.
pub fn verify(cfg: &EnumerationConfig, suite: Suite, jobs: usize) -> Result<VerificationReport, VerifyError> {
    if suite == Suite::Theorem1 && cfg.partitions != PartitionMode::Perfect {
        return Err(VerifyError::Config("theorem 1 is checked on perfect-information mechanisms only".into()));
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| VerifyError::Workers(e.to_string()))?;
    let mut report = VerificationReport::new(suite.to_string(), cfg.clone());
    report.properties = suite.properties().iter().map(|p| Tally::new(p.name())).collect();
    report.findings = suite
        .findings()
        .iter()
        .map(|f| FindingTally { finding: f.name().to_string(), mechanisms: 0, examples: Vec::new() })
        .collect();

    let mut chunk: Vec<Candidate> = Vec::with_capacity(CHUNK);
    let flush = |chunk: &mut Vec<Candidate>, report: &mut VerificationReport| {
        let outcomes: Vec<Outcome> = pool.install(|| chunk.par_iter().map(|c| evaluate(c, cfg.agents, suite)).collect());
        for o in outcomes {
            report.mechanisms += 1;
            for (slot, v) in o.verdicts.iter().enumerate() {
                report.record(slot, v, || o.text.clone().unwrap_or_default());
            }
            for (slot, f) in o.findings.into_iter().enumerate() {
                if let Some(explanation) = f {
                    report.record_finding(slot, explanation, || o.text.clone().unwrap_or_default());
                }
            }
        }
        chunk.clear();
    };
    for_each_candidate(cfg, &mut |c| {
        chunk.push(c);
        if chunk.len() == CHUNK {
            flush(&mut chunk, &mut report);
        }
        ControlFlow::Continue(())
    })?;
    flush(&mut chunk, &mut report);

    match suite {
        Suite::Theorem2 => converse(&mut report, "mechanism-M", "mechanism-M is epistemic-gap-free but not an elected epistemic dictatorship", |m| {
            responsibility_report(m, ResponsibilityKind::Epistemic).is_gap_free() && !classify(m).is_elected(DictatorKind::Epistemic)
        }),
        Suite::Theorem3 => converse(&mut report, "mechanism-N", "mechanism-N is an elected semi-epistemic dictatorship but not epistemic-gap-free", |m| {
            classify(m).is_elected(DictatorKind::SemiEpistemic) && !responsibility_report(m, ResponsibilityKind::Epistemic).is_gap_free()
        }),
        _ => {}
    }
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Records that the converse of an implication fails on a bundled example.
fn converse(report: &mut VerificationReport, name: &str, claim: &str, holds: impl Fn(&Mechanism) -> bool) {
    let m = example(name).expect("bundled example");
    let verdict = if holds(&m) { Verdict::Pass } else { Verdict::Fail(format!("expected: {claim}")) };
    report.properties.push(Tally::new(format!("converse fails: {claim}")));
    let slot = report.properties.len() - 1;
    report.record(slot, &verdict, || m.to_text());
}

pub fn verify_theorem1(cfg: &EnumerationConfig, jobs: usize) -> Result<VerificationReport, VerifyError> {
    verify(cfg, Suite::Theorem1, jobs)
}

pub fn verify_theorem2(cfg: &EnumerationConfig, jobs: usize) -> Result<VerificationReport, VerifyError> {
    verify(cfg, Suite::Theorem2, jobs)
}

pub fn verify_theorem3(cfg: &EnumerationConfig, jobs: usize) -> Result<VerificationReport, VerifyError> {
    verify(cfg, Suite::Theorem3, jobs)
}

pub fn verify_lemmas(cfg: &EnumerationConfig, jobs: usize) -> Result<VerificationReport, VerifyError> {
    verify(cfg, Suite::Lemmas, jobs)
}
