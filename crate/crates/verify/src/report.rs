use std::fmt;
use std::time::Duration;

use serde::Serialize;

use crate::check::Verdict;
use crate::config::EnumerationConfig;

/// Counterexamples and finding examples kept per property.
pub const MAX_EXAMPLES: usize = 5;

pub const SCOPE: &str = "bounded verification over the listed mechanism space; not a proof";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub property: String,
    /// Mechanisms evaluated: passed + vacuous + failed.
    pub checked: u64,
    pub passed: u64,
    /// Passed because the hypothesis did not hold.
    pub vacuous: u64,
    /// Not evaluated, e.g. too large for an oracle.
    pub skipped: u64,
    pub failed: u64,
}

impl Tally {
    pub fn new(property: impl Into<String>) -> Self {
        Tally { property: property.into(), ..Tally::default() }
    }

    pub fn record(&mut self, v: &Verdict) {
        match v {
            Verdict::Pass => self.passed += 1,
            Verdict::Vacuous => {
                self.passed += 1;
                self.vacuous += 1;
            }
            Verdict::Skipped => {
                self.skipped += 1;
                return;
            }
            Verdict::Fail(_) => self.failed += 1,
        }
        self.checked += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Example {
    pub explanation: String,
    /// The mechanism in the text format.
    pub mechanism: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub property: String,
    pub explanation: String,
    pub mechanism: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FindingTally {
    pub finding: String,
    pub mechanisms: u64,
    pub examples: Vec<Example>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub scope: &'static str,
    pub config: EnumerationConfig,
    pub mechanisms: u64,
    pub properties: Vec<Tally>,
    pub failed: u64,
    pub counterexamples: Vec<Counterexample>,
    pub findings: Vec<FindingTally>,
    /// Kept out of the JSON so that reports of identical runs are
    /// byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, config: EnumerationConfig) -> Self {
        VerificationReport {
            suite: suite.into(),
            scope: SCOPE,
            config,
            mechanisms: 0,
            properties: Vec::new(),
            failed: 0,
            counterexamples: Vec::new(),
            findings: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    pub fn tally(&self, property: &str) -> Option<&Tally> {
        self.properties.iter().find(|t| t.property == property)
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    /// Adds one verdict, keeping the first few counterexamples per
    /// property in enumeration order.
    pub(crate) fn record(&mut self, slot: usize, verdict: &Verdict, mechanism: impl FnOnce() -> String) {
        let tally = &mut self.properties[slot];
        tally.record(verdict);
        if let Verdict::Fail(explanation) = verdict {
            self.failed += 1;
            let property = tally.property.clone();
            let kept = self.counterexamples.iter().filter(|c| c.property == property).count();
            if kept < MAX_EXAMPLES {
                self.counterexamples.push(Counterexample {
                    property,
                    explanation: explanation.clone(),
                    mechanism: mechanism(),
                });
            }
        }
    }

    pub(crate) fn record_finding(&mut self, slot: usize, explanation: String, mechanism: impl FnOnce() -> String) {
        let f = &mut self.findings[slot];
        f.mechanisms += 1;
        if f.examples.len() < MAX_EXAMPLES {
            f.examples.push(Example { explanation, mechanism: mechanism() });
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite: {}", self.suite)?;
        writeln!(f, "scope: {}", self.scope)?;
        let c = &self.config;
        writeln!(
            f,
            "space: {} mode, depth <= {}, {} agent(s), <= {} action(s), <= {} children, decision nodes <= {}, partitions {}{}",
            c.mode,
            c.max_depth,
            c.agents,
            c.max_actions,
            c.max_children,
            c.max_decision_nodes.map_or("any".to_string(), |n| n.to_string()),
            c.partitions,
            match c.mode {
                crate::config::Mode::Sampled => format!(", {} samples, seed {}", c.samples, c.seed),
                crate::config::Mode::Exhaustive => String::new(),
            }
        )?;
        writeln!(f, "mechanisms: {}", self.mechanisms)?;
        writeln!(f, "wall time: {:.2?}", self.wall_time)?;
        for t in &self.properties {
            writeln!(
                f,
                "  {:<66} checked {:>9}  failed {:>3}  vacuous {:>9}  skipped {:>9}",
                t.property, t.checked, t.failed, t.vacuous, t.skipped
            )?;
        }
        for c in &self.counterexamples {
            writeln!(f, "counterexample to {}: {}", c.property, c.explanation)?;
            for line in c.mechanism.lines() {
                writeln!(f, "    {line}")?;
            }
        }
        for x in &self.findings {
            writeln!(f, "finding: {}: {} mechanism(s)", x.finding, x.mechanisms)?;
            if let Some(e) = x.examples.first() {
                writeln!(f, "  e.g. {}", e.explanation)?;
                for line in e.mechanism.lines() {
                    writeln!(f, "    {line}")?;
                }
            }
        }
        writeln!(f, "failed: {}", self.failed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_a_few_counterexamples_per_property() {
        let mut r = VerificationReport::new("test", EnumerationConfig::default());
        r.properties = vec![Tally::new("p"), Tally::new("q")];
        for i in 0..8 {
            r.record(0, &Verdict::Fail(format!("case {i}")), || format!("mechanism {i}"));
            r.record(1, &Verdict::Vacuous, || unreachable!());
        }
        r.record(1, &Verdict::Skipped, || unreachable!());
        assert_eq!(r.failed, 8);
        assert_eq!(r.counterexamples.len(), MAX_EXAMPLES);
        assert_eq!(r.counterexamples[0].mechanism, "mechanism 0");
        assert_eq!(r.properties[0].checked, 8);
        let q = r.tally("q").unwrap();
        assert_eq!((q.checked, q.passed, q.vacuous, q.skipped), (8, 8, 8, 1));
        assert!(!r.passed());
        let text = r.to_string();
        assert!(text.contains("counterexample to p: case 0"));
        assert!(text.ends_with("failed: 8\n"));
    }

    #[test]
    fn findings_count_every_mechanism() {
        let mut r = VerificationReport::new("test", EnumerationConfig::default());
        r.findings = vec![FindingTally { finding: "f".into(), mechanisms: 0, examples: Vec::new() }];
        for i in 0..7 {
            r.record_finding(0, format!("at {i}"), || "m".into());
        }
        assert_eq!(r.findings[0].mechanisms, 7);
        assert_eq!(r.findings[0].examples.len(), MAX_EXAMPLES);
        assert!(r.passed());
    }
}
