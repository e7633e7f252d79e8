use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::VerifyError;

/// How indistinguishability partitions are attached to each tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionMode {
    /// Every class is a singleton.
    Perfect,
    /// Every partition whose cells share action lists, up to relabeling.
    Exhaustive,
    /// One random partition per tree, non-trivial whenever possible.
    Sampled,
}

impl fmt::Display for PartitionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionMode::Perfect => "perfect",
            PartitionMode::Exhaustive => "exhaustive",
            PartitionMode::Sampled => "sampled",
        })
    }
}

impl FromStr for PartitionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "perfect" | "perfect-only" => Ok(PartitionMode::Perfect),
            "exhaustive" | "exhaustive-partitions" => Ok(PartitionMode::Exhaustive),
            "sampled" | "sampled-partitions" => Ok(PartitionMode::Sampled),
            other => Err(format!("expected perfect, exhaustive or sampled, found `{other}`")),
        }
    }
}

/// Whether trees are enumerated or drawn at random.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sampled => "sampled",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "sampled" => Ok(Mode::Sampled),
            other => Err(format!("expected exhaustive or sampled, found `{other}`")),
        }
    }
}

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Bounds of the mechanism space to check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EnumerationConfig {
    pub max_depth: usize,
    pub max_children: usize,
    pub agents: usize,
    pub max_actions: usize,
    /// Upper bound on decision nodes per tree, if any.
    pub max_decision_nodes: Option<usize>,
    pub partitions: PartitionMode,
    pub mode: Mode,
    /// Number of trees drawn in sampled mode.
    pub samples: u64,
    pub seed: u64,
    /// Exhaustive runs refuse to start beyond this many mechanisms.
    pub budget: u64,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            max_depth: 2,
            max_children: 2,
            agents: 2,
            max_actions: 2,
            max_decision_nodes: None,
            partitions: PartitionMode::Perfect,
            mode: Mode::Exhaustive,
            samples: 10_000,
            seed: 1,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl EnumerationConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |msg: &str| Err(VerifyError::Config(msg.to_string()));
        if self.max_children == 0 {
            return bad("max-children must be at least 1");
        }
        if self.agents == 0 {
            return bad("agents must be at least 1");
        }
        if self.agents > 16 {
            return bad("at most 16 agents are supported");
        }
        if self.max_actions == 0 {
            return bad("max-actions must be at least 1");
        }
        if self.max_actions > 8 || self.max_children > 16 {
            return bad("max-actions is limited to 8 and max-children to 16");
        }
        if self.mode == Mode::Sampled && self.samples == 0 {
            return bad("sampled mode needs a positive sample count");
        }
        Ok(())
    }

    /// Decision-node bound as a number.
    pub(crate) fn decision_cap(&self) -> usize {
        self.max_decision_nodes.unwrap_or(usize::MAX)
    }
}
