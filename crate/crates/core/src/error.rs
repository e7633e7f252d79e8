use std::fmt;

use thiserror::Error;

/// A structural violation found while validating a mechanism description.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("not a tree at node {node}: {reason}")]
    NonTree { node: String, reason: String },
    #[error("choice function of {node} is missing profile {profile}")]
    PartialChoiceFunction { node: String, profile: String },
    #[error("choice function of {node} maps profile {profile} to two different children")]
    ConflictingProfile { node: String, profile: String },
    #[error("profile at {node} has {found} actions, expected {expected} (one per decider)")]
    ProfileArity { node: String, expected: usize, found: usize },
    #[error("agent {agent} has no actions at {node}")]
    EmptyActionSet { node: String, agent: String },
    #[error("decision node {node} has no deciders")]
    NoDeciders { node: String },
    #[error("agent {agent} is not a decider at {node} but has an action list there")]
    ActionsForNonDecider { node: String, agent: String },
    #[error("node {node} is used as a leaf but has no label")]
    UnlabeledLeaf { node: String },
    #[error("leaf {node} appears in an indistinguishability class of {agent}")]
    MixedClass { agent: String, node: String },
    #[error("node {node} appears in two indistinguishability classes of {agent}")]
    OverlappingClasses { agent: String, node: String },
    #[error("{first} and {second} are indistinguishable for {agent} but offer different actions")]
    ActionMismatch { agent: String, first: String, second: String },
    #[error("duplicate {kind} `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("invalid {kind} identifier `{id}`")]
    InvalidIdentifier { kind: &'static str, id: String },
    #[error("unknown agent {agent} in {context}")]
    UnknownAgent { agent: String, context: String },
    #[error("unknown node {node} in {context}")]
    UnknownNode { node: String, context: String },
    #[error("unknown action {action} of {agent} at {node}")]
    UnknownAction { node: String, agent: String, action: String },
    #[error("a mechanism needs at least one agent")]
    NoAgents,
}

/// Every violation found in one validation pass.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Errors of the accessors on a validated mechanism.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MechanismError {
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("unknown agent {0}")]
    UnknownAgent(String),
    #[error("{0} is not a decision node")]
    NotDecisionNode(String),
    #[error("{0} is not a leaf")]
    NotLeaf(String),
    #[error("unknown action {action} of {agent} at {node}")]
    UnknownAction { node: String, agent: String, action: String },
    #[error("{first} and {second} offer {agent} different actions")]
    ActionMismatch { agent: String, first: String, second: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {expected}")]
    Syntax { expected: String },
    #[error("duplicate declaration of {what}")]
    DuplicateDeclaration { what: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Anything that can go wrong turning text into a mechanism.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("{0}")]
    Parse(#[from] ParseErrors),
    #[error("{0}")]
    Invalid(#[from] ValidationErrors),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
}
