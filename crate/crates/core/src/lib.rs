//! Binary-outcome decision mechanisms over game trees, possibly with
//! imperfect information: strategic ability, responsibility attribution,
//! responsibility gaps and dictatorship classification.

pub mod catalog;
pub mod classify;
pub mod dot;
pub mod error;
pub mod mechanism;
pub mod oracle;
pub mod responsibility;
pub mod solver;
pub mod text;

pub use catalog::{example, Example, EXAMPLES};
pub use classify::{classify, classify_with, dictator_at, dictator_in, Classification, DictatorKind, Election, PathWitness};
pub use dot::export_dot;
pub use error::{LoadError, MechanismError, ParseError, ParseErrorKind, ParseErrors, ValidationError, ValidationErrors};
pub use mechanism::{ActionIx, AgentIx, DecisionNode, Mechanism, NodeIx, NodeKind, Outcome, Partition, IDLE};
pub use oracle::{oracle_uwin, oracle_uwin_all, oracle_win, oracle_win_all, uniform_forcing_all, OracleError, OracleLimits};
pub use responsibility::{report, report_with, responsible, ResponsibilityKind, ResponsibilityReport, Verdict};
pub use solver::{solve, solve_naive, Semantics, StrategySet, StrategyTable, Witness};
pub use text::{load, parse, serialize, DecisionDecl, IndistDecl, MechanismDocument, NodeDecl};
