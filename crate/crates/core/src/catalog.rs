//! Example mechanisms bundled with the library.

use crate::error::LoadError;
use crate::mechanism::Mechanism;
use crate::text::load;

#[derive(Clone, Copy, Debug)]
pub struct Example {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
}

pub const EXAMPLES: &[Example] = &[
    Example {
        name: "two-person-rule",
        summary: "president authorises, two officers must both turn their keys",
        source: include_str!("../mechanisms/two-person-rule.mech"),
    },
    Example {
        name: "senate",
        summary: "two senators vote, the vice president breaks ties",
        source: include_str!("../mechanisms/senate.mech"),
    },
    Example {
        name: "academic",
        summary: "the dean decides or delegates to a majority committee",
        source: include_str!("../mechanisms/academic.mech"),
    },
    Example {
        name: "confusion",
        summary: "single agent with confused nodes; uwin and ewin differ",
        source: include_str!("../mechanisms/confusion.mech"),
    },
    Example {
        name: "drawing-straws",
        summary: "B picks a straw without knowing which one is long",
        source: include_str!("../mechanisms/drawing-straws.mech"),
    },
    Example {
        name: "mechanism-M",
        summary: "epistemic-gap-free but not an elected epistemic dictatorship",
        source: include_str!("../mechanisms/mechanism-M.mech"),
    },
    Example {
        name: "mechanism-N",
        summary: "elected semi-epistemic dictatorship with an epistemic gap",
        source: include_str!("../mechanisms/mechanism-N.mech"),
    },
];

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}

/// Loads and validates a bundled example.
pub fn example(name: &str) -> Result<Mechanism, LoadError> {
    let entry = find(name).ok_or_else(|| LoadError::UnknownExample(name.to_string()))?;
    load(entry.source)
}
