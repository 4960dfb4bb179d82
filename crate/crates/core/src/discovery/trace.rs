//! Line-oriented event log of a discovery run.
//!
//! ```text
//! FETCH A A.r <- B.s.
//! CTX+ r(A,D)
//! FACT+ r(A,D)
//! FACT- s(B,D)
//! CHOOSE s(B,D)
//! RETRACT s(B,D)
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{DiscoveryState, Sign};
use crate::glp::GroundAtom;
use crate::parser::parse_policy;
use crate::policy::{Credential, Entity};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    /// A credential was added to the collected set, fetched from `issuer`.
    Fetch {
        issuer: Entity,
        credential: Credential,
    },
    Context(GroundAtom),
    Fact(GroundAtom, Sign),
    /// An atom was assumed false while searching for an unfounded set.
    Choose(GroundAtom),
    /// A branch of that search failed after choosing the atom.
    Retract(GroundAtom),
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Fetch { issuer, credential } => write!(f, "FETCH {issuer} {credential}."),
            TraceEvent::Context(a) => write!(f, "CTX+ {a}"),
            TraceEvent::Fact(a, Sign::Positive) => write!(f, "FACT+ {a}"),
            TraceEvent::Fact(a, Sign::Negative) => write!(f, "FACT- {a}"),
            TraceEvent::Choose(a) => write!(f, "CHOOSE {a}"),
            TraceEvent::Retract(a) => write!(f, "RETRACT {a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

fn parse_atom(text: &str) -> Option<GroundAtom> {
    let (pred, rest) = text.trim().split_once('(')?;
    let (owner, member) = rest.strip_suffix(')')?.split_once(',')?;
    Some(GroundAtom::new(pred.trim(), owner.trim(), member.trim()))
}

impl FromStr for TraceEvent {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let (tag, rest) = line.split_once(' ').ok_or("missing event payload")?;
        let atom = || parse_atom(rest).ok_or_else(|| format!("bad atom `{rest}`"));
        Ok(match tag {
            "FETCH" => {
                let (issuer, cred) = rest.split_once(' ').ok_or("missing credential")?;
                let policy = parse_policy(cred).map_err(|e| e.to_string())?;
                let credential = match policy.credentials().iter().next() {
                    Some(c) if policy.len() == 1 => c.clone(),
                    _ => return Err("expected exactly one credential".into()),
                };
                TraceEvent::Fetch { issuer: Entity::new(issuer), credential }
            }
            "CTX+" => TraceEvent::Context(atom()?),
            "FACT+" => TraceEvent::Fact(atom()?, Sign::Positive),
            "FACT-" => TraceEvent::Fact(atom()?, Sign::Negative),
            "CHOOSE" => TraceEvent::Choose(atom()?),
            "RETRACT" => TraceEvent::Retract(atom()?),
            other => return Err(format!("unknown event `{other}`")),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiscoveryTrace {
    pub events: Vec<TraceEvent>,
}

impl DiscoveryTrace {
    pub fn push(&mut self, event: TraceEvent) {
        self.events.push(event);
    }

    pub fn parse(text: &str) -> Result<Self, TraceParseError> {
        let mut events = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            events.push(line.parse().map_err(|message| TraceParseError { line: i + 1, message })?);
        }
        Ok(Self { events })
    }

    /// Rebuilds the collected credentials, context and signed facts.
    /// The assumed-false working set is not part of the replay.
    pub fn replay(&self) -> DiscoveryState {
        let mut state = DiscoveryState::default();
        for ev in &self.events {
            match ev {
                TraceEvent::Fetch { credential, .. } => {
                    state.credentials.insert(credential.clone());
                }
                TraceEvent::Context(a) => {
                    state.context.insert(a.clone());
                }
                TraceEvent::Fact(a, s) => {
                    state.facts.insert(a.clone(), *s);
                }
                TraceEvent::Choose(_) | TraceEvent::Retract(_) => {}
            }
        }
        state
    }
}

impl fmt::Display for DiscoveryTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ev in &self.events {
            writeln!(f, "{ev}")?;
        }
        Ok(())
    }
}
