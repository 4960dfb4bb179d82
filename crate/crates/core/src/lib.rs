//! Role-based trust management with negation-in-context.
//!
//! Policies are sets of RT0 credentials extended with an exclusion statement
//! `A.r <- B.r1 - C.r2`. A policy means whatever the well-founded model of its
//! translated logic program says: [`glp::translate`] grounds the program and
//! [`wfs::well_founded_model`] evaluates it. [`discovery`] answers the same
//! membership questions by collecting credentials from per-issuer stores.

pub mod community;
pub mod discovery;
pub mod glp;
pub mod parser;
pub mod policy;
pub mod wfs;

pub use crate::glp::{context_policy, translate, GroundAtom, GroundProgram};
pub use crate::parser::{parse_policy, serialize_policy, ParseError, SourceSpan};
pub use crate::policy::{definition_of, validate, Body, Credential, Diagnostic, Entity, Policy, Role, RoleName};
pub use crate::wfs::{query_atom, role_semantics, well_founded_model, ThreeValuedModel, Truth};
