//! Translation of a policy into its ground general logic program.
//!
//! Role names become binary predicates: `A.r <- D` becomes the fact `r(A,D)`,
//! and every other credential becomes a clause schema over variables that
//! is instantiated for every binding to entities of the policy universe.
//! Exclusion is the only source of negative literals.

use std::collections::BTreeSet;
use std::fmt;

use crate::parser::{ParseError, SourceSpan};
use crate::policy::{Body, Credential, Entity, Policy, Role, RoleName};

/// `predicate(owner, member)`: `member` belongs to role `owner.predicate`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: RoleName,
    pub owner: Entity,
    pub member: Entity,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<RoleName>, owner: impl Into<Entity>, member: impl Into<Entity>) -> Self {
        Self { predicate: predicate.into(), owner: owner.into(), member: member.into() }
    }

    pub fn of(role: &Role, member: &Entity) -> Self {
        Self { predicate: role.name.clone(), owner: role.owner.clone(), member: member.clone() }
    }

    pub fn role(&self) -> Role {
        Role { owner: self.owner.clone(), name: self.predicate.clone() }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.predicate, self.owner, self.member)
    }
}

impl fmt::Debug for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal<A> {
    pub atom: A,
    pub positive: bool,
}

impl<A> Literal<A> {
    pub fn pos(atom: A) -> Self {
        Self { atom, positive: true }
    }

    pub fn neg(atom: A) -> Self {
        Self { atom, positive: false }
    }
}

impl<A: fmt::Display> fmt::Display for Literal<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "not {}", self.atom)
        }
    }
}

/// `head :- body`. An empty body makes a fact.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause<A> {
    pub head: A,
    pub body: Vec<Literal<A>>,
}

impl<A> Clause<A> {
    pub fn fact(head: A) -> Self {
        Self { head, body: Vec::new() }
    }

    pub fn new(head: A, body: Vec<Literal<A>>) -> Self {
        Self { head, body }
    }

    pub fn positive_body(&self) -> impl Iterator<Item = &A> {
        self.body.iter().filter(|l| l.positive).map(|l| &l.atom)
    }

    pub fn negative_body(&self) -> impl Iterator<Item = &A> {
        self.body.iter().filter(|l| !l.positive).map(|l| &l.atom)
    }
}

impl<A: fmt::Display> fmt::Display for Clause<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{lit}")?;
        }
        f.write_str(".")
    }
}

/// A ground program over an explicit atom universe.
///
/// The universe always contains every atom mentioned by a clause; it may hold
/// more (atoms no clause mentions are simply false in every model).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program<A: Ord> {
    clauses: Vec<Clause<A>>,
    atoms: BTreeSet<A>,
}

impl<A: Ord + Clone> Program<A> {
    /// Builds a program; clauses are deduplicated and sorted, and the universe
    /// is `extra_atoms` plus every atom the clauses mention.
    pub fn new(clauses: impl IntoIterator<Item = Clause<A>>, extra_atoms: impl IntoIterator<Item = A>) -> Self {
        let clauses: BTreeSet<Clause<A>> = clauses.into_iter().collect();
        let mut atoms: BTreeSet<A> = extra_atoms.into_iter().collect();
        for c in &clauses {
            atoms.insert(c.head.clone());
            atoms.extend(c.body.iter().map(|l| l.atom.clone()));
        }
        Self { clauses: clauses.into_iter().collect(), atoms }
    }

    /// Keeps the given clause order. Used to check order independence.
    pub fn with_clause_order(&self, clauses: Vec<Clause<A>>) -> Self {
        Program::new_unsorted(clauses, self.atoms.iter().cloned())
    }

    fn new_unsorted(clauses: Vec<Clause<A>>, extra_atoms: impl IntoIterator<Item = A>) -> Self {
        let mut atoms: BTreeSet<A> = extra_atoms.into_iter().collect();
        for c in &clauses {
            atoms.insert(c.head.clone());
            atoms.extend(c.body.iter().map(|l| l.atom.clone()));
        }
        Self { clauses, atoms }
    }

    pub fn clauses(&self) -> &[Clause<A>] {
        &self.clauses
    }

    pub fn atoms(&self) -> &BTreeSet<A> {
        &self.atoms
    }

    pub fn has_negation(&self) -> bool {
        self.clauses.iter().any(|c| c.body.iter().any(|l| !l.positive))
    }
}

impl<A: Ord + Clone + fmt::Display> Program<A> {
    /// One clause per line, lines sorted by their text.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.clauses.iter().map(|c| c.to_string()).collect();
        lines.sort();
        lines.dedup();
        let mut out = String::new();
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }
}

pub type GroundClause = Clause<GroundAtom>;
pub type GroundProgram = Program<GroundAtom>;

/// Number of ground clauses a credential yields over a universe of `n` entities.
pub fn grounding_size(cred: &Credential, n: usize) -> usize {
    match cred.body {
        Body::SimpleMember { .. } => 1,
        Body::LinkingInclusion { .. } => n * n,
        _ => n,
    }
}

fn ground_credential(cred: &Credential, universe: &[Entity], out: &mut Vec<GroundClause>) {
    let head = &cred.head;
    match &cred.body {
        Body::SimpleMember { member } => out.push(Clause::fact(GroundAtom::of(head, member))),
        Body::SimpleInclusion { source } => {
            for z in universe {
                out.push(Clause::new(GroundAtom::of(head, z), vec![Literal::pos(GroundAtom::of(source, z))]));
            }
        }
        Body::LinkingInclusion { first, second } => {
            for y in universe {
                let via = GroundAtom::of(first, y);
                for z in universe {
                    out.push(Clause::new(
                        GroundAtom::of(head, z),
                        vec![
                            Literal::pos(via.clone()),
                            Literal::pos(GroundAtom::new(second.clone(), y.clone(), z.clone())),
                        ],
                    ));
                }
            }
        }
        Body::IntersectionInclusion { left, right } => {
            for z in universe {
                out.push(Clause::new(
                    GroundAtom::of(head, z),
                    vec![Literal::pos(GroundAtom::of(left, z)), Literal::pos(GroundAtom::of(right, z))],
                ));
            }
        }
        Body::Exclusion { include, exclude } => {
            for z in universe {
                out.push(Clause::new(
                    GroundAtom::of(head, z),
                    vec![Literal::pos(GroundAtom::of(include, z)), Literal::neg(GroundAtom::of(exclude, z))],
                ));
            }
        }
    }
}

/// All atoms `r(X,Y)` for role names `r` and entities `X`, `Y` of the policy.
pub fn atom_universe(policy: &Policy) -> Vec<GroundAtom> {
    let mut atoms = Vec::with_capacity(policy.role_names().len() * policy.universe().len().pow(2));
    for r in policy.role_names() {
        for x in policy.universe() {
            for y in policy.universe() {
                atoms.push(GroundAtom::new(r.clone(), x.clone(), y.clone()));
            }
        }
    }
    atoms
}

/// Grounds the semantic program of `policy` over its own universe.
pub fn translate(policy: &Policy) -> GroundProgram {
    let universe: Vec<Entity> = policy.universe().iter().cloned().collect();
    let mut clauses = Vec::new();
    for cred in policy.credentials() {
        ground_credential(cred, &universe, &mut clauses);
    }
    Program::new(clauses, atom_universe(policy))
}

/// Replaces every exclusion `A.r <- B.r1 - C.r2` by `A.r <- B.r1`.
pub fn context_policy(policy: &Policy) -> Policy {
    policy
        .credentials()
        .iter()
        .map(|c| match &c.body {
            Body::Exclusion { include, .. } => Credential::inclusion(c.head.clone(), include.clone()),
            _ => c.clone(),
        })
        .collect()
}

/// Parses a ground program written in the dump format. Atoms are kept as their
/// text, so propositional atoms (`p`) and binary ones (`r(A,B)`) both work.
pub fn parse_raw_program(text: &str) -> Result<Program<String>, ParseError> {
    let mut clauses = Vec::new();
    let mut pending = String::new();
    let mut start: Option<(usize, usize)> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for (col, ch) in line.chars().enumerate() {
            if start.is_none() && !ch.is_whitespace() {
                start = Some((lineno + 1, col + 1));
            }
            if ch == '.' {
                let (l, c) = start.take().unwrap_or((lineno + 1, col + 1));
                let span = SourceSpan { line: l, column: c, length: pending.chars().count().max(1) };
                clauses.push(parse_raw_clause(pending.trim(), span)?);
                pending.clear();
            } else {
                pending.push(ch);
            }
        }
        pending.push(' ');
    }
    if let Some((line, column)) = start {
        return Err(ParseError {
            span: SourceSpan { line, column, length: 1 },
            message: "clause is missing its terminating `.`".into(),
            expected: vec!["`.`".into()],
        });
    }
    Ok(Program::new(clauses, std::iter::empty()))
}

fn parse_raw_atom(text: &str, span: SourceSpan) -> Result<String, ParseError> {
    let err = |msg: String| ParseError { span, message: msg, expected: vec!["atom".into()] };
    let text = text.trim();
    let (name, args) = match text.split_once('(') {
        Some((name, rest)) => {
            let args = rest.strip_suffix(')').ok_or_else(|| err(format!("unbalanced parentheses in `{text}`")))?;
            (name.trim(), Some(args))
        }
        None => (text, None),
    };
    let ident = |s: &str| {
        s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    };
    if !ident(name) {
        return Err(err(format!("invalid atom `{text}`")));
    }
    match args {
        None => Ok(name.to_string()),
        Some(args) => {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            if parts.iter().any(|p| !ident(p)) {
                return Err(err(format!("invalid arguments in `{text}`")));
            }
            Ok(format!("{name}({})", parts.join(",")))
        }
    }
}

fn parse_raw_clause(text: &str, span: SourceSpan) -> Result<Clause<String>, ParseError> {
    let (head, body) = match text.split_once(":-") {
        Some((h, b)) => (h, Some(b)),
        None => (text, None),
    };
    let head = parse_raw_atom(head, span)?;
    let mut lits = Vec::new();
    if let Some(body) = body {
        // Split on commas outside parentheses.
        let mut depth = 0usize;
        let mut cur = String::new();
        let mut parts = Vec::new();
        for ch in body.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    parts.push(std::mem::take(&mut cur));
                    continue;
                }
                _ => {}
            }
            cur.push(ch);
        }
        parts.push(cur);
        for part in parts {
            let part = part.trim();
            match part.strip_prefix("not ") {
                Some(atom) => lits.push(Literal::neg(parse_raw_atom(atom, span)?)),
                None => lits.push(Literal::pos(parse_raw_atom(part, span)?)),
            }
        }
    }
    Ok(Clause::new(head, lits))
}
