//! Credential chain discovery over issuer-traceable stores.
//!
//! A run keeps four sets: the collected credentials `C`, the context facts
//! `I+` (membership in the exclusion-free over-approximation of the policy),
//! the signed facts `I`, and the working set `U` of atoms assumed false while
//! looking for an unfounded set.
//!
//! 1. `C` starts as the definition of the goal role.
//! 2. Credentials are fetched top down and `I+` is closed bottom up.
//! 3. Positive facts are derived. An exclusion fires when the excluded atom
//!    is known false or lies outside the context.
//! 4. Negative facts are derived by growing `U` from a useful seed atom until
//!    no credential in `C` can derive any atom of `U`, branching where a body
//!    offers a choice of which atom to assume false.
//!
//! Steps 3 and 4 repeat until `I` stops changing.

mod store;
mod trace;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

pub use self::store::{CredentialStore, DirectoryStore, MemoryStore, StoreError};
pub use self::trace::{DiscoveryTrace, TraceEvent, TraceParseError};
use crate::glp::GroundAtom;
use crate::policy::{Body, Credential, Entity, Role};
use crate::wfs::role_semantics;

/// Default cap on the number of search states explored per seed in Step 4.
pub const DEFAULT_CHOICE_CAP: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedFact {
    pub atom: GroundAtom,
    pub sign: Sign,
}

impl fmt::Display for SignedFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Positive => write!(f, "{}", self.atom),
            Sign::Negative => write!(f, "not {}", self.atom),
        }
    }
}

#[derive(Debug, Error)]
pub enum DiscoveryError {
    #[error("no store entry for `{}`, needed for the definition of `{role}`", role.owner)]
    MissingDefinition { role: Role },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiscoveryState {
    /// `C`
    pub credentials: BTreeSet<Credential>,
    /// `I+`
    pub context: BTreeSet<GroundAtom>,
    /// `I`; the map keeps one sign per atom.
    pub facts: BTreeMap<GroundAtom, Sign>,
    /// `U` as left by the last successful Step 4 (empty otherwise).
    pub assumed_false: BTreeSet<GroundAtom>,
}

impl DiscoveryState {
    pub fn signed_facts(&self) -> impl Iterator<Item = SignedFact> + '_ {
        self.facts.iter().map(|(atom, &sign)| SignedFact { atom: atom.clone(), sign })
    }

    pub fn sign_of(&self, atom: &GroundAtom) -> Option<Sign> {
        self.facts.get(atom).copied()
    }

    pub fn positive(&self) -> impl Iterator<Item = &GroundAtom> {
        self.facts.iter().filter(|(_, s)| **s == Sign::Positive).map(|(a, _)| a)
    }

    pub fn negative(&self) -> impl Iterator<Item = &GroundAtom> {
        self.facts.iter().filter(|(_, s)| **s == Sign::Negative).map(|(a, _)| a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscoveryOptions {
    /// Upper bound on search states explored per Step 4 seed.
    pub choice_cap: usize,
}

impl Default for DiscoveryOptions {
    fn default() -> Self {
        Self { choice_cap: DEFAULT_CHOICE_CAP }
    }
}

#[derive(Clone, Debug)]
pub struct Discovery {
    pub goal: Role,
    pub members: BTreeSet<Entity>,
    pub state: DiscoveryState,
    pub trace: DiscoveryTrace,
    /// Some Step 4 search hit the choice cap; atoms it could not settle stay
    /// undecided.
    pub cap_exceeded: bool,
}

type RoleIndex = HashMap<Role, BTreeSet<Entity>>;

fn index_insert(idx: &mut RoleIndex, atom: &GroundAtom) {
    idx.entry(atom.role()).or_default().insert(atom.member.clone());
}

fn members<'a>(idx: &'a RoleIndex, role: &Role) -> impl Iterator<Item = &'a Entity> + 'a {
    idx.get(role).into_iter().flatten()
}

/// What a credential demands of the assumed-false set for one atom of `U`.
enum Obligation {
    /// No viable way to block the credential: the branch fails.
    Dead,
    Forced(GroundAtom),
    Choice(GroundAtom, GroundAtom),
}

struct Run<'s, S: CredentialStore + ?Sized> {
    stores: &'s S,
    options: DiscoveryOptions,
    state: DiscoveryState,
    trace: DiscoveryTrace,
    issued: HashMap<Entity, Option<BTreeSet<Credential>>>,
    fetched: HashSet<Role>,
    ctx: RoleIndex,
    pos: RoleIndex,
    by_head: BTreeMap<Role, Vec<Credential>>,
    cap_exceeded: bool,
}

impl<'s, S: CredentialStore + ?Sized> Run<'s, S> {
    fn new(stores: &'s S, state: DiscoveryState, options: DiscoveryOptions) -> Self {
        let mut run = Run {
            stores,
            options,
            state: DiscoveryState::default(),
            trace: DiscoveryTrace::default(),
            issued: HashMap::new(),
            fetched: HashSet::new(),
            ctx: RoleIndex::new(),
            pos: RoleIndex::new(),
            by_head: BTreeMap::new(),
            cap_exceeded: false,
        };
        for c in &state.credentials {
            run.fetched.insert(c.head.clone());
            run.by_head.entry(c.head.clone()).or_default().push(c.clone());
        }
        for a in &state.context {
            index_insert(&mut run.ctx, a);
        }
        for a in state.positive() {
            index_insert(&mut run.pos, a);
        }
        run.state = state;
        run
    }

    fn fetch(&mut self, role: &Role) -> Result<(), DiscoveryError> {
        if !self.fetched.insert(role.clone()) {
            return Ok(());
        }
        let stores = self.stores;
        let issued = self.issued.entry(role.owner.clone()).or_insert_with(|| stores.issued_by(&role.owner));
        let Some(issued) = issued else {
            return Err(DiscoveryError::MissingDefinition { role: role.clone() });
        };
        let def: Vec<Credential> = issued.iter().filter(|c| &c.head == role).cloned().collect();
        for c in def {
            if self.state.credentials.insert(c.clone()) {
                self.trace.push(TraceEvent::Fetch { issuer: role.owner.clone(), credential: c.clone() });
                self.by_head.entry(c.head.clone()).or_default().push(c);
            }
        }
        Ok(())
    }

    fn add_context(&mut self, atom: GroundAtom) -> bool {
        if self.state.context.contains(&atom) {
            return false;
        }
        index_insert(&mut self.ctx, &atom);
        self.trace.push(TraceEvent::Context(atom.clone()));
        self.state.context.insert(atom);
        true
    }

    fn add_fact(&mut self, atom: GroundAtom, sign: Sign) -> bool {
        match self.state.facts.get(&atom) {
            Some(&s) if s == sign => return false,
            Some(_) => panic!("discovery invariant violated: `{atom}` derived with both signs"),
            None => {}
        }
        if sign == Sign::Positive {
            index_insert(&mut self.pos, &atom);
        }
        self.trace.push(TraceEvent::Fact(atom.clone(), sign));
        self.state.facts.insert(atom, sign);
        true
    }

    fn step1(&mut self, goal: &Role) -> Result<(), DiscoveryError> {
        self.fetch(goal)
    }

    fn step2(&mut self) -> Result<(), DiscoveryError> {
        loop {
            let mut changed = false;
            let creds: Vec<Credential> = self.state.credentials.iter().cloned().collect();
            for cred in &creds {
                let head = &cred.head;
                let mut derived = Vec::new();
                match &cred.body {
                    Body::SimpleMember { member } => derived.push(member.clone()),
                    Body::SimpleInclusion { source } => {
                        self.fetch(source)?;
                        derived.extend(members(&self.ctx, source).cloned());
                    }
                    Body::IntersectionInclusion { left, right } => {
                        self.fetch(left)?;
                        self.fetch(right)?;
                        let r = self.ctx.get(right);
                        derived.extend(members(&self.ctx, left).filter(|d| r.is_some_and(|r| r.contains(*d))).cloned());
                    }
                    Body::LinkingInclusion { first, second } => {
                        self.fetch(first)?;
                        let via: Vec<Entity> = members(&self.ctx, first).cloned().collect();
                        for y in via {
                            let link = Role { owner: y, name: second.clone() };
                            self.fetch(&link)?;
                            derived.extend(members(&self.ctx, &link).cloned());
                        }
                    }
                    Body::Exclusion { include, exclude } => {
                        self.fetch(include)?;
                        self.fetch(exclude)?;
                        derived.extend(members(&self.ctx, include).cloned());
                    }
                }
                for d in derived {
                    changed |= self.add_context(GroundAtom::of(head, &d));
                }
            }
            changed |= self.state.credentials.len() != creds.len();
            if !changed {
                return Ok(());
            }
        }
    }

    fn is_positive(&self, atom: &GroundAtom) -> bool {
        self.state.facts.get(atom) == Some(&Sign::Positive)
    }

    fn step3(&mut self) {
        loop {
            let mut changed = false;
            let creds: Vec<Credential> = self.state.credentials.iter().cloned().collect();
            for cred in &creds {
                let head = &cred.head;
                let mut derived = Vec::new();
                match &cred.body {
                    Body::SimpleMember { member } => derived.push(member.clone()),
                    Body::SimpleInclusion { source } => derived.extend(members(&self.pos, source).cloned()),
                    Body::IntersectionInclusion { left, right } => {
                        let r = self.pos.get(right);
                        derived.extend(members(&self.pos, left).filter(|d| r.is_some_and(|r| r.contains(*d))).cloned());
                    }
                    Body::LinkingInclusion { first, second } => {
                        for y in members(&self.pos, first) {
                            let link = Role { owner: y.clone(), name: second.clone() };
                            derived.extend(members(&self.pos, &link).cloned());
                        }
                    }
                    Body::Exclusion { include, exclude } => {
                        for d in members(&self.pos, include) {
                            let excluded = GroundAtom::of(exclude, d);
                            if self.state.facts.get(&excluded) == Some(&Sign::Negative)
                                || !self.state.context.contains(&excluded)
                            {
                                derived.push(d.clone());
                            }
                        }
                    }
                }
                for d in derived {
                    changed |= self.add_fact(GroundAtom::of(head, &d), Sign::Positive);
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// Not yet false: in the context, not assumed false, not known false.
    fn nyf(&self, atom: &GroundAtom, assumed: &BTreeSet<GroundAtom>) -> bool {
        self.state.context.contains(atom)
            && !assumed.contains(atom)
            && self.state.facts.get(atom) != Some(&Sign::Negative)
    }

    /// Atoms whose falsity would let an exclusion fire, sorted by text.
    fn useful_facts(&self) -> Vec<GroundAtom> {
        let none = BTreeSet::new();
        let mut out: Vec<(String, GroundAtom)> = Vec::new();
        for cred in &self.state.credentials {
            if let Body::Exclusion { include, exclude } = &cred.body {
                for d in members(&self.pos, include) {
                    let candidate = GroundAtom::of(exclude, d);
                    if self.nyf(&candidate, &none)
                        && !self.is_positive(&candidate)
                        && !self.is_positive(&GroundAtom::of(&cred.head, d))
                    {
                        out.push((candidate.to_string(), candidate));
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out.into_iter().map(|(_, a)| a).collect()
    }

    /// Picks among options, dropping those already positive in `I`: adding
    /// one would make `U` meet `I`.
    fn viable(&self, options: [GroundAtom; 2]) -> Obligation {
        let [a, b] = options;
        match (self.is_positive(&a), self.is_positive(&b)) {
            (true, true) => Obligation::Dead,
            (false, true) => Obligation::Forced(a),
            (true, false) => Obligation::Forced(b),
            (false, false) if a == b => Obligation::Forced(a),
            (false, false) => Obligation::Choice(a, b),
        }
    }

    /// Obligations of every credential for every atom in `u`, in order.
    fn obligations(&self, u: &BTreeSet<GroundAtom>) -> Vec<Obligation> {
        let mut out = Vec::new();
        for atom in u {
            let Some(creds) = self.by_head.get(&atom.role()) else { continue };
            let d = &atom.member;
            for cred in creds {
                match &cred.body {
                    Body::SimpleMember { .. } => {}
                    Body::SimpleInclusion { source } => {
                        let a = GroundAtom::of(source, d);
                        if self.nyf(&a, u) {
                            out.push(if self.is_positive(&a) { Obligation::Dead } else { Obligation::Forced(a) });
                        }
                    }
                    Body::IntersectionInclusion { left, right } => {
                        let (l, r) = (GroundAtom::of(left, d), GroundAtom::of(right, d));
                        if self.nyf(&l, u) && self.nyf(&r, u) {
                            out.push(self.viable([l, r]));
                        }
                    }
                    Body::Exclusion { include, exclude } => {
                        let a = GroundAtom::of(include, d);
                        if self.nyf(&a, u) && !self.is_positive(&GroundAtom::of(exclude, d)) {
                            out.push(if self.is_positive(&a) { Obligation::Dead } else { Obligation::Forced(a) });
                        }
                    }
                    Body::LinkingInclusion { first, second } => {
                        for y in members(&self.ctx, first) {
                            let via = GroundAtom::of(first, y);
                            if !self.nyf(&via, u) {
                                continue;
                            }
                            let link = GroundAtom::new(second.clone(), y.clone(), d.clone());
                            if self.nyf(&link, u) {
                                out.push(self.viable([via, link]));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Adds forced atoms until none remain. `None` if the branch dies.
    fn close(&self, mut u: BTreeSet<GroundAtom>) -> Option<BTreeSet<GroundAtom>> {
        loop {
            let mut forced = Vec::new();
            for ob in self.obligations(&u) {
                match ob {
                    Obligation::Dead => return None,
                    Obligation::Forced(a) => forced.push(a),
                    Obligation::Choice(..) => {}
                }
            }
            if forced.is_empty() {
                return Some(u);
            }
            u.extend(forced);
        }
    }

    fn first_choice(&self, u: &BTreeSet<GroundAtom>) -> Option<(GroundAtom, GroundAtom)> {
        self.obligations(u).into_iter().find_map(|ob| match ob {
            Obligation::Choice(a, b) => Some((a, b)),
            _ => None,
        })
    }

    /// Every complete unfounded set reachable from `seed`.
    fn search(&mut self, seed: &GroundAtom) -> Vec<BTreeSet<GroundAtom>> {
        let mut successes = Vec::new();
        let mut visited: HashSet<BTreeSet<GroundAtom>> = HashSet::new();
        let mut stack = Vec::new();
        self.trace.push(TraceEvent::Choose(seed.clone()));
        match self.close(BTreeSet::from([seed.clone()])) {
            Some(u) => {
                visited.insert(u.clone());
                stack.push(u);
            }
            None => self.trace.push(TraceEvent::Retract(seed.clone())),
        }
        let mut explored = 0usize;
        while let Some(u) = stack.pop() {
            explored += 1;
            if explored > self.options.choice_cap {
                self.cap_exceeded = true;
                break;
            }
            let Some((a, b)) = self.first_choice(&u) else {
                successes.push(u);
                continue;
            };
            // Push in reverse so the first option is explored first.
            for opt in [b, a] {
                let mut next = u.clone();
                next.insert(opt.clone());
                self.trace.push(TraceEvent::Choose(opt.clone()));
                match self.close(next) {
                    Some(closed) => {
                        if visited.insert(closed.clone()) {
                            stack.push(closed);
                        }
                    }
                    None => self.trace.push(TraceEvent::Retract(opt)),
                }
            }
        }
        successes
    }

    /// Returns true if negative facts were added.
    fn step4(&mut self) -> bool {
        for seed in self.useful_facts() {
            let found = self.search(&seed);
            if found.is_empty() {
                continue;
            }
            let union: BTreeSet<GroundAtom> = found.into_iter().flatten().collect();
            for a in &union {
                self.add_fact(a.clone(), Sign::Negative);
            }
            self.state.assumed_false = union;
            return true;
        }
        self.state.assumed_false.clear();
        false
    }

    fn steps_3_and_4(&mut self) {
        loop {
            let before = self.state.facts.len();
            self.step3();
            self.step4();
            if self.state.facts.len() == before {
                return;
            }
        }
    }
}

/// Step 1: `C` is the definition of `goal`; `I` and `I+` are empty.
pub fn step1_init<S: CredentialStore + ?Sized>(stores: &S, goal: &Role) -> Result<DiscoveryState, DiscoveryError> {
    let mut run = Run::new(stores, DiscoveryState::default(), DiscoveryOptions::default());
    run.step1(goal)?;
    Ok(run.state)
}

/// Step 2: fetch every credential that could matter and close the context.
pub fn step2_collect<S: CredentialStore + ?Sized>(
    state: DiscoveryState,
    stores: &S,
) -> Result<DiscoveryState, DiscoveryError> {
    let mut run = Run::new(stores, state, DiscoveryOptions::default());
    run.step2()?;
    Ok(run.state)
}

/// Step 3: positive facts.
pub fn step3_positive(state: DiscoveryState) -> DiscoveryState {
    let empty = MemoryStore::new();
    let mut run = Run::new(&empty, state, DiscoveryOptions::default());
    run.step3();
    run.state
}

/// Step 4: negative facts from the first useful seed that yields an unfounded set.
pub fn step4_negative(state: DiscoveryState, options: DiscoveryOptions) -> DiscoveryState {
    let empty = MemoryStore::new();
    let mut run = Run::new(&empty, state, options);
    run.step4();
    run.state
}

pub fn discover<S: CredentialStore + ?Sized>(stores: &S, goal: &Role) -> Result<Discovery, DiscoveryError> {
    discover_with(stores, goal, DiscoveryOptions::default())
}

pub fn discover_with<S: CredentialStore + ?Sized>(
    stores: &S,
    goal: &Role,
    options: DiscoveryOptions,
) -> Result<Discovery, DiscoveryError> {
    let mut run = Run::new(stores, DiscoveryState::default(), options);
    run.step1(goal)?;
    run.step2()?;
    run.steps_3_and_4();
    let members = members(&run.pos, goal).cloned().collect();
    Ok(Discovery { goal: goal.clone(), members, state: run.state, trace: run.trace, cap_exceeded: run.cap_exceeded })
}

/// Compares discovered members with the well-founded semantics of everything
/// the stores hold.
pub fn verify_against_centralized<S: CredentialStore + ?Sized>(
    stores: &S,
    goal: &Role,
) -> Result<bool, DiscoveryError> {
    let found = discover(stores, goal)?;
    let central = role_semantics(&stores.union_policy(), goal);
    Ok(found.members == central.members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_policy;

    fn stores(text: &str) -> MemoryStore {
        MemoryStore::complete(&parse_policy(text).unwrap())
    }

    fn atom(s: &str) -> GroundAtom {
        let (p, rest) = s.split_once('(').unwrap();
        let (o, m) = rest.trim_end_matches(')').split_once(',').unwrap();
        GroundAtom::new(p, o, m)
    }

    #[test]
    fn single_fact() {
        let s = stores("A.r <- D.");
        let d = discover(&s, &Role::new("A", "r")).unwrap();
        assert_eq!(d.members, BTreeSet::from(["D".into()]));
        assert_eq!(d.state.credentials.len(), 1);
        assert_eq!(d.state.facts, BTreeMap::from([(atom("r(A,D)"), Sign::Positive)]));
        assert!(verify_against_centralized(&s, &Role::new("A", "r")).unwrap());
    }

    #[test]
    fn empty_definition_collects_nothing() {
        let s = stores("A.r <- D.");
        let st = step1_init(&s, &Role::new("A", "zzz")).unwrap();
        let st = step2_collect(st, &s).unwrap();
        assert!(st.credentials.is_empty() && st.context.is_empty());
    }

    #[test]
    fn missing_issuer_is_an_error() {
        let mut s = MemoryStore::new();
        s.insert("A".into(), parse_policy("A.r <- B.s.").unwrap().credentials().iter().cloned()).unwrap();
        let err = discover(&s, &Role::new("A", "r")).unwrap_err();
        assert!(matches!(err, DiscoveryError::MissingDefinition { role } if role == Role::new("B", "s")));
        assert!(discover(&s, &Role::new("Q", "r")).is_err());
    }

    #[test]
    fn step3_waits_for_negative_fact() {
        let policy = parse_policy("B.r0 <- C1.r1 - C2.r2. C1.r1 <- D. C2.r2 <- C3.r3.").unwrap();
        let state = DiscoveryState {
            credentials: policy.credentials().clone(),
            context: [atom("r1(C1,D)"), atom("r2(C2,D)"), atom("r0(B,D)")].into(),
            facts: BTreeMap::from([(atom("r1(C1,D)"), Sign::Positive)]),
            assumed_false: BTreeSet::new(),
        };
        let after = step3_positive(state.clone());
        assert_eq!(after.facts, state.facts);
        assert_eq!(step3_positive(DiscoveryState::default()), DiscoveryState::default());
    }

    #[test]
    fn step4_refutes_context_only_atom() {
        // r2(C2,D) is in the context only through an exclusion that can never fire.
        let s = stores("B.r0 <- C1.r1 - C2.r2. C1.r1 <- D. C2.r2 <- C3.r3. C3.r3 <- C1.r1 - C1.r1.");
        let st = step2_collect(step1_init(&s, &Role::new("B", "r0")).unwrap(), &s).unwrap();
        assert!(st.context.contains(&atom("r2(C2,D)")));
        let st = step3_positive(st);
        assert_eq!(st.sign_of(&atom("r0(B,D)")), None);
        let st = step4_negative(st, DiscoveryOptions::default());
        assert_eq!(st.sign_of(&atom("r2(C2,D)")), Some(Sign::Negative));
        assert_eq!(st.sign_of(&atom("r3(C3,D)")), Some(Sign::Negative));
        let st = step3_positive(st);
        assert_eq!(st.sign_of(&atom("r0(B,D)")), Some(Sign::Positive));
    }

    #[test]
    fn negative_cycle_stays_undecided() {
        let s = stores("A.r <- B.r - C.r. C.r <- B.r - A.r. B.r <- D.");
        let d = discover(&s, &Role::new("A", "r")).unwrap();
        assert!(d.members.is_empty());
        assert_eq!(d.state.sign_of(&atom("r(A,D)")), None);
        assert_eq!(d.state.sign_of(&atom("r(C,D)")), None);
        assert_eq!(d.state.sign_of(&atom("r(B,D)")), Some(Sign::Positive));
        assert!(verify_against_centralized(&s, &Role::new("A", "r")).unwrap());
    }

    #[test]
    fn intersection_choice_explores_both_branches() {
        // s(B,D) is undefined, t(C,D) is false: only the second option refutes u(A,D).
        let s = stores("A.x <- A.y - A.u. A.y <- D. A.u <- B.s & C.t. B.s <- B.s0 - B.s. B.s0 <- D. C.t <- C.t0 - C.t0. C.t0 <- D.");
        let d = discover(&s, &Role::new("A", "x")).unwrap();
        assert_eq!(d.members, BTreeSet::from(["D".into()]));
        assert!(verify_against_centralized(&s, &Role::new("A", "x")).unwrap());
    }

    #[test]
    fn tiny_cap_leaves_atoms_undecided() {
        let s = stores("A.x <- A.y - A.u. A.y <- D. A.u <- B.s & C.t. B.s <- B.s0 - B.s. B.s0 <- D. C.t <- C.t0 - C.t0. C.t0 <- D.");
        let d = discover_with(&s, &Role::new("A", "x"), DiscoveryOptions { choice_cap: 1 }).unwrap();
        assert!(d.cap_exceeded);
        assert!(d.members.is_empty());
    }

    #[test]
    fn trace_replays_to_state() {
        let s = stores("A.r <- B.r - C.r. C.r <- B.r - A.r. B.r <- D. A.s <- A.r.t. B.t <- E.");
        let d = discover(&s, &Role::new("A", "s")).unwrap();
        let replayed = DiscoveryTrace::parse(&d.trace.to_string()).unwrap().replay();
        assert_eq!(replayed.credentials, d.state.credentials);
        assert_eq!(replayed.context, d.state.context);
        assert_eq!(replayed.facts, d.state.facts);
    }
}
