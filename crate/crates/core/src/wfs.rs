//! Well-founded model of ground general logic programs.
//!
//! The engine alternates two phases until neither changes anything:
//!
//! 1. close the true atoms under every clause whose positive body is true and
//!    whose negative body is false;
//! 2. compute the greatest unfounded set and make it false.
//!
//! The greatest unfounded set is found by complementation: the atoms that are
//! still *possibly derivable* form a least fixpoint (a clause may fire if none
//! of its positive atoms is false and none of its negated atoms is true), and
//! every undecided atom outside that fixpoint is unfounded.
//!
//! Atoms left undecided when the loop stops are undefined.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::glp::{translate, GroundAtom, Program};
use crate::policy::{Entity, Policy, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Undefined,
}

impl Truth {
    /// Membership verdict: only `True` counts.
    pub fn is_member(self) -> bool {
        self == Truth::True
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Undefined => "undefined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WfsError {
    #[error("atom `{0}` is not in the program's atom universe")]
    UnknownAtom(String),
    #[error("program contains negative literals (first in clause `{0}`)")]
    NegationInPositiveProgram(String),
}

/// Partition of a program's atom universe into true, false and undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeValuedModel<A: Ord> {
    pub true_atoms: BTreeSet<A>,
    pub false_atoms: BTreeSet<A>,
    pub undefined_atoms: BTreeSet<A>,
}

impl<A: Ord + fmt::Display> ThreeValuedModel<A> {
    pub fn truth(&self, atom: &A) -> Option<Truth> {
        if self.true_atoms.contains(atom) {
            Some(Truth::True)
        } else if self.false_atoms.contains(atom) {
            Some(Truth::False)
        } else if self.undefined_atoms.contains(atom) {
            Some(Truth::Undefined)
        } else {
            None
        }
    }

    /// Three sections `TRUE`, `FALSE`, `UNDEFINED`, atoms sorted by text.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (title, set) in
            [("TRUE", &self.true_atoms), ("FALSE", &self.false_atoms), ("UNDEFINED", &self.undefined_atoms)]
        {
            out.push_str(title);
            out.push('\n');
            let mut lines: Vec<String> = set.iter().map(|a| a.to_string()).collect();
            lines.sort();
            for l in lines {
                out.push_str(&l);
                out.push('\n');
            }
        }
        out
    }
}

pub fn query_atom<A: Ord + fmt::Display>(model: &ThreeValuedModel<A>, atom: &A) -> Result<Truth, WfsError> {
    model.truth(atom).ok_or_else(|| WfsError::UnknownAtom(atom.to_string()))
}

/// Program with atoms replaced by their index in the sorted atom universe.
struct Indexed {
    n: usize,
    heads: Vec<usize>,
    pos: Vec<Vec<usize>>,
    neg: Vec<Vec<usize>>,
    /// clauses in which each atom occurs positively (with multiplicity)
    pos_occ: Vec<Vec<usize>>,
}

impl Indexed {
    fn new<A: Ord + Clone>(program: &Program<A>) -> (Self, Vec<&A>) {
        let atoms: Vec<&A> = program.atoms().iter().collect();
        let idx = |a: &A| atoms.binary_search(&a).expect("clause atom outside universe");
        let n = atoms.len();
        let m = program.clauses().len();
        let mut ix = Indexed {
            n,
            heads: Vec::with_capacity(m),
            pos: Vec::with_capacity(m),
            neg: Vec::with_capacity(m),
            pos_occ: vec![Vec::new(); n],
        };
        for (ci, clause) in program.clauses().iter().enumerate() {
            ix.heads.push(idx(&clause.head));
            let pos: Vec<usize> = clause.positive_body().map(idx).collect();
            let neg: Vec<usize> = clause.negative_body().map(idx).collect();
            for &a in &pos {
                ix.pos_occ[a].push(ci);
            }
            ix.pos.push(pos);
            ix.neg.push(neg);
        }
        (ix, atoms)
    }

    /// Least fixpoint over the clauses accepted by `enabled`, counting only
    /// positive body atoms. Returns the derived set as a bitmap.
    fn least_fixpoint(&self, enabled: impl Fn(usize) -> bool, seed: &[bool]) -> Vec<bool> {
        let mut derived = seed.to_vec();
        let mut remaining: Vec<usize> = self.pos.iter().map(|p| p.len()).collect();
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&a| derived[a]).collect();
        let on: Vec<bool> = (0..self.heads.len()).map(&enabled).collect();
        for (ci, &head) in self.heads.iter().enumerate() {
            if on[ci] && self.pos[ci].is_empty() && !derived[head] {
                derived[head] = true;
                queue.push_back(head);
            }
        }
        while let Some(a) = queue.pop_front() {
            for &ci in &self.pos_occ[a] {
                remaining[ci] -= 1;
                if remaining[ci] == 0 && on[ci] {
                    let h = self.heads[ci];
                    if !derived[h] {
                        derived[h] = true;
                        queue.push_back(h);
                    }
                }
            }
        }
        derived
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Value {
    Unknown,
    True,
    False,
}

/// Computes the well-founded model of `program`.
pub fn well_founded_model<A: Ord + Clone>(program: &Program<A>) -> ThreeValuedModel<A> {
    let (ix, atoms) = Indexed::new(program);
    let mut value = vec![Value::Unknown; ix.n];
    let mut alternations = 0usize;
    loop {
        alternations += 1;
        assert!(alternations <= ix.n + 1, "well-founded iteration exceeded its bound");

        // Phase 1: true closure. Seeding with the current true atoms keeps
        // their occurrence counters in step.
        let seed: Vec<bool> = value.iter().map(|v| *v == Value::True).collect();
        let truth = ix.least_fixpoint(|ci| ix.neg[ci].iter().all(|&b| value[b] == Value::False), &seed);
        let mut changed = false;
        for a in 0..ix.n {
            if truth[a] && value[a] != Value::True {
                debug_assert!(value[a] == Value::Unknown);
                value[a] = Value::True;
                changed = true;
            }
        }

        // Phase 2: greatest unfounded set by complementation.
        let possible = ix.least_fixpoint(
            |ci| {
                ix.pos[ci].iter().all(|&b| value[b] != Value::False)
                    && ix.neg[ci].iter().all(|&b| value[b] != Value::True)
            },
            &vec![false; ix.n],
        );
        for a in 0..ix.n {
            if value[a] == Value::Unknown && !possible[a] {
                value[a] = Value::False;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut model = ThreeValuedModel {
        true_atoms: BTreeSet::new(),
        false_atoms: BTreeSet::new(),
        undefined_atoms: BTreeSet::new(),
    };
    for (a, v) in value.into_iter().enumerate() {
        let atom = atoms[a].clone();
        match v {
            Value::True => model.true_atoms.insert(atom),
            Value::False => model.false_atoms.insert(atom),
            Value::Unknown => model.undefined_atoms.insert(atom),
        };
    }
    model
}

/// Least model of a negation-free program.
pub fn positive_fragment_model<A: Ord + Clone + fmt::Display>(program: &Program<A>) -> Result<BTreeSet<A>, WfsError> {
    if let Some(c) = program.clauses().iter().find(|c| c.body.iter().any(|l| !l.positive)) {
        return Err(WfsError::NegationInPositiveProgram(c.to_string()));
    }
    let (ix, atoms) = Indexed::new(program);
    let derived = ix.least_fixpoint(|_| true, &vec![false; ix.n]);
    Ok(derived.into_iter().enumerate().filter(|(_, d)| *d).map(|(a, _)| atoms[a].clone()).collect())
}

/// The members of a role: entities whose membership atom is true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoleSemantics {
    pub role: Role,
    pub members: BTreeSet<Entity>,
}

/// Members of `role` in a precomputed model.
pub fn members_in(model: &ThreeValuedModel<GroundAtom>, role: &Role) -> BTreeSet<Entity> {
    model
        .true_atoms
        .iter()
        .filter(|a| a.predicate == role.name && a.owner == role.owner)
        .map(|a| a.member.clone())
        .collect()
}

pub fn role_semantics(policy: &Policy, role: &Role) -> RoleSemantics {
    if !policy.role_names().contains(&role.name) || !policy.universe().contains(&role.owner) {
        return RoleSemantics { role: role.clone(), members: BTreeSet::new() };
    }
    let model = well_founded_model(&translate(policy));
    RoleSemantics { role: role.clone(), members: members_in(&model, role) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glp::{parse_raw_program, Clause, Literal};
    use crate::parser::parse_policy;

    fn names(set: &BTreeSet<String>) -> Vec<&str> {
        set.iter().map(String::as_str).collect()
    }

    #[test]
    fn example_one() {
        let p = parse_raw_program("p :- q. q :- p. r :- not q. s :- not t. t :- not s. u :- not s.").unwrap();
        let m = well_founded_model(&p);
        assert_eq!(names(&m.true_atoms), ["r"]);
        assert_eq!(names(&m.false_atoms), ["p", "q"]);
        assert_eq!(names(&m.undefined_atoms), ["s", "t", "u"]);
        assert_eq!(query_atom(&m, &"u".to_string()), Ok(Truth::Undefined));
        assert_eq!(query_atom(&m, &"r".to_string()), Ok(Truth::True));
        assert!(query_atom(&m, &"zz".to_string()).is_err());
    }

    #[test]
    fn empty_program_is_all_false() {
        let p: Program<String> = Program::new(Vec::new(), ["a".to_string(), "b".to_string()]);
        let m = well_founded_model(&p);
        assert!(m.true_atoms.is_empty() && m.undefined_atoms.is_empty());
        assert_eq!(m.false_atoms.len(), 2);
    }

    #[test]
    fn example_two() {
        let policy = parse_policy("A.r <- B.r - C.r. C.r <- B.r - A.r. B.r <- D.").unwrap();
        let m = well_founded_model(&translate(&policy));
        assert_eq!(m.true_atoms.len() + m.false_atoms.len() + m.undefined_atoms.len(), 16);
        let t: Vec<_> = m.true_atoms.iter().map(|a| a.to_string()).collect();
        assert_eq!(t, ["r(B,D)"]);
        let u: Vec<_> = m.undefined_atoms.iter().map(|a| a.to_string()).collect();
        assert_eq!(u, ["r(A,D)", "r(C,D)"]);
        assert_eq!(query_atom(&m, &GroundAtom::new("r", "A", "D")), Ok(Truth::Undefined));
    }

    #[test]
    fn positive_cycle_is_false() {
        let policy = parse_policy("A.r <- B.r. B.r <- A.r. C.s <- C.").unwrap();
        let m = well_founded_model(&translate(&policy));
        assert_eq!(m.truth(&GroundAtom::new("r", "A", "C")), Some(Truth::False));
        let least = positive_fragment_model(&translate(&policy)).unwrap();
        assert_eq!(least.len(), 1);
    }

    #[test]
    fn one_step_closure() {
        let r1 = GroundAtom::new("r1", "B", "D");
        let r = GroundAtom::new("r", "A", "D");
        let p = Program::new([Clause::fact(r1.clone()), Clause::new(r.clone(), vec![Literal::pos(r1.clone())])], []);
        assert_eq!(positive_fragment_model(&p).unwrap(), BTreeSet::from([r1, r]));
    }

    #[test]
    fn positive_model_rejects_negation() {
        let p = parse_raw_program("a :- not b.").unwrap();
        assert!(matches!(positive_fragment_model(&p), Err(WfsError::NegationInPositiveProgram(_))));
    }

    #[test]
    fn role_semantics_unknown_role_is_empty() {
        let policy = parse_policy("A.r <- D.").unwrap();
        assert!(role_semantics(&policy, &Role::new("A", "zzz")).members.is_empty());
        assert!(role_semantics(&policy, &Role::new("Q", "r")).members.is_empty());
        assert_eq!(role_semantics(&policy, &Role::new("A", "r")).members, BTreeSet::from(["D".into()]));
    }

    #[test]
    fn dump_sections() {
        let p = parse_raw_program("a. b :- not a. c :- not c.").unwrap();
        assert_eq!(well_founded_model(&p).dump(), "TRUE\na\nFALSE\nb\nUNDEFINED\nc\n");
    }
}
