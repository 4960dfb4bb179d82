//! Generators and reference implementations shared by the integration tests.
//!
//! The references work straight from their definitions and share no code
//! with the library beyond the data types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::collection::vec;
use proptest::prelude::*;
use rtminus::glp::{Clause, Literal, Program};
use rtminus::{Body, Credential, Entity, Policy, Role, ThreeValuedModel};

pub const ENTITIES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];
pub const ROLE_NAMES: [&str; 4] = ["r", "s", "t", "u"];

/// Name pools: a policy draws its entities from the first `entities` names
/// and its role names from the first `roles`. Small pools make cycles and
/// shared roles common.
#[derive(Clone, Copy, Debug)]
pub struct Pools {
    pub entities: usize,
    pub roles: usize,
}

pub fn pools() -> impl Strategy<Value = Pools> {
    (1..=ENTITIES.len(), 1..=ROLE_NAMES.len()).prop_map(|(entities, roles)| Pools { entities, roles })
}

pub fn entity_in(p: Pools) -> impl Strategy<Value = Entity> {
    (0..p.entities).prop_map(|i| Entity::from(ENTITIES[i]))
}

pub fn role_name_in(p: Pools) -> impl Strategy<Value = &'static str> {
    (0..p.roles).prop_map(|i| ROLE_NAMES[i])
}

pub fn role_in(p: Pools) -> impl Strategy<Value = Role> {
    (entity_in(p), role_name_in(p)).prop_map(|(e, r)| Role::new(e, r))
}

pub fn role() -> impl Strategy<Value = Role> {
    role_in(Pools { entities: ENTITIES.len(), roles: ROLE_NAMES.len() })
}

pub fn exclusion_in(p: Pools) -> impl Strategy<Value = Credential> {
    (role_in(p), role_in(p), role_in(p)).prop_map(|(h, a, b)| Credential::exclusion(h, a, b))
}

pub fn rt0_credential_in(p: Pools) -> BoxedStrategy<Credential> {
    prop_oneof![
        3 => (role_in(p), entity_in(p)).prop_map(|(h, m)| Credential::member(h, m)),
        2 => (role_in(p), role_in(p)).prop_map(|(h, s)| Credential::inclusion(h, s)),
        2 => (role_in(p), role_name_in(p), role_name_in(p)).prop_map(|(h, a, b)| Credential::linking(h, a, b)),
        1 => (role_in(p), role_in(p), role_in(p)).prop_map(|(h, l, r)| Credential::intersection(h, l, r)),
    ]
    .boxed()
}

pub fn rt0_credential() -> BoxedStrategy<Credential> {
    rt0_credential_in(Pools { entities: ENTITIES.len(), roles: ROLE_NAMES.len() })
}

pub fn credential_in(p: Pools) -> BoxedStrategy<Credential> {
    prop_oneof![4 => rt0_credential_in(p), 1 => exclusion_in(p)].boxed()
}

pub fn rt0_policy(max: usize) -> impl Strategy<Value = Policy> {
    pools().prop_flat_map(move |p| vec(rt0_credential_in(p), 0..=max)).prop_map(Policy::new)
}

pub fn policy(max: usize) -> impl Strategy<Value = Policy> {
    pools().prop_flat_map(move |p| vec(credential_in(p), 0..=max)).prop_map(Policy::new)
}

/// Nonempty policies with at most `max` credentials of which at least a
/// fifth are exclusions.
pub fn exclusion_heavy_policy(max: usize) -> impl Strategy<Value = Policy> {
    (pools(), 1..=max)
        .prop_flat_map(|(p, n)| {
            let min = n.div_ceil(5);
            (min..=n.div_ceil(2).max(min))
                .prop_flat_map(move |k| (vec(exclusion_in(p), k), vec(rt0_credential_in(p), n - k)))
        })
        .prop_map(|(ex, rest)| Policy::new(ex.into_iter().chain(rest)))
        .prop_filter("at least 20% exclusions", |p| {
            5 * p.credentials().iter().filter(|c| c.is_exclusion()).count() >= p.len()
        })
}

/// Ground programs over atoms `0..n` with `n <= max_atoms`. Every atom is in
/// the universe even when no clause mentions it.
pub fn ground_program(max_atoms: u16) -> impl Strategy<Value = Program<u16>> {
    (1..=max_atoms).prop_flat_map(|n| {
        let clause = (0..n, vec(0..n, 0..=3), vec(0..n, 0..=2)).prop_map(|(h, pos, neg)| {
            let body = pos.into_iter().map(Literal::pos).chain(neg.into_iter().map(Literal::neg)).collect();
            Clause::new(h, body)
        });
        vec(clause, 0..=2 * n as usize).prop_map(move |cs| Program::new(cs, 0..n))
    })
}

/// Least model of the program with every clause deleted whose negative body
/// meets `assumed_true`, the remaining negative literals dropped.
fn gamma<A: Ord + Clone>(p: &Program<A>, assumed_true: &BTreeSet<A>) -> BTreeSet<A> {
    let mut m = BTreeSet::new();
    loop {
        let mut changed = false;
        for c in p.clauses() {
            if m.contains(&c.head) || c.negative_body().any(|a| assumed_true.contains(a)) {
                continue;
            }
            if c.positive_body().all(|a| m.contains(a)) {
                m.insert(c.head.clone());
                changed = true;
            }
        }
        if !changed {
            return m;
        }
    }
}

/// Alternating fixpoint: true atoms are the least fixpoint of gamma twice
/// applied, false atoms are those outside gamma of it.
pub fn reference_wfs<A: Ord + Clone>(p: &Program<A>) -> ThreeValuedModel<A> {
    let mut k = BTreeSet::new();
    loop {
        let over = gamma(p, &k);
        let next = gamma(p, &over);
        if next == k {
            let false_atoms = p.atoms().iter().filter(|a| !over.contains(*a)).cloned().collect();
            let undefined_atoms = over.difference(&k).cloned().collect();
            return ThreeValuedModel { true_atoms: k, false_atoms, undefined_atoms };
        }
        k = next;
    }
}

pub type Members = BTreeMap<Role, BTreeSet<Entity>>;

fn get<'a>(m: &'a Members, r: &Role) -> impl Iterator<Item = &'a Entity> + 'a {
    m.get(r).into_iter().flatten()
}

/// Least role membership of the policy where an exclusion subtracts the
/// members `excluded` gives the excluded role. `None` reads each exclusion
/// as an inclusion of its include side.
fn close_roles(policy: &Policy, excluded: Option<&Members>) -> Members {
    let mut m = Members::new();
    loop {
        let mut changed = false;
        for c in policy.credentials() {
            let add: Vec<Entity> = match &c.body {
                Body::SimpleMember { member } => vec![member.clone()],
                Body::SimpleInclusion { source } => get(&m, source).cloned().collect(),
                Body::LinkingInclusion { first, second } => {
                    get(&m, first).flat_map(|e| get(&m, &Role::new(e.clone(), second.clone()))).cloned().collect()
                }
                Body::IntersectionInclusion { left, right } => {
                    let r: BTreeSet<&Entity> = get(&m, right).collect();
                    get(&m, left).filter(|e| r.contains(e)).cloned().collect()
                }
                Body::Exclusion { include, exclude } => match excluded {
                    None => get(&m, include).cloned().collect(),
                    Some(ex) => {
                        let out: BTreeSet<&Entity> = get(ex, exclude).collect();
                        get(&m, include).filter(|e| !out.contains(e)).cloned().collect()
                    }
                },
            };
            let slot = m.entry(c.head.clone()).or_default();
            for e in add {
                changed |= slot.insert(e);
            }
        }
        if !changed {
            return m;
        }
    }
}

/// Memberships of the context policy.
pub fn context_members(policy: &Policy) -> Members {
    close_roles(policy, None)
}

/// Well-founded role memberships computed on credentials directly: `.0`
/// holds the members, `.1` the members plus the undefined ones.
pub fn reference_roles(policy: &Policy) -> (Members, Members) {
    let mut k = Members::new();
    loop {
        let over = close_roles(policy, Some(&k));
        let next = close_roles(policy, Some(&over));
        if next == k {
            return (k, over);
        }
        k = next;
    }
}

pub fn members_of(m: &Members, role: &Role) -> BTreeSet<Entity> {
    get(m, role).cloned().collect()
}

/// Roles whose definitions a discovery for `goal` may fetch: body roles, and
/// for a linked role `A.r1.r2` every `D.r2` with `D` in the context of `A.r1`.
pub fn relevant_roles(policy: &Policy, goal: &Role) -> BTreeSet<Role> {
    let ctx = context_members(policy);
    let mut seen = BTreeSet::from([goal.clone()]);
    let mut todo = vec![goal.clone()];
    while let Some(role) = todo.pop() {
        for c in policy.credentials().iter().filter(|c| c.head == role) {
            let mut next: Vec<Role> = c.body.roles().into_iter().cloned().collect();
            if let Body::LinkingInclusion { first, second } = &c.body {
                next.extend(get(&ctx, first).map(|e| Role::new(e.clone(), second.clone())));
            }
            for r in next {
                if seen.insert(r.clone()) {
                    todo.push(r);
                }
            }
        }
    }
    seen
}
