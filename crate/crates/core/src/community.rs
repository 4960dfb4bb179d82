//! Generated virtual-community policies of arbitrary size.
//!
//! Coordinators `K0 .. K{n-1}` know each other in a ring. `K0` defines the
//! derived roles used to admit a new coordinator: everyone reachable through
//! `coord`, every locally accepted candidate, and every objection raised by
//! any coordinator's black list. Candidate `D` is accepted by `K0` and blocked
//! by nobody, `E` is blocked by `K0`, `F` is accepted by `K0` but blocked by
//! the last coordinator, and `G` is accepted only by `K1`, which makes `K0`
//! object to it. For every `n >= 2` the only admissible candidate is `D`.

use crate::policy::{Credential, Entity, Policy, Role};

pub fn coordinator(i: usize) -> Entity {
    Entity::new(format!("K{i}"))
}

pub fn virtual_community(coordinators: usize) -> Policy {
    assert!(coordinators >= 2, "a community needs at least two coordinators");
    let k0 = coordinator(0);
    let role = |e: &Entity, name: &str| Role::new(e.clone(), name);
    let mut creds = vec![
        Credential::exclusion(role(&k0, "addCoord"), role(&k0, "allCandidates"), role(&k0, "objectionToAdd")),
        Credential::linking(role(&k0, "allCandidates"), "allCoord", "agreeToAdd"),
        Credential::linking(role(&k0, "objectionToAdd"), "allCoord", "disagreeToAdd"),
        Credential::exclusion(role(&k0, "disagreeToAdd"), role(&k0, "allCandidates"), role(&k0, "agreeToAdd")),
        Credential::linking(role(&k0, "allCoord"), "allCoord", "coord"),
        Credential::member(role(&k0, "allCoord"), k0.clone()),
        Credential::member(role(&k0, "agreeToAdd"), "D"),
        Credential::member(role(&k0, "agreeToAdd"), "F"),
        Credential::member(role(&k0, "disagreeToAdd"), "E"),
        Credential::member(role(&coordinator(1), "agreeToAdd"), "G"),
        Credential::member(role(&coordinator(coordinators - 1), "disagreeToAdd"), "F"),
    ];
    for i in 0..coordinators {
        let next = coordinator((i + 1) % coordinators);
        creds.push(Credential::member(role(&coordinator(i), "coord"), next));
    }
    Policy::new(creds)
}
