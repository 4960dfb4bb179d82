mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use rtminus::glp::grounding_size;
use rtminus::wfs::members_in;
use rtminus::{context_policy, parse_policy, translate, well_founded_model, Body, GroundAtom, ThreeValuedModel, Truth};

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    fs::read_to_string(path).unwrap()
}

/// Rule schemas of the community policy, `?Y` and `?Z` ranging over its six
/// entities.
const SCHEMAS: [&str; 5] = [
    "addCoord(A,?Y) :- allCandidates(A,?Y), not objectionToAdd(A,?Y).",
    "allCandidates(A,?Y) :- allCoord(A,?Z), agreeToAdd(?Z,?Y).",
    "objectionToAdd(A,?Y) :- allCoord(A,?Z), disagreeToAdd(?Z,?Y).",
    "disagreeToAdd(A,?Y) :- allCandidates(A,?Y), not agreeToAdd(A,?Y).",
    "allCoord(A,?Y) :- allCoord(A,?Z), coord(?Z,?Y).",
];

const FACTS: [&str; 9] = [
    "allCoord(A,A).",
    "coord(A,B).",
    "coord(B,C).",
    "coord(C,B).",
    "coord(C,A).",
    "agreeToAdd(A,D).",
    "disagreeToAdd(A,E).",
    "disagreeToAdd(B,F).",
    "disagreeToAdd(C,F).",
];

#[test]
fn community_translation_matches_the_schema_table() {
    let p = parse_policy(&fixture("vc.rt")).unwrap();
    let universe = ["A", "B", "C", "D", "E", "F"];
    let mut expected: BTreeSet<String> = FACTS.iter().map(|s| s.to_string()).collect();
    for schema in SCHEMAS {
        for y in universe {
            for z in universe {
                expected.insert(schema.replace("?Y", y).replace("?Z", z));
            }
        }
    }
    let got: BTreeSet<String> = translate(&p).dump().lines().map(str::to_string).collect();
    assert_eq!(got, expected);
    assert_eq!(got.len(), 9 + 6 + 36 + 36 + 6 + 36);
}

#[test]
fn member_credential_is_a_single_fact() {
    let p = parse_policy("Company.tester <- Alice.").unwrap();
    assert_eq!(translate(&p).dump(), "tester(Company,Alice).\n");
}

#[test]
fn inclusion_grounds_over_the_universe() {
    let p = parse_policy("A.r <- B.r1.").unwrap();
    assert_eq!(translate(&p).dump(), "r(A,A) :- r1(B,A).\nr(A,B) :- r1(B,B).\n");
}

#[test]
fn community_context_contains_the_candidates() {
    let p = parse_policy(&fixture("vc.rt")).unwrap();
    let ctx = context_policy(&p);
    assert!(ctx.credentials().iter().all(|c| !c.is_exclusion()));
    assert_eq!(ctx.len(), p.len());
    let model = rtminus::wfs::positive_fragment_model(&translate(&ctx)).unwrap();
    let add: BTreeSet<&str> = model
        .iter()
        .filter(|a| a.predicate.as_str() == "addCoord" && a.owner.as_str() == "A")
        .map(|a| a.member.as_str())
        .collect();
    assert!(add.contains("D"));
    let coords: BTreeSet<&str> = model
        .iter()
        .filter(|a| a.predicate.as_str() == "allCoord" && a.owner.as_str() == "A")
        .map(|a| a.member.as_str())
        .collect();
    assert_eq!(coords, BTreeSet::from(["A", "B", "C"]));
}

proptest! {
    #[test]
    fn clause_count_matches_grounding(p in common::policy(15)) {
        let n = p.universe().len();
        let prog = translate(&p);
        let mut bound = 0;
        for c in p.credentials() {
            let exact = match c.body {
                Body::SimpleMember { .. } => 1,
                Body::LinkingInclusion { .. } => n * n,
                _ => n,
            };
            prop_assert_eq!(grounding_size(c, n), exact);
            bound += exact;
        }
        prop_assert!(prog.clauses().len() <= bound);
        for clause in prog.clauses() {
            prop_assert!(clause.negative_body().count() <= 1);
            let first_neg = clause.body.iter().position(|l| !l.positive).unwrap_or(clause.body.len());
            prop_assert!(clause.body[first_neg..].iter().all(|l| !l.positive));
        }
    }

    #[test]
    fn negation_only_from_exclusions(p in common::rt0_policy(15)) {
        prop_assert!(!translate(&p).has_negation());
    }

    #[test]
    fn atoms_stay_inside_the_universe(p in common::policy(15)) {
        let prog = translate(&p);
        for a in prog.atoms() {
            prop_assert!(p.universe().contains(&a.owner) && p.universe().contains(&a.member));
            prop_assert!(p.role_names().contains(&a.predicate));
        }
        let n = p.universe().len();
        prop_assert_eq!(prog.atoms().len(), p.role_names().len() * n * n);
    }

    #[test]
    fn context_policy_is_idempotent(p in common::policy(15)) {
        let once = context_policy(&p);
        prop_assert!(once.credentials().iter().all(|c| !c.is_exclusion()));
        prop_assert_eq!(context_policy(&once), once);
    }

    #[test]
    fn exclusion_free_policies_are_their_own_context(p in common::rt0_policy(15)) {
        prop_assert_eq!(context_policy(&p), p);
    }

    #[test]
    fn roles_are_contained_in_their_context(p in common::policy(12)) {
        let model = well_founded_model(&translate(&p));
        let ctx = rtminus::wfs::positive_fragment_model(&translate(&context_policy(&p))).unwrap();
        let reference = common::context_members(&p);
        for a in all_atoms(&model) {
            let in_ctx = ctx.contains(a);
            prop_assert_eq!(in_ctx, common::members_of(&reference, &a.role()).contains(&a.member));
            if model.true_atoms.contains(a) {
                prop_assert!(in_ctx, "{} true but outside the context", a);
            }
            if !in_ctx {
                prop_assert_eq!(model.truth(a), Some(Truth::False), "{} outside the context must be false", a);
            }
        }
        for role in p.defined_roles() {
            let members = members_in(&model, &role);
            let ctx_members: BTreeSet<_> = ctx.iter().filter(|a| a.role() == role).map(|a| a.member.clone()).collect();
            prop_assert!(members.is_subset(&ctx_members));
        }
    }
}

fn all_atoms(m: &ThreeValuedModel<GroundAtom>) -> impl Iterator<Item = &GroundAtom> {
    m.true_atoms.iter().chain(&m.false_atoms).chain(&m.undefined_atoms)
}
