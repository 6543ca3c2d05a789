use std::collections::BTreeMap;

use groundfix::parse::{parse_clauses, parse_facts, parse_program, write_facts};
use groundfix_core::program::Program;
use groundfix_core::semiring::Semiring;
use proptest::prelude::*;

const VARS: [&str; 5] = ["x", "y", "z", "w", "v"];
const EDB: [(&str, usize); 3] = [("R", 2), ("S", 1), ("W", 3)];

/// Safe clause text for `T/arity` with a body over EDB symbols and `T`.
fn clause(arity: usize) -> impl Strategy<Value = String> {
    let atom = (0..4usize, prop::collection::vec(0..VARS.len(), 3));
    (prop::collection::vec(atom, 1..4), prop::collection::vec(0..VARS.len(), arity)).prop_map(move |(atoms, _)| {
        let head: Vec<&str> = VARS[..arity].to_vec();
        let mut body: Vec<String> = atoms
            .iter()
            .map(|(p, args)| {
                let (sym, a) = if *p == 3 { ("T", arity) } else { EDB[*p] };
                format!("{sym}({})", args[..a].iter().map(|&i| VARS[i]).collect::<Vec<_>>().join(", "))
            })
            .collect();
        // keep the rule safe
        body.push(format!("W({})", (0..3).map(|i| head.get(i).copied().unwrap_or("x")).collect::<Vec<_>>().join(", ")));
        format!("T({}) :- {}.", head.join(", "), body.join(", "))
    })
}

fn program_text() -> impl Strategy<Value = String> {
    (1..=3usize).prop_flat_map(|arity| {
        prop::collection::vec(clause(arity), 1..5).prop_map(|cs| format!("{}\n@target T.\n", cs.join("\n")))
    })
}

fn body_multiset(p: &Program) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for r in &p.rules {
        for b in &r.bodies {
            *out.entry(format!("{}:{:?}", r.head, b.atoms)).or_insert(0) += 1;
        }
    }
    out
}

proptest! {
    #[test]
    fn pretty_printing_round_trips(text in program_text()) {
        let p = parse_program(&text).unwrap();
        let again = parse_program(&p.to_string()).unwrap();
        prop_assert_eq!(&again, &p);
        prop_assert_eq!(parse_program(&again.to_string()).unwrap(), again);
    }

    #[test]
    fn merging_keeps_every_body(text in program_text()) {
        let (clauses, _) = parse_clauses(&text).unwrap();
        let p = parse_program(&text).unwrap();
        prop_assert_eq!(p.num_bodies(), clauses.len());
        let printed = parse_program(&p.to_string()).unwrap();
        prop_assert_eq!(body_multiset(&printed), body_multiset(&p));
    }

    #[test]
    fn facts_are_nonzero_and_domain_is_bounded(
        facts in prop::collection::vec((0usize..3, prop::collection::vec(0u8..8, 3), 0u32..6), 0..30)
    ) {
        let sr = Semiring::tropical();
        let mut text = String::new();
        for (p, args, w) in &facts {
            let (sym, a) = EDB[*p];
            let args: Vec<String> = args[..a].iter().map(|c| format!("c{c}")).collect();
            let w = if *w == 5 { "inf".to_string() } else { w.to_string() };
            text.push_str(&format!("{sym}({}) = {w}.\n", args.join(", ")));
        }
        let (inst, _) = parse_facts(&text, &sr).unwrap();
        for (_, rel) in inst.relations() {
            prop_assert!(rel.facts.values().all(|v| !sr.is_zero(v)));
        }
        prop_assert!(inst.domain_size() <= inst.num_facts() * 3);
        let (again, _) = parse_facts(&write_facts(&inst), &sr).unwrap();
        // symbols whose facts were all `𝟘` keep an empty relation
        let nonempty = |i: &groundfix_core::instance::Instance| -> Vec<(String, Vec<_>)> {
            i.relations()
                .filter(|(_, r)| !r.is_empty())
                .map(|(p, r)| (p.to_string(), r.facts.iter().map(|(t, v)| (i.names(t).join(","), *v)).collect()))
                .collect()
        };
        prop_assert_eq!(nonempty(&again), nonempty(&inst));
    }
}
