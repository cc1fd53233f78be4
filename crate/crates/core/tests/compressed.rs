use std::time::Instant;

use autgroup::compressed::*;
use autgroup::decide::{equal_in_group, is_identity_with, Budget, Canonical, Verdict};
use autgroup::slp::DEFAULT_EXPAND_GUARD;
use autgroup::tm_reduction::default_block_length;
use autgroup::turing::{fixture_machine, normalize, LocalRule, SpaceBound, TuringMachine};
use autgroup::StateSequence;
use num_bigint::BigUint;

fn machine(name: &str) -> (TuringMachine, LocalRule) {
    let tm = fixture_machine(name, SpaceBound::Constant(3)).unwrap();
    let rule = normalize(&tm).unwrap();
    (tm, rule)
}

fn bound(space: usize, log_gamma: usize) -> usize {
    space * (3 * default_block_length(space) + 1 + log_gamma) + 3
}

#[test]
fn expansion_matches_direct_target() {
    for (name, input, k) in [
        ("accept-empty", "", 1),
        ("accept-empty", "", 2),
        ("accept-nonempty", "x", 1),
        ("accept-nonempty", "x", 2),
    ] {
        let (tm, rule) = machine(name);
        let w = tm.parse_input(input).unwrap();
        let inst = build_compressed(&tm, &rule, &w, ExpParam::Test { k }).unwrap();
        let expanded = inst.slp.expand(DEFAULT_EXPAND_GUARD).unwrap();
        assert_eq!(expanded, inst.direct_target().unwrap(), "{name} k={k}");
        assert_eq!(inst.slp.expanded_length(), BigUint::from(expanded.len()));
    }
}

#[test]
fn twisted_blocks_equal_explicit_blocks() {
    let (tm, rule) = machine("accept-empty");
    for k in [1, 2] {
        let inst = build_compressed(&tm, &rule, &[], ExpParam::Test { k }).unwrap();
        let (alpha0, beta0) = (inst.assembly.alpha0(), inst.assembly.beta0());
        for e in &inst.target {
            if let TargetEntry::Twisted(seed) = e {
                let tw = autgroup::commutator::twisted(seed, 1 << k, &inst.gamma, &alpha0, &beta0)
                    .unwrap();
                let ex = inst.explicit_block(seed).unwrap();
                let d = is_identity_with(
                    &inst.automaton,
                    &ex.inverse().concat(&tw),
                    Budget::default(),
                    Canonical::Reduced,
                )
                .unwrap();
                assert_eq!(d.verdict, Verdict::Identity, "k={k}: {d:?}");
            }
        }
    }
}

#[test]
fn check_id_commutes_with_beta0() {
    let (tm, rule) = machine("accept-empty");
    let inst = build_compressed(&tm, &rule, &[], ExpParam::Test { k: 1 }).unwrap();
    let beta0 = inst.assembly.beta0();
    for d in 0..2 {
        let b = beta0.eval(d);
        let lhs = inst.gamma.concat(&b);
        let rhs = b.concat(&inst.gamma);
        let dec = equal_in_group(&inst.automaton, &lhs, &rhs, Budget::default()).unwrap();
        assert_eq!(dec.verdict, Verdict::Identity);
    }
}

#[test]
fn accepting_instance_moves_a_word() {
    for (name, input, k) in [
        ("accept-empty", "", 1),
        ("accept-nonempty", "x", 1),
        ("accept-empty", "", 2),
    ] {
        let (tm, rule) = machine(name);
        let w = tm.parse_input(input).unwrap();
        let inst = build_compressed(&tm, &rule, &w, ExpParam::Test { k }).unwrap();
        let start = Instant::now();
        let out = verify_desk_scale(&inst, &rule, &w, true, 0, DEFAULT_EXPAND_GUARD).unwrap();
        assert!(
            matches!(out, DeskOutcome::Moved(_)),
            "{name} k={k}: {out:?}"
        );
        eprintln!("{name} k={k}: accepting check {:?}", start.elapsed());
    }
}

#[test]
fn rejecting_instance_fixes_words_up_to_bound() {
    let (tm, rule) = machine("accept-empty");
    let w = tm.parse_input("x").unwrap();
    let inst = build_compressed(&tm, &rule, &w, ExpParam::Test { k: 1 }).unwrap();
    let b = bound(inst.provenance.space as usize, rule.log_size as usize);
    let start = Instant::now();
    let out = verify_desk_scale(&inst, &rule, &w, false, b, DEFAULT_EXPAND_GUARD).unwrap();
    eprintln!("rejecting k=1 bound {b}: {out:?} in {:?}", start.elapsed());
    assert!(matches!(out, DeskOutcome::FixedAll { .. }), "{out:?}");
}

#[test]
fn true_mode_length_without_expansion() {
    let (tm, rule) = machine("accept-nonempty");
    let w = tm.parse_input("x").unwrap();
    let inst = build_compressed(&tm, &rule, &w, ExpParam::True { e: 1 }).unwrap();
    assert_eq!(inst.provenance.k, 2);
    assert_eq!(inst.provenance.space, 1 + 1 + 4);
    assert!(inst.slp.expanded_length() > BigUint::from(0u32));
    let (tm, rule) = machine("parity");
    let w = tm.parse_input("xx").unwrap();
    let w3 = [w.clone(), vec![w[0]]].concat();
    let inst = build_compressed(&tm, &rule, &w3, ExpParam::True { e: 2 }).unwrap();
    assert_eq!(inst.provenance.k, 18);
    let len = inst.slp.expanded_length();
    assert!(len > BigUint::from(1u64 << 36), "{len}");
    assert!(inst.slp.expand(DEFAULT_EXPAND_GUARD).is_err());
}

#[test]
fn grammar_grows_linearly_in_k() {
    let (tm, rule) = machine("accept-empty");
    let sizes: Vec<usize> = (1..=6)
        .map(|k| {
            build_compressed(&tm, &rule, &[], ExpParam::Test { k })
                .unwrap()
                .slp
                .num_rules()
        })
        .collect();
    for pair in sizes.windows(2) {
        assert_eq!(pair[1] - pair[0], 3, "{sizes:?}");
    }
}

#[test]
fn leaves_of_accepting_residual_are_free_nontrivial() {
    let (tm, rule) = machine("accept-empty");
    let inst = build_compressed(&tm, &rule, &[], ExpParam::Test { k: 1 }).unwrap();
    let u = inst.witness_word(&rule, &[], 100).unwrap();
    let aut = &inst.automaton;
    for e in &inst.target {
        if let TargetEntry::Twisted(seed) = e {
            let tw = autgroup::commutator::twisted(
                seed,
                2,
                &inst.gamma,
                &inst.assembly.alpha0(),
                &inst.assembly.beta0(),
            )
            .unwrap();
            let res = aut.residual(&tw, &u).unwrap();
            let res = StateSequence::new(
                res.0
                    .into_iter()
                    .filter(|s| !aut.is_identity_state(s.state))
                    .collect(),
            );
            assert!(inst.assembly.backend.certify(&res));
            let d = is_identity_with(aut, &res, Budget::default(), Canonical::Reduced).unwrap();
            assert_eq!(d.verdict, Verdict::NotIdentity);
        }
    }
}
