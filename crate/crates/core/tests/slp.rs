use autgroup::backends::{a5_backend, adding_machine, fixture, FIXTURE_NAMES};
use autgroup::commutator::{balanced, twisted, CommutatorSpec, LevelMap};
use autgroup::decide::is_identity;
use autgroup::slp::{
    act_streaming, act_streaming_visit, compressed_is_identity, slp_twisted, terms, Production,
    Slp, SlpBuilder, Sym, DEFAULT_EXPAND_GUARD,
};
use autgroup::{Budget, Error, MealyAutomaton, SignedState, StateSequence, Verdict};
use num_bigint::BigUint;
use proptest::prelude::*;

fn rules(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

#[test]
fn parsing_and_formatting() {
    let aut = adding_machine();
    let s = Slp::parse(&aut, &rules(&[("S", "A^-1, q A"), ("A", "q id^-1")]), "S").unwrap();
    assert_eq!(s.start_name(), "S");
    assert_eq!(s.num_rules(), 2);
    assert_eq!(s.format_body(&aut, 0), "A^-1 q A");
    assert_eq!(
        aut.format_sequence(&s.expand(100).unwrap()),
        "id,q^-1,q,q,id^-1"
    );
    assert_eq!(s.terminals().len(), 2);
    assert!(Slp::parse(&aut, &rules(&[("S", "r")]), "S").is_err());
    assert!(Slp::parse(&aut, &rules(&[("S", "q")]), "T").is_err());
    assert!(matches!(
        Slp::parse(&aut, &rules(&[("S", "q"), ("S", "q")]), "S"),
        Err(Error::Duplicate(_))
    ));
    let bad = vec![Production {
        name: "S".into(),
        body: vec![Sym::Var {
            index: 3,
            inverse: false,
        }],
    }];
    assert!(Slp::new(bad, "S").is_err());
}

/// A chain of doublings has length `2^k` while the grammar stays linear in `k`.
#[test]
fn doubling_chain_lengths() {
    let aut = adding_machine();
    let q = SignedState::pos(aut.state("q").unwrap());
    let mut b = SlpBuilder::new();
    let chain = b.power_chain("Q", &[Sym::Term(q)], 200).unwrap();
    let start = b.name(*chain.last().unwrap()).to_string();
    let slp = b.build(&start).unwrap();
    assert_eq!(slp.num_rules(), 201);
    assert_eq!(slp.expanded_length(), BigUint::from(1u32) << 200usize);
    assert!(matches!(
        slp.expand(DEFAULT_EXPAND_GUARD),
        Err(Error::GuardExceeded { .. })
    ));

    // Streaming visits every letter, so the action is checked on a shorter chain:
    // q^(2^16) fixes the first 16 bits of 0^n and flips bit 17.
    let mut b = SlpBuilder::new();
    let chain = b.power_chain("Q", &[Sym::Term(q)], 16).unwrap();
    let start = b.name(*chain.last().unwrap()).to_string();
    let slp = b.build(&start).unwrap();
    let u = vec![0u32; 20];
    let (out, summary) = act_streaming(&aut, &slp, &u).unwrap();
    assert_eq!(&out[..16], &u[..16]);
    assert_eq!(&out[16..], &[1, 0, 0, 0]);
    assert_eq!(summary.length, BigUint::from(1u32 << 16));
    // No carry leaves the twenty bits, so every residual is the identity.
    assert!(summary.all_identity);
    let (_, summary) = act_streaming(&aut, &slp, &[1; 17]).unwrap();
    assert!(!summary.all_identity);
}

#[test]
fn compressed_decisions() {
    let aut = adding_machine();
    let q = SignedState::pos(aut.state("q").unwrap());
    let mut b = SlpBuilder::new();
    let chain = b.power_chain("Q", &[Sym::Term(q)], 12).unwrap();
    let top = *chain.last().unwrap();
    b.add("S", vec![SlpBuilder::var(top), SlpBuilder::var_inv(top)])
        .unwrap();
    b.add("T", vec![SlpBuilder::var(top), Sym::Term(q)])
        .unwrap();
    let s = b.clone().build("S").unwrap();
    let t = b.build("T").unwrap();
    let guard = 1000;

    // Both beyond the guard: the streaming search reports what it verified.
    let d = compressed_is_identity(&aut, &s, Budget::new(200, 6).unwrap(), guard).unwrap();
    assert_eq!(d.verdict, Verdict::LimitExceeded);
    assert_eq!(d.stats.verified_depth, 6);
    let d = compressed_is_identity(&aut, &t, Budget::new(200, 6).unwrap(), guard).unwrap();
    assert_eq!(d.verdict, Verdict::NotIdentity);
    assert_eq!(d.witness, Some(vec![0]));

    // Within the guard the expanded sequence is decided exactly.
    let small = Slp::parse(&aut, &rules(&[("S", "A A^-1"), ("A", "q q q")]), "S").unwrap();
    let d = compressed_is_identity(&aut, &small, Budget::default(), guard).unwrap();
    assert_eq!(d.verdict, Verdict::Identity);
}

#[test]
fn streamed_residuals_come_right_to_left() {
    let aut = fixture("grigorchuk").unwrap();
    let slp = Slp::parse(&aut, &rules(&[("S", "a b c")]), "S").unwrap();
    let mut res = Vec::new();
    act_streaming_visit(&aut, &slp, &[1, 1], &mut |s| res.push(s)).unwrap();
    res.reverse();
    let seq = slp.expand(10).unwrap();
    assert_eq!(
        StateSequence::new(res),
        aut.residual(&seq, &[1, 1]).unwrap()
    );
}

/// Twisted and balanced commutators built as grammars expand to the direct ones.
#[test]
fn grammar_commutators_expand_correctly() {
    let b = a5_backend(false);
    let aut = &b.automaton;
    let p = aut.parse_sequence("sigma,beta").unwrap();
    let g = aut.parse_sequence("alpha").unwrap();
    for d in [1u64, 2, 4, 8, 16] {
        let slp = slp_twisted(&p, d, &g, &b.alpha, &b.beta).unwrap();
        assert_eq!(
            slp.expand(DEFAULT_EXPAND_GUARD).unwrap(),
            twisted(&p, d, &g, &b.alpha, &b.beta).unwrap()
        );
        assert!(slp.num_rules() as u64 <= 2 * (d.trailing_zeros() as u64 + 1));

        let entries: Vec<StateSequence> = (0..d).map(|i| p.pow(i as i64 % 3)).collect();
        let mut sb = SlpBuilder::new();
        let top = sb
            .balanced("B", entries.iter().map(terms).collect(), &b.alpha, &b.beta)
            .unwrap();
        let name = sb.name(top).to_string();
        let slp = sb.build(&name).unwrap();
        let spec = CommutatorSpec {
            entries,
            alpha: b.alpha.clone(),
            beta: b.beta.clone(),
        };
        assert_eq!(
            slp.expand(DEFAULT_EXPAND_GUARD).unwrap(),
            balanced(&spec).unwrap()
        );
    }
    assert!(slp_twisted(&p, 3, &g, &LevelMap::empty(), &LevelMap::empty()).is_err());
}

fn slp_strategy() -> impl Strategy<Value = (MealyAutomaton, Slp)> {
    prop::sample::select(FIXTURE_NAMES.to_vec()).prop_flat_map(|name| {
        let aut = fixture(name).unwrap();
        let n = aut.num_states() as u32;
        let sym = (
            0u32..n,
            any::<bool>(),
            any::<prop::sample::Index>(),
            any::<bool>(),
            0u8..10,
        );
        (
            Just(aut),
            prop::collection::vec(prop::collection::vec(sym, 1..=4), 1..=6),
        )
            .prop_map(|(aut, bodies)| {
                let rules: Vec<Production> = bodies
                    .iter()
                    .enumerate()
                    .map(|(i, body)| Production {
                        name: format!("V{i}"),
                        body: body
                            .iter()
                            .map(|&(state, inverse, pick, inv_var, coin)| {
                                if i > 0 && coin < 6 {
                                    Sym::Var {
                                        index: pick.index(i),
                                        inverse: inv_var,
                                    }
                                } else {
                                    Sym::Term(SignedState { state, inverse })
                                }
                            })
                            .collect(),
                    })
                    .collect();
                let start = format!("V{}", rules.len() - 1);
                (aut, Slp::new(rules, &start).unwrap())
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn streaming_matches_expansion((aut, slp) in slp_strategy(), u in prop::collection::vec(0u32..2, 0..8)) {
        let seq = slp.expand(DEFAULT_EXPAND_GUARD).unwrap();
        prop_assert_eq!(slp.expanded_length(), BigUint::from(seq.len()));
        let (out, summary) = act_streaming(&aut, &slp, &u).unwrap();
        let (want, res) = aut.cross(&seq, &u).unwrap();
        prop_assert_eq!(out, want);
        prop_assert_eq!(summary.all_identity, aut.all_identity(&res));
        prop_assert_eq!(summary.length, BigUint::from(res.len()));
    }

    #[test]
    fn inversion_is_an_involution((aut, slp) in slp_strategy()) {
        let inv = slp.invert();
        prop_assert_eq!(inv.expand(DEFAULT_EXPAND_GUARD).unwrap(), slp.expand(DEFAULT_EXPAND_GUARD).unwrap().inverse());
        prop_assert_eq!(inv.invert(), slp.clone());
        prop_assert_eq!(inv.expanded_length(), slp.expanded_length());
        let both = slp.expand(DEFAULT_EXPAND_GUARD).unwrap().concat(&inv.expand(DEFAULT_EXPAND_GUARD).unwrap());
        prop_assert_eq!(is_identity(&aut, &both, Budget::default()).unwrap().verdict, Verdict::Identity);
    }
}
