use autgroup::automaton::{disjoint_union, NamedTransition, RawAutomaton};
use autgroup::backends::{adding_machine, check_mark_raw, fixture, FIXTURE_NAMES};
use autgroup::{Error, MealyAutomaton, SignedState, StateSequence};
use proptest::prelude::*;

fn words(k: u32, n: u32) -> impl Iterator<Item = Vec<u32>> {
    (0..k.pow(n)).map(move |v| (0..n).map(|i| (v / k.pow(i)) % k).collect())
}

fn seq(aut: &MealyAutomaton, text: &str) -> StateSequence {
    aut.parse_sequence(text).unwrap()
}

#[test]
fn validation_reports() {
    let am = adding_machine().validate();
    assert!(am.deterministic && am.complete && am.invertible);

    let squash = RawAutomaton {
        name: "squash".into(),
        alphabet: vec!["0".into(), "1".into()],
        states: vec!["p".into()],
        transitions: vec![
            NamedTransition::new("p", "0", "0", "p"),
            NamedTransition::new("p", "1", "0", "p"),
        ],
    };
    let r = squash.validate();
    assert!(r.deterministic && r.complete && !r.invertible);
    assert_eq!(r.colliding.len(), 2);

    let r = check_mark_raw().validate();
    assert!(!r.invertible);

    let mut gappy = squash.clone();
    gappy.transitions.pop();
    gappy
        .transitions
        .push(NamedTransition::new("p", "0", "1", "p"));
    let r = gappy.validate();
    assert!(!r.deterministic && !r.complete);
    assert_eq!(r.missing, vec![("p".to_string(), "1".to_string())]);
}

#[test]
fn empty_alphabet_and_automaton_rejected() {
    let raw = RawAutomaton {
        name: "e".into(),
        alphabet: vec![],
        states: vec!["p".into()],
        transitions: vec![],
    };
    assert!(raw.build().is_err());
    let raw = RawAutomaton {
        name: "e".into(),
        alphabet: vec!["0".into()],
        states: vec![],
        transitions: vec![],
    };
    assert!(raw.build().is_err());
}

#[test]
fn letter_actions() {
    let aut = adding_machine();
    let (q, id) = (aut.state("q").unwrap(), aut.state("id").unwrap());
    assert_eq!(
        aut.act_letter(SignedState::pos(q), 0).unwrap(),
        (1, SignedState::pos(id))
    );
    assert_eq!(
        aut.act_letter(SignedState::neg(q), 1).unwrap(),
        (0, SignedState::neg(id))
    );
    assert_eq!(
        aut.act_letter(SignedState::pos(id), 1).unwrap(),
        (1, SignedState::pos(id))
    );
}

#[test]
fn negative_state_needs_invertible_automaton() {
    let squash = RawAutomaton {
        name: "squash".into(),
        alphabet: vec!["0".into(), "1".into()],
        states: vec!["p".into()],
        transitions: vec![
            NamedTransition::new("p", "0", "0", "p"),
            NamedTransition::new("p", "1", "0", "p"),
        ],
    };
    let aut = squash.build().unwrap();
    assert_eq!(
        aut.act_letter(SignedState::pos(0), 1).unwrap(),
        (0, SignedState::pos(0))
    );
    let s = SignedState::neg(0);
    assert!(matches!(aut.act_letter(s, 0), Err(Error::NotInvertible(_))));
}

#[test]
fn word_actions() {
    let aut = adding_machine();
    assert_eq!(
        aut.act_word(&seq(&aut, "q,q,q"), &[0, 0, 0]).unwrap(),
        vec![1, 1, 0]
    );
    assert_eq!(
        aut.act_word(&StateSequence::empty(), &[1, 0]).unwrap(),
        vec![1, 0]
    );
    assert_eq!(
        aut.act_word(&seq(&aut, "q,q^-1"), &[0, 1, 1, 0]).unwrap(),
        vec![0, 1, 1, 0]
    );
    assert_eq!(aut.residual(&seq(&aut, "q"), &[1]).unwrap(), seq(&aut, "q"));
    assert_eq!(
        aut.residual(&seq(&aut, "q"), &[0]).unwrap(),
        seq(&aut, "id")
    );
    assert_eq!(
        aut.residual(&seq(&aut, "q,q"), &[]).unwrap(),
        seq(&aut, "q,q")
    );
}

#[test]
fn rightmost_state_acts_first() {
    // Grigorchuk: a swaps the first letter; b on 1 continues with c.
    let aut = fixture("grigorchuk").unwrap();
    let ab = aut.act_word(&seq(&aut, "a,b"), &[1, 0]).unwrap();
    let b_then_a = aut
        .act_word(
            &seq(&aut, "a"),
            &aut.act_word(&seq(&aut, "b"), &[1, 0]).unwrap(),
        )
        .unwrap();
    assert_eq!(ab, b_then_a);
}

#[test]
fn inversion_and_reduction() {
    let aut = adding_machine();
    assert_eq!(seq(&aut, "q").inverse(), seq(&aut, "q^-1"));
    assert_eq!(seq(&aut, "id,q").inverse(), seq(&aut, "q^-1,id^-1"));
    assert_eq!(StateSequence::empty().inverse(), StateSequence::empty());
    assert_eq!(seq(&aut, "q,q^-1").free_reduce(), StateSequence::empty());
    assert_eq!(seq(&aut, "id,q,q^-1,q").free_reduce(), seq(&aut, "id,q"));
    assert_eq!(seq(&aut, "q,id").free_reduce(), seq(&aut, "q,id"));
}

#[test]
fn unions() {
    let am = adding_machine();
    assert_eq!(disjoint_union(&[&am, &am], false).unwrap().num_states(), 4);
    let shared = disjoint_union(&[&am, &am], true).unwrap();
    assert_eq!(shared.num_states(), 3);
    assert_eq!(
        shared.state_names().iter().filter(|n| *n == "id").count(),
        1
    );
    let one = disjoint_union(&[&am], false).unwrap();
    assert_eq!(one.num_states(), 2);
    let q = seq(&one, "adding-machine/q");
    assert_eq!(one.act_word(&q, &[1, 1, 0]).unwrap(), vec![0, 0, 1]);
    let grig = fixture("grigorchuk").unwrap();
    let a5 = fixture("a5").unwrap();
    assert!(matches!(
        disjoint_union(&[&grig, &a5], false),
        Err(Error::AlphabetMismatch)
    ));
}

#[test]
fn inverse_action_on_fixtures() {
    for name in FIXTURE_NAMES {
        let aut = fixture(name).unwrap();
        let k = aut.num_letters() as u32;
        for s in 0..aut.num_states() as u32 {
            for t in 0..aut.num_states() as u32 {
                let p = StateSequence::new(vec![SignedState::pos(s), SignedState::neg(t)]);
                for n in 0..=if k > 3 { 3 } else { 4 } {
                    for u in words(k, n) {
                        let v = aut.act_word(&p, &u).unwrap();
                        assert_eq!(aut.act_word(&p.inverse(), &v).unwrap(), u, "{name}");
                        let r = seq(
                            &aut,
                            &format!("{},{}", aut.state_name(s), aut.state_name(s)),
                        );
                        let r = r.concat(&r.inverse()).concat(&p);
                        assert_eq!(
                            aut.act_word(&r.free_reduce(), &u).unwrap(),
                            aut.act_word(&r, &u).unwrap()
                        );
                    }
                }
            }
        }
    }
}

fn fixture_strategy() -> impl Strategy<Value = MealyAutomaton> {
    prop::sample::select(FIXTURE_NAMES.to_vec()).prop_map(|n| fixture(n).unwrap())
}

fn case() -> impl Strategy<Value = (MealyAutomaton, StateSequence, Vec<u32>, Vec<u32>)> {
    fixture_strategy().prop_flat_map(|aut| {
        let n = aut.num_states() as u32;
        let k = aut.num_letters() as u32;
        let entry =
            (0..n, any::<bool>()).prop_map(|(state, inverse)| SignedState { state, inverse });
        (
            Just(aut),
            prop::collection::vec(entry, 0..6).prop_map(StateSequence::new),
            prop::collection::vec(0..k, 0..8),
            prop::collection::vec(0..k, 0..8),
        )
    })
}

proptest! {
    #[test]
    fn length_prefix_and_factorization((aut, s, u, v) in case()) {
        let uv = [u.clone(), v.clone()].concat();
        let out_u = aut.act_word(&s, &u).unwrap();
        let out_uv = aut.act_word(&s, &uv).unwrap();
        prop_assert_eq!(out_uv.len(), uv.len());
        prop_assert_eq!(&out_uv[..u.len()], &out_u[..]);
        let (o, res) = aut.cross(&s, &u).unwrap();
        prop_assert_eq!(&o, &out_u);
        prop_assert_eq!(res.len(), s.len());
        let tail = aut.act_word(&res, &v).unwrap();
        prop_assert_eq!(out_uv, [out_u, tail].concat());
    }

    #[test]
    fn inversion_is_involutive((aut, s, u, _v) in case()) {
        prop_assert_eq!(s.inverse().inverse(), s.clone());
        let out = aut.act_word(&s, &u).unwrap();
        prop_assert_eq!(aut.act_word(&s.inverse(), &out).unwrap(), u.clone());
        prop_assert_eq!(aut.act_word(&s.free_reduce(), &u).unwrap(), out);
        let red = s.free_reduce();
        prop_assert!(red.0.windows(2).all(|w| w[0] != w[1].inv()));
    }

    #[test]
    fn sequences_permute_words((aut, s, _u, _v) in case(), n in 0..=3u32) {
        let k = aut.num_letters() as u32;
        let mut images: Vec<Vec<u32>> = words(k, n).map(|u| aut.act_word(&s, &u).unwrap()).collect();
        let total = images.len();
        images.sort();
        images.dedup();
        prop_assert_eq!(images.len(), total);
    }

    #[test]
    fn round_trip_through_text((aut, s, u, _v) in case()) {
        prop_assert_eq!(aut.parse_sequence(&aut.format_sequence(&s)).unwrap(), s);
        let a = aut.alphabet();
        prop_assert_eq!(a.parse_word(&a.format_word(&u)).unwrap(), u);
    }
}
