use autgroup::decide::{is_identity, is_identity_with};
use autgroup::uniform::{
    build_uniform, dfa_intersection_empty, shortest_common_word, DfaAcceptor, END_MARKER,
};
use autgroup::{Budget, Canonical, Error, Verdict};
use proptest::prelude::*;

const AB: [&str; 4] = ["a1", "a2", "a3", "a4"];

/// Accepts words containing `letter`.
fn contains(letter: &str) -> DfaAcceptor {
    let mut t = Vec::new();
    for a in AB {
        t.push(("no", a, if a == letter { "yes" } else { "no" }));
        t.push(("yes", a, "yes"));
    }
    DfaAcceptor::new(&["no", "yes"], &AB, "no", &["yes"], &t).unwrap()
}

/// Accepts words avoiding `letter`.
fn avoids(letter: &str) -> DfaAcceptor {
    let mut d = contains(letter);
    d.finals = d.finals.iter().map(|f| !f).collect();
    d
}

/// Accepts words of even length.
fn even_length() -> DfaAcceptor {
    let mut t = Vec::new();
    for a in AB {
        t.push(("e", a, "o"));
        t.push(("o", a, "e"));
    }
    DfaAcceptor::new(&["e", "o"], &AB, "e", &["e"], &t).unwrap()
}

#[test]
fn acceptor_construction() {
    let d = contains("a2");
    assert!(d.accepts(&[0, 1]) && !d.accepts(&[0, 2, 3]) && !d.accepts(&[]));
    assert!(DfaAcceptor::new(&["s"], &AB, "s", &[], &[("s", "a1", "s")]).is_err());
    assert!(DfaAcceptor::new(&["s"], &AB, "t", &[], &[]).is_err());
    let t: Vec<(&str, &str, &str)> = AB
        .iter()
        .map(|a| ("s", *a, "s"))
        .chain([("s", "a1", "t")])
        .collect();
    assert!(DfaAcceptor::new(&["s", "t"], &AB, "s", &[], &t).is_err());
}

#[test]
fn shortest_words() {
    assert_eq!(
        shortest_common_word(&[contains("a2"), contains("a3")]).unwrap(),
        Some(vec![1, 2])
    );
    assert_eq!(
        shortest_common_word(&[even_length(), contains("a4")]).unwrap(),
        Some(vec![0, 3])
    );
    assert_eq!(
        shortest_common_word(&[DfaAcceptor::all_words(&AB)]).unwrap(),
        Some(vec![])
    );
    assert!(dfa_intersection_empty(&[contains("a1"), avoids("a1")]).unwrap());
    assert!(matches!(
        shortest_common_word(&[]),
        Err(Error::EmptyInput(_))
    ));
}

#[test]
fn instance_shape() {
    let inst = build_uniform(&[contains("a1"), avoids("a1"), even_length()]).unwrap();
    assert_eq!(inst.acceptors, 3);
    assert_eq!(inst.padded, 4);
    assert_eq!(inst.automaton.num_letters(), 5);
    assert_eq!(inst.automaton.alphabet().name(4), END_MARKER);
    // Four entries of length one and three levels of constant gadgets: (11·16 − 8)/3 letters.
    assert_eq!(inst.sequence.len(), 56);
    assert!(inst.automaton.has_state("dfa2/o") && inst.automaton.has_state("beta0"));

    let three = ["a1", "a2", "a3"];
    assert!(matches!(
        build_uniform(&[DfaAcceptor::all_words(&three)]),
        Err(Error::AlphabetMismatch)
    ));
    let other = DfaAcceptor::all_words(&["b1", "b2", "b3", "b4"]);
    assert!(matches!(
        build_uniform(&[contains("a1"), other]),
        Err(Error::AlphabetMismatch)
    ));
    assert!(build_uniform(&[]).is_err());
}

#[test]
fn empty_intersection_is_identity() {
    let inst = build_uniform(&[contains("a1"), avoids("a1")]).unwrap();
    let d = is_identity(&inst.automaton, &inst.sequence, Budget::default()).unwrap();
    assert_eq!(d.verdict, Verdict::Identity);
}

#[test]
fn common_word_moves_after_the_marker() {
    let dfas = [contains("a2"), contains("a3"), even_length()];
    let inst = build_uniform(&dfas).unwrap();
    let d = is_identity(&inst.automaton, &inst.sequence, Budget::default()).unwrap();
    assert_eq!(d.verdict, Verdict::NotIdentity);
    let w = d.witness.unwrap();
    let common = shortest_common_word(&dfas).unwrap().unwrap();
    assert_eq!(&w[..common.len()], &common[..]);
    assert_eq!(w[common.len()], 4);
    assert_eq!(w.len(), common.len() + 2);
}

fn dfa_strategy() -> impl Strategy<Value = DfaAcceptor> {
    (1usize..=3).prop_flat_map(|n| {
        (
            prop::collection::vec(0..n, n * 4),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(delta, fin)| {
                let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
                let mut ts = Vec::new();
                for s in 0..n {
                    for (a, name) in AB.iter().enumerate() {
                        ts.push((
                            states[s].clone(),
                            name.to_string(),
                            states[delta[s * 4 + a]].clone(),
                        ));
                    }
                }
                let finals: Vec<String> = states
                    .iter()
                    .zip(&fin)
                    .filter(|(_, f)| **f)
                    .map(|(s, _)| s.clone())
                    .collect();
                DfaAcceptor::from_names(
                    states,
                    AB.iter().map(|s| s.to_string()).collect(),
                    "s0",
                    &finals,
                    &ts,
                )
                .unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn identity_iff_intersection_empty(dfas in prop::collection::vec(dfa_strategy(), 1..=3)) {
        let inst = build_uniform(&dfas).unwrap();
        let d = is_identity_with(&inst.automaton, &inst.sequence, Budget::default(), Canonical::Reduced).unwrap();
        let empty = dfa_intersection_empty(&dfas).unwrap();
        prop_assert_eq!(d.verdict == Verdict::Identity, empty);
        if let Some(w) = d.witness {
            // The prefix before the marker is accepted by every acceptor.
            let cut = w.iter().position(|&a| a == 4).unwrap();
            prop_assert!(dfas.iter().all(|a| a.accepts(&w[..cut])));
        }
    }

    #[test]
    fn gamma_words_are_fixed(dfas in prop::collection::vec(dfa_strategy(), 1..=2), u in prop::collection::vec(0u32..4, 0..8)) {
        let inst = build_uniform(&dfas).unwrap();
        prop_assert_eq!(inst.automaton.act_word(&inst.sequence, &u).unwrap(), u);
    }
}

#[test]
fn acceptor_fixtures() {
    use autgroup::uniform::{fixture_dfas, DFA_FIXTURE_NAMES};
    assert_eq!(DFA_FIXTURE_NAMES.len(), 2);
    assert!(dfa_intersection_empty(&fixture_dfas("empty-pair").unwrap()).unwrap());
    assert_eq!(
        shortest_common_word(&fixture_dfas("common-word").unwrap()).unwrap(),
        Some(vec![0, 1])
    );
    assert!(fixture_dfas("none").is_err());
}
