use autgroup::backends::{
    a5_automaton, a5_backend, aleshin_backend, aleshin_square_automaton, alpha, b3, beta,
    certify_free_nontrivial, evaluate_permutations, fixture, format_free_word, free_projection,
    free_reduce_letters, sequence_permutation, sigma, Permutation,
};
use autgroup::decide::is_identity;
use autgroup::{Budget, MealyAutomaton, SignedState, StateSequence, Verdict};
use proptest::prelude::*;

fn seq(aut: &MealyAutomaton, text: &str) -> StateSequence {
    aut.parse_sequence(text).unwrap()
}

fn words(k: u32, n: u32) -> impl Iterator<Item = Vec<u32>> {
    (0..k.pow(n)).map(move |v| (0..n).map(|i| (v / k.pow(i)) % k).collect())
}

#[test]
fn named_permutations() {
    assert_eq!(sigma().cycle_notation(), "(1 3 2 5 4)");
    assert_eq!(alpha().apply(2), 3);
    assert_eq!(alpha().apply(1), 1);
    assert!(sigma().is_even() && alpha().is_even() && beta().is_even());
    assert!(!Permutation::from_cycles(&[&[1, 2]]).unwrap().is_even());
    assert!(Permutation::from_images([1, 1, 3, 4, 5]).is_err());
    assert!(sigma().after(sigma().inverse()).is_identity());
}

/// `[σ^β, σ^α] = σ` in A5.
#[test]
fn commutator_of_conjugates_is_sigma() {
    let (s, a, b) = (sigma(), alpha(), beta());
    let word = [
        (b, true),
        (s, true),
        (b, false),
        (a, true),
        (s, true),
        (a, false),
        (b, true),
        (s, false),
        (b, false),
        (a, true),
        (s, false),
        (a, false),
    ];
    assert_eq!(evaluate_permutations(&word), s);
    let bundle = a5_backend(false);
    for d in [1u64, 2, 4, 8] {
        let c = bundle.leaf_commutator(d).unwrap();
        assert_eq!(
            sequence_permutation(&bundle.automaton, &c).unwrap(),
            sigma(),
            "D={d}"
        );
        assert!(bundle.certify(&c));
    }
}

#[test]
fn a5_states_are_the_group() {
    let group = Permutation::alternating_group();
    assert_eq!(group.len(), 60);
    let mut sorted = group.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), 60);
    assert!(group.iter().all(|p| p.is_even()));

    let full = a5_automaton(true);
    assert_eq!(full.num_states(), 60);
    let mut seen: Vec<Permutation> = (0..60)
        .map(|s| sequence_permutation(&full, &StateSequence::single(SignedState::pos(s))).unwrap())
        .collect();
    seen.sort();
    assert_eq!(seen, sorted);
    assert_eq!(a5_automaton(false).num_states(), 4);
}

#[test]
fn a5_acts_on_first_letter_only() {
    let aut = a5_automaton(false);
    assert_eq!(
        aut.act_word(&seq(&aut, "sigma"), &[0, 0, 4]).unwrap(),
        vec![2, 0, 4]
    );
    assert_eq!(
        aut.residual(&seq(&aut, "sigma,alpha"), &[3]).unwrap(),
        seq(&aut, "id,id")
    );
}

#[test]
fn certifiers() {
    let a5 = a5_backend(false);
    assert!(a5.certify(&seq(&a5.automaton, "sigma")));
    assert!(!a5.certify(&seq(&a5.automaton, "id")));
    assert!(!a5.certify(&seq(&a5.automaton, "sigma,sigma^-1")));
    let f3 = aleshin_backend(false);
    assert!(f3.certify(&b3(2).unwrap()));
    assert!(!f3.certify(&seq(&f3.automaton, "a,b,b^-1,a^-1")));
    assert!(!f3.certify(&StateSequence::empty()));
}

#[test]
fn aleshin_action() {
    let aut = fixture("aleshin").unwrap();
    assert_eq!(aut.act_word(&seq(&aut, "a"), &[0, 1]).unwrap(), vec![1, 1]);
    assert_eq!(aut.act_word(&seq(&aut, "b"), &[0, 1]).unwrap(), vec![1, 0]);
    assert_eq!(aut.act_word(&seq(&aut, "c"), &[0, 1]).unwrap(), vec![0, 0]);
}

#[test]
fn b3_leaves() {
    let aut = fixture("aleshin").unwrap();
    assert_eq!(aut.format_sequence(&b3(1).unwrap()), "b^-1,a");
    let red = free_reduce_letters(&free_projection(&aut, &b3(2).unwrap()).unwrap());
    assert_eq!(
        format_free_word(&red),
        "c^-1 a^-1 b c a^-1 b c^-1 b^-1 a c b^-1 a"
    );
    assert!(aleshin_backend(false).leaf(2, 2).is_err());
}

/// Product states act like the two factors, the right one first.
#[test]
fn square_states_multiply() {
    let sq = aleshin_square_automaton();
    assert_eq!(sq.num_states(), 42);
    let signed: Vec<String> = ["a", "b", "c", "a^-1", "b^-1", "c^-1"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for x in &signed {
        for y in &signed {
            let prod =
                StateSequence::single(SignedState::pos(sq.state(&format!("{x}·{y}")).unwrap()));
            let pair = seq(&sq, &format!("({x}),({y})"));
            for n in 0..=6 {
                for u in words(2, n) {
                    assert_eq!(
                        sq.act_word(&prod, &u).unwrap(),
                        sq.act_word(&pair, &u).unwrap(),
                        "{x}·{y} on {u:?}"
                    );
                }
            }
            let proj = free_projection(&sq, &prod.inverse()).unwrap();
            assert_eq!(proj, free_projection(&sq, &pair.inverse()).unwrap());
        }
    }
    let leaf = aleshin_backend(true).leaf(1, 0).unwrap();
    assert!(certify_free_nontrivial(&sq, &leaf).unwrap());
}

#[test]
fn extra_letters_are_copied() {
    let b = a5_backend(false)
        .with_extra_letters(&["e".into(), "f".into()])
        .unwrap();
    let aut = &b.automaton;
    assert_eq!(aut.num_letters(), 7);
    assert_eq!(
        aut.act_word(&seq(aut, "sigma"), &[5, 0]).unwrap(),
        vec![5, 0]
    );
    assert_eq!(
        aut.act_word(&seq(aut, "sigma"), &[0, 6]).unwrap(),
        vec![2, 6]
    );
    let d = is_identity(aut, &b.leaf_commutator(2).unwrap(), Budget::default()).unwrap();
    assert_eq!(d.verdict, Verdict::NotIdentity);
}

proptest! {
    #[test]
    fn composition_matches_the_automaton(word in prop::collection::vec((0usize..3, any::<bool>()), 0..10)) {
        let aut = a5_automaton(false);
        let perms = [sigma(), alpha(), beta()];
        let names = ["sigma", "alpha", "beta"];
        let s = StateSequence::new(
            word.iter().map(|&(g, inv)| SignedState { state: aut.state(names[g]).unwrap(), inverse: inv }).collect(),
        );
        let p: Vec<(Permutation, bool)> = word.iter().map(|&(g, inv)| (perms[g], inv)).collect();
        prop_assert_eq!(sequence_permutation(&aut, &s).unwrap(), evaluate_permutations(&p));
    }

    #[test]
    fn free_projection_respects_inversion(word in prop::collection::vec((0u32..3, any::<bool>()), 0..12)) {
        let aut = fixture("aleshin").unwrap();
        let s = StateSequence::new(word.iter().map(|&(state, inverse)| SignedState { state, inverse }).collect());
        let fwd = free_projection(&aut, &s).unwrap();
        let back = free_projection(&aut, &s.inverse()).unwrap();
        let mut joined = fwd.clone();
        joined.extend(back);
        prop_assert!(free_reduce_letters(&joined).is_empty());
        // A free-nontrivial certificate is never issued for the identity.
        if certify_free_nontrivial(&aut, &s).unwrap() {
            let d = is_identity(&aut, &s, Budget::default()).unwrap();
            prop_assert_eq!(d.verdict, Verdict::NotIdentity);
        }
    }
}
