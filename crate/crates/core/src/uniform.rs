//! DFA intersection emptiness reduced to the uniform word problem over a
//! five-letter alphabet.
//!
//! Acceptor states copy every letter of Γ and, on `$`, move to `sigma` when final
//! and to `id` otherwise. The gadgets `alpha0`/`beta0` copy Γ and turn into
//! `alpha`/`beta` on `$`. The sequence is `B_{β₀,α₀}` over the initial states, so
//! after `w$` it collapses unless every acceptor accepts `w`, in which case it is
//! `σ`, which moves the next letter.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use crate::automaton::{Alphabet, AutomatonBuilder, MealyAutomaton, SignedState, StateSequence};
use crate::backends::a5_automaton;
use crate::commutator::{balanced, CommutatorSpec, LevelMap};
use crate::error::{Error, Result};

pub const END_MARKER: &str = "$";

/// A complete deterministic acceptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfaAcceptor {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: usize,
    pub finals: Vec<bool>,
    /// `delta[state * |Γ| + letter]`.
    pub delta: Vec<usize>,
}

impl DfaAcceptor {
    pub fn new(
        states: &[&str],
        alphabet: &[&str],
        initial: &str,
        finals: &[&str],
        transitions: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let alphabet: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
        let finals: Vec<String> = finals.iter().map(|s| s.to_string()).collect();
        let transitions: Vec<(String, String, String)> = transitions
            .iter()
            .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
            .collect();
        Self::from_names(states, alphabet, initial, &finals, &transitions)
    }

    pub fn from_names(
        states: Vec<String>,
        alphabet: Vec<String>,
        initial: &str,
        finals: &[String],
        transitions: &[(String, String, String)],
    ) -> Result<Self> {
        let si: FxHashMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let li: FxHashMap<&str, usize> = alphabet
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        if si.len() != states.len() || states.is_empty() {
            return Err(Error::Malformed(
                "acceptor states must be non-empty and distinct".into(),
            ));
        }
        let st = |n: &str| {
            si.get(n)
                .copied()
                .ok_or_else(|| Error::UnknownState(n.to_string()))
        };
        let k = alphabet.len();
        let mut delta = vec![usize::MAX; states.len() * k];
        for (f, a, t) in transitions {
            let a = *li
                .get(a.as_str())
                .ok_or_else(|| Error::UnknownLetter(a.clone()))?;
            let slot = &mut delta[st(f)? * k + a];
            let t = st(t)?;
            if *slot != usize::MAX && *slot != t {
                return Err(Error::Malformed(format!(
                    "acceptor state `{f}` is nondeterministic"
                )));
            }
            *slot = t;
        }
        if delta.contains(&usize::MAX) {
            return Err(Error::Malformed("acceptor is not complete".into()));
        }
        let mut fin = vec![false; states.len()];
        for f in finals {
            fin[st(f)?] = true;
        }
        let initial = st(initial)?;
        Ok(DfaAcceptor {
            states,
            alphabet,
            initial,
            finals: fin,
            delta,
        })
    }

    /// One state, final, accepting everything.
    pub fn all_words(alphabet: &[&str]) -> Self {
        let t: Vec<(&str, &str, &str)> = alphabet.iter().map(|a| ("q", *a, "q")).collect();
        DfaAcceptor::new(&["q"], alphabet, "q", &["q"], &t).unwrap()
    }

    pub fn next(&self, state: usize, letter: usize) -> usize {
        self.delta[state * self.alphabet.len() + letter]
    }

    pub fn accepts(&self, word: &[u32]) -> bool {
        let s = word
            .iter()
            .fold(self.initial, |s, &a| self.next(s, a as usize));
        self.finals[s]
    }
}

/// A built reduction instance.
#[derive(Clone, Debug)]
pub struct UniformInstance {
    pub automaton: MealyAutomaton,
    pub sequence: StateSequence,
    /// Number of acceptors given.
    pub acceptors: usize,
    /// Entries of the commutator after padding.
    pub padded: usize,
}

fn check_alphabets(dfas: &[DfaAcceptor]) -> Result<&[String]> {
    let first = dfas
        .first()
        .ok_or_else(|| Error::EmptyInput("at least one acceptor is required".into()))?;
    if dfas.iter().any(|d| d.alphabet != first.alphabet) {
        return Err(Error::AlphabetMismatch);
    }
    Ok(&first.alphabet)
}

pub fn build_uniform(dfas: &[DfaAcceptor]) -> Result<UniformInstance> {
    let gamma = check_alphabets(dfas)?;
    if gamma.len() != 4 || gamma.iter().any(|a| a == END_MARKER) {
        return Err(Error::AlphabetMismatch);
    }
    let mut names: Vec<String> = gamma.to_vec();
    names.push(END_MARKER.to_string());
    let alphabet = Alphabet::new(&names)?;
    let dollar = 4u32;
    // Permutation letters 1..5 become a1..a4, $ in order.
    let a5 = a5_automaton(false).relabeled(&names)?;
    let mut b = AutomatonBuilder::new(alphabet);
    b.import(&a5, |s| s.to_string())?;
    let id = b.state("id")?;
    let sigma = b.state("sigma")?;
    let mut initials = Vec::with_capacity(dfas.len());
    for (k, dfa) in dfas.iter().enumerate() {
        let ids: Vec<u32> = dfa
            .states
            .iter()
            .map(|s| b.add_state(&format!("dfa{k}/{s}")))
            .collect::<Result<_>>()?;
        for (s, &sid) in ids.iter().enumerate() {
            for a in 0..4 {
                b.set(sid, a, a, ids[dfa.next(s, a as usize)])?;
            }
            b.set(sid, dollar, dollar, if dfa.finals[s] { sigma } else { id })?;
        }
        initials.push(ids[dfa.initial]);
    }
    for (gadget, target) in [("alpha0", "alpha"), ("beta0", "beta")] {
        let g = b.add_state(gadget)?;
        let t = b.state(target)?;
        for a in 0..4 {
            b.set(g, a, a, g)?;
        }
        b.set(g, dollar, dollar, t)?;
    }
    let alpha0 = StateSequence::single(SignedState::pos(b.state("alpha0")?));
    let beta0 = StateSequence::single(SignedState::pos(b.state("beta0")?));
    let automaton = b.build("uniform")?;
    let padded = initials.len().next_power_of_two();
    let last = *initials.last().unwrap();
    initials.resize(padded, last);
    let entries = initials
        .into_iter()
        .map(|s| StateSequence::single(SignedState::pos(s)))
        .collect();
    let sequence = balanced(&CommutatorSpec {
        entries,
        alpha: LevelMap::constant("alpha0", alpha0),
        beta: LevelMap::constant("beta0", beta0),
    })?;
    Ok(UniformInstance {
        automaton,
        sequence,
        acceptors: dfas.len(),
        padded,
    })
}

/// Shortest (then lexicographically first) word accepted by every acceptor.
pub fn shortest_common_word(dfas: &[DfaAcceptor]) -> Result<Option<Vec<u32>>> {
    let gamma = check_alphabets(dfas)?;
    let k = gamma.len();
    let start: Vec<usize> = dfas.iter().map(|d| d.initial).collect();
    let accepting = |t: &[usize]| dfas.iter().zip(t).all(|(d, &s)| d.finals[s]);
    let mut parent: FxHashMap<Vec<usize>, Option<(Vec<usize>, u32)>> = FxHashMap::default();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        if accepting(&t) {
            let mut w = Vec::new();
            let mut cur = t;
            while let Some(Some((p, a))) = parent.get(&cur).cloned() {
                w.push(a);
                cur = p;
            }
            w.reverse();
            return Ok(Some(w));
        }
        for a in 0..k {
            let n: Vec<usize> = dfas.iter().zip(&t).map(|(d, &s)| d.next(s, a)).collect();
            if !parent.contains_key(&n) {
                parent.insert(n.clone(), Some((t.clone(), a as u32)));
                queue.push_back(n);
            }
        }
    }
    Ok(None)
}

/// Reachability in the product acceptor.
pub fn dfa_intersection_empty(dfas: &[DfaAcceptor]) -> Result<bool> {
    Ok(shortest_common_word(dfas)?.is_none())
}

pub const DFA_FIXTURE_NAMES: &[&str] = &["empty-pair", "common-word"];

/// Acceptors over `a1..a4`: `empty-pair` accepts words containing `a1` and words
/// avoiding it (empty intersection); `common-word` accepts words containing `a2`
/// and words of even length (shortest common word `a1 a2`).
pub fn fixture_dfas(name: &str) -> Result<Vec<DfaAcceptor>> {
    let ab = ["a1", "a2", "a3", "a4"];
    let contains = |letter: &str, final_state: &str| {
        let mut t = Vec::new();
        for a in ab {
            t.push(("no", a, if a == letter { "yes" } else { "no" }));
            t.push(("yes", a, "yes"));
        }
        DfaAcceptor::new(&["no", "yes"], &ab, "no", &[final_state], &t)
    };
    match name {
        "empty-pair" => Ok(vec![contains("a1", "yes")?, contains("a1", "no")?]),
        "common-word" => {
            let t: Vec<(&str, &str, &str)> = ab
                .iter()
                .flat_map(|a| [("even", *a, "odd"), ("odd", *a, "even")])
                .collect();
            Ok(vec![
                contains("a2", "yes")?,
                DfaAcceptor::new(&["even", "odd"], &ab, "even", &["even"], &t)?,
            ])
        }
        other => Err(Error::UnknownState(format!(
            "no acceptor fixture named `{other}`"
        ))),
    }
}
