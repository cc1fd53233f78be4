//! Concrete automata: the adding machine, the A5 permutation automaton, the
//! Aleshin automaton for the free group of rank three (plain and with the
//! product "square" states), Grigorchuk's automaton, and the literal
//! check-mark automaton that motivates generalized check-marking.

use std::fmt;
use std::sync::Arc;

use crate::automaton::{
    Alphabet, AutomatonBuilder, MealyAutomaton, NamedTransition, RawAutomaton, SignedState,
    StateSequence,
};
use crate::commutator::{balanced, CommutatorSpec, LevelMap};
use crate::error::{Error, Result};

pub const FIXTURE_NAMES: &[&str] = &[
    "adding-machine",
    "a5",
    "a5-full",
    "aleshin",
    "aleshin-sq",
    "grigorchuk",
];

pub fn fixture(name: &str) -> Result<MealyAutomaton> {
    match name {
        "adding-machine" => Ok(adding_machine()),
        "a5" => Ok(a5_automaton(false)),
        "a5-full" => Ok(a5_automaton(true)),
        "aleshin" => Ok(aleshin_automaton()),
        "aleshin-sq" => Ok(aleshin_square_automaton()),
        "grigorchuk" => Ok(grigorchuk_automaton()),
        other => Err(Error::UnknownState(format!("no fixture named `{other}`"))),
    }
}

fn build(name: &str, alphabet: &[&str], rows: &[(&str, &str, &str, &str)]) -> MealyAutomaton {
    let mut b = AutomatonBuilder::new(Alphabet::new(alphabet).expect("fixture alphabet"));
    for &(f, i, o, t) in rows {
        b.set_named(f, i, o, t).expect("fixture transition");
    }
    b.build(name).expect("fixture automaton")
}

/// `q` adds one to a reversed binary numeral.
pub fn adding_machine() -> MealyAutomaton {
    build(
        "adding-machine",
        &["0", "1"],
        &[
            ("q", "0", "1", "id"),
            ("q", "1", "0", "q"),
            ("id", "0", "0", "id"),
            ("id", "1", "1", "id"),
        ],
    )
}

pub fn grigorchuk_automaton() -> MealyAutomaton {
    build(
        "grigorchuk",
        &["0", "1"],
        &[
            ("a", "0", "1", "id"),
            ("a", "1", "0", "id"),
            ("b", "0", "0", "a"),
            ("b", "1", "1", "c"),
            ("c", "0", "0", "a"),
            ("c", "1", "1", "d"),
            ("d", "0", "0", "id"),
            ("d", "1", "1", "b"),
            ("id", "0", "0", "id"),
            ("id", "1", "1", "id"),
        ],
    )
}

/// Marks the first unmarked symbol of each `#`-separated block. Two inputs share
/// an output in `check`, and `check` has no `#` transition, exactly as drawn.
pub fn check_mark_raw() -> RawAutomaton {
    let t = NamedTransition::new;
    RawAutomaton {
        name: "check-mark".into(),
        alphabet: vec!["g".into(), "g*".into(), "#".into()],
        states: vec!["check".into(), "wait".into()],
        transitions: vec![
            t("check", "g*", "g*", "check"),
            t("check", "g", "g*", "wait"),
            t("wait", "g", "g", "wait"),
            t("wait", "g*", "g*", "wait"),
            t("wait", "#", "#", "check"),
        ],
    }
}

/// A permutation of `{1, …, 5}`, stored zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation([u8; 5]);

impl Permutation {
    pub fn identity() -> Self {
        Permutation([0, 1, 2, 3, 4])
    }

    /// From one-based images `[π(1), …, π(5)]`.
    pub fn from_images(images: [u8; 5]) -> Result<Self> {
        let mut seen = [false; 5];
        let mut p = [0u8; 5];
        for (i, &x) in images.iter().enumerate() {
            if !(1..=5).contains(&x) || seen[x as usize - 1] {
                return Err(Error::Precondition(format!(
                    "{images:?} is not a permutation"
                )));
            }
            seen[x as usize - 1] = true;
            p[i] = x - 1;
        }
        Ok(Permutation(p))
    }

    /// From disjoint one-based cycles, e.g. `[[1, 3, 2, 5, 4]]`.
    pub fn from_cycles(cycles: &[&[u8]]) -> Result<Self> {
        let mut images = [1, 2, 3, 4, 5];
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                images[x as usize - 1] = c[(k + 1) % c.len()];
            }
        }
        Self::from_images(images)
    }

    /// One-based image of one-based `i`.
    pub fn apply(self, i: u8) -> u8 {
        self.0[i as usize - 1] + 1
    }

    /// `self ∘ other`: `other` acts first.
    pub fn after(self, other: Permutation) -> Self {
        let mut p = [0u8; 5];
        for (i, slot) in p.iter_mut().enumerate() {
            *slot = self.0[other.0[i] as usize];
        }
        Permutation(p)
    }

    pub fn inverse(self) -> Self {
        let mut p = [0u8; 5];
        for i in 0..5 {
            p[self.0[i] as usize] = i as u8;
        }
        Permutation(p)
    }

    pub fn is_identity(self) -> bool {
        self == Self::identity()
    }

    pub fn is_even(self) -> bool {
        let mut inversions = 0;
        for i in 0..5 {
            for j in i + 1..5 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        inversions % 2 == 0
    }

    /// All 60 even permutations in lexicographic order of images.
    pub fn alternating_group() -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut v = [0u8, 1, 2, 3, 4];
        permute(&mut v, 0, &mut out);
        out.retain(|p| p.is_even());
        out.sort();
        out
    }

    pub fn cycle_notation(self) -> String {
        let mut seen = [false; 5];
        let mut s = String::new();
        for start in 0..5 {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            let mut c = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                c.push((i + 1).to_string());
                i = self.0[i] as usize;
            }
            s.push('(');
            s.push_str(&c.join(" "));
            s.push(')');
        }
        if s.is_empty() {
            "()".into()
        } else {
            s
        }
    }
}

fn permute(v: &mut [u8; 5], k: usize, out: &mut Vec<Permutation>) {
    if k == 5 {
        out.push(Permutation(*v));
        return;
    }
    for i in k..5 {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

/// σ = (1 3 2 5 4).
pub fn sigma() -> Permutation {
    Permutation::from_cycles(&[&[1, 3, 2, 5, 4]]).unwrap()
}

/// α = (2 3)(4 5).
pub fn alpha() -> Permutation {
    Permutation::from_cycles(&[&[2, 3], &[4, 5]]).unwrap()
}

/// β = (2 4 5).
pub fn beta() -> Permutation {
    Permutation::from_cycles(&[&[2, 4, 5]]).unwrap()
}

/// Evaluates a word over named permutations, rightmost factor first.
pub fn evaluate_permutations(word: &[(Permutation, bool)]) -> Permutation {
    word.iter().fold(Permutation::identity(), |acc, &(p, inv)| {
        acc.after(if inv { p.inverse() } else { p })
    })
}

/// Each state `π` reads `i`, writes `π(i)` and moves to `id`. Without `full`
/// only `sigma`, `alpha`, `beta` and `id` are present.
pub fn a5_automaton(full: bool) -> MealyAutomaton {
    let named = [("sigma", sigma()), ("alpha", alpha()), ("beta", beta())];
    let mut states: Vec<(String, Permutation)> =
        named.iter().map(|(n, p)| (n.to_string(), *p)).collect();
    if full {
        for p in Permutation::alternating_group() {
            if p.is_identity() || named.iter().any(|(_, q)| *q == p) {
                continue;
            }
            states.push((p.cycle_notation(), p));
        }
    }
    let letters = ["1", "2", "3", "4", "5"];
    let mut b = AutomatonBuilder::new(Alphabet::new(&letters).unwrap());
    for (name, p) in &states {
        let s = b.ensure_state(name);
        let id = b.ensure_state("id");
        for i in 1..=5u8 {
            b.set(s, i as u32 - 1, p.apply(i) as u32 - 1, id).unwrap();
        }
    }
    b.identity_state("id").unwrap();
    b.build(if full { "a5-full" } else { "a5" }).unwrap()
}

/// Reads the permutation a sequence induces on the first letter of an
/// automaton over five letters in which every state returns to an identity state.
pub fn sequence_permutation(aut: &MealyAutomaton, seq: &StateSequence) -> Result<Permutation> {
    let mut images = [0u8; 5];
    for (i, slot) in images.iter_mut().enumerate() {
        *slot = aut.act_word(seq, &[i as u32])?[0] as u8 + 1;
    }
    Permutation::from_images(images)
}

pub fn aleshin_automaton() -> MealyAutomaton {
    build(
        "aleshin",
        &["0", "1"],
        &[
            ("a", "0", "1", "c"),
            ("a", "1", "0", "b"),
            ("b", "0", "1", "b"),
            ("b", "1", "0", "c"),
            ("c", "0", "0", "a"),
            ("c", "1", "1", "a"),
        ],
    )
}

fn signed_name(aut: &MealyAutomaton, s: SignedState) -> String {
    aut.format_signed(s)
}

/// Aleshin's automaton with explicit inverse states `x^-1` and every product
/// `x·y` of two signed states (`y` acts first): 3 + 3 + 36 states.
pub fn aleshin_square_automaton() -> MealyAutomaton {
    let base = aleshin_automaton();
    let signed: Vec<SignedState> = (0..3)
        .map(SignedState::pos)
        .chain((0..3).map(SignedState::neg))
        .collect();
    let mut b = AutomatonBuilder::new(base.alphabet().clone());
    for &s in &signed {
        b.ensure_state(&signed_name(&base, s));
    }
    for &x in &signed {
        for &y in &signed {
            b.ensure_state(&format!(
                "{}·{}",
                signed_name(&base, x),
                signed_name(&base, y)
            ));
        }
    }
    for a in 0..2u32 {
        for &x in &signed {
            let (o, n) = base.act_letter(x, a).unwrap();
            let from = b.state(&signed_name(&base, x)).unwrap();
            let to = b.state(&signed_name(&base, n)).unwrap();
            b.set(from, a, o, to).unwrap();
            for &y in &signed {
                let (o1, ny) = base.act_letter(y, a).unwrap();
                let (o2, nx) = base.act_letter(x, o1).unwrap();
                let from = b
                    .state(&format!(
                        "{}·{}",
                        signed_name(&base, x),
                        signed_name(&base, y)
                    ))
                    .unwrap();
                let to = b
                    .state(&format!(
                        "{}·{}",
                        signed_name(&base, nx),
                        signed_name(&base, ny)
                    ))
                    .unwrap();
                b.set(from, a, o2, to).unwrap();
            }
        }
    }
    b.build("aleshin-sq").unwrap()
}

/// Rewrites a sequence over (a possibly extended) Aleshin automaton as a word over
/// the free generators `a, b, c` (indices 0, 1, 2). States are recognized by name:
/// `x`, `x^-1` and products `x·y`, possibly behind a `part/` tag.
pub fn free_projection(aut: &MealyAutomaton, seq: &StateSequence) -> Result<Vec<(u8, bool)>> {
    fn letter(name: &str) -> Option<(u8, bool)> {
        let (base, inv) = match name.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (name, false),
        };
        let g = match base {
            "a" => 0,
            "b" => 1,
            "c" => 2,
            _ => return None,
        };
        Some((g, inv))
    }
    let mut out = Vec::new();
    for &s in &seq.0 {
        let full = aut.state_name(s.state);
        let name = full.rsplit('/').next().unwrap_or(full);
        let mut factors = Vec::new();
        for part in name.split('·') {
            factors.push(letter(part).ok_or_else(|| Error::UnknownState(full.to_string()))?);
        }
        if s.inverse {
            factors.reverse();
            for f in &mut factors {
                f.1 = !f.1;
            }
        }
        out.extend(factors);
    }
    Ok(out)
}

pub fn free_reduce_letters(word: &[(u8, bool)]) -> Vec<(u8, bool)> {
    let mut out: Vec<(u8, bool)> = Vec::with_capacity(word.len());
    for &(g, inv) in word {
        if out.last() == Some(&(g, !inv)) {
            out.pop();
        } else {
            out.push((g, inv));
        }
    }
    out
}

/// True iff the free reduction over `a, b, c` is non-empty. Sound because the
/// three states generate a free group of rank three.
pub fn certify_free_nontrivial(aut: &MealyAutomaton, seq: &StateSequence) -> Result<bool> {
    Ok(!free_reduce_letters(&free_projection(aut, seq)?).is_empty())
}

pub fn format_free_word(word: &[(u8, bool)]) -> String {
    word.iter()
        .map(|&(g, inv)| {
            let c = ["a", "b", "c"][g as usize];
            if inv {
                format!("{c}^-1")
            } else {
                c.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

type LeafFn = Arc<dyn Fn(u64, u64) -> StateSequence + Send + Sync>;
type CertifyFn = Arc<dyn Fn(&StateSequence) -> bool + Send + Sync>;

/// A group automaton together with level maps `α`, `β` and leaves `b(D, i)`
/// such that `B_{β,α}[b(D, D-1), …, b(D, 0)]` is never trivial.
#[derive(Clone)]
pub struct BackendBundle {
    pub name: String,
    pub automaton: MealyAutomaton,
    pub alpha: LevelMap,
    pub beta: LevelMap,
    leaf: Option<LeafFn>,
    certifier: CertifyFn,
}

impl fmt::Debug for BackendBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BackendBundle")
            .field("name", &self.name)
            .field("automaton", &self.automaton.name())
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .finish()
    }
}

impl BackendBundle {
    /// `b(D, i)`.
    pub fn leaf(&self, d_entries: u64, i: u64) -> Result<StateSequence> {
        let f = self
            .leaf
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("backend `{}` has no leaves", self.name)))?;
        if i >= d_entries {
            return Err(Error::Precondition(format!("leaf index {i} out of range")));
        }
        Ok(f(d_entries, i))
    }

    pub fn has_leaves(&self) -> bool {
        self.leaf.is_some()
    }

    /// `B_{β,α}[b(D, D-1), …, b(D, 0)]`.
    pub fn leaf_commutator(&self, d_entries: u64) -> Result<StateSequence> {
        let entries = (0..d_entries)
            .map(|i| self.leaf(d_entries, i))
            .collect::<Result<Vec<_>>>()?;
        balanced(&CommutatorSpec {
            entries,
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
        })
    }

    /// Backend-specific proof that `seq` is not the identity; `false` means "not certified".
    pub fn certify(&self, seq: &StateSequence) -> bool {
        (self.certifier)(seq)
    }

    /// The same bundle over a larger alphabet: every added letter is copied and
    /// leads to `id` (created if missing).
    pub fn with_extra_letters(&self, extra: &[String]) -> Result<BackendBundle> {
        if extra.is_empty() {
            return Ok(self.clone());
        }
        let mut names: Vec<String> = self.automaton.alphabet().names().to_vec();
        names.extend(extra.iter().cloned());
        let alphabet = Alphabet::new(&names)?;
        let mut b = AutomatonBuilder::new(alphabet);
        let old = &self.automaton;
        for s in old.state_names() {
            b.ensure_state(s);
        }
        for s in 0..old.num_states() as u32 {
            for a in 0..old.num_letters() as u32 {
                let (o, t) = old.transition(s, a);
                b.set(s, a, o, t)?;
            }
        }
        let id = b.identity_state("id")?;
        b.fill_missing(id);
        let automaton = b.build(old.name())?;
        // State indices are unchanged, so level maps, leaves and certifier carry over.
        let mut bundle = self.clone();
        bundle.automaton = automaton;
        Ok(bundle)
    }
}

/// σ, α, β as states of the A5 automaton, `b(D, i) = σ`, constant level maps.
pub fn a5_backend(full: bool) -> BackendBundle {
    let automaton = a5_automaton(full);
    let st = |n: &str| StateSequence::single(SignedState::pos(automaton.state(n).unwrap()));
    let sigma = st("sigma");
    let cert_aut = automaton.clone();
    BackendBundle {
        name: if full { "a5-full" } else { "a5" }.into(),
        alpha: LevelMap::constant("alpha", st("alpha")),
        beta: LevelMap::constant("beta", st("beta")),
        leaf: Some(Arc::new(move |_, _| sigma.clone())),
        certifier: Arc::new(move |seq| {
            sequence_permutation(&cert_aut, seq)
                .map(|p| !p.is_identity())
                .unwrap_or(false)
        }),
        automaton,
    }
}

/// Aleshin's automaton with `α = ε`, `β(d) = c` for even `d` and `b` for odd `d`,
/// and `b(D, i) = b^{-1} a`. With `include_square` the leaf is the single product
/// state `b^-1·a`.
pub fn aleshin_backend(include_square: bool) -> BackendBundle {
    let automaton = if include_square {
        aleshin_square_automaton()
    } else {
        aleshin_automaton()
    };
    let b = automaton.state("b").unwrap();
    let c = automaton.state("c").unwrap();
    let a = automaton.state("a").unwrap();
    let leaf = if include_square {
        StateSequence::single(SignedState::pos(automaton.state("b^-1·a").unwrap()))
    } else {
        StateSequence::new(vec![SignedState::neg(b), SignedState::pos(a)])
    };
    let cert_aut = automaton.clone();
    BackendBundle {
        name: if include_square {
            "aleshin-sq"
        } else {
            "aleshin"
        }
        .into(),
        alpha: LevelMap::empty(),
        beta: LevelMap::new("c/b by parity", move |d| {
            StateSequence::single(SignedState::pos(if d % 2 == 0 { c } else { b }))
        }),
        leaf: Some(Arc::new(move |_, _| leaf.clone())),
        certifier: Arc::new(move |seq| certify_free_nontrivial(&cert_aut, seq).unwrap_or(false)),
        automaton,
    }
}

/// `B₃(D)`: the leaf commutator of the plain Aleshin backend.
pub fn b3(d_entries: u64) -> Result<StateSequence> {
    aleshin_backend(false).leaf_commutator(d_entries)
}
