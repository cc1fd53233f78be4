//! Mealy automata, signed state sequences and the two actions `seq ∘ u`
//! (output) and `seq · u` (residual).

use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// A word over an alphabet, stored as dense letter indices.
pub type Word = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: FxHashMap<String, u32>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut index = FxHashMap::default();
        let mut out = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref().to_string();
            if index.insert(n.clone(), i as u32).is_some() {
                return Err(Error::Duplicate(n));
            }
            out.push(n);
        }
        Ok(Alphabet { names: out, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, letter: u32) -> &str {
        &self.names[letter as usize]
    }

    pub fn letter(&self, name: &str) -> Result<u32> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    /// Parses `0,1,1` or, when every letter name is one character, `011`.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        if text.contains(',') {
            return text.split(',').map(|t| self.letter(t.trim())).collect();
        }
        if let Ok(l) = self.letter(text) {
            return Ok(vec![l]);
        }
        text.chars()
            .map(|c| self.letter(c.encode_utf8(&mut [0; 4])))
            .collect()
    }

    /// Inverse of [`Alphabet::parse_word`]; single-character names are concatenated.
    pub fn format_word(&self, word: &[u32]) -> String {
        let short = self.names.iter().all(|n| n.chars().count() == 1);
        let parts: Vec<&str> = word.iter().map(|&l| self.name(l)).collect();
        if short {
            parts.concat()
        } else {
            parts.join(",")
        }
    }
}

/// A state or its formal inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedState {
    pub state: u32,
    pub inverse: bool,
}

impl SignedState {
    pub fn pos(state: u32) -> Self {
        SignedState {
            state,
            inverse: false,
        }
    }

    pub fn neg(state: u32) -> Self {
        SignedState {
            state,
            inverse: true,
        }
    }

    pub fn inv(self) -> Self {
        SignedState {
            state: self.state,
            inverse: !self.inverse,
        }
    }

    /// `state << 1 | inverse`, the compact form used by the deciders.
    #[inline]
    pub fn pack(self) -> u32 {
        (self.state << 1) | self.inverse as u32
    }

    #[inline]
    pub fn unpack(packed: u32) -> Self {
        SignedState {
            state: packed >> 1,
            inverse: packed & 1 == 1,
        }
    }
}

/// A word over signed states. The rightmost entry acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSequence(pub Vec<SignedState>);

impl StateSequence {
    pub fn new(entries: Vec<SignedState>) -> Self {
        StateSequence(entries)
    }

    pub fn empty() -> Self {
        StateSequence(Vec::new())
    }

    pub fn single(s: SignedState) -> Self {
        StateSequence(vec![s])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[SignedState] {
        &self.0
    }

    /// `(q_n … q_1)^{-1} = q_1^{-1} … q_n^{-1}`.
    pub fn inverse(&self) -> Self {
        StateSequence(self.0.iter().rev().map(|s| s.inv()).collect())
    }

    /// Cancels adjacent `s s^{-1}` pairs until none remain.
    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<SignedState> = Vec::with_capacity(self.0.len());
        for &s in &self.0 {
            if out.last() == Some(&s.inv()) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        StateSequence(out)
    }

    /// `self` followed by `other`; `other` acts first.
    pub fn concat(&self, other: &StateSequence) -> Self {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        StateSequence(v)
    }

    pub fn push_seq(&mut self, other: &StateSequence) {
        self.0.extend_from_slice(&other.0);
    }

    /// `self^k` for any integer `k`, without reduction.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        StateSequence(v)
    }

    pub fn packed(&self) -> Vec<u32> {
        self.0.iter().map(|s| s.pack()).collect()
    }
}

impl From<Vec<SignedState>> for StateSequence {
    fn from(v: Vec<SignedState>) -> Self {
        StateSequence(v)
    }
}

/// One transition `from --in/out--> to`, by name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NamedTransition {
    pub from: String,
    pub input: String,
    pub output: String,
    pub to: String,
}

impl NamedTransition {
    pub fn new(from: &str, input: &str, output: &str, to: &str) -> Self {
        NamedTransition {
            from: from.into(),
            input: input.into(),
            output: output.into(),
            to: to.into(),
        }
    }
}

/// An automaton as written down, before any well-formedness checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawAutomaton {
    pub name: String,
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub transitions: Vec<NamedTransition>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub deterministic: bool,
    pub complete: bool,
    pub invertible: bool,
    /// (state, letter) pairs with more than one transition.
    pub duplicated: Vec<(String, String)>,
    /// (state, letter) pairs with no transition.
    pub missing: Vec<(String, String)>,
    /// (state, letter) pairs whose output letter is shared with another input of the same state.
    pub colliding: Vec<(String, String)>,
    /// Transitions mentioning unknown states or letters.
    pub dangling: Vec<NamedTransition>,
}

impl ValidationReport {
    pub fn is_group_automaton(&self) -> bool {
        self.deterministic && self.complete && self.invertible && self.dangling.is_empty()
    }
}

impl RawAutomaton {
    pub fn validate(&self) -> ValidationReport {
        let letter: FxHashMap<&str, usize> = self
            .alphabet
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let state: FxHashMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let n = self.alphabet.len();
        let mut rows: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; self.states.len()];
        let mut report = ValidationReport::default();
        for t in &self.transitions {
            match (
                state.get(t.from.as_str()),
                letter.get(t.input.as_str()),
                letter.get(t.output.as_str()),
                state.get(t.to.as_str()),
            ) {
                (Some(&f), Some(&a), Some(&b), Some(_)) => rows[f][a].push(b),
                _ => report.dangling.push(t.clone()),
            }
        }
        let mut invertible = true;
        for (s, row) in rows.iter().enumerate() {
            let mut hits = vec![0usize; n];
            for (a, outs) in row.iter().enumerate() {
                let pair = (self.states[s].clone(), self.alphabet[a].clone());
                match outs.len() {
                    0 => report.missing.push(pair),
                    1 => hits[outs[0]] += 1,
                    _ => report.duplicated.push(pair),
                }
            }
            let row_ok = row.iter().all(|o| o.len() == 1) && hits.iter().all(|&h| h == 1);
            if !row_ok {
                invertible = false;
                for (a, outs) in row.iter().enumerate() {
                    if outs.len() == 1 && hits[outs[0]] > 1 {
                        report
                            .colliding
                            .push((self.states[s].clone(), self.alphabet[a].clone()));
                    }
                }
            }
        }
        report.deterministic = report.duplicated.is_empty();
        report.complete = report.missing.is_empty() && report.dangling.is_empty();
        report.invertible = invertible && report.dangling.is_empty();
        report
    }

    pub fn build(&self) -> Result<MealyAutomaton> {
        let mut b = AutomatonBuilder::new(Alphabet::new(&self.alphabet)?);
        for s in &self.states {
            b.add_state(s)?;
        }
        for t in &self.transitions {
            let from = b.state(&t.from)?;
            let to = b.state(&t.to)?;
            let a = b.alphabet.letter(&t.input)?;
            let o = b.alphabet.letter(&t.output)?;
            b.set(from, a, o, to)?;
        }
        b.build(&self.name)
    }
}

/// A deterministic, complete letter-to-letter transducer. Immutable once built.
#[derive(Clone, Debug)]
pub struct MealyAutomaton {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    state_index: FxHashMap<String, u32>,
    out: Vec<u32>,
    next: Vec<u32>,
    // For each (state, output letter) the input letter producing it; valid on invertible rows.
    inv_in: Vec<u32>,
    row_invertible: Vec<bool>,
    // Every state reachable from here has an invertible row.
    closed_invertible: Vec<bool>,
    identity: Vec<bool>,
}

impl MealyAutomaton {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: u32) -> &str {
        &self.states[s as usize]
    }

    pub fn state(&self, name: &str) -> Result<u32> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.state_index.contains_key(name)
    }

    pub fn is_invertible(&self) -> bool {
        self.row_invertible.iter().all(|&b| b)
    }

    pub fn state_invertible(&self, s: u32) -> bool {
        self.row_invertible[s as usize]
    }

    /// True for states that act as the identity on every word.
    pub fn is_identity_state(&self, s: u32) -> bool {
        self.identity[s as usize]
    }

    /// The first identity state, if any.
    pub fn identity_state(&self) -> Option<u32> {
        self.identity.iter().position(|&b| b).map(|i| i as u32)
    }

    /// Raw positive transition `(output, next)`.
    #[inline]
    pub fn transition(&self, s: u32, a: u32) -> (u32, u32) {
        let k = s as usize * self.alphabet.len() + a as usize;
        (self.out[k], self.next[k])
    }

    pub fn act_letter(&self, s: SignedState, a: u32) -> Result<(u32, SignedState)> {
        if s.inverse && !self.row_invertible[s.state as usize] {
            return Err(Error::NotInvertible(self.states[s.state as usize].clone()));
        }
        let (o, n) = self.step(s.pack(), a);
        Ok((o, SignedState::unpack(n)))
    }

    /// Unchecked signed step on packed states; see [`MealyAutomaton::check_sequence`].
    #[inline]
    pub fn step(&self, packed: u32, a: u32) -> (u32, u32) {
        let n = self.alphabet.len();
        let s = (packed >> 1) as usize;
        if packed & 1 == 0 {
            let k = s * n + a as usize;
            (self.out[k], self.next[k] << 1)
        } else {
            let input = self.inv_in[s * n + a as usize];
            (input, (self.next[s * n + input as usize] << 1) | 1)
        }
    }

    /// Errors unless every state reachable from a negative entry is invertible.
    pub fn check_sequence(&self, seq: &StateSequence) -> Result<()> {
        for s in &seq.0 {
            if s.state as usize >= self.states.len() {
                return Err(Error::UnknownState(format!("#{}", s.state)));
            }
            if s.inverse && !self.closed_invertible[s.state as usize] {
                return Err(Error::NotInvertible(self.states[s.state as usize].clone()));
            }
        }
        Ok(())
    }

    /// Output and residual of `seq` on `u` in one pass.
    pub fn cross(&self, seq: &StateSequence, u: &[u32]) -> Result<(Word, StateSequence)> {
        self.check_sequence(seq)?;
        let mut cur: Vec<u32> = seq.packed();
        let mut out = Vec::with_capacity(u.len());
        for &a in u {
            let mut l = a;
            for p in cur.iter_mut().rev() {
                let (o, n) = self.step(*p, l);
                *p = n;
                l = o;
            }
            out.push(l);
        }
        Ok((
            out,
            StateSequence(cur.into_iter().map(SignedState::unpack).collect()),
        ))
    }

    /// `seq ∘ u`.
    pub fn act_word(&self, seq: &StateSequence, u: &[u32]) -> Result<Word> {
        Ok(self.cross(seq, u)?.0)
    }

    /// `seq · u`.
    pub fn residual(&self, seq: &StateSequence, u: &[u32]) -> Result<StateSequence> {
        Ok(self.cross(seq, u)?.1)
    }

    /// True if every entry of `seq` is an identity state.
    pub fn all_identity(&self, seq: &StateSequence) -> bool {
        seq.0.iter().all(|s| self.identity[s.state as usize])
    }

    pub fn signed(&self, name: &str, inverse: bool) -> Result<SignedState> {
        Ok(SignedState {
            state: self.state(name)?,
            inverse,
        })
    }

    /// Parses `q,q^-1,p`. A token naming a state verbatim wins over suffix stripping,
    /// so a state literally called `b^-1` is reachable as `b^-1` and its inverse as `b^-1^-1`;
    /// the inverse of `b` is then written `(b)^-1`.
    pub fn parse_sequence(&self, text: &str) -> Result<StateSequence> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(StateSequence::empty());
        }
        let mut v = Vec::new();
        for tok in text.split(',') {
            v.push(self.parse_signed(tok.trim())?);
        }
        Ok(StateSequence(v))
    }

    pub fn parse_signed(&self, tok: &str) -> Result<SignedState> {
        if let Some(&s) = self.state_index.get(tok) {
            return Ok(SignedState::pos(s));
        }
        if let Some(base) = tok.strip_suffix("^-1") {
            return Ok(self.parse_signed(base)?.inv());
        }
        if let Some(&s) = tok
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .and_then(|t| self.state_index.get(t))
        {
            return Ok(SignedState::pos(s));
        }
        Err(Error::UnknownState(tok.to_string()))
    }

    pub fn format_signed(&self, s: SignedState) -> String {
        if s.inverse {
            let name = &self.states[s.state as usize];
            let plain = format!("{name}^-1");
            if self.state_index.contains_key(plain.as_str()) {
                format!("({name})^-1")
            } else {
                plain
            }
        } else {
            self.states[s.state as usize].clone()
        }
    }

    pub fn format_sequence(&self, seq: &StateSequence) -> String {
        seq.0
            .iter()
            .map(|&s| self.format_signed(s))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// All transitions by name, ordered by (state index, letter index).
    pub fn named_transitions(&self) -> Vec<NamedTransition> {
        let n = self.alphabet.len();
        let mut v = Vec::with_capacity(self.out.len());
        for s in 0..self.states.len() {
            for a in 0..n {
                let (o, t) = (self.out[s * n + a], self.next[s * n + a]);
                v.push(NamedTransition {
                    from: self.states[s].clone(),
                    input: self.alphabet.names[a].clone(),
                    output: self.alphabet.names[o as usize].clone(),
                    to: self.states[t as usize].clone(),
                });
            }
        }
        v
    }

    pub fn to_raw(&self) -> RawAutomaton {
        RawAutomaton {
            name: self.name.clone(),
            alphabet: self.alphabet.names.clone(),
            states: self.states.clone(),
            transitions: self.named_transitions(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        self.to_raw().validate()
    }

    /// The same automaton with letter `i` renamed to `names[i]`.
    pub fn relabeled<S: AsRef<str>>(&self, names: &[S]) -> Result<MealyAutomaton> {
        if names.len() != self.alphabet.len() {
            return Err(Error::AlphabetMismatch);
        }
        let mut a = self.clone();
        a.alphabet = Alphabet::new(names)?;
        Ok(a)
    }

    pub fn renamed(&self, name: &str) -> MealyAutomaton {
        let mut a = self.clone();
        a.name = name.to_string();
        a
    }

    fn from_tables(
        name: &str,
        alphabet: Alphabet,
        states: Vec<String>,
        out: Vec<u32>,
        next: Vec<u32>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyAutomaton);
        }
        let n = alphabet.len();
        let mut state_index = FxHashMap::default();
        for (i, s) in states.iter().enumerate() {
            if state_index.insert(s.clone(), i as u32).is_some() {
                return Err(Error::Duplicate(s.clone()));
            }
        }
        let mut inv_in = vec![u32::MAX; out.len()];
        let mut row_invertible = vec![true; states.len()];
        for s in 0..states.len() {
            for a in 0..n {
                let o = out[s * n + a] as usize;
                if inv_in[s * n + o] != u32::MAX {
                    row_invertible[s] = false;
                }
                inv_in[s * n + o] = a as u32;
            }
        }
        let mut closed_invertible = row_invertible.clone();
        loop {
            let mut changed = false;
            for s in 0..states.len() {
                if closed_invertible[s]
                    && (0..n).any(|a| !closed_invertible[next[s * n + a] as usize])
                {
                    closed_invertible[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // Greatest set of identity-row states closed under successors.
        let mut identity: Vec<bool> = (0..states.len())
            .map(|s| (0..n).all(|a| out[s * n + a] as usize == a))
            .collect();
        loop {
            let mut changed = false;
            for s in 0..states.len() {
                if identity[s] && (0..n).any(|a| !identity[next[s * n + a] as usize]) {
                    identity[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(MealyAutomaton {
            name: name.to_string(),
            alphabet,
            states,
            state_index,
            out,
            next,
            inv_in,
            row_invertible,
            closed_invertible,
            identity,
        })
    }
}

impl fmt::Display for MealyAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} states over {} letters)",
            self.name,
            self.states.len(),
            self.alphabet.len()
        )
    }
}

/// Incremental construction of a [`MealyAutomaton`].
#[derive(Clone, Debug)]
pub struct AutomatonBuilder {
    alphabet: Alphabet,
    states: Vec<String>,
    index: FxHashMap<String, u32>,
    rows: Vec<Vec<Option<(u32, u32)>>>,
}

impl AutomatonBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        AutomatonBuilder {
            alphabet,
            states: Vec::new(),
            index: FxHashMap::default(),
            rows: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn add_state(&mut self, name: &str) -> Result<u32> {
        if self.index.contains_key(name) {
            return Err(Error::Duplicate(name.to_string()));
        }
        Ok(self.ensure_state(name))
    }

    pub fn ensure_state(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.states.len() as u32;
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.rows.push(vec![None; self.alphabet.len()]);
        i
    }

    pub fn state(&self, name: &str) -> Result<u32> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn set(&mut self, from: u32, input: u32, output: u32, to: u32) -> Result<()> {
        let slot = &mut self.rows[from as usize][input as usize];
        match slot {
            Some(old) if *old != (output, to) => Err(Error::Malformed(format!(
                "state `{}` has two transitions on `{}`",
                self.states[from as usize],
                self.alphabet.name(input)
            ))),
            _ => {
                *slot = Some((output, to));
                Ok(())
            }
        }
    }

    /// Transition by names; states are created on demand.
    pub fn set_named(&mut self, from: &str, input: &str, output: &str, to: &str) -> Result<()> {
        let a = self.alphabet.letter(input)?;
        let o = self.alphabet.letter(output)?;
        let f = self.ensure_state(from);
        let t = self.ensure_state(to);
        self.set(f, a, o, t)
    }

    pub fn is_set(&self, from: u32, input: u32) -> bool {
        self.rows[from as usize][input as usize].is_some()
    }

    /// Gives every still-undefined (state, letter) the transition `a/a → target`.
    pub fn fill_missing(&mut self, target: u32) {
        for row in &mut self.rows {
            for (a, slot) in row.iter_mut().enumerate() {
                if slot.is_none() {
                    *slot = Some((a as u32, target));
                }
            }
        }
    }

    /// Adds an identity state `name` (or reuses it) with identity loops.
    pub fn identity_state(&mut self, name: &str) -> Result<u32> {
        let s = self.ensure_state(name);
        for a in 0..self.alphabet.len() as u32 {
            self.set(s, a, a, s)?;
        }
        Ok(s)
    }

    /// Copies every state of `aut` into this builder. `rename` maps local names to
    /// global ones; states sharing a global name are merged, so their rows must agree.
    pub fn import(
        &mut self,
        aut: &MealyAutomaton,
        mut rename: impl FnMut(&str) -> String,
    ) -> Result<Vec<u32>> {
        if aut.alphabet.names != self.alphabet.names {
            return Err(Error::AlphabetMismatch);
        }
        let map: Vec<u32> = aut
            .states
            .iter()
            .map(|s| {
                let g = rename(s);
                self.ensure_state(&g)
            })
            .collect();
        for s in 0..aut.num_states() as u32 {
            for a in 0..aut.num_letters() as u32 {
                let (o, t) = aut.transition(s, a);
                self.set(map[s as usize], a, o, map[t as usize])?;
            }
        }
        Ok(map)
    }

    pub fn build(self, name: &str) -> Result<MealyAutomaton> {
        let mut out = Vec::with_capacity(self.states.len() * self.alphabet.len());
        let mut next = Vec::with_capacity(out.capacity());
        for (s, row) in self.rows.iter().enumerate() {
            for (a, slot) in row.iter().enumerate() {
                let (o, t) = slot.ok_or_else(|| {
                    Error::Malformed(format!(
                        "state `{}` has no transition on `{}`",
                        self.states[s],
                        self.alphabet.name(a as u32)
                    ))
                })?;
                out.push(o);
                next.push(t);
            }
        }
        MealyAutomaton::from_tables(name, self.alphabet, self.states, out, next)
    }
}

/// Union of automata over one alphabet. States become `part/local`; with
/// `share_identity`, identity-row states named `id` collapse into a single `id`.
pub fn disjoint_union(parts: &[&MealyAutomaton], share_identity: bool) -> Result<MealyAutomaton> {
    let first = parts
        .first()
        .ok_or_else(|| Error::EmptyInput("no automata to unite".into()))?;
    let mut b = AutomatonBuilder::new(first.alphabet.clone());
    let mut seen: FxHashMap<&str, usize> = FxHashMap::default();
    for part in parts {
        let count = seen.entry(part.name()).or_insert(0);
        let tag = if *count == 0 {
            part.name().to_string()
        } else {
            format!("{}#{}", part.name(), count)
        };
        *count += 1;
        b.import(part, |s| {
            let is_id = s == "id"
                && part
                    .state("id")
                    .map(|i| part.is_identity_state(i))
                    .unwrap_or(false);
            if share_identity && is_id {
                "id".to_string()
            } else {
                format!("{tag}/{s}")
            }
        })?;
    }
    let name = parts.iter().map(|p| p.name()).collect::<Vec<_>>().join("+");
    b.build(&name)
}
