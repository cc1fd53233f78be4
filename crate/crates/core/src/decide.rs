//! Word-problem deciders.
//!
//! The exact decider walks the closure `{seq · u : u ∈ Σ*}` breadth first,
//! letters in alphabet order, so the first word found to be moved is the
//! length-lex smallest one. Residual tuples are interned in one arena.

use std::hash::{Hash, Hasher};

use rustc_hash::{FxHashMap, FxHasher};

use crate::automaton::{MealyAutomaton, StateSequence, Word};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Identity,
    NotIdentity,
    LimitExceeded,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Identity => "identity",
            Verdict::NotIdentity => "not-identity",
            Verdict::LimitExceeded => "limit-exceeded",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Distinct residual tuples interned.
    pub explored: usize,
    /// Largest breadth-first level.
    pub frontier_peak: usize,
    /// Every word of at most this length is known to be fixed.
    pub verified_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    /// Present exactly for `NotIdentity`.
    pub witness: Option<Word>,
    pub stats: Stats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_residuals: usize,
    pub max_witness_length: usize,
}

impl Budget {
    pub fn new(max_residuals: usize, max_witness_length: usize) -> Result<Self> {
        if max_residuals == 0 || max_witness_length == 0 {
            return Err(Error::Precondition("budget values must be positive".into()));
        }
        Ok(Budget {
            max_residuals,
            max_witness_length,
        })
    }

    /// Defaults overridden by `AUTGROUP_MAX_RESIDUALS` and
    /// `AUTGROUP_MAX_WITNESS_LENGTH` when set.
    pub fn from_env() -> Result<Self> {
        let read = |key: &str, default: usize| -> Result<usize> {
            match std::env::var(key) {
                Ok(v) => v.trim().parse().map_err(|_| {
                    Error::Precondition(format!("{key} must be a positive integer, got `{v}`"))
                }),
                Err(_) => Ok(default),
            }
        };
        let d = Budget::default();
        Budget::new(
            read("AUTGROUP_MAX_RESIDUALS", d.max_residuals)?,
            read("AUTGROUP_MAX_WITNESS_LENGTH", d.max_witness_length)?,
        )
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_residuals: 2_000_000,
            max_witness_length: 100_000,
        }
    }
}

/// How residual tuples are keyed during the closure walk.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Canonical {
    /// The literal signed-state tuple; the closure is the textbook one.
    #[default]
    Exact,
    /// Identity states dropped and the rest freely reduced. Group-equal sequences
    /// have group-equal residuals, so verdicts and witnesses are unchanged while
    /// far fewer tuples are stored.
    Reduced,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Triviality {
    FixedAll,
    Moved(Word),
}

struct Closure<'a> {
    aut: &'a MealyAutomaton,
    canonical: Canonical,
    arena: Vec<u32>,
    starts: Vec<usize>,
    parent: Vec<u32>,
    letter: Vec<u32>,
    heads: FxHashMap<u64, u32>,
    chain: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl<'a> Closure<'a> {
    fn new(aut: &'a MealyAutomaton, canonical: Canonical) -> Self {
        Closure {
            aut,
            canonical,
            arena: Vec::new(),
            starts: vec![0],
            parent: Vec::new(),
            letter: Vec::new(),
            heads: FxHashMap::default(),
            chain: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn tuple(&self, i: usize) -> &[u32] {
        &self.arena[self.starts[i]..self.starts[i + 1]]
    }

    fn canon(&self, t: &mut Vec<u32>) {
        if self.canonical == Canonical::Reduced {
            let mut w = 0;
            for r in 0..t.len() {
                let p = t[r];
                if self.aut.is_identity_state(p >> 1) {
                    continue;
                }
                if w > 0 && t[w - 1] == p ^ 1 {
                    w -= 1;
                } else {
                    t[w] = p;
                    w += 1;
                }
            }
            t.truncate(w);
        }
    }

    fn hash(t: &[u32]) -> u64 {
        let mut h = FxHasher::default();
        t.hash(&mut h);
        h.finish()
    }

    /// Interns `t`; returns true if it was new.
    fn intern(&mut self, t: &[u32], parent: u32, letter: u32) -> bool {
        let h = Self::hash(t);
        let mut cur = self.heads.get(&h).copied().unwrap_or(NONE);
        let head = cur;
        while cur != NONE {
            if self.tuple(cur as usize) == t {
                return false;
            }
            cur = self.chain[cur as usize];
        }
        let id = self.len() as u32;
        self.arena.extend_from_slice(t);
        self.starts.push(self.arena.len());
        self.parent.push(parent);
        self.letter.push(letter);
        self.chain.push(head);
        self.heads.insert(h, id);
        true
    }

    fn path(&self, mut i: u32) -> Word {
        let mut w = Vec::new();
        while self.parent[i as usize] != NONE {
            w.push(self.letter[i as usize]);
            i = self.parent[i as usize];
        }
        w.reverse();
        w
    }

    /// Breadth-first walk. Expands nodes of depth `< max_depth`, so words of length
    /// up to `max_depth` are examined.
    fn run(&mut self, seq: &StateSequence, max_depth: usize, max_residuals: usize) -> Decision {
        let mut stats = Stats::default();
        let mut start = seq.packed();
        self.canon(&mut start);
        self.intern(&start, NONE, NONE);
        let letters = self.aut.num_letters() as u32;
        let mut scratch: Vec<u32> = Vec::new();
        let mut level = (0usize, 1usize);
        let mut depth = 0usize;
        loop {
            stats.explored = self.len();
            stats.frontier_peak = stats.frontier_peak.max(level.1 - level.0);
            if level.0 == level.1 {
                stats.verified_depth = depth;
                return Decision {
                    verdict: Verdict::Identity,
                    witness: None,
                    stats,
                };
            }
            if depth >= max_depth {
                stats.verified_depth = depth;
                return Decision {
                    verdict: Verdict::LimitExceeded,
                    witness: None,
                    stats,
                };
            }
            for node in level.0..level.1 {
                for a in 0..letters {
                    scratch.clear();
                    scratch.extend_from_slice(self.tuple(node));
                    let mut l = a;
                    for p in scratch.iter_mut().rev() {
                        let (o, n) = self.aut.step(*p, l);
                        *p = n;
                        l = o;
                    }
                    if l != a {
                        let mut w = self.path(node as u32);
                        w.push(a);
                        stats.explored = self.len();
                        stats.verified_depth = depth;
                        return Decision {
                            verdict: Verdict::NotIdentity,
                            witness: Some(w),
                            stats,
                        };
                    }
                    self.canon(&mut scratch);
                    if self.intern(&scratch, node as u32, a) && self.len() > max_residuals {
                        stats.explored = self.len();
                        stats.verified_depth = depth;
                        return Decision {
                            verdict: Verdict::LimitExceeded,
                            witness: None,
                            stats,
                        };
                    }
                }
            }
            level = (level.1, self.len());
            depth += 1;
        }
    }
}

/// Decides `seq =_G 1` with the exact closure and the input freely reduced once.
pub fn is_identity(aut: &MealyAutomaton, seq: &StateSequence, budget: Budget) -> Result<Decision> {
    is_identity_with(aut, seq, budget, Canonical::Exact)
}

pub fn is_identity_with(
    aut: &MealyAutomaton,
    seq: &StateSequence,
    budget: Budget,
    canonical: Canonical,
) -> Result<Decision> {
    aut.check_sequence(seq)?;
    let seq = seq.free_reduce();
    Ok(Closure::new(aut, canonical).run(&seq, budget.max_witness_length, budget.max_residuals))
}

/// `s1 =_G s2`, decided as `s2^{-1} s1 =_G 1` (so `s1` acts first).
pub fn equal_in_group(
    aut: &MealyAutomaton,
    s1: &StateSequence,
    s2: &StateSequence,
    budget: Budget,
) -> Result<Decision> {
    is_identity(aut, &s2.inverse().concat(s1), budget)
}

/// Checks every word of length at most `max_len`; reports the length-lex first
/// moved word. Words reaching an already seen residual are not extended again,
/// which cannot change the answer since the residual alone determines what the
/// sequence does to every continuation.
pub fn bounded_triviality(
    aut: &MealyAutomaton,
    seq: &StateSequence,
    max_len: usize,
) -> Result<Triviality> {
    Ok(bounded_triviality_stats(aut, seq, max_len, Canonical::Exact)?.0)
}

pub fn bounded_triviality_stats(
    aut: &MealyAutomaton,
    seq: &StateSequence,
    max_len: usize,
    canonical: Canonical,
) -> Result<(Triviality, Stats)> {
    aut.check_sequence(seq)?;
    let d = Closure::new(aut, canonical).run(seq, max_len, usize::MAX);
    Ok(match d.witness {
        Some(w) => (Triviality::Moved(w), d.stats),
        None => (Triviality::FixedAll, d.stats),
    })
}

/// Literal enumeration of all words up to `max_len` in length-lex order.
/// Exponential; used as the reference the other deciders are tested against.
pub fn enumerate_triviality(
    aut: &MealyAutomaton,
    seq: &StateSequence,
    max_len: usize,
) -> Result<Triviality> {
    aut.check_sequence(seq)?;
    let k = aut.num_letters() as u32;
    for len in 1..=max_len {
        let mut u = vec![0u32; len];
        'words: loop {
            if aut.act_word(seq, &u)? != u {
                return Ok(Triviality::Moved(u));
            }
            let mut i = len;
            loop {
                if i == 0 {
                    break 'words;
                }
                i -= 1;
                u[i] += 1;
                if u[i] < k {
                    continue 'words;
                }
                u[i] = 0;
            }
        }
    }
    Ok(Triviality::FixedAll)
}
