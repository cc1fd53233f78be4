//! Balanced iterated commutators `B_{β,α}[p_{D-1}, …, p_0]` and the twisted
//! variant `B^γ(p, D)`.
//!
//! Entry lists are indexed by subscript: `entries[i]` is `p_i`, so the high half
//! of the list sits on the left of each commutator.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::automaton::{SignedState, StateSequence};
use crate::error::{Error, Result};

/// A level-indexed family of sequences, such as `d ↦ β(d)`.
#[derive(Clone)]
pub struct LevelMap {
    tag: String,
    f: Arc<dyn Fn(u32) -> StateSequence + Send + Sync>,
}

impl LevelMap {
    pub fn new(tag: &str, f: impl Fn(u32) -> StateSequence + Send + Sync + 'static) -> Self {
        LevelMap {
            tag: tag.to_string(),
            f: Arc::new(f),
        }
    }

    pub fn constant(tag: &str, seq: StateSequence) -> Self {
        LevelMap::new(tag, move |_| seq.clone())
    }

    /// `d ↦ ε`.
    pub fn empty() -> Self {
        LevelMap::constant("ε", StateSequence::empty())
    }

    pub fn eval(&self, d: u32) -> StateSequence {
        (self.f)(d)
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Applies `g` to every value.
    pub fn map(
        &self,
        tag: &str,
        g: impl Fn(StateSequence) -> StateSequence + Send + Sync + 'static,
    ) -> Self {
        let f = self.f.clone();
        LevelMap::new(tag, move |d| g(f(d)))
    }
}

impl fmt::Debug for LevelMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LevelMap({})", self.tag)
    }
}

#[derive(Clone, Debug)]
pub struct CommutatorSpec {
    /// `entries[i]` is `p_i`; the length must be a power of two.
    pub entries: Vec<StateSequence>,
    pub alpha: LevelMap,
    pub beta: LevelMap,
}

/// `g^{-1} p g`.
pub fn conjugate(p: &StateSequence, g: &StateSequence) -> StateSequence {
    let mut v = g.inverse();
    v.push_seq(p);
    v.push_seq(g);
    v
}

/// `[h, g] = h^{-1} g^{-1} h g`.
pub fn commutator(h: &StateSequence, g: &StateSequence) -> StateSequence {
    let mut v = h.inverse();
    v.push_seq(&g.inverse());
    v.push_seq(h);
    v.push_seq(g);
    v
}

pub fn log2_exact(d: u64) -> Result<u32> {
    if d == 0 || !d.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(d));
    }
    Ok(d.trailing_zeros())
}

/// One letter of the symbolic commutator word: an entry, `α(level)` or `β(level)`,
/// possibly inverted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    Entry { index: usize, inverse: bool },
    Alpha { level: u32, inverse: bool },
    Beta { level: u32, inverse: bool },
}

/// Emits the block over entries `lo..lo+size`, left to right, using recursion
/// depth `log2 size` and no buffer.
fn emit_block(size: usize, lo: usize, inverse: bool, sink: &mut dyn FnMut(Token)) {
    if size == 1 {
        sink(Token::Entry { index: lo, inverse });
        return;
    }
    let half = size / 2;
    let level = half.trailing_zeros();
    let a = |inv| Token::Alpha {
        level,
        inverse: inv,
    };
    let b = |inv| Token::Beta {
        level,
        inverse: inv,
    };
    let hi = lo + half;
    if !inverse {
        // β⁻¹ H⁻¹ β · α⁻¹ L⁻¹ α · β⁻¹ H β · α⁻¹ L α
        sink(b(true));
        emit_block(half, hi, true, sink);
        sink(b(false));
        sink(a(true));
        emit_block(half, lo, true, sink);
        sink(a(false));
        sink(b(true));
        emit_block(half, hi, false, sink);
        sink(b(false));
        sink(a(true));
        emit_block(half, lo, false, sink);
        sink(a(false));
    } else {
        // α⁻¹ L⁻¹ α · β⁻¹ H⁻¹ β · α⁻¹ L α · β⁻¹ H β
        sink(a(true));
        emit_block(half, lo, true, sink);
        sink(a(false));
        sink(b(true));
        emit_block(half, hi, true, sink);
        sink(b(false));
        sink(a(true));
        emit_block(half, lo, false, sink);
        sink(a(false));
        sink(b(true));
        emit_block(half, hi, false, sink);
        sink(b(false));
    }
}

/// Streams the symbolic word of `B[p_{D-1}, …, p_0]`.
pub fn balanced_tokens_stream(d_entries: u64, sink: &mut dyn FnMut(Token)) -> Result<()> {
    log2_exact(d_entries)?;
    emit_block(d_entries as usize, 0, false, sink);
    Ok(())
}

pub fn balanced_tokens(d_entries: u64) -> Result<Vec<Token>> {
    let mut v = Vec::new();
    balanced_tokens_stream(d_entries, &mut |t| v.push(t))?;
    Ok(v)
}

/// Entry-letter length `ℓ(1) = 1`, `ℓ(2D) = 8 + 4ℓ(D)`.
pub fn entry_letter_length(d_entries: u64) -> Result<BigUint> {
    let levels = log2_exact(d_entries)?;
    let mut l = BigUint::from(1u32);
    for _ in 0..levels {
        l = l * 4u32 + 8u32;
    }
    Ok(l)
}

/// Streams the letters of `balanced(spec)` without materializing the word.
/// Only one value of α and β per level is cached.
pub fn balanced_stream(spec: &CommutatorSpec, sink: &mut dyn FnMut(SignedState)) -> Result<()> {
    let n = spec.entries.len() as u64;
    let levels = log2_exact(n)? as usize;
    let alphas: Vec<StateSequence> = (0..levels as u32).map(|d| spec.alpha.eval(d)).collect();
    let betas: Vec<StateSequence> = (0..levels as u32).map(|d| spec.beta.eval(d)).collect();
    let put = |seq: &StateSequence, inverse: bool, sink: &mut dyn FnMut(SignedState)| {
        if inverse {
            for s in seq.0.iter().rev() {
                sink(s.inv());
            }
        } else {
            for &s in &seq.0 {
                sink(s);
            }
        }
    };
    balanced_tokens_stream(n, &mut |t| match t {
        Token::Entry { index, inverse } => put(&spec.entries[index], inverse, sink),
        Token::Alpha { level, inverse } => put(&alphas[level as usize], inverse, sink),
        Token::Beta { level, inverse } => put(&betas[level as usize], inverse, sink),
    })
}

/// `B_{β,α}[p_{D-1}, …, p_0]`, built by the defining recursion.
pub fn balanced(spec: &CommutatorSpec) -> Result<StateSequence> {
    let n = spec.entries.len() as u64;
    log2_exact(n)?;
    Ok(balanced_rec(&spec.entries, spec))
}

fn balanced_rec(entries: &[StateSequence], spec: &CommutatorSpec) -> StateSequence {
    if entries.len() == 1 {
        return entries[0].clone();
    }
    let half = entries.len() / 2;
    let d = half.trailing_zeros();
    let lo = balanced_rec(&entries[..half], spec);
    let hi = balanced_rec(&entries[half..], spec);
    commutator(
        &conjugate(&hi, &spec.beta.eval(d)),
        &conjugate(&lo, &spec.alpha.eval(d)),
    )
}

/// `B^γ(p, 1) = p`, `B^γ(p, 2D) = [(γ^{-D} B^γ(p,D) γ^D)^{β(d)}, B^γ(p,D)^{α(d)}]`.
pub fn twisted(
    p: &StateSequence,
    d_entries: u64,
    gamma: &StateSequence,
    alpha: &LevelMap,
    beta: &LevelMap,
) -> Result<StateSequence> {
    let levels = log2_exact(d_entries)?;
    let mut cur = p.clone();
    for d in 0..levels {
        let shift = gamma.pow(1i64 << d);
        let left = conjugate(&conjugate(&cur, &shift), &beta.eval(d));
        let right = conjugate(&cur, &alpha.eval(d));
        cur = commutator(&left, &right);
    }
    Ok(cur)
}

/// `w(D, i)`: digit `k` of `i` (least significant first) contributes `α(k)` for 0
/// and `β(k)` for 1, concatenated from `k = 0` upwards.
pub fn leaf_conjugator(
    d_entries: u64,
    i: u64,
    alpha: &LevelMap,
    beta: &LevelMap,
) -> Result<StateSequence> {
    let levels = log2_exact(d_entries)?;
    if i >= d_entries {
        return Err(Error::Precondition(format!(
            "index {i} out of range for D = {d_entries}"
        )));
    }
    let mut w = StateSequence::empty();
    for k in 0..levels {
        if (i >> k) & 1 == 0 {
            w.push_seq(&alpha.eval(k));
        } else {
            w.push_seq(&beta.eval(k));
        }
    }
    Ok(w)
}
