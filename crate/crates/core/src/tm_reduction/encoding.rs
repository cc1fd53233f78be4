//! Binary prefix code for `Σ'` and the encoded automaton over `Σ`.
//!
//! `0 ↦ 100`, `1 ↦ 101`, `# ↦ 110`, `$ ↦ 111`, `γ_i ↦ 0·bin_L(i)`, where the
//! bits stand for the letters `b0`, `b1` of `Σ`. An encoded state `(p, x)` is
//! `p` after reading the proper code prefix `x`; it copies bits until a code
//! word is complete and then writes the last bit of the translated symbol.

use rustc_hash::FxHashMap;

use crate::automaton::{Alphabet, AutomatonBuilder, MealyAutomaton};
use crate::error::{Error, Result};

use super::tm_mode::{tm_alphabet, DOLLAR, ZERO};
use crate::turing::LocalRule;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeTable {
    log_gamma: u32,
    codes: Vec<Vec<u8>>,
    proper_prefixes: Vec<Vec<u8>>,
    by_code: FxHashMap<Vec<u8>, u32>,
    prefix_set: FxHashMap<Vec<u8>, usize>,
}

impl CodeTable {
    pub fn new(log_gamma: u32) -> Self {
        let mut codes = vec![vec![1, 0, 0], vec![1, 0, 1], vec![1, 1, 0], vec![1, 1, 1]];
        for i in 0..1usize << log_gamma {
            let mut c = vec![0u8];
            c.extend((0..log_gamma).rev().map(|k| ((i >> k) & 1) as u8));
            codes.push(c);
        }
        let mut proper_prefixes = vec![vec![], vec![1], vec![1, 0], vec![1, 1]];
        for len in 0..log_gamma {
            for v in 0..1usize << len {
                let mut p = vec![0u8];
                p.extend((0..len).rev().map(|k| ((v >> k) & 1) as u8));
                proper_prefixes.push(p);
            }
        }
        let by_code = codes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
        let prefix_set = proper_prefixes
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        CodeTable {
            log_gamma,
            codes,
            proper_prefixes,
            by_code,
            prefix_set,
        }
    }

    pub fn for_rule(rule: &LocalRule) -> Self {
        CodeTable::new(rule.log_size)
    }

    pub fn log_gamma(&self) -> u32 {
        self.log_gamma
    }

    /// Number of letters of `Σ'`.
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn code(&self, letter: u32) -> &[u8] {
        &self.codes[letter as usize]
    }

    pub fn codes(&self) -> &[Vec<u8>] {
        &self.codes
    }

    /// `PPre X` in a fixed order starting with `ε`.
    pub fn proper_prefixes(&self) -> &[Vec<u8>] {
        &self.proper_prefixes
    }

    pub fn is_proper_prefix(&self, bits: &[u8]) -> bool {
        self.prefix_set.contains_key(bits)
    }

    pub fn letter_of(&self, bits: &[u8]) -> Option<u32> {
        self.by_code.get(bits).copied()
    }

    /// No code word is a prefix of another.
    pub fn is_prefix_code(&self) -> bool {
        self.codes.iter().enumerate().all(|(i, a)| {
            self.codes
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !b.starts_with(a))
        })
    }

    pub fn encode(&self, word: &[u32]) -> Vec<u8> {
        word.iter()
            .flat_map(|&a| self.codes[a as usize].iter().copied())
            .collect()
    }

    /// Splits `bits` into code words and a remainder. `None` if the remainder is
    /// not a proper prefix of a code word.
    pub fn decode(&self, bits: &[u8]) -> Option<(Vec<u32>, Vec<u8>)> {
        let mut letters = Vec::new();
        let mut cur = Vec::new();
        for &b in bits {
            cur.push(b);
            if let Some(a) = self.letter_of(&cur) {
                letters.push(a);
                cur.clear();
            } else if !self.is_proper_prefix(&cur) {
                return None;
            }
        }
        Some((letters, cur))
    }

    /// Encodes over `Σ` with the bit letters `b0`, `b1`.
    pub fn encode_letters(&self, word: &[u32], b0: u32, b1: u32) -> Vec<u32> {
        self.encode(word)
            .into_iter()
            .map(|b| if b == 0 { b0 } else { b1 })
            .collect()
    }

    /// For a word over `Σ` containing a letter other than `b0`, `b1`: the code
    /// words before it, the proper prefix left over, and the position of that
    /// letter. `None` if the word is binary or its binary prefix does not parse.
    pub fn factor_padded(
        &self,
        word: &[u32],
        b0: u32,
        b1: u32,
    ) -> Option<(Vec<u32>, Vec<u8>, usize)> {
        let pos = word.iter().position(|&a| a != b0 && a != b1)?;
        let bits: Vec<u8> = word[..pos].iter().map(|&a| u8::from(a == b1)).collect();
        let (letters, rest) = self.decode(&bits)?;
        Some((letters, rest, pos))
    }
}

/// State name of `(p, x)`; `ε` keeps the plain name.
pub fn encoded_name(state: &str, prefix: &[u8]) -> String {
    if prefix.is_empty() {
        state.to_string()
    } else {
        let bits: String = prefix
            .iter()
            .map(|&b| if b == 0 { '0' } else { '1' })
            .collect();
        format!("{state}@{bits}")
    }
}

/// `(|𝒯'| - 2)(Γ + 3) + 2`.
pub fn encoded_size(tm_mode_states: usize, gamma: usize) -> usize {
    (tm_mode_states - 2) * (gamma + 3) + 2
}

/// Encodes `aut` (over `Σ'`) over `sigma`. States in `passthrough` (`r`, `id`)
/// are kept as single identity states. Letters of `sigma` other than `b0`, `b1`
/// are copied and lead to the passthrough state named `id`.
pub fn encode_binary(
    aut: &MealyAutomaton,
    passthrough: &[u32],
    table: &CodeTable,
    sigma: &Alphabet,
    b0: u32,
    b1: u32,
    name: &str,
) -> Result<MealyAutomaton> {
    if aut.num_letters() != table.len() {
        return Err(Error::AlphabetMismatch);
    }
    if b0 == b1 || b0 as usize >= sigma.len() || b1 as usize >= sigma.len() {
        return Err(Error::Precondition(
            "bit letters must be two distinct letters of Σ".into(),
        ));
    }
    let mut b = AutomatonBuilder::new(sigma.clone());
    let n = aut.num_states() as u32;
    let is_pass = |p: u32| passthrough.contains(&p);
    for p in 0..n {
        if is_pass(p) {
            b.identity_state(aut.state_name(p))?;
        } else {
            for x in table.proper_prefixes() {
                b.add_state(&encoded_name(aut.state_name(p), x))?;
            }
        }
    }
    let id = passthrough
        .iter()
        .copied()
        .find(|&p| aut.state_name(p) == "id")
        .ok_or_else(|| Error::Precondition("passthrough states must include `id`".into()))?;
    let id = b.state(aut.state_name(id))?;
    let bit_letter = |bit: u8| if bit == 0 { b0 } else { b1 };
    for p in (0..n).filter(|&p| !is_pass(p)) {
        let pname = aut.state_name(p);
        for x in table.proper_prefixes() {
            let from = b.state(&encoded_name(pname, x))?;
            for bit in [0u8, 1] {
                let mut xb = x.clone();
                xb.push(bit);
                if table.is_proper_prefix(&xb) {
                    let to = b.state(&encoded_name(pname, &xb))?;
                    b.set(from, bit_letter(bit), bit_letter(bit), to)?;
                    continue;
                }
                let sym = table.letter_of(&xb).ok_or_else(|| {
                    Error::Malformed("code table does not cover every bit string".into())
                })?;
                let (out, next) = aut.transition(p, sym);
                let out_code = table.code(out);
                if out_code.len() != xb.len() || out_code[..x.len()] != x[..] {
                    return Err(Error::Malformed(format!(
                        "state `{pname}` rewrites `{}` to `{}`, which the encoding cannot express",
                        aut.alphabet().name(sym),
                        aut.alphabet().name(out)
                    )));
                }
                let to = b.state(aut.state_name(next))?;
                b.set(
                    from,
                    bit_letter(bit),
                    bit_letter(*out_code.last().unwrap()),
                    to,
                )?;
            }
        }
    }
    b.fill_missing(id);
    b.build(name)
}

/// The gadget that becomes `r` after reading any `u$` with `u` over
/// `{0, 1, #} ∪ Γ`, and never rewrites.
pub fn build_r0(rule: &LocalRule) -> Result<MealyAutomaton> {
    let mut b = AutomatonBuilder::new(tm_alphabet(rule)?);
    let r = b.identity_state("r")?;
    b.identity_state("id")?;
    let r0 = b.add_state("r0")?;
    let letters = b.alphabet().len() as u32;
    for a in ZERO..letters {
        b.set(r0, a, a, if a == DOLLAR { r } else { r0 })?;
    }
    b.build("r0")
}
