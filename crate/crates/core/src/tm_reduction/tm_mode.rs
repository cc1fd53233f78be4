//! The TM-mode automaton over `Σ' = {0, 1, #, $} ∪ Γ`.
//!
//! A tableau is written as `(0^ℓ γ)…(0^ℓ γ) # … $`. The states here check its
//! shape (`s`), that some configuration is accepting (`f`), that every symbol
//! was marked (`c`), and that consecutive configurations follow `τ` (the
//! `zero`/`one`/`pair`/`skip` families). Only `check_r` and `check_id` rewrite
//! the input; they increment the binary counters in front of the symbols.

use crate::automaton::{Alphabet, AutomatonBuilder, MealyAutomaton, SignedState, StateSequence};
use crate::error::{Error, Result};
use crate::turing::LocalRule;

pub const ZERO: u32 = 0;
pub const ONE: u32 = 1;
pub const HASH: u32 = 2;
pub const DOLLAR: u32 = 3;

/// Letter of `Σ'` for the symbol `g` of `Γ`.
pub fn symbol_letter(g: u32) -> u32 {
    4 + g
}

/// `0, 1, #, $, g:<symbol>…`.
pub fn tm_alphabet(rule: &LocalRule) -> Result<Alphabet> {
    let mut names: Vec<String> = ["0", "1", "#", "$"].iter().map(|s| s.to_string()).collect();
    names.extend(rule.symbols.iter().map(|s| format!("g:{s}")));
    Alphabet::new(&names)
}

#[derive(Clone, Debug)]
pub struct TmMode {
    pub automaton: MealyAutomaton,
    pub gamma: usize,
    pub r: u32,
    pub id: u32,
    pub s: u32,
    pub f: u32,
    pub c: u32,
    pub check_r: u32,
    pub check_id: u32,
    /// `q_γ = zero[γ|␣]`, indexed by `Γ`.
    pub q_gamma: Vec<u32>,
}

impl TmMode {
    pub fn single(&self, state: u32) -> StateSequence {
        StateSequence::single(SignedState::pos(state))
    }

    /// `check_id^{-k} x check_id^{j}`.
    pub fn shifted(&self, k: i64, x: &StateSequence, j: i64) -> StateSequence {
        let ci = self.single(self.check_id);
        let mut v = ci.pow(-k);
        v.push_seq(x);
        v.push_seq(&ci.pow(j));
        v
    }
}

/// `3Γ² + Γ + 18`.
pub fn tm_mode_size(gamma: usize) -> usize {
    3 * gamma * gamma + gamma + 18
}

fn add_check(b: &mut AutomatonBuilder, prefix: &str, target: u32, gamma: usize) -> Result<u32> {
    let check = b.add_state(prefix)?;
    let top = b.add_state(&format!("{prefix}.top"))?;
    let right = b.add_state(&format!("{prefix}.right"))?;
    let bottom = b.add_state(&format!("{prefix}.bottom"))?;
    let skip = b.add_state(&format!("{prefix}.skip"))?;
    b.set(check, ZERO, ONE, top)?;
    b.set(check, ONE, ZERO, bottom)?;
    b.set(top, ZERO, ZERO, top)?;
    b.set(top, ONE, ONE, right)?;
    b.set(right, ZERO, ZERO, right)?;
    b.set(right, ONE, ONE, right)?;
    b.set(bottom, ONE, ZERO, bottom)?;
    b.set(bottom, ZERO, ONE, right)?;
    b.set(skip, ZERO, ZERO, skip)?;
    b.set(skip, HASH, HASH, check)?;
    b.set(skip, DOLLAR, DOLLAR, target)?;
    for g in 0..gamma as u32 {
        let x = symbol_letter(g);
        b.set(top, x, x, skip)?;
        b.set(right, x, x, check)?;
        b.set(skip, x, x, skip)?;
    }
    Ok(check)
}

pub fn build_tm_mode(rule: &LocalRule) -> Result<TmMode> {
    let gamma = rule.size();
    if !gamma.is_power_of_two() {
        return Err(Error::GammaNotPowerOfTwo(gamma));
    }
    let mut b = AutomatonBuilder::new(tm_alphabet(rule)?);
    let r = b.identity_state("r")?;
    let id = b.identity_state("id")?;
    let gl = symbol_letter;
    let all_g = 0..gamma as u32;

    // Shape (0*Γ)+ (# (0*Γ)+)* $.
    let s = b.add_state("s")?;
    let s2 = b.add_state("s'")?;
    b.set(s, ZERO, ZERO, s)?;
    b.set(s2, ZERO, ZERO, s)?;
    b.set(s2, HASH, HASH, s)?;
    b.set(s2, DOLLAR, DOLLAR, r)?;
    for g in all_g.clone() {
        b.set(s, gl(g), gl(g), s2)?;
        b.set(s2, gl(g), gl(g), s2)?;
    }

    // Some accepting state symbol occurs.
    let f = b.add_state("f")?;
    let f2 = b.add_state("f'")?;
    b.set(f, DOLLAR, DOLLAR, id)?;
    b.set(f2, DOLLAR, DOLLAR, r)?;
    for a in [ZERO, ONE, HASH] {
        b.set(f, a, a, f)?;
        b.set(f2, a, a, f2)?;
    }
    for g in all_g.clone() {
        let to = if rule.accepting[g as usize] { f2 } else { f };
        b.set(f, gl(g), gl(g), to)?;
        b.set(f2, gl(g), gl(g), f2)?;
    }

    let check_r = add_check(&mut b, "check_r", r, gamma)?;
    let check_id = add_check(&mut b, "check_id", id, gamma)?;

    // Every block carries a 1 before its symbol.
    let c = b.add_state("c")?;
    let ok = b.add_state("c'")?;
    b.set(c, ZERO, ZERO, c)?;
    b.set(c, ONE, ONE, ok)?;
    b.set(c, HASH, HASH, c)?;
    b.set(c, DOLLAR, DOLLAR, r)?;
    b.set(ok, ZERO, ZERO, ok)?;
    b.set(ok, ONE, ONE, ok)?;
    b.set(ok, HASH, HASH, c)?;
    b.set(ok, DOLLAR, DOLLAR, r)?;
    for g in all_g.clone() {
        b.set(ok, gl(g), gl(g), c)?;
    }

    // Transition checker. `zero[g0|gm1]` expects `g0` at the first unmarked
    // block, with `gm1` the symbol read just before it.
    let sym = |g: u32| rule.symbols[g as usize].as_str();
    let zero_name = |g0: u32, gm1: u32| format!("zero[{}|{}]", sym(g0), sym(gm1));
    let one_name = |g0: u32, gm1: u32| format!("one[{}|{}]", sym(g0), sym(gm1));
    let pair_name = |gm1: u32, g0: u32| format!("pair[{}|{}]", sym(gm1), sym(g0));
    let skip_name = |x: u32| format!("skip[{}]", sym(x));
    for g0 in all_g.clone() {
        for gm1 in all_g.clone() {
            b.add_state(&zero_name(g0, gm1))?;
            b.add_state(&one_name(g0, gm1))?;
            b.add_state(&pair_name(gm1, g0))?;
        }
    }
    for x in all_g.clone() {
        b.add_state(&skip_name(x))?;
    }
    let blank = rule.blank;
    for g0 in all_g.clone() {
        for gm1 in all_g.clone() {
            let zero = b.state(&zero_name(g0, gm1))?;
            let one = b.state(&one_name(g0, gm1))?;
            let pair = b.state(&pair_name(gm1, g0))?;
            b.set(zero, ZERO, ZERO, zero)?;
            b.set(zero, ONE, ONE, one)?;
            b.set(zero, gl(g0), gl(g0), pair)?;
            b.set(one, ZERO, ZERO, one)?;
            b.set(one, ONE, ONE, one)?;
            for g in all_g.clone() {
                let t = b.state(&zero_name(g0, g))?;
                b.set(one, gl(g), gl(g), t)?;
            }
            b.set(pair, ZERO, ZERO, pair)?;
            for g1 in all_g.clone() {
                let t = b.state(&skip_name(rule.tau(gm1, g0, g1)))?;
                b.set(pair, gl(g1), gl(g1), t)?;
            }
            let t = b.state(&zero_name(rule.tau(gm1, g0, blank), blank))?;
            b.set(pair, HASH, HASH, t)?;
            b.set(pair, DOLLAR, DOLLAR, r)?;
        }
    }
    for x in all_g.clone() {
        let skip = b.state(&skip_name(x))?;
        b.set(skip, ZERO, ZERO, skip)?;
        for g in all_g.clone() {
            b.set(skip, gl(g), gl(g), skip)?;
        }
        let t = b.state(&zero_name(x, blank))?;
        b.set(skip, HASH, HASH, t)?;
        b.set(skip, DOLLAR, DOLLAR, r)?;
    }
    let q_gamma = all_g
        .clone()
        .map(|g| b.state(&zero_name(g, blank)))
        .collect::<Result<Vec<_>>>()?;
    b.fill_missing(id);
    let automaton = b.build("tm-mode")?;
    Ok(TmMode {
        automaton,
        gamma,
        r,
        id,
        s,
        f,
        c,
        check_r,
        check_id,
        q_gamma,
    })
}

/// `[s, c_0 … c_{s-1}, c', q_0 … q_{s-1}, f]` for the input `w`, unpadded.
pub fn tm_mode_sequences(
    tmode: &TmMode,
    rule: &LocalRule,
    w: &[usize],
    s: usize,
) -> Result<Vec<StateSequence>> {
    let init = rule.initial_configuration(w, s)?;
    let mut out = Vec::with_capacity(3 + 2 * s);
    out.push(tmode.single(tmode.s));
    let check_r = tmode.single(tmode.check_r);
    for i in 0..s as i64 {
        out.push(tmode.shifted(i + 1, &check_r, i));
    }
    let si = s as i64;
    out.push(tmode.shifted(si, &tmode.single(tmode.c), si));
    for (i, &g) in init.iter().enumerate() {
        let i = i as i64;
        out.push(tmode.shifted(i, &tmode.single(tmode.q_gamma[g as usize]), i));
    }
    out.push(tmode.single(tmode.f));
    Ok(out)
}

/// Pads to the next power of two by repeating the last entry.
pub fn pad_entries(mut entries: Vec<StateSequence>) -> Vec<StateSequence> {
    let n = entries.len().next_power_of_two();
    if let Some(last) = entries.last().cloned() {
        entries.resize(n, last);
    }
    entries
}

/// `⌈log₂ s⌉ + 1`.
pub fn default_block_length(s: usize) -> usize {
    (usize::BITS - (s.max(1) - 1).leading_zeros()) as usize + 1
}

/// The configurations as `(0^ℓ γ)… # (0^ℓ γ)…` over `Σ'`, without the final `$`.
pub fn tableau_word(configs: &[Vec<u32>], ell: usize) -> Vec<u32> {
    let mut u = Vec::new();
    for (k, conf) in configs.iter().enumerate() {
        if k > 0 {
            u.push(HASH);
        }
        for &g in conf {
            u.extend(std::iter::repeat_n(ZERO, ell));
            u.push(symbol_letter(g));
        }
    }
    u
}

/// Bounds for [`find_unrefuted_tableau`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableauLimits {
    pub max_configurations: usize,
    /// Blocks per configuration, at least one.
    pub max_blocks: usize,
    /// Zeros in front of each symbol.
    pub max_zeros: usize,
}

/// `seq ∈ id* r id*`, comparing states literally: in TM mode `r` itself acts
/// as the identity, so acting like one proves nothing.
pub fn is_single_r(seq: &StateSequence, r: u32, id: u32) -> bool {
    seq.0.iter().filter(|e| e.state == r).count() == 1
        && seq
            .0
            .iter()
            .all(|e| e.state == id || (e.state == r && !e.inverse))
}

/// `seq ∈ id*`, literally.
pub fn is_all_id(seq: &StateSequence, id: u32) -> bool {
    seq.0.iter().all(|e| e.state == id)
}

struct Search<'a> {
    aut: &'a MealyAutomaton,
    id: u32,
    gamma: u32,
    limits: TableauLimits,
    word: Vec<u32>,
    visited: usize,
}

impl Search<'_> {
    fn advance(
        &self,
        res: &[StateSequence],
        letters: &[u32],
    ) -> Result<Option<Vec<StateSequence>>> {
        let mut next = Vec::with_capacity(res.len());
        for r in res {
            let (_, t) = self.aut.cross(r, letters)?;
            if is_all_id(&t, self.id) {
                return Ok(None);
            }
            next.push(t);
        }
        Ok(Some(next))
    }

    fn dfs(
        &mut self,
        res: &[StateSequence],
        configs: usize,
        blocks: usize,
    ) -> Result<Option<Vec<u32>>> {
        self.visited += 1;
        if blocks > 0 {
            if self.advance(res, &[DOLLAR])?.is_some() {
                let mut w = self.word.clone();
                w.push(DOLLAR);
                return Ok(Some(w));
            }
            if configs + 1 < self.limits.max_configurations {
                if let Some(n) = self.advance(res, &[HASH])? {
                    self.word.push(HASH);
                    let found = self.dfs(&n, configs + 1, 0)?;
                    self.word.pop();
                    if found.is_some() {
                        return Ok(found);
                    }
                }
            }
        }
        if blocks < self.limits.max_blocks {
            for k in 0..=self.limits.max_zeros {
                for g in 0..self.gamma {
                    let mut block = vec![ZERO; k];
                    block.push(symbol_letter(g));
                    if let Some(n) = self.advance(res, &block)? {
                        let len = self.word.len();
                        self.word.extend_from_slice(&block);
                        let found = self.dfs(&n, configs, blocks + 1)?;
                        self.word.truncate(len);
                        if found.is_some() {
                            return Ok(found);
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Looks for a tableau-shaped `u` such that no `p_i` becomes trivial on `u$`.
/// Prefixes on which some `p_i` has already fallen to `id*` are not extended,
/// since `id` is a sink. Returns such a `u$` (if any) and the
/// number of prefixes visited.
pub fn find_unrefuted_tableau(
    tmode: &TmMode,
    entries: &[StateSequence],
    limits: TableauLimits,
) -> Result<(Option<Vec<u32>>, usize)> {
    let mut search = Search {
        aut: &tmode.automaton,
        id: tmode.id,
        gamma: tmode.gamma as u32,
        limits,
        word: Vec::new(),
        visited: 0,
    };
    let found = search.dfs(entries, 0, 0)?;
    Ok((found, search.visited))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turing::{fixture_machine, normalize, SpaceBound};

    fn rule() -> LocalRule {
        normalize(&fixture_machine("accept-empty", SpaceBound::Constant(3)).unwrap()).unwrap()
    }

    #[test]
    fn block_length() {
        assert_eq!(default_block_length(1), 1);
        assert_eq!(default_block_length(2), 2);
        assert_eq!(default_block_length(3), 3);
        assert_eq!(default_block_length(4), 3);
        assert_eq!(default_block_length(5), 4);
    }

    #[test]
    fn size_matches_formula() {
        let rule = rule();
        assert_eq!(rule.size(), 4);
        let t = build_tm_mode(&rule).unwrap();
        assert_eq!(t.automaton.num_states(), tm_mode_size(4));
        assert_eq!(tm_mode_size(4), 70);
        assert!(t.automaton.is_invertible());
    }

    #[test]
    fn only_check_states_rewrite() {
        let t = build_tm_mode(&rule()).unwrap();
        let aut = &t.automaton;
        for s in 0..aut.num_states() as u32 {
            let name = aut.state_name(s);
            let rewrites = (0..aut.num_letters() as u32).any(|a| aut.transition(s, a).0 != a);
            let marker = name == "check_r" || name == "check_id" || name.ends_with(".bottom");
            assert_eq!(rewrites, marker, "{name}");
            assert_eq!(aut.transition(s, DOLLAR).0, DOLLAR);
        }
    }

    #[test]
    fn sequence_layout() {
        let rule = rule();
        let t = build_tm_mode(&rule).unwrap();
        let seqs = tm_mode_sequences(&t, &rule, &[], 3).unwrap();
        assert_eq!(seqs.len(), 9);
        assert_eq!(pad_entries(seqs.clone()).len(), 16);
        let c0 = StateSequence::new(vec![
            SignedState::neg(t.check_id),
            SignedState::pos(t.check_r),
        ]);
        assert_eq!(seqs[1], c0);
        assert_eq!(seqs[5], t.single(t.q_gamma[rule.initial as usize]));
    }
}
