//! Straight-line programs over signed states.
//!
//! Every variable has one production whose body may mention terminals and
//! other variables, each possibly inverted. An inverted variable stands for the
//! inverse of its word, so inverse productions never need to be written out.

use num_bigint::BigUint;
use rustc_hash::FxHashMap;

use crate::automaton::{MealyAutomaton, SignedState, StateSequence, Word};
use crate::commutator::{log2_exact, LevelMap};
use crate::decide::{is_identity_with, Budget, Canonical, Decision, Stats, Verdict};
use crate::error::{Error, Result};

pub const DEFAULT_EXPAND_GUARD: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sym {
    Term(SignedState),
    Var { index: usize, inverse: bool },
}

impl Sym {
    pub fn inv(self) -> Sym {
        match self {
            Sym::Term(s) => Sym::Term(s.inv()),
            Sym::Var { index, inverse } => Sym::Var {
                index,
                inverse: !inverse,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub name: String,
    pub body: Vec<Sym>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slp {
    rules: Vec<Production>,
    start: usize,
    /// Variables with every variable they mention earlier in the list.
    order: Vec<usize>,
}

pub fn terms(seq: &StateSequence) -> Vec<Sym> {
    seq.0.iter().map(|&s| Sym::Term(s)).collect()
}

impl Slp {
    pub fn new(rules: Vec<Production>, start: &str) -> Result<Self> {
        let mut index = FxHashMap::default();
        for (i, r) in rules.iter().enumerate() {
            if index.insert(r.name.clone(), i).is_some() {
                return Err(Error::Duplicate(r.name.clone()));
            }
        }
        for r in &rules {
            for s in &r.body {
                if let Sym::Var { index: v, .. } = s {
                    if *v >= rules.len() {
                        return Err(Error::Malformed(format!(
                            "`{}` mentions an undefined variable",
                            r.name
                        )));
                    }
                }
            }
        }
        let start = *index
            .get(start)
            .ok_or_else(|| Error::UnknownState(start.to_string()))?;
        let order = topological(&rules)?;
        Ok(Slp {
            rules,
            start,
            order,
        })
    }

    pub fn rules(&self) -> &[Production] {
        &self.rules
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn start_name(&self) -> &str {
        &self.rules[self.start].name
    }

    pub fn num_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }

    /// Lengths of all variables, children first.
    pub fn lengths(&self) -> Vec<BigUint> {
        let mut len = vec![BigUint::default(); self.rules.len()];
        for &v in &self.order {
            let mut l = BigUint::default();
            for s in &self.rules[v].body {
                match s {
                    Sym::Term(_) => l += 1u32,
                    Sym::Var { index, .. } => l += &len[*index],
                }
            }
            len[v] = l;
        }
        len
    }

    pub fn expanded_length(&self) -> BigUint {
        self.lengths().swap_remove(self.start)
    }

    /// The generated word of `var`, refusing to produce more than `guard` letters.
    pub fn expand_var(&self, var: usize, guard: u64) -> Result<StateSequence> {
        let len = &self.lengths()[var];
        if *len > BigUint::from(guard) {
            return Err(Error::GuardExceeded {
                length: len.to_string(),
                guard,
            });
        }
        let mut out = Vec::with_capacity(u64::try_from(len).unwrap_or(0) as usize);
        self.walk(var, false, &mut |s| out.push(s));
        Ok(StateSequence::new(out))
    }

    pub fn expand(&self, guard: u64) -> Result<StateSequence> {
        self.expand_var(self.start, guard)
    }

    /// Visits the letters of `var` (or of its inverse) left to right with an
    /// explicit stack.
    fn walk(&self, var: usize, inverse: bool, sink: &mut dyn FnMut(SignedState)) {
        let mut stack: Vec<(usize, bool, usize)> = vec![(var, inverse, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, inv, pos) = *top;
            let body = &self.rules[v].body;
            if pos == body.len() {
                stack.pop();
                continue;
            }
            top.2 += 1;
            let sym = if inv {
                body[body.len() - 1 - pos].inv()
            } else {
                body[pos]
            };
            match sym {
                Sym::Term(s) => sink(s),
                Sym::Var { index, inverse } => stack.push((index, inverse, 0)),
            }
        }
    }

    /// Visits the letters right to left, which is the order they act in.
    fn walk_rev(
        &self,
        var: usize,
        inverse: bool,
        sink: &mut dyn FnMut(SignedState) -> Result<()>,
    ) -> Result<()> {
        let mut stack: Vec<(usize, bool, usize)> = vec![(var, inverse, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, inv, pos) = *top;
            let body = &self.rules[v].body;
            if pos == body.len() {
                stack.pop();
                continue;
            }
            top.2 += 1;
            let sym = if inv {
                body[pos].inv()
            } else {
                body[body.len() - 1 - pos]
            };
            match sym {
                Sym::Term(s) => sink(s)?,
                Sym::Var { index, inverse } => stack.push((index, inverse, 0)),
            }
        }
        Ok(())
    }

    /// Every production mirrored: bodies reversed, signs flipped, names toggled
    /// between `X` and `X^-1`.
    pub fn invert(&self) -> Slp {
        let rules = self
            .rules
            .iter()
            .map(|r| Production {
                name: toggle_inverse_name(&r.name),
                // Variable `X` is renamed to `X^-1`, so references keep their sign.
                body: r
                    .body
                    .iter()
                    .rev()
                    .map(|s| match s {
                        Sym::Term(t) => Sym::Term(t.inv()),
                        v => *v,
                    })
                    .collect(),
            })
            .collect();
        Slp {
            rules,
            start: self.start,
            order: self.order.clone(),
        }
    }

    /// Distinct terminals, in first-seen order.
    pub fn terminals(&self) -> Vec<SignedState> {
        let mut seen = Vec::new();
        for r in &self.rules {
            for s in &r.body {
                if let Sym::Term(t) = s {
                    if !seen.contains(t) {
                        seen.push(*t);
                    }
                }
            }
        }
        seen
    }

    /// Parses `(name, body)` pairs. Body tokens are separated by whitespace or
    /// commas; a token naming a variable (optionally with `^-1`) is a variable,
    /// anything else must be a state of `aut`.
    pub fn parse(aut: &MealyAutomaton, rules: &[(String, String)], start: &str) -> Result<Slp> {
        let index: FxHashMap<&str, usize> = rules
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.as_str(), i))
            .collect();
        for (n, _) in rules {
            if aut.has_state(n) {
                return Err(Error::Parse(format!(
                    "variable `{n}` clashes with a state name"
                )));
            }
        }
        let mut out = Vec::with_capacity(rules.len());
        for (name, body) in rules {
            let mut syms = Vec::new();
            for tok in body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
            {
                let var = index.get(tok).map(|&i| (i, false)).or_else(|| {
                    tok.strip_suffix("^-1")
                        .and_then(|b| index.get(b))
                        .map(|&i| (i, true))
                });
                syms.push(match var {
                    Some((index, inverse)) => Sym::Var { index, inverse },
                    None => Sym::Term(aut.parse_signed(tok)?),
                });
            }
            out.push(Production {
                name: name.clone(),
                body: syms,
            });
        }
        Slp::new(out, start)
    }

    pub fn format_body(&self, aut: &MealyAutomaton, var: usize) -> String {
        self.rules[var]
            .body
            .iter()
            .map(|s| match s {
                Sym::Term(t) => aut.format_signed(*t),
                Sym::Var { index, inverse } => {
                    let n = &self.rules[*index].name;
                    if *inverse {
                        format!("{n}^-1")
                    } else {
                        n.clone()
                    }
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn toggle_inverse_name(name: &str) -> String {
    match name.strip_suffix("^-1") {
        Some(base) => base.to_string(),
        None => format!("{name}^-1"),
    }
}

fn topological(rules: &[Production]) -> Result<Vec<usize>> {
    // 0 = new, 1 = on the stack, 2 = done.
    let mut mark = vec![0u8; rules.len()];
    let mut order = Vec::with_capacity(rules.len());
    for root in 0..rules.len() {
        if mark[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = 1;
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            let body = &rules[v].body;
            let mut pushed = false;
            while *pos < body.len() {
                let s = body[*pos];
                *pos += 1;
                if let Sym::Var { index, .. } = s {
                    match mark[index] {
                        0 => {
                            mark[index] = 1;
                            stack.push((index, 0));
                            pushed = true;
                            break;
                        }
                        1 => return Err(Error::CyclicGrammar(rules[index].name.clone())),
                        _ => {}
                    }
                }
            }
            if !pushed {
                mark[v] = 2;
                order.push(v);
                stack.pop();
            }
        }
    }
    Ok(order)
}

/// Output and residual of the generated sequence on `u`, computed without
/// expanding: the letters are visited right to left and each rewrites the word
/// in place. `residual` receives the residual of every letter, right to left.
pub fn act_streaming_visit(
    aut: &MealyAutomaton,
    slp: &Slp,
    u: &[u32],
    residual: &mut dyn FnMut(SignedState),
) -> Result<Word> {
    aut.check_sequence(&StateSequence::new(slp.terminals()))?;
    let mut word = u.to_vec();
    slp.walk_rev(slp.start, false, &mut |s| {
        let mut p = s.pack();
        for a in word.iter_mut() {
            let (o, n) = aut.step(p, *a);
            *a = o;
            p = n;
        }
        residual(SignedState::unpack(p));
        Ok(())
    })?;
    Ok(word)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualSummary {
    pub length: BigUint,
    /// Every residual letter is an identity state.
    pub all_identity: bool,
}

pub fn act_streaming(
    aut: &MealyAutomaton,
    slp: &Slp,
    u: &[u32],
) -> Result<(Word, ResidualSummary)> {
    let mut all_identity = true;
    let mut length = BigUint::default();
    let out = act_streaming_visit(aut, slp, u, &mut |s| {
        length += 1u32;
        all_identity &= aut.is_identity_state(s.state);
    })?;
    Ok((
        out,
        ResidualSummary {
            length,
            all_identity,
        },
    ))
}

/// `A_D` for `B^γ(p, D)`: `M_1 → γ`, `M_{2D} → M_D M_D`, `A_1 → p`,
/// `A_{2D} → β⁻¹ M_D⁻¹ A_D⁻¹ M_D β · α⁻¹ A_D⁻¹ α · β⁻¹ M_D⁻¹ A_D M_D β · α⁻¹ A_D α`
/// with `α = α(log D)`, `β = β(log D)`.
pub fn slp_twisted(
    p: &StateSequence,
    d_entries: u64,
    gamma: &StateSequence,
    alpha: &LevelMap,
    beta: &LevelMap,
) -> Result<Slp> {
    let levels = log2_exact(d_entries)?;
    let mut b = SlpBuilder::new();
    let chain = b.power_chain("M", &terms(gamma), levels)?;
    let a = b.twisted("A", terms(p), &chain, levels, alpha, beta)?;
    let start = b.name(a).to_string();
    b.build(&start)
}

/// Incremental construction of grammars with shared variables.
#[derive(Clone, Debug, Default)]
pub struct SlpBuilder {
    rules: Vec<Production>,
    index: FxHashMap<String, usize>,
}

impl SlpBuilder {
    pub fn new() -> Self {
        SlpBuilder::default()
    }

    pub fn add(&mut self, name: &str, body: Vec<Sym>) -> Result<usize> {
        if self.index.contains_key(name) {
            return Err(Error::Duplicate(name.to_string()));
        }
        let i = self.rules.len();
        self.rules.push(Production {
            name: name.to_string(),
            body,
        });
        self.index.insert(name.to_string(), i);
        Ok(i)
    }

    pub fn name(&self, var: usize) -> &str {
        &self.rules[var].name
    }

    pub fn var(var: usize) -> Sym {
        Sym::Var {
            index: var,
            inverse: false,
        }
    }

    pub fn var_inv(var: usize) -> Sym {
        Sym::Var {
            index: var,
            inverse: true,
        }
    }

    /// `prefix1 → γ`, `prefix2 → prefix1 prefix1`, …, up to `2^levels`.
    pub fn power_chain(&mut self, prefix: &str, gamma: &[Sym], levels: u32) -> Result<Vec<usize>> {
        let mut chain = vec![self.add(&format!("{prefix}1"), gamma.to_vec())?];
        for i in 1..=levels {
            let prev = chain[i as usize - 1];
            chain.push(self.add(
                &format!("{prefix}{}", BigUint::from(1u32) << i),
                vec![Self::var(prev), Self::var(prev)],
            )?);
        }
        Ok(chain)
    }

    /// Twisted commutator over `chain[i] = γ^{2^i}`; returns `A_{2^levels}`.
    pub fn twisted(
        &mut self,
        prefix: &str,
        p: Vec<Sym>,
        chain: &[usize],
        levels: u32,
        alpha: &LevelMap,
        beta: &LevelMap,
    ) -> Result<usize> {
        let mut a = self.add(&format!("{prefix}1"), p)?;
        for d in 0..levels {
            let al = terms(&alpha.eval(d));
            let be = terms(&beta.eval(d));
            let inv = |v: &[Sym]| v.iter().rev().map(|s| s.inv()).collect::<Vec<_>>();
            let m = chain[d as usize];
            let mut body = Vec::new();
            body.extend(inv(&be));
            body.extend([Self::var_inv(m), Self::var_inv(a), Self::var(m)]);
            body.extend(be.iter().copied());
            body.extend(inv(&al));
            body.push(Self::var_inv(a));
            body.extend(al.iter().copied());
            body.extend(inv(&be));
            body.extend([Self::var_inv(m), Self::var(a), Self::var(m)]);
            body.extend(be.iter().copied());
            body.extend(inv(&al));
            body.push(Self::var(a));
            body.extend(al.iter().copied());
            a = self.add(&format!("{prefix}{}", BigUint::from(1u32) << (d + 1)), body)?;
        }
        Ok(a)
    }

    /// `B_{β,α}[entries]` with one variable per block; `entries[i]` is `p_i`.
    pub fn balanced(
        &mut self,
        prefix: &str,
        entries: Vec<Vec<Sym>>,
        alpha: &LevelMap,
        beta: &LevelMap,
    ) -> Result<usize> {
        log2_exact(entries.len() as u64)?;
        let mut level: Vec<usize> = entries
            .into_iter()
            .enumerate()
            .map(|(i, body)| self.add(&format!("{prefix}[{i}]"), body))
            .collect::<Result<_>>()?;
        let mut size = 1usize;
        while level.len() > 1 {
            let d = size.trailing_zeros();
            let al = terms(&alpha.eval(d));
            let be = terms(&beta.eval(d));
            let inv = |v: &[Sym]| v.iter().rev().map(|s| s.inv()).collect::<Vec<_>>();
            let mut next = Vec::with_capacity(level.len() / 2);
            for (j, pair) in level.chunks(2).enumerate() {
                let (lo, hi) = (pair[0], pair[1]);
                let mut body = Vec::new();
                body.extend(inv(&be));
                body.push(Self::var_inv(hi));
                body.extend(be.iter().copied());
                body.extend(inv(&al));
                body.push(Self::var_inv(lo));
                body.extend(al.iter().copied());
                body.extend(inv(&be));
                body.push(Self::var(hi));
                body.extend(be.iter().copied());
                body.extend(inv(&al));
                body.push(Self::var(lo));
                body.extend(al.iter().copied());
                let lo_i = j * size * 2;
                next.push(self.add(&format!("{prefix}[{}..{}]", lo_i, lo_i + 2 * size), body)?);
            }
            level = next;
            size *= 2;
        }
        Ok(level[0])
    }

    pub fn build(self, start: &str) -> Result<Slp> {
        Slp::new(self.rules, start)
    }
}

/// Decides whether the generated sequence is trivial. Expands when the length
/// is within `guard`; otherwise checks words by streaming, shortest first, until
/// the budget runs out, and reports `LimitExceeded` with the depth verified.
pub fn compressed_is_identity(
    aut: &MealyAutomaton,
    slp: &Slp,
    budget: Budget,
    guard: u64,
) -> Result<Decision> {
    if slp.expanded_length() <= BigUint::from(guard) {
        let seq = slp.expand(guard)?;
        return is_identity_with(aut, &seq, budget, Canonical::Reduced);
    }
    let k = aut.num_letters() as u32;
    let mut stats = Stats::default();
    let mut examined = 0usize;
    for len in 1..=budget.max_witness_length {
        let mut u = vec![0u32; len];
        'words: loop {
            examined += 1;
            if examined > budget.max_residuals {
                stats.explored = examined - 1;
                return Ok(Decision {
                    verdict: Verdict::LimitExceeded,
                    witness: None,
                    stats,
                });
            }
            let (out, _) = act_streaming(aut, slp, &u)?;
            if out != u {
                stats.explored = examined;
                return Ok(Decision {
                    verdict: Verdict::NotIdentity,
                    witness: Some(u),
                    stats,
                });
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
        stats.verified_depth = len;
    }
    stats.explored = examined;
    Ok(Decision {
        verdict: Verdict::LimitExceeded,
        witness: None,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::adding_machine;

    fn slp(aut: &MealyAutomaton, rules: &[(&str, &str)], start: &str) -> Slp {
        let r: Vec<(String, String)> = rules
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        Slp::parse(aut, &r, start).unwrap()
    }

    #[test]
    fn expand_small() {
        let aut = adding_machine();
        let s = slp(&aut, &[("S", "A A"), ("A", "q")], "S");
        assert_eq!(aut.format_sequence(&s.expand(10).unwrap()), "q,q");
        assert_eq!(s.expanded_length(), BigUint::from(2u32));
        let inv = s.invert();
        assert_eq!(inv.rules()[0].name, "S^-1");
        assert_eq!(aut.format_sequence(&inv.expand(10).unwrap()), "q^-1,q^-1");
    }

    #[test]
    fn cycles_and_guard() {
        let aut = adding_machine();
        let r = vec![
            ("S".to_string(), "T".to_string()),
            ("T".to_string(), "S q".to_string()),
        ];
        assert!(matches!(
            Slp::parse(&aut, &r, "S"),
            Err(Error::CyclicGrammar(_))
        ));
        let s = slp(&aut, &[("S", "A A"), ("A", "B B"), ("B", "q q")], "S");
        assert!(matches!(s.expand(7), Err(Error::GuardExceeded { .. })));
        assert_eq!(s.expand(8).unwrap().len(), 8);
    }

    #[test]
    fn variable_names_must_not_be_states() {
        let aut = adding_machine();
        let r = vec![("q".to_string(), "q".to_string())];
        assert!(Slp::parse(&aut, &r, "q").is_err());
    }

    #[test]
    fn streaming_on_adding_machine() {
        let aut = adding_machine();
        let s = slp(&aut, &[("S", "Q Q Q"), ("Q", "q")], "S");
        let (out, summary) = act_streaming(&aut, &s, &[0, 0, 0]).unwrap();
        assert_eq!(out, vec![1, 1, 0]);
        assert_eq!(summary.length, BigUint::from(3u32));
        let s = slp(&aut, &[("S", "q")], "S");
        assert_eq!(
            act_streaming(&aut, &s, &[0, 0, 0]).unwrap().0,
            vec![1, 0, 0]
        );
    }
}
