//! Deterministic single-tape machines, their normalization to a cellwise rule
//! `τ: Γ³ → Γ`, and two simulators: one over `τ`, one direct.
//!
//! A configuration is a word of length `s` over `Γ` holding exactly one state
//! symbol, which sits immediately left of the head cell. Cells outside the word
//! read as blank.

use std::fmt;

use num_bigint::BigUint;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    N,
    R,
}

impl Move {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "L" => Ok(Move::L),
            "N" => Ok(Move::N),
            "R" => Ok(Move::R),
            _ => Err(Error::Parse(format!("unknown move `{s}`"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Move::L => "L",
            Move::N => "N",
            Move::R => "R",
        }
    }
}

/// Configuration length as a function of the input length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceBound {
    Constant(u64),
    /// `c₀ + c₁ n + c₂ n² + …`
    Polynomial(Vec<u64>),
    /// `n + 1 + 2^k`
    TestMode {
        k: u32,
    },
    /// `n + 1 + 2^(2 n^e)`
    Exponential {
        e: u32,
    },
}

impl SpaceBound {
    pub fn eval_big(&self, n: u64) -> BigUint {
        match self {
            SpaceBound::Constant(c) => BigUint::from(*c),
            SpaceBound::Polynomial(cs) => cs
                .iter()
                .rev()
                .fold(BigUint::from(0u32), |acc, &c| acc * n + c),
            SpaceBound::TestMode { k } => {
                BigUint::from(n + 1) + (BigUint::from(1u32) << *k as usize)
            }
            SpaceBound::Exponential { e } => {
                let exp = 2 * (n as u128).pow(*e);
                BigUint::from(n + 1) + (BigUint::from(1u32) << exp as usize)
            }
        }
    }

    pub fn eval(&self, n: u64) -> Result<usize> {
        let v = self.eval_big(n);
        usize::try_from(&v)
            .map_err(|_| Error::Precondition(format!("space bound {v} does not fit in memory")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rule {
    pub state: usize,
    pub read: usize,
    pub next: usize,
    pub write: usize,
    pub mv: Move,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub name: String,
    pub states: Vec<String>,
    pub tape: Vec<String>,
    pub blank: usize,
    pub input: Vec<usize>,
    pub initial: usize,
    pub accepting: Vec<bool>,
    pub rules: Vec<Rule>,
    pub space: SpaceBound,
    table: FxHashMap<(usize, usize), (usize, usize, Move)>,
}

/// A transition by names: `(state, read, next, write, move)`.
pub type NamedRule<'a> = (&'a str, &'a str, &'a str, &'a str, Move);

impl TuringMachine {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        states: &[&str],
        tape: &[&str],
        blank: &str,
        input: &[&str],
        initial: &str,
        accepting: &[&str],
        rules: &[NamedRule<'_>],
        space: SpaceBound,
    ) -> Result<Self> {
        let owned = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let rules: Vec<(String, String, String, String, Move)> = rules
            .iter()
            .map(|r| (r.0.into(), r.1.into(), r.2.into(), r.3.into(), r.4))
            .collect();
        Self::from_names(
            name,
            owned(states),
            owned(tape),
            blank,
            &owned(input),
            initial,
            &owned(accepting),
            &rules,
            space,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_names(
        name: &str,
        states: Vec<String>,
        tape: Vec<String>,
        blank: &str,
        input: &[String],
        initial: &str,
        accepting: &[String],
        rules: &[(String, String, String, String, Move)],
        space: SpaceBound,
    ) -> Result<Self> {
        let bad = |m: String| Error::InvalidMachine(m);
        let si: FxHashMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let ti: FxHashMap<&str, usize> = tape
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        if si.len() != states.len() || ti.len() != tape.len() {
            return Err(bad("duplicate state or tape symbol".into()));
        }
        if let Some(s) = states.iter().find(|s| ti.contains_key(s.as_str())) {
            return Err(bad(format!("`{s}` is both a state and a tape symbol")));
        }
        let st = |n: &str| {
            si.get(n)
                .copied()
                .ok_or_else(|| bad(format!("unknown state `{n}`")))
        };
        let sy = |n: &str| {
            ti.get(n)
                .copied()
                .ok_or_else(|| bad(format!("unknown tape symbol `{n}`")))
        };
        let blank = sy(blank)?;
        let input = input.iter().map(|a| sy(a)).collect::<Result<Vec<_>>>()?;
        if input.contains(&blank) {
            return Err(bad("the blank is not an input symbol".into()));
        }
        let mut acc = vec![false; states.len()];
        for a in accepting {
            acc[st(a)?] = true;
        }
        let mut table = FxHashMap::default();
        let mut parsed = Vec::new();
        for (p, c, q, d, mv) in rules {
            let r = Rule {
                state: st(p)?,
                read: sy(c)?,
                next: st(q)?,
                write: sy(d)?,
                mv: *mv,
            };
            if table
                .insert((r.state, r.read), (r.next, r.write, r.mv))
                .is_some()
            {
                return Err(bad(format!("two rules for ({p}, {c})")));
            }
            parsed.push(r);
        }
        Ok(TuringMachine {
            name: name.to_string(),
            initial: st(initial)?,
            states,
            tape,
            blank,
            input,
            accepting: acc,
            rules: parsed,
            space,
            table,
        })
    }

    pub fn rule(&self, state: usize, read: usize) -> Option<(usize, usize, Move)> {
        self.table.get(&(state, read)).copied()
    }

    pub fn tape_symbol(&self, name: &str) -> Result<usize> {
        self.tape
            .iter()
            .position(|t| t == name)
            .ok_or_else(|| Error::InvalidMachine(format!("unknown tape symbol `{name}`")))
    }

    /// Parses an input word: comma separated, or one character per symbol.
    pub fn parse_input(&self, text: &str) -> Result<Vec<usize>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        let parts: Vec<String> = if text.contains(',') {
            text.split(',').map(|s| s.trim().to_string()).collect()
        } else if self.tape_symbol(text).is_ok() {
            vec![text.to_string()]
        } else {
            text.chars().map(|c| c.to_string()).collect()
        };
        parts
            .iter()
            .map(|p| {
                let i = self.tape_symbol(p)?;
                if self.input.contains(&i) {
                    Ok(i)
                } else {
                    Err(Error::InvalidMachine(format!(
                        "`{p}` is not an input symbol"
                    )))
                }
            })
            .collect()
    }
}

/// What a symbol of `Γ` stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Tape(usize),
    State(usize),
    /// The intermediate state that moves the head one cell left.
    LeftState(usize),
    Dummy,
}

/// The normalized machine: `Γ`, `τ` and the accepting state symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRule {
    pub symbols: Vec<String>,
    pub kinds: Vec<SymbolKind>,
    pub accepting: Vec<bool>,
    pub blank: u32,
    pub initial: u32,
    /// Image of every window containing a dummy; `None` when there are no dummies.
    pub dead: Option<u32>,
    pub log_size: u32,
    tape_symbols: Vec<u32>,
    table: Vec<u32>,
}

impl LocalRule {
    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    #[inline]
    pub fn tau(&self, l: u32, m: u32, r: u32) -> u32 {
        let g = self.symbols.len();
        self.table[(l as usize * g + m as usize) * g + r as usize]
    }

    pub fn is_state_symbol(&self, g: u32) -> bool {
        matches!(
            self.kinds[g as usize],
            SymbolKind::State(_) | SymbolKind::LeftState(_)
        )
    }

    /// `Γ` index of a machine tape symbol.
    pub fn tape_symbol(&self, t: usize) -> u32 {
        self.tape_symbols[t]
    }

    pub fn symbol(&self, name: &str) -> Result<u32> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .map(|i| i as u32)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    /// `p₀ w ␣^{s-n-1}`.
    pub fn initial_configuration(&self, w: &[usize], s: usize) -> Result<Vec<u32>> {
        if w.len() + 1 > s {
            return Err(Error::Precondition(format!(
                "input of length {} needs s ≥ {}",
                w.len(),
                w.len() + 1
            )));
        }
        let mut c = Vec::with_capacity(s);
        c.push(self.initial);
        c.extend(w.iter().map(|&t| self.tape_symbols[t]));
        c.resize(s, self.blank);
        Ok(c)
    }

    /// One cellwise step with blank boundaries.
    pub fn step(&self, conf: &[u32]) -> Vec<u32> {
        let n = conf.len();
        (0..n)
            .map(|i| {
                let l = if i == 0 { self.blank } else { conf[i - 1] };
                let r = if i + 1 == n { self.blank } else { conf[i + 1] };
                self.tau(l, conf[i], r)
            })
            .collect()
    }

    fn check_configuration(&self, conf: &[u32]) -> Result<()> {
        let states: Vec<usize> = (0..conf.len())
            .filter(|&i| self.is_state_symbol(conf[i]))
            .collect();
        if states.len() != 1 {
            return Err(Error::SpaceViolation(format!(
                "{} state symbols in a configuration",
                states.len()
            )));
        }
        if states[0] + 1 == conf.len() {
            return Err(Error::SpaceViolation(
                "head moved past the last cell".into(),
            ));
        }
        Ok(())
    }

    pub fn is_accepting(&self, conf: &[u32]) -> bool {
        conf.iter().any(|&g| self.accepting[g as usize])
    }

    /// Runs from `p₀ w ␣…` until an accepting configuration appears (accept), a
    /// configuration repeats (reject), or `max_steps` steps were taken (timeout).
    pub fn run(&self, w: &[usize], s: usize, max_steps: usize) -> Result<RunOutcome> {
        let mut conf = self.initial_configuration(w, s)?;
        self.check_configuration(&conf)?;
        let mut seen: FxHashSet<Vec<u32>> = FxHashSet::default();
        let mut tableau = vec![conf.clone()];
        seen.insert(conf.clone());
        let mut steps = 0;
        loop {
            if self.is_accepting(&conf) {
                return Ok(RunOutcome::Accept(tableau));
            }
            if steps == max_steps {
                return Ok(RunOutcome::Timeout);
            }
            let next = self.step(&conf);
            self.check_configuration(&next)?;
            if !seen.insert(next.clone()) {
                return Ok(RunOutcome::Reject);
            }
            tableau.push(next.clone());
            conf = next;
            steps += 1;
        }
    }

    pub fn format_configuration(&self, conf: &[u32]) -> String {
        conf.iter()
            .map(|&g| self.symbols[g as usize].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    /// All configurations from the initial one up to the first accepting one.
    Accept(Vec<Vec<u32>>),
    Reject,
    Timeout,
}

impl fmt::Display for RunOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunOutcome::Accept(t) => write!(f, "accept after {} steps", t.len() - 1),
            RunOutcome::Reject => f.write_str("reject"),
            RunOutcome::Timeout => f.write_str("timeout"),
        }
    }
}

/// Builds `Γ` (tape symbols, states, `q^L` for every left-move target, then
/// dummies up to a power of two) and tabulates `τ`.
pub fn normalize(tm: &TuringMachine) -> Result<LocalRule> {
    let mut symbols = Vec::new();
    let mut kinds = Vec::new();
    for (i, t) in tm.tape.iter().enumerate() {
        symbols.push(t.clone());
        kinds.push(SymbolKind::Tape(i));
    }
    let state_base = symbols.len();
    for (i, p) in tm.states.iter().enumerate() {
        symbols.push(p.clone());
        kinds.push(SymbolKind::State(i));
    }
    let mut left: Vec<Option<u32>> = vec![None; tm.states.len()];
    for r in &tm.rules {
        if r.mv == Move::L && left[r.next].is_none() {
            let name = format!("{}^L", tm.states[r.next]);
            if symbols.contains(&name) {
                return Err(Error::InvalidMachine(format!(
                    "name `{name}` is already taken"
                )));
            }
            left[r.next] = Some(symbols.len() as u32);
            symbols.push(name);
            kinds.push(SymbolKind::LeftState(r.next));
        }
    }
    let real = symbols.len();
    let size = real.next_power_of_two().max(2);
    for i in real..size {
        let mut name = format!("pad{}", i - real);
        while symbols.contains(&name) {
            name.push('\'');
        }
        symbols.push(name);
        kinds.push(SymbolKind::Dummy);
    }
    let dead = (real < size).then_some(real as u32);
    let state_sym = |p: usize| (state_base + p) as u32;
    let tape_sym = |t: usize| t as u32;
    let g = size;
    let mut table = vec![0u32; g * g * g];
    for l in 0..g {
        for m in 0..g {
            for r in 0..g {
                let (kl, km, kr) = (kinds[l], kinds[m], kinds[r]);
                let v = if [kl, km, kr].contains(&SymbolKind::Dummy) {
                    dead.unwrap()
                } else {
                    match (kl, km, kr) {
                        (_, SymbolKind::State(p), SymbolKind::Tape(c)) => match tm.rule(p, c) {
                            Some((q, _, Move::N)) => state_sym(q),
                            Some((_, d, Move::R)) => tape_sym(d),
                            Some((q, _, Move::L)) => left[q].unwrap(),
                            None => m as u32,
                        },
                        (_, SymbolKind::LeftState(_), _) => l as u32,
                        (_, _, SymbolKind::LeftState(q)) => state_sym(q),
                        (SymbolKind::State(p), SymbolKind::Tape(c), _) => match tm.rule(p, c) {
                            Some((_, d, Move::N | Move::L)) => tape_sym(d),
                            Some((q, _, Move::R)) => state_sym(q),
                            None => m as u32,
                        },
                        _ => m as u32,
                    }
                };
                table[(l * g + m) * g + r] = v;
            }
        }
    }
    let mut accepting = vec![false; g];
    for (p, &a) in tm.accepting.iter().enumerate() {
        accepting[state_sym(p) as usize] = a;
    }
    Ok(LocalRule {
        symbols,
        kinds,
        accepting,
        blank: tape_sym(tm.blank),
        initial: state_sym(tm.initial),
        dead,
        log_size: g.trailing_zeros(),
        tape_symbols: (0..tm.tape.len() as u32).collect(),
        table,
    })
}

/// A configuration of the direct simulator: `tape` has `s - 1` cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirectConfig {
    pub state: usize,
    pub head: usize,
    pub tape: Vec<usize>,
}

impl DirectConfig {
    /// The same configuration written as a word over `Γ` of `rule`.
    pub fn to_word(&self, rule: &LocalRule) -> Vec<u32> {
        let mut w: Vec<u32> = self.tape[..self.head]
            .iter()
            .map(|&t| rule.tape_symbol(t))
            .collect();
        w.push(state_index(rule, self.state));
        w.extend(self.tape[self.head..].iter().map(|&t| rule.tape_symbol(t)));
        w
    }
}

fn state_index(rule: &LocalRule, p: usize) -> u32 {
    rule.kinds
        .iter()
        .position(|k| *k == SymbolKind::State(p))
        .expect("state symbol") as u32
}

/// Steps the machine itself. Returns every configuration visited and the outcome,
/// with the same accept/reject/timeout conventions as [`LocalRule::run`].
pub fn simulate(
    tm: &TuringMachine,
    w: &[usize],
    s: usize,
    max_steps: usize,
) -> Result<(Vec<DirectConfig>, RunOutcome)> {
    if w.len() + 1 > s {
        return Err(Error::Precondition(
            "input too long for the space bound".into(),
        ));
    }
    if s < 2 {
        return Err(Error::SpaceViolation("no cell for the head to read".into()));
    }
    let mut tape = w.to_vec();
    tape.resize(s - 1, tm.blank);
    let mut conf = DirectConfig {
        state: tm.initial,
        head: 0,
        tape,
    };
    let mut trace = vec![conf.clone()];
    let mut seen = FxHashSet::default();
    seen.insert(conf.clone());
    let mut steps = 0;
    loop {
        if tm.accepting[conf.state] {
            return Ok((trace, RunOutcome::Accept(Vec::new())));
        }
        if steps == max_steps {
            return Ok((trace, RunOutcome::Timeout));
        }
        let Some((q, d, mv)) = tm.rule(conf.state, conf.tape[conf.head]) else {
            return Ok((trace, RunOutcome::Reject));
        };
        let mut next = conf.clone();
        next.state = q;
        next.tape[conf.head] = d;
        match mv {
            Move::N => {}
            Move::R => {
                if conf.head + 1 >= conf.tape.len() {
                    return Err(Error::SpaceViolation("right move off the tape".into()));
                }
                next.head += 1;
            }
            Move::L => {
                if conf.head == 0 {
                    return Err(Error::SpaceViolation("left move off the tape".into()));
                }
                next.head -= 1;
            }
        }
        if !seen.insert(next.clone()) {
            return Ok((trace, RunOutcome::Reject));
        }
        trace.push(next.clone());
        conf = next;
        steps += 1;
    }
}

pub const MACHINE_NAMES: &[&str] = &["accept-empty", "accept-nonempty", "parity", "sweep"];

/// Small machines over `{_, x}` (plus `y` for `sweep`) used as fixtures.
pub fn fixture_machine(name: &str, space: SpaceBound) -> Result<TuringMachine> {
    use Move::*;
    match name {
        // Accepts exactly the empty input.
        "accept-empty" => TuringMachine::new(
            name,
            &["p0", "acc"],
            &["_", "x"],
            "_",
            &["x"],
            "p0",
            &["acc"],
            &[("p0", "_", "acc", "_", N)],
            space,
        ),
        // Accepts exactly the non-empty inputs.
        "accept-nonempty" => TuringMachine::new(
            name,
            &["p0", "acc"],
            &["_", "x"],
            "_",
            &["x"],
            "p0",
            &["acc"],
            &[("p0", "x", "acc", "x", N)],
            space,
        ),
        // Accepts inputs with an even number of x.
        "parity" => TuringMachine::new(
            name,
            &["even", "odd", "acc"],
            &["_", "x"],
            "_",
            &["x"],
            "even",
            &["acc"],
            &[
                ("even", "x", "odd", "x", R),
                ("odd", "x", "even", "x", R),
                ("even", "_", "acc", "_", N),
            ],
            space,
        ),
        // Marks the first cell, walks right to the first blank, walks back left
        // to the mark and accepts. Accepts everything; exercises left moves.
        "sweep" => TuringMachine::new(
            name,
            &["start", "right", "left", "acc"],
            &["_", "x", "y"],
            "_",
            &["x"],
            "start",
            &["acc"],
            &[
                ("start", "_", "acc", "_", N),
                ("start", "x", "right", "y", R),
                ("right", "x", "right", "x", R),
                ("right", "_", "left", "_", L),
                ("left", "x", "left", "x", L),
                ("left", "y", "acc", "y", N),
            ],
            space,
        ),
        other => Err(Error::InvalidMachine(format!(
            "no fixture machine named `{other}`"
        ))),
    }
}
