//! The compressed variant of the Turing-machine reduction.
//!
//! With space `s = n + 1 + 2^k`, the entries `c_{n+1} … c_{s-1}` and
//! `q_{n+1} … q_{s-1}` are each replaced by one twisted commutator of depth `k`
//! with `γ = check_id`, and `c'` reuses the power chain of `γ`, so the grammar
//! has `O(n + k)` variables while the word it generates has length exponential
//! in `k`. The backend is fixed to the Aleshin automaton with the square state
//! `b^-1·a` as its single leaf.

use num_bigint::BigUint;

use crate::automaton::{MealyAutomaton, SignedState, StateSequence, Word};
use crate::backends::aleshin_backend;
use crate::commutator::{balanced, twisted, CommutatorSpec};
use crate::decide::{
    bounded_triviality_stats, is_identity_with, Budget, Canonical, Triviality, Verdict,
};
use crate::error::{Error, Result};
use crate::slp::{act_streaming, act_streaming_visit, terms, Slp, SlpBuilder, Sym};
use crate::tm_reduction::{default_block_length, level_states, Assembly};
use crate::turing::{LocalRule, RunOutcome, TuringMachine};

pub const LEAF_STATE: &str = "b^-1·a";

/// How the block size `2^k` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpParam {
    /// `2^k` directly.
    Test { k: u32 },
    /// `2^{2n^e}` with `n = |w|`.
    True { e: u32 },
}

impl ExpParam {
    pub fn exponent(self, n: usize) -> Result<u32> {
        let k = match self {
            ExpParam::Test { k } => k as u64,
            ExpParam::True { e } => 2 * (n as u64).pow(e),
        };
        if k > 40 {
            return Err(Error::Precondition(format!(
                "block exponent {k} is too large to index positions"
            )));
        }
        Ok(k as u32)
    }
}

/// One entry of the outer commutator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetEntry {
    Literal(StateSequence),
    /// `γ^{-2^k} core γ^{2^k}`.
    Shifted(StateSequence),
    /// `B^γ(seed, 2^k)`.
    Twisted(StateSequence),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedProvenance {
    pub machine: String,
    pub input: Vec<String>,
    pub mode: ExpParam,
    pub k: u32,
    pub space: u64,
    pub entries_raw: usize,
    pub entries: usize,
}

#[derive(Clone, Debug)]
pub struct CompressedInstance {
    pub automaton: MealyAutomaton,
    pub slp: Slp,
    pub provenance: CompressedProvenance,
    pub assembly: Assembly,
    /// Outer entries, `p_0` first, unpadded.
    pub target: Vec<TargetEntry>,
    /// `check_id` of the copy.
    pub gamma: StateSequence,
    pub leaf: u32,
}

pub fn build_compressed(
    tm: &TuringMachine,
    rule: &LocalRule,
    w: &[usize],
    param: ExpParam,
) -> Result<CompressedInstance> {
    let n = w.len();
    let k = param.exponent(n)?;
    let space = n as u64 + 1 + (1u64 << k);
    let backend = aleshin_backend(true);
    let leaf = backend.automaton.state(LEAF_STATE)?;
    let entries_raw = 2 * n + 7;
    let d = entries_raw.next_power_of_two();
    let levels = d.trailing_zeros().max(k);
    let assembly = Assembly::build(
        rule,
        &backend,
        &[leaf],
        &level_states(&backend, levels),
        &[],
    )?;
    let t = &assembly.tmode;
    let lift = |seq: &StateSequence| assembly.lift(leaf, seq);
    let ni = n as i64;

    let mut prefix = vec![rule.initial];
    prefix.extend(w.iter().map(|&x| rule.tape_symbol(x)));

    let mut target = vec![TargetEntry::Literal(lift(&t.single(t.s))?)];
    let check_r = t.single(t.check_r);
    for i in 0..=ni {
        target.push(TargetEntry::Literal(lift(&t.shifted(i + 1, &check_r, i))?));
    }
    target.push(TargetEntry::Twisted(lift(&t.shifted(
        ni + 2,
        &check_r,
        ni + 1,
    ))?));
    target.push(TargetEntry::Shifted(lift(&t.shifted(
        ni + 1,
        &t.single(t.c),
        ni + 1,
    ))?));
    for (i, &g) in prefix.iter().enumerate() {
        let i = i as i64;
        target.push(TargetEntry::Literal(lift(&t.shifted(
            i,
            &t.single(t.q_gamma[g as usize]),
            i,
        ))?));
    }
    let q_blank = t.single(t.q_gamma[rule.blank as usize]);
    target.push(TargetEntry::Twisted(lift(&t.shifted(
        ni + 1,
        &q_blank,
        ni + 1,
    ))?));
    target.push(TargetEntry::Literal(lift(&t.single(t.f))?));
    debug_assert_eq!(target.len(), entries_raw);

    let gamma = lift(&t.single(t.check_id))?;
    let (alpha0, beta0) = (assembly.alpha0(), assembly.beta0());
    let mut b = SlpBuilder::new();
    let chain = b.power_chain("M", &terms(&gamma), k)?;
    let top = chain[k as usize];
    let mut bodies: Vec<Vec<Sym>> = Vec::with_capacity(d);
    let mut blocks = 0;
    for e in &target {
        bodies.push(match e {
            TargetEntry::Literal(seq) => terms(seq),
            TargetEntry::Shifted(core) => {
                let mut v = vec![SlpBuilder::var_inv(top)];
                v.extend(terms(core));
                v.push(SlpBuilder::var(top));
                v
            }
            TargetEntry::Twisted(seed) => {
                let name = if blocks == 0 { "C" } else { "Q" };
                blocks += 1;
                vec![SlpBuilder::var(b.twisted(
                    name,
                    terms(seed),
                    &chain,
                    k,
                    &alpha0,
                    &beta0,
                )?)]
            }
        });
    }
    let last = bodies[0].clone();
    bodies.resize(d, last);
    let start = b.balanced("B", bodies, &alpha0, &beta0)?;
    let start = b.name(start).to_string();
    let slp = b.build(&start)?;
    let provenance = CompressedProvenance {
        machine: tm.name.clone(),
        input: w.iter().map(|&x| tm.tape[x].clone()).collect(),
        mode: param,
        k,
        space,
        entries_raw,
        entries: d,
    };
    Ok(CompressedInstance {
        automaton: assembly.automaton.clone(),
        slp,
        provenance,
        assembly,
        target,
        gamma,
        leaf,
    })
}

impl CompressedInstance {
    fn block(&self) -> u64 {
        1u64 << self.provenance.k
    }

    fn padded<T: Clone>(&self, mut v: Vec<T>) -> Vec<T> {
        let first = v[0].clone();
        v.resize(self.provenance.entries, first);
        v
    }

    /// The outer commutator with every block built by direct recursion.
    pub fn direct_target(&self) -> Result<StateSequence> {
        let (alpha0, beta0) = (self.assembly.alpha0(), self.assembly.beta0());
        let m = self.block() as i64;
        let entries = self
            .target
            .iter()
            .map(|e| match e {
                TargetEntry::Literal(seq) => Ok(seq.clone()),
                TargetEntry::Shifted(core) => {
                    let mut v = self.gamma.pow(-m);
                    v.push_seq(core);
                    v.push_seq(&self.gamma.pow(m));
                    Ok(v)
                }
                TargetEntry::Twisted(seed) => {
                    twisted(seed, self.block(), &self.gamma, &alpha0, &beta0)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        balanced(&CommutatorSpec {
            entries: self.padded(entries),
            alpha: alpha0,
            beta: beta0,
        })
    }

    /// The entries a twisted block stands for: `γ^{-j} seed γ^j` for `j < 2^k`,
    /// `p_0` first.
    pub fn block_entries(&self, seed: &StateSequence) -> Vec<StateSequence> {
        (0..self.block() as i64)
            .map(|j| {
                let mut v = self.gamma.pow(-j);
                v.push_seq(seed);
                v.push_seq(&self.gamma.pow(j));
                v
            })
            .collect()
    }

    /// `B_{β₀,α₀}` over [`Self::block_entries`].
    pub fn explicit_block(&self, seed: &StateSequence) -> Result<StateSequence> {
        balanced(&CommutatorSpec {
            entries: self.block_entries(seed),
            alpha: self.assembly.alpha0(),
            beta: self.assembly.beta0(),
        })
    }

    /// Encoded `u$` of an accepting run with this instance's space bound.
    pub fn witness_word(
        &self,
        rule: &LocalRule,
        w: &[usize],
        max_steps: usize,
    ) -> Result<Vec<u32>> {
        let s = self.provenance.space as usize;
        match rule.run(w, s, max_steps)? {
            RunOutcome::Accept(configs) => Ok(self
                .assembly
                .encode_tableau(&configs, default_block_length(s))),
            other => Err(Error::Precondition(format!(
                "no accepting computation ({other})"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeskOutcome {
    /// The generated sequence moves this word.
    Moved(Word),
    /// Every word up to the bound is fixed.
    FixedAll { bound: usize, explored: usize },
    /// The check could not be completed.
    Inconclusive(String),
}

/// Bounded check of the reduction's claim on one instance.
///
/// Accepting: the residual after the encoded tableau is decided in the backend
/// and the mover it yields is appended; the result is re-checked by streaming.
/// Rejecting: the sequence is expanded and every word up to `bound` is checked
/// through the residual closure; a few encoded configurations are cross-checked
/// by streaming.
pub fn verify_desk_scale(
    inst: &CompressedInstance,
    rule: &LocalRule,
    w: &[usize],
    accepting: bool,
    bound: usize,
    guard: u64,
) -> Result<DeskOutcome> {
    let aut = &inst.automaton;
    let s = inst.provenance.space as usize;
    if accepting {
        let u = inst.witness_word(rule, w, 10_000)?;
        let mut rev = Vec::new();
        let out = act_streaming_visit(aut, &inst.slp, &u, &mut |st: SignedState| {
            if !aut.is_identity_state(st.state) {
                rev.push(st);
            }
        })?;
        if out != u {
            return Ok(DeskOutcome::Moved(u));
        }
        rev.reverse();
        let residual = StateSequence::new(rev).free_reduce();
        let d = is_identity_with(aut, &residual, Budget::default(), Canonical::Reduced)?;
        let Some(v) = d.witness.filter(|_| d.verdict == Verdict::NotIdentity) else {
            return Ok(DeskOutcome::Inconclusive(format!(
                "residual after the witness: {}",
                d.verdict.as_str()
            )));
        };
        let mut uv = u;
        uv.extend(v);
        let (out, _) = act_streaming(aut, &inst.slp, &uv)?;
        return Ok(if out != uv {
            DeskOutcome::Moved(uv)
        } else {
            DeskOutcome::Inconclusive("streamed action fixes the candidate".into())
        });
    }
    if matches!(rule.run(w, s, 10_000)?, RunOutcome::Accept(_)) {
        return Err(Error::Precondition("the machine accepts this input".into()));
    }
    let len = inst.slp.expanded_length();
    if len > BigUint::from(guard) {
        return Ok(DeskOutcome::Inconclusive(format!(
            "expansion of length {len} exceeds the guard"
        )));
    }
    let seq = inst.slp.expand(guard)?;
    let (t, stats) = bounded_triviality_stats(aut, &seq, bound, Canonical::Reduced)?;
    if let Triviality::Moved(u) = t {
        return Ok(DeskOutcome::Moved(u));
    }
    let init = rule.initial_configuration(w, s)?;
    let ell = default_block_length(s);
    let samples = [
        inst.assembly
            .encode_tableau(std::slice::from_ref(&init), ell),
        inst.assembly
            .encode_tableau(&[init.clone(), rule.step(&init)], ell),
    ];
    for u in samples {
        let (out, _) = act_streaming(aut, &inst.slp, &u)?;
        if out != u {
            return Ok(DeskOutcome::Moved(u));
        }
    }
    Ok(DeskOutcome::FixedAll {
        bound,
        explored: stats.explored,
    })
}
