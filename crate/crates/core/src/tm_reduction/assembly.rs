//! Gluing the encoded TM-mode automaton onto a group backend.
//!
//! For every backend state `r` that occurs in a leaf `b(D, i)` there is a copy
//! of the encoded automaton whose placeholder `r` is the backend state itself,
//! and for every state in `α(d)`, `β(d)` a copy of the `r0` gadget. After an
//! encoded accepting tableau `u$`, each entry `b'_i` has residual `b(D, i)` and
//! the conjugators `α₀`, `β₀` turn into `α`, `β`, so `q` becomes the backend's
//! non-trivial commutator.

use std::collections::BTreeSet;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::automaton::{AutomatonBuilder, MealyAutomaton, SignedState, StateSequence, Word};
use crate::backends::BackendBundle;
use crate::commutator::{balanced, log2_exact, CommutatorSpec, LevelMap};
use crate::decide::{is_identity_with, Budget, Canonical, Verdict};
use crate::error::{Error, Result};
use crate::turing::{LocalRule, RunOutcome, TuringMachine};

use super::encoding::{build_r0, encode_binary, CodeTable};
use super::tm_mode::{
    build_tm_mode, default_block_length, pad_entries, tableau_word, tm_mode_sequences, TmMode,
    DOLLAR,
};

/// `1 + R(3Γ³ + 10Γ² + 20Γ + 52)`.
pub fn full_size(generators: usize, gamma: usize) -> usize {
    let g = gamma;
    1 + generators * (3 * g * g * g + 10 * g * g + 20 * g + 52)
}

/// The combined automaton and the maps into its copies.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub automaton: MealyAutomaton,
    pub tmode: TmMode,
    pub table: CodeTable,
    pub backend: BackendBundle,
    pub b0: u32,
    pub b1: u32,
    /// Backend state ↦ (TM-mode state ↦ state of its copy).
    copies: FxHashMap<u32, Vec<u32>>,
    /// Backend state ↦ `r0` of its gadget copy.
    gadgets: Arc<FxHashMap<u32, u32>>,
}

/// Imports every state of `part` except the placeholder `r` and `id`, under
/// `tag/`, with `r` and `id` redirected to `r_target` and `id_target`.
fn import_copy(
    b: &mut AutomatonBuilder,
    part: &MealyAutomaton,
    tag: &str,
    r_target: u32,
    id_target: u32,
) -> Result<Vec<u32>> {
    let map: Vec<u32> = part
        .state_names()
        .iter()
        .map(|n| match n.as_str() {
            "r" => Ok(r_target),
            "id" => Ok(id_target),
            other => b.add_state(&format!("{tag}/{other}")),
        })
        .collect::<Result<_>>()?;
    for s in 0..part.num_states() as u32 {
        if matches!(part.state_name(s), "r" | "id") {
            continue;
        }
        for a in 0..part.num_letters() as u32 {
            let (o, t) = part.transition(s, a);
            b.set(map[s as usize], a, o, map[t as usize])?;
        }
    }
    Ok(map)
}

impl Assembly {
    /// Builds `𝒯` with TM copies for `tm_for` and gadget copies for `gadgets_for`
    /// (backend state indices). `extra` letters are added to the backend first.
    pub fn build(
        rule: &LocalRule,
        backend: &BackendBundle,
        tm_for: &[u32],
        gadgets_for: &[u32],
        extra: &[String],
    ) -> Result<Self> {
        let backend = backend.with_extra_letters(extra)?;
        let base = &backend.automaton;
        let sigma = base.alphabet().clone();
        if sigma.len() < 2 {
            return Err(Error::Precondition(
                "the backend alphabet needs two letters".into(),
            ));
        }
        let (b0, b1) = (0u32, 1u32);
        let tmode = build_tm_mode(rule)?;
        let table = CodeTable::for_rule(rule);
        let tm2 = encode_binary(
            &tmode.automaton,
            &[tmode.r, tmode.id],
            &table,
            &sigma,
            b0,
            b1,
            "tm2",
        )?;
        let r0 = build_r0(rule)?;
        let (r0_r, r0_id) = (r0.state("r")?, r0.state("id")?);
        let r0e = encode_binary(&r0, &[r0_r, r0_id], &table, &sigma, b0, b1, "r0")?;

        let mut b = AutomatonBuilder::new(sigma);
        let map = b.import(base, |s| s.to_string())?;
        debug_assert!(map.iter().enumerate().all(|(i, &m)| i as u32 == m));
        let id = b.identity_state("id")?;

        let mut copies = FxHashMap::default();
        let tm_set: BTreeSet<u32> = tm_for.iter().copied().collect();
        for &r in &tm_set {
            if base.is_identity_state(r) && base.state_name(r) == "id" {
                continue;
            }
            let cm = import_copy(&mut b, &tm2, &format!("T2[{}]", base.state_name(r)), r, id)?;
            let to_global = tmode
                .automaton
                .state_names()
                .iter()
                .map(|n| tm2.state(n).map(|i| cm[i as usize]))
                .collect::<Result<Vec<_>>>()?;
            copies.insert(r, to_global);
        }
        let mut gadgets = FxHashMap::default();
        let g_set: BTreeSet<u32> = gadgets_for.iter().copied().collect();
        for &r in &g_set {
            let cm = import_copy(&mut b, &r0e, &format!("R0[{}]", base.state_name(r)), r, id)?;
            gadgets.insert(r, cm[r0e.state("r0")? as usize]);
        }
        let automaton = b.build(&format!("tm-reduction/{}", backend.name))?;
        Ok(Assembly {
            automaton,
            tmode,
            table,
            backend,
            b0,
            b1,
            copies,
            gadgets: Arc::new(gadgets),
        })
    }

    /// Backend states with a TM copy, ascending.
    pub fn tm_copies(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.copies.keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// `seq` (over the TM-mode automaton) moved into the copy for `r`.
    pub fn lift(&self, r: u32, seq: &StateSequence) -> Result<StateSequence> {
        let m = self.copies.get(&r).ok_or_else(|| {
            Error::Precondition(format!(
                "no TM copy for `{}`",
                self.backend.automaton.state_name(r)
            ))
        })?;
        Ok(StateSequence::new(
            seq.0
                .iter()
                .map(|s| SignedState {
                    state: m[s.state as usize],
                    inverse: s.inverse,
                })
                .collect(),
        ))
    }

    /// `p_{r_ℓ} … p_{r_1}` for `leaf = r_ℓ … r_1`; an inverted `r` contributes
    /// the inverted copy.
    pub fn lift_through(&self, leaf: &StateSequence, p: &StateSequence) -> Result<StateSequence> {
        let mut out = StateSequence::empty();
        for e in &leaf.0 {
            let l = self.lift(e.state, p)?;
            out.push_seq(&if e.inverse { l.inverse() } else { l });
        }
        Ok(out)
    }

    fn gadget_map(&self, tag: &str, m: &LevelMap) -> LevelMap {
        let g = self.gadgets.clone();
        m.map(tag, move |seq| {
            StateSequence::new(
                seq.0
                    .iter()
                    .map(|s| SignedState {
                        state: *g
                            .get(&s.state)
                            .expect("level map state without a gadget copy"),
                        inverse: s.inverse,
                    })
                    .collect(),
            )
        })
    }

    /// `α` with every state replaced by its gadget; only levels whose states got
    /// a gadget copy may be evaluated.
    pub fn alpha0(&self) -> LevelMap {
        self.gadget_map("alpha0", &self.backend.alpha)
    }

    pub fn beta0(&self) -> LevelMap {
        self.gadget_map("beta0", &self.backend.beta)
    }

    /// The encoded `u$` for a tableau, over `Σ`.
    pub fn encode_tableau(&self, configs: &[Vec<u32>], ell: usize) -> Vec<u32> {
        let mut u = tableau_word(configs, ell);
        u.push(DOLLAR);
        self.table.encode_letters(&u, self.b0, self.b1)
    }

    /// Shortest word moved by `B_{β,α}[b(D, D-1) … b(D, 0)]` in the backend.
    pub fn backend_mover(&self, d_entries: u64, budget: Budget) -> Result<Option<Word>> {
        let seq = self.backend.leaf_commutator(d_entries)?;
        let d = is_identity_with(&self.backend.automaton, &seq, budget, Canonical::Reduced)?;
        Ok(match d.verdict {
            Verdict::NotIdentity => d.witness,
            _ => None,
        })
    }
}

/// States occurring in `α(d)`, `β(d)` for `d < levels`.
pub fn level_states(backend: &BackendBundle, levels: u32) -> Vec<u32> {
    let mut set = BTreeSet::new();
    for d in 0..levels {
        for s in backend
            .alpha
            .eval(d)
            .0
            .iter()
            .chain(backend.beta.eval(d).0.iter())
        {
            set.insert(s.state);
        }
    }
    set.into_iter().collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Build copies for every backend state, not only the ones used.
    pub full_fidelity: bool,
    /// Inert letters added to `Σ`.
    pub extra_letters: Vec<String>,
    /// Zero-block length; `⌈log₂ s⌉ + 1` when unset.
    pub block_length: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub machine: String,
    pub input: Vec<String>,
    pub space: usize,
    pub entries_raw: usize,
    pub entries: usize,
    pub backend: String,
    pub block_length: usize,
    pub full_fidelity: bool,
    pub extra_letters: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct HardInstance {
    pub automaton: MealyAutomaton,
    pub sequence: StateSequence,
    pub provenance: Provenance,
    /// `b'_i`, padded.
    pub entries: Vec<StateSequence>,
    pub assembly: Assembly,
}

impl HardInstance {
    /// Encoded `u$` for an accepting run; refuses anything else.
    pub fn witness_word(&self, outcome: &RunOutcome) -> Result<Vec<u32>> {
        match outcome {
            RunOutcome::Accept(configs) => Ok(self
                .assembly
                .encode_tableau(configs, self.provenance.block_length)),
            other => Err(Error::Precondition(format!(
                "no accepting computation ({other})"
            ))),
        }
    }
}

/// `q = B_{β₀,α₀}[b'_{D-1}, …, b'_0]` for `tm` on `w` with space `s`.
pub fn assemble(
    tm: &TuringMachine,
    rule: &LocalRule,
    backend: &BackendBundle,
    w: &[usize],
    s: usize,
    opts: &AssemblyOptions,
) -> Result<HardInstance> {
    if !backend.has_leaves() {
        return Err(Error::Precondition(format!(
            "backend `{}` has no leaves",
            backend.name
        )));
    }
    let entries_raw = 3 + 2 * s;
    let d = entries_raw.next_power_of_two() as u64;
    let levels = log2_exact(d)?;
    let leaves = (0..d)
        .map(|i| backend.leaf(d, i))
        .collect::<Result<Vec<_>>>()?;
    let (tm_for, gadgets_for): (Vec<u32>, Vec<u32>) = if opts.full_fidelity {
        let aut = &backend.automaton;
        let all: Vec<u32> = (0..aut.num_states() as u32)
            .filter(|&x| !(aut.state_name(x) == "id" && aut.is_identity_state(x)))
            .collect();
        (all.clone(), all)
    } else {
        let used: BTreeSet<u32> = leaves
            .iter()
            .flat_map(|l| l.0.iter().map(|e| e.state))
            .collect();
        (used.into_iter().collect(), level_states(backend, levels))
    };
    let assembly = Assembly::build(rule, backend, &tm_for, &gadgets_for, &opts.extra_letters)?;
    let raw = tm_mode_sequences(&assembly.tmode, rule, w, s)?;
    let padded = pad_entries(raw);
    let entries = leaves
        .iter()
        .zip(&padded)
        .map(|(leaf, p)| assembly.lift_through(leaf, p))
        .collect::<Result<Vec<_>>>()?;
    let sequence = balanced(&CommutatorSpec {
        entries: entries.clone(),
        alpha: assembly.alpha0(),
        beta: assembly.beta0(),
    })?;
    let provenance = Provenance {
        machine: tm.name.clone(),
        input: w.iter().map(|&t| tm.tape[t].clone()).collect(),
        space: s,
        entries_raw,
        entries: d as usize,
        backend: backend.name.clone(),
        block_length: opts.block_length.unwrap_or_else(|| default_block_length(s)),
        full_fidelity: opts.full_fidelity,
        extra_letters: opts.extra_letters.clone(),
    };
    Ok(HardInstance {
        automaton: assembly.automaton.clone(),
        sequence,
        provenance,
        entries,
        assembly,
    })
}
