//! Python bindings: automata, identity decisions and instance builders.
//!
//! Instances cross the boundary as JSON text in the same format the CLI writes.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use autgroup::backends::{a5_backend, aleshin_backend, fixture, FIXTURE_NAMES};
use autgroup::compressed::{build_compressed as build_compressed_instance, ExpParam};
use autgroup::decide::is_identity_with;
use autgroup::io::{
    automaton_from_json, automaton_to_json, compressed_provenance_json, dfas_from_json,
    instance_from_json, instance_to_json, tm_from_json, tm_provenance_json, to_pretty,
    InstanceFile, Payload,
};
use autgroup::slp::{compressed_is_identity, DEFAULT_EXPAND_GUARD};
use autgroup::tm_reduction::{assemble, AssemblyOptions};
use autgroup::turing::{fixture_machine, normalize, SpaceBound, TuringMachine, MACHINE_NAMES};
use autgroup::uniform::{build_uniform as build_uniform_instance, fixture_dfas, DFA_FIXTURE_NAMES};
use autgroup::{Budget, Canonical, Decision, MealyAutomaton};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_json(text: &str) -> PyResult<serde_json::Value> {
    serde_json::from_str(text).map_err(value_err)
}

fn budget(max_residuals: Option<usize>, max_witness_length: Option<usize>) -> PyResult<Budget> {
    let env = Budget::from_env().map_err(value_err)?;
    Budget::new(
        max_residuals.unwrap_or(env.max_residuals),
        max_witness_length.unwrap_or(env.max_witness_length),
    )
    .map_err(value_err)
}

fn decision_dict<'py>(
    py: Python<'py>,
    aut: &MealyAutomaton,
    d: &Decision,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("verdict", d.verdict.as_str())?;
    out.set_item(
        "witness",
        d.witness.as_ref().map(|w| aut.alphabet().format_word(w)),
    )?;
    out.set_item("explored", d.stats.explored)?;
    out.set_item("frontier_peak", d.stats.frontier_peak)?;
    out.set_item("verified_depth", d.stats.verified_depth)?;
    Ok(out)
}

/// A finite invertible Mealy automaton over a finite alphabet.
#[pyclass(name = "Automaton", module = "autgroup", frozen)]
struct PyAutomaton {
    inner: MealyAutomaton,
}

#[pymethods]
impl PyAutomaton {
    /// A built-in automaton by name.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: fixture(name).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: automaton_from_json(&parse_json(text)?).map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        to_pretty(&automaton_to_json(&self.inner))
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        (0..self.inner.num_states() as u32)
            .map(|s| self.inner.state_name(s).to_string())
            .collect()
    }

    #[getter]
    fn alphabet(&self) -> Vec<String> {
        let a = self.inner.alphabet();
        (0..self.inner.num_letters() as u32)
            .map(|l| a.name(l).to_string())
            .collect()
    }

    /// Image of `word` under `seq`; the rightmost state acts first.
    fn act(&self, seq: &str, word: &str) -> PyResult<String> {
        let seq = self.inner.parse_sequence(seq).map_err(value_err)?;
        let u = self.inner.alphabet().parse_word(word).map_err(value_err)?;
        let image = self.inner.act_word(&seq, &u).map_err(value_err)?;
        Ok(self.inner.alphabet().format_word(&image))
    }

    /// Residual sequence of `seq` after reading `word`.
    fn residual(&self, seq: &str, word: &str) -> PyResult<String> {
        let seq = self.inner.parse_sequence(seq).map_err(value_err)?;
        let u = self.inner.alphabet().parse_word(word).map_err(value_err)?;
        let res = self.inner.residual(&seq, &u).map_err(value_err)?;
        Ok(self.inner.format_sequence(&res))
    }

    /// Decide whether `seq` acts as the identity.
    #[pyo3(signature = (seq, max_residuals=None, max_witness_length=None, exact=false))]
    fn decide<'py>(
        &self,
        py: Python<'py>,
        seq: &str,
        max_residuals: Option<usize>,
        max_witness_length: Option<usize>,
        exact: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        let seq = self.inner.parse_sequence(seq).map_err(value_err)?;
        let canonical = if exact {
            Canonical::Exact
        } else {
            Canonical::Reduced
        };
        let b = budget(max_residuals, max_witness_length)?;
        let d = py
            .detach(|| is_identity_with(&self.inner, &seq, b, canonical))
            .map_err(value_err)?;
        decision_dict(py, &self.inner, &d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Automaton({:?}, states={}, letters={})",
            self.inner.name(),
            self.inner.num_states(),
            self.inner.num_letters()
        )
    }
}

/// Names of the built-in automata, machines and acceptor sets.
#[pyfunction]
fn fixtures<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("automata", FIXTURE_NAMES.to_vec())?;
    out.set_item("machines", MACHINE_NAMES.to_vec())?;
    out.set_item("acceptors", DFA_FIXTURE_NAMES.to_vec())?;
    Ok(out)
}

/// Decide the instance in `text` (a sequence or a grammar).
#[pyfunction]
#[pyo3(signature = (text, max_residuals=None, max_witness_length=None, guard=DEFAULT_EXPAND_GUARD))]
fn decide_instance<'py>(
    py: Python<'py>,
    text: &str,
    max_residuals: Option<usize>,
    max_witness_length: Option<usize>,
    guard: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let inst = instance_from_json(&parse_json(text)?).map_err(value_err)?;
    let b = budget(max_residuals, max_witness_length)?;
    let d = py
        .detach(|| match &inst.payload {
            Payload::Sequence(seq) => is_identity_with(&inst.automaton, seq, b, Canonical::Reduced),
            Payload::Slp(slp) => compressed_is_identity(&inst.automaton, slp, b, guard),
        })
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    decision_dict(py, &inst.automaton, &d)
}

/// Uniform instance from acceptors given as JSON text or an acceptor fixture name.
#[pyfunction]
fn build_uniform(dfas: &str) -> PyResult<String> {
    let dfas = if dfas.trim_start().starts_with('{') {
        dfas_from_json(&parse_json(dfas)?).map_err(value_err)?
    } else {
        fixture_dfas(dfas).map_err(value_err)?
    };
    let inst = build_uniform_instance(&dfas).map_err(value_err)?;
    let file = InstanceFile {
        kind: "uniform".into(),
        provenance: serde_json::json!({"acceptors": inst.acceptors, "entries": inst.padded}),
        payload: Payload::Sequence(inst.sequence),
        automaton: inst.automaton,
    };
    Ok(to_pretty(&instance_to_json(&file)))
}

fn machine(tm: &str) -> PyResult<TuringMachine> {
    if tm.trim_start().starts_with('{') {
        tm_from_json(&parse_json(tm)?).map_err(value_err)
    } else {
        fixture_machine(tm, SpaceBound::Polynomial(vec![2, 1])).map_err(value_err)
    }
}

/// Word-problem instance over a fixed automaton for a machine (JSON text or fixture name) and input.
#[pyfunction]
#[pyo3(signature = (tm, input="", backend="f3", full_fidelity=false, padded_alphabet=false, space=None))]
fn build_tm(
    tm: &str,
    input: &str,
    backend: &str,
    full_fidelity: bool,
    padded_alphabet: bool,
    space: Option<usize>,
) -> PyResult<String> {
    let tm = machine(tm)?;
    let rule = normalize(&tm).map_err(value_err)?;
    let w = tm.parse_input(input).map_err(value_err)?;
    let s = match space {
        Some(s) => s,
        None => tm.space.eval(w.len() as u64).map_err(value_err)?,
    };
    let bundle = match backend {
        "a5" => a5_backend(false),
        "f3" => aleshin_backend(true),
        "f3-plain" => aleshin_backend(false),
        other => return Err(PyValueError::new_err(format!("unknown backend `{other}`"))),
    };
    let opts = AssemblyOptions {
        full_fidelity,
        extra_letters: if padded_alphabet {
            vec!["e".into(), "f".into()]
        } else {
            vec![]
        },
        block_length: None,
    };
    let inst = assemble(&tm, &rule, &bundle, &w, s, &opts).map_err(value_err)?;
    let file = InstanceFile {
        kind: "tm".into(),
        provenance: tm_provenance_json(&inst.provenance),
        payload: Payload::Sequence(inst.sequence),
        automaton: inst.automaton,
    };
    Ok(to_pretty(&instance_to_json(&file)))
}

/// Compressed instance; give exactly one of `test_k` and `exp_e`.
#[pyfunction]
#[pyo3(signature = (tm, input="", test_k=None, exp_e=None))]
fn build_compressed(
    tm: &str,
    input: &str,
    test_k: Option<u32>,
    exp_e: Option<u32>,
) -> PyResult<String> {
    let tm = machine(tm)?;
    let rule = normalize(&tm).map_err(value_err)?;
    let w = tm.parse_input(input).map_err(value_err)?;
    let param = match (test_k, exp_e) {
        (Some(k), None) => ExpParam::Test { k },
        (None, Some(e)) => ExpParam::True { e },
        _ => {
            return Err(PyValueError::new_err(
                "give exactly one of test_k and exp_e",
            ))
        }
    };
    let inst = build_compressed_instance(&tm, &rule, &w, param).map_err(value_err)?;
    let file = InstanceFile {
        kind: "compressed".into(),
        provenance: compressed_provenance_json(&inst.provenance),
        payload: Payload::Slp(inst.slp),
        automaton: inst.automaton,
    };
    Ok(to_pretty(&instance_to_json(&file)))
}

#[pymodule]
#[pyo3(name = "autgroup")]
fn autgroup_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAutomaton>()?;
    m.add_function(wrap_pyfunction!(fixtures, m)?)?;
    m.add_function(wrap_pyfunction!(decide_instance, m)?)?;
    m.add_function(wrap_pyfunction!(build_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(build_tm, m)?)?;
    m.add_function(wrap_pyfunction!(build_compressed, m)?)?;
    Ok(())
}
