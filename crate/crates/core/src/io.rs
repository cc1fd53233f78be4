//! JSON documents and Graphviz export.
//!
//! Every document carries `"format": "autgroup/<kind>@1"`. Objects are written
//! with sorted keys and files are replaced atomically, so identical inputs give
//! byte-identical files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::automaton::{MealyAutomaton, NamedTransition, RawAutomaton, StateSequence};
use crate::compressed::{CompressedProvenance, ExpParam};
use crate::error::{Error, Result};
use crate::slp::Slp;
use crate::tm_reduction::Provenance;
use crate::turing::{Move, SpaceBound, TuringMachine};
use crate::uniform::DfaAcceptor;

pub fn format_tag(kind: &str) -> String {
    format!("autgroup/{kind}@1")
}

fn check_format(v: &Value, kind: &str) -> Result<()> {
    match v.get("format").and_then(Value::as_str) {
        Some(f) if f == format_tag(kind) => Ok(()),
        Some(f) => Err(Error::Parse(format!(
            "expected format `{}`, found `{f}`",
            format_tag(kind)
        ))),
        None => Err(Error::Parse(format!(
            "missing `format` (expected `{}`)",
            format_tag(kind)
        ))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field `{key}`")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?
        .as_str()
        .ok_or_else(|| Error::Parse(format!("field `{key}` must be a string")))
}

fn strings(v: &Value, key: &str) -> Result<Vec<String>> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| Error::Parse(format!("field `{key}` must be an array")))?
        .iter()
        .map(|x| {
            x.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("field `{key}` must hold strings")))
        })
        .collect()
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| Error::Parse(format!("field `{key}` must be an array")))
}

fn u64_field(v: &Value, key: &str) -> Result<u64> {
    field(v, key)?
        .as_u64()
        .ok_or_else(|| Error::Parse(format!("field `{key}` must be a non-negative integer")))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    write_atomic(path, &to_pretty(v))
}

fn automaton_body(
    name: &str,
    alphabet: &[String],
    states: &[String],
    transitions: &[NamedTransition],
) -> Value {
    let ts: Vec<Value> = transitions
        .iter()
        .map(|t| json!({"from": t.from, "in": t.input, "out": t.output, "to": t.to}))
        .collect();
    json!({
        "format": format_tag("automaton"),
        "name": name,
        "alphabet": alphabet,
        "states": states,
        "transitions": ts,
    })
}

pub fn automaton_to_json(aut: &MealyAutomaton) -> Value {
    automaton_body(
        aut.name(),
        aut.alphabet().names(),
        aut.state_names(),
        &aut.named_transitions(),
    )
}

pub fn raw_to_json(raw: &RawAutomaton) -> Value {
    automaton_body(&raw.name, &raw.alphabet, &raw.states, &raw.transitions)
}

/// Reads an automaton document without checking that it is a group automaton.
pub fn raw_from_json(v: &Value) -> Result<RawAutomaton> {
    check_format(v, "automaton")?;
    let transitions = array(v, "transitions")?
        .iter()
        .map(|t| {
            Ok(NamedTransition::new(
                str_field(t, "from")?,
                str_field(t, "in")?,
                str_field(t, "out")?,
                str_field(t, "to")?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RawAutomaton {
        name: v
            .get("name")
            .and_then(Value::as_str)
            .unwrap_or("automaton")
            .to_string(),
        alphabet: strings(v, "alphabet")?,
        states: strings(v, "states")?,
        transitions,
    })
}

pub fn automaton_from_json(v: &Value) -> Result<MealyAutomaton> {
    raw_from_json(v)?.build()
}

pub fn slp_to_json(aut: &MealyAutomaton, slp: &Slp) -> Value {
    let rules: Vec<Value> = (0..slp.num_rules())
        .map(|i| json!({"var": slp.rules()[i].name, "body": slp.format_body(aut, i)}))
        .collect();
    json!({"format": format_tag("slp"), "start": slp.start_name(), "rules": rules})
}

pub fn slp_from_json(aut: &MealyAutomaton, v: &Value) -> Result<Slp> {
    check_format(v, "slp")?;
    let rules = array(v, "rules")?
        .iter()
        .map(|r| {
            let body = match field(r, "body")? {
                Value::String(s) => s.clone(),
                Value::Array(parts) => parts
                    .iter()
                    .map(|p| {
                        p.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| Error::Parse("body symbols must be strings".into()))
                    })
                    .collect::<Result<Vec<_>>>()?
                    .join(" "),
                _ => {
                    return Err(Error::Parse(
                        "`body` must be a string or an array of strings".into(),
                    ))
                }
            };
            Ok((str_field(r, "var")?.to_string(), body))
        })
        .collect::<Result<Vec<_>>>()?;
    Slp::parse(aut, &rules, str_field(v, "start")?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Sequence(StateSequence),
    Slp(Slp),
}

/// An automaton with a sequence or grammar over it, plus where it came from.
#[derive(Clone, Debug)]
pub struct InstanceFile {
    pub kind: String,
    pub automaton: MealyAutomaton,
    pub payload: Payload,
    pub provenance: Value,
}

pub fn instance_to_json(inst: &InstanceFile) -> Value {
    let mut m = Map::new();
    m.insert("format".into(), json!(format_tag("instance")));
    m.insert("kind".into(), json!(inst.kind));
    m.insert("automaton".into(), automaton_to_json(&inst.automaton));
    m.insert("provenance".into(), inst.provenance.clone());
    match &inst.payload {
        Payload::Sequence(seq) => m.insert(
            "sequence".into(),
            json!(inst.automaton.format_sequence(seq)),
        ),
        Payload::Slp(slp) => m.insert("slp".into(), slp_to_json(&inst.automaton, slp)),
    };
    Value::Object(m)
}

pub fn instance_from_json(v: &Value) -> Result<InstanceFile> {
    check_format(v, "instance")?;
    let automaton = automaton_from_json(field(v, "automaton")?)?;
    let payload = match (v.get("sequence"), v.get("slp")) {
        (Some(Value::String(s)), None) => Payload::Sequence(automaton.parse_sequence(s)?),
        (None, Some(slp)) => Payload::Slp(slp_from_json(&automaton, slp)?),
        _ => {
            return Err(Error::Parse(
                "an instance holds exactly one of `sequence` (string) and `slp`".into(),
            ))
        }
    };
    Ok(InstanceFile {
        kind: str_field(v, "kind")?.to_string(),
        automaton,
        payload,
        provenance: v.get("provenance").cloned().unwrap_or(Value::Null),
    })
}

pub fn dfas_to_json(dfas: &[DfaAcceptor]) -> Value {
    let acceptors: Vec<Value> = dfas
        .iter()
        .map(|d| {
            let k = d.alphabet.len();
            let mut ts = Vec::new();
            for (s, name) in d.states.iter().enumerate() {
                for (a, letter) in d.alphabet.iter().enumerate() {
                    ts.push(json!({"from": name, "letter": letter, "to": d.states[d.delta[s * k + a]]}));
                }
            }
            let finals: Vec<&String> = d.states.iter().zip(&d.finals).filter(|(_, &f)| f).map(|(s, _)| s).collect();
            json!({"states": d.states, "initial": d.states[d.initial], "finals": finals, "transitions": ts})
        })
        .collect();
    let alphabet = dfas.first().map(|d| d.alphabet.clone()).unwrap_or_default();
    json!({"format": format_tag("dfas"), "alphabet": alphabet, "acceptors": acceptors})
}

pub fn dfas_from_json(v: &Value) -> Result<Vec<DfaAcceptor>> {
    check_format(v, "dfas")?;
    let alphabet = strings(v, "alphabet")?;
    array(v, "acceptors")?
        .iter()
        .map(|d| {
            let ts = array(d, "transitions")?
                .iter()
                .map(|t| {
                    Ok((
                        str_field(t, "from")?.to_string(),
                        str_field(t, "letter")?.to_string(),
                        str_field(t, "to")?.to_string(),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            DfaAcceptor::from_names(
                strings(d, "states")?,
                alphabet.clone(),
                str_field(d, "initial")?,
                &strings(d, "finals")?,
                &ts,
            )
        })
        .collect()
}

pub fn space_to_json(s: &SpaceBound) -> Value {
    match s {
        SpaceBound::Constant(c) => json!({"kind": "constant", "value": c}),
        SpaceBound::Polynomial(cs) => json!({"kind": "polynomial", "coefficients": cs}),
        SpaceBound::TestMode { k } => json!({"kind": "test", "k": k}),
        SpaceBound::Exponential { e } => json!({"kind": "exp", "e": e}),
    }
}

pub fn space_from_json(v: &Value) -> Result<SpaceBound> {
    Ok(match str_field(v, "kind")? {
        "constant" => SpaceBound::Constant(u64_field(v, "value")?),
        "polynomial" => SpaceBound::Polynomial(
            array(v, "coefficients")?
                .iter()
                .map(|c| {
                    c.as_u64()
                        .ok_or_else(|| Error::Parse("coefficients must be integers".into()))
                })
                .collect::<Result<_>>()?,
        ),
        "test" => SpaceBound::TestMode {
            k: u64_field(v, "k")? as u32,
        },
        "exp" => SpaceBound::Exponential {
            e: u64_field(v, "e")? as u32,
        },
        other => return Err(Error::Parse(format!("unknown space bound kind `{other}`"))),
    })
}

pub fn tm_to_json(tm: &TuringMachine) -> Value {
    let rules: Vec<Value> = tm
        .rules
        .iter()
        .map(|r| {
            json!({
                "state": tm.states[r.state],
                "read": tm.tape[r.read],
                "next": tm.states[r.next],
                "write": tm.tape[r.write],
                "move": r.mv.as_str(),
            })
        })
        .collect();
    let accepting: Vec<&String> = tm
        .states
        .iter()
        .zip(&tm.accepting)
        .filter(|(_, &a)| a)
        .map(|(s, _)| s)
        .collect();
    let input: Vec<&String> = tm.input.iter().map(|&i| &tm.tape[i]).collect();
    json!({
        "format": format_tag("tm"),
        "name": tm.name,
        "states": tm.states,
        "tape": tm.tape,
        "blank": tm.tape[tm.blank],
        "input": input,
        "initial": tm.states[tm.initial],
        "accepting": accepting,
        "rules": rules,
        "space_bound": space_to_json(&tm.space),
    })
}

pub fn tm_from_json(v: &Value) -> Result<TuringMachine> {
    check_format(v, "tm")?;
    let rules = array(v, "rules")?
        .iter()
        .map(|r| {
            Ok((
                str_field(r, "state")?.to_string(),
                str_field(r, "read")?.to_string(),
                str_field(r, "next")?.to_string(),
                str_field(r, "write")?.to_string(),
                Move::parse(str_field(r, "move")?)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    TuringMachine::from_names(
        v.get("name").and_then(Value::as_str).unwrap_or("machine"),
        strings(v, "states")?,
        strings(v, "tape")?,
        str_field(v, "blank")?,
        &strings(v, "input")?,
        str_field(v, "initial")?,
        &strings(v, "accepting")?,
        &rules,
        space_from_json(field(v, "space_bound")?)?,
    )
}

pub fn tm_provenance_json(p: &Provenance) -> Value {
    json!({
        "machine": p.machine,
        "input": p.input,
        "space": p.space,
        "entries_raw": p.entries_raw,
        "entries": p.entries,
        "backend": p.backend,
        "block_length": p.block_length,
        "full_fidelity": p.full_fidelity,
        "extra_letters": p.extra_letters,
    })
}

pub fn compressed_provenance_json(p: &CompressedProvenance) -> Value {
    let mode = match p.mode {
        ExpParam::Test { k } => json!({"kind": "test", "k": k}),
        ExpParam::True { e } => json!({"kind": "exp", "e": e}),
    };
    json!({
        "machine": p.machine,
        "input": p.input,
        "mode": mode,
        "k": p.k,
        "space": p.space,
        "entries_raw": p.entries_raw,
        "entries": p.entries,
        "backend": "aleshin-sq",
    })
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

/// Graphviz digraph with one edge per (state, target), labelled `in/out`.
pub fn to_dot(aut: &MealyAutomaton) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph {} {{", dot_id(aut.name()));
    let _ = writeln!(s, "  rankdir=LR;");
    for n in aut.state_names() {
        let _ = writeln!(s, "  {};", dot_id(n));
    }
    let a = aut.alphabet();
    for st in 0..aut.num_states() as u32 {
        let mut edges: Vec<(u32, Vec<String>)> = Vec::new();
        for l in 0..aut.num_letters() as u32 {
            let (o, t) = aut.transition(st, l);
            let label = format!("{}/{}", a.name(l), a.name(o));
            match edges.iter_mut().find(|(x, _)| *x == t) {
                Some((_, ls)) => ls.push(label),
                None => edges.push((t, vec![label])),
            }
        }
        for (t, labels) in edges {
            let _ = writeln!(
                s,
                "  {} -> {} [label={}];",
                dot_id(aut.state_name(st)),
                dot_id(aut.state_name(t)),
                dot_id(&labels.join("\\n"))
            );
        }
    }
    s.push_str("}\n");
    s
}
