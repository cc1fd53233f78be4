use autgroup::backends::{check_mark_raw, fixture, FIXTURE_NAMES};
use autgroup::io::{
    automaton_from_json, automaton_to_json, dfas_from_json, dfas_to_json, instance_from_json,
    instance_to_json, raw_from_json, raw_to_json, read_json, slp_from_json, slp_to_json,
    space_from_json, space_to_json, tm_from_json, tm_to_json, to_pretty, write_json, InstanceFile,
    Payload,
};
use autgroup::slp::Slp;
use autgroup::turing::{fixture_machine, SpaceBound, MACHINE_NAMES};
use autgroup::uniform::DfaAcceptor;
use autgroup::{SignedState, StateSequence};
use proptest::prelude::*;
use serde_json::json;

#[test]
fn fixtures_round_trip() {
    for name in FIXTURE_NAMES {
        let aut = fixture(name).unwrap();
        let v = automaton_to_json(&aut);
        let back = automaton_from_json(&v).unwrap();
        assert_eq!(automaton_to_json(&back), v, "{name}");
        assert_eq!(to_pretty(&automaton_to_json(&back)), to_pretty(&v));
    }
}

#[test]
fn raw_automata_keep_their_defects() {
    let raw = check_mark_raw();
    let v = raw_to_json(&raw);
    assert_eq!(raw_from_json(&v).unwrap(), raw);
    assert!(automaton_from_json(&v).is_err());
}

#[test]
fn malformed_documents() {
    assert!(automaton_from_json(&json!({"format": "autgroup/automaton@1"})).is_err());
    assert!(automaton_from_json(&json!({"alphabet": ["0"]})).is_err());
    let mut v = automaton_to_json(&fixture("a5").unwrap());
    v["transitions"][0]["to"] = json!("nowhere");
    assert!(automaton_from_json(&v).is_err());
    assert!(space_from_json(&json!({"kind": "cubic"})).is_err());
}

#[test]
fn grammars_round_trip() {
    let aut = fixture("aleshin-sq").unwrap();
    let rules: Vec<(String, String)> = [("S", "A^-1 (b^-1·a) A"), ("A", "a b^-1 (a^-1)")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let slp = Slp::parse(&aut, &rules, "S").unwrap();
    let v = slp_to_json(&aut, &slp);
    assert_eq!(slp_from_json(&aut, &v).unwrap(), slp);
    // Bodies may also be given as token lists.
    let listed = json!({
        "format": "autgroup/slp@1",
        "start": "S",
        "rules": [{"var": "S", "body": ["A^-1", "(b^-1·a)", "A"]}, {"var": "A", "body": ["a", "b^-1", "(a^-1)"]}],
    });
    assert_eq!(slp_from_json(&aut, &listed).unwrap(), slp);
}

#[test]
fn instances_round_trip_through_files() {
    let aut = fixture("adding-machine").unwrap();
    let inst = InstanceFile {
        kind: "uniform".into(),
        automaton: aut.clone(),
        payload: Payload::Sequence(aut.parse_sequence("q,q^-1,id").unwrap()),
        provenance: json!({"source": "test"}),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    write_json(&path, &instance_to_json(&inst)).unwrap();
    let first = std::fs::read(&path).unwrap();
    let back = instance_from_json(&read_json(&path).unwrap()).unwrap();
    assert_eq!(back.kind, "uniform");
    match &back.payload {
        Payload::Sequence(s) => assert_eq!(aut.format_sequence(s), "q,q^-1,id"),
        Payload::Slp(_) => panic!("payload changed kind"),
    }
    write_json(&path, &instance_to_json(&back)).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);
    assert!(first.ends_with(b"\n"));

    let mut both = instance_to_json(&inst);
    both["slp"] =
        json!({"format": "autgroup/slp@1", "start": "S", "rules": [{"var": "S", "body": "q"}]});
    assert!(instance_from_json(&both).is_err());
}

#[test]
fn machines_and_acceptors_round_trip() {
    for name in MACHINE_NAMES {
        for space in [
            SpaceBound::Constant(5),
            SpaceBound::Polynomial(vec![2, 0, 1]),
            SpaceBound::TestMode { k: 3 },
            SpaceBound::Exponential { e: 1 },
        ] {
            assert_eq!(space_from_json(&space_to_json(&space)).unwrap(), space);
            let tm = fixture_machine(name, space).unwrap();
            assert_eq!(tm_from_json(&tm_to_json(&tm)).unwrap(), tm);
        }
    }
    let ab = ["a1", "a2", "a3", "a4"];
    let t: Vec<(&str, &str, &str)> = ab
        .iter()
        .flat_map(|a| [("s", *a, "t"), ("t", *a, "s")])
        .collect();
    let dfas = vec![
        DfaAcceptor::new(&["s", "t"], &ab, "s", &["t"], &t).unwrap(),
        DfaAcceptor::all_words(&ab),
    ];
    assert_eq!(dfas_from_json(&dfas_to_json(&dfas)).unwrap(), dfas);
}

proptest! {
    #[test]
    fn sequences_round_trip(name in prop::sample::select(FIXTURE_NAMES.to_vec()), raw in prop::collection::vec((0u32..64, any::<bool>()), 0..10)) {
        let aut = fixture(name).unwrap();
        let n = aut.num_states() as u32;
        let seq = StateSequence::new(raw.iter().map(|&(s, inverse)| SignedState { state: s % n, inverse }).collect());
        let inst = InstanceFile {
            kind: "sequence".into(),
            automaton: aut.clone(),
            payload: Payload::Sequence(seq.clone()),
            provenance: json!({}),
        };
        let back = instance_from_json(&instance_to_json(&inst)).unwrap();
        prop_assert_eq!(back.payload, Payload::Sequence(seq));
    }
}
