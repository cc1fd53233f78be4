//! `autgroup`: actions, word problems and hard-instance builders for automaton groups.
//!
//! Exit codes: 0 success, 1 `not-identity` under `--assert-identity` (or an
//! automaton failing `validate`), 2 usage or input error, 3 budget exhausted.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use autgroup::backends::{
    a5_backend, aleshin_backend, check_mark_raw, fixture, BackendBundle, FIXTURE_NAMES,
};
use autgroup::compressed::{build_compressed, ExpParam};
use autgroup::decide::{bounded_triviality_stats, is_identity_with};
use autgroup::io::{
    automaton_from_json, automaton_to_json, compressed_provenance_json, dfas_from_json,
    dfas_to_json, instance_from_json, instance_to_json, raw_from_json, raw_to_json, read_json,
    slp_from_json, tm_from_json, tm_provenance_json, tm_to_json, to_dot, to_pretty, write_atomic,
    write_json, InstanceFile, Payload,
};
use autgroup::slp::{compressed_is_identity, Slp, DEFAULT_EXPAND_GUARD};
use autgroup::tm_reduction::{assemble, AssemblyOptions};
use autgroup::turing::{fixture_machine, normalize, SpaceBound, TuringMachine, MACHINE_NAMES};
use autgroup::uniform::{build_uniform, fixture_dfas, DfaAcceptor, DFA_FIXTURE_NAMES};
use autgroup::{
    Budget, Canonical, Decision, MealyAutomaton, RawAutomaton, StateSequence, Triviality, Verdict,
};

/// Letters added by `--padded-alphabet`.
const PADDING_LETTERS: [&str; 2] = ["e", "f"];

/// Space bound given to fixture machines: `n + 2` cells.
fn fixture_space() -> SpaceBound {
    SpaceBound::Polynomial(vec![2, 1])
}

#[derive(Parser)]
#[command(
    name = "autgroup",
    version,
    about = "Automaton groups: actions, word problems and hard-instance builders"
)]
struct Cli {
    /// Print JSON reports instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that an automaton is deterministic, complete and invertible.
    Validate {
        /// Fixture name or automaton JSON file.
        #[arg(long)]
        automaton: String,
    },
    /// Image of a word under a state sequence.
    Act(ActArgs),
    /// Residual of a state sequence after reading a word.
    Residual(ActArgs),
    /// Decide whether a sequence or instance is the identity.
    Decide(DecideArgs),
    /// Length-lex first word moved by a sequence.
    Witness(WitnessArgs),
    /// Build a uniform word-problem instance from DFAs with a common alphabet of four letters.
    BuildUniform {
        /// Acceptor JSON file or acceptor fixture name.
        #[arg(long)]
        dfas: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a word-problem instance over a fixed automaton from a Turing machine and input.
    BuildTm(BuildTmArgs),
    /// Build a compressed word-problem instance (a straight-line program).
    BuildCompressed(BuildCompressedArgs),
    /// Straight-line program tools.
    #[command(subcommand)]
    Slp(SlpCommand),
    /// Built-in automata, machines and acceptors.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
    /// Graphviz rendering of an automaton.
    ExportDot {
        #[arg(long)]
        automaton: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SequenceSource {
    /// Fixture name or automaton JSON file.
    #[arg(long)]
    automaton: Option<String>,
    /// Comma-separated states, `^-1` for inverses; the rightmost acts first.
    #[arg(long)]
    seq: Option<String>,
    /// Instance JSON written by one of the builders.
    #[arg(long, conflicts_with_all = ["automaton", "seq"])]
    instance: Option<PathBuf>,
}

#[derive(Args)]
struct ActArgs {
    #[command(flatten)]
    source: SequenceSource,
    /// Letters, comma-separated or concatenated when every letter is one character.
    #[arg(long)]
    word: String,
}

#[derive(Args)]
struct BudgetArgs {
    /// Residual tuples stored before giving up (default from AUTGROUP_MAX_RESIDUALS).
    #[arg(long)]
    max_residuals: Option<usize>,
    /// Longest word examined (default from AUTGROUP_MAX_WITNESS_LENGTH).
    #[arg(long)]
    max_witness_length: Option<usize>,
    /// Key residuals by the literal tuple instead of its free reduction without identity states.
    #[arg(long)]
    exact: bool,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget> {
        let env = Budget::from_env()?;
        Ok(Budget::new(
            self.max_residuals.unwrap_or(env.max_residuals),
            self.max_witness_length.unwrap_or(env.max_witness_length),
        )?)
    }

    fn canonical(&self) -> Canonical {
        if self.exact {
            Canonical::Exact
        } else {
            Canonical::Reduced
        }
    }
}

#[derive(Args)]
struct DecideArgs {
    #[command(flatten)]
    source: SequenceSource,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Exit with status 1 unless the verdict is `identity`.
    #[arg(long)]
    assert_identity: bool,
    /// Longest grammar expansion decided exactly; longer ones are checked by streaming.
    #[arg(long, default_value_t = DEFAULT_EXPAND_GUARD)]
    guard: u64,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    source: SequenceSource,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Only examine words up to this length.
    #[arg(long)]
    bound: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendChoice {
    /// The A5 automaton; five letters.
    A5,
    /// Aleshin's free group with the product states, leaf `b^-1·a` as one state.
    F3,
    /// Aleshin's free group with the leaf `b^-1,a` as two states.
    F3Plain,
}

impl BackendChoice {
    fn bundle(self) -> BackendBundle {
        match self {
            BackendChoice::A5 => a5_backend(false),
            BackendChoice::F3 => aleshin_backend(true),
            BackendChoice::F3Plain => aleshin_backend(false),
        }
    }
}

#[derive(Args)]
struct BuildTmArgs {
    /// Machine JSON file or fixture machine name.
    #[arg(long)]
    tm: String,
    /// Input word over the machine's input symbols.
    #[arg(long, default_value = "")]
    input: String,
    #[arg(long, value_enum, default_value = "f3")]
    backend: BackendChoice,
    /// Copy the machine automaton for every backend state.
    #[arg(long)]
    full_fidelity: bool,
    /// Add the inert letters `e` and `f` to the binary alphabet.
    #[arg(long)]
    padded_alphabet: bool,
    /// Configuration length; defaults to the machine's space bound.
    #[arg(long)]
    space: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["test_k", "exp_e"])))]
struct BuildCompressedArgs {
    /// Machine JSON file or fixture machine name.
    #[arg(long)]
    tm: String,
    #[arg(long, default_value = "")]
    input: String,
    /// Blocks of `2^k` configurations.
    #[arg(long)]
    test_k: Option<u32>,
    /// Blocks of `2^(2 n^e)` configurations.
    #[arg(long)]
    exp_e: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SlpSource {
    /// Instance JSON holding a grammar.
    #[arg(long, conflicts_with_all = ["automaton", "slp"])]
    instance: Option<PathBuf>,
    /// Fixture name or automaton JSON file.
    #[arg(long, requires = "slp")]
    automaton: Option<String>,
    /// Grammar JSON file.
    #[arg(long, requires = "automaton")]
    slp: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SlpCommand {
    /// Print the generated sequence.
    Expand {
        #[command(flatten)]
        source: SlpSource,
        #[arg(long, default_value_t = DEFAULT_EXPAND_GUARD)]
        guard: u64,
    },
    /// Length of the generated sequence, computed without expanding.
    Length {
        #[command(flatten)]
        source: SlpSource,
    },
    /// Decide whether the generated sequence is the identity.
    Decide {
        #[command(flatten)]
        source: SlpSource,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        assert_identity: bool,
        #[arg(long, default_value_t = DEFAULT_EXPAND_GUARD)]
        guard: u64,
    },
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Names of the built-in automata, machines and acceptor sets.
    List,
    /// Write a fixture as JSON.
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failures that map to a specific exit status.
#[derive(Debug)]
enum Exit {
    NotIdentity,
    NotGroup,
    Budget,
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exit::NotIdentity => f.write_str("assertion failed: the sequence is not the identity"),
            Exit::NotGroup => f.write_str("not a group automaton"),
            Exit::Budget => f.write_str("budget exhausted before a verdict"),
        }
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("autgroup: {e:#}");
            match e.downcast_ref::<Exit>() {
                Some(Exit::NotIdentity | Exit::NotGroup) => ExitCode::from(1),
                Some(Exit::Budget) => ExitCode::from(3),
                None if matches!(
                    e.downcast_ref::<autgroup::Error>(),
                    Some(autgroup::Error::GuardExceeded { .. })
                ) =>
                {
                    ExitCode::from(3)
                }
                None => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let json = cli.json;
    match &cli.command {
        Command::Validate { automaton } => validate(automaton, json),
        Command::Act(args) => act(args, json, false),
        Command::Residual(args) => act(args, json, true),
        Command::Decide(args) => {
            let (aut, payload) = load_source(&args.source)?;
            let d = decide_payload(&aut, &payload, &args.budget, args.guard)?;
            report_decision(&aut, &d, json, args.assert_identity)
        }
        Command::Witness(args) => witness(args, json),
        Command::BuildUniform { dfas, out } => {
            let dfas = load_dfas(dfas)?;
            let inst = build_uniform(&dfas)?;
            let file = InstanceFile {
                kind: "uniform".into(),
                provenance: json!({"acceptors": inst.acceptors, "entries": inst.padded}),
                payload: Payload::Sequence(inst.sequence.clone()),
                automaton: inst.automaton,
            };
            emit_instance(&file, out.as_deref(), inst.sequence.len().to_string())
        }
        Command::BuildTm(args) => build_tm(args),
        Command::BuildCompressed(args) => {
            let tm = load_machine(&args.tm)?;
            let rule = normalize(&tm)?;
            let w = tm.parse_input(&args.input)?;
            let param = match (args.test_k, args.exp_e) {
                (Some(k), None) => ExpParam::Test { k },
                (None, Some(e)) => ExpParam::True { e },
                _ => bail!("give exactly one of --test-k and --exp-e"),
            };
            let inst = build_compressed(&tm, &rule, &w, param)?;
            let length = inst.slp.expanded_length().to_string();
            let file = InstanceFile {
                kind: "compressed".into(),
                provenance: compressed_provenance_json(&inst.provenance),
                payload: Payload::Slp(inst.slp),
                automaton: inst.automaton,
            };
            emit_instance(&file, args.out.as_deref(), length)
        }
        Command::Slp(cmd) => slp_command(cmd, json),
        Command::Fixtures(FixturesCommand::List) => {
            let list = json!({"automata": FIXTURE_NAMES, "raw": ["check-mark"], "machines": MACHINE_NAMES, "acceptors": DFA_FIXTURE_NAMES});
            if json {
                print!("{}", to_pretty(&list));
            } else {
                println!("automata:  {}", FIXTURE_NAMES.join(" "));
                println!("raw:       check-mark");
                println!("machines:  {}", MACHINE_NAMES.join(" "));
                println!("acceptors: {}", DFA_FIXTURE_NAMES.join(" "));
            }
            Ok(())
        }
        Command::Fixtures(FixturesCommand::Export { name, out }) => {
            let doc = if let Ok(aut) = fixture(name) {
                automaton_to_json(&aut)
            } else if name == "check-mark" {
                raw_to_json(&check_mark_raw())
            } else if let Ok(tm) = fixture_machine(name, fixture_space()) {
                tm_to_json(&tm)
            } else if let Ok(dfas) = fixture_dfas(name) {
                dfas_to_json(&dfas)
            } else {
                bail!("no fixture named `{name}` (see `autgroup fixtures list`)");
            };
            emit(&to_pretty(&doc), out.as_deref())
        }
        Command::ExportDot { automaton, out } => {
            emit(&to_dot(&load_automaton(automaton)?), out.as_deref())
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_instance(file: &InstanceFile, out: Option<&Path>, length: String) -> Result<()> {
    let doc = instance_to_json(file);
    match out {
        Some(p) => {
            write_json(p, &doc).with_context(|| format!("writing {}", p.display()))?;
            eprintln!(
                "wrote {}: {} instance, {} states, {} letters, sequence length {length}",
                p.display(),
                file.kind,
                file.automaton.num_states(),
                file.automaton.num_letters()
            );
            Ok(())
        }
        None => emit(&to_pretty(&doc), None),
    }
}

fn is_file(spec: &str) -> bool {
    spec.ends_with(".json") || Path::new(spec).is_file()
}

/// A fixture name, an automaton document, or an instance document (its automaton).
fn load_automaton(spec: &str) -> Result<MealyAutomaton> {
    if !is_file(spec) {
        return fixture(spec).map_err(|_| {
            anyhow!("`{spec}` is neither a file nor a fixture (see `autgroup fixtures list`)")
        });
    }
    let v = read_json(Path::new(spec))?;
    if v.get("automaton").is_some() {
        return Ok(instance_from_json(&v)?.automaton);
    }
    automaton_from_json(&v).with_context(|| format!("reading {spec}"))
}

fn load_raw(spec: &str) -> Result<RawAutomaton> {
    if is_file(spec) {
        return raw_from_json(&read_json(Path::new(spec))?)
            .with_context(|| format!("reading {spec}"));
    }
    if spec == "check-mark" {
        return Ok(check_mark_raw());
    }
    Ok(load_automaton(spec)?.to_raw())
}

fn load_machine(spec: &str) -> Result<TuringMachine> {
    if is_file(spec) {
        return tm_from_json(&read_json(Path::new(spec))?)
            .with_context(|| format!("reading {spec}"));
    }
    fixture_machine(spec, fixture_space())
        .map_err(|_| anyhow!("`{spec}` is neither a file nor a fixture machine"))
}

fn load_dfas(spec: &str) -> Result<Vec<DfaAcceptor>> {
    if is_file(spec) {
        return dfas_from_json(&read_json(Path::new(spec))?)
            .with_context(|| format!("reading {spec}"));
    }
    fixture_dfas(spec).map_err(|_| anyhow!("`{spec}` is neither a file nor an acceptor fixture"))
}

fn load_instance(path: &Path) -> Result<InstanceFile> {
    instance_from_json(&read_json(path)?).with_context(|| format!("reading {}", path.display()))
}

fn load_source(src: &SequenceSource) -> Result<(MealyAutomaton, Payload)> {
    if let Some(p) = &src.instance {
        let inst = load_instance(p)?;
        return Ok((inst.automaton, inst.payload));
    }
    let (Some(a), Some(s)) = (&src.automaton, &src.seq) else {
        bail!("give --automaton with --seq, or --instance");
    };
    let aut = load_automaton(a)?;
    let seq = aut.parse_sequence(s)?;
    Ok((aut, Payload::Sequence(seq)))
}

fn load_sequence(src: &SequenceSource) -> Result<(MealyAutomaton, StateSequence)> {
    match load_source(src)? {
        (aut, Payload::Sequence(seq)) => Ok((aut, seq)),
        (aut, Payload::Slp(slp)) => {
            let seq = slp.expand(DEFAULT_EXPAND_GUARD)?;
            Ok((aut, seq))
        }
    }
}

fn load_slp(src: &SlpSource) -> Result<(MealyAutomaton, Slp)> {
    if let Some(p) = &src.instance {
        let inst = load_instance(p)?;
        return match inst.payload {
            Payload::Slp(slp) => Ok((inst.automaton, slp)),
            Payload::Sequence(_) => bail!("{} holds a plain sequence, not a grammar", p.display()),
        };
    }
    let (Some(a), Some(s)) = (&src.automaton, &src.slp) else {
        bail!("give --automaton with --slp, or --instance");
    };
    let aut = load_automaton(a)?;
    let slp =
        slp_from_json(&aut, &read_json(s)?).with_context(|| format!("reading {}", s.display()))?;
    Ok((aut, slp))
}

fn validate(spec: &str, json: bool) -> Result<()> {
    let raw = load_raw(spec)?;
    let r = raw.validate();
    let ok = r.deterministic && r.complete && r.invertible;
    let pairs = |v: &[(String, String)]| {
        v.iter()
            .map(|(s, a)| format!("{s}/{a}"))
            .collect::<Vec<_>>()
    };
    if json {
        let doc = json!({
            "automaton": raw.name,
            "deterministic": r.deterministic,
            "complete": r.complete,
            "invertible": r.invertible,
            "group_automaton": ok,
            "duplicated": pairs(&r.duplicated),
            "missing": pairs(&r.missing),
            "colliding": pairs(&r.colliding),
            "dangling": r.dangling.len(),
        });
        print!("{}", to_pretty(&doc));
    } else {
        println!(
            "{}: {} states, {} letters",
            raw.name,
            raw.states.len(),
            raw.alphabet.len()
        );
        println!("deterministic: {}", r.deterministic);
        println!("complete:      {}", r.complete);
        println!("invertible:    {}", r.invertible);
        for (label, v) in [
            ("duplicated", &r.duplicated),
            ("missing", &r.missing),
            ("colliding", &r.colliding),
        ] {
            if !v.is_empty() {
                println!("{label}: {}", pairs(v).join(" "));
            }
        }
        if !r.dangling.is_empty() {
            println!("dangling transitions: {}", r.dangling.len());
        }
    }
    if ok {
        Ok(())
    } else {
        Err(anyhow!(Exit::NotGroup).context(format!("`{}`", raw.name)))
    }
}

fn act(args: &ActArgs, json: bool, residual: bool) -> Result<()> {
    let (aut, seq) = load_sequence(&args.source)?;
    let u = aut.alphabet().parse_word(&args.word)?;
    let (image, res) = aut.cross(&seq, &u)?;
    let a = aut.alphabet();
    if json {
        let doc = json!({
            "word": a.format_word(&u),
            "image": a.format_word(&image),
            "residual": aut.format_sequence(&res),
        });
        print!("{}", to_pretty(&doc));
    } else if residual {
        println!("{}", aut.format_sequence(&res));
    } else {
        println!("{}", a.format_word(&image));
    }
    Ok(())
}

fn decide_payload(
    aut: &MealyAutomaton,
    payload: &Payload,
    budget: &BudgetArgs,
    guard: u64,
) -> Result<Decision> {
    Ok(match payload {
        Payload::Sequence(seq) => is_identity_with(aut, seq, budget.budget()?, budget.canonical())?,
        Payload::Slp(slp) => compressed_is_identity(aut, slp, budget.budget()?, guard)?,
    })
}

fn report_decision(
    aut: &MealyAutomaton,
    d: &Decision,
    json: bool,
    assert_identity: bool,
) -> Result<()> {
    let witness = d.witness.as_ref().map(|w| aut.alphabet().format_word(w));
    if json {
        let doc = json!({
            "verdict": d.verdict.as_str(),
            "witness": witness,
            "stats": {
                "explored": d.stats.explored,
                "frontier_peak": d.stats.frontier_peak,
                "verified_depth": d.stats.verified_depth,
            },
        });
        print!("{}", to_pretty(&doc));
    } else {
        println!("{}", d.verdict.as_str());
        if let Some(w) = &witness {
            println!("witness: {w}");
        }
        println!(
            "explored {} residuals, every word of length <= {} checked",
            d.stats.explored, d.stats.verified_depth
        );
    }
    match d.verdict {
        Verdict::LimitExceeded => Err(Exit::Budget.into()),
        Verdict::NotIdentity if assert_identity => Err(Exit::NotIdentity.into()),
        _ => Ok(()),
    }
}

fn witness(args: &WitnessArgs, json: bool) -> Result<()> {
    let (aut, seq) = load_sequence(&args.source)?;
    let (word, exhausted) = match args.bound {
        Some(b) => match bounded_triviality_stats(&aut, &seq, b, args.budget.canonical())?.0 {
            Triviality::Moved(w) => (Some(w), false),
            Triviality::FixedAll => (None, false),
        },
        None => {
            let d = is_identity_with(&aut, &seq, args.budget.budget()?, args.budget.canonical())?;
            (d.witness, d.verdict == Verdict::LimitExceeded)
        }
    };
    let text = word.as_ref().map(|w| aut.alphabet().format_word(w));
    if json {
        print!(
            "{}",
            to_pretty(&json!({"witness": text, "bound": args.bound}))
        );
    } else {
        println!("{}", text.as_deref().unwrap_or("none"));
    }
    if exhausted {
        return Err(Exit::Budget.into());
    }
    Ok(())
}

fn build_tm(args: &BuildTmArgs) -> Result<()> {
    let tm = load_machine(&args.tm)?;
    let rule = normalize(&tm)?;
    let w = tm.parse_input(&args.input)?;
    let s = match args.space {
        Some(s) => s,
        None => tm.space.eval(w.len() as u64)?,
    };
    let opts = AssemblyOptions {
        full_fidelity: args.full_fidelity,
        extra_letters: if args.padded_alphabet {
            PADDING_LETTERS.iter().map(|l| l.to_string()).collect()
        } else {
            vec![]
        },
        block_length: None,
    };
    let inst = assemble(&tm, &rule, &args.backend.bundle(), &w, s, &opts)?;
    let file = InstanceFile {
        kind: "tm".into(),
        provenance: tm_provenance_json(&inst.provenance),
        payload: Payload::Sequence(inst.sequence.clone()),
        automaton: inst.automaton,
    };
    emit_instance(&file, args.out.as_deref(), inst.sequence.len().to_string())
}

fn slp_command(cmd: &SlpCommand, json: bool) -> Result<()> {
    match cmd {
        SlpCommand::Expand { source, guard } => {
            let (aut, slp) = load_slp(source)?;
            let seq = slp.expand(*guard)?;
            if json {
                print!(
                    "{}",
                    to_pretty(&json!({"sequence": aut.format_sequence(&seq), "length": seq.len()}))
                );
            } else {
                println!("{}", aut.format_sequence(&seq));
            }
            Ok(())
        }
        SlpCommand::Length { source } => {
            let (_, slp) = load_slp(source)?;
            let len = slp.expanded_length();
            if json {
                print!(
                    "{}",
                    to_pretty(&json!({"length": len.to_string(), "rules": slp.num_rules()}))
                );
            } else {
                println!("{len}");
            }
            Ok(())
        }
        SlpCommand::Decide {
            source,
            budget,
            assert_identity,
            guard,
        } => {
            let (aut, slp) = load_slp(source)?;
            let d = decide_payload(&aut, &Payload::Slp(slp), budget, *guard)?;
            report_decision(&aut, &d, json, *assert_identity)
        }
    }
}
