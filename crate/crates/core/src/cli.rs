//! The `mnets` command line: parse, simulate, translate, verify, export
//! and format models. Everything writes to caller-supplied streams and
//! returns an exit code, so tests drive it in-process.
//!
//! Exit codes: 0 ok, 1 property violated (or `fmt --check` mismatch),
//! 2 input error, 3 state budget exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dsl::{self, ModelKind};
use crate::explore::{self, ExploreError, Policy, RunOutcome, DEFAULT_BUDGET};
use crate::json::{
    DetimedNetMap, DetimedPSystemMap, NetJson, NetStateJson, NetTranslationMap, PStateJson, PSystemJson,
};
use crate::petri::{self, FiringChoice, PNState, TimedPetriNet};
use crate::psystem::{PConfiguration, StepChoice, TimedPSystem};
use crate::translate;
use crate::verify::{self, NetParams, SystemParams, Verdict, VerifyError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "mnets", version, about = "Timed membrane systems and timed Petri nets with localities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a model and print its trace or its bounded state space.
    Run(RunArgs),
    /// Translate a model and emit the correspondence map.
    Translate(TranslateArgs),
    /// Check one of the three simulation properties.
    Verify(VerifyArgs),
    /// Write DOT and/or JSON renderings of a model.
    Export(ExportArgs),
    /// Pretty-print a model in canonical form.
    Fmt(FmtArgs),
}

/// `exhaustive`, `first`, `seeded` (needs `--seed`) or `seed=S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyArg {
    Exhaustive,
    First,
    Seeded(Option<u64>),
}

impl FromStr for PolicyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(PolicyArg::Exhaustive),
            "first" => Ok(PolicyArg::First),
            "seeded" => Ok(PolicyArg::Seeded(None)),
            _ => match s.strip_prefix("seed=") {
                Some(n) => n
                    .parse()
                    .map(|n| PolicyArg::Seeded(Some(n)))
                    .map_err(|_| format!("bad seed in `{s}`")),
                None => Err(format!("unknown policy `{s}`; use exhaustive, first, seeded or seed=S")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value = "first")]
    pub policy: PolicyArg,
    /// Seed for `--policy seeded`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Include wall-clock time in the report (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    /// Timed membrane system.
    Tps,
    /// Timed Petri net.
    Tpn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum To {
    /// Untimed membrane system.
    Ps,
    /// Untimed Petri net.
    Pn,
    /// Timed Petri net.
    Tpn,
}

#[derive(Debug, clap::Args)]
pub struct TranslateArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub to: To,
    /// Input kind; detected from the file when omitted.
    #[arg(long, value_enum)]
    pub from: Option<InputKind>,
    /// Output model file (stdout when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Correspondence map file; defaults to `<output>.map.json` when `-o`
    /// is given.
    #[arg(long)]
    pub map: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// Model to check; random instances are generated when omitted.
    pub file: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub prop: u8,
    #[arg(long, default_value_t = 5)]
    pub depth: usize,
    /// Seed of the first random instance.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random instances (seeds `seed..seed+count`).
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, clap::Args)]
pub struct ExportArgs {
    pub file: PathBuf,
    /// DOT rendering of the net (membrane systems are translated first);
    /// `-` for stdout.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// JSON form of the model; `-` for stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct FmtArgs {
    pub file: PathBuf,
    /// Exit 1 instead of printing when the file is not canonical.
    #[arg(long)]
    pub check: bool,
    /// Write the canonical text to this file instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn budget(budget: usize) -> Failure {
    Failure {
        code: EXIT_BUDGET,
        message: format!("state budget of {budget} nodes exceeded; result inconclusive"),
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::StateBudgetExceeded { budget: b } => budget(b),
            other => input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Model {
    PSystem(TimedPSystem),
    Net(TimedPetriNet),
}

impl Model {
    /// Canonical DSL text.
    pub fn to_text(&self) -> String {
        match self {
            Model::PSystem(s) => dsl::print_psystem(s),
            Model::Net(n) => dsl::print_petri(n),
        }
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

/// Parses DSL text or the JSON model form (anything starting with `{`).
pub fn parse_model(src: &str) -> Result<Model, String> {
    if src.trim_start().starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(src).map_err(|e| e.to_string())?;
        return if value.get("alphabet").is_some() {
            let j: PSystemJson = serde_json::from_value(value).map_err(|e| e.to_string())?;
            j.to_model().map(Model::PSystem).map_err(|e| e.to_string())
        } else {
            let j: NetJson = serde_json::from_value(value).map_err(|e| e.to_string())?;
            j.to_model().map(Model::Net).map_err(|e| e.to_string())
        };
    }
    match dsl::detect_kind(src) {
        Some(ModelKind::PSystem) => dsl::parse_psystem(src).map(Model::PSystem).map_err(|e| e.to_string()),
        Some(ModelKind::Petri) => dsl::parse_petri(src).map(Model::Net).map_err(|e| e.to_string()),
        None => Err("expected a model starting with `psystem`, `petri` or a JSON object".into()),
    }
}

fn load(path: &Path) -> Result<Model, Failure> {
    let bytes = std::fs::read(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let src = String::from_utf8(bytes).map_err(|_| input(format!("{}: not valid UTF-8", path.display())))?;
    parse_model(&src).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_to(path: &Path, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    if path.as_os_str() == "-" {
        out.write_all(text.as_bytes()).map_err(|e| input(e.to_string()))
    } else {
        std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
    }
}

fn json_text<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize") + "\n"
}

#[derive(Debug, Serialize)]
struct TraceStep {
    step: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    choice: Option<std::collections::BTreeMap<String, u64>>,
    state: serde_json::Value,
}

#[derive(Debug, Serialize)]
struct Level {
    depth: usize,
    states: Vec<serde_json::Value>,
}

/// What `run` prints under `--format json`. Identical inputs give
/// byte-identical reports unless `--timing` is set.
#[derive(Debug, Serialize)]
struct RunReport {
    model_hash: String,
    kind: &'static str,
    policy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceStep>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_state: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<Level>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    states_explored: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

/// Uniform view of the two formalisms for printing runs.
trait Render: explore::MaxStepSemantics {
    const KIND: &'static str;
    fn state_text(&self, s: &Self::State) -> String;
    fn state_json(&self, s: &Self::State) -> serde_json::Value;
    fn choice_text(&self, c: &Self::Choice) -> String;
    fn choice_json(&self, c: &Self::Choice) -> std::collections::BTreeMap<String, u64>;
}

impl Render for TimedPSystem {
    const KIND: &'static str = "psystem";

    fn state_text(&self, s: &PConfiguration) -> String {
        s.display(self.alphabet()).to_string()
    }

    fn state_json(&self, s: &PConfiguration) -> serde_json::Value {
        serde_json::to_value(PStateJson::from_state(self, s)).expect("state serializes")
    }

    fn choice_text(&self, c: &StepChoice) -> String {
        c.display(self).to_string()
    }

    fn choice_json(&self, c: &StepChoice) -> std::collections::BTreeMap<String, u64> {
        c.counts.iter().map(|(&r, &n)| (self.rules()[r].name.clone(), n)).collect()
    }
}

impl Render for TimedPetriNet {
    const KIND: &'static str = "petri";

    fn state_text(&self, s: &PNState) -> String {
        let mut t = String::from("(");
        for (p, n) in self.places().iter().zip(&s.marking) {
            write!(t, "{p}={n}, ").unwrap();
        }
        write!(t, "gc={})", s.gc).unwrap();
        t
    }

    fn state_json(&self, s: &PNState) -> serde_json::Value {
        serde_json::to_value(NetStateJson::from_state(self, s)).expect("state serializes")
    }

    fn choice_text(&self, c: &FiringChoice) -> String {
        c.display(self).to_string()
    }

    fn choice_json(&self, c: &FiringChoice) -> std::collections::BTreeMap<String, u64> {
        c.counts.iter().map(|(&t, &n)| (self.transitions()[t].name.clone(), n)).collect()
    }
}

fn run_model<M: Render>(model: &M, hash: String, args: &RunArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (policy, seed) = match args.policy {
        PolicyArg::Exhaustive => (Policy::Exhaustive, None),
        PolicyArg::First => (Policy::FirstCanonical, None),
        PolicyArg::Seeded(Some(s)) => (Policy::Seeded(s), Some(s)),
        PolicyArg::Seeded(None) => match args.seed {
            Some(s) => (Policy::Seeded(s), Some(s)),
            None => return Err(input("the seeded policy needs --seed")),
        },
    };
    let started = Instant::now();
    let outcome = explore::run(model, args.steps, policy, args.budget).map_err(|e| match e {
        ExploreError::BudgetExceeded { budget: b } => budget(b),
        ExploreError::Step(e) => input(e.to_string()),
    })?;
    let elapsed = started.elapsed();
    let policy_name = match policy {
        Policy::Exhaustive => "exhaustive",
        Policy::FirstCanonical => "first",
        Policy::Seeded(_) => "seeded",
    };
    let mut report = RunReport {
        model_hash: hash,
        kind: M::KIND,
        policy: policy_name.into(),
        seed,
        steps: args.steps,
        trace: None,
        final_state: None,
        levels: None,
        states_explored: None,
        elapsed_ms: args.timing.then_some(elapsed.as_secs_f64() * 1e3),
    };
    let mut text = String::new();
    match outcome {
        RunOutcome::Trace(t) => {
            for (k, s) in t.states.iter().enumerate() {
                text.push_str(&model.state_text(s));
                if k > 0 {
                    write!(text, "  via {}", model.choice_text(&t.choices[k - 1])).unwrap();
                }
                text.push('\n');
            }
            report.trace = Some(
                t.states
                    .iter()
                    .enumerate()
                    .map(|(k, s)| TraceStep {
                        step: k,
                        choice: k.checked_sub(1).map(|i| model.choice_json(&t.choices[i])),
                        state: model.state_json(s),
                    })
                    .collect(),
            );
            report.final_state = Some(model.state_json(t.last()));
        }
        RunOutcome::Graph(g) => {
            let mut levels = Vec::new();
            for d in 0..=g.max_depth() {
                let mut states: Vec<&M::State> = g.at_depth(d).collect();
                states.sort();
                let n = states.len();
                writeln!(text, "depth {d}: {n} state{}", if n == 1 { "" } else { "s" }).unwrap();
                for s in &states {
                    writeln!(text, "  {}", model.state_text(s)).unwrap();
                }
                levels.push(Level {
                    depth: d,
                    states: states.iter().map(|s| model.state_json(s)).collect(),
                });
            }
            report.states_explored = Some(g.nodes.len());
            report.levels = Some(levels);
        }
    }
    if args.timing {
        writeln!(text, "elapsed: {:.3} ms", elapsed.as_secs_f64() * 1e3).unwrap();
    }
    let body = match args.format {
        Format::Text => text,
        Format::Json => json_text(&report),
    };
    out.write_all(body.as_bytes()).map_err(|e| input(e.to_string()))
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let model = load(&args.file)?;
    let hash = model.hash();
    match &model {
        Model::PSystem(s) => run_model(s, hash, args, out)?,
        Model::Net(n) => run_model(n, hash, args, out)?,
    }
    Ok(EXIT_OK)
}

fn cmd_translate(args: &TranslateArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let model = load(&args.file)?;
    let kind = match &model {
        Model::PSystem(_) => InputKind::Tps,
        Model::Net(_) => InputKind::Tpn,
    };
    if let Some(from) = args.from {
        if from != kind {
            return Err(input(format!("--from {from:?} does not match the input, which is {kind:?}").to_lowercase()));
        }
    }
    let failed = |e: translate::TranslateError| input(e.to_string());
    let (text, map) = match (&model, args.to) {
        (Model::PSystem(sys), To::Ps) => {
            let d = translate::detime_psystem(sys).map_err(failed)?;
            (dsl::print_psystem(&d.system), json_text(&DetimedPSystemMap::new(sys, &d)))
        }
        (Model::PSystem(sys), To::Tpn) => {
            let t = translate::psystem_to_petri(sys).map_err(failed)?;
            (dsl::print_petri(&t.net), json_text(&NetTranslationMap::new(sys, &t)))
        }
        (Model::PSystem(sys), To::Pn) => {
            let t = translate::psystem_to_petri(sys).map_err(failed)?;
            let d = translate::detime_petri(&t.net).map_err(failed)?;
            #[derive(Serialize)]
            struct Composed {
                translation: NetTranslationMap,
                detiming: DetimedNetMap,
            }
            let map = Composed {
                translation: NetTranslationMap::new(sys, &t),
                detiming: DetimedNetMap::new(&t.net, &d),
            };
            (dsl::print_petri(&d.net), json_text(&map))
        }
        (Model::Net(net), To::Pn) => {
            let d = translate::detime_petri(net).map_err(failed)?;
            (dsl::print_petri(&d.net), json_text(&DetimedNetMap::new(net, &d)))
        }
        (Model::Net(_), to) => {
            return Err(input(format!(
                "cannot translate a timed Petri net to {}; only --to pn is supported",
                format!("{to:?}").to_lowercase()
            )))
        }
    };
    let map_path = args.map.clone().or_else(|| {
        args.output.as_ref().map(|o| {
            let mut p = o.clone().into_os_string();
            p.push(".map.json");
            PathBuf::from(p)
        })
    });
    match &args.output {
        Some(path) => write_to(path, &text, out)?,
        None => out.write_all(text.as_bytes()).map_err(|e| input(e.to_string()))?,
    }
    if let Some(path) = map_path {
        write_to(&path, &map, out)?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct SeededVerdict {
    seed: u64,
    #[serde(flatten)]
    verdict: Verdict,
}

fn check(model: &Model, prop: u8, depth: usize, budget: usize) -> Result<Verdict, Failure> {
    Ok(match (model, prop) {
        (Model::PSystem(s), 1) => verify::check_prop1(s, depth, budget)?,
        (Model::PSystem(s), 3) => verify::check_prop3(s, depth, budget)?,
        (Model::Net(n), 2) => verify::check_prop2(n, depth, budget)?,
        (Model::PSystem(_), _) => return Err(input("property 2 is about timed nets; give a petri model")),
        (Model::Net(_), _) => return Err(input(format!("property {prop} is about membrane systems; give a psystem model"))),
    })
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let (body, ok) = match &args.file {
        Some(path) => {
            let v = check(&load(path)?, args.prop, args.depth, args.budget)?;
            (json_text(&v), v.ok)
        }
        None => {
            let mut all = Vec::new();
            for seed in args.seed..args.seed.saturating_add(args.count) {
                let mut rng = verify::random::rng(seed);
                let model = if args.prop == 2 {
                    Model::Net(verify::random_net(&mut rng, &NetParams::default()))
                } else {
                    Model::PSystem(verify::random_system(&mut rng, &SystemParams::default()))
                };
                all.push(SeededVerdict {
                    seed,
                    verdict: check(&model, args.prop, args.depth, args.budget)?,
                });
            }
            let ok = all.iter().all(|v| v.verdict.ok);
            (json_text(&all), ok)
        }
    };
    out.write_all(body.as_bytes()).map_err(|e| input(e.to_string()))?;
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATED })
}

fn cmd_export(args: &ExportArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    if args.dot.is_none() && args.json.is_none() {
        return Err(input("nothing to export; pass --dot and/or --json"));
    }
    let model = load(&args.file)?;
    if let Some(path) = &args.dot {
        let net = match &model {
            Model::Net(n) => n.clone(),
            Model::PSystem(s) => translate::psystem_to_petri(s).map_err(|e| input(e.to_string()))?.net,
        };
        write_to(path, &petri::to_dot(&net, net.initial_marking()), out)?;
    }
    if let Some(path) = &args.json {
        let text = match &model {
            Model::PSystem(s) => json_text(&PSystemJson::from_model(s)),
            Model::Net(n) => json_text(&NetJson::from_model(n)),
        };
        write_to(path, &text, out)?;
    }
    Ok(EXIT_OK)
}

fn cmd_fmt(args: &FmtArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let original = std::fs::read_to_string(&args.file).map_err(|e| input(format!("{}: {e}", args.file.display())))?;
    let text = load(&args.file)?.to_text();
    if args.check {
        return Ok(if original == text { EXIT_OK } else { EXIT_VIOLATED });
    }
    match &args.output {
        Some(path) => write_to(path, &text, out)?,
        None => out.write_all(text.as_bytes()).map_err(|e| input(e.to_string()))?,
    }
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<u8, Failure> {
    match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Translate(a) => cmd_translate(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Export(a) => cmd_export(a, out),
        Command::Fmt(a) => cmd_fmt(a, out),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Usage errors exit with 2, like other input errors.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_values() {
        assert_eq!("first".parse::<PolicyArg>(), Ok(PolicyArg::First));
        assert_eq!("seed=7".parse::<PolicyArg>(), Ok(PolicyArg::Seeded(Some(7))));
        assert_eq!("seeded".parse::<PolicyArg>(), Ok(PolicyArg::Seeded(None)));
        assert!("seed=x".parse::<PolicyArg>().is_err());
        assert!("random".parse::<PolicyArg>().is_err());
    }

    #[test]
    fn model_detection() {
        assert!(matches!(parse_model("petri { place p; }"), Ok(Model::Net(_))));
        assert!(matches!(
            parse_model("# c\npsystem { alphabet a; membrane 1 { } }"),
            Ok(Model::PSystem(_))
        ));
        assert!(parse_model("nonsense").is_err());
        let json = serde_json::to_string(&NetJson::from_model(&crate::samples::two_membrane_net())).unwrap();
        assert!(matches!(parse_model(&json), Ok(Model::Net(_))));
    }

    #[test]
    fn usage_errors_exit_2() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(main_with(["mnets", "frobnicate"], &mut o, &mut e), EXIT_INPUT);
        assert_eq!(main_with(["mnets", "verify", "--prop", "4"], &mut o, &mut e), EXIT_INPUT);
    }
}
