//! The `comodel` command-line tool.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::alphabet::Alphabet;
use crate::comodel::{run_on_stream, subbasic_member, StreamOracle};
use crate::error::Error;
use crate::extensional::{
    gen_prefix_dist, lts_trace_set, trace_equivalent, unfold_intensional, Hypernormal, IntensionalNode,
    TraceVerdict, DEFAULT_CAP,
};
use crate::format::{
    comodel_from_json, load_stream, load_term, parse_json, system_from_json, system_to_json, AnySystem, LoadError,
};
use crate::residual::{step_tree, Processor};
use crate::tensor::{compose_hgp, compose_lazy, pair_index, step_tensor, tensor_source, trace, TraceRun};
use crate::theory::{Signature, Term};

#[derive(Parser, Debug)]
#[command(name = "comodel", version, about = "Stream processors as residual comodels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output style: `machine` prints one JSON record per line.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Machine,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a term against a comodel state, or one step of a processor
    /// against a stream.
    Run(RunArgs),
    /// The first tokens a processor state emits on a stream.
    Trace(TraceArgs),
    /// Compose two processors, or feed a processor from a source.
    Compose(ComposeArgs),
    /// The maximally lazy step of a processor state.
    Normalize(NormalizeArgs),
    /// Compare two states by traces or by bisimulation.
    Equiv(EquivArgs),
    /// A finite part of the intensional tree of a processor state.
    Unfold(UnfoldArgs),
    /// All label sequences of a given length of a transition system.
    LtsTraces(PrefixArgs),
    /// The exact distribution of label prefixes of a generative system.
    GenDist(PrefixArgs),
    /// Whether a stream lies in the sub-basic open set `[t ↦ v]`.
    Member(MemberArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// A comodel file (with --term) or a processor file (with --stream).
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub term: Option<PathBuf>,
    #[arg(long)]
    pub stream: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub stream: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub length: usize,
    /// Trace the maximally lazy realization instead.
    #[arg(long)]
    pub normalized: bool,
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ComposeMethod {
    Lazy,
    Hgp,
}

#[derive(Args, Debug)]
pub struct ComposeArgs {
    /// The downstream processor `B → C`.
    #[arg(long)]
    pub left: PathBuf,
    /// The upstream processor `A → B`, or a transition system or
    /// generative source over `B`.
    #[arg(long)]
    pub right: PathBuf,
    #[arg(long, value_enum, default_value_t = ComposeMethod::Lazy)]
    pub method: ComposeMethod,
    /// Initial states of the left and right systems.
    #[arg(long, num_args = 1..=2)]
    pub state: Vec<String>,
    /// Trace the composite on this stream instead of printing it.
    #[arg(long)]
    pub stream: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub length: usize,
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct NormalizeArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub state: Option<String>,
    /// Also trace the normalized processor on this stream.
    #[arg(long)]
    pub stream: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub length: usize,
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EquivMethod {
    Trace,
    Bisim,
}

#[derive(Args, Debug)]
pub struct EquivArgs {
    #[arg(long)]
    pub left: PathBuf,
    #[arg(long)]
    pub right: PathBuf,
    /// States of the left and right systems; defaults to the first of each.
    #[arg(long, num_args = 1..=2)]
    pub state: Vec<String>,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    #[arg(long, default_value_t = 6)]
    pub outlen: usize,
    #[arg(long, value_enum, default_value_t = EquivMethod::Trace)]
    pub method: EquivMethod,
    /// Also compare on 64 random periodic streams drawn from this seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct UnfoldArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Emission cap per node.
    #[arg(long, default_value_t = 4)]
    pub outlen: usize,
    #[arg(long)]
    pub normalized: bool,
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct PrefixArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub length: usize,
}

#[derive(Args, Debug)]
pub struct MemberArgs {
    #[arg(long)]
    pub term: PathBuf,
    /// The value `v` of `[t ↦ v]`.
    #[arg(long)]
    pub value: String,
    #[arg(long)]
    pub stream: PathBuf,
    /// Input tokens, comma separated; alternatively take them from --system.
    #[arg(long, value_delimiter = ',')]
    pub alphabet: Vec<String>,
    /// A processor (its input alphabet) or comodel (its alphabet).
    #[arg(long)]
    pub system: Option<PathBuf>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Failures, split by exit status: 1 for domain errors, 2 for bad input.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Load(_) | CliError::Usage(_) => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and
/// returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let mut printer = Printer { out, format: cli.format };
    match execute(&cli.command, &mut printer) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

struct Printer<'a> {
    out: &'a mut dyn Write,
    format: OutputFormat,
}

impl Printer<'_> {
    /// Prints `text` or the machine record, whichever the format asks for.
    fn emit(&mut self, text: impl FnOnce() -> String, record: impl FnOnce() -> Value) -> CliResult<()> {
        let line = match self.format {
            OutputFormat::Text => text(),
            OutputFormat::Machine => record().to_string(),
        };
        writeln!(self.out, "{}", line.trim_end_matches('\n')).map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
    }
}

fn execute(cmd: &Command, pr: &mut Printer) -> CliResult<()> {
    match cmd {
        Command::Run(a) => cmd_run(a, pr),
        Command::Trace(a) => cmd_trace(a, pr),
        Command::Compose(a) => cmd_compose(a, pr),
        Command::Normalize(a) => cmd_normalize(a, pr),
        Command::Equiv(a) => cmd_equiv(a, pr),
        Command::Unfold(a) => cmd_unfold(a, pr),
        Command::LtsTraces(a) => cmd_lts_traces(a, pr),
        Command::GenDist(a) => cmd_gen_dist(a, pr),
        Command::Member(a) => cmd_member(a, pr),
    }
}

fn read_value(path: &Path) -> CliResult<Value> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: shown.clone(),
        message: e.to_string(),
    })?;
    Ok(parse_json(&shown, &text)?)
}

fn load_any(path: &Path) -> CliResult<AnySystem> {
    Ok(system_from_json(&path.display().to_string(), &read_value(path)?)?)
}

fn load_processor(path: &Path) -> CliResult<Processor> {
    match load_any(path)? {
        AnySystem::Processor(p) => Ok(p),
        other => Err(Error::TheoryMismatch("processor", other.kind().name()).into()),
    }
}

fn state_of(states: &[String], name: Option<&String>) -> CliResult<usize> {
    match name {
        None => Ok(0),
        Some(n) => states
            .iter()
            .position(|s| s == n)
            .ok_or_else(|| Error::UnknownState(n.clone()).into()),
    }
}

fn words_text(alphabet: &Alphabet, word: &[usize]) -> String {
    alphabet.render(word).join(" ")
}

fn trace_record(command: &str, alphabet: &Alphabet, run: &TraceRun<impl Sized>) -> Value {
    json!({
        "command": command,
        "output": alphabet.render(&run.output),
        "consumed": run.consumed,
        "profile": run.profile,
    })
}

fn print_trace(pr: &mut Printer, command: &str, alphabet: &Alphabet, run: &TraceRun<impl Sized>) -> CliResult<()> {
    pr.emit(
        || format!("{}\nconsumed {}", words_text(alphabet, &run.output), run.consumed),
        || trace_record(command, alphabet, run),
    )
}

fn cmd_run(a: &RunArgs, pr: &mut Printer) -> CliResult<()> {
    let doc = read_value(&a.system)?;
    let shown = a.system.display().to_string();
    if doc.get("kind").is_none() {
        let m = comodel_from_json(&shown, &doc)?;
        let term_path = a.term.as_ref().ok_or_else(|| CliError::Usage("run on a comodel needs --term".into()))?;
        let alphabet = m.alphabet().expect("comodel files describe input comodels");
        let term = load_term(term_path, &Signature::input(alphabet.len()))?;
        let s = state_of(m.states(), a.state.as_ref())?;
        let (v, next) = m.run_term(&term, s);
        let next = m.states()[next].clone();
        return pr.emit(|| format!("{v} {next}"), || json!({"command": "run", "value": v, "state": next}));
    }
    let p = match system_from_json(&shown, &doc)? {
        AnySystem::Processor(p) => p,
        other => return Err(Error::TheoryMismatch("processor", other.kind().name()).into()),
    };
    let stream_path = a.stream.as_ref().ok_or_else(|| CliError::Usage("run on a processor needs --stream".into()))?;
    let stream = load_stream(stream_path, p.input())?;
    let s = state_of(p.states(), a.state.as_ref())?;
    let (b, next, _, used) = step_tensor(&p, &s, &stream)?;
    let (token, next) = (p.output().name(b).to_string(), p.states()[next].clone());
    pr.emit(
        || format!("{token} {next}\nconsumed {used}"),
        || json!({"command": "run", "output": token, "state": next, "consumed": used}),
    )
}

fn cmd_trace(a: &TraceArgs, pr: &mut Printer) -> CliResult<()> {
    let p = load_processor(&a.system)?;
    let stream = load_stream(&a.stream, p.input())?;
    let s = state_of(p.states(), a.state.as_ref())?;
    if a.normalized {
        let h = Hypernormal::with_cap(&p, a.cap);
        let run = trace(&h, &h.embed(s), &stream, a.length)?;
        print_trace(pr, "trace", p.output(), &run)
    } else {
        let run = trace(&p, &s, &stream, a.length)?;
        print_trace(pr, "trace", p.output(), &run)
    }
}

fn cmd_compose(a: &ComposeArgs, pr: &mut Printer) -> CliResult<()> {
    let left = load_processor(&a.left)?;
    let right = load_any(&a.right)?;
    let p = state_of(left.states(), a.state.first())?;
    let s = state_of(right.states(), a.state.get(1))?;
    let source = match right {
        AnySystem::Processor(upstream) => {
            if a.stream.is_none() && !a.state.is_empty() {
                return Err(CliError::Usage("--state only selects where to start a trace; pass --stream".into()));
            }
            let (composite, start) = match a.method {
                ComposeMethod::Lazy => (compose_lazy(&left, &upstream)?, pair_index(&upstream, p, s)),
                ComposeMethod::Hgp => {
                    let c = compose_hgp(&left, &upstream, a.cap)?;
                    let start = c.start(p, s);
                    (c.processor, start)
                }
            };
            return match &a.stream {
                Some(path) => {
                    let stream = load_stream(path, composite.input())?;
                    let run = trace(&composite, &start, &stream, a.length)?;
                    print_trace(pr, "compose", composite.output(), &run)
                }
                None => print_system(pr, &AnySystem::Processor(composite)),
            };
        }
        AnySystem::Lts(l) => AnySystem::Lts(tensor_source(&left, &l)?),
        AnySystem::Generative(g) => AnySystem::Generative(tensor_source(&left, &g)?),
    };
    if a.method == ComposeMethod::Hgp {
        return Err(CliError::Usage("--method hgp composes two processors; sources use the lazy tensor".into()));
    }
    print_system(pr, &source)
}

fn print_system(pr: &mut Printer, system: &AnySystem) -> CliResult<()> {
    let v = system_to_json(system);
    pr.emit(
        || serde_json::to_string_pretty(&v).expect("JSON values serialize"),
        || json!({"command": "compose", "system": v}),
    )
}

fn cmd_normalize(a: &NormalizeArgs, pr: &mut Printer) -> CliResult<()> {
    let p = load_processor(&a.system)?;
    let s = state_of(p.states(), a.state.as_ref())?;
    let h = Hypernormal::with_cap(&p, a.cap);
    let start = h.embed(s);
    let step = step_tree(&h, &start)?;
    let rendered = render_lazy_step(&p, &h, &step);
    let step_json = lazy_step_json(&p, &h, &step);
    pr.emit(|| format!("step {rendered}"), || json!({"command": "normalize", "step": step_json}))?;
    if let Some(path) = &a.stream {
        let stream = load_stream(path, p.input())?;
        let run = trace(&h, &start, &stream, a.length)?;
        print_trace(pr, "trace", p.output(), &run)?;
    }
    Ok(())
}

fn render_cont(p: &Processor, t: &Term<usize>) -> String {
    t.fold(&mut |&s| p.states()[s].clone(), &mut |_, children| format!("read({})", children.join(", ")))
}

fn render_lazy_step(p: &Processor, h: &Hypernormal<&Processor>, step: &Term<(usize, crate::extensional::ContId)>) -> String {
    step.fold(
        &mut |&(b, k)| format!("({}, {})", p.output().name(b), render_cont(p, &h.describe(k))),
        &mut |_, children| format!("read({})", children.join(", ")),
    )
}

fn lazy_step_json(p: &Processor, h: &Hypernormal<&Processor>, step: &Term<(usize, crate::extensional::ContId)>) -> Value {
    step.fold(
        &mut |&(b, k)| {
            let cont = h.describe(k).fold(&mut |&s| json!({ "var": p.states()[s] }), &mut |_, cs| json!({ "read": cs }));
            json!({"emit": [p.output().name(b), cont]})
        },
        &mut |_, children| json!({ "read": children }),
    )
}

fn cmd_equiv(a: &EquivArgs, pr: &mut Printer) -> CliResult<()> {
    let left = load_any(&a.left)?;
    let right = load_any(&a.right)?;
    let s1 = state_of(left.states(), a.state.first())?;
    let s2 = state_of(right.states(), a.state.get(1))?;
    match a.method {
        EquivMethod::Bisim => {
            let same = match (&left, &right) {
                (AnySystem::Processor(l), AnySystem::Processor(r)) => l.bisimilar(s1, r, s2)?,
                (AnySystem::Lts(l), AnySystem::Lts(r)) => l.bisimilar(s1, r, s2)?,
                (AnySystem::Generative(l), AnySystem::Generative(r)) => l.bisimilar(s1, r, s2)?,
                (l, r) => return Err(Error::TheoryMismatch(l.kind().name(), r.kind().name()).into()),
            };
            let verdict = if same { "bisimilar" } else { "not bisimilar" };
            pr.emit(|| verdict.to_string(), || json!({"command": "equiv", "method": "bisim", "bisimilar": same}))
        }
        EquivMethod::Trace => {
            let (l, r) = match (&left, &right) {
                (AnySystem::Processor(l), AnySystem::Processor(r)) => (l, r),
                (AnySystem::Processor(_), other) | (other, _) => {
                    return Err(Error::TheoryMismatch("processor", other.kind().name()).into())
                }
            };
            l.input().expect_same("left input", r.input(), "right input")?;
            l.output().expect_same("left output", r.output(), "right output")?;
            let verdict = trace_equivalent(l, &s1, r, &s2, a.depth, a.outlen)?;
            let mut sampled = Sampled::default();
            if let (Some(seed), true) = (a.seed, verdict.is_equivalent()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let size = l.input().len();
                for _ in 0..64 {
                    let prefix: Vec<usize> = (0..rng.gen_range(0..=a.depth + 2)).map(|_| rng.gen_range(0..size)).collect();
                    let cycle: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..size)).collect();
                    let stream = StreamOracle::periodic(prefix.clone(), cycle.clone())?;
                    sampled.count += 1;
                    let x = trace(l, &s1, &stream, a.outlen)?.output;
                    let y = trace(r, &s2, &stream, a.outlen)?.output;
                    if x != y {
                        sampled.failure = Some(SampledFailure { prefix, cycle, left: x, right: y });
                        break;
                    }
                }
            }
            print_verdict(pr, l, &verdict, &sampled)
        }
    }
}

/// Extra comparisons on seeded random streams, and the first that failed.
#[derive(Default)]
struct Sampled {
    count: usize,
    failure: Option<SampledFailure>,
}

struct SampledFailure {
    prefix: Vec<usize>,
    cycle: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn print_verdict(pr: &mut Printer, p: &Processor, v: &TraceVerdict, sampled: &Sampled) -> CliResult<()> {
    let (input, out) = (p.input(), p.output());
    let text = || match (&v.counterexample, &sampled.failure) {
        (Some(c), _) => format!(
            "not equivalent at ({}, {}): on {} then {} forever, left gives {} but right gives {}",
            v.depth,
            v.outlen,
            words_text(input, &c.prefix),
            input.name(c.tail),
            words_text(out, &c.left),
            words_text(out, &c.right)
        ),
        (None, Some(f)) => format!(
            "{v}, but not on the sampled stream {} ({}) repeated: left gives {} but right gives {}",
            words_text(input, &f.prefix),
            words_text(input, &f.cycle),
            words_text(out, &f.left),
            words_text(out, &f.right)
        ),
        (None, None) if sampled.count > 0 => format!("{v} and on {} sampled streams", sampled.count),
        (None, None) => v.to_string(),
    };
    let record = || {
        let mut r = json!({
            "command": "equiv",
            "method": "trace",
            "depth": v.depth,
            "outlen": v.outlen,
            "equivalent": v.is_equivalent() && sampled.failure.is_none(),
            "sampled": sampled.count,
        });
        if let Some(c) = &v.counterexample {
            r["counterexample"] = json!({
                "prefix": input.render(&c.prefix),
                "cycle": [input.name(c.tail)],
                "left": out.render(&c.left),
                "right": out.render(&c.right),
            });
        } else if let Some(f) = &sampled.failure {
            r["counterexample"] = json!({
                "prefix": input.render(&f.prefix),
                "cycle": input.render(&f.cycle),
                "left": out.render(&f.left),
                "right": out.render(&f.right),
            });
        }
        r
    };
    pr.emit(text, record)
}

fn cmd_unfold(a: &UnfoldArgs, pr: &mut Printer) -> CliResult<()> {
    let p = load_processor(&a.system)?;
    let s = state_of(p.states(), a.state.as_ref())?;
    let tree = if a.normalized {
        let h = Hypernormal::with_cap(&p, a.cap);
        unfold_intensional(&h, &h.embed(s), a.depth, a.outlen)?
    } else {
        unfold_intensional(&p, &s, a.depth, a.outlen)?
    };
    pr.emit(
        || tree.render(p.input().tokens(), p.output().tokens()),
        || json!({"command": "unfold", "depth": a.depth, "outlen": a.outlen, "tree": tree_json(&p, &tree)}),
    )
}

fn tree_json(p: &Processor, node: &IntensionalNode) -> Value {
    json!({
        "emitted": p.output().render(&node.emitted),
        "children": node.children.as_ref().map(|cs| cs.iter().map(|c| tree_json(p, c)).collect::<Vec<_>>()),
    })
}

fn cmd_lts_traces(a: &PrefixArgs, pr: &mut Printer) -> CliResult<()> {
    let AnySystem::Lts(l) = load_any(&a.system)? else {
        return Err(Error::TheoryMismatch("lts", "different kind of system").into());
    };
    let s = state_of(l.states(), a.state.as_ref())?;
    let traces = lts_trace_set(&l, s, a.length);
    pr.emit(
        || {
            let mut lines: Vec<String> = traces.iter().map(|w| words_text(l.output(), w)).collect();
            lines.push(format!("{} traces of length {}", traces.len(), a.length));
            lines.join("\n")
        },
        || {
            let all: Vec<Vec<String>> = traces.iter().map(|w| l.output().render(w)).collect();
            json!({"command": "lts-traces", "length": a.length, "traces": all})
        },
    )
}

fn cmd_gen_dist(a: &PrefixArgs, pr: &mut Printer) -> CliResult<()> {
    let AnySystem::Generative(g) = load_any(&a.system)? else {
        return Err(Error::TheoryMismatch("generative", "different kind of system").into());
    };
    let s = state_of(g.states(), a.state.as_ref())?;
    let dist = gen_prefix_dist(&g, s, a.length);
    let total = dist.total();
    pr.emit(
        || {
            let mut lines: Vec<String> = dist.iter().map(|(w, p)| format!("{}\t{p}", words_text(g.output(), w))).collect();
            lines.push(format!("total {total}"));
            lines.join("\n")
        },
        || {
            let entries: Vec<Value> = dist
                .iter()
                .map(|(w, p)| json!({"prefix": g.output().render(w), "weight": p.to_string()}))
                .collect();
            json!({"command": "gen-dist", "length": a.length, "distribution": entries, "total": total.to_string()})
        },
    )
}

fn cmd_member(a: &MemberArgs, pr: &mut Printer) -> CliResult<()> {
    let alphabet = if !a.alphabet.is_empty() {
        Alphabet::new(a.alphabet.iter().cloned())?
    } else if let Some(path) = &a.system {
        let doc = read_value(path)?;
        let shown = path.display().to_string();
        if doc.get("kind").is_some() {
            match system_from_json(&shown, &doc)? {
                AnySystem::Processor(p) => p.input().clone(),
                other => return Err(Error::TheoryMismatch("processor", other.kind().name()).into()),
            }
        } else {
            comodel_from_json(&shown, &doc)?.alphabet().expect("comodel files describe input comodels").clone()
        }
    } else {
        return Err(CliError::Usage("member needs --alphabet or --system to know the input tokens".into()));
    };
    let term = load_term(&a.term, &Signature::input(alphabet.len()))?;
    let stream = load_stream(&a.stream, &alphabet)?;
    let member = subbasic_member(&term, &a.value, &stream);
    debug_assert_eq!(member, run_on_stream(&term, &stream).0 == a.value);
    pr.emit(|| member.to_string(), || json!({"command": "member", "value": a.value, "member": member}))
}
