//! JSON file formats for systems, comodels, streams and terms.
//!
//! Documents are parsed to [`serde_json::Value`] first so every structural
//! problem can be reported with the path of the offending field. Tokens
//! and state names may be written as strings or numbers.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::comodel::{Comodel, StreamOracle};
use crate::error::Error;
use crate::residual::{Generative, Lts, Processor};
use crate::theory::{Dist, Rational, ResidualKind, Signature, Term};

/// Problems with an input file. These are distinct from domain errors so
/// the CLI can give them their own exit status.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{path}:{line}:{column}: malformed JSON: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: field `{field}`: {message}")]
    Field { path: String, field: String, message: String },

    #[error("{path}: {source}")]
    Invariant { path: String, source: Error },
}

type Loaded<T> = std::result::Result<T, LoadError>;

/// A loaded residual comodel of any of the three kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySystem {
    Processor(Processor),
    Lts(Lts),
    Generative(Generative),
}

impl AnySystem {
    pub fn kind(&self) -> ResidualKind {
        match self {
            AnySystem::Processor(_) => ResidualKind::Processor,
            AnySystem::Lts(_) => ResidualKind::Lts,
            AnySystem::Generative(_) => ResidualKind::Generative,
        }
    }

    pub fn states(&self) -> &[String] {
        match self {
            AnySystem::Processor(p) => p.states(),
            AnySystem::Lts(l) => l.states(),
            AnySystem::Generative(g) => g.states(),
        }
    }

    pub fn output(&self) -> &Alphabet {
        match self {
            AnySystem::Processor(p) => p.output(),
            AnySystem::Lts(l) => l.output(),
            AnySystem::Generative(g) => g.output(),
        }
    }
}

/// Tracks where in the document a value sits, for diagnostics.
struct Ctx<'a> {
    path: &'a str,
}

impl Ctx<'_> {
    fn field(&self, field: &str, message: impl Into<String>) -> LoadError {
        LoadError::Field {
            path: self.path.to_string(),
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn invariant(&self, e: Error) -> LoadError {
        LoadError::Invariant {
            path: self.path.to_string(),
            source: e,
        }
    }

    fn object<'v>(&self, v: &'v Value, field: &str) -> Loaded<&'v Map<String, Value>> {
        v.as_object().ok_or_else(|| self.field(field, format!("expected an object, found {}", describe(v))))
    }

    fn array<'v>(&self, v: &'v Value, field: &str) -> Loaded<&'v Vec<Value>> {
        v.as_array().ok_or_else(|| self.field(field, format!("expected an array, found {}", describe(v))))
    }

    fn get<'v>(&self, obj: &'v Map<String, Value>, key: &str, field: &str) -> Loaded<&'v Value> {
        obj.get(key).ok_or_else(|| self.field(field, format!("missing required key `{key}`")))
    }

    fn name(&self, v: &Value, field: &str) -> Loaded<String> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(self.field(field, format!("expected a string or number, found {}", describe(other)))),
        }
    }

    fn names(&self, v: &Value, field: &str) -> Loaded<Vec<String>> {
        self.array(v, field)?
            .iter()
            .enumerate()
            .map(|(i, x)| self.name(x, &format!("{field}[{i}]")))
            .collect()
    }

    fn alphabet(&self, v: &Value, field: &str) -> Loaded<Alphabet> {
        Alphabet::new(self.names(v, field)?).map_err(|e| self.field(field, e.to_string()))
    }

    fn token(&self, alphabet: &Alphabet, v: &Value, field: &str) -> Loaded<usize> {
        let name = self.name(v, field)?;
        alphabet
            .index(&name)
            .map_err(|_| self.field(field, format!("unknown token `{name}`, expected one of {:?}", alphabet.tokens())))
    }

    fn state(&self, states: &HashMap<&str, usize>, v: &Value, field: &str) -> Loaded<usize> {
        let name = self.name(v, field)?;
        states
            .get(name.as_str())
            .copied()
            .ok_or_else(|| self.field(field, format!("unknown state `{name}`: it is not declared in `states`")))
    }

    fn integer(&self, v: &Value, field: &str) -> Loaded<BigInt> {
        match v {
            Value::Number(n) if n.is_i64() || n.is_u64() => {
                Ok(n.as_i64().map(BigInt::from).unwrap_or_else(|| BigInt::from(n.as_u64().unwrap_or(0))))
            }
            Value::String(s) => s.parse().map_err(|_| self.field(field, format!("`{s}` is not an integer"))),
            other => Err(self.field(field, format!("expected an integer, found {}", describe(other)))),
        }
    }

    fn tuple<'v>(&self, v: &'v Value, len: usize, field: &str) -> Loaded<&'v [Value]> {
        let items = self.array(v, field)?;
        if items.len() != len {
            return Err(self.field(field, format!("expected {len} entries, found {}", items.len())));
        }
        Ok(items)
    }
}

fn describe(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn read_json(path: &Path) -> Loaded<Value> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: shown.clone(),
        message: e.to_string(),
    })?;
    parse_json(&shown, &text)
}

pub fn parse_json(path: &str, text: &str) -> Loaded<Value> {
    serde_json::from_str(text).map_err(|e| LoadError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load_system(path: &Path) -> Loaded<AnySystem> {
    system_from_json(&path.display().to_string(), &read_json(path)?)
}

pub fn system_from_json(path: &str, v: &Value) -> Loaded<AnySystem> {
    let cx = Ctx { path };
    let obj = cx.object(v, "$")?;
    let kind = cx.name(cx.get(obj, "kind", "kind")?, "kind")?;
    let output = cx.alphabet(cx.get(obj, "outputAlphabet", "outputAlphabet")?, "outputAlphabet")?;
    let states = cx.names(cx.get(obj, "states", "states")?, "states")?;
    let mut index = HashMap::new();
    for (i, s) in states.iter().enumerate() {
        if index.insert(s.as_str(), i).is_some() {
            return Err(cx.field(&format!("states[{i}]"), format!("state `{s}` is declared twice")));
        }
    }
    let gamma = cx.object(cx.get(obj, "gamma", "gamma")?, "gamma")?;
    for key in gamma.keys() {
        if !index.contains_key(key.as_str()) {
            return Err(cx.field(&format!("gamma.{key}"), format!("unknown state `{key}`: it is not declared in `states`")));
        }
    }
    let entry = |s: &str| -> Loaded<&Value> {
        gamma
            .get(s)
            .ok_or_else(|| cx.field("gamma", format!("gamma must be total: no entry for state `{s}`")))
    };
    match kind.as_str() {
        "processor" => {
            let input = cx.alphabet(cx.get(obj, "inputAlphabet", "inputAlphabet")?, "inputAlphabet")?;
            let mut table = Vec::with_capacity(states.len());
            for s in &states {
                table.push(processor_term(&cx, &input, &output, &index, entry(s)?, &format!("gamma.{s}"))?);
            }
            Processor::processor(input, output, states, table)
                .map(AnySystem::Processor)
                .map_err(|e| cx.invariant(e))
        }
        "lts" => {
            let mut table = Vec::with_capacity(states.len());
            for s in &states {
                let field = format!("gamma.{s}");
                let mut set = BTreeSet::new();
                for (i, pair) in cx.array(entry(s)?, &field)?.iter().enumerate() {
                    let f = format!("{field}[{i}]");
                    let items = cx.tuple(pair, 2, &f)?;
                    set.insert((cx.token(&output, &items[0], &f)?, cx.state(&index, &items[1], &f)?));
                }
                table.push(set);
            }
            Lts::lts(output, states, table).map(AnySystem::Lts).map_err(|e| cx.invariant(e))
        }
        "generative" => {
            let mut table = Vec::with_capacity(states.len());
            for s in &states {
                let field = format!("gamma.{s}");
                let mut weights = Vec::new();
                for (i, quad) in cx.array(entry(s)?, &field)?.iter().enumerate() {
                    let f = format!("{field}[{i}]");
                    let items = cx.tuple(quad, 4, &f)?;
                    let num = cx.integer(&items[2], &f)?;
                    let den = cx.integer(&items[3], &f)?;
                    if den == BigInt::from(0) {
                        return Err(cx.field(&f, "denominator is zero"));
                    }
                    weights.push(((cx.token(&output, &items[0], &f)?, cx.state(&index, &items[1], &f)?), Rational::new(num, den)));
                }
                let dist = Dist::new(weights).map_err(|e| {
                    cx.invariant(Error::Invariant(format!("gamma({s}): {}", e.to_string().trim_start_matches("invalid distribution: "))))
                })?;
                table.push(dist);
            }
            Generative::generative(output, states, table)
                .map(AnySystem::Generative)
                .map_err(|e| cx.invariant(e))
        }
        other => Err(cx.field("kind", format!("unknown kind `{other}`, expected processor, lts or generative"))),
    }
}

fn processor_term(
    cx: &Ctx,
    input: &Alphabet,
    output: &Alphabet,
    states: &HashMap<&str, usize>,
    v: &Value,
    field: &str,
) -> Loaded<Term<(usize, usize)>> {
    let obj = cx.object(v, field)?;
    if let Some(e) = obj.get("emit") {
        let f = format!("{field}.emit");
        let items = cx.tuple(e, 2, &f)?;
        return Ok(Term::Var((cx.token(output, &items[0], &f)?, cx.state(states, &items[1], &f)?)));
    }
    if let Some(r) = obj.get("read") {
        let f = format!("{field}.read");
        let children = cx.array(r, &f)?;
        if children.len() != input.len() {
            return Err(cx.field(
                &f,
                format!("`read` must have one branch per input token ({}), found {}", input.len(), children.len()),
            ));
        }
        return children
            .iter()
            .enumerate()
            .map(|(i, c)| processor_term(cx, input, output, states, c, &format!("{f}[{i}]")))
            .collect::<Loaded<Vec<_>>>()
            .map(Term::read);
    }
    Err(cx.field(field, "expected {\"emit\": [token, state]} or {\"read\": [...]}"))
}

pub fn system_to_json(system: &AnySystem) -> Value {
    match system {
        AnySystem::Processor(p) => {
            let gamma: Map<String, Value> = p
                .states()
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), processor_term_json(p, p.gamma(i))))
                .collect();
            json!({
                "kind": "processor",
                "inputAlphabet": p.input().tokens(),
                "outputAlphabet": p.output().tokens(),
                "states": p.states(),
                "gamma": gamma,
            })
        }
        AnySystem::Lts(l) => {
            let gamma: Map<String, Value> = l
                .states()
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let pairs: Vec<Value> = l
                        .gamma(i)
                        .iter()
                        .map(|&(b, t)| json!([l.output().name(b), l.states()[t]]))
                        .collect();
                    (s.clone(), Value::Array(pairs))
                })
                .collect();
            json!({"kind": "lts", "outputAlphabet": l.output().tokens(), "states": l.states(), "gamma": gamma})
        }
        AnySystem::Generative(g) => {
            let gamma: Map<String, Value> = g
                .states()
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let quads: Vec<Value> = g
                        .gamma(i)
                        .iter()
                        .map(|(&(b, t), w)| json!([g.output().name(b), g.states()[t], integer_json(w.numer()), integer_json(w.denom())]))
                        .collect();
                    (s.clone(), Value::Array(quads))
                })
                .collect();
            json!({"kind": "generative", "outputAlphabet": g.output().tokens(), "states": g.states(), "gamma": gamma})
        }
    }
}

fn integer_json(n: &BigInt) -> Value {
    i64::try_from(n).map(Value::from).unwrap_or_else(|_| Value::String(n.to_string()))
}

fn processor_term_json(p: &Processor, t: &Term<(usize, usize)>) -> Value {
    t.fold(
        &mut |&(b, s)| json!({"emit": [p.output().name(b), p.states()[s]]}),
        &mut |_, children| json!({ "read": children }),
    )
}

pub fn load_stream(path: &Path, alphabet: &Alphabet) -> Loaded<StreamOracle> {
    stream_from_json(&path.display().to_string(), &read_json(path)?, alphabet)
}

pub fn stream_from_json(path: &str, v: &Value, alphabet: &Alphabet) -> Loaded<StreamOracle> {
    let cx = Ctx { path };
    let obj = cx.object(v, "$")?;
    let tokens = |key: &str| -> Loaded<Vec<usize>> {
        let list = match obj.get(key) {
            Some(l) => cx.array(l, key)?,
            None if key == "prefix" => return Ok(Vec::new()),
            None => return Err(cx.field(key, format!("missing required key `{key}`"))),
        };
        list.iter()
            .enumerate()
            .map(|(i, t)| cx.token(alphabet, t, &format!("{key}[{i}]")))
            .collect()
    };
    let prefix = tokens("prefix")?;
    let cycle = tokens("cycle")?;
    if cycle.is_empty() {
        return Err(cx.field("cycle", "the cycle of a stream must be non-empty"));
    }
    StreamOracle::periodic(prefix, cycle).map_err(|e| cx.invariant(e))
}

/// Serializes a periodic stream; callback streams have no file form.
pub fn stream_to_json(stream: &StreamOracle, alphabet: &Alphabet) -> Option<Value> {
    match stream {
        StreamOracle::Periodic { prefix, cycle } => Some(json!({
            "prefix": alphabet.render(prefix),
            "cycle": alphabet.render(cycle),
        })),
        StreamOracle::Callback { .. } => None,
    }
}

pub fn load_comodel(path: &Path) -> Loaded<Comodel> {
    comodel_from_json(&path.display().to_string(), &read_json(path)?)
}

pub fn comodel_from_json(path: &str, v: &Value) -> Loaded<Comodel> {
    let cx = Ctx { path };
    let obj = cx.object(v, "$")?;
    let alphabet = cx.alphabet(cx.get(obj, "alphabet", "alphabet")?, "alphabet")?;
    let states = cx.names(cx.get(obj, "states", "states")?, "states")?;
    let index: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let read = cx.object(cx.get(obj, "read", "read")?, "read")?;
    for key in read.keys() {
        if !index.contains_key(key.as_str()) {
            return Err(cx.field(&format!("read.{key}"), format!("unknown state `{key}`: it is not declared in `states`")));
        }
    }
    let mut table = Vec::with_capacity(states.len());
    for s in &states {
        let f = format!("read.{s}");
        let entry = read
            .get(s)
            .ok_or_else(|| cx.field("read", format!("the read table must be total: no entry for state `{s}`")))?;
        let items = cx.tuple(entry, 2, &f)?;
        table.push((cx.token(&alphabet, &items[0], &f)?, cx.state(&index, &items[1], &f)?));
    }
    Comodel::input(alphabet, states.clone(), table).map_err(|e| cx.invariant(e))
}

pub fn comodel_to_json(m: &Comodel) -> Option<Value> {
    let alphabet = m.alphabet()?;
    let read: Map<String, Value> = m
        .read_table()?
        .iter()
        .zip(m.states())
        .map(|(&(a, next), s)| (s.clone(), json!([alphabet.name(a), m.states()[next]])))
        .collect();
    Some(json!({"alphabet": alphabet.tokens(), "states": m.states(), "read": read}))
}

pub fn load_term(path: &Path, signature: &Signature) -> Loaded<Term<String>> {
    term_from_json(&path.display().to_string(), &read_json(path)?, signature)
}

/// Reads `{"var": v}`, `{"op": name, "args": [...]}`, or for a signature
/// with a `read` operation the shorthand `{"read": [...]}`.
pub fn term_from_json(path: &str, v: &Value, signature: &Signature) -> Loaded<Term<String>> {
    let cx = Ctx { path };
    let term = parse_term(&cx, v, signature, "$")?;
    signature.check(&term).map_err(|e| cx.invariant(e))?;
    Ok(term)
}

fn parse_term(cx: &Ctx, v: &Value, signature: &Signature, field: &str) -> Loaded<Term<String>> {
    let obj = cx.object(v, field)?;
    if let Some(x) = obj.get("var") {
        return Ok(Term::Var(cx.name(x, &format!("{field}.var"))?));
    }
    let (name, args, f) = if let Some(op) = obj.get("op") {
        let f = format!("{field}.args");
        (cx.name(op, &format!("{field}.op"))?, cx.array(cx.get(obj, "args", &f)?, &f)?, f)
    } else if let Some(args) = obj.get("read") {
        let f = format!("{field}.read");
        ("read".to_string(), cx.array(args, &f)?, f)
    } else {
        return Err(cx.field(field, "expected {\"var\": ...}, {\"op\": ..., \"args\": [...]} or {\"read\": [...]}"));
    };
    let op = signature.lookup(&name).map_err(|e| cx.field(field, e.to_string()))?;
    let children = args
        .iter()
        .enumerate()
        .map(|(i, a)| parse_term(cx, a, signature, &format!("{f}[{i}]")))
        .collect::<Loaded<Vec<_>>>()?;
    Ok(Term::App(op, children))
}

pub fn term_to_json(t: &Term<String>, signature: &Signature) -> Value {
    t.fold(&mut |v| json!({ "var": v }), &mut |op, children| {
        let name = signature.op(op).map(|o| o.name.as_str()).unwrap_or("?");
        if name == "read" {
            json!({ "read": children })
        } else {
            json!({"op": name, "args": children})
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_generative, random_lts, random_processor, SampleConfig};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn load(text: &str) -> Loaded<AnySystem> {
        system_from_json("test.json", &parse_json("test.json", text)?)
    }

    const ECHO: &str = r#"{
        "kind": "processor",
        "inputAlphabet": [0, 1],
        "outputAlphabet": ["0", "1"],
        "states": ["e"],
        "gamma": {"e": {"read": [{"emit": [0, "e"]}, {"emit": ["1", "e"]}]}}
    }"#;

    #[test]
    fn loads_echo() {
        let AnySystem::Processor(p) = load(ECHO).unwrap() else { panic!() };
        assert_eq!(p.gamma(0), &Term::read_with(2, |a| Term::Var((a, 0))));
        assert_eq!(p.input().tokens(), &["0".to_string(), "1".to_string()]);
    }

    #[test]
    fn mass_conservation_is_named() {
        let err = load(
            r#"{"kind": "generative", "outputAlphabet": ["x"], "states": ["g"],
                "gamma": {"g": [["x", "g", 9, 10]]}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, LoadError::Invariant { .. }));
        assert!(err.to_string().contains("mass conservation"), "{err}");
    }

    #[test]
    fn undeclared_state_is_named() {
        let err = load(
            r#"{"kind": "lts", "outputAlphabet": ["a"], "states": ["p0"],
                "gamma": {"p0": [["a", "ghost"]]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("`ghost`"), "{err}");
        assert!(err.to_string().contains("gamma.p0[0]"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = load("{\n  \"kind\": \"lts\",\n  oops\n}").unwrap_err();
        let LoadError::Parse { line, .. } = err else { panic!("{err}") };
        assert_eq!(line, 3);
    }

    #[test]
    fn shape_errors() {
        assert!(load(r#"{"kind": "nope", "outputAlphabet": [], "states": [], "gamma": {}}"#).is_err());
        let partial = load(r#"{"kind": "lts", "outputAlphabet": ["a"], "states": ["p", "q"], "gamma": {"p": [["a", "p"]]}}"#);
        assert!(partial.unwrap_err().to_string().contains("total"));
        let short = load(
            r#"{"kind": "processor", "inputAlphabet": ["a", "b"], "outputAlphabet": ["a"], "states": ["s"],
                "gamma": {"s": {"read": [{"emit": ["a", "s"]}]}}}"#,
        );
        assert!(short.unwrap_err().to_string().contains("one branch per input token"));
        let empty = load(r#"{"kind": "lts", "outputAlphabet": ["a"], "states": ["p"], "gamma": {"p": []}}"#);
        assert!(matches!(empty, Err(LoadError::Invariant { .. })));
    }

    #[test]
    fn stream_and_comodel_formats() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let v = parse_json("s", r#"{"prefix": ["x"], "cycle": ["y", "x"]}"#).unwrap();
        let s = stream_from_json("s", &v, &a).unwrap();
        assert_eq!(s.take(5), vec![0, 1, 0, 1, 0]);
        assert_eq!(stream_to_json(&s, &a).unwrap(), v);
        let bad = parse_json("s", r#"{"prefix": [], "cycle": []}"#).unwrap();
        assert!(stream_from_json("s", &bad, &a).is_err());

        let v = parse_json("m", r#"{"alphabet": [3, 6, 11], "states": ["s", "s'", "s''"],
            "read": {"s": [3, "s'"], "s'": [6, "s''"], "s''": [11, "s''"]}}"#)
        .unwrap();
        let m = comodel_from_json("m", &v).unwrap();
        assert_eq!(m.probe(0).stream(4), vec![0, 1, 2, 2]);
        let again = comodel_from_json("m", &comodel_to_json(&m).unwrap()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn term_format() {
        let sig = Signature::input(2);
        let v = parse_json("t", r#"{"read": [{"var": "p"}, {"op": "read", "args": [{"var": "q"}, {"var": "p"}]}]}"#).unwrap();
        let t = term_from_json("t", &v, &sig).unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(term_from_json("t", &term_to_json(&t, &sig), &sig).unwrap(), t);
        let bad = parse_json("t", r#"{"read": [{"var": "p"}]}"#).unwrap();
        assert!(term_from_json("t", &bad, &sig).is_err());
        let unknown = parse_json("t", r#"{"op": "write", "args": []}"#).unwrap();
        assert!(term_from_json("t", &unknown, &sig).is_err());
    }

    proptest! {
        #[test]
        fn systems_round_trip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cfg = SampleConfig::default();
            for system in [
                AnySystem::Processor(random_processor(&mut rng, &cfg)),
                AnySystem::Lts(random_lts(&mut rng, &cfg)),
                AnySystem::Generative(random_generative(&mut rng, &cfg)),
            ] {
                let text = serde_json::to_string_pretty(&system_to_json(&system)).unwrap();
                prop_assert_eq!(load(&text).unwrap(), system);
            }
        }
    }
}
