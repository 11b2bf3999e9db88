//! Comodels as deterministic evaluation machines, streams as the final
//! comodel of the input theory, and membership in the sub-basic open sets
//! of the operational topology.

use std::fmt;
use std::sync::Arc;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::theory::{OpId, Signature, Term, READ};

/// An infinite stream of token indices.
///
/// `Periodic` streams (a finite prefix followed by a repeated cycle) are the
/// finitely describable ones; `Callback` streams wrap a pure function of the
/// position.
#[derive(Clone)]
pub enum StreamOracle {
    Periodic {
        prefix: Vec<usize>,
        cycle: Vec<usize>,
    },
    Callback {
        at: Arc<dyn Fn(usize) -> usize + Send + Sync>,
        offset: usize,
    },
}

impl StreamOracle {
    pub fn periodic(prefix: Vec<usize>, cycle: Vec<usize>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Invariant("stream cycle must be non-empty".into()));
        }
        Ok(StreamOracle::Periodic { prefix, cycle })
    }

    pub fn constant(token: usize) -> Self {
        StreamOracle::Periodic {
            prefix: Vec::new(),
            cycle: vec![token],
        }
    }

    /// `prefix` followed by the constant stream on `tail`.
    pub fn with_constant_tail(prefix: Vec<usize>, tail: usize) -> Self {
        StreamOracle::Periodic {
            prefix,
            cycle: vec![tail],
        }
    }

    pub fn callback(f: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        StreamOracle::Callback {
            at: Arc::new(f),
            offset: 0,
        }
    }

    pub fn at(&self, i: usize) -> usize {
        match self {
            StreamOracle::Periodic { prefix, cycle } => {
                if i < prefix.len() {
                    prefix[i]
                } else {
                    cycle[(i - prefix.len()) % cycle.len()]
                }
            }
            StreamOracle::Callback { at, offset } => at(offset + i),
        }
    }

    pub fn head(&self) -> usize {
        self.at(0)
    }

    /// `∂ᵏ`: the stream with its first `k` tokens removed.
    pub fn drop(&self, k: usize) -> Self {
        match self {
            StreamOracle::Periodic { prefix, cycle } => {
                if k <= prefix.len() {
                    StreamOracle::Periodic {
                        prefix: prefix[k..].to_vec(),
                        cycle: cycle.clone(),
                    }
                } else {
                    let r = (k - prefix.len()) % cycle.len();
                    let mut rotated = cycle[r..].to_vec();
                    rotated.extend_from_slice(&cycle[..r]);
                    StreamOracle::Periodic {
                        prefix: Vec::new(),
                        cycle: rotated,
                    }
                }
            }
            StreamOracle::Callback { at, offset } => StreamOracle::Callback {
                at: Arc::clone(at),
                offset: offset + k,
            },
        }
    }

    pub fn tail(&self) -> Self {
        self.drop(1)
    }

    pub fn take(&self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// The comodel with one state per position of a periodic stream: its
    /// initial state `0` has exactly this stream as behaviour.
    pub fn to_comodel(&self, alphabet: &Alphabet) -> Option<Comodel> {
        let StreamOracle::Periodic { prefix, cycle } = self else {
            return None;
        };
        let n = prefix.len() + cycle.len();
        let table = (0..n)
            .map(|i| {
                let token = if i < prefix.len() { prefix[i] } else { cycle[i - prefix.len()] };
                let next = if i + 1 < n { i + 1 } else { prefix.len() };
                (token, next)
            })
            .collect();
        let states = (0..n).map(|i| format!("@{i}")).collect();
        Comodel::input(alphabet.clone(), states, table).ok()
    }

    /// Checks every token of a periodic stream is below `size`.
    pub fn check_alphabet(&self, size: usize) -> Result<()> {
        if let StreamOracle::Periodic { prefix, cycle } = self {
            if let Some(bad) = prefix.iter().chain(cycle).find(|&&t| t >= size) {
                return Err(Error::UnknownToken(format!("#{bad}")));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for StreamOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamOracle::Periodic { prefix, cycle } => write!(f, "{prefix:?}({cycle:?})^ω"),
            StreamOracle::Callback { offset, .. } => write!(f, "<callback +{offset}>"),
        }
    }
}

/// A comodel in sets: for each operation a total table sending a state to
/// a branch index and a next state.
#[derive(Clone, Debug, PartialEq)]
pub struct Comodel {
    signature: Signature,
    alphabet: Option<Alphabet>,
    states: Vec<String>,
    coops: Vec<Vec<(usize, usize)>>,
}

impl Comodel {
    pub fn new(signature: Signature, states: Vec<String>, coops: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        if coops.len() != signature.operations().len() {
            return Err(Error::Invariant(format!(
                "expected one co-operation table per operation ({}), found {}",
                signature.operations().len(),
                coops.len()
            )));
        }
        for (op, table) in signature.operations().iter().zip(&coops) {
            if table.len() != states.len() {
                return Err(Error::Invariant(format!(
                    "co-operation `{}` must be total: {} states but {} entries",
                    op.name,
                    states.len(),
                    table.len()
                )));
            }
            for &(branch, next) in table {
                if branch >= op.arity {
                    return Err(Error::Invariant(format!(
                        "co-operation `{}` answers branch {branch} but the arity is {}",
                        op.name, op.arity
                    )));
                }
                if next >= states.len() {
                    return Err(Error::Invariant(format!("next state #{next} is not declared")));
                }
            }
        }
        Ok(Self {
            signature,
            alphabet: None,
            states,
            coops,
        })
    }

    /// A comodel of the input theory: `read` sends each state to a token and
    /// a next state.
    pub fn input(alphabet: Alphabet, states: Vec<String>, read: Vec<(usize, usize)>) -> Result<Self> {
        let mut m = Self::new(Signature::input(alphabet.len()), states, vec![read])?;
        m.alphabet = Some(alphabet);
        Ok(m)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn alphabet(&self) -> Option<&Alphabet> {
        self.alphabet.as_ref()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn coop(&self, op: OpId, state: usize) -> (usize, usize) {
        self.coops[op.0][state]
    }

    pub fn read_table(&self) -> Option<&[(usize, usize)]> {
        self.alphabet.as_ref().map(|_| self.coops[READ.0].as_slice())
    }

    /// Derived co-operation `⟦t⟧(s)`: runs `t` from `s` using the tables to
    /// answer every request.
    ///
    /// `t` must be over this comodel's signature; [`Signature::check`]
    /// validates that up front.
    pub fn run_term<V: Clone>(&self, t: &Term<V>, s: usize) -> (V, usize) {
        let mut node = t;
        let mut state = s;
        loop {
            match node {
                Term::Var(v) => return (v.clone(), state),
                Term::App(op, args) => {
                    let (branch, next) = self.coops[op.0][state];
                    node = &args[branch];
                    state = next;
                }
            }
        }
    }

    pub fn probe(&self, state: usize) -> BehaviourProbe<'_> {
        BehaviourProbe { comodel: self, state }
    }
}

/// The admissible behaviour `β_s` of a state, represented by the state
/// itself.
#[derive(Clone, Copy, Debug)]
pub struct BehaviourProbe<'a> {
    pub comodel: &'a Comodel,
    pub state: usize,
}

impl BehaviourProbe<'_> {
    /// `β_s(t)`: the value returned by running `t` from the probed state.
    pub fn behaviour<V: Clone>(&self, t: &Term<V>) -> V {
        self.comodel.run_term(t, self.state).0
    }

    /// `(β(read), β(read ≫ read), ...)` truncated to `n` tokens. Only
    /// meaningful for input-theory comodels.
    pub fn stream(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n);
        let mut s = self.state;
        for _ in 0..n {
            let (token, next) = self.comodel.coop(READ, s);
            out.push(token);
            s = next;
        }
        out
    }
}

/// Runs an input-theory term against a stream, consuming one token per
/// `read`, returning the leaf reached and what remains of the stream.
pub fn run_on_stream<V: Clone>(t: &Term<V>, stream: &StreamOracle) -> (V, StreamOracle) {
    let mut node = t;
    let mut consumed = 0;
    loop {
        match node {
            Term::Var(v) => return (v.clone(), stream.drop(consumed)),
            Term::App(_, args) => {
                node = &args[stream.at(consumed)];
                consumed += 1;
            }
        }
    }
}

/// Membership of a stream in the sub-basic open set `[t ↦ v]`, by the
/// inductive description `[w ↦ v] = A^ℕ or ∅`,
/// `[read(λa. t_a) ↦ v] = { aW : W ∈ [t_a ↦ v] }`.
pub fn subbasic_member<V: PartialEq>(t: &Term<V>, v: &V, stream: &StreamOracle) -> bool {
    match t {
        Term::Var(w) => w == v,
        Term::App(_, args) => subbasic_member(&args[stream.head()], v, &stream.tail()),
    }
}

/// Whether two input-theory states return the same value on every term of
/// read-depth at most `depth`; equivalently, whether their behaviour
/// streams agree on the first `depth` tokens.
pub fn operationally_equivalent(m1: &Comodel, s1: usize, m2: &Comodel, s2: usize, depth: usize) -> bool {
    m1.probe(s1).stream(depth) == m2.probe(s2).stream(depth)
}
