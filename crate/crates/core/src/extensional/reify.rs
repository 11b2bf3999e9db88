//! Continuous functions on streams, presented by an evaluator and a
//! modulus, and the passage between them and processors.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, MutexGuard};

use super::arena::{NodeId, StepArena, StepNode};
use super::DEFAULT_CAP;
use crate::comodel::StreamOracle;
use crate::error::{Error, Result};
use crate::residual::{StepView, StreamProcessor};
use crate::tensor::trace;

type EvalFn = dyn Fn(&StreamOracle, usize) -> Result<Vec<usize>> + Send + Sync;
type ModulusFn = dyn Fn(usize, &[usize]) -> Result<usize> + Send + Sync;

/// A continuous `A^ℕ → B^ℕ`.
///
/// `modulus(k, w)` bounds how many tokens beyond the prefix `w` are needed
/// before output `k` is fixed: every stream extending `w·u` with
/// `|u| = modulus(k, w)` has the same output `k`.
#[derive(Clone)]
pub struct ContinuousFunction {
    eval: Arc<EvalFn>,
    modulus: Arc<ModulusFn>,
    input_size: usize,
    output_size: usize,
}

impl ContinuousFunction {
    pub fn new(
        input_size: usize,
        output_size: usize,
        eval: impl Fn(&StreamOracle, usize) -> Result<Vec<usize>> + Send + Sync + 'static,
        modulus: impl Fn(usize, &[usize]) -> Result<usize> + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            modulus: Arc::new(modulus),
            input_size,
            output_size,
        }
    }

    /// Builds a function from a pointwise description `out[k] = f(in, k)`.
    pub fn pointwise(
        input_size: usize,
        output_size: usize,
        f: impl Fn(&StreamOracle, usize) -> usize + Send + Sync + 'static,
        modulus: impl Fn(usize, &[usize]) -> usize + Send + Sync + 'static,
    ) -> Self {
        Self::new(
            input_size,
            output_size,
            move |s, n| Ok((0..n).map(|k| f(s, k)).collect()),
            move |k, w| Ok(modulus(k, w)),
        )
    }

    /// `ā ↦ b b b ...`.
    pub fn constant(input_size: usize, output_size: usize, b: usize) -> Self {
        Self::pointwise(input_size, output_size, move |_, _| b, |_, _| 0)
    }

    pub fn identity(size: usize) -> Self {
        Self::pointwise(size, size, |s, k| s.at(k), |k, w| (k + 1).saturating_sub(w.len()))
    }

    /// `∂`: drops the first token.
    pub fn tail(size: usize) -> Self {
        Self::pointwise(size, size, |s, k| s.at(k + 1), |k, w| (k + 2).saturating_sub(w.len()))
    }

    /// Binary `out[k] = in[2k] xor in[2k+1]`.
    pub fn pairwise_xor() -> Self {
        Self::pointwise(2, 2, |s, k| s.at(2 * k) ^ s.at(2 * k + 1), |k, w| (2 * k + 2).saturating_sub(w.len()))
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    /// The first `n` output tokens on `stream`.
    pub fn prefix(&self, stream: &StreamOracle, n: usize) -> Result<Vec<usize>> {
        let out = (self.eval)(stream, n)?;
        if out.len() != n {
            return Err(Error::Invariant(format!("evaluator returned {} tokens, {n} requested", out.len())));
        }
        Ok(out)
    }

    pub fn modulus(&self, k: usize, w: &[usize]) -> Result<usize> {
        (self.modulus)(k, w)
    }

    /// The whole output stream.
    ///
    /// # Panics
    ///
    /// Indexing the result panics if the evaluator fails.
    pub fn evaluate(&self, stream: &StreamOracle) -> StreamOracle {
        let eval = Arc::clone(&self.eval);
        let stream = stream.clone();
        StreamOracle::callback(move |i| eval(&stream, i + 1).expect("continuous function evaluation failed")[i])
    }
}

impl fmt::Debug for ContinuousFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContinuousFunction({} -> {} tokens)", self.input_size, self.output_size)
    }
}

/// The trace of a processor state as a continuous function, with the
/// least sound modulus.
pub fn reflect<P>(p: Arc<P>, s: P::State) -> ContinuousFunction
where
    P: StreamProcessor + Send + Sync + 'static,
    P::State: Send + Sync,
{
    let (input_size, output_size) = (p.input_size(), p.output_size());
    let (pe, se) = (Arc::clone(&p), s.clone());
    ContinuousFunction::new(
        input_size,
        output_size,
        move |stream, n| Ok(trace(&*pe, &se, stream, n)?.output),
        move |k, w| Determination::new(&*p).extra_depth(p.begin(&s)?, k, w, 0),
    )
}

/// Memoized exploration of a processor's step trees with the input left
/// open.
struct Determination<'a, P: StreamProcessor> {
    p: &'a P,
    reach: HashMap<(P::Cursor<'a>, usize), BTreeSet<usize>>,
    depth: HashMap<(P::Cursor<'a>, usize), usize>,
}

impl<'a, P: StreamProcessor> Determination<'a, P> {
    fn new(p: &'a P) -> Self {
        Self {
            p,
            reach: HashMap::new(),
            depth: HashMap::new(),
        }
    }

    /// Tokens that can appear `j` outputs after `c` on some input.
    fn reachable(&mut self, c: P::Cursor<'a>, j: usize) -> Result<BTreeSet<usize>> {
        if let Some(r) = self.reach.get(&(c.clone(), j)) {
            return Ok(r.clone());
        }
        let r = match self.p.view(&c) {
            StepView::Emit(b, _) if j == 0 => BTreeSet::from([b]),
            StepView::Emit(_, s) => self.reachable(self.p.begin(&s)?, j - 1)?,
            StepView::Read => {
                let mut all = BTreeSet::new();
                for a in 0..self.p.input_size() {
                    all.extend(self.reachable(self.p.descend(&c, a), j)?);
                }
                all
            }
        };
        self.reach.insert((c, j), r.clone());
        Ok(r)
    }

    /// Least `d` such that the `j`-th output after `c` is fixed by the rest
    /// of `w` (from position `pos`) followed by any `d` further tokens.
    fn extra_depth(&mut self, c: P::Cursor<'a>, j: usize, w: &[usize], pos: usize) -> Result<usize> {
        let mut c = c;
        let mut j = j;
        let mut pos = pos;
        loop {
            match self.p.view(&c) {
                StepView::Emit(..) if j == 0 => return Ok(0),
                StepView::Emit(_, s) => {
                    c = self.p.begin(&s)?;
                    j -= 1;
                }
                StepView::Read if pos < w.len() => {
                    c = self.p.descend(&c, w[pos]);
                    pos += 1;
                }
                StepView::Read => return self.open_depth(c, j),
            }
        }
    }

    fn open_depth(&mut self, c: P::Cursor<'a>, j: usize) -> Result<usize> {
        if let Some(&d) = self.depth.get(&(c.clone(), j)) {
            return Ok(d);
        }
        let d = match self.p.view(&c) {
            StepView::Emit(..) if j == 0 => 0,
            StepView::Emit(_, s) => self.open_depth(self.p.begin(&s)?, j - 1)?,
            StepView::Read if self.reachable(c.clone(), j)?.len() == 1 => 0,
            StepView::Read => {
                let mut worst = 0;
                for a in 0..self.p.input_size() {
                    worst = worst.max(self.open_depth(self.p.descend(&c, a), j)?);
                }
                worst + 1
            }
        };
        self.depth.insert((c, j), d);
        Ok(d)
    }
}

/// A state of a reified processor: the input consumed so far and the
/// number of outputs emitted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReifyState {
    pub prefix: Vec<usize>,
    pub emitted: usize,
}

impl ReifyState {
    pub fn initial() -> Self {
        Self {
            prefix: Vec::new(),
            emitted: 0,
        }
    }
}

struct ReifyTables {
    steps: StepArena<ReifyState>,
    stepped: HashMap<ReifyState, NodeId>,
}

/// The processor realizing a continuous function, reading only the input
/// each output genuinely depends on.
pub struct Reified {
    f: ContinuousFunction,
    cap: usize,
    tables: Mutex<ReifyTables>,
}

/// Builds the processor for `f`; its initial state is
/// [`ReifyState::initial`].
pub fn reify(f: ContinuousFunction) -> Reified {
    reify_with_cap(f, DEFAULT_CAP)
}

pub fn reify_with_cap(f: ContinuousFunction, cap: usize) -> Reified {
    Reified {
        f,
        cap,
        tables: Mutex::new(ReifyTables {
            steps: StepArena::new(),
            stepped: HashMap::new(),
        }),
    }
}

impl Reified {
    pub fn function(&self) -> &ContinuousFunction {
        &self.f
    }

    pub fn materialized(&self) -> usize {
        self.lock().stepped.len()
    }

    fn lock(&self) -> MutexGuard<'_, ReifyTables> {
        self.tables.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn step(&self, t: &mut ReifyTables, s: &ReifyState) -> Result<NodeId> {
        if let Some(&r) = t.stepped.get(s) {
            return Ok(r);
        }
        if t.stepped.len() >= self.cap {
            return Err(Error::CapExceeded {
                what: "reified states",
                cap: self.cap,
            });
        }
        let depth = self.f.modulus(s.emitted, &s.prefix)?;
        let mut word = s.prefix.clone();
        let r = self.build(t, &mut word, depth, s.emitted, depth)?;
        t.stepped.insert(s.clone(), r);
        Ok(r)
    }

    /// The depth-`left` read tree below `word`, each leaf deciding output
    /// `k`, collapsed to copower normal form as it is built.
    fn build(&self, t: &mut ReifyTables, word: &mut Vec<usize>, left: usize, k: usize, depth: usize) -> Result<NodeId> {
        if left == 0 {
            let b = self.decide(word, k, depth)?;
            return Ok(t.steps.emit(
                b,
                ReifyState {
                    prefix: word.clone(),
                    emitted: k + 1,
                },
            ));
        }
        let mut children = Vec::with_capacity(self.f.input_size);
        for a in 0..self.f.input_size {
            word.push(a);
            children.push(self.build(t, word, left - 1, k, depth)?);
            word.pop();
        }
        // A uniform subtree of extensions of `v` continues as `(v, k+1)`:
        // reading the next token on demand is what that state does anyway.
        Ok(t.steps.read(children, |mut conts| {
            let mut parent = conts.swap_remove(0);
            parent.prefix.pop();
            parent
        }))
    }

    fn decide(&self, word: &[usize], k: usize, depth: usize) -> Result<usize> {
        let first = self.f.prefix(&StreamOracle::with_constant_tail(word.to_vec(), 0), k + 1)?[k];
        let last_tail = self.f.input_size.saturating_sub(1);
        if last_tail != 0 {
            let other = self.f.prefix(&StreamOracle::with_constant_tail(word.to_vec(), last_tail), k + 1)?[k];
            if other != first {
                return Err(Error::UnsoundModulus {
                    output: k,
                    prefix: word.to_vec(),
                    depth,
                });
            }
        }
        if first >= self.f.output_size {
            return Err(Error::UnknownToken(format!("#{first} (output {k} of a reified function)")));
        }
        Ok(first)
    }
}

impl StreamProcessor for Reified {
    type State = ReifyState;
    type Cursor<'a> = NodeId;

    fn input_size(&self) -> usize {
        self.f.input_size
    }

    fn output_size(&self) -> usize {
        self.f.output_size
    }

    fn begin(&self, s: &ReifyState) -> Result<NodeId> {
        let mut t = self.lock();
        self.step(&mut t, s)
    }

    fn view(&self, c: &NodeId) -> StepView<ReifyState> {
        match self.lock().steps.get(*c) {
            StepNode::Emit(b, s) => StepView::Emit(*b, s.clone()),
            StepNode::Read(_) => StepView::Read,
        }
    }

    fn descend(&self, c: &NodeId, token: usize) -> NodeId {
        match self.lock().steps.get(*c) {
            StepNode::Read(children) => children[token],
            StepNode::Emit(..) => *c,
        }
    }
}

impl fmt::Debug for Reified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Reified")
            .field("f", &self.f)
            .field("cap", &self.cap)
            .field("materialized", &self.materialized())
            .finish()
    }
}
