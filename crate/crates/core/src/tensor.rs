//! Tensor products: a processor run against a stream, processors composed
//! with processors, and processors fed by transition systems or
//! generative sources.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::comodel::StreamOracle;
use crate::error::{Error, Result};
use crate::residual::{Processor, Residual, StepView, StreamProcessor};
use crate::theory::{Effect, Term};

/// The first `output.len()` tokens of a trace together with how much of
/// the input was used to produce them.
#[derive(Clone, Debug)]
pub struct TraceRun<S> {
    pub output: Vec<usize>,
    /// Input tokens consumed in total.
    pub consumed: usize,
    /// `profile[k]` is the number of tokens consumed when output `k` was
    /// emitted.
    pub profile: Vec<usize>,
    pub final_state: S,
    pub remaining: StreamOracle,
}

/// One step of `R ⊗ A^ℕ`: walk the step tree of `s`, answering each read
/// with the head of the stream.
pub fn step_tensor<P: StreamProcessor>(
    p: &P,
    s: &P::State,
    stream: &StreamOracle,
) -> Result<(usize, P::State, StreamOracle, usize)> {
    let mut cursor = p.begin(s)?;
    let mut consumed = 0;
    loop {
        match p.view(&cursor) {
            StepView::Emit(b, next) => return Ok((b, next, stream.drop(consumed), consumed)),
            StepView::Read => {
                cursor = p.descend(&cursor, stream.at(consumed));
                consumed += 1;
            }
        }
    }
}

/// The first `n` tokens of `tr(s)(ā)`.
pub fn trace<P: StreamProcessor>(p: &P, s: &P::State, stream: &StreamOracle, n: usize) -> Result<TraceRun<P::State>> {
    let mut output = Vec::with_capacity(n);
    let mut profile = Vec::with_capacity(n);
    let mut state = s.clone();
    let mut consumed = 0;
    for _ in 0..n {
        let mut cursor = p.begin(&state)?;
        loop {
            match p.view(&cursor) {
                StepView::Emit(b, next) => {
                    output.push(b);
                    profile.push(consumed);
                    state = next;
                    break;
                }
                StepView::Read => {
                    cursor = p.descend(&cursor, stream.at(consumed));
                    consumed += 1;
                }
            }
        }
    }
    Ok(TraceRun {
        output,
        consumed,
        profile,
        final_state: state,
        remaining: stream.drop(consumed),
    })
}

/// The whole output stream `tr(s)(ā)` as a lazily computed oracle.
///
/// # Panics
///
/// Indexing the oracle panics if a step of `p` fails, which for an
/// on-demand processor means its state cap was exceeded.
pub fn trace_oracle<P>(p: Arc<P>, s: P::State, stream: StreamOracle) -> StreamOracle
where
    P: StreamProcessor + Send + Sync + 'static,
    P::State: Send + Sync,
{
    let memo = Mutex::new((Vec::<usize>::new(), s, 0usize));
    StreamOracle::callback(move |i| {
        let mut guard = memo.lock().unwrap_or_else(|e| e.into_inner());
        let (out, state, consumed) = &mut *guard;
        while out.len() <= i {
            let (b, next, _, used) =
                step_tensor(&*p, state, &stream.drop(*consumed)).expect("processor step failed while producing a trace");
            out.push(b);
            *state = next;
            *consumed += used;
        }
        out[i]
    })
}

/// `P ⊗ S` for a processor `P: B → C` and a residual comodel `S` emitting
/// `B`: the state `(p, s)` has index `p·|S| + s` and steps by running
/// `θ_P(p)` through `S`.
pub fn tensor<E: Effect>(p: &Processor, s: &Residual<E>) -> Result<Residual<E>> {
    s.output().expect_same("upstream output", p.input(), "downstream input")?;
    let width = s.len();
    let mut states = Vec::with_capacity(p.len() * width);
    let mut gamma = Vec::with_capacity(p.len() * width);
    for (pi, pname) in p.states().iter().enumerate() {
        for (si, sname) in s.states().iter().enumerate() {
            states.push(format!("({pname},{sname})"));
            let run = s.derived_coop(p.gamma(pi), si)?;
            gamma.push(s.effect().map(&run, &mut |&((c, next_p), next_s)| (c, next_p * width + next_s)));
        }
    }
    Residual::new(s.effect().clone(), p.output().clone(), states, gamma)
}

/// Lazy composition `P ∘ S` of processors `S: A → B` and `P: B → C`.
pub fn compose_lazy(p: &Processor, s: &Processor) -> Result<Processor> {
    tensor(p, s)
}

/// Feeds a processor `P: A → B` from a transition system or generative
/// source over `A`.
pub fn tensor_source<E: Effect>(p: &Processor, source: &Residual<E>) -> Result<Residual<E>> {
    tensor(p, source)
}

/// Index of the state `(p, s)` of a tensor product.
pub fn pair_index<E: Effect>(s: &Residual<E>, p_state: usize, s_state: usize) -> usize {
    p_state * s.len() + s_state
}

/// A processor built by interning on-demand states, with the state
/// standing for each pair of original states.
#[derive(Clone, Debug)]
pub struct Composite {
    pub processor: Processor,
    starts: Vec<Vec<usize>>,
}

impl Composite {
    pub fn start(&self, p: usize, s: usize) -> usize {
        self.starts[p][s]
    }
}

type HgpState = (Term<(usize, usize)>, Term<(usize, usize)>);

/// The composite of `S: A → B` and `P: B → C` whose states are pairs of
/// pending computations `(t, u) ∈ T_B(C × P) × T_A(B × S)`, stepped by
/// the three `χ` clauses. States are interned by term equality and at most
/// `cap` are materialized.
pub fn compose_hgp(p: &Processor, s: &Processor, cap: usize) -> Result<Composite> {
    s.output().expect_same("upstream output", p.input(), "downstream input")?;
    let mut index: HashMap<HgpState, usize> = HashMap::new();
    let mut pending: Vec<HgpState> = Vec::new();
    let mut intern = |st: HgpState, pending: &mut Vec<HgpState>| -> Result<usize> {
        if let Some(&i) = index.get(&st) {
            return Ok(i);
        }
        let i = index.len();
        if i >= cap {
            return Err(Error::CapExceeded {
                what: "hgp composite states",
                cap,
            });
        }
        index.insert(st.clone(), i);
        pending.push(st);
        Ok(i)
    };
    let mut starts = vec![vec![0; s.len()]; p.len()];
    for (pi, row) in starts.iter_mut().enumerate() {
        for (si, slot) in row.iter_mut().enumerate() {
            *slot = intern((p.gamma(pi).clone(), s.gamma(si).clone()), &mut pending)?;
        }
    }
    let mut states: Vec<HgpState> = std::mem::take(&mut pending);
    let mut gamma = Vec::new();
    while gamma.len() < states.len() {
        let (t, u) = states[gamma.len()].clone();
        let step = chi(p, s, &t, &u).try_bind(&mut |(c, next)| -> Result<_> {
            Ok(Term::Var((*c, intern(next.clone(), &mut pending)?)))
        })?;
        states.append(&mut pending);
        gamma.push(step);
    }
    let names = (0..states.len()).map(|i| format!("h{i}")).collect();
    let processor = Processor::processor(s.input().clone(), p.output().clone(), names, gamma)?;
    Ok(Composite { processor, starts })
}

/// `χ(t, u)`: one output step of the pair `(t, u)`.
fn chi(p: &Processor, s: &Processor, t: &Term<(usize, usize)>, u: &Term<(usize, usize)>) -> Term<(usize, HgpState)> {
    let mut t = t.clone();
    let mut u = u.clone();
    loop {
        match (&t, &u) {
            (Term::Var((c, tau)), _) => return Term::Var((*c, (p.gamma(*tau).clone(), u))),
            (Term::App(_, ts), Term::Var((b, sigma))) => {
                let next_t = ts[*b].clone();
                u = s.gamma(*sigma).clone();
                t = next_t;
            }
            (Term::App(..), Term::App(_, us)) => {
                return Term::read_with(us.len(), |a| chi(p, s, &t, &us[a]));
            }
        }
    }
}
