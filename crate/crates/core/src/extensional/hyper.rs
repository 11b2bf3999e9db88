//! The maximally lazy realization of a processor.
//!
//! States are read-trees `u ∈ T_A(S)` over the original states. A step
//! substitutes `γ` into every leaf of `u` and takes the copower normal form
//! of the result, so a root leaf emits before any input is read. States
//! and step trees are hash-consed; the state space is infinite in general
//! and only the states actually stepped are materialized.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Mutex, MutexGuard};

use super::arena::{Interner, NodeId, StepArena, StepNode};
use super::DEFAULT_CAP;
use crate::error::{Error, Result};
use crate::residual::{StepView, StreamProcessor};
use crate::theory::Term;

/// A state of a [`Hypernormal`] processor: a shared read-tree over the
/// inner processor's states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContId(u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ContNode<S> {
    Leaf(S),
    Read(Vec<ContId>),
}

#[derive(Debug)]
struct Tables<S> {
    conts: Interner<ContNode<S>>,
    steps: StepArena<ContId>,
    stepped: HashMap<ContId, NodeId>,
}

impl<S: Clone + Eq + Hash> Tables<S> {
    fn cont(&mut self, node: ContNode<S>) -> ContId {
        ContId(self.conts.intern(node))
    }
}

pub struct Hypernormal<P: StreamProcessor> {
    inner: P,
    cap: usize,
    tables: Mutex<Tables<P::State>>,
}

impl<P: StreamProcessor> Hypernormal<P> {
    pub fn new(inner: P) -> Self {
        Self::with_cap(inner, DEFAULT_CAP)
    }

    pub fn with_cap(inner: P, cap: usize) -> Self {
        Self {
            inner,
            cap,
            tables: Mutex::new(Tables {
                conts: Interner::new(),
                steps: StepArena::new(),
                stepped: HashMap::new(),
            }),
        }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }

    /// The state `η(s)`: the trivial tree on one original state.
    pub fn embed(&self, s: P::State) -> ContId {
        self.lock().cont(ContNode::Leaf(s))
    }

    /// The read-tree a state stands for.
    pub fn describe(&self, c: ContId) -> Term<P::State> {
        fn go<S: Clone + Eq + Hash>(t: &Tables<S>, c: ContId) -> Term<S> {
            match t.conts.get(c.0) {
                ContNode::Leaf(s) => Term::Var(s.clone()),
                ContNode::Read(cs) => Term::read(cs.iter().map(|&c| go(t, c)).collect()),
            }
        }
        go(&self.lock(), c)
    }

    /// Number of states stepped so far.
    pub fn materialized(&self) -> usize {
        self.lock().stepped.len()
    }

    fn lock(&self) -> MutexGuard<'_, Tables<P::State>> {
        self.tables.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn step(&self, t: &mut Tables<P::State>, c: ContId) -> Result<NodeId> {
        if let Some(&r) = t.stepped.get(&c) {
            return Ok(r);
        }
        if t.stepped.len() >= self.cap {
            return Err(Error::CapExceeded {
                what: "hypernormal states",
                cap: self.cap,
            });
        }
        let r = match t.conts.get(c.0).clone() {
            ContNode::Leaf(s) => {
                let mut memo = HashMap::new();
                self.normalize_inner(t, &mut memo, self.inner.begin(&s)?)
            }
            ContNode::Read(cs) => {
                let children = cs.iter().map(|&c| self.step(t, c)).collect::<Result<Vec<_>>>()?;
                self.collapse(t, children)
            }
        };
        t.stepped.insert(c, r);
        Ok(r)
    }

    /// The copower normal form of `γ(s)` with every continuation lifted to
    /// a trivial tree.
    fn normalize_inner<'a>(
        &'a self,
        t: &mut Tables<P::State>,
        memo: &mut HashMap<P::Cursor<'a>, NodeId>,
        cursor: P::Cursor<'a>,
    ) -> NodeId {
        if let Some(&r) = memo.get(&cursor) {
            return r;
        }
        let r = match self.inner.view(&cursor) {
            StepView::Emit(b, s) => {
                let k = t.cont(ContNode::Leaf(s));
                t.steps.emit(b, k)
            }
            StepView::Read => {
                let children = (0..self.inner.input_size())
                    .map(|a| self.normalize_inner(t, memo, self.inner.descend(&cursor, a)))
                    .collect();
                self.collapse(t, children)
            }
        };
        memo.insert(cursor, r);
        r
    }

    fn collapse(&self, t: &mut Tables<P::State>, children: Vec<NodeId>) -> NodeId {
        let Tables { conts, steps, .. } = t;
        steps.read(children, |ks| ContId(conts.intern(ContNode::Read(ks))))
    }
}

impl<P: StreamProcessor> StreamProcessor for Hypernormal<P> {
    type State = ContId;
    type Cursor<'a> = NodeId where Self: 'a;

    fn input_size(&self) -> usize {
        self.inner.input_size()
    }

    fn output_size(&self) -> usize {
        self.inner.output_size()
    }

    fn begin(&self, s: &ContId) -> Result<NodeId> {
        let mut t = self.lock();
        self.step(&mut t, *s)
    }

    fn view(&self, c: &NodeId) -> StepView<ContId> {
        match self.lock().steps.get(*c) {
            StepNode::Emit(b, k) => StepView::Emit(*b, *k),
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

impl<P: StreamProcessor + std::fmt::Debug> std::fmt::Debug for Hypernormal<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hypernormal")
            .field("inner", &self.inner)
            .field("cap", &self.cap)
            .field("materialized", &self.materialized())
            .finish()
    }
}
