//! Finite signatures, free term trees and the three effect theories
//! (input, non-deterministic choice, probabilistic choice).
//!
//! Terms are plain immutable trees. The input theory uses a one-operation
//! signature whose single operation `read` has one branch per alphabet
//! token; its terms are never quotiented, so structural equality is
//! equality of computations. Choice and probabilistic terms are reduced to
//! canonical normal forms (finite sets and exact rational distributions)
//! in [`normal`].

mod effect;
mod normal;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;

pub use effect::{Atom, Choice, Effect, Input, Prob, ResidualKind};
pub use normal::{choice_normal_form, prob_normal_form, rational, Dist, ProbTerm, Rational};

use crate::error::{Error, Result};

/// Index of an operation symbol in a [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpId(pub usize);

/// The only operation of the input theory.
pub const READ: OpId = OpId(0);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of operation symbols with finite, positive arities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    ops: Vec<Operation>,
}

impl Signature {
    pub fn new<I, S>(ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let ops: Vec<Operation> = ops
            .into_iter()
            .map(|(name, arity)| Operation {
                name: name.into(),
                arity,
            })
            .collect();
        let mut names = BTreeSet::new();
        for op in &ops {
            if op.arity == 0 {
                return Err(Error::Invariant(format!(
                    "operation `{}` must have arity at least 1",
                    op.name
                )));
            }
            if !names.insert(op.name.as_str()) {
                return Err(Error::Invariant(format!(
                    "operation `{}` is declared twice",
                    op.name
                )));
            }
        }
        Ok(Self { ops })
    }

    /// The signature with no operations.
    pub fn pure() -> Self {
        Self { ops: Vec::new() }
    }

    /// Signature of the input theory over an alphabet of `size` tokens.
    pub fn input(size: usize) -> Self {
        Self {
            ops: vec![Operation {
                name: "read".into(),
                arity: size,
            }],
        }
    }

    /// Signature of binary non-deterministic choice.
    pub fn choice() -> Self {
        Self {
            ops: vec![Operation {
                name: "or".into(),
                arity: 2,
            }],
        }
    }

    pub fn is_pure(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn operations(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op(&self, id: OpId) -> Option<&Operation> {
        self.ops.get(id.0)
    }

    pub fn lookup(&self, name: &str) -> Result<OpId> {
        self.ops
            .iter()
            .position(|op| op.name == name)
            .map(OpId)
            .ok_or_else(|| Error::UnknownOperation(name.to_string()))
    }

    /// Checks that every node of `t` names a declared operation with the
    /// right number of children.
    pub fn check<V>(&self, t: &Term<V>) -> Result<()> {
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            if let Term::App(id, args) = t {
                let op = self
                    .op(*id)
                    .ok_or_else(|| Error::UnknownOperation(format!("#{}", id.0)))?;
                if op.arity != args.len() {
                    return Err(Error::ArityMismatch {
                        op: op.name.clone(),
                        expected: op.arity,
                        found: args.len(),
                    });
                }
                stack.extend(args);
            }
        }
        Ok(())
    }

    /// Substitution `t(u)` with arity checking of `t` and of every term
    /// that is substituted in.
    pub fn substitute<V, W>(&self, t: &Term<V>, u: &HashMap<V, Term<W>>) -> Result<Term<W>>
    where
        V: Eq + Hash + fmt::Debug,
        W: Clone,
    {
        self.check(t)?;
        for image in u.values() {
            self.check(image)?;
        }
        t.try_bind(&mut |v| {
            u.get(v)
                .cloned()
                .ok_or_else(|| Error::UnboundVariable(format!("{v:?}")))
        })
    }
}

/// A finite term tree over some signature with variables at the leaves.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term<V> {
    Var(V),
    App(OpId, Vec<Term<V>>),
}

impl<V> Term<V> {
    pub fn var(v: V) -> Self {
        Term::Var(v)
    }

    /// An input-theory node with one child per token.
    pub fn read(children: Vec<Term<V>>) -> Self {
        Term::App(READ, children)
    }

    /// `read(λa. f(a))` over an alphabet of `size` tokens.
    pub fn read_with(size: usize, f: impl FnMut(usize) -> Term<V>) -> Self {
        Term::App(READ, (0..size).map(f).collect())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&V> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Height of the tree; a bare variable has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Leaves from left to right.
    pub fn leaves(&self) -> Vec<&V> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) => out.push(v),
                Term::App(_, args) => stack.extend(args.iter().rev()),
            }
        }
        out
    }

    pub fn map<W>(&self, f: &mut impl FnMut(&V) -> W) -> Term<W> {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App(op, args) => Term::App(*op, args.iter().map(|a| a.map(f)).collect()),
        }
    }

    /// Substitution `t(u)`: every leaf `v` is replaced by `u(v)`.
    pub fn bind<W>(&self, u: &mut impl FnMut(&V) -> Term<W>) -> Term<W> {
        match self {
            Term::Var(v) => u(v),
            Term::App(op, args) => Term::App(*op, args.iter().map(|a| a.bind(u)).collect()),
        }
    }

    pub fn try_bind<W, E>(
        &self,
        u: &mut impl FnMut(&V) -> std::result::Result<Term<W>, E>,
    ) -> std::result::Result<Term<W>, E> {
        match self {
            Term::Var(v) => u(v),
            Term::App(op, args) => Ok(Term::App(
                *op,
                args.iter()
                    .map(|a| a.try_bind(u))
                    .collect::<std::result::Result<_, E>>()?,
            )),
        }
    }

    /// Sequencing `f ≫ g`: every leaf of `self` is replaced by `g`.
    pub fn sequence<W: Clone>(&self, g: &Term<W>) -> Term<W> {
        self.bind(&mut |_| g.clone())
    }

    /// Catamorphism.
    pub fn fold<R>(
        &self,
        leaf: &mut impl FnMut(&V) -> R,
        node: &mut impl FnMut(OpId, Vec<R>) -> R,
    ) -> R {
        match self {
            Term::Var(v) => leaf(v),
            Term::App(op, args) => {
                let rs = args.iter().map(|a| a.fold(leaf, node)).collect();
                node(*op, rs)
            }
        }
    }

    /// The subterm reached by following child indices from the root.
    pub fn at(&self, path: &[usize]) -> Option<&Term<V>> {
        let mut t = self;
        for &i in path {
            match t {
                Term::App(_, args) => t = args.get(i)?,
                Term::Var(_) => return None,
            }
        }
        Some(t)
    }
}

/// Free-function form of [`Signature::substitute`] for callers that do not
/// need arity checks.
pub fn substitute<V, W>(t: &Term<V>, u: &HashMap<V, Term<W>>) -> Result<Term<W>>
where
    V: Eq + Hash + fmt::Debug,
    W: Clone,
{
    t.try_bind(&mut |v| {
        u.get(v)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable(format!("{v:?}")))
    })
}

/// `f ≫ g`.
pub fn sequence<V, W: Clone>(f: &Term<V>, g: &Term<W>) -> Term<W> {
    f.sequence(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(s: &str) -> Term<String> {
        Term::Var(s.to_string())
    }

    fn assign(pairs: &[(&str, Term<String>)]) -> HashMap<String, Term<String>> {
        pairs.iter().map(|(k, t)| (k.to_string(), t.clone())).collect()
    }

    #[test]
    fn substitute_base_clause() {
        let g = Term::read(vec![v("x"), v("y")]);
        let out = substitute(&v("v"), &assign(&[("v", g.clone())])).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn substitute_node_clause() {
        // read(λa. v)[v ↦ read(λa'. w)] = read(λa. read(λa'. w))
        let t = Term::read_with(2, |_| v("v"));
        let inner = Term::read_with(2, |_| v("w"));
        let out = substitute(&t, &assign(&[("v", inner.clone())])).unwrap();
        assert_eq!(out, Term::read_with(2, |_| inner.clone()));
    }

    #[test]
    fn substitute_swaps_variables() {
        let t = Term::read(vec![v("p"), v("q")]);
        let out = substitute(&t, &assign(&[("p", v("q")), ("q", v("p"))])).unwrap();
        assert_eq!(out, Term::read(vec![v("q"), v("p")]));
    }

    #[test]
    fn substitute_reports_unbound_variable() {
        let t = Term::read(vec![v("p"), v("missing")]);
        let err = substitute(&t, &assign(&[("p", v("q"))])).unwrap_err();
        assert!(matches!(err, Error::UnboundVariable(ref s) if s.contains("missing")));
    }

    #[test]
    fn signature_substitute_checks_arity() {
        let sig = Signature::input(2);
        let bad = Term::read(vec![v("p")]);
        let err = sig.substitute(&bad, &assign(&[("p", v("q"))])).unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { expected: 2, found: 1, .. }));
        let image_bad = sig
            .substitute(&v("p"), &assign(&[("p", Term::read(vec![v("q")]))]))
            .unwrap_err();
        assert!(matches!(image_bad, Error::ArityMismatch { .. }));
    }

    #[test]
    fn signature_invariants() {
        assert!(Signature::new([("f", 0)]).is_err());
        assert!(Signature::new([("f", 1), ("f", 2)]).is_err());
        assert!(Signature::pure().is_pure());
        assert_eq!(Signature::input(3).lookup("read").unwrap(), READ);
    }

    #[test]
    fn sequence_examples() {
        let g = Term::read(vec![v("u"), v("w")]);
        assert_eq!(sequence(&v("v"), &g), g);

        // read ≫ read is the two-level read tree
        let read: Term<usize> = Term::read_with(2, Term::Var);
        let twice = read.sequence(&read);
        assert_eq!(twice, Term::read_with(2, |_| Term::read_with(2, Term::Var)));

        let f = Term::read(vec![v("x"), v("y")]);
        assert_eq!(sequence(&f, &g), Term::read(vec![g.clone(), g.clone()]));
    }

    fn arb_term(depth: u32) -> impl Strategy<Value = Term<u8>> {
        let leaf = (0u8..4).prop_map(Term::Var);
        leaf.prop_recursive(depth, 32, 2, |inner| {
            prop::collection::vec(inner, 2).prop_map(Term::read)
        })
    }

    proptest! {
        #[test]
        fn substitution_unit_law(t in arb_term(4)) {
            prop_assert_eq!(t.bind(&mut |x| Term::Var(*x)), t);
        }

        #[test]
        fn substitution_is_associative(
            t in arb_term(3),
            u in prop::collection::vec(arb_term(2), 4),
            w in prop::collection::vec(arb_term(2), 4),
        ) {
            let left = t.bind(&mut |x| u[*x as usize].clone()).bind(&mut |y| w[*y as usize].clone());
            let right = t.bind(&mut |x| u[*x as usize].bind(&mut |y| w[*y as usize].clone()));
            prop_assert_eq!(left, right);
        }

        #[test]
        fn substitution_size_bound(t in arb_term(3), u in prop::collection::vec(arb_term(2), 4)) {
            let max = u.iter().map(Term::size).max().unwrap();
            prop_assert!(t.bind(&mut |x| u[*x as usize].clone()).size() <= t.size() * max);
        }
    }
}
