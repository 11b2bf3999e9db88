use std::collections::BTreeSet;
use std::fmt::Debug;
use std::hash::Hash;

use super::{Dist, Term, READ};
use crate::alphabet::Alphabet;

/// Values that can sit at the leaves of effect values.
pub trait Atom: Clone + Ord + Hash + Debug {}

impl<T: Clone + Ord + Hash + Debug> Atom for T {}

/// Which theory a residual comodel's computations live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResidualKind {
    Processor,
    Lts,
    Generative,
}

impl ResidualKind {
    pub fn name(self) -> &'static str {
        match self {
            ResidualKind::Processor => "processor",
            ResidualKind::Lts => "lts",
            ResidualKind::Generative => "generative",
        }
    }
}

/// A theory presented through the canonical normal forms of its
/// computations, together with its monadic structure.
///
/// Equality of `Value`s is equality of computations.
pub trait Effect: Clone + Debug + PartialEq {
    type Value<X: Atom>: Clone + Ord + Hash + Debug;

    const KIND: ResidualKind;

    fn pure<X: Atom>(&self, x: X) -> Self::Value<X>;

    fn bind<X: Atom, Y: Atom>(
        &self,
        v: &Self::Value<X>,
        f: &mut dyn FnMut(&X) -> Self::Value<Y>,
    ) -> Self::Value<Y>;

    fn map<X: Atom, Y: Atom>(&self, v: &Self::Value<X>, f: &mut dyn FnMut(&X) -> Y) -> Self::Value<Y> {
        self.bind(v, &mut |x| self.pure(f(x)))
    }

    /// Every leaf value that occurs in `v`.
    fn support<'v, X: Atom>(&self, v: &'v Self::Value<X>) -> Vec<&'v X>;

    /// Checks structural invariants of a value, naming the violated one.
    fn validate<X: Atom>(&self, v: &Self::Value<X>) -> Result<(), String>;
}

/// Input from a finite alphabet: values are `read` trees.
#[derive(Clone, Debug, PartialEq)]
pub struct Input {
    pub alphabet: Alphabet,
}

impl Input {
    pub fn new(alphabet: Alphabet) -> Self {
        Self { alphabet }
    }

    pub fn arity(&self) -> usize {
        self.alphabet.len()
    }
}

impl Effect for Input {
    type Value<X: Atom> = Term<X>;

    const KIND: ResidualKind = ResidualKind::Processor;

    fn pure<X: Atom>(&self, x: X) -> Term<X> {
        Term::Var(x)
    }

    fn bind<X: Atom, Y: Atom>(&self, v: &Term<X>, f: &mut dyn FnMut(&X) -> Term<Y>) -> Term<Y> {
        v.bind(&mut |x| f(x))
    }

    fn map<X: Atom, Y: Atom>(&self, v: &Term<X>, f: &mut dyn FnMut(&X) -> Y) -> Term<Y> {
        v.map(&mut |x| f(x))
    }

    fn support<'v, X: Atom>(&self, v: &'v Term<X>) -> Vec<&'v X> {
        v.leaves()
    }

    fn validate<X: Atom>(&self, v: &Term<X>) -> Result<(), String> {
        let mut stack = vec![v];
        while let Some(t) = stack.pop() {
            if let Term::App(op, args) = t {
                if *op != READ {
                    return Err(format!("input computations only use `read`, found operation #{}", op.0));
                }
                if args.len() != self.arity() {
                    return Err(format!(
                        "`read` must branch over all {} input tokens, found {} branches",
                        self.arity(),
                        args.len()
                    ));
                }
                stack.extend(args);
            }
        }
        Ok(())
    }
}

/// Non-empty finite non-deterministic choice: values are non-empty sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Choice;

impl Effect for Choice {
    type Value<X: Atom> = BTreeSet<X>;

    const KIND: ResidualKind = ResidualKind::Lts;

    fn pure<X: Atom>(&self, x: X) -> BTreeSet<X> {
        BTreeSet::from([x])
    }

    fn bind<X: Atom, Y: Atom>(&self, v: &BTreeSet<X>, f: &mut dyn FnMut(&X) -> BTreeSet<Y>) -> BTreeSet<Y> {
        v.iter().flat_map(f).collect()
    }

    fn support<'v, X: Atom>(&self, v: &'v BTreeSet<X>) -> Vec<&'v X> {
        v.iter().collect()
    }

    fn validate<X: Atom>(&self, v: &BTreeSet<X>) -> Result<(), String> {
        if v.is_empty() {
            Err("every state needs at least one transition (non-empty choice)".into())
        } else {
            Ok(())
        }
    }
}

/// Probabilistic choice: values are exact finitely supported distributions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Prob;

impl Effect for Prob {
    type Value<X: Atom> = Dist<X>;

    const KIND: ResidualKind = ResidualKind::Generative;

    fn pure<X: Atom>(&self, x: X) -> Dist<X> {
        Dist::point(x)
    }

    fn bind<X: Atom, Y: Atom>(&self, v: &Dist<X>, f: &mut dyn FnMut(&X) -> Dist<Y>) -> Dist<Y> {
        v.bind(&mut |x| f(x))
    }

    fn map<X: Atom, Y: Atom>(&self, v: &Dist<X>, f: &mut dyn FnMut(&X) -> Y) -> Dist<Y> {
        v.map(&mut |x| f(x))
    }

    fn support<'v, X: Atom>(&self, v: &'v Dist<X>) -> Vec<&'v X> {
        v.support().collect()
    }

    fn validate<X: Atom>(&self, v: &Dist<X>) -> Result<(), String> {
        use num_traits::{One, Zero};
        if v.iter().any(|(_, w)| *w <= super::Rational::zero()) {
            return Err("probabilities must be positive".into());
        }
        let total = v.total();
        if !total.is_one() {
            return Err(format!("weights sum to {total}, not 1 (mass conservation)"));
        }
        Ok(())
    }
}
