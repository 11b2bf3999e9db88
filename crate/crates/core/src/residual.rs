//! Residual comodels of the input theory: each state answers one request
//! for an output token with a computation in a residual theory, producing
//! the token and a next state.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::theory::{Atom, Choice, Effect, Input, Prob, ResidualKind, Signature, Term};

/// `γ: S → R(B × S)` on a finite state set.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual<E: Effect> {
    effect: E,
    output: Alphabet,
    states: Vec<String>,
    gamma: Vec<E::Value<(usize, usize)>>,
}

/// Stream processors: `γ: S → T_A(B × S)`.
pub type Processor = Residual<Input>;
/// Finitely branching, non-terminating labelled transition systems.
pub type Lts = Residual<Choice>;
/// Generative probabilistic systems.
pub type Generative = Residual<Prob>;

impl<E: Effect> Residual<E> {
    pub fn new(effect: E, output: Alphabet, states: Vec<String>, gamma: Vec<E::Value<(usize, usize)>>) -> Result<Self> {
        if gamma.len() != states.len() {
            return Err(Error::Invariant(format!(
                "gamma must be total: {} states but {} entries",
                states.len(),
                gamma.len()
            )));
        }
        for (i, name) in states.iter().enumerate() {
            if states[..i].contains(name) {
                return Err(Error::Invariant(format!("state `{name}` is declared twice")));
            }
        }
        for (name, value) in states.iter().zip(&gamma) {
            effect
                .validate(value)
                .map_err(|e| Error::Invariant(format!("gamma({name}): {e}")))?;
            for &(b, s) in effect.support(value) {
                if b >= output.len() {
                    return Err(Error::UnknownToken(format!("gamma({name}) emits token #{b}")));
                }
                if s >= states.len() {
                    return Err(Error::UnknownState(format!("#{s} (referenced from gamma({name}))")));
                }
            }
        }
        Ok(Self {
            effect,
            output,
            states,
            gamma,
        })
    }

    pub fn effect(&self) -> &E {
        &self.effect
    }

    pub fn kind(&self) -> ResidualKind {
        E::KIND
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn gamma(&self, s: usize) -> &E::Value<(usize, usize)> {
        &self.gamma[s]
    }

    /// `⟦t⟧(s)` for a term `t` of the output theory `T_B`: the basic
    /// co-operation `γ` threaded through `t` by the residual theory's bind.
    pub fn derived_coop<V: Atom>(&self, t: &Term<V>, s: usize) -> Result<E::Value<(V, usize)>> {
        Signature::input(self.output.len()).check(t)?;
        Ok(self.derived_coop_unchecked(t, s))
    }

    fn derived_coop_unchecked<V: Atom>(&self, t: &Term<V>, s: usize) -> E::Value<(V, usize)> {
        match t {
            Term::Var(v) => self.effect.pure((v.clone(), s)),
            Term::App(_, children) => self
                .effect
                .bind(&self.gamma[s], &mut |&(b, next)| self.derived_coop_unchecked(&children[b], next)),
        }
    }

    /// Whether `(self, s1)` and `(other, s2)` are bisimilar: the greatest
    /// equivalence on the disjoint union of states under which related
    /// states have equal `γ`-values once leaf states are replaced by their
    /// classes.
    pub fn bisimilar(&self, s1: usize, other: &Self, s2: usize) -> Result<bool> {
        self.same_interface(other)?;
        let blocks = bisimulation_classes(&[self, other]);
        Ok(blocks[s1] == blocks[self.len() + s2])
    }

    fn same_interface(&self, other: &Self) -> Result<()> {
        if self.effect != other.effect {
            return Err(Error::Invariant(format!(
                "residual theories differ: {:?} vs {:?}",
                self.effect, other.effect
            )));
        }
        self.output.expect_same("left output", &other.output, "right output")
    }
}

/// A state's current block and its step with targets replaced by blocks.
type BlockKey<E> = (usize, <E as Effect>::Value<(usize, usize)>);

/// Coarsest stable partition of the disjoint union of `systems`, indexed by
/// the concatenated state numbering.
pub fn bisimulation_classes<E: Effect>(systems: &[&Residual<E>]) -> Vec<usize> {
    let offsets: Vec<usize> = systems
        .iter()
        .scan(0, |acc, r| {
            let o = *acc;
            *acc += r.len();
            Some(o)
        })
        .collect();
    let total: usize = systems.iter().map(|r| r.len()).sum();
    let mut block = vec![0usize; total];
    let mut count = 1;
    loop {
        let mut ids: HashMap<BlockKey<E>, usize> = HashMap::new();
        let mut next = Vec::with_capacity(total);
        for (r, offset) in systems.iter().zip(&offsets) {
            for s in 0..r.len() {
                let signature = r.effect.map(&r.gamma[s], &mut |&(b, t)| (b, block[offset + t]));
                let fresh = ids.len();
                next.push(*ids.entry((block[offset + s], signature)).or_insert(fresh));
            }
        }
        let refined = ids.len();
        block = next;
        if refined == count {
            return block;
        }
        count = refined;
    }
}

impl Processor {
    pub fn processor(
        input: Alphabet,
        output: Alphabet,
        states: Vec<String>,
        gamma: Vec<Term<(usize, usize)>>,
    ) -> Result<Self> {
        Residual::new(Input::new(input), output, states, gamma)
    }

    pub fn input(&self) -> &Alphabet {
        &self.effect.alphabet
    }
}

impl Lts {
    pub fn lts(labels: Alphabet, states: Vec<String>, gamma: Vec<std::collections::BTreeSet<(usize, usize)>>) -> Result<Self> {
        Residual::new(Choice, labels, states, gamma)
    }
}

impl Generative {
    pub fn generative(
        labels: Alphabet,
        states: Vec<String>,
        gamma: Vec<crate::theory::Dist<(usize, usize)>>,
    ) -> Result<Self> {
        Residual::new(Prob, labels, states, gamma)
    }
}

/// What a processor does at a position of its current step tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepView<S> {
    /// Emit a token and move to a state.
    Emit(usize, S),
    /// Consume one input token first.
    Read,
}

/// A deterministic stream processor viewed one step at a time, possibly
/// with an infinite state space materialized on demand.
///
/// `begin` opens the step tree `γ(s)` and `descend` follows the branch of
/// one input token; every step tree is finite.
pub trait StreamProcessor {
    type State: Clone + Eq + Hash + Debug;
    type Cursor<'a>: Clone + Eq + Hash
    where
        Self: 'a;

    fn input_size(&self) -> usize;
    fn output_size(&self) -> usize;
    fn begin<'a>(&'a self, s: &Self::State) -> Result<Self::Cursor<'a>>;
    fn view<'a>(&'a self, c: &Self::Cursor<'a>) -> StepView<Self::State>;
    fn descend<'a>(&'a self, c: &Self::Cursor<'a>, token: usize) -> Self::Cursor<'a>;
}

/// Hashes and compares a borrowed subterm by address; subterms of a
/// processor's `γ` are never moved while borrowed.
#[derive(Clone, Copy, Debug)]
pub struct TermCursor<'a>(pub &'a Term<(usize, usize)>);

impl PartialEq for TermCursor<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for TermCursor<'_> {}

impl Hash for TermCursor<'_> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        std::ptr::hash(self.0, state)
    }
}

impl StreamProcessor for Processor {
    type State = usize;
    type Cursor<'a> = TermCursor<'a>;

    fn input_size(&self) -> usize {
        self.effect.arity()
    }

    fn output_size(&self) -> usize {
        self.output.len()
    }

    fn begin<'a>(&'a self, s: &usize) -> Result<TermCursor<'a>> {
        self.gamma
            .get(*s)
            .map(TermCursor)
            .ok_or_else(|| Error::UnknownState(format!("#{s}")))
    }

    fn view<'a>(&'a self, c: &TermCursor<'a>) -> StepView<usize> {
        match c.0 {
            Term::Var((b, s)) => StepView::Emit(*b, *s),
            Term::App(..) => StepView::Read,
        }
    }

    fn descend<'a>(&'a self, c: &TermCursor<'a>, token: usize) -> TermCursor<'a> {
        match c.0 {
            Term::App(_, children) => TermCursor(&children[token]),
            Term::Var(_) => *c,
        }
    }
}

impl<P: StreamProcessor> StreamProcessor for &P {
    type State = P::State;
    type Cursor<'a> = P::Cursor<'a> where Self: 'a;

    fn input_size(&self) -> usize {
        (**self).input_size()
    }

    fn output_size(&self) -> usize {
        (**self).output_size()
    }

    fn begin<'a>(&'a self, s: &P::State) -> Result<P::Cursor<'a>> {
        (**self).begin(s)
    }

    fn view<'a>(&'a self, c: &P::Cursor<'a>) -> StepView<P::State> {
        (**self).view(c)
    }

    fn descend<'a>(&'a self, c: &P::Cursor<'a>, token: usize) -> P::Cursor<'a> {
        (**self).descend(c, token)
    }
}

/// The materialized step tree `γ(s)` of any stream processor.
pub fn step_tree<P: StreamProcessor>(p: &P, s: &P::State) -> Result<Term<(usize, P::State)>> {
    fn go<'a, P: StreamProcessor>(p: &'a P, c: P::Cursor<'a>) -> Term<(usize, P::State)> {
        match p.view(&c) {
            StepView::Emit(b, s) => Term::Var((b, s)),
            StepView::Read => Term::read_with(p.input_size(), |a| go(p, p.descend(&c, a))),
        }
    }
    Ok(go(p, p.begin(s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{rational, Dist};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    fn echo(size: usize) -> Processor {
        let a = Alphabet::numbered(size);
        Processor::processor(a.clone(), a, names(&["e"]), vec![Term::read_with(size, |t| Term::Var((t, 0)))]).unwrap()
    }

    /// Echo presented with two states that alternate.
    fn echo_unrolled(size: usize) -> Processor {
        let a = Alphabet::numbered(size);
        Processor::processor(
            a.clone(),
            a,
            names(&["e0", "e1"]),
            vec![
                Term::read_with(size, |t| Term::Var((t, 1))),
                Term::read_with(size, |t| Term::Var((t, 0))),
            ],
        )
        .unwrap()
    }

    /// The stored pair separating bisimilarity from trace equivalence.
    /// Labels: a=0, b=1, c=2.
    fn lts_pair() -> (Lts, Lts) {
        let labels = Alphabet::new(["a", "b", "c"]).unwrap();
        let p = Lts::lts(
            labels.clone(),
            names(&["p0", "p_full", "p_bonly"]),
            vec![
                BTreeSet::from([(0, 1), (0, 2)]),
                BTreeSet::from([(1, 1), (2, 1)]),
                BTreeSet::from([(1, 2)]),
            ],
        )
        .unwrap();
        let q = Lts::lts(
            labels,
            names(&["q0", "q_full"]),
            vec![BTreeSet::from([(0, 1)]), BTreeSet::from([(1, 1), (2, 1)])],
        )
        .unwrap();
        (p, q)
    }

    #[test]
    fn derived_coop_examples() {
        let e = echo(2);
        assert_eq!(e.derived_coop(&Term::Var("v"), 0).unwrap(), Term::Var(("v", 0)));
        let t: Term<usize> = Term::read_with(2, Term::Var);
        assert_eq!(e.derived_coop(&t, 0).unwrap(), Term::read_with(2, |a| Term::Var((a, 0))));

        let labels = Alphabet::new(["a"]).unwrap();
        let l = Lts::lts(labels, names(&["p0", "p1"]), vec![BTreeSet::from([(0, 1)]), BTreeSet::from([(0, 1)])]).unwrap();
        let t: Term<usize> = Term::read_with(1, Term::Var);
        assert_eq!(l.derived_coop(&t, 0).unwrap(), BTreeSet::from([(0, 1)]));
    }

    #[test]
    fn derived_coop_rejects_wrong_arity() {
        let t: Term<usize> = Term::read_with(3, Term::Var);
        assert!(matches!(echo(2).derived_coop(&t, 0), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn validation() {
        let a = Alphabet::numbered(2);
        let undeclared = Processor::processor(a.clone(), a.clone(), names(&["e"]), vec![Term::Var((0, 1))]);
        assert!(matches!(undeclared, Err(Error::UnknownState(_))));
        let bad_token = Processor::processor(a.clone(), a.clone(), names(&["e"]), vec![Term::Var((5, 0))]);
        assert!(matches!(bad_token, Err(Error::UnknownToken(_))));
        let short_read = Processor::processor(a.clone(), a.clone(), names(&["e"]), vec![Term::read(vec![Term::Var((0, 0))])]);
        assert!(short_read.is_err());
        let empty = Lts::lts(a.clone(), names(&["p"]), vec![BTreeSet::new()]);
        assert!(empty.is_err());
        let partial = Dist::from_mixture([((0, 0), rational(1, 1))]);
        assert!(Generative::generative(a, names(&["g"]), vec![partial]).is_ok());
    }

    #[test]
    fn bisimilar_examples() {
        let e = echo(2);
        assert!(e.bisimilar(0, &e, 0).unwrap());
        assert!(e.bisimilar(0, &echo_unrolled(2), 1).unwrap());
        let (p, q) = lts_pair();
        assert!(!p.bisimilar(0, &q, 0).unwrap());
        assert!(p.bisimilar(1, &q, 1).unwrap());
        assert!(!p.bisimilar(2, &q, 1).unwrap());
        assert!(e.bisimilar(0, &echo(3), 0).is_err());
    }

    #[test]
    fn generative_bisimulation_uses_distribution_equality() {
        let labels = Alphabet::new(["x", "y"]).unwrap();
        let half = rational(1, 2);
        let coin = Generative::generative(
            labels.clone(),
            names(&["c"]),
            vec![Dist::new([((0, 0), half.clone()), ((1, 0), half.clone())]).unwrap()],
        )
        .unwrap();
        let split = Generative::generative(
            labels.clone(),
            names(&["c0", "c1"]),
            vec![
                Dist::new([((0, 1), half.clone()), ((1, 0), half.clone())]).unwrap(),
                Dist::new([((0, 0), half.clone()), ((1, 1), half.clone())]).unwrap(),
            ],
        )
        .unwrap();
        assert!(coin.bisimilar(0, &split, 0).unwrap());
        let biased = Generative::generative(
            labels,
            names(&["c"]),
            vec![Dist::new([((0, 0), rational(1, 3)), ((1, 0), rational(2, 3))]).unwrap()],
        )
        .unwrap();
        assert!(!coin.bisimilar(0, &biased, 0).unwrap());
    }

    #[test]
    fn step_tree_of_residual_is_gamma() {
        let e = echo(3);
        assert_eq!(&step_tree(&e, &0).unwrap(), e.gamma(0));
        assert_eq!(&step_tree(&&e, &0).unwrap(), e.gamma(0));
    }

    fn arb_gamma(size: usize, states: usize) -> impl Strategy<Value = Term<(usize, usize)>> {
        (0..size, 0..states)
            .prop_map(Term::Var)
            .prop_recursive(2, 12, size as u32, move |inner| prop::collection::vec(inner, size).prop_map(Term::read))
    }

    fn arb_processor() -> impl Strategy<Value = Processor> {
        prop::collection::vec(arb_gamma(2, 3), 3).prop_map(|gamma| {
            let a = Alphabet::numbered(2);
            Processor::processor(a.clone(), a, names(&["x", "y", "z"]), gamma).unwrap()
        })
    }

    fn arb_lts() -> impl Strategy<Value = Lts> {
        prop::collection::vec(prop::collection::btree_set((0usize..2, 0usize..3), 1..3), 3)
            .prop_map(|gamma| Lts::lts(Alphabet::numbered(2), names(&["x", "y", "z"]), gamma).unwrap())
    }

    fn arb_out_term() -> impl Strategy<Value = Term<u8>> {
        (0u8..3).prop_map(Term::Var).prop_recursive(3, 12, 2, |inner| prop::collection::vec(inner, 2).prop_map(Term::read))
    }

    proptest! {
        #[test]
        fn bisimilarity_is_an_equivalence(a in arb_lts(), b in arb_lts(), c in arb_lts(), i in 0usize..3, j in 0usize..3, k in 0usize..3) {
            prop_assert!(a.bisimilar(i, &a, i).unwrap());
            prop_assert_eq!(a.bisimilar(i, &b, j).unwrap(), b.bisimilar(j, &a, i).unwrap());
            if a.bisimilar(i, &b, j).unwrap() && b.bisimilar(j, &c, k).unwrap() {
                prop_assert!(a.bisimilar(i, &c, k).unwrap());
            }
        }

        #[test]
        fn derived_coop_respects_sequencing(p in arb_processor(), t in arb_out_term(), u in arb_out_term(), s in 0usize..3) {
            let direct = p.derived_coop(&t.sequence(&u), s).unwrap();
            let staged = p.derived_coop(&t, s).unwrap().bind(&mut |(_, next)| p.derived_coop(&u, *next).unwrap());
            prop_assert_eq!(direct, staged);
        }

        #[test]
        fn lts_derived_coop_respects_sequencing(l in arb_lts(), t in arb_out_term(), u in arb_out_term(), s in 0usize..3) {
            let direct = l.derived_coop(&t.sequence(&u), s).unwrap();
            let staged: BTreeSet<_> = l
                .derived_coop(&t, s)
                .unwrap()
                .iter()
                .flat_map(|(_, next)| l.derived_coop(&u, *next).unwrap())
                .collect();
            prop_assert_eq!(direct, staged);
        }
    }
}
