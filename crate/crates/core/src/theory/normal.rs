use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Signature, Term};
use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// A finitely supported probability distribution with exact rational
/// weights. Every weight is strictly positive and the weights sum to 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist<X: Ord> {
    weights: BTreeMap<X, Rational>,
}

impl<X: Ord> Dist<X> {
    /// Builds a distribution, merging repeated outcomes.
    pub fn new(weights: impl IntoIterator<Item = (X, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<X, Rational> = BTreeMap::new();
        for (x, w) in weights {
            if w <= Rational::zero() {
                return Err(Error::InvalidDistribution(format!(
                    "weight {w} is not positive"
                )));
            }
            *merged.entry(x).or_insert_with(Rational::zero) += w;
        }
        let total: Rational = merged.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1 (mass conservation)"
            )));
        }
        Ok(Self { weights: merged })
    }

    pub fn point(x: X) -> Self {
        Self {
            weights: BTreeMap::from([(x, Rational::one())]),
        }
    }

    /// Merges weights without re-checking the total; callers guarantee
    /// the inputs form a convex combination.
    pub(crate) fn from_mixture(weights: impl IntoIterator<Item = (X, Rational)>) -> Self {
        let mut merged: BTreeMap<X, Rational> = BTreeMap::new();
        for (x, w) in weights {
            *merged.entry(x).or_insert_with(Rational::zero) += w;
        }
        merged.retain(|_, w| !w.is_zero());
        debug_assert!(merged.values().sum::<Rational>().is_one());
        Self { weights: merged }
    }

    pub fn weight(&self, x: &X) -> Rational {
        self.weights.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&X, &Rational)> {
        self.weights.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &X> {
        self.weights.keys()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.weights.values().sum()
    }

    /// Mixture `Σ_x p(x) · f(x)`.
    pub fn bind<Y: Ord>(&self, f: &mut impl FnMut(&X) -> Dist<Y>) -> Dist<Y> {
        let mut out = Vec::new();
        for (x, p) in &self.weights {
            for (y, q) in f(x).weights {
                out.push((y, p * q));
            }
        }
        Dist::from_mixture(out)
    }

    pub fn map<Y: Ord>(&self, f: &mut impl FnMut(&X) -> Y) -> Dist<Y> {
        Dist::from_mixture(self.weights.iter().map(|(x, p)| (f(x), p.clone())))
    }
}

impl<X: Ord + fmt::Debug> fmt::Debug for Dist<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.weights.iter().map(|(x, w)| (x, w.to_string())))
            .finish()
    }
}

/// Terms of probabilistic choice: `Mix(r, x, y)` is `x +_r y`, choosing
/// `x` with probability `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbTerm<V> {
    Var(V),
    Mix(Rational, Box<ProbTerm<V>>, Box<ProbTerm<V>>),
}

impl<V> ProbTerm<V> {
    pub fn mix(r: Rational, left: ProbTerm<V>, right: ProbTerm<V>) -> Self {
        ProbTerm::Mix(r, Box::new(left), Box::new(right))
    }
}

/// Normal form of a term of non-deterministic choice: the set of its
/// leaves.
pub fn choice_normal_form<V: Ord + Clone>(t: &Term<V>) -> Result<BTreeSet<V>> {
    Signature::choice().check(t)?;
    Ok(t.leaves().into_iter().cloned().collect())
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Normal form of a probabilistic term: each leaf is weighted by the
/// product of branch probabilities along its path.
pub fn prob_normal_form<V: Ord + Clone>(t: &ProbTerm<V>) -> Result<Dist<V>> {
    let mut out = Vec::new();
    let mut stack = vec![(t, Rational::one())];
    while let Some((t, w)) = stack.pop() {
        match t {
            ProbTerm::Var(v) => out.push((v.clone(), w)),
            ProbTerm::Mix(r, left, right) => {
                if *r <= Rational::zero() || *r >= Rational::one() {
                    return Err(Error::ProbabilityOutOfRange(r.to_string()));
                }
                stack.push((left, &w * r));
                stack.push((right, &w * (Rational::one() - r)));
            }
        }
    }
    Ok(Dist::from_mixture(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(s: &'static str) -> Term<&'static str> {
        Term::Var(s)
    }

    fn or(a: Term<&'static str>, b: Term<&'static str>) -> Term<&'static str> {
        Term::App(super::super::OpId(0), vec![a, b])
    }

    fn pv(s: &'static str) -> ProbTerm<&'static str> {
        ProbTerm::Var(s)
    }

    #[test]
    fn choice_examples() {
        assert_eq!(choice_normal_form(&x("x")).unwrap(), BTreeSet::from(["x"]));
        assert_eq!(choice_normal_form(&or(x("x"), x("x"))).unwrap(), BTreeSet::from(["x"]));
        assert_eq!(
            choice_normal_form(&or(or(x("x"), x("y")), x("x"))).unwrap(),
            BTreeSet::from(["x", "y"])
        );
    }

    #[test]
    fn choice_rejects_wrong_arity() {
        let bad = Term::App(super::super::OpId(0), vec![x("x")]);
        assert!(choice_normal_form(&bad).is_err());
    }

    #[test]
    fn prob_examples() {
        let half = rational(1, 2);
        let same = ProbTerm::mix(half.clone(), pv("x"), pv("x"));
        assert_eq!(prob_normal_form(&same).unwrap(), Dist::point("x"));

        let a = prob_normal_form(&ProbTerm::mix(rational(3, 10), pv("x"), pv("y"))).unwrap();
        let b = prob_normal_form(&ProbTerm::mix(rational(7, 10), pv("y"), pv("x"))).unwrap();
        assert_eq!(a.weight(&"x"), rational(3, 10));
        assert_eq!(a.weight(&"y"), rational(7, 10));
        assert_eq!(a, b);

        let nested = ProbTerm::mix(
            half.clone(),
            ProbTerm::mix(half.clone(), pv("x"), pv("y")),
            pv("z"),
        );
        let d = prob_normal_form(&nested).unwrap();
        assert_eq!(d.weight(&"x"), rational(1, 4));
        assert_eq!(d.weight(&"y"), rational(1, 4));
        assert_eq!(d.weight(&"z"), rational(1, 2));
    }

    #[test]
    fn prob_rejects_out_of_range() {
        for r in [rational(0, 1), rational(1, 1), rational(3, 2), rational(-1, 2)] {
            let t = ProbTerm::mix(r, pv("x"), pv("y"));
            assert!(matches!(prob_normal_form(&t), Err(Error::ProbabilityOutOfRange(_))));
        }
    }

    #[test]
    fn dist_requires_unit_mass() {
        let err = Dist::new([("a", rational(9, 10))]).unwrap_err();
        assert!(err.to_string().contains("mass conservation"));
        assert!(Dist::new([("a", rational(1, 2)), ("a", rational(1, 2))]).is_ok());
        assert!(Dist::new([("a", rational(0, 1)), ("b", rational(1, 1))]).is_err());
    }

    /// Random choice trees over leaves 0..4.
    fn arb_choice() -> impl Strategy<Value = Term<u8>> {
        (0u8..4).prop_map(Term::Var).prop_recursive(4, 24, 2, |inner| {
            (inner.clone(), inner).prop_map(|(a, b)| Term::App(super::super::OpId(0), vec![a, b]))
        })
    }

    /// Applies commutativity at every node where `flips` says so and
    /// re-associates left-nested pairs.
    fn shuffle_choice(t: &Term<u8>, flips: &mut impl Iterator<Item = bool>) -> Term<u8> {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(op, args) => {
                let a = shuffle_choice(&args[0], flips);
                let b = shuffle_choice(&args[1], flips);
                if flips.next().unwrap_or(false) {
                    if let Term::App(_, inner) = &a {
                        // (x ∨ y) ∨ z = x ∨ (y ∨ z)
                        return Term::App(*op, vec![inner[0].clone(), Term::App(*op, vec![inner[1].clone(), b])]);
                    }
                    Term::App(*op, vec![b, a])
                } else {
                    Term::App(*op, vec![a, b])
                }
            }
        }
    }

    fn arb_prob() -> impl Strategy<Value = ProbTerm<u8>> {
        (0u8..4).prop_map(ProbTerm::Var).prop_recursive(4, 24, 2, |inner| {
            (1i64..10, inner.clone(), inner).prop_map(|(n, a, b)| ProbTerm::mix(rational(n, 10), a, b))
        })
    }

    /// Applies `x +_r y = y +_{1-r} x` and the associativity equation
    /// `(x +_r y) +_s z = x +_{rs} (y +_{(1-r)s/(1-rs)} z)` where `flips` says so.
    fn shuffle_prob(t: &ProbTerm<u8>, flips: &mut impl Iterator<Item = u8>) -> ProbTerm<u8> {
        match t {
            ProbTerm::Var(_) => t.clone(),
            ProbTerm::Mix(s, a, b) => {
                let a = shuffle_prob(a, flips);
                let b = shuffle_prob(b, flips);
                match flips.next().unwrap_or(0) {
                    1 => ProbTerm::mix(Rational::one() - s, b, a),
                    2 => match a {
                        ProbTerm::Mix(r, x, y) => {
                            let rs = &r * s;
                            let inner = (Rational::one() - &r) * s / (Rational::one() - &rs);
                            ProbTerm::mix(rs, *x, ProbTerm::mix(inner, *y, b))
                        }
                        a => ProbTerm::mix(s.clone(), a, b),
                    },
                    _ => ProbTerm::mix(s.clone(), a, b),
                }
            }
        }
    }

    proptest! {
        #[test]
        fn choice_nf_invariant_under_equations(t in arb_choice(), flips in prop::collection::vec(any::<bool>(), 32)) {
            let shuffled = shuffle_choice(&t, &mut flips.into_iter());
            prop_assert_eq!(choice_normal_form(&t).unwrap(), choice_normal_form(&shuffled).unwrap());
        }

        #[test]
        fn prob_nf_invariant_under_equations(t in arb_prob(), flips in prop::collection::vec(0u8..3, 32)) {
            let shuffled = shuffle_prob(&t, &mut flips.into_iter());
            prop_assert_eq!(prob_normal_form(&t).unwrap(), prob_normal_form(&shuffled).unwrap());
        }

        #[test]
        fn prob_nf_has_unit_mass(t in arb_prob()) {
            prop_assert!(prob_normal_form(&t).unwrap().total().is_one());
        }
    }
}
