//! Seeded random systems and inputs for property checks.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::Rng;

use crate::alphabet::{words, Alphabet};
use crate::comodel::StreamOracle;
use crate::residual::{Generative, Lts, Processor};
use crate::theory::{Dist, Rational, Term};

#[derive(Clone, Debug)]
pub struct SampleConfig {
    /// Alphabets have between 1 and this many tokens.
    pub max_alphabet: usize,
    pub max_states: usize,
    /// Read depth of each step tree of a processor.
    pub max_depth: usize,
    /// Branches per state of a transition system or generative system.
    pub max_branches: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            max_alphabet: 3,
            max_states: 4,
            max_depth: 3,
            max_branches: 3,
        }
    }
}

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

pub fn random_alphabet(rng: &mut impl Rng, cfg: &SampleConfig) -> Alphabet {
    Alphabet::numbered(rng.gen_range(1..=cfg.max_alphabet))
}

/// A read tree of depth at most `depth` with leaves drawn by `leaf`.
pub fn random_read_tree<X>(rng: &mut impl Rng, arity: usize, depth: usize, leaf: &mut impl FnMut(&mut dyn rand::RngCore) -> X) -> Term<X>
where
    X: Clone,
{
    fn go<X, R: Rng>(rng: &mut R, arity: usize, depth: usize, leaf: &mut impl FnMut(&mut dyn rand::RngCore) -> X) -> Term<X> {
        if depth == 0 || rng.gen_bool(0.45) {
            Term::Var(leaf(rng))
        } else {
            Term::read((0..arity).map(|_| go(rng, arity, depth - 1, leaf)).collect())
        }
    }
    go(rng, arity, depth, leaf)
}

pub fn random_processor(rng: &mut impl Rng, cfg: &SampleConfig) -> Processor {
    let input = random_alphabet(rng, cfg);
    let output = random_alphabet(rng, cfg);
    random_processor_between(rng, cfg, input, output)
}

pub fn random_processor_between(rng: &mut impl Rng, cfg: &SampleConfig, input: Alphabet, output: Alphabet) -> Processor {
    let n = rng.gen_range(1..=cfg.max_states);
    let (a, b) = (input.len(), output.len());
    let gamma = (0..n)
        .map(|_| random_read_tree(rng, a, cfg.max_depth, &mut |r| (r.gen_range(0..b), r.gen_range(0..n))))
        .collect();
    Processor::processor(input, output, state_names(n), gamma).expect("sampled processors are well formed")
}

pub fn random_lts(rng: &mut impl Rng, cfg: &SampleConfig) -> Lts {
    let labels = random_alphabet(rng, cfg);
    random_lts_over(rng, cfg, labels)
}

pub fn random_lts_over(rng: &mut impl Rng, cfg: &SampleConfig, labels: Alphabet) -> Lts {
    let n = rng.gen_range(1..=cfg.max_states);
    let gamma = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=cfg.max_branches);
            (0..k).map(|_| (rng.gen_range(0..labels.len()), rng.gen_range(0..n))).collect::<BTreeSet<_>>()
        })
        .collect();
    Lts::lts(labels, state_names(n), gamma).expect("sampled transition systems are well formed")
}

pub fn random_generative(rng: &mut impl Rng, cfg: &SampleConfig) -> Generative {
    let labels = random_alphabet(rng, cfg);
    random_generative_over(rng, cfg, labels)
}

pub fn random_generative_over(rng: &mut impl Rng, cfg: &SampleConfig, labels: Alphabet) -> Generative {
    let n = rng.gen_range(1..=cfg.max_states);
    let gamma = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=cfg.max_branches);
            let raw: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=6)).collect();
            let total: u32 = raw.iter().sum();
            Dist::new(raw.into_iter().map(|w| {
                (
                    (rng.gen_range(0..labels.len()), rng.gen_range(0..n)),
                    Rational::new(BigInt::from(w), BigInt::from(total)),
                )
            }))
            .expect("normalized weights sum to one")
        })
        .collect();
    Generative::generative(labels, state_names(n), gamma).expect("sampled generative systems are well formed")
}

/// A binary tree with at most `max_size` nodes whose leaves carry a token
/// below `tokens` and a trivial continuation.
pub fn random_copower_tree(rng: &mut impl Rng, max_size: usize, tokens: usize) -> Term<(usize, Term<u32>)> {
    fn go<R: Rng>(rng: &mut R, budget: usize, tokens: usize, next: &mut u32) -> Term<(usize, Term<u32>)> {
        if budget < 3 || rng.gen_bool(0.3) {
            *next += 1;
            return Term::Var((rng.gen_range(0..tokens), Term::Var(*next)));
        }
        let left = rng.gen_range(1..budget - 1);
        let right = budget - 1 - left;
        Term::read(vec![go(rng, left, tokens, next), go(rng, right, tokens, next)])
    }
    let budget = rng.gen_range(1..=max_size);
    go(rng, budget, tokens, &mut 0)
}

/// Every stream `w·c^ω` with `|w| ≤ max_prefix` and `c` a single token.
pub fn unit_cycle_streams(size: usize, max_prefix: usize) -> Vec<StreamOracle> {
    let mut out = Vec::new();
    for n in 0..=max_prefix {
        for w in words(size, n) {
            for c in 0..size {
                out.push(StreamOracle::with_constant_tail(w.clone(), c));
            }
        }
    }
    out
}

/// Every stream `w·c^ω` with `|w| ≤ max_prefix` and `1 ≤ |c| ≤ max_cycle`.
pub fn periodic_streams(size: usize, max_prefix: usize, max_cycle: usize) -> Vec<StreamOracle> {
    let mut out = Vec::new();
    for n in 0..=max_prefix {
        for w in words(size, n) {
            for m in 1..=max_cycle {
                for c in words(size, m) {
                    out.push(StreamOracle::Periodic { prefix: w.clone(), cycle: c });
                }
            }
        }
    }
    out
}
