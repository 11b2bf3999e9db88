//! Depth-bounded observations: trace equivalence of processors, finite
//! unfoldings of the intensional tree, and prefix semantics of transition
//! systems and generative systems.

use std::collections::BTreeSet;
use std::fmt;

use crate::alphabet::words;
use crate::comodel::StreamOracle;
use crate::error::{Error, Result};
use crate::residual::{Generative, Lts, StepView, StreamProcessor};
use crate::tensor::trace;
use crate::theory::Dist;

/// Outcome of comparing two traces on every input `w·a^ω` with `|w| = d`,
/// over the first `m` outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceVerdict {
    pub depth: usize,
    pub outlen: usize,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub prefix: Vec<usize>,
    pub tail: usize,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl TraceVerdict {
    pub fn is_equivalent(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for TraceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "equivalent at ({}, {})", self.depth, self.outlen),
            Some(c) => write!(
                f,
                "not equivalent at ({}, {}): input {:?} then {} forever gives {:?} vs {:?}",
                self.depth, self.outlen, c.prefix, c.tail, c.left, c.right
            ),
        }
    }
}

pub fn trace_equivalent<P: StreamProcessor, Q: StreamProcessor>(
    p: &P,
    s1: &P::State,
    q: &Q,
    s2: &Q::State,
    depth: usize,
    outlen: usize,
) -> Result<TraceVerdict> {
    if p.input_size() != q.input_size() || p.output_size() != q.output_size() {
        return Err(Error::Invariant(format!(
            "processors have different interfaces: {}→{} tokens vs {}→{} tokens",
            p.input_size(),
            p.output_size(),
            q.input_size(),
            q.output_size()
        )));
    }
    for w in words(p.input_size(), depth) {
        for tail in 0..p.input_size() {
            let stream = StreamOracle::with_constant_tail(w.clone(), tail);
            let left = trace(p, s1, &stream, outlen)?.output;
            let right = trace(q, s2, &stream, outlen)?.output;
            if left != right {
                return Ok(TraceVerdict {
                    depth,
                    outlen,
                    counterexample: Some(Counterexample { prefix: w, tail, left, right }),
                });
            }
        }
    }
    Ok(TraceVerdict {
        depth,
        outlen,
        counterexample: None,
    })
}

/// A node of the intensional tree: the tokens emitted before the next
/// read, then one child per input token. `children` is `None` where the
/// unfolding was cut off by the read depth or the emission cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntensionalNode {
    pub emitted: Vec<usize>,
    pub children: Option<Vec<IntensionalNode>>,
}

impl IntensionalNode {
    /// Indented rendering, one node per line, labelled by the input token
    /// leading to it.
    pub fn render(&self, input: &[String], output: &[String]) -> String {
        let mut out = String::new();
        self.render_into(&mut out, "", 0, input, output);
        out
    }

    fn render_into(&self, out: &mut String, edge: &str, indent: usize, input: &[String], output: &[String]) {
        let label: Vec<&str> = self.emitted.iter().map(|&b| output[b].as_str()).collect();
        out.push_str(&"  ".repeat(indent));
        if !edge.is_empty() {
            out.push_str(edge);
            out.push_str(" -> ");
        }
        out.push('[');
        out.push_str(&label.join(" "));
        out.push(']');
        if self.children.is_none() {
            out.push_str(" ...");
        }
        out.push('\n');
        for (a, child) in self.children.iter().flatten().enumerate() {
            child.render_into(out, &input[a], indent + 1, input, output);
        }
    }

    /// Nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().flatten().map(IntensionalNode::size).sum::<usize>()
    }
}

/// The intensional tree of `s` truncated at read depth `depth`, each node
/// holding at most `cap` emitted tokens.
pub fn unfold_intensional<P: StreamProcessor>(p: &P, s: &P::State, depth: usize, cap: usize) -> Result<IntensionalNode> {
    fn go<'a, P: StreamProcessor>(p: &'a P, cursor: P::Cursor<'a>, depth: usize, cap: usize) -> Result<IntensionalNode> {
        let mut emitted = Vec::new();
        let mut cursor = cursor;
        loop {
            match p.view(&cursor) {
                StepView::Emit(_, _) if emitted.len() == cap => return Ok(IntensionalNode { emitted, children: None }),
                StepView::Emit(b, next) => {
                    emitted.push(b);
                    cursor = p.begin(&next)?;
                }
                StepView::Read if depth == 0 => return Ok(IntensionalNode { emitted, children: None }),
                StepView::Read => {
                    let children = (0..p.input_size())
                        .map(|a| go(p, p.descend(&cursor, a), depth - 1, cap))
                        .collect::<Result<Vec<_>>>()?;
                    return Ok(IntensionalNode {
                        emitted,
                        children: Some(children),
                    });
                }
            }
        }
    }
    go(p, p.begin(s)?, depth, cap)
}

/// Every label sequence of length `n` that `s` can perform.
pub fn lts_trace_set(l: &Lts, s: usize, n: usize) -> BTreeSet<Vec<usize>> {
    let mut frontier: BTreeSet<(Vec<usize>, usize)> = BTreeSet::from([(Vec::new(), s)]);
    for _ in 0..n {
        frontier = frontier
            .iter()
            .flat_map(|(word, state)| {
                l.gamma(*state).iter().map(move |&(b, next)| {
                    let mut w = word.clone();
                    w.push(b);
                    (w, next)
                })
            })
            .collect();
    }
    frontier.into_iter().map(|(w, _)| w).collect()
}

/// The exact distribution of the first `n` labels emitted from `s`.
pub fn gen_prefix_dist(g: &Generative, s: usize, n: usize) -> Dist<Vec<usize>> {
    let mut runs: Dist<(Vec<usize>, usize)> = Dist::point((Vec::new(), s));
    for _ in 0..n {
        runs = runs.bind(&mut |(word, state)| {
            g.gamma(*state).map(&mut |&(b, next)| {
                let mut w = word.clone();
                w.push(b);
                (w, next)
            })
        });
    }
    runs.map(&mut |(w, _)| w.clone())
}
