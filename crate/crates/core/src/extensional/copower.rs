//! The copower `B · T_A(X)` inside `T_A(B × T_A(X))`.
//!
//! A tree with leaves `(b, x)` is in copower normal form when no interior
//! node has all of its leaves labelled by the same token. The rewrite
//! `read(λa. (b, x_a)) → (b, read(λa. x_a))` is strongly normalizing and
//! confluent, and its normal forms are exactly these trees.

use crate::comodel::StreamOracle;
use crate::theory::Term;

/// Input-theory trees whose leaves carry an output token and a
/// continuation term.
pub type CopowerTree<X> = Term<(usize, Term<X>)>;

/// A tree in copower normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LazyTree<X>(CopowerTree<X>);

impl<X> LazyTree<X> {
    pub fn tree(&self) -> &CopowerTree<X> {
        &self.0
    }

    pub fn into_tree(self) -> CopowerTree<X> {
        self.0
    }

    /// Reads performed before the root emits along the given input.
    pub fn reads_before_emit(&self, stream: &StreamOracle) -> usize {
        let mut node = &self.0;
        let mut reads = 0;
        while let Term::App(_, children) = node {
            node = &children[stream.at(reads)];
            reads += 1;
        }
        reads
    }
}

/// Normalizes in one bottom-up pass: children are normal before their
/// parent is inspected, so only a node whose children are all leaves with
/// one token can still be a redex.
pub fn copower_normal_form<X: Clone>(t: &CopowerTree<X>) -> LazyTree<X> {
    LazyTree(t.fold(&mut |leaf| Term::Var(leaf.clone()), &mut |op, children| {
        match collapse(&children) {
            Some(b) => Term::Var((b, Term::App(op, children.into_iter().map(into_cont).collect()))),
            None => Term::App(op, children),
        }
    }))
}

fn collapse<X>(children: &[CopowerTree<X>]) -> Option<usize> {
    let mut token = None;
    for c in children {
        match c {
            Term::Var((b, _)) if token.is_none_or(|t| t == *b) => token = Some(*b),
            _ => return None,
        }
    }
    token
}

fn into_cont<X>(leaf: CopowerTree<X>) -> Term<X> {
    match leaf {
        Term::Var((_, x)) => x,
        Term::App(..) => unreachable!("collapse only accepts leaves"),
    }
}

/// The normal-form invariant, checked directly: no interior node has all
/// of its leaf descendants labelled by one token.
pub fn is_copower_normal<X>(t: &CopowerTree<X>) -> bool {
    // Uniform token of the subtree, if any, and whether it is normal.
    fn go<X>(t: &CopowerTree<X>) -> (Option<usize>, bool) {
        match t {
            Term::Var((b, _)) => (Some(*b), true),
            Term::App(_, children) => {
                let mut uniform = None;
                let mut mixed = false;
                for c in children {
                    let (u, ok) = go(c);
                    if !ok {
                        return (None, false);
                    }
                    match (u, uniform) {
                        (None, _) => mixed = true,
                        (Some(b), None) if !mixed => uniform = Some(b),
                        (Some(b), Some(prev)) if b == prev => {}
                        _ => mixed = true,
                    }
                }
                if mixed {
                    (None, true)
                } else {
                    (uniform, false)
                }
            }
        }
    }
    go(t).1
}

/// Paths to every node where the rewrite applies.
pub fn copower_redexes<X>(t: &CopowerTree<X>) -> Vec<Vec<usize>> {
    fn go<X>(t: &CopowerTree<X>, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if let Term::App(_, children) = t {
            if collapse(children).is_some() {
                out.push(path.clone());
            }
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Applies the rewrite at `path`, or returns `None` if it is not a redex.
pub fn copower_rewrite_at<X: Clone>(t: &CopowerTree<X>, path: &[usize]) -> Option<CopowerTree<X>> {
    replace_at(t, path, &mut |node| match node {
        Term::App(op, children) => {
            let b = collapse(children)?;
            Some(Term::Var((b, Term::App(*op, children.iter().cloned().map(into_cont).collect()))))
        }
        Term::Var(_) => None,
    })
}

/// The inverse rewrite at `path`: a leaf `(b, read(λa. x_a))` becomes
/// `read(λa. (b, x_a))`.
pub fn copower_expand_at<X: Clone>(t: &CopowerTree<X>, path: &[usize]) -> Option<CopowerTree<X>> {
    replace_at(t, path, &mut |node| match node {
        Term::Var((b, Term::App(op, xs))) => Some(Term::App(*op, xs.iter().map(|x| Term::Var((*b, x.clone()))).collect())),
        _ => None,
    })
}

/// Paths to every leaf whose continuation starts with a read.
pub fn copower_expandable<X>(t: &CopowerTree<X>) -> Vec<Vec<usize>> {
    fn go<X>(t: &CopowerTree<X>, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match t {
            Term::Var((_, Term::App(..))) => out.push(path.clone()),
            Term::Var(_) => {}
            Term::App(_, children) => {
                for (i, c) in children.iter().enumerate() {
                    path.push(i);
                    go(c, path, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

fn replace_at<X: Clone>(
    t: &CopowerTree<X>,
    path: &[usize],
    f: &mut impl FnMut(&CopowerTree<X>) -> Option<CopowerTree<X>>,
) -> Option<CopowerTree<X>> {
    match path.split_first() {
        None => f(t),
        Some((&i, rest)) => match t {
            Term::App(op, children) if i < children.len() => {
                let mut children = children.clone();
                children[i] = replace_at(&children[i], rest, f)?;
                Some(Term::App(*op, children))
            }
            _ => None,
        },
    }
}

/// Runs the tree and then the continuation of the leaf reached against
/// one stream, returning the token, the final value and the total reads.
pub fn evaluate<X: Clone>(t: &CopowerTree<X>, stream: &StreamOracle) -> (usize, X, usize) {
    let mut reads = 0;
    let mut node = t;
    let (b, mut cont) = loop {
        match node {
            Term::Var((b, cont)) => break (*b, cont),
            Term::App(_, children) => {
                node = &children[stream.at(reads)];
                reads += 1;
            }
        }
    };
    loop {
        match cont {
            Term::Var(x) => return (b, x.clone(), reads),
            Term::App(_, children) => {
                cont = &children[stream.at(reads)];
                reads += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::words;
    use proptest::prelude::*;

    type T = CopowerTree<char>;

    fn leaf(b: usize, x: char) -> T {
        Term::Var((b, Term::Var(x)))
    }

    #[test]
    fn uniform_read_collapses() {
        let t: T = Term::read(vec![leaf(0, 'x'), leaf(0, 'y')]);
        let nf = copower_normal_form(&t);
        assert_eq!(nf.tree(), &Term::Var((0, Term::read(vec![Term::Var('x'), Term::Var('y')]))));
        assert!(is_copower_normal(nf.tree()));
        assert!(!is_copower_normal(&t));
    }

    #[test]
    fn leaf_is_normal() {
        let t = leaf(1, 'x');
        assert_eq!(copower_normal_form(&t).into_tree(), t);
    }

    #[test]
    fn inner_collapse_blocked_outside() {
        let t: T = Term::read(vec![Term::read(vec![leaf(0, 'u'), leaf(0, 'v')]), leaf(1, 'w')]);
        let expected: T = Term::read(vec![
            Term::Var((0, Term::read(vec![Term::Var('u'), Term::Var('v')]))),
            leaf(1, 'w'),
        ]);
        assert_eq!(copower_normal_form(&t).into_tree(), expected);
    }

    #[test]
    fn deep_uniform_tree_collapses_to_root() {
        let t: T = Term::read(vec![
            Term::read(vec![leaf(0, 'a'), leaf(0, 'b')]),
            Term::read(vec![leaf(0, 'c'), leaf(0, 'd')]),
        ]);
        let nf = copower_normal_form(&t).into_tree();
        let Term::Var((0, cont)) = nf else { panic!("expected a leaf") };
        assert_eq!(cont.depth(), 2);
    }

    #[test]
    fn expand_inverts_rewrite() {
        let t: T = Term::read(vec![leaf(0, 'x'), leaf(0, 'y')]);
        let rewritten = copower_rewrite_at(&t, &[]).unwrap();
        assert_eq!(copower_expand_at(&rewritten, &[]).unwrap(), t);
        assert!(copower_rewrite_at(&t, &[0]).is_none());
    }

    pub(crate) fn arb_tree() -> impl Strategy<Value = T> {
        let leaf = (0usize..2, prop::sample::select(vec!['p', 'q', 'r'])).prop_map(|(b, x)| Term::Var((b, Term::Var(x))));
        leaf.prop_recursive(5, 50, 2, |inner| prop::collection::vec(inner, 2).prop_map(Term::read))
    }

    fn normalize_randomly(t: &T, picks: &[usize]) -> T {
        let mut t = t.clone();
        let mut picks = picks.iter().cycle();
        loop {
            let redexes = copower_redexes(&t);
            if redexes.is_empty() {
                return t;
            }
            let i = picks.next().copied().unwrap_or(0) % redexes.len();
            t = copower_rewrite_at(&t, &redexes[i]).unwrap();
        }
    }

    fn expand_fully(t: &T) -> T {
        let mut t = t.clone();
        while let Some(path) = copower_expandable(&t).first().cloned() {
            t = copower_expand_at(&t, &path).unwrap();
        }
        t
    }

    proptest! {
        #[test]
        fn rewriting_is_confluent(t in arb_tree(), picks in prop::collection::vec(0usize..8, 1..16)) {
            let nf = copower_normal_form(&t);
            prop_assert!(is_copower_normal(nf.tree()));
            prop_assert_eq!(&normalize_randomly(&t, &picks), nf.tree());
        }

        #[test]
        fn expansion_recovers_input(t in arb_tree()) {
            let nf = copower_normal_form(&t);
            prop_assert_eq!(expand_fully(nf.tree()), t.clone());
            for w in words(2, t.depth() + 1) {
                let s = StreamOracle::with_constant_tail(w, 0);
                let (b1, x1, r1) = evaluate(&t, &s);
                let (b2, x2, r2) = evaluate(nf.tree(), &s);
                prop_assert_eq!((b1, x1, r1), (b2, x2, r2));
                prop_assert!(nf.reads_before_emit(&s) <= r1);
            }
        }
    }
}
