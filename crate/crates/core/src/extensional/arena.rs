use std::collections::HashMap;
use std::hash::Hash;

/// Hash-consing table: equal items share one index.
#[derive(Debug)]
pub(crate) struct Interner<T> {
    items: Vec<T>,
    index: HashMap<T, u32>,
}

impl<T: Clone + Eq + Hash> Interner<T> {
    pub(crate) fn new() -> Self {
        Self {
            items: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub(crate) fn intern(&mut self, item: T) -> u32 {
        if let Some(&i) = self.index.get(&item) {
            return i;
        }
        let i = u32::try_from(self.items.len()).expect("interner overflow");
        self.items.push(item.clone());
        self.index.insert(item, i);
        i
    }

    pub(crate) fn get(&self, i: u32) -> &T {
        &self.items[i as usize]
    }
}

/// A node of a step tree in copower normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum StepNode<S> {
    Emit(usize, S),
    Read(Vec<NodeId>),
}

/// A node of a shared, hash-consed step tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

#[derive(Debug)]
pub(crate) struct StepArena<S> {
    nodes: Interner<StepNode<S>>,
}

impl<S: Clone + Eq + Hash> StepArena<S> {
    pub(crate) fn new() -> Self {
        Self { nodes: Interner::new() }
    }

    pub(crate) fn emit(&mut self, b: usize, s: S) -> NodeId {
        NodeId(self.nodes.intern(StepNode::Emit(b, s)))
    }

    /// `read(children)`, or `(b, merge(continuations))` when every child
    /// is a leaf emitting the same `b`.
    pub(crate) fn read(&mut self, children: Vec<NodeId>, merge: impl FnOnce(Vec<S>) -> S) -> NodeId {
        let mut token = None;
        let mut conts = Vec::with_capacity(children.len());
        for &c in &children {
            match self.get(c) {
                StepNode::Emit(b, s) if token.is_none_or(|t| t == *b) => {
                    token = Some(*b);
                    conts.push(s.clone());
                }
                _ => return NodeId(self.nodes.intern(StepNode::Read(children))),
            }
        }
        match token {
            Some(b) => self.emit(b, merge(conts)),
            None => NodeId(self.nodes.intern(StepNode::Read(children))),
        }
    }

    pub(crate) fn get(&self, id: NodeId) -> &StepNode<S> {
        self.nodes.get(id.0)
    }
}
