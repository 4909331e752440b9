//! Clique-width terms over the two-sorted signature.
//!
//! A [`Term`] is stored as a flat post-order arena: every subterm occupies a
//! contiguous slice ending at its root, and each node records the size of
//! its subtree. Children are therefore implicit, traversal never recurses,
//! and `t/u` is just a slice copy. Terms produced from tree-decompositions of
//! long paths are hundreds of thousands of levels deep, so nothing here may
//! use the call stack proportionally to depth.

mod eval;
mod ops;
mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use crate::label::{Label, Sort};

pub use eval::{evaluate, evaluate_tracking, BipartiteStruct, Evaluation, VertexId};
pub use ops::{
    annotate, make_irredundant, redundant_adds, restrict_to, restrict_to_nodes, AnnotatedSets,
};
pub use parse::{parse_term, ParseError};

/// Membership bits attached to a leaf: bit `i` is set iff the leaf belongs
/// to the `(i+1)`-th set variable of its sort.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Annotation {
    len: u8,
    bits: u32,
}

pub const MAX_ANNOTATION_WIDTH: usize = 32;

impl Annotation {
    pub const EMPTY: Annotation = Annotation { len: 0, bits: 0 };

    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_ANNOTATION_WIDTH);
        Annotation { len: len as u8, bits: 0 }
    }

    pub fn from_bits(len: usize, bits: u32) -> Self {
        assert!(len <= MAX_ANNOTATION_WIDTH);
        let mask = if len == 32 { u32::MAX } else { (1u32 << len) - 1 };
        Annotation { len: len as u8, bits: bits & mask }
    }

    pub fn from_bools(flags: &[bool]) -> Self {
        let mut a = Annotation::zeros(flags.len());
        for (i, &f) in flags.iter().enumerate() {
            a.set(i, f);
        }
        a
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn get(self, i: usize) -> bool {
        i < self.len() && self.bits & (1 << i) != 0
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len(), "annotation index {i} out of range");
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    /// Drops the last bit.
    pub fn pop(self) -> Annotation {
        assert!(self.len > 0);
        Annotation::from_bits(self.len() - 1, self.bits)
    }

    /// Appends `value` as a new last bit.
    pub fn push(self, value: bool) -> Annotation {
        let mut a = Annotation::from_bits(self.len() + 1, self.bits);
        a.set(self.len(), value);
        a
    }
}

impl fmt::Debug for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A function symbol of the signature.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Symbol {
    Empty,
    Leaf { label: Label, ann: Annotation },
    Oplus,
    Relab { from: Label, to: Label },
    Add { from: Label, to: Label },
}

impl Symbol {
    pub fn leaf(label: Label) -> Symbol {
        Symbol::Leaf { label, ann: Annotation::EMPTY }
    }

    pub fn arity(&self) -> usize {
        match self {
            Symbol::Empty | Symbol::Leaf { .. } => 0,
            Symbol::Relab { .. } | Symbol::Add { .. } => 1,
            Symbol::Oplus => 2,
        }
    }

    /// Checks the sort discipline of unary operations.
    pub fn validate(&self) -> Result<(), TermError> {
        match *self {
            Symbol::Relab { from, to } => {
                if from.sort() != to.sort() {
                    Err(TermError::RelabAcrossSorts { from, to })
                } else if from == to {
                    Err(TermError::RelabIdentity(from))
                } else {
                    Ok(())
                }
            }
            Symbol::Add { from, to } => {
                if from.sort() == to.sort() {
                    Err(TermError::AddWithinSort { from, to })
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Labels mentioned by the symbol.
    pub fn labels(&self) -> impl Iterator<Item = Label> {
        let (a, b) = match *self {
            Symbol::Leaf { label, .. } => (Some(label), None),
            Symbol::Relab { from, to } | Symbol::Add { from, to } => (Some(from), Some(to)),
            _ => (None, None),
        };
        a.into_iter().chain(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("relab {from}->{to} changes the sort of a label")]
    RelabAcrossSorts { from: Label, to: Label },
    #[error("relab {0}->{0} is not an operation")]
    RelabIdentity(Label),
    #[error("add {from} {to} requires labels of opposite sorts")]
    AddWithinSort { from: Label, to: Label },
    #[error("annotation width mismatch: {sort:?} leaf has {found} bits, expected {expected}")]
    WidthMismatch { sort: Sort, expected: usize, found: usize },
    #[error("invalid position {0}")]
    InvalidPosition(Position),
    #[error("position {0} is not a leaf")]
    NotALeaf(Position),
    #[error("position {pos} holds a {found:?} leaf, expected {expected:?}")]
    SortMismatch { pos: Position, expected: Sort, found: Sort },
}

/// Index of a node inside one particular [`Term`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("term too large"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Node {
    pub symbol: Symbol,
    size: u32,
}

impl Node {
    /// Number of nodes in the subtree rooted here.
    pub fn size(&self) -> usize {
        self.size as usize
    }
}

/// A Dewey word: the sequence of 1-based child indices from the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Position(Vec<u8>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn from_steps(steps: &[u8]) -> Self {
        Position(steps.to_vec())
    }

    pub fn steps(&self) -> &[u8] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, index: u8) -> Position {
        let mut p = self.0.clone();
        p.push(index);
        Position(p)
    }

    /// `self` followed by `suffix` (the embedding `w ↦ uw`).
    pub fn concat(&self, suffix: &Position) -> Position {
        let mut p = self.0.clone();
        p.extend_from_slice(&suffix.0);
        Position(p)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| match part {
                "1" => Ok(1),
                "2" => Ok(2),
                _ => Err(format!("bad position step {part:?} in {s:?}")),
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(Position)
    }
}

/// Children of a node, left to right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Children {
    None,
    One(NodeId),
    Two(NodeId, NodeId),
}

impl Children {
    pub fn as_vec(self) -> Vec<NodeId> {
        match self {
            Children::None => vec![],
            Children::One(c) => vec![c],
            Children::Two(l, r) => vec![l, r],
        }
    }
}

/// A term of the signature, in post-order arena form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    nodes: Vec<Node>,
}

impl Term {
    pub fn empty() -> Term {
        Term { nodes: vec![Node { symbol: Symbol::Empty, size: 1 }] }
    }

    pub fn leaf(label: Label) -> Term {
        Term::leaf_annotated(label, Annotation::EMPTY)
    }

    pub fn leaf_annotated(label: Label, ann: Annotation) -> Term {
        Term { nodes: vec![Node { symbol: Symbol::Leaf { label, ann }, size: 1 }] }
    }

    pub fn oplus(left: Term, right: Term) -> Term {
        let mut nodes = left.nodes;
        nodes.extend(right.nodes);
        let size = nodes.len() as u32 + 1;
        nodes.push(Node { symbol: Symbol::Oplus, size });
        Term { nodes }
    }

    pub fn relab(from: Label, to: Label, child: Term) -> Result<Term, TermError> {
        child.wrap(Symbol::Relab { from, to })
    }

    pub fn add(from: Label, to: Label, child: Term) -> Result<Term, TermError> {
        child.wrap(Symbol::Add { from, to })
    }

    fn wrap(mut self, symbol: Symbol) -> Result<Term, TermError> {
        symbol.validate()?;
        let size = self.nodes.len() as u32 + 1;
        self.nodes.push(Node { symbol, size });
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        NodeId::new(self.nodes.len() - 1)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn symbol(&self, id: NodeId) -> &Symbol {
        &self.nodes[id.index()].symbol
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Node ids in post-order (children before parents).
    pub fn post_order(&self) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator {
        (0..self.nodes.len()).map(NodeId::new)
    }

    pub fn children(&self, id: NodeId) -> Children {
        let i = id.index();
        match self.nodes[i].symbol.arity() {
            0 => Children::None,
            1 => Children::One(NodeId::new(i - 1)),
            _ => {
                let right = i - 1;
                let left = right - self.nodes[right].size();
                Children::Two(NodeId::new(left), NodeId::new(right))
            }
        }
    }

    /// Index range occupied by the subterm rooted at `id`.
    pub fn subterm_range(&self, id: NodeId) -> Range<usize> {
        let end = id.index() + 1;
        end - self.nodes[id.index()].size()..end
    }

    /// The subterm `t/u` rooted at node `id`. Node `j` of the result is node
    /// `j + subterm_range(id).start` of `self`.
    pub fn subterm(&self, id: NodeId) -> Term {
        Term { nodes: self.nodes[self.subterm_range(id)].to_vec() }
    }

    pub fn subterm_at(&self, pos: &Position) -> Result<Term, TermError> {
        Ok(self.subterm(self.node_at(pos)?))
    }

    pub fn node_at(&self, pos: &Position) -> Result<NodeId, TermError> {
        let mut id = self.root();
        for &step in pos.steps() {
            id = match (self.children(id), step) {
                (Children::One(c), 1) => c,
                (Children::Two(l, _), 1) => l,
                (Children::Two(_, r), 2) => r,
                _ => return Err(TermError::InvalidPosition(pos.clone())),
            };
        }
        Ok(id)
    }

    /// Dewey position of a node. Costs O(depth).
    pub fn position(&self, id: NodeId) -> Position {
        let target = id.index();
        let mut cur = self.root();
        let mut steps = Vec::new();
        while cur != id {
            match self.children(cur) {
                Children::One(c) => {
                    steps.push(1);
                    cur = c;
                }
                Children::Two(l, r) => {
                    if target <= l.index() {
                        steps.push(1);
                        cur = l;
                    } else {
                        steps.push(2);
                        cur = r;
                    }
                }
                Children::None => unreachable!("node {target} not below root"),
            }
        }
        Position(steps)
    }

    /// Positions of all nodes, computed in one top-down pass.
    pub fn all_positions(&self) -> Vec<Position> {
        let mut out = vec![Position::root(); self.len()];
        for id in self.post_order().rev() {
            let here = out[id.index()].clone();
            match self.children(id) {
                Children::None => {}
                Children::One(c) => out[c.index()] = here.child(1),
                Children::Two(l, r) => {
                    out[l.index()] = here.child(1);
                    out[r.index()] = here.child(2);
                }
            }
        }
        out
    }

    /// Parent of every node (`None` for the root).
    pub fn parents(&self) -> Vec<Option<NodeId>> {
        let mut out = vec![None; self.len()];
        for id in self.post_order() {
            for c in self.children(id).as_vec() {
                out[c.index()] = Some(id);
            }
        }
        out
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.post_order().filter(|&id| matches!(self.symbol(id), Symbol::Leaf { .. }))
    }

    /// Leaves of the given sort.
    pub fn leaves_of(&self, sort: Sort) -> impl Iterator<Item = NodeId> + '_ {
        self.post_order().filter(move |&id| match self.symbol(id) {
            Symbol::Leaf { label, .. } => label.sort() == sort,
            _ => false,
        })
    }

    pub fn leaf_label(&self, id: NodeId) -> Option<Label> {
        match self.symbol(id) {
            Symbol::Leaf { label, .. } => Some(*label),
            _ => None,
        }
    }

    pub fn leaf_annotation(&self, id: NodeId) -> Option<Annotation> {
        match self.symbol(id) {
            Symbol::Leaf { ann, .. } => Some(*ann),
            _ => None,
        }
    }

    /// All labels occurring anywhere in the term.
    pub fn labels(&self) -> BTreeSet<Label> {
        self.nodes.iter().flat_map(|n| n.symbol.labels()).collect()
    }

    /// Annotation widths `(p, m)` carried by vertex and edge leaves. A sort
    /// with no leaves reports `None`.
    pub fn widths(&self) -> Result<(Option<usize>, Option<usize>), TermError> {
        let mut widths = [None, None];
        for n in &self.nodes {
            if let Symbol::Leaf { label, ann } = n.symbol {
                let slot = &mut widths[(label.sort() == Sort::Edge) as usize];
                match *slot {
                    None => *slot = Some(ann.len()),
                    Some(w) if w != ann.len() => {
                        return Err(TermError::WidthMismatch {
                            sort: label.sort(),
                            expected: w,
                            found: ann.len(),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok((widths[0], widths[1]))
    }

    /// Checks that the term uses widths compatible with `(p, m)`.
    pub fn check_widths(&self, p: usize, m: usize) -> Result<(), TermError> {
        for n in &self.nodes {
            if let Symbol::Leaf { label, ann } = n.symbol {
                let expected = if label.is_vertex() { p } else { m };
                if ann.len() != expected {
                    return Err(TermError::WidthMismatch {
                        sort: label.sort(),
                        expected,
                        found: ann.len(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Validates every operation symbol and annotation widths.
    pub fn validate(&self) -> Result<(), TermError> {
        for n in &self.nodes {
            n.symbol.validate()?;
        }
        self.widths().map(|_| ())
    }

    /// Applies `f` to every label. `f` must map each sort into itself and be
    /// injective on the labels of the term, otherwise relabellings may become
    /// invalid.
    pub fn map_labels(&self, f: impl Fn(Label) -> Label) -> Result<Term, TermError> {
        let mut nodes = self.nodes.clone();
        for n in &mut nodes {
            n.symbol = match n.symbol {
                Symbol::Leaf { label, ann } => Symbol::Leaf { label: f(label), ann },
                Symbol::Relab { from, to } => Symbol::Relab { from: f(from), to: f(to) },
                Symbol::Add { from, to } => Symbol::Add { from: f(from), to: f(to) },
                s => s,
            };
            n.symbol.validate()?;
        }
        Ok(Term { nodes })
    }

    /// Replaces the annotation of every leaf using `f(node, label)`.
    pub fn with_annotations(&self, mut f: impl FnMut(NodeId, Label) -> Annotation) -> Term {
        let mut nodes = self.nodes.clone();
        for (i, n) in nodes.iter_mut().enumerate() {
            if let Symbol::Leaf { label, .. } = n.symbol {
                n.symbol = Symbol::Leaf { label, ann: f(NodeId::new(i), label) };
            }
        }
        Term { nodes }
    }

    /// Drops all annotations.
    pub fn strip_annotations(&self) -> Term {
        self.with_annotations(|_, _| Annotation::EMPTY)
    }

    /// Serializes to the S-expression format.
    pub fn to_sexpr(&self) -> String {
        enum Work {
            Node(NodeId),
            Close,
            Space,
        }
        let mut out = String::with_capacity(self.len() * 8);
        let mut stack = vec![Work::Node(self.root())];
        while let Some(w) = stack.pop() {
            match w {
                Work::Close => out.push(')'),
                Work::Space => out.push(' '),
                Work::Node(id) => match *self.symbol(id) {
                    Symbol::Empty => out.push_str("(empty)"),
                    Symbol::Leaf { label, ann } => {
                        if ann.is_empty() {
                            out.push_str(&format!("(leaf {label})"));
                        } else {
                            out.push_str(&format!("(leaf {label} {ann})"));
                        }
                    }
                    Symbol::Oplus => {
                        let Children::Two(l, r) = self.children(id) else { unreachable!() };
                        out.push_str("(oplus ");
                        stack.push(Work::Close);
                        stack.push(Work::Node(r));
                        stack.push(Work::Space);
                        stack.push(Work::Node(l));
                    }
                    Symbol::Relab { from, to } | Symbol::Add { from, to } => {
                        let kw = if matches!(self.symbol(id), Symbol::Relab { .. }) {
                            "relab"
                        } else {
                            "add"
                        };
                        out.push_str(&format!("({kw} {from} {to} "));
                        stack.push(Work::Close);
                        stack.push(Work::Node(NodeId::new(id.index() - 1)));
                    }
                },
            }
        }
        out
    }

    /// Depth of the term tree (a single node has depth 1).
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.len()];
        for id in self.post_order() {
            depth[id.index()] =
                1 + self.children(id).as_vec().iter().map(|c| depth[c.index()]).max().unwrap_or(0);
        }
        depth.last().copied().unwrap_or(0)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

/// Builds a term in reverse Polish order: operands are pushed, operators pop
/// their children off the stack.
#[derive(Default, Debug)]
pub struct TermBuilder {
    nodes: Vec<Node>,
    stack: Vec<usize>,
}

impl TermBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of finished subterms on the operand stack.
    pub fn pending(&self) -> usize {
        self.stack.len()
    }

    pub fn nodes_emitted(&self) -> usize {
        self.nodes.len()
    }

    fn push(&mut self, symbol: Symbol, size: usize) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node { symbol, size: size as u32 });
        self.stack.push(id);
        NodeId::new(id)
    }

    pub fn empty(&mut self) -> NodeId {
        self.push(Symbol::Empty, 1)
    }

    pub fn leaf(&mut self, label: Label) -> NodeId {
        self.push(Symbol::leaf(label), 1)
    }

    pub fn leaf_annotated(&mut self, label: Label, ann: Annotation) -> NodeId {
        self.push(Symbol::Leaf { label, ann }, 1)
    }

    /// Combines the two topmost subterms.
    pub fn oplus(&mut self) -> NodeId {
        let r = self.stack.pop().expect("oplus needs two operands");
        let l = self.stack.pop().expect("oplus needs two operands");
        let size = self.nodes[r].size() + self.nodes[l].size() + 1;
        self.push(Symbol::Oplus, size)
    }

    pub fn relab(&mut self, from: Label, to: Label) -> Result<NodeId, TermError> {
        self.unary(Symbol::Relab { from, to })
    }

    pub fn add(&mut self, from: Label, to: Label) -> Result<NodeId, TermError> {
        self.unary(Symbol::Add { from, to })
    }

    /// Pushes an arbitrary symbol, popping as many operands as its arity.
    pub fn symbol(&mut self, symbol: Symbol) -> Result<NodeId, TermError> {
        match symbol.arity() {
            0 => Ok(self.push(symbol, 1)),
            1 => self.unary(symbol),
            _ => Ok(self.oplus()),
        }
    }

    fn unary(&mut self, symbol: Symbol) -> Result<NodeId, TermError> {
        symbol.validate()?;
        let c = self.stack.pop().expect("unary operator needs an operand");
        let size = self.nodes[c].size() + 1;
        Ok(self.push(symbol, size))
    }

    /// Finishes the term; exactly one subterm must be on the stack.
    pub fn finish(self) -> Term {
        assert_eq!(self.stack.len(), 1, "builder must hold exactly one term");
        Term { nodes: self.nodes }
    }

    /// Folds all pending subterms with `oplus` (left to right) and finishes.
    /// An empty builder yields `(empty)`.
    pub fn finish_all(mut self) -> Term {
        if self.stack.is_empty() {
            self.empty();
        }
        while self.stack.len() > 1 {
            self.oplus();
        }
        self.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> Label {
        Label::vertex(n)
    }
    fn e(n: u32) -> Label {
        Label::edge(n)
    }

    fn t_edge() -> Term {
        parse_term("(add -1 2 (add 1 -1 (oplus (oplus (leaf 1) (leaf 2)) (leaf -1))))").unwrap()
    }

    #[test]
    fn children_and_ranges() {
        let t = Term::oplus(Term::leaf(v(1)), Term::oplus(Term::leaf(v(2)), Term::leaf(e(1))));
        let root = t.root();
        let Children::Two(l, r) = t.children(root) else { panic!() };
        assert_eq!(l.index(), 0);
        assert_eq!(r.index(), 3);
        assert_eq!(t.subterm_range(r), 1..4);
        assert_eq!(t.subterm(l), Term::leaf(v(1)));
    }

    #[test]
    fn subterm_at_root_and_left() {
        let t = Term::oplus(Term::leaf(v(1)), Term::leaf(e(1)));
        assert_eq!(t.subterm_at(&Position::root()).unwrap(), t);
        assert_eq!(t.subterm_at(&Position::from_steps(&[1])).unwrap(), Term::leaf(v(1)));
        assert!(matches!(
            t.subterm_at(&Position::from_steps(&[3])),
            Err(TermError::InvalidPosition(_))
        ));
        assert!(t.subterm_at(&Position::from_steps(&[1, 1])).is_err());
    }

    #[test]
    fn positions_roundtrip_through_node_at() {
        let t = t_edge();
        let all = t.all_positions();
        for id in t.post_order() {
            assert_eq!(t.position(id), all[id.index()]);
            assert_eq!(t.node_at(&all[id.index()]).unwrap(), id);
        }
        assert_eq!(all[t.root().index()], Position::root());
    }

    #[test]
    fn subterm_positions_embed_by_prefix() {
        let t = t_edge();
        let u = Position::from_steps(&[1, 1]);
        let sub_id = t.node_at(&u).unwrap();
        let sub = t.subterm(sub_id);
        let offset = t.subterm_range(sub_id).start;
        for w in sub.post_order() {
            let in_sub = sub.position(w);
            let in_t = t.position(NodeId::new(w.index() + offset));
            assert_eq!(u.concat(&in_sub), in_t);
        }
    }

    #[test]
    fn sexpr_forms() {
        assert_eq!(Term::empty().to_sexpr(), "(empty)");
        let ann = Annotation::from_bools(&[false, true]);
        assert_eq!(Term::leaf_annotated(v(3), ann).to_sexpr(), "(leaf 3 01)");
        assert_eq!(
            Term::add(v(1), e(1), Term::oplus(Term::leaf(v(1)), Term::leaf(e(1))))
                .unwrap()
                .to_sexpr(),
            "(add 1 -1 (oplus (leaf 1) (leaf -1)))"
        );
    }

    #[test]
    fn sort_rules_enforced() {
        assert!(matches!(
            Term::add(v(1), v(2), Term::leaf(v(1))),
            Err(TermError::AddWithinSort { .. })
        ));
        assert!(matches!(
            Term::relab(v(1), e(1), Term::leaf(v(1))),
            Err(TermError::RelabAcrossSorts { .. })
        ));
        assert!(matches!(Term::relab(e(1), e(1), Term::empty()), Err(TermError::RelabIdentity(_))));
    }

    #[test]
    fn builder_matches_constructors() {
        let mut b = TermBuilder::new();
        b.leaf(v(1));
        b.leaf(e(1));
        b.oplus();
        b.add(v(1), e(1)).unwrap();
        let built = b.finish();
        let direct = Term::add(v(1), e(1), Term::oplus(Term::leaf(v(1)), Term::leaf(e(1)))).unwrap();
        assert_eq!(built, direct);
    }

    #[test]
    fn deep_terms_do_not_recurse() {
        let mut b = TermBuilder::new();
        b.leaf(v(1));
        for i in 0..200_000u32 {
            b.leaf(e(1 + i % 3));
            b.oplus();
        }
        let t = b.finish();
        assert_eq!(t.depth(), 200_001);
        let s = t.to_sexpr();
        assert_eq!(parse_term(&s).unwrap(), t);
    }

    #[test]
    fn annotation_bits() {
        let a = Annotation::from_bools(&[true, false, true]);
        assert_eq!(a.to_string(), "101");
        assert_eq!(a.pop().to_string(), "10");
        assert_eq!(a.push(false).to_string(), "1010");
        assert!(a.get(2) && !a.get(1) && !a.get(7));
    }

    #[test]
    fn widths_detect_mismatch() {
        let t = parse_term("(oplus (leaf 1 10) (leaf -1))").unwrap();
        assert_eq!(t.widths().unwrap(), (Some(2), Some(0)));
        assert!(t.check_widths(2, 0).is_ok());
        assert!(t.check_widths(1, 0).is_err());
    }
}
