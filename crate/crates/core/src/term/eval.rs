use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::{NodeId, Symbol, Term};
use crate::label::Label;

/// Vertices of `val(t)` are the leaves of `t`, named by their node id.
pub type VertexId = NodeId;

/// The labeled bipartite structure denoted by a term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BipartiteStruct {
    vertices: BTreeMap<VertexId, Label>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl BipartiteStruct {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, Label)> + '_ {
        self.vertices.iter().map(|(&v, &l)| (v, l))
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, x: VertexId, y: VertexId) -> bool {
        self.edges.contains(&(x, y))
    }

    pub fn label(&self, v: VertexId) -> Option<Label> {
        self.vertices.get(&v).copied()
    }

    /// True for v-vertices (C-labeled), false for e-vertices.
    pub fn is_v(&self, v: VertexId) -> bool {
        self.label(v).is_some_and(|l| l.is_vertex())
    }

    /// `(indegree, outdegree)` of every vertex.
    pub fn degrees(&self) -> HashMap<VertexId, (usize, usize)> {
        let mut deg: HashMap<VertexId, (usize, usize)> =
            self.vertices.keys().map(|&v| (v, (0, 0))).collect();
        for &(x, y) in &self.edges {
            deg.get_mut(&x).expect("edge tail is a vertex").1 += 1;
            deg.get_mut(&y).expect("edge head is a vertex").0 += 1;
        }
        deg
    }

    /// Renames every vertex id by adding `offset`; used to place the value
    /// of a subterm inside the value of the whole term.
    pub fn shifted(&self, offset: usize) -> BipartiteStruct {
        let sh = |v: VertexId| NodeId::new(v.index() + offset);
        BipartiteStruct {
            vertices: self.vertices.iter().map(|(&v, &l)| (sh(v), l)).collect(),
            edges: self.edges.iter().map(|&(x, y)| (sh(x), sh(y))).collect(),
        }
    }

    /// Same vertices and edges, ignoring labels.
    pub fn same_graph(&self, other: &BipartiteStruct) -> bool {
        self.edges == other.edges && self.vertices.keys().eq(other.vertices.keys())
    }

    pub(crate) fn from_parts(
        vertices: BTreeMap<VertexId, Label>,
        edges: BTreeSet<(VertexId, VertexId)>,
    ) -> Self {
        BipartiteStruct { vertices, edges }
    }
}

/// Result of an evaluation that also watches for redundant edge additions.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: BipartiteStruct,
    /// `add` nodes that tried to create at least one edge already present.
    pub redundant_adds: Vec<NodeId>,
}

/// Computes `val(t)`.
pub fn evaluate(t: &Term) -> BipartiteStruct {
    evaluate_tracking(t).value
}

/// Computes `val(t)` and records every `add` that attempted to recreate an
/// existing edge.
pub fn evaluate_tracking(t: &Term) -> Evaluation {
    let mut frames: Vec<HashMap<Label, Vec<VertexId>>> = Vec::new();
    let mut edges: HashSet<(VertexId, VertexId)> = HashSet::new();
    let mut redundant_adds = Vec::new();
    let mut final_labels: BTreeMap<VertexId, Label> = BTreeMap::new();

    for id in t.post_order() {
        match *t.symbol(id) {
            Symbol::Empty => frames.push(HashMap::new()),
            Symbol::Leaf { label, .. } => {
                let mut m = HashMap::new();
                m.insert(label, vec![id]);
                frames.push(m);
            }
            Symbol::Oplus => {
                let r = frames.pop().expect("oplus operand");
                let l = frames.pop().expect("oplus operand");
                let (mut big, small) = if l.len() >= r.len() { (l, r) } else { (r, l) };
                for (label, mut vs) in small {
                    let slot = big.entry(label).or_default();
                    if slot.len() < vs.len() {
                        std::mem::swap(slot, &mut vs);
                    }
                    slot.extend(vs);
                }
                frames.push(big);
            }
            Symbol::Relab { from, to } => {
                let top = frames.last_mut().expect("relab operand");
                if let Some(mut moved) = top.remove(&from) {
                    let slot = top.entry(to).or_default();
                    if slot.len() < moved.len() {
                        std::mem::swap(slot, &mut moved);
                    }
                    slot.extend(moved);
                }
            }
            Symbol::Add { from, to } => {
                let top = frames.last().expect("add operand");
                let (Some(xs), Some(ys)) = (top.get(&from), top.get(&to)) else {
                    continue;
                };
                let mut redundant = false;
                for &x in xs {
                    for &y in ys {
                        if !edges.insert((x, y)) {
                            redundant = true;
                        }
                    }
                }
                if redundant {
                    redundant_adds.push(id);
                }
            }
        }
    }
    if let Some(top) = frames.pop() {
        for (label, vs) in top {
            for v in vs {
                final_labels.insert(v, label);
            }
        }
    }
    Evaluation {
        value: BipartiteStruct::from_parts(final_labels, edges.into_iter().collect()),
        redundant_adds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    #[test]
    fn empty_term_has_empty_value() {
        let s = evaluate(&Term::empty());
        assert_eq!(s.num_vertices(), 0);
        assert_eq!(s.num_edges(), 0);
    }

    #[test]
    fn single_add() {
        let t = parse_term("(add 1 -1 (oplus (leaf 1) (leaf -1)))").unwrap();
        let s = evaluate(&t);
        assert_eq!(s.num_vertices(), 2);
        let edges: Vec<_> = s.edges().collect();
        assert_eq!(edges, vec![(NodeId::new(0), NodeId::new(1))]);
        assert!(s.is_v(NodeId::new(0)) && !s.is_v(NodeId::new(1)));
    }

    #[test]
    fn t_edge_is_incidence_of_one_edge() {
        let t =
            parse_term("(add -1 2 (add 1 -1 (oplus (oplus (leaf 1) (leaf 2)) (leaf -1))))").unwrap();
        let s = evaluate(&t);
        let (x, y, e) = (NodeId::new(0), NodeId::new(1), NodeId::new(3));
        assert_eq!(s.num_vertices(), 3);
        assert_eq!(s.edges().collect::<Vec<_>>(), vec![(x, e), (e, y)]);
    }

    #[test]
    fn relab_merges_classes() {
        let t = parse_term("(add 2 -1 (relab 1 2 (oplus (oplus (leaf 1) (leaf 2)) (leaf -1))))")
            .unwrap();
        let s = evaluate(&t);
        assert_eq!(s.num_edges(), 2);
        assert!(s.vertices().all(|(_, l)| l.value() == 2 || l.value() == -1));
    }

    #[test]
    fn tracking_flags_repeated_add() {
        let t = parse_term("(add 1 -1 (add 1 -1 (oplus (leaf 1) (leaf -1))))").unwrap();
        let ev = evaluate_tracking(&t);
        assert_eq!(ev.redundant_adds, vec![t.root()]);
        assert_eq!(ev.value.num_edges(), 1);
    }

    #[test]
    fn add_over_empty_is_noop() {
        let t = parse_term("(add 1 -1 (relab 1 3 (empty)))").unwrap();
        let ev = evaluate_tracking(&t);
        assert_eq!(ev.value, BipartiteStruct::default());
        assert!(ev.redundant_adds.is_empty());
    }
}
