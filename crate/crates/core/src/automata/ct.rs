use std::collections::BTreeSet;

use super::{disjoint, rename, single, tag, union, LabelSet};
use crate::fa::{FlyAutomaton, Signature, Sink, StateValue};
use crate::label::Label;
use crate::term::Symbol;

/// Correctness checker: accepts exactly the irredundant terms whose value is
/// an incidence graph, i.e. every D-vertex has in- and outdegree 1.
///
/// Leaf annotations are ignored, so the same automaton runs over any widths.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ct {
    pub widths: (usize, usize),
}

/// `γ1`: C-labels of exactly one vertex, `γ2`: of at least two.
/// `dij`: D-labels whose vertices all have indegree `i` and outdegree `j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CtTuple {
    pub g1: LabelSet,
    pub g2: LabelSet,
    pub d00: LabelSet,
    pub d01: LabelSet,
    pub d10: LabelSet,
    pub d11: LabelSet,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CtState {
    Error,
    Tuple(CtTuple),
}

impl CtTuple {
    fn gamma_has(&self, a: Label) -> bool {
        self.g1.contains(&a) || self.g2.contains(&a)
    }

    fn delta_has(&self, d: Label) -> bool {
        [&self.d00, &self.d01, &self.d10, &self.d11].iter().any(|s| s.contains(&d))
    }

    fn deltas_disjoint(&self) -> bool {
        disjoint(&[&self.d00, &self.d01, &self.d10, &self.d11])
    }

    pub fn is_valid(&self) -> bool {
        self.g1.is_disjoint(&self.g2) && self.deltas_disjoint()
    }

    /// Reversing every edge swaps in- and outdegrees.
    fn mirrored(&self) -> CtTuple {
        CtTuple { d01: self.d10.clone(), d10: self.d01.clone(), ..self.clone() }
    }

    fn add_to_d(&self, a: Label, d: Label) -> CtState {
        if !self.gamma_has(a) || !self.delta_has(d) {
            return CtState::Tuple(self.clone());
        }
        if self.g2.contains(&a) || self.d10.contains(&d) || self.d11.contains(&d) {
            return CtState::Error;
        }
        let mut q = self.clone();
        if q.d00.remove(&d) {
            q.d10.insert(d);
        } else if q.d01.remove(&d) {
            q.d11.insert(d);
        }
        CtState::Tuple(q)
    }
}

impl CtState {
    pub fn tuple(&self) -> Option<&CtTuple> {
        match self {
            CtState::Error => None,
            CtState::Tuple(t) => Some(t),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.tuple().is_none_or(CtTuple::is_valid)
    }
}

impl StateValue for CtState {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            CtState::Error => tag(out, 0),
            CtState::Tuple(q) => {
                tag(out, 1);
                for s in [&q.g1, &q.g2, &q.d00, &q.d01, &q.d10, &q.d11] {
                    s.encode(out);
                }
            }
        }
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        if let CtState::Tuple(q) = self {
            for s in [&q.g1, &q.g2, &q.d00, &q.d01, &q.d10, &q.d11] {
                out.extend(s);
            }
        }
    }
}

impl Ct {
    pub fn new() -> Self {
        Ct::default()
    }

    pub fn with_widths(p: usize, m: usize) -> Self {
        Ct { widths: (p, m) }
    }

    pub fn oplus(l: &CtTuple, r: &CtTuple) -> CtState {
        let gl = union(&l.g1, &l.g2);
        let gr = union(&r.g1, &r.g2);
        let mut g2 = union(&l.g2, &r.g2);
        g2.extend(l.g1.intersection(&r.g1));
        let mut g1: LabelSet = l.g1.difference(&gr).copied().collect();
        g1.extend(r.g1.difference(&gl));
        let q = CtTuple {
            g1,
            g2,
            d00: union(&l.d00, &r.d00),
            d01: union(&l.d01, &r.d01),
            d10: union(&l.d10, &r.d10),
            d11: union(&l.d11, &r.d11),
        };
        if q.deltas_disjoint() {
            CtState::Tuple(q)
        } else {
            CtState::Error
        }
    }

    fn relab(q: &CtTuple, a: Label, b: Label) -> CtState {
        if a.is_vertex() {
            if !q.gamma_has(a) {
                return CtState::Tuple(q.clone());
            }
            let mut r = q.clone();
            if q.gamma_has(b) {
                r.g1.remove(&a);
                r.g1.remove(&b);
                r.g2.remove(&a);
                r.g2.insert(b);
            } else {
                r.g1 = rename(&q.g1, a, b);
                r.g2 = rename(&q.g2, a, b);
            }
            CtState::Tuple(r)
        } else {
            let r = CtTuple {
                d00: rename(&q.d00, a, b),
                d01: rename(&q.d01, a, b),
                d10: rename(&q.d10, a, b),
                d11: rename(&q.d11, a, b),
                ..q.clone()
            };
            if r.deltas_disjoint() {
                CtState::Tuple(r)
            } else {
                CtState::Error
            }
        }
    }

    fn add(q: &CtTuple, from: Label, to: Label) -> CtState {
        if from.is_vertex() {
            q.add_to_d(from, to)
        } else {
            match q.mirrored().add_to_d(to, from) {
                CtState::Tuple(r) => CtState::Tuple(r.mirrored()),
                e => e,
            }
        }
    }
}

impl FlyAutomaton for Ct {
    type State = CtState;

    fn signature(&self) -> Signature {
        Signature::new(self.widths.0, self.widths.1)
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn transitions(&self, sym: &Symbol, children: &[&CtState], out: &mut Vec<CtState>) {
        let q = match (*sym, children) {
            (Symbol::Empty, _) => CtState::Tuple(CtTuple::default()),
            (Symbol::Leaf { label, .. }, _) if label.is_vertex() => {
                CtState::Tuple(CtTuple { g1: single(label), ..CtTuple::default() })
            }
            (Symbol::Leaf { label, .. }, _) => {
                CtState::Tuple(CtTuple { d00: single(label), ..CtTuple::default() })
            }
            (_, [CtState::Error, ..]) | (_, [_, CtState::Error]) => CtState::Error,
            (Symbol::Oplus, [CtState::Tuple(l), CtState::Tuple(r)]) => Ct::oplus(l, r),
            (Symbol::Relab { from, to }, [CtState::Tuple(q)]) => Ct::relab(q, from, to),
            (Symbol::Add { from, to }, [CtState::Tuple(q)]) => Ct::add(q, from, to),
            _ => unreachable!("arity mismatch"),
        };
        out.push(q);
    }

    fn is_accepting(&self, q: &CtState) -> bool {
        q.tuple().is_some_and(|q| q.d00.is_empty() && q.d01.is_empty() && q.d10.is_empty())
    }

    fn sink(&self, q: &CtState) -> Option<Sink> {
        matches!(q, CtState::Error).then_some(Sink::Error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fa::{run_deterministic, RunOptions};
    use crate::term::parse_term;

    fn run(src: &str) -> (CtState, bool) {
        let t = parse_term(src).unwrap();
        let r = run_deterministic(&Ct::new(), &t, &RunOptions::traced()).unwrap();
        (r.root, r.accepted)
    }

    fn l(v: i32) -> Label {
        Label::new(v).unwrap()
    }

    const T_EDGE: &str = "(add -1 2 (add 1 -1 (oplus (oplus (leaf 1) (leaf 2)) (leaf -1))))";

    #[test]
    fn single_vertex_accepted() {
        let (q, acc) = run("(leaf 1)");
        assert_eq!(q, CtState::Tuple(CtTuple { g1: single(l(1)), ..Default::default() }));
        assert!(acc);
    }

    #[test]
    fn lone_edge_vertex_rejected() {
        let (q, acc) = run("(leaf -1)");
        assert_eq!(q.tuple().unwrap().d00, single(l(-1)));
        assert!(!acc);
    }

    #[test]
    fn single_edge_accepted() {
        let (q, acc) = run(T_EDGE);
        assert!(acc);
        assert_eq!(q.tuple().unwrap().d11, single(l(-1)));
    }

    #[test]
    fn two_fresh_edge_vertices_share_a_class() {
        // both have degree (0, 0): the union keeps the classes disjoint
        let (q, acc) = run("(oplus (leaf -1) (leaf -1))");
        assert_eq!(q.tuple().unwrap().d00, single(l(-1)));
        assert!(!acc);
    }

    #[test]
    fn mixed_degree_classes_are_error() {
        let (q, _) = run("(oplus (add 1 -1 (oplus (leaf 1) (leaf -1))) (leaf -1))");
        assert_eq!(q, CtState::Error);
    }

    #[test]
    fn second_in_edge_is_error() {
        let (q, _) = run("(add 1 -1 (oplus (oplus (leaf 1) (leaf 1)) (leaf -1)))");
        assert_eq!(q, CtState::Error);
    }

    #[test]
    fn relab_merging_vertex_labels_counts_two() {
        let (q, _) = run("(relab 1 2 (oplus (leaf 1) (leaf 2)))");
        assert_eq!(q.tuple().unwrap().g2, single(l(2)));
        assert!(q.tuple().unwrap().g1.is_empty());
    }

    #[test]
    fn oplus_commutes_on_acceptance() {
        let a = run("(oplus (add 1 -1 (oplus (leaf 1) (leaf -1))) (leaf 1))");
        let b = run("(oplus (leaf 1) (add 1 -1 (oplus (leaf 1) (leaf -1))))");
        assert_eq!(a, b);
    }
}
