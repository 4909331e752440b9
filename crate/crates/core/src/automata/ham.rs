//! Directed Hamiltonicity.
//!
//! [`HamCore`] accepts the incidence graphs that are a single directed cycle
//! (or empty). [`DirHam`] may additionally guess, at each D-leaf, that the
//! edge is not used; its determinization decides whether some set of edges
//! forms a cycle through all vertices.
//!
//! On `Ok` every `add` is mapped to `Ok`. That is exact on correct
//! irredundant terms: once the cycle is closed no other vertex can join it
//! (`⊕` with anything nonempty gives `Error`), every D-vertex of the cycle
//! already has in- and outdegree 1, so any `add` creating an edge would
//! break correctness, and one creating none is either a no-op or redundant.

use std::collections::BTreeSet;

use super::{rename, rename_label, single, tag, LabelSet};
use crate::fa::{FlyAutomaton, Signature, Sink, StateValue};
use crate::label::Label;
use crate::term::Symbol;

#[derive(Clone, Copy, Debug, Default)]
pub struct HamCore;

#[derive(Clone, Copy, Debug, Default)]
pub struct DirHam;

/// `alpha`: labels of isolated vertices, `beta`: labels of C-vertices inside
/// a path, `psi`: `(first, last)` labels of each path.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HamTuple {
    pub alpha: LabelSet,
    pub beta: LabelSet,
    pub psi: BTreeSet<(Label, Label)>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HamState {
    Ok,
    Error,
    Tuple(HamTuple),
}

impl HamTuple {
    fn starts(&self) -> LabelSet {
        self.psi.iter().map(|p| p.0).collect()
    }

    fn ends(&self) -> LabelSet {
        self.psi.iter().map(|p| p.1).collect()
    }

    fn is_empty(&self) -> bool {
        self.alpha.is_empty() && self.beta.is_empty() && self.psi.is_empty()
    }

    fn mentions(&self, x: Label) -> bool {
        self.alpha.contains(&x) || self.beta.contains(&x) || self.psi.iter().any(|p| p.0 == x || p.1 == x)
    }

    /// α, β, the path starts and the path ends are pairwise disjoint, and no
    /// two paths share an endpoint label.
    pub fn is_valid(&self) -> bool {
        let (s, e) = (self.starts(), self.ends());
        s.len() == self.psi.len()
            && e.len() == self.psi.len()
            && super::disjoint(&[&self.alpha, &self.beta, &s, &e])
            && self.beta.iter().all(|b| b.is_vertex())
    }

    fn checked(self) -> HamState {
        if self.is_valid() {
            HamState::Tuple(self)
        } else {
            HamState::Error
        }
    }

    fn mark_inner(&mut self, x: Label) {
        if x.is_vertex() {
            self.beta.insert(x);
        }
    }

    fn add(&self, a: Label, b: Label) -> HamState {
        if !self.mentions(a) || !self.mentions(b) {
            return HamState::Tuple(self.clone());
        }
        if self.alpha.is_empty() && self.psi.len() == 1 && self.psi.contains(&(b, a)) {
            return HamState::Ok;
        }
        let ending_at_a = self.psi.iter().find(|p| p.1 == a).copied();
        let starting_at_b = self.psi.iter().find(|p| p.0 == b).copied();
        let mut q = self.clone();
        match (self.alpha.contains(&a), self.alpha.contains(&b), ending_at_a, starting_at_b) {
            (true, true, _, _) => {
                q.alpha.remove(&a);
                q.alpha.remove(&b);
                q.psi.insert((a, b));
            }
            (true, false, _, Some((_, c))) => {
                q.alpha.remove(&a);
                q.mark_inner(b);
                q.psi.remove(&(b, c));
                q.psi.insert((a, c));
            }
            (false, true, Some((d, _)), _) => {
                q.alpha.remove(&b);
                q.mark_inner(a);
                q.psi.remove(&(d, a));
                q.psi.insert((d, b));
            }
            (false, false, Some((d, _)), Some((_, c))) if (d, a) != (b, c) => {
                q.mark_inner(a);
                q.mark_inner(b);
                q.psi.remove(&(d, a));
                q.psi.remove(&(b, c));
                q.psi.insert((d, c));
            }
            _ => return HamState::Error,
        }
        q.checked()
    }

    fn relab(&self, a: Label, b: Label) -> HamState {
        if self.alpha.contains(&a) && self.alpha.contains(&b) {
            return HamState::Error;
        }
        HamTuple {
            alpha: rename(&self.alpha, a, b),
            beta: rename(&self.beta, a, b),
            psi: self
                .psi
                .iter()
                .map(|&(x, y)| (rename_label(x, a, b), rename_label(y, a, b)))
                .collect(),
        }
        .checked()
    }

    fn oplus(&self, o: &HamTuple) -> HamState {
        if !self.alpha.is_disjoint(&o.alpha) || !self.psi.is_disjoint(&o.psi) {
            return HamState::Error;
        }
        HamTuple {
            alpha: &self.alpha | &o.alpha,
            beta: &self.beta | &o.beta,
            psi: self.psi.union(&o.psi).copied().collect(),
        }
        .checked()
    }
}

impl HamState {
    pub fn is_valid(&self) -> bool {
        match self {
            HamState::Tuple(q) => q.is_valid(),
            _ => true,
        }
    }
}

impl StateValue for HamState {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            HamState::Ok => tag(out, 0),
            HamState::Error => tag(out, 1),
            HamState::Tuple(q) => {
                tag(out, 2);
                q.alpha.encode(out);
                q.beta.encode(out);
                q.psi.encode(out);
            }
        }
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        if let HamState::Tuple(q) = self {
            out.extend(&q.alpha);
            out.extend(&q.beta);
            q.psi.collect_labels(out);
        }
    }
}

fn core_step(sym: &Symbol, children: &[&HamState]) -> HamState {
    use HamState::*;
    match (*sym, children) {
        (Symbol::Empty, _) => Tuple(HamTuple::default()),
        (Symbol::Leaf { label, .. }, _) => Tuple(HamTuple { alpha: single(label), ..Default::default() }),
        (_, [Error, ..]) | (_, [_, Error]) => Error,
        (Symbol::Oplus, [Ok, Ok]) => Error,
        (Symbol::Oplus, [Ok, Tuple(q)]) | (Symbol::Oplus, [Tuple(q), Ok]) => {
            if q.is_empty() {
                Ok
            } else {
                Error
            }
        }
        (Symbol::Oplus, [Tuple(l), Tuple(r)]) => l.oplus(r),
        (Symbol::Relab { .. } | Symbol::Add { .. }, [Ok]) => Ok,
        (Symbol::Relab { from, to }, [Tuple(q)]) => q.relab(from, to),
        (Symbol::Add { from, to }, [Tuple(q)]) => q.add(from, to),
        _ => unreachable!("arity mismatch"),
    }
}

fn accepting(q: &HamState) -> bool {
    match q {
        HamState::Ok => true,
        HamState::Error => false,
        HamState::Tuple(q) => q.is_empty(),
    }
}

impl FlyAutomaton for HamCore {
    type State = HamState;

    fn signature(&self) -> Signature {
        Signature::new(0, 0)
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn transitions(&self, sym: &Symbol, children: &[&HamState], out: &mut Vec<HamState>) {
        out.push(core_step(sym, children));
    }

    fn is_accepting(&self, q: &HamState) -> bool {
        accepting(q)
    }

    fn sink(&self, q: &HamState) -> Option<Sink> {
        matches!(q, HamState::Error).then_some(Sink::Error)
    }
}

impl FlyAutomaton for DirHam {
    type State = HamState;

    fn signature(&self) -> Signature {
        Signature::new(0, 0)
    }

    fn is_deterministic(&self) -> bool {
        false
    }

    fn transitions(&self, sym: &Symbol, children: &[&HamState], out: &mut Vec<HamState>) {
        out.push(core_step(sym, children));
        if matches!(sym, Symbol::Leaf { label, .. } if label.is_edge()) {
            out.push(HamState::Tuple(HamTuple::default()));
        }
    }

    fn is_accepting(&self, q: &HamState) -> bool {
        accepting(q)
    }

    fn sink(&self, q: &HamState) -> Option<Sink> {
        matches!(q, HamState::Error).then_some(Sink::Error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fa::{determinize, run_deterministic, RunOptions};
    use crate::term::parse_term;

    fn core(src: &str) -> HamState {
        let t = parse_term(src).unwrap();
        run_deterministic(&HamCore, &t, &RunOptions::traced()).unwrap().root
    }

    fn dirham(src: &str) -> bool {
        let t = parse_term(src).unwrap();
        run_deterministic(&determinize(DirHam), &t, &RunOptions::default()).unwrap().accepted
    }

    const TWO_CYCLE: &str = "(add -2 1 (add 2 -2 (add -1 2 (add 1 -1 \
        (oplus (oplus (leaf 1) (leaf 2)) (oplus (leaf -1) (leaf -2)))))))";

    #[test]
    fn empty_graph_accepted() {
        assert_eq!(core("(empty)"), HamState::Tuple(HamTuple::default()));
    }

    #[test]
    fn two_cycle_closes() {
        assert_eq!(core(TWO_CYCLE), HamState::Ok);
        assert_eq!(core(&format!("(oplus {TWO_CYCLE} (empty))")), HamState::Ok);
        assert_eq!(core(&format!("(oplus {TWO_CYCLE} {TWO_CYCLE})")), HamState::Error);
    }

    #[test]
    fn path_is_not_a_cycle() {
        let path = "(add -1 2 (add 1 -1 (oplus (oplus (leaf 1) (leaf 2)) (leaf -1))))";
        let q = core(path);
        let l = |v| Label::new(v).unwrap();
        assert_eq!(
            q,
            HamState::Tuple(HamTuple {
                alpha: LabelSet::new(),
                beta: LabelSet::new(),
                psi: [(l(1), l(2))].into_iter().collect()
            })
        );
        assert!(!dirham(path));
    }

    #[test]
    fn chord_is_dropped_by_guess() {
        // 2-cycle plus a second parallel edge 1 -> 2 labelled -3
        let src = "(add -2 1 (add 2 -2 (add -1 2 (add 1 -1 (add -3 2 (add 1 -3 \
            (oplus (oplus (leaf 1) (leaf 2)) (oplus (oplus (leaf -1) (leaf -2)) (leaf -3)))))))))";
        assert_eq!(core(src), HamState::Error);
        assert!(dirham(src));
    }
}
