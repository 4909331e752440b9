use std::collections::BTreeSet;

use super::{rename, tag, union, xy_bits, LabelSet};
use crate::fa::{FlyAutomaton, Signature, Sink, StateValue};
use crate::label::Label;
use crate::term::Symbol;

/// `edg(X, Y)`: `X = {x}`, `Y = {y}` and `x → y` in the graph whose
/// incidence graph is the value of the (correct, irredundant) term.
///
/// Vertex leaves carry two bits, membership in `X` then in `Y`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Edg;

/// `g1 = π(X')`, `g2 = π(Y')`, `d`: labels of D-vertices,
/// `d1 = π(Out(X'))`, `d2 = π(In(Y'))`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgTuple {
    pub g1: LabelSet,
    pub g2: LabelSet,
    pub d: LabelSet,
    pub d1: LabelSet,
    pub d2: LabelSet,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgState {
    /// The edge has been found. Not a sink: a later `⊕` may add a second
    /// member to `X` or `Y`.
    Ok,
    Error,
    Tuple(EdgTuple),
}

impl EdgTuple {
    pub(crate) fn leaf(sym: &Symbol) -> EdgTuple {
        let Symbol::Leaf { label, .. } = *sym else { return EdgTuple::default() };
        let mut q = EdgTuple::default();
        if label.is_edge() {
            q.d.insert(label);
        } else {
            let (x, y) = xy_bits(sym);
            if x {
                q.g1.insert(label);
            }
            if y {
                q.g2.insert(label);
            }
        }
        q
    }

    pub(crate) fn mirrored(&self) -> EdgTuple {
        EdgTuple {
            g1: self.g2.clone(),
            g2: self.g1.clone(),
            d: self.d.clone(),
            d1: self.d2.clone(),
            d2: self.d1.clone(),
        }
    }

    pub(crate) fn union(&self, o: &EdgTuple) -> EdgTuple {
        EdgTuple {
            g1: union(&self.g1, &o.g1),
            g2: union(&self.g2, &o.g2),
            d: union(&self.d, &o.d),
            d1: union(&self.d1, &o.d1),
            d2: union(&self.d2, &o.d2),
        }
    }

    pub(crate) fn renamed(&self, a: Label, b: Label) -> EdgTuple {
        EdgTuple {
            g1: rename(&self.g1, a, b),
            g2: rename(&self.g2, a, b),
            d: rename(&self.d, a, b),
            d1: rename(&self.d1, a, b),
            d2: rename(&self.d2, a, b),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.d1.is_subset(&self.d) && self.d2.is_subset(&self.d)
    }

    pub(crate) fn encode(&self, out: &mut Vec<u8>) {
        for s in [&self.g1, &self.g2, &self.d, &self.d1, &self.d2] {
            s.encode(out);
        }
    }

    pub(crate) fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        for s in [&self.g1, &self.g2, &self.d, &self.d1, &self.d2] {
            out.extend(s);
        }
    }
}

impl EdgState {
    pub fn is_valid(&self) -> bool {
        match self {
            EdgState::Tuple(q) => q.is_valid() && q.g1.len() <= 1 && q.g2.len() <= 1,
            _ => true,
        }
    }
}

impl StateValue for EdgState {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            EdgState::Ok => tag(out, 0),
            EdgState::Error => tag(out, 1),
            EdgState::Tuple(q) => {
                tag(out, 2);
                q.encode(out);
            }
        }
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        if let EdgState::Tuple(q) = self {
            q.collect_labels(out);
        }
    }
}

/// `add_{a,d}`; the `add_{d,b}` case is obtained by mirroring.
fn add_out(q: &EdgTuple, a: Label, d: Label) -> EdgState {
    if !q.g1.contains(&a) || !q.d.contains(&d) {
        return EdgState::Tuple(q.clone());
    }
    if q.d2.contains(&d) {
        return EdgState::Ok;
    }
    let mut r = q.clone();
    r.d1.insert(d);
    EdgState::Tuple(r)
}

impl FlyAutomaton for Edg {
    type State = EdgState;

    fn signature(&self) -> Signature {
        Signature::new(2, 0)
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn transitions(&self, sym: &Symbol, children: &[&EdgState], out: &mut Vec<EdgState>) {
        use EdgState::*;
        let q = match (*sym, children) {
            (Symbol::Empty | Symbol::Leaf { .. }, _) => Tuple(EdgTuple::leaf(sym)),
            (_, [Error, ..]) | (_, [_, Error]) => Error,
            (Symbol::Oplus, [Ok, Ok]) => Error,
            (Symbol::Oplus, [Ok, Tuple(q)]) | (Symbol::Oplus, [Tuple(q), Ok]) => {
                if q.g1.is_empty() && q.g2.is_empty() {
                    Ok
                } else {
                    Error
                }
            }
            (Symbol::Oplus, [Tuple(l), Tuple(r)]) => {
                if l.g1.len() + r.g1.len() >= 2 || l.g2.len() + r.g2.len() >= 2 {
                    Error
                } else {
                    Tuple(l.union(r))
                }
            }
            (Symbol::Relab { .. } | Symbol::Add { .. }, [Ok]) => Ok,
            (Symbol::Relab { from, to }, [Tuple(q)]) => Tuple(q.renamed(from, to)),
            (Symbol::Add { from, to }, [Tuple(q)]) => {
                if from.is_vertex() {
                    add_out(q, from, to)
                } else {
                    match add_out(&q.mirrored(), to, from) {
                        Tuple(r) => Tuple(r.mirrored()),
                        other => other,
                    }
                }
            }
            _ => unreachable!("arity mismatch"),
        };
        out.push(q);
    }

    fn is_accepting(&self, q: &EdgState) -> bool {
        matches!(q, EdgState::Ok)
    }

    fn sink(&self, q: &EdgState) -> Option<Sink> {
        matches!(q, EdgState::Error).then_some(Sink::Error)
    }
}
