use std::collections::BTreeSet;

use super::edg::EdgTuple;
use super::tag;
use crate::fa::{FlyAutomaton, Signature, Sink, StateValue};
use crate::label::Label;
use crate::term::Symbol;

/// `∃x ∈ X ∃y ∈ Y. x → y`. Same state components as `edg`, without the
/// singleton restriction, and with an accepting sink.
#[derive(Clone, Copy, Debug, Default)]
pub struct LinkEE;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkEEState {
    Success,
    Tuple(EdgTuple),
}

impl LinkEEState {
    pub fn is_valid(&self) -> bool {
        match self {
            LinkEEState::Success => true,
            LinkEEState::Tuple(q) => q.is_valid(),
        }
    }
}

impl StateValue for LinkEEState {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            LinkEEState::Success => tag(out, 0),
            LinkEEState::Tuple(q) => {
                tag(out, 1);
                q.encode(out);
            }
        }
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        if let LinkEEState::Tuple(q) = self {
            q.collect_labels(out);
        }
    }
}

fn add_out(q: &EdgTuple, a: Label, d: Label) -> LinkEEState {
    if !q.g1.contains(&a) || !q.d.contains(&d) {
        return LinkEEState::Tuple(q.clone());
    }
    if q.d2.contains(&d) {
        return LinkEEState::Success;
    }
    let mut r = q.clone();
    r.d1.insert(d);
    LinkEEState::Tuple(r)
}

impl FlyAutomaton for LinkEE {
    type State = LinkEEState;

    fn signature(&self) -> Signature {
        Signature::new(2, 0)
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn transitions(&self, sym: &Symbol, children: &[&LinkEEState], out: &mut Vec<LinkEEState>) {
        use LinkEEState::*;
        let q = match (*sym, children) {
            (Symbol::Empty | Symbol::Leaf { .. }, _) => Tuple(EdgTuple::leaf(sym)),
            (_, [Success, ..]) | (_, [_, Success]) => Success,
            (Symbol::Oplus, [Tuple(l), Tuple(r)]) => Tuple(l.union(r)),
            (Symbol::Relab { from, to }, [Tuple(q)]) => Tuple(q.renamed(from, to)),
            (Symbol::Add { from, to }, [Tuple(q)]) => {
                if from.is_vertex() {
                    add_out(q, from, to)
                } else {
                    match add_out(&q.mirrored(), to, from) {
                        Tuple(r) => Tuple(r.mirrored()),
                        Success => Success,
                    }
                }
            }
            _ => unreachable!("arity mismatch"),
        };
        out.push(q);
    }

    fn is_accepting(&self, q: &LinkEEState) -> bool {
        matches!(q, LinkEEState::Success)
    }

    fn sink(&self, q: &LinkEEState) -> Option<Sink> {
        matches!(q, LinkEEState::Success).then_some(Sink::Success)
    }
}
