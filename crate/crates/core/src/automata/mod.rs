//! The concrete property automata.
//!
//! Every automaton is total: on terms that are not correct or not
//! irredundant it still returns some state, but its answer is only
//! meaningful on correct irredundant terms (see [`registry`] for the guarded
//! variants).

mod count;
mod ct;
mod edg;
mod ham;
mod inc;
mod irr;
mod link_aa;
mod link_ae;
mod link_ea;
mod link_ee;
pub mod registry;

use std::collections::BTreeSet;

use crate::label::Label;
use crate::term::Symbol;

pub use count::{declared_state_count, subsets, CountError, COUNT_BUDGET};
pub use ct::{Ct, CtState, CtTuple};
pub use edg::{Edg, EdgState, EdgTuple};
pub use ham::{DirHam, HamCore, HamState, HamTuple};
pub use inc::{Inc, IncDirection, IncState};
pub use irr::{Irr, IrrState};
pub use link_aa::{LinkAA, LinkAAState};
pub use link_ae::{LinkAE, LinkAEState};
pub use link_ea::{LinkEA, LinkEAState};
pub use link_ee::{LinkEE, LinkEEState};

pub type LabelSet = BTreeSet<Label>;

/// `s[from -> to]`.
pub(crate) fn rename(s: &LabelSet, from: Label, to: Label) -> LabelSet {
    if !s.contains(&from) {
        return s.clone();
    }
    let mut out = s.clone();
    out.remove(&from);
    out.insert(to);
    out
}

pub(crate) fn rename_label(x: Label, from: Label, to: Label) -> Label {
    if x == from {
        to
    } else {
        x
    }
}

pub(crate) fn single(l: Label) -> LabelSet {
    std::iter::once(l).collect()
}

pub(crate) fn union(a: &LabelSet, b: &LabelSet) -> LabelSet {
    a.union(b).copied().collect()
}

pub(crate) fn disjoint(sets: &[&LabelSet]) -> bool {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if !a.is_disjoint(b) {
                return false;
            }
        }
    }
    true
}

/// Membership bits `(in X, in Y)` of a vertex leaf over widths (2, 0).
pub(crate) fn xy_bits(sym: &Symbol) -> (bool, bool) {
    match sym {
        Symbol::Leaf { ann, .. } => (ann.get(0), ann.get(1)),
        _ => (false, false),
    }
}

pub(crate) fn tag(out: &mut Vec<u8>, t: u8) {
    out.push(t);
}
