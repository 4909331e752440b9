//! Fly-automata: automata whose states are values and whose transition
//! function is computed on demand.

mod combinators;
mod dynamic;
mod maps;
mod run;

use std::collections::BTreeSet;
use std::fmt::Debug;
use std::hash::Hash;

use crate::label::Label;
use crate::term::{Symbol, Term};

pub use combinators::{
    complement, determinize, exists_project, image, inverse_image, product, relativize,
    restrict_signature, AcceptMode, Complement, Determinize, Image, InverseImage, PairState,
    Product, Restricted, StateSet,
};
pub use dynamic::{erase, DynAutomaton, Verdict, VisitedState};
pub use maps::{DropLastBit, Identity, Relabelling, Relativize, RelativizeScope, SelectBits, SymbolMap};
pub use run::{run_deterministic, run_star, DetRun, RunOptions, RunStats, StarRun};

/// A state value. Encodings must be canonical: equal states encode to equal
/// bytes, and labels always take 4 bytes so that renaming labels never
/// changes encoded sizes.
pub trait StateValue: Clone + Eq + Ord + Hash + Debug + Send + Sync {
    fn encode(&self, out: &mut Vec<u8>);

    /// Adds every label mentioned by the state to `out`.
    fn collect_labels(&self, out: &mut BTreeSet<Label>);

    fn encoded_len(&self) -> usize {
        let mut v = Vec::new();
        self.encode(&mut v);
        v.len()
    }

    fn encoded(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.encode(&mut v);
        v
    }
}

/// Classification of states that decide the run outcome on their own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sink {
    /// Every run through this state rejects.
    Error,
    /// Every run through this state accepts.
    Success,
}

/// Annotation widths and admissible labels of an automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub vertex_width: usize,
    pub edge_width: usize,
    /// `None` means every label is admissible.
    pub labels: Option<BTreeSet<Label>>,
}

impl Signature {
    pub fn new(vertex_width: usize, edge_width: usize) -> Self {
        Signature { vertex_width, edge_width, labels: None }
    }

    pub fn widths(&self) -> (usize, usize) {
        (self.vertex_width, self.edge_width)
    }

    /// Checks that `t` is a term over this signature.
    pub fn admits(&self, t: &Term) -> Result<(), RunError> {
        t.check_widths(self.vertex_width, self.edge_width).map_err(|e| {
            RunError::SignatureMismatch(format!(
                "{e} (automaton expects widths ({}, {}))",
                self.vertex_width, self.edge_width
            ))
        })?;
        if let Some(allowed) = &self.labels {
            if let Some(l) = t.labels().into_iter().find(|l| !allowed.contains(l)) {
                return Err(RunError::SignatureMismatch(format!(
                    "label {l} is outside the automaton's label set"
                )));
            }
        }
        Ok(())
    }

    pub fn admits_symbol(&self, s: &Symbol) -> bool {
        let widths_ok = match s {
            Symbol::Leaf { label, ann } => {
                ann.len() == if label.is_vertex() { self.vertex_width } else { self.edge_width }
            }
            _ => true,
        };
        widths_ok && self.labels.as_ref().is_none_or(|ls| s.labels().all(|l| ls.contains(&l)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("deterministic automaton produced {count} states at node {node}")]
    NotDeterministic { node: usize, count: usize },
    #[error("{0} requires a deterministic automaton")]
    NeedsDeterministic(&'static str),
    #[error("{0}")]
    Invalid(String),
}

/// A fly-automaton over the annotated two-sorted signature.
pub trait FlyAutomaton: Send + Sync {
    type State: StateValue;

    fn signature(&self) -> Signature;

    /// True if every transition yields exactly one state.
    fn is_deterministic(&self) -> bool;

    /// Appends to `out` the states `q` with `sym[children] -> q`.
    fn transitions(&self, sym: &Symbol, children: &[&Self::State], out: &mut Vec<Self::State>);

    fn is_accepting(&self, q: &Self::State) -> bool;

    fn sink(&self, _q: &Self::State) -> Option<Sink> {
        None
    }

    /// The unique successor, for deterministic automata.
    fn step(&self, sym: &Symbol, children: &[&Self::State]) -> Self::State {
        let mut out = Vec::with_capacity(1);
        self.transitions(sym, children, &mut out);
        assert_eq!(out.len(), 1, "step called on a nondeterministic transition");
        out.pop().unwrap()
    }
}

impl<A: FlyAutomaton + ?Sized> FlyAutomaton for &A {
    type State = A::State;

    fn signature(&self) -> Signature {
        (**self).signature()
    }
    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }
    fn transitions(&self, sym: &Symbol, children: &[&Self::State], out: &mut Vec<Self::State>) {
        (**self).transitions(sym, children, out)
    }
    fn is_accepting(&self, q: &Self::State) -> bool {
        (**self).is_accepting(q)
    }
    fn sink(&self, q: &Self::State) -> Option<Sink> {
        (**self).sink(q)
    }
}

impl<A: FlyAutomaton + ?Sized> FlyAutomaton for std::sync::Arc<A> {
    type State = A::State;

    fn signature(&self) -> Signature {
        (**self).signature()
    }
    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }
    fn transitions(&self, sym: &Symbol, children: &[&Self::State], out: &mut Vec<Self::State>) {
        (**self).transitions(sym, children, out)
    }
    fn is_accepting(&self, q: &Self::State) -> bool {
        (**self).is_accepting(q)
    }
    fn sink(&self, q: &Self::State) -> Option<Sink> {
        (**self).sink(q)
    }
}

// Canonical encodings of the building blocks states are made of.

pub(crate) fn encode_len(n: usize, out: &mut Vec<u8>) {
    out.extend_from_slice(&(n as u32).to_be_bytes());
}

impl StateValue for Label {
    fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.value().to_be_bytes());
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        out.insert(*self);
    }
}

impl<T: StateValue> StateValue for BTreeSet<T> {
    fn encode(&self, out: &mut Vec<u8>) {
        encode_len(self.len(), out);
        for x in self {
            x.encode(out);
        }
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        for x in self {
            x.collect_labels(out);
        }
    }
}

impl<T: StateValue> StateValue for Option<T> {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            None => out.push(0),
            Some(x) => {
                out.push(1);
                x.encode(out);
            }
        }
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        if let Some(x) = self {
            x.collect_labels(out);
        }
    }
}

macro_rules! tuple_state {
    ($($name:ident $idx:tt),+) => {
        impl<$($name: StateValue),+> StateValue for ($($name,)+) {
            fn encode(&self, out: &mut Vec<u8>) {
                $(self.$idx.encode(out);)+
            }
            fn collect_labels(&self, out: &mut BTreeSet<Label>) {
                $(self.$idx.collect_labels(out);)+
            }
        }
    };
}

tuple_state!(A 0, B 1);
tuple_state!(A 0, B 1, C 2);
tuple_state!(A 0, B 1, C 2, D 3);
