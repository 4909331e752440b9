use std::collections::BTreeSet;

use super::{rename_label, tag};
use crate::fa::{FlyAutomaton, Signature, Sink, StateValue};
use crate::label::Label;
use crate::term::Symbol;

/// Irredundancy checker.
///
/// A state is the set of label pairs `(π(x), π(y))` over the edges `x → y`
/// built so far, plus a diagonal pair `(a, a)` for each label that is
/// present. Edges always join different sorts, so diagonal pairs never clash
/// with edge pairs; they are needed to tell whether an `add` creates any
/// edge at all.
#[derive(Clone, Copy, Debug, Default)]
pub struct Irr {
    pub widths: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IrrState {
    Error,
    Pairs(BTreeSet<(Label, Label)>),
}

impl IrrState {
    /// Edge label pairs, without the presence markers.
    pub fn edge_pairs(&self) -> Option<BTreeSet<(Label, Label)>> {
        match self {
            IrrState::Error => None,
            IrrState::Pairs(s) => Some(s.iter().filter(|(a, b)| a != b).copied().collect()),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            IrrState::Error => true,
            IrrState::Pairs(s) => s.iter().all(|&(a, b)| {
                a == b
                    || (a.sort() != b.sort() && s.contains(&(a, a)) && s.contains(&(b, b)))
            }),
        }
    }
}

impl StateValue for IrrState {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            IrrState::Error => tag(out, 0),
            IrrState::Pairs(s) => {
                tag(out, 1);
                s.encode(out);
            }
        }
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        if let IrrState::Pairs(s) = self {
            s.collect_labels(out);
        }
    }
}

impl Irr {
    pub fn new() -> Self {
        Irr::default()
    }

    pub fn with_widths(p: usize, m: usize) -> Self {
        Irr { widths: (p, m) }
    }
}

impl FlyAutomaton for Irr {
    type State = IrrState;

    fn signature(&self) -> Signature {
        Signature::new(self.widths.0, self.widths.1)
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn transitions(&self, sym: &Symbol, children: &[&IrrState], out: &mut Vec<IrrState>) {
        let q = match (*sym, children) {
            (Symbol::Empty, _) => IrrState::Pairs(BTreeSet::new()),
            (Symbol::Leaf { label, .. }, _) => {
                IrrState::Pairs(std::iter::once((label, label)).collect())
            }
            (_, [IrrState::Error, ..]) | (_, [_, IrrState::Error]) => IrrState::Error,
            (Symbol::Oplus, [IrrState::Pairs(l), IrrState::Pairs(r)]) => {
                IrrState::Pairs(l.union(r).copied().collect())
            }
            (Symbol::Relab { from, to }, [IrrState::Pairs(s)]) => IrrState::Pairs(
                s.iter()
                    .map(|&(x, y)| (rename_label(x, from, to), rename_label(y, from, to)))
                    .collect(),
            ),
            (Symbol::Add { from, to }, [IrrState::Pairs(s)]) => {
                if s.contains(&(from, to)) {
                    IrrState::Error
                } else if s.contains(&(from, from)) && s.contains(&(to, to)) {
                    let mut s = s.clone();
                    s.insert((from, to));
                    IrrState::Pairs(s)
                } else {
                    IrrState::Pairs(s.clone())
                }
            }
            _ => unreachable!("arity mismatch"),
        };
        out.push(q);
    }

    fn is_accepting(&self, q: &IrrState) -> bool {
        matches!(q, IrrState::Pairs(_))
    }

    fn sink(&self, q: &IrrState) -> Option<Sink> {
        matches!(q, IrrState::Error).then_some(Sink::Error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fa::{run_deterministic, RunOptions};
    use crate::term::parse_term;

    fn root(src: &str) -> IrrState {
        let t = parse_term(src).unwrap();
        run_deterministic(&Irr::new(), &t, &RunOptions::traced()).unwrap().root
    }

    #[test]
    fn empty_term_is_irredundant() {
        assert_eq!(root("(empty)"), IrrState::Pairs(BTreeSet::new()));
    }

    #[test]
    fn repeated_add_is_error() {
        assert_eq!(root("(add 1 -1 (add 1 -1 (oplus (leaf 1) (leaf -1))))"), IrrState::Error);
    }

    #[test]
    fn add_without_endpoints_creates_nothing() {
        // the inner add has no -1 vertex to connect to
        let q = root("(add 1 -1 (oplus (add 1 -1 (leaf 1)) (leaf -1)))");
        let l = |v| Label::new(v).unwrap();
        assert_eq!(q.edge_pairs().unwrap(), [(l(1), l(-1))].into_iter().collect());
    }
}
