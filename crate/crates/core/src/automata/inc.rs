use std::collections::BTreeSet;

use super::{rename, tag, LabelSet};
use crate::fa::{FlyAutomaton, Signature, Sink, StateValue};
use crate::label::Label;
use crate::term::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IncDirection {
    /// `X = {x}`, `U = {u}` and `x → u`.
    XtoU,
    /// `X = {x}`, `U = {u}` and `u → x`.
    UtoY,
}

/// Incidence between a singleton vertex set and a singleton edge set, over
/// widths (1, 1).
#[derive(Clone, Copy, Debug)]
pub struct Inc {
    pub direction: IncDirection,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IncState {
    Ok,
    Error,
    /// `(π(X'), π(U'))`, both of size at most 1.
    Pair(LabelSet, LabelSet),
}

impl IncState {
    pub fn is_valid(&self) -> bool {
        match self {
            IncState::Pair(g, d) => g.len() <= 1 && d.len() <= 1,
            _ => true,
        }
    }
}

impl StateValue for IncState {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            IncState::Ok => tag(out, 0),
            IncState::Error => tag(out, 1),
            IncState::Pair(g, d) => {
                tag(out, 2);
                g.encode(out);
                d.encode(out);
            }
        }
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        if let IncState::Pair(g, d) = self {
            out.extend(g);
            out.extend(d);
        }
    }
}

impl Inc {
    pub fn new(direction: IncDirection) -> Self {
        Inc { direction }
    }
}

impl FlyAutomaton for Inc {
    type State = IncState;

    fn signature(&self) -> Signature {
        Signature::new(1, 1)
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn transitions(&self, sym: &Symbol, children: &[&IncState], out: &mut Vec<IncState>) {
        use IncState::*;
        let q = match (*sym, children) {
            (Symbol::Empty, _) => Pair(LabelSet::new(), LabelSet::new()),
            (Symbol::Leaf { label, ann }, _) => {
                let mine: LabelSet = ann.get(0).then_some(label).into_iter().collect();
                if label.is_vertex() {
                    Pair(mine, LabelSet::new())
                } else {
                    Pair(LabelSet::new(), mine)
                }
            }
            (_, [Error, ..]) | (_, [_, Error]) => Error,
            (Symbol::Oplus, [Ok, Ok]) => Error,
            (Symbol::Oplus, [Ok, Pair(g, d)]) | (Symbol::Oplus, [Pair(g, d), Ok]) => {
                if g.is_empty() && d.is_empty() {
                    Ok
                } else {
                    Error
                }
            }
            (Symbol::Oplus, [Pair(g1, d1), Pair(g2, d2)]) => {
                if g1.len() + g2.len() >= 2 || d1.len() + d2.len() >= 2 {
                    Error
                } else {
                    Pair(g1 | g2, d1 | d2)
                }
            }
            (Symbol::Relab { .. } | Symbol::Add { .. }, [Ok]) => Ok,
            (Symbol::Relab { from, to }, [Pair(g, d)]) => {
                Pair(rename(g, from, to), rename(d, from, to))
            }
            (Symbol::Add { from, to }, [Pair(g, d)]) => {
                let (a, e) = match self.direction {
                    IncDirection::XtoU => (from, to),
                    IncDirection::UtoY => (to, from),
                };
                if g.contains(&a) && d.contains(&e) {
                    Ok
                } else {
                    Pair(g.clone(), d.clone())
                }
            }
            _ => unreachable!("arity mismatch"),
        };
        out.push(q);
    }

    fn is_accepting(&self, q: &IncState) -> bool {
        matches!(q, IncState::Ok)
    }

    fn sink(&self, q: &IncState) -> Option<Sink> {
        matches!(q, IncState::Error).then_some(Sink::Error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fa::{run_deterministic, RunOptions};
    use crate::term::parse_term;

    fn run(dir: IncDirection, src: &str) -> IncState {
        let t = parse_term(src).unwrap();
        run_deterministic(&Inc::new(dir), &t, &RunOptions::traced()).unwrap().root
    }

    const EDGE: &str = "(add -1 2 (add 1 -1 (oplus (oplus (leaf 1 1) (leaf 2 0)) (leaf -1 1))))";

    #[test]
    fn tail_and_edge() {
        assert_eq!(run(IncDirection::XtoU, EDGE), IncState::Ok);
        assert!(matches!(run(IncDirection::UtoY, EDGE), IncState::Pair(..)));
    }

    #[test]
    fn empty_x_keeps_edge_label() {
        let src = "(add -1 2 (add 1 -1 (oplus (oplus (leaf 1 0) (leaf 2 0)) (leaf -1 1))))";
        let l = Label::new(-1).unwrap();
        assert_eq!(
            run(IncDirection::XtoU, src),
            IncState::Pair(LabelSet::new(), std::iter::once(l).collect())
        );
    }

    #[test]
    fn two_members_is_error() {
        assert_eq!(run(IncDirection::XtoU, "(oplus (leaf 1 1) (leaf 2 1))"), IncState::Error);
    }
}
