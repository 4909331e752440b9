use std::collections::BTreeSet;

use super::{rename, rename_label, single, xy_bits, LabelSet};
use crate::fa::{FlyAutomaton, Signature, StateValue};
use crate::label::Label;
use crate::term::Symbol;

/// `∃x ∈ X ∀y ∈ Y. x → y`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LinkEA;

pub type InPair = (LabelSet, Label);

/// `delta`: labels of D-vertices; `inn`: `(π(In(y)), π(y))` for y in Y';
/// `xi`: for each x in X', `(π(x), π(Out(x)), the inn pairs of the y not
/// yet reached from x)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkEAState {
    pub delta: LabelSet,
    pub inn: BTreeSet<InPair>,
    pub xi: BTreeSet<(Label, LabelSet, BTreeSet<InPair>)>,
}

impl LinkEAState {
    pub fn is_valid(&self) -> bool {
        self.inn.iter().all(|(e, _)| e.is_subset(&self.delta))
            && self.xi.iter().all(|(_, e, phi)| e.is_subset(&self.delta) && phi.is_subset(&self.inn))
    }
}

impl StateValue for LinkEAState {
    fn encode(&self, out: &mut Vec<u8>) {
        self.delta.encode(out);
        self.inn.encode(out);
        self.xi.encode(out);
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        self.delta.collect_labels(out);
        self.inn.collect_labels(out);
        self.xi.collect_labels(out);
    }
}

fn grow(e: &LabelSet, d: Label) -> LabelSet {
    let mut e = e.clone();
    e.insert(d);
    e
}

impl FlyAutomaton for LinkEA {
    type State = LinkEAState;

    fn signature(&self) -> Signature {
        Signature::new(2, 0)
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn transitions(&self, sym: &Symbol, children: &[&LinkEAState], out: &mut Vec<LinkEAState>) {
        let q = match (*sym, children) {
            (Symbol::Empty, _) => LinkEAState::default(),
            (Symbol::Leaf { label, .. }, _) if label.is_edge() => {
                LinkEAState { delta: single(label), ..Default::default() }
            }
            (Symbol::Leaf { label, .. }, _) => {
                let (x, y) = xy_bits(sym);
                let mut q = LinkEAState::default();
                if y {
                    q.inn.insert((LabelSet::new(), label));
                }
                if x {
                    q.xi.insert((label, LabelSet::new(), q.inn.clone()));
                }
                q
            }
            // Every y on one side is still unreached from every x on the other.
            (Symbol::Oplus, [l, r]) => {
                let mut xi = BTreeSet::new();
                for (mine, other) in [(l, r), (r, l)] {
                    for (a, e, phi) in &mine.xi {
                        xi.insert((*a, e.clone(), phi.union(&other.inn).cloned().collect()));
                    }
                }
                LinkEAState {
                    delta: &l.delta | &r.delta,
                    inn: l.inn.union(&r.inn).cloned().collect(),
                    xi,
                }
            }
            (Symbol::Relab { from, to }, [q]) => {
                let r = |x: &Label| rename_label(*x, from, to);
                let rs = |s: &LabelSet| rename(s, from, to);
                let rp = |p: &BTreeSet<InPair>| p.iter().map(|(e, b)| (rs(e), r(b))).collect();
                LinkEAState {
                    delta: rs(&q.delta),
                    inn: rp(&q.inn),
                    xi: q.xi.iter().map(|(a, e, phi)| (r(a), rs(e), rp(phi))).collect(),
                }
            }
            (Symbol::Add { from: a, to: d }, [q]) if a.is_vertex() => {
                if !q.delta.contains(&d) {
                    (*q).clone()
                } else {
                    LinkEAState {
                        xi: q
                            .xi
                            .iter()
                            .map(|(x, e, phi)| {
                                if *x == a {
                                    let left = phi.iter().filter(|(f, _)| !f.contains(&d)).cloned();
                                    (*x, grow(e, d), left.collect())
                                } else {
                                    (*x, e.clone(), phi.clone())
                                }
                            })
                            .collect(),
                        ..(*q).clone()
                    }
                }
            }
            (Symbol::Add { from: d, to: b }, [q]) => {
                if !q.delta.contains(&d) {
                    (*q).clone()
                } else {
                    let upd = |(f, y): &InPair| {
                        (if *y == b { grow(f, d) } else { f.clone() }, *y)
                    };
                    LinkEAState {
                        delta: q.delta.clone(),
                        inn: q.inn.iter().map(upd).collect(),
                        xi: q
                            .xi
                            .iter()
                            .map(|(x, e, phi)| {
                                let reached = e.contains(&d);
                                let phi = phi
                                    .iter()
                                    .filter(|(_, y)| !(reached && *y == b))
                                    .map(upd)
                                    .collect();
                                (*x, e.clone(), phi)
                            })
                            .collect(),
                    }
                }
            }
            _ => unreachable!("arity mismatch"),
        };
        out.push(q);
    }

    fn is_accepting(&self, q: &LinkEAState) -> bool {
        q.xi.iter().any(|(_, _, phi)| phi.is_empty())
    }
}
