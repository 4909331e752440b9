use std::collections::BTreeSet;

use super::{rename, rename_label, single, xy_bits, LabelSet};
use crate::fa::{FlyAutomaton, Signature, StateValue};
use crate::label::Label;
use crate::term::Symbol;

/// `∀x ∈ X ∀y ∈ Y. x → y`. A vertex in both sets needs a loop.
#[derive(Clone, Copy, Debug, Default)]
pub struct LinkAA;

/// `delta`: labels of D-vertices; `out`: `(π(x), π(Out(x)))` for x in X';
/// `inn`: `(π(In(y)), π(y))` for y in Y'; `missing`: the quadruples of the
/// pairs `(x, y)` not yet linked.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkAAState {
    pub delta: LabelSet,
    pub out: BTreeSet<(Label, LabelSet)>,
    pub inn: BTreeSet<(LabelSet, Label)>,
    pub missing: BTreeSet<(Label, LabelSet, LabelSet, Label)>,
}

impl LinkAAState {
    pub fn is_valid(&self) -> bool {
        self.out.iter().all(|(_, e)| e.is_subset(&self.delta))
            && self.inn.iter().all(|(e, _)| e.is_subset(&self.delta))
            && self.missing.iter().all(|(a, e, f, b)| {
                self.out.contains(&(*a, e.clone())) && self.inn.contains(&(f.clone(), *b))
            })
    }

    fn mirrored(&self) -> LinkAAState {
        LinkAAState {
            delta: self.delta.clone(),
            out: self.inn.iter().map(|(e, a)| (*a, e.clone())).collect(),
            inn: self.out.iter().map(|(a, e)| (e.clone(), *a)).collect(),
            missing: self.missing.iter().map(|(a, e, f, b)| (*b, f.clone(), e.clone(), *a)).collect(),
        }
    }

    fn add_out(&self, a: Label, d: Label) -> LinkAAState {
        if !self.delta.contains(&d) || !self.out.iter().any(|(x, _)| *x == a) {
            return self.clone();
        }
        let grow = |e: &LabelSet| {
            let mut e = e.clone();
            e.insert(d);
            e
        };
        LinkAAState {
            delta: self.delta.clone(),
            out: self
                .out
                .iter()
                .map(|(x, e)| if *x == a { (*x, grow(e)) } else { (*x, e.clone()) })
                .collect(),
            inn: self.inn.clone(),
            missing: self
                .missing
                .iter()
                .filter(|(x, _, f, _)| *x != a || !f.contains(&d))
                .map(|(x, e, f, b)| {
                    let e = if *x == a { grow(e) } else { e.clone() };
                    (*x, e, f.clone(), *b)
                })
                .collect(),
        }
    }

    fn renamed(&self, from: Label, to: Label) -> LinkAAState {
        let r = |x: &Label| rename_label(*x, from, to);
        let rs = |s: &LabelSet| rename(s, from, to);
        LinkAAState {
            delta: rs(&self.delta),
            out: self.out.iter().map(|(a, e)| (r(a), rs(e))).collect(),
            inn: self.inn.iter().map(|(e, a)| (rs(e), r(a))).collect(),
            missing: self.missing.iter().map(|(a, e, f, b)| (r(a), rs(e), rs(f), r(b))).collect(),
        }
    }
}

impl StateValue for LinkAAState {
    fn encode(&self, out: &mut Vec<u8>) {
        self.delta.encode(out);
        self.out.encode(out);
        self.inn.encode(out);
        self.missing.encode(out);
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        self.delta.collect_labels(out);
        self.out.collect_labels(out);
        self.inn.collect_labels(out);
        self.missing.collect_labels(out);
    }
}

impl FlyAutomaton for LinkAA {
    type State = LinkAAState;

    fn signature(&self) -> Signature {
        Signature::new(2, 0)
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn transitions(&self, sym: &Symbol, children: &[&LinkAAState], out: &mut Vec<LinkAAState>) {
        let q = match (*sym, children) {
            (Symbol::Empty, _) => LinkAAState::default(),
            (Symbol::Leaf { label, .. }, _) if label.is_edge() => {
                LinkAAState { delta: single(label), ..Default::default() }
            }
            (Symbol::Leaf { label, .. }, _) => {
                let (x, y) = xy_bits(sym);
                let mut q = LinkAAState::default();
                if x {
                    q.out.insert((label, LabelSet::new()));
                }
                if y {
                    q.inn.insert((LabelSet::new(), label));
                }
                if x && y {
                    q.missing.insert((label, LabelSet::new(), LabelSet::new(), label));
                }
                q
            }
            (Symbol::Oplus, [l, r]) => {
                let mut missing: BTreeSet<_> = l.missing.union(&r.missing).cloned().collect();
                for (left, right) in [(l, r), (r, l)] {
                    for (a, e) in &left.out {
                        for (f, b) in &right.inn {
                            missing.insert((*a, e.clone(), f.clone(), *b));
                        }
                    }
                }
                LinkAAState {
                    delta: &l.delta | &r.delta,
                    out: l.out.union(&r.out).cloned().collect(),
                    inn: l.inn.union(&r.inn).cloned().collect(),
                    missing,
                }
            }
            (Symbol::Relab { from, to }, [q]) => q.renamed(from, to),
            (Symbol::Add { from, to }, [q]) => {
                if from.is_vertex() {
                    q.add_out(from, to)
                } else {
                    q.mirrored().add_out(to, from).mirrored()
                }
            }
            _ => unreachable!("arity mismatch"),
        };
        out.push(q);
    }

    fn is_accepting(&self, q: &LinkAAState) -> bool {
        q.missing.is_empty()
    }
}
