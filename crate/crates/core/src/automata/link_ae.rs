use std::collections::BTreeSet;

use super::{rename, rename_label, single, xy_bits, LabelSet};
use crate::fa::{FlyAutomaton, Signature, StateValue};
use crate::label::Label;
use crate::term::Symbol;

/// `∀x ∈ X ∃y ∈ Y. x → y`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LinkAE;

/// `gamma = π(Y')`, `delta`: labels of D-vertices, `lambda = π(In(Y'))`,
/// `out`: `(π(x), π(Out(x)))` for x in X', `pending`: the pairs of `out`
/// coming from some x with no link into Y' yet.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkAEState {
    pub gamma: LabelSet,
    pub delta: LabelSet,
    pub lambda: LabelSet,
    pub out: BTreeSet<(Label, LabelSet)>,
    pub pending: BTreeSet<(Label, LabelSet)>,
}

impl LinkAEState {
    pub fn is_valid(&self) -> bool {
        self.lambda.is_subset(&self.delta)
            && self.pending.is_subset(&self.out)
            && self.out.iter().all(|(_, e)| e.is_subset(&self.delta))
    }
}

impl StateValue for LinkAEState {
    fn encode(&self, out: &mut Vec<u8>) {
        self.gamma.encode(out);
        self.delta.encode(out);
        self.lambda.encode(out);
        self.out.encode(out);
        self.pending.encode(out);
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        self.gamma.collect_labels(out);
        self.delta.collect_labels(out);
        self.lambda.collect_labels(out);
        self.out.collect_labels(out);
        self.pending.collect_labels(out);
    }
}

fn grow(e: &LabelSet, d: Label) -> LabelSet {
    let mut e = e.clone();
    e.insert(d);
    e
}

impl FlyAutomaton for LinkAE {
    type State = LinkAEState;

    fn signature(&self) -> Signature {
        Signature::new(2, 0)
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn transitions(&self, sym: &Symbol, children: &[&LinkAEState], out: &mut Vec<LinkAEState>) {
        let q = match (*sym, children) {
            (Symbol::Empty, _) => LinkAEState::default(),
            (Symbol::Leaf { label, .. }, _) if label.is_edge() => {
                LinkAEState { delta: single(label), ..Default::default() }
            }
            (Symbol::Leaf { label, .. }, _) => {
                let (x, y) = xy_bits(sym);
                let mut q = LinkAEState::default();
                if x {
                    q.out.insert((label, LabelSet::new()));
                    q.pending.insert((label, LabelSet::new()));
                }
                if y {
                    q.gamma.insert(label);
                }
                q
            }
            // No edge crosses a disjoint union, so nothing pending is resolved.
            (Symbol::Oplus, [l, r]) => LinkAEState {
                gamma: &l.gamma | &r.gamma,
                delta: &l.delta | &r.delta,
                lambda: &l.lambda | &r.lambda,
                out: l.out.union(&r.out).cloned().collect(),
                pending: l.pending.union(&r.pending).cloned().collect(),
            },
            (Symbol::Relab { from, to }, [q]) => {
                let r = |x: &Label| rename_label(*x, from, to);
                let rs = |s: &LabelSet| rename(s, from, to);
                LinkAEState {
                    gamma: rs(&q.gamma),
                    delta: rs(&q.delta),
                    lambda: rs(&q.lambda),
                    out: q.out.iter().map(|(a, e)| (r(a), rs(e))).collect(),
                    pending: q.pending.iter().map(|(a, e)| (r(a), rs(e))).collect(),
                }
            }
            (Symbol::Add { from: a, to: d }, [q]) if a.is_vertex() => {
                if !q.delta.contains(&d) || !q.out.iter().any(|(x, _)| *x == a) {
                    (*q).clone()
                } else {
                    let upd = |(x, e): &(Label, LabelSet)| {
                        (*x, if *x == a { grow(e, d) } else { e.clone() })
                    };
                    let linked = q.lambda.contains(&d);
                    LinkAEState {
                        out: q.out.iter().map(upd).collect(),
                        pending: q
                            .pending
                            .iter()
                            .filter(|(x, _)| !(linked && *x == a))
                            .map(upd)
                            .collect(),
                        ..(*q).clone()
                    }
                }
            }
            (Symbol::Add { from: d, to: b }, [q]) => {
                if !q.gamma.contains(&b) || !q.delta.contains(&d) {
                    (*q).clone()
                } else {
                    LinkAEState {
                        lambda: grow(&q.lambda, d),
                        pending: q.pending.iter().filter(|(_, e)| !e.contains(&d)).cloned().collect(),
                        ..(*q).clone()
                    }
                }
            }
            _ => unreachable!("arity mismatch"),
        };
        out.push(q);
    }

    fn is_accepting(&self, q: &LinkAEState) -> bool {
        q.pending.is_empty()
    }
}
