use std::collections::BTreeSet;

use super::maps::{DropLastBit, Relabelling, Relativize, RelativizeScope, SymbolMap};
use super::{encode_len, FlyAutomaton, RunError, Signature, Sink, StateValue};
use crate::label::{Label, Sort};
use crate::term::Symbol;

fn intersect_labels(
    a: Option<BTreeSet<Label>>,
    b: Option<BTreeSet<Label>>,
) -> Option<BTreeSet<Label>> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.intersection(&y).copied().collect()),
    }
}

/// Cartesian product of child choices, calling `f` on each combination.
fn for_each_choice<S>(sets: &[&[S]], f: &mut impl FnMut(&[&S])) {
    match sets {
        [] => f(&[]),
        [a] => {
            for x in *a {
                f(&[x]);
            }
        }
        [a, b] => {
            for x in *a {
                for y in *b {
                    f(&[x, y]);
                }
            }
        }
        _ => unreachable!("arity at most 2"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcceptMode {
    And,
    Or,
}

pub type PairState<S, T> = (S, T);

/// Runs two automata side by side.
#[derive(Clone, Debug)]
pub struct Product<A, B> {
    pub left: A,
    pub right: B,
    pub mode: AcceptMode,
}

pub fn product<A: FlyAutomaton, B: FlyAutomaton>(
    left: A,
    right: B,
    mode: AcceptMode,
) -> Result<Product<A, B>, RunError> {
    let (sa, sb) = (left.signature(), right.signature());
    if sa.widths() != sb.widths() {
        return Err(RunError::SignatureMismatch(format!(
            "product of automata with widths {:?} and {:?}",
            sa.widths(),
            sb.widths()
        )));
    }
    Ok(Product { left, right, mode })
}

impl<A: FlyAutomaton, B: FlyAutomaton> FlyAutomaton for Product<A, B> {
    type State = PairState<A::State, B::State>;

    fn signature(&self) -> Signature {
        let (sa, sb) = (self.left.signature(), self.right.signature());
        Signature { labels: intersect_labels(sa.labels, sb.labels), ..sa }
    }

    fn is_deterministic(&self) -> bool {
        self.left.is_deterministic() && self.right.is_deterministic()
    }

    fn transitions(&self, sym: &Symbol, children: &[&Self::State], out: &mut Vec<Self::State>) {
        let lc: Vec<&A::State> = children.iter().map(|c| &c.0).collect();
        let rc: Vec<&B::State> = children.iter().map(|c| &c.1).collect();
        let (mut lo, mut ro) = (Vec::new(), Vec::new());
        self.left.transitions(sym, &lc, &mut lo);
        self.right.transitions(sym, &rc, &mut ro);
        for l in &lo {
            for r in &ro {
                out.push((l.clone(), r.clone()));
            }
        }
    }

    fn is_accepting(&self, q: &Self::State) -> bool {
        let (a, b) = (self.left.is_accepting(&q.0), self.right.is_accepting(&q.1));
        match self.mode {
            AcceptMode::And => a && b,
            AcceptMode::Or => a || b,
        }
    }

    fn sink(&self, q: &Self::State) -> Option<Sink> {
        let (a, b) = (self.left.sink(&q.0), self.right.sink(&q.1));
        match self.mode {
            AcceptMode::And if a == Some(Sink::Error) || b == Some(Sink::Error) => Some(Sink::Error),
            AcceptMode::And if a == Some(Sink::Success) && b == Some(Sink::Success) => {
                Some(Sink::Success)
            }
            AcceptMode::Or if a == Some(Sink::Success) || b == Some(Sink::Success) => {
                Some(Sink::Success)
            }
            AcceptMode::Or if a == Some(Sink::Error) && b == Some(Sink::Error) => Some(Sink::Error),
            _ => None,
        }
    }
}

/// Same runs, accepting states negated.
#[derive(Clone, Debug)]
pub struct Complement<A>(pub A);

pub fn complement<A: FlyAutomaton>(a: A) -> Result<Complement<A>, RunError> {
    if !a.is_deterministic() {
        return Err(RunError::NeedsDeterministic("complement"));
    }
    Ok(Complement(a))
}

impl<A: FlyAutomaton> FlyAutomaton for Complement<A> {
    type State = A::State;

    fn signature(&self) -> Signature {
        self.0.signature()
    }
    fn is_deterministic(&self) -> bool {
        true
    }
    fn transitions(&self, sym: &Symbol, children: &[&Self::State], out: &mut Vec<Self::State>) {
        self.0.transitions(sym, children, out)
    }
    fn is_accepting(&self, q: &Self::State) -> bool {
        !self.0.is_accepting(q)
    }
    fn sink(&self, q: &Self::State) -> Option<Sink> {
        self.0.sink(q).map(|s| match s {
            Sink::Error => Sink::Success,
            Sink::Success => Sink::Error,
        })
    }
}

/// A finite set of states of the underlying automaton, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet<S>(Vec<S>);

impl<S: StateValue> StateSet<S> {
    pub fn from_vec(mut v: Vec<S>) -> Self {
        v.sort();
        v.dedup();
        StateSet(v)
    }

    pub fn members(&self) -> &[S] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: StateValue> StateValue for StateSet<S> {
    fn encode(&self, out: &mut Vec<u8>) {
        encode_len(self.0.len(), out);
        for q in &self.0 {
            q.encode(out);
        }
    }
    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        for q in &self.0 {
            q.collect_labels(out);
        }
    }
}

/// The subset construction, computed one transition at a time.
#[derive(Clone, Debug)]
pub struct Determinize<A>(pub A);

pub fn determinize<A: FlyAutomaton>(a: A) -> Determinize<A> {
    Determinize(a)
}

impl<A: FlyAutomaton> FlyAutomaton for Determinize<A> {
    type State = StateSet<A::State>;

    fn signature(&self) -> Signature {
        self.0.signature()
    }
    fn is_deterministic(&self) -> bool {
        true
    }
    fn transitions(&self, sym: &Symbol, children: &[&Self::State], out: &mut Vec<Self::State>) {
        let sets: Vec<&[A::State]> = children.iter().map(|c| c.members()).collect();
        let mut acc = Vec::new();
        for_each_choice(&sets, &mut |qs| self.0.transitions(sym, qs, &mut acc));
        out.push(StateSet::from_vec(acc));
    }
    fn is_accepting(&self, q: &Self::State) -> bool {
        q.members().iter().any(|s| self.0.is_accepting(s))
    }
    fn sink(&self, q: &Self::State) -> Option<Sink> {
        q.members()
            .iter()
            .all(|s| self.0.sink(s) == Some(Sink::Error))
            .then_some(Sink::Error)
    }
}

/// `h(A)`: a transition on `f'` for every source symbol `f` with `h(f) = f'`.
#[derive(Clone, Debug)]
pub struct Image<A, H> {
    pub inner: A,
    pub map: H,
}

pub fn image<A: FlyAutomaton, H: Relabelling>(inner: A, map: H) -> Result<Image<A, H>, RunError> {
    if inner.signature().widths() != map.source_widths() {
        return Err(RunError::SignatureMismatch(format!(
            "image map expects source widths {:?}, automaton has {:?}",
            map.source_widths(),
            inner.signature().widths()
        )));
    }
    for probe in probe_symbols(map.target_widths()) {
        for f in map.preimage(&probe) {
            if f.arity() != probe.arity() || map.apply(&f) != probe {
                return Err(RunError::Invalid(format!(
                    "map is not an arity-preserving relabelling at {probe:?}"
                )));
            }
        }
    }
    Ok(Image { inner, map })
}

/// A few symbols of every kind, used to sanity-check maps.
fn probe_symbols(widths: (usize, usize)) -> Vec<Symbol> {
    use crate::term::Annotation;
    let (a, b, d) = (Label::vertex(1), Label::vertex(2), Label::edge(1));
    vec![
        Symbol::Empty,
        Symbol::Leaf { label: a, ann: Annotation::zeros(widths.0) },
        Symbol::Leaf { label: d, ann: Annotation::zeros(widths.1) },
        Symbol::Oplus,
        Symbol::Relab { from: a, to: b },
        Symbol::Add { from: a, to: d },
        Symbol::Add { from: d, to: b },
    ]
}

impl<A: FlyAutomaton, H: Relabelling> FlyAutomaton for Image<A, H> {
    type State = A::State;

    fn signature(&self) -> Signature {
        let (p, m) = self.map.target_widths();
        Signature { vertex_width: p, edge_width: m, labels: self.inner.signature().labels }
    }
    fn is_deterministic(&self) -> bool {
        false
    }
    fn transitions(&self, sym: &Symbol, children: &[&Self::State], out: &mut Vec<Self::State>) {
        for f in self.map.preimage(sym) {
            self.inner.transitions(&f, children, out);
        }
    }
    fn is_accepting(&self, q: &Self::State) -> bool {
        self.inner.is_accepting(q)
    }
    fn sink(&self, q: &Self::State) -> Option<Sink> {
        self.inner.sink(q)
    }
}

/// `h⁻¹(A)`: reads each symbol through `h`.
#[derive(Clone, Debug)]
pub struct InverseImage<A, H> {
    pub inner: A,
    pub map: H,
}

pub fn inverse_image<A: FlyAutomaton, H: SymbolMap>(
    inner: A,
    map: H,
) -> Result<InverseImage<A, H>, RunError> {
    if inner.signature().widths() != map.target_widths() {
        return Err(RunError::SignatureMismatch(format!(
            "inverse image map targets widths {:?}, automaton has {:?}",
            map.target_widths(),
            inner.signature().widths()
        )));
    }
    Ok(InverseImage { inner, map })
}

impl<A: FlyAutomaton, H: SymbolMap> FlyAutomaton for InverseImage<A, H> {
    type State = A::State;

    fn signature(&self) -> Signature {
        let (p, m) = self.map.source_widths();
        Signature { vertex_width: p, edge_width: m, labels: self.inner.signature().labels }
    }
    fn is_deterministic(&self) -> bool {
        self.inner.is_deterministic()
    }
    fn transitions(&self, sym: &Symbol, children: &[&Self::State], out: &mut Vec<Self::State>) {
        self.inner.transitions(&self.map.apply(sym), children, out)
    }
    fn is_accepting(&self, q: &Self::State) -> bool {
        self.inner.is_accepting(q)
    }
    fn sink(&self, q: &Self::State) -> Option<Sink> {
        self.inner.sink(q)
    }
}

/// The subautomaton over a finite set of labels.
#[derive(Clone, Debug)]
pub struct Restricted<A> {
    pub inner: A,
    pub labels: BTreeSet<Label>,
}

pub fn restrict_signature<A: FlyAutomaton>(inner: A, labels: BTreeSet<Label>) -> Restricted<A> {
    Restricted { inner, labels }
}

impl<A: FlyAutomaton> FlyAutomaton for Restricted<A> {
    type State = A::State;

    fn signature(&self) -> Signature {
        let s = self.inner.signature();
        Signature { labels: intersect_labels(s.labels, Some(self.labels.clone())), ..s }
    }
    fn is_deterministic(&self) -> bool {
        self.inner.is_deterministic()
    }
    fn transitions(&self, sym: &Symbol, children: &[&Self::State], out: &mut Vec<Self::State>) {
        self.inner.transitions(sym, children, out)
    }
    fn is_accepting(&self, q: &Self::State) -> bool {
        self.inner.is_accepting(q)
    }
    fn sink(&self, q: &Self::State) -> Option<Sink> {
        self.inner.sink(q)
    }
}

/// `∃` over the last set variable of the given sort: `det(h(A))` where `h`
/// forgets that variable's bit.
pub fn exists_project<A: FlyAutomaton>(
    a: A,
    sort: Sort,
) -> Result<Determinize<Image<A, DropLastBit>>, RunError> {
    let h = DropLastBit::new(sort, a.signature().widths())
        .ok_or_else(|| RunError::Invalid(format!("no {sort:?} variable to project")))?;
    Ok(determinize(image(a, h)?))
}

/// `P[X]`: the automaton sees only the leaves whose extra last bit is set.
pub fn relativize<A: FlyAutomaton>(
    a: A,
    scope: RelativizeScope,
) -> Result<InverseImage<A, Relativize>, RunError> {
    let base = a.signature().widths();
    inverse_image(a, Relativize { scope, base })
}
