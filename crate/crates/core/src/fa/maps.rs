use crate::label::Sort;
use crate::term::{Annotation, Symbol};

/// An arity-preserving map between annotated signatures. Only leaf
/// annotations (and, for relativization, leaf kinds) are ever changed.
pub trait SymbolMap: Send + Sync {
    fn apply(&self, s: &Symbol) -> Symbol;
    /// Annotation widths `(p, m)` of the source signature.
    fn source_widths(&self) -> (usize, usize);
    /// Annotation widths `(p, m)` of the target signature.
    fn target_widths(&self) -> (usize, usize);
}

/// A map with a computable finite inverse on every symbol.
pub trait Relabelling: SymbolMap {
    /// All source symbols mapped to `s`.
    fn preimage(&self, s: &Symbol) -> Vec<Symbol>;
}

fn width_of(widths: (usize, usize), sort: Sort) -> usize {
    match sort {
        Sort::Vertex => widths.0,
        Sort::Edge => widths.1,
    }
}

#[derive(Clone, Debug)]
pub struct Identity {
    pub widths: (usize, usize),
}

impl SymbolMap for Identity {
    fn apply(&self, s: &Symbol) -> Symbol {
        *s
    }
    fn source_widths(&self) -> (usize, usize) {
        self.widths
    }
    fn target_widths(&self) -> (usize, usize) {
        self.widths
    }
}

impl Relabelling for Identity {
    fn preimage(&self, s: &Symbol) -> Vec<Symbol> {
        vec![*s]
    }
}

/// Deletes the last annotation bit of leaves of one sort.
#[derive(Clone, Debug)]
pub struct DropLastBit {
    pub sort: Sort,
    pub source: (usize, usize),
}

impl DropLastBit {
    pub fn new(sort: Sort, source: (usize, usize)) -> Option<Self> {
        (width_of(source, sort) > 0).then_some(DropLastBit { sort, source })
    }
}

impl SymbolMap for DropLastBit {
    fn apply(&self, s: &Symbol) -> Symbol {
        match *s {
            Symbol::Leaf { label, ann } if label.sort() == self.sort => {
                Symbol::Leaf { label, ann: ann.pop() }
            }
            other => other,
        }
    }
    fn source_widths(&self) -> (usize, usize) {
        self.source
    }
    fn target_widths(&self) -> (usize, usize) {
        match self.sort {
            Sort::Vertex => (self.source.0 - 1, self.source.1),
            Sort::Edge => (self.source.0, self.source.1 - 1),
        }
    }
}

impl Relabelling for DropLastBit {
    fn preimage(&self, s: &Symbol) -> Vec<Symbol> {
        match *s {
            Symbol::Leaf { label, ann } if label.sort() == self.sort => [false, true]
                .into_iter()
                .map(|b| Symbol::Leaf { label, ann: ann.push(b) })
                .collect(),
            other => vec![other],
        }
    }
}

/// Variable substitution: target bit `i` of a vertex leaf is source bit
/// `vertex[i]`, and likewise for edge leaves.
#[derive(Clone, Debug)]
pub struct SelectBits {
    pub source: (usize, usize),
    pub vertex: Vec<usize>,
    pub edge: Vec<usize>,
}

impl SelectBits {
    pub fn new(source: (usize, usize), vertex: Vec<usize>, edge: Vec<usize>) -> Option<Self> {
        let ok = vertex.iter().all(|&i| i < source.0) && edge.iter().all(|&i| i < source.1);
        ok.then_some(SelectBits { source, vertex, edge })
    }

    fn selection(&self, sort: Sort) -> &[usize] {
        match sort {
            Sort::Vertex => &self.vertex,
            Sort::Edge => &self.edge,
        }
    }
}

impl SymbolMap for SelectBits {
    fn apply(&self, s: &Symbol) -> Symbol {
        match *s {
            Symbol::Leaf { label, ann } => {
                let sel = self.selection(label.sort());
                let flags: Vec<bool> = sel.iter().map(|&i| ann.get(i)).collect();
                Symbol::Leaf { label, ann: Annotation::from_bools(&flags) }
            }
            other => other,
        }
    }
    fn source_widths(&self) -> (usize, usize) {
        self.source
    }
    fn target_widths(&self) -> (usize, usize) {
        (self.vertex.len(), self.edge.len())
    }
}

impl Relabelling for SelectBits {
    fn preimage(&self, s: &Symbol) -> Vec<Symbol> {
        let Symbol::Leaf { label, ann } = *s else { return vec![*s] };
        let sel = self.selection(label.sort());
        let width = width_of(self.source, label.sort());
        (0u32..1 << width)
            .map(|bits| Annotation::from_bits(width, bits))
            .filter(|cand| sel.iter().enumerate().all(|(i, &j)| cand.get(j) == ann.get(i)))
            .map(|ann| Symbol::Leaf { label, ann })
            .collect()
    }
}

/// Which leaves carry the extra membership bit of a relativization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelativizeScope {
    Vertices,
    Edges,
    Both,
}

impl RelativizeScope {
    fn covers(self, sort: Sort) -> bool {
        matches!(
            (self, sort),
            (RelativizeScope::Both, _)
                | (RelativizeScope::Vertices, Sort::Vertex)
                | (RelativizeScope::Edges, Sort::Edge)
        )
    }
}

/// `(a, w1) ↦ (a, w)` and `(a, w0) ↦ ∅` on leaves in scope.
#[derive(Clone, Debug)]
pub struct Relativize {
    pub scope: RelativizeScope,
    /// Widths of the relativized automaton's input, before adding the bit.
    pub base: (usize, usize),
}

impl SymbolMap for Relativize {
    fn apply(&self, s: &Symbol) -> Symbol {
        match *s {
            Symbol::Leaf { label, ann } if self.scope.covers(label.sort()) => {
                if ann.get(ann.len() - 1) {
                    Symbol::Leaf { label, ann: ann.pop() }
                } else {
                    Symbol::Empty
                }
            }
            other => other,
        }
    }
    fn source_widths(&self) -> (usize, usize) {
        let (p, m) = self.base;
        (
            p + self.scope.covers(Sort::Vertex) as usize,
            m + self.scope.covers(Sort::Edge) as usize,
        )
    }
    fn target_widths(&self) -> (usize, usize) {
        self.base
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label;

    fn leaf(l: i32, bits: &[bool]) -> Symbol {
        Symbol::Leaf { label: Label::new(l).unwrap(), ann: Annotation::from_bools(bits) }
    }

    #[test]
    fn drop_last_bit_preimage_inverts_apply() {
        let h = DropLastBit::new(Sort::Vertex, (2, 0)).unwrap();
        let s = leaf(3, &[true]);
        let pre = h.preimage(&s);
        assert_eq!(pre, vec![leaf(3, &[true, false]), leaf(3, &[true, true])]);
        assert!(pre.iter().all(|p| h.apply(p) == s));
        assert_eq!(h.preimage(&leaf(-1, &[])), vec![leaf(-1, &[])]);
        assert!(DropLastBit::new(Sort::Edge, (2, 0)).is_none());
    }

    #[test]
    fn select_bits_permutes() {
        // edg(X3, X1) from edg(X1, X2)
        let h = SelectBits::new((3, 0), vec![2, 0], vec![]).unwrap();
        assert_eq!(h.apply(&leaf(1, &[true, false, false])), leaf(1, &[false, true]));
        let pre = h.preimage(&leaf(1, &[false, true]));
        assert_eq!(pre.len(), 2);
        assert!(pre.iter().all(|p| h.apply(p) == leaf(1, &[false, true])));
    }

    #[test]
    fn relativize_empties_unselected() {
        let h = Relativize { scope: RelativizeScope::Vertices, base: (0, 0) };
        assert_eq!(h.apply(&leaf(2, &[true])), leaf(2, &[]));
        assert_eq!(h.apply(&leaf(2, &[false])), Symbol::Empty);
        assert_eq!(h.apply(&leaf(-2, &[])), leaf(-2, &[]));
        assert_eq!(h.source_widths(), (1, 0));
    }
}
