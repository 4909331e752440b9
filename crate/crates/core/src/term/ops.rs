use std::collections::BTreeSet;
use std::rc::Rc;

use super::{Annotation, NodeId, Position, Symbol, Term, TermBuilder, TermError};
use crate::label::{Label, Sort};

/// Set variables `X_1..X_p` (over v-vertex leaves) and `U_1..U_m` (over
/// e-vertex leaves), given by leaf positions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotatedSets {
    pub vertex_sets: Vec<BTreeSet<Position>>,
    pub edge_sets: Vec<BTreeSet<Position>>,
}

impl AnnotatedSets {
    pub fn new(vertex_sets: Vec<BTreeSet<Position>>, edge_sets: Vec<BTreeSet<Position>>) -> Self {
        AnnotatedSets { vertex_sets, edge_sets }
    }

    /// Reads the sets back from the leaf annotations of `t`.
    pub fn read(t: &Term) -> Result<AnnotatedSets, TermError> {
        let (p, m) = t.widths()?;
        let (p, m) = (p.unwrap_or(0), m.unwrap_or(0));
        let mut out = AnnotatedSets {
            vertex_sets: vec![BTreeSet::new(); p],
            edge_sets: vec![BTreeSet::new(); m],
        };
        let positions = t.all_positions();
        for id in t.leaves() {
            let Symbol::Leaf { label, ann } = *t.symbol(id) else { unreachable!() };
            let sets = if label.is_vertex() { &mut out.vertex_sets } else { &mut out.edge_sets };
            for (i, set) in sets.iter_mut().enumerate() {
                if ann.get(i) {
                    set.insert(positions[id.index()].clone());
                }
            }
        }
        Ok(out)
    }
}

fn resolve_leaf(t: &Term, pos: &Position, sort: Sort) -> Result<NodeId, TermError> {
    let id = t.node_at(pos)?;
    match t.symbol(id) {
        Symbol::Leaf { label, .. } if label.sort() == sort => Ok(id),
        Symbol::Leaf { label, .. } => Err(TermError::SortMismatch {
            pos: pos.clone(),
            expected: sort,
            found: label.sort(),
        }),
        _ => Err(TermError::NotALeaf(pos.clone())),
    }
}

/// Builds `t*(X_1..X_p, U_1..U_m)`: every v-leaf gets a `p`-bit annotation
/// and every e-leaf an `m`-bit one. Existing annotations are replaced.
pub fn annotate(t: &Term, sets: &AnnotatedSets) -> Result<Term, TermError> {
    let p = sets.vertex_sets.len();
    let m = sets.edge_sets.len();
    let mut anns: Vec<Option<Annotation>> = vec![None; t.len()];
    for (id, ann) in t.post_order().zip(anns.iter_mut()) {
        if let Symbol::Leaf { label, .. } = t.symbol(id) {
            *ann = Some(Annotation::zeros(if label.is_vertex() { p } else { m }));
        }
    }
    for (sets, sort) in [(&sets.vertex_sets, Sort::Vertex), (&sets.edge_sets, Sort::Edge)] {
        for (i, set) in sets.iter().enumerate() {
            for pos in set {
                let id = resolve_leaf(t, pos, sort)?;
                anns[id.index()].as_mut().expect("leaf").set(i, true);
            }
        }
    }
    Ok(t.with_annotations(|id, _| anns[id.index()].expect("leaf")))
}

/// `t[X,U]`: leaves outside `X ∪ U` are replaced by `(empty)`.
pub fn restrict_to(
    t: &Term,
    x: &BTreeSet<Position>,
    u: &BTreeSet<Position>,
) -> Result<Term, TermError> {
    let mut keep = vec![false; t.len()];
    for pos in x {
        keep[resolve_leaf(t, pos, Sort::Vertex)?.index()] = true;
    }
    for pos in u {
        keep[resolve_leaf(t, pos, Sort::Edge)?.index()] = true;
    }
    Ok(restrict_to_nodes(t, |id| keep[id.index()]))
}

/// Replaces every leaf for which `keep` is false by `(empty)`.
pub fn restrict_to_nodes(t: &Term, keep: impl Fn(NodeId) -> bool) -> Term {
    let mut b = TermBuilder::new();
    for id in t.post_order() {
        let sym = *t.symbol(id);
        if matches!(sym, Symbol::Leaf { .. }) && !keep(id) {
            b.empty();
        } else {
            b.symbol(sym).expect("symbols of a valid term");
        }
    }
    b.finish()
}

type PairSet = BTreeSet<(Label, Label)>;

/// Removes every `add` that would recreate an existing edge.
///
/// Works top-down: each node receives the set of label pairs (in its own
/// label vocabulary) that some ancestor `add` is going to connect. An `add`
/// whose pair is already in that set is redundant in full, because every
/// edge it creates is created again above, and it is dropped. Relabellings
/// are functions, so the edges created by one `add` all carry the same label
/// pair at every later point; an `add` is therefore either fully redundant
/// or not redundant at all.
pub fn make_irredundant(t: &Term) -> Term {
    let removed = redundant_adds(t);
    if removed.iter().all(|r| !r) {
        return t.clone();
    }
    let mut b = TermBuilder::new();
    for id in t.post_order() {
        if !removed[id.index()] {
            b.symbol(*t.symbol(id)).expect("symbols of a valid term");
        }
    }
    b.finish()
}

/// Marks the `add` nodes that [`make_irredundant`] deletes.
pub fn redundant_adds(t: &Term) -> Vec<bool> {
    let mut pending: Vec<Option<Rc<PairSet>>> = vec![None; t.len()];
    let mut removed = vec![false; t.len()];
    pending[t.root().index()] = Some(Rc::new(PairSet::new()));
    for id in t.post_order().rev() {
        let here = pending[id.index()].take().expect("parent visited first");
        let child_set = match *t.symbol(id) {
            Symbol::Empty | Symbol::Leaf { .. } => continue,
            Symbol::Oplus => here,
            Symbol::Add { from, to } => {
                if here.contains(&(from, to)) {
                    removed[id.index()] = true;
                    here
                } else {
                    let mut s = (*here).clone();
                    s.insert((from, to));
                    Rc::new(s)
                }
            }
            Symbol::Relab { from, to } => {
                let pre = |z: Label| -> Vec<Label> {
                    if z == to {
                        vec![from, to]
                    } else if z == from {
                        vec![]
                    } else {
                        vec![z]
                    }
                };
                let mut s = PairSet::new();
                for &(x, y) in here.iter() {
                    for &px in &pre(x) {
                        for &py in &pre(y) {
                            s.insert((px, py));
                        }
                    }
                }
                Rc::new(s)
            }
        };
        for c in t.children(id).as_vec() {
            pending[c.index()] = Some(child_set.clone());
        }
    }
    removed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{evaluate, evaluate_tracking, parse_term};

    const T_EDGE: &str = "(add -1 2 (add 1 -1 (oplus (oplus (leaf 1) (leaf 2)) (leaf -1))))";

    fn pos(s: &str) -> Position {
        s.parse().unwrap()
    }

    #[test]
    fn annotate_places_bits() {
        let t = parse_term(T_EDGE).unwrap();
        let sets = AnnotatedSets::new(
            vec![[pos("1.1.1.1")].into(), [pos("1.1.1.2")].into()],
            vec![],
        );
        let a = annotate(&t, &sets).unwrap();
        assert_eq!(
            a.to_sexpr(),
            "(add -1 2 (add 1 -1 (oplus (oplus (leaf 1 10) (leaf 2 01)) (leaf -1))))"
        );
        assert_eq!(AnnotatedSets::read(&a).unwrap(), sets);
        assert!(evaluate(&a).same_graph(&evaluate(&t)));
    }

    #[test]
    fn annotate_rejects_wrong_sort_and_inner_node() {
        let t = parse_term(T_EDGE).unwrap();
        let bad = AnnotatedSets::new(vec![[pos("1.1.2")].into()], vec![]);
        assert!(matches!(annotate(&t, &bad), Err(TermError::SortMismatch { .. })));
        let bad = AnnotatedSets::new(vec![[pos("1")].into()], vec![]);
        assert!(matches!(annotate(&t, &bad), Err(TermError::NotALeaf(_))));
    }

    #[test]
    fn restrict_keeps_selected_leaves() {
        let t = parse_term(T_EDGE).unwrap();
        let x: BTreeSet<_> = [pos("1.1.1.1"), pos("1.1.1.2")].into();
        let r = restrict_to(&t, &x, &BTreeSet::new()).unwrap();
        let s = evaluate(&r);
        assert_eq!(s.num_vertices(), 2);
        assert_eq!(s.num_edges(), 0);
        let all_u: BTreeSet<_> = [pos("1.1.2")].into();
        assert_eq!(restrict_to(&t, &x, &all_u).unwrap(), t);
    }

    #[test]
    fn irredundancy_drops_inner_duplicate() {
        let t = parse_term("(add 1 -1 (add 1 -1 (oplus (leaf 1) (leaf -1))))").unwrap();
        let r = make_irredundant(&t);
        assert_eq!(r.to_sexpr(), "(add 1 -1 (oplus (leaf 1) (leaf -1)))");
        assert!(evaluate_tracking(&r).redundant_adds.is_empty());
    }

    #[test]
    fn irredundancy_sees_through_relab() {
        let t = parse_term(
            "(add 3 -1 (relab 1 3 (add 1 -1 (oplus (oplus (leaf 1) (leaf 3)) (leaf -1)))))",
        )
        .unwrap();
        assert_eq!(evaluate_tracking(&t).redundant_adds.len(), 1);
        let r = make_irredundant(&t);
        assert_eq!(r.len(), t.len() - 1);
        assert!(evaluate_tracking(&r).redundant_adds.is_empty());
        assert_eq!(evaluate(&r).num_edges(), 2);
    }

    #[test]
    fn irredundant_input_unchanged() {
        let t = parse_term(T_EDGE).unwrap();
        assert_eq!(make_irredundant(&t), t);
    }
}
