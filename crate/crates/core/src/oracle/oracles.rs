//! Brute-force semantics, computed from `val(t)` and the reconstructed
//! graph without any automaton code.

use std::collections::{BTreeSet, HashMap};

use super::graph::{for_each_permutation, graph_of_incidence, Digraph, Incidence, NotIncidence};
use crate::term::{evaluate, evaluate_tracking, BipartiteStruct, Symbol, Term, VertexId};

/// Largest vertex count the permutation oracle for Hamiltonicity accepts.
pub const DIRHAM_CAP: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    NotIncidence(#[from] NotIncidence),
    #[error("graph has {n} vertices, over the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("no oracle named '{0}'")]
    Unknown(String),
    #[error("term has annotation widths {found:?}, oracle needs {expected:?}")]
    Widths { expected: (usize, usize), found: (usize, usize) },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkMode {
    EE,
    AE,
    AA,
    EA,
}

/// Every e-vertex has indegree and outdegree 1.
pub fn oracle_correct(t: &Term) -> bool {
    let s = evaluate(t);
    let deg = s.degrees();
    let ok = s.vertices().all(|(v, l)| l.is_vertex() || deg[&v] == (1, 1));
    ok
}

/// No `add` tries to create an edge that already exists.
pub fn oracle_irredundant(t: &Term) -> bool {
    evaluate_tracking(t).redundant_adds.is_empty()
}

pub fn oracle_edge(g: &Digraph, x: &BTreeSet<usize>, y: &BTreeSet<usize>) -> bool {
    match (single(x), single(y)) {
        (Some(a), Some(b)) => g.has_edge(a, b),
        _ => false,
    }
}

/// `X = {x}`, `U = {u}` and `u` leaves `x` (`tail`) or enters it.
pub fn oracle_inc(g: &Digraph, x: &BTreeSet<usize>, u: &BTreeSet<usize>, tail: bool) -> bool {
    match (single(x), single(u)) {
        (Some(a), Some(e)) => {
            let (t, h) = g.edges()[e];
            if tail {
                t == a
            } else {
                h == a
            }
        }
        _ => false,
    }
}

pub fn oracle_link(g: &Digraph, x: &BTreeSet<usize>, y: &BTreeSet<usize>, mode: LinkMode) -> bool {
    let linked = |a: usize, b: usize| g.has_edge(a, b);
    match mode {
        LinkMode::EE => x.iter().any(|&a| y.iter().any(|&b| linked(a, b))),
        LinkMode::AE => x.iter().all(|&a| y.iter().any(|&b| linked(a, b))),
        LinkMode::AA => x.iter().all(|&a| y.iter().all(|&b| linked(a, b))),
        LinkMode::EA => x.iter().any(|&a| y.iter().all(|&b| linked(a, b))),
    }
}

/// Both ends of every selected edge are selected vertices.
pub fn oracle_subgraph(g: &Digraph, x: &BTreeSet<usize>, u: &BTreeSet<usize>) -> bool {
    u.iter().all(|&e| {
        let (t, h) = g.edges()[e];
        x.contains(&t) && x.contains(&h)
    })
}

/// The structure is a single directed cycle, or has no vertices.
pub fn is_single_cycle(s: &BipartiteStruct) -> bool {
    let n = s.num_vertices();
    if n == 0 {
        return true;
    }
    let deg = s.degrees();
    if deg.values().any(|&d| d != (1, 1)) {
        return false;
    }
    let next: HashMap<VertexId, VertexId> = s.edges().collect();
    let start = s.vertices().next().expect("nonempty").0;
    let mut v = next[&start];
    let mut steps = 1;
    while v != start {
        v = next[&v];
        steps += 1;
    }
    steps == n
}

/// Directed Hamiltonian cycle by enumerating vertex orders. The empty
/// graph counts as Hamiltonian and a single vertex needs a loop.
pub fn oracle_dirham(g: &Digraph, cap: usize) -> Result<bool, OracleError> {
    let n = g.num_vertices();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    if n == 0 {
        return Ok(true);
    }
    let adj = g.adjacency();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut found = false;
    for_each_permutation(&mut rest, &mut |p| {
        let mut prev = 0;
        let mut ok = true;
        for &v in p {
            if adj[prev][v] == 0 {
                ok = false;
                break;
            }
            prev = v;
        }
        if ok && adj[prev][0] > 0 {
            found = true;
        }
        found
    });
    Ok(found)
}

/// Same property by enumerating edge subsets that form one cycle through
/// every vertex.
pub fn oracle_dirham_subsets(g: &Digraph) -> bool {
    let (n, m) = (g.num_vertices(), g.num_edges());
    if n == 0 {
        return true;
    }
    assert!(m < 24, "too many edges to enumerate subsets");
    (0u32..1 << m).filter(|mask| mask.count_ones() as usize == n).any(|mask| {
        let chosen: Vec<(usize, usize)> =
            (0..m).filter(|i| mask >> i & 1 == 1).map(|i| g.edges()[i]).collect();
        let mut next = vec![usize::MAX; n];
        let mut indeg = vec![0; n];
        for &(a, b) in &chosen {
            if next[a] != usize::MAX {
                return false;
            }
            next[a] = b;
            indeg[b] += 1;
        }
        if indeg.iter().any(|&d| d != 1) {
            return false;
        }
        let (mut v, mut steps) = (next[0], 1);
        while v != 0 {
            v = next[v];
            steps += 1;
        }
        steps == n
    })
}

fn single(s: &BTreeSet<usize>) -> Option<usize> {
    (s.len() == 1).then(|| *s.iter().next().unwrap())
}

/// The set variables of an annotated correct term, as vertex and edge
/// indices of the reconstructed graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphSets {
    pub vertex_sets: Vec<BTreeSet<usize>>,
    pub edge_sets: Vec<BTreeSet<usize>>,
}

pub fn graph_sets(t: &Term, inc: &Incidence) -> GraphSets {
    let mut out = GraphSets::default();
    for id in t.leaves() {
        let Symbol::Leaf { label, ann } = *t.symbol(id) else { unreachable!() };
        let (sets, index) = if label.is_vertex() {
            (&mut out.vertex_sets, inc.vertex_of[&id])
        } else {
            (&mut out.edge_sets, inc.edge_of[&id])
        };
        if sets.len() < ann.len() {
            sets.resize(ann.len(), BTreeSet::new());
        }
        for i in 0..ann.len() {
            if ann.get(i) {
                sets[i].insert(index);
            }
        }
    }
    out
}

/// Widths the oracle for `id` reads.
pub fn oracle_widths(id: &str) -> Option<(usize, usize)> {
    Some(match id {
        "irr" | "ct" | "ham-core" | "dirham" => (0, 0),
        "inc-xu" | "inc-uy" | "subgraph" => (1, 1),
        "edg" | "composed-edg" | "link-ee" | "link-ae" | "link-aa" | "link-ea" => (2, 0),
        _ => return None,
    })
}

/// The oracle matching registered automaton `id`, on an annotated term.
pub fn oracle_for(id: &str, t: &Term) -> Result<bool, OracleError> {
    let expected = oracle_widths(id).ok_or_else(|| OracleError::Unknown(id.to_string()))?;
    let (p, m) = t.widths().unwrap_or((None, None));
    let found = (p.unwrap_or(expected.0), m.unwrap_or(expected.1));
    if found != expected {
        return Err(OracleError::Widths { expected, found });
    }
    match id {
        "irr" => return Ok(oracle_irredundant(t)),
        "ct" => return Ok(oracle_correct(t)),
        "ham-core" => return Ok(is_single_cycle(&evaluate(t))),
        _ => {}
    }
    let inc = graph_of_incidence(&evaluate(t))?;
    let g = &inc.graph;
    let sets = graph_sets(t, &inc);
    let v = |i: usize| sets.vertex_sets.get(i).cloned().unwrap_or_default();
    let e = |i: usize| sets.edge_sets.get(i).cloned().unwrap_or_default();
    Ok(match id {
        "dirham" => oracle_dirham(g, DIRHAM_CAP)?,
        "inc-xu" => oracle_inc(g, &v(0), &e(0), true),
        "inc-uy" => oracle_inc(g, &v(0), &e(0), false),
        "subgraph" => oracle_subgraph(g, &v(0), &e(0)),
        "edg" | "composed-edg" => oracle_edge(g, &v(0), &v(1)),
        "link-ee" => oracle_link(g, &v(0), &v(1), LinkMode::EE),
        "link-ae" => oracle_link(g, &v(0), &v(1), LinkMode::AE),
        "link-aa" => oracle_link(g, &v(0), &v(1), LinkMode::AA),
        "link-ea" => oracle_link(g, &v(0), &v(1), LinkMode::EA),
        _ => unreachable!("widths known"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn annotated_edge() {
        let t = parse_term("(add -1 2 (add 1 -1 (oplus (oplus (leaf 1 10) (leaf 2 01)) (leaf -1))))")
            .unwrap();
        assert_eq!(oracle_for("edg", &t), Ok(true));
        let rev = parse_term("(add -1 2 (add 1 -1 (oplus (oplus (leaf 1 01) (leaf 2 10)) (leaf -1))))")
            .unwrap();
        assert_eq!(oracle_for("edg", &rev), Ok(false));
    }

    #[test]
    fn vacuous_links() {
        let g = Digraph::from_edges(2, vec![(0, 1)]);
        let none = set(&[]);
        assert!(oracle_link(&g, &none, &none, LinkMode::AA));
        assert!(!oracle_link(&g, &none, &none, LinkMode::EE));
        assert!(oracle_link(&g, &none, &set(&[1]), LinkMode::AE));
        assert!(!oracle_link(&g, &none, &set(&[1]), LinkMode::EA));
    }

    #[test]
    fn hamiltonian_cycles() {
        let c3 = Digraph::from_edges(3, vec![(0, 1), (1, 2), (2, 0)]);
        let p3 = Digraph::from_edges(3, vec![(0, 1), (1, 2)]);
        let chord = Digraph::from_edges(3, vec![(0, 1), (1, 2), (2, 0), (0, 2)]);
        assert_eq!(oracle_dirham(&c3, 9), Ok(true));
        assert_eq!(oracle_dirham(&p3, 9), Ok(false));
        assert_eq!(oracle_dirham(&chord, 9), Ok(true));
        assert_eq!(oracle_dirham(&Digraph::new(1), 9), Ok(false));
        assert_eq!(oracle_dirham(&Digraph::from_edges(1, vec![(0, 0)]), 9), Ok(true));
        assert!(matches!(oracle_dirham(&Digraph::new(10), 9), Err(OracleError::TooLarge { .. })));
        for g in [&c3, &p3, &chord] {
            assert_eq!(oracle_dirham_subsets(g), oracle_dirham(g, 9).unwrap());
        }
    }

    #[test]
    fn incorrect_term_is_reported() {
        let t = parse_term("(add 1 -1 (oplus (leaf 1) (leaf -1)))").unwrap();
        assert!(!oracle_correct(&t));
        assert!(matches!(oracle_for("dirham", &t), Err(OracleError::NotIncidence(_))));
    }
}
