use super::decomposition::{TdError, TreeDecomposition};
use crate::label::Label;
use crate::oracle::{graph_of_incidence, Digraph};
use crate::term::{evaluate, NodeId, Term, TermBuilder};

/// Node count of a compiled term is at most
/// `SIZE_FACTOR * (|V| + |E| + bags) + 1`.
pub const SIZE_FACTOR: usize = 7;

/// A compiled term with its leaf correspondence.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub term: Term,
    /// Leaf of each vertex of the input graph.
    pub vertex_leaf: Vec<NodeId>,
    /// Leaf of each edge of the input graph.
    pub edge_leaf: Vec<NodeId>,
    pub width: usize,
    pub c_used: usize,
    pub d_used: usize,
}

impl Compiled {
    pub fn d_budget(&self) -> usize {
        2 * self.width + 3
    }

    pub fn size_bound(g: &Digraph, td: &TreeDecomposition) -> usize {
        SIZE_FACTOR * (g.num_vertices() + g.num_edges() + td.bags().len()) + 1
    }

    /// True if the term denotes `Inc(g)` with vertex and edge `i` at the
    /// recorded leaves.
    pub fn reconstructs(&self, g: &Digraph) -> bool {
        let Ok(inc) = graph_of_incidence(&evaluate(&self.term)) else { return false };
        if inc.graph.num_vertices() != g.num_vertices() || inc.graph.num_edges() != g.num_edges() {
            return false;
        }
        let vmap: Option<Vec<usize>> = self.vertex_leaf.iter().map(|id| inc.vertex_of.get(id).copied()).collect();
        let Some(vmap) = vmap else { return false };
        g.edges().iter().zip(&self.edge_leaf).all(|(&(t, h), id)| {
            inc.edge_of.get(id).is_some_and(|&e| inc.graph.edges()[e] == (vmap[t], vmap[h]))
        })
    }
}

const NEW: Label = Label::vertex(1);
const OLD: Label = Label::vertex(2);

/// Edge label of an edge waiting for the vertex in `slot` as its tail
/// (`head == false`) or head.
fn waiting(slot: usize, head: bool) -> Label {
    Label::edge((2 * slot + 1 + head as usize) as u32)
}

fn done(width: usize) -> Label {
    Label::edge((2 * width + 3) as u32)
}

/// Compiles `g` and a decomposition of it into a correct irredundant term
/// denoting `Inc(g)`.
///
/// Each vertex is created at the topmost bag containing it, with label 1,
/// and relabelled 2 once connected. An edge is created when its first
/// endpoint is, attached to it at once, and then waits for the other
/// endpoint under the label of that endpoint's bag slot and role. Slots are
/// assigned top-down, smallest free slot first, so vertices sharing a bag
/// never share a slot.
pub fn td_to_term(g: &Digraph, td: &TreeDecomposition) -> Result<Compiled, TdError> {
    td.validate(g)?;
    let n = g.num_vertices();
    let width = td.width();
    let bags = td.bags();
    if bags.is_empty() {
        let term = Term::empty();
        return Ok(Compiled { term, vertex_leaf: vec![], edge_leaf: vec![], width, c_used: 0, d_used: 0 });
    }

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); bags.len()];
    for &(a, b) in td.tree_edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    // Top-down order from bag 0, with parents.
    let mut parent = vec![usize::MAX; bags.len()];
    let mut order = vec![0];
    parent[0] = 0;
    let mut i = 0;
    while i < order.len() {
        let b = order[i];
        i += 1;
        let mut next: Vec<usize> = adj[b].iter().copied().filter(|&c| parent[c] == usize::MAX).collect();
        next.sort_unstable();
        for c in next {
            parent[c] = b;
            order.push(c);
        }
    }

    // Slots and the bag where each vertex is created.
    let mut slot = vec![usize::MAX; n];
    let mut top = vec![usize::MAX; n];
    for &b in &order {
        let inherited: Vec<usize> = if b == 0 { vec![] } else { bags[parent[b]].clone() };
        let mut used: Vec<bool> = vec![false; width + 1];
        for &v in &bags[b] {
            if inherited.binary_search(&v).is_ok() {
                used[slot[v]] = true;
            }
        }
        for &v in &bags[b] {
            if inherited.binary_search(&v).is_err() {
                let s = used.iter().position(|u| !u).expect("bag within width");
                used[s] = true;
                slot[v] = s;
                top[v] = b;
            }
        }
    }
    let mut created_at: Vec<Vec<usize>> = vec![Vec::new(); bags.len()];
    for v in 0..n {
        created_at[top[v]].push(v);
    }

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(t, h)) in g.edges().iter().enumerate() {
        incident[t].push(e);
        if h != t {
            incident[h].push(e);
        }
    }

    let children = |b: usize| -> Vec<usize> {
        let mut kids: Vec<usize> = adj[b].iter().copied().filter(|&c| c != 0 && parent[c] == b).collect();
        kids.sort_unstable();
        kids
    };

    // Post-order over the tree: children before parents.
    let mut post = Vec::with_capacity(bags.len());
    let mut stack = vec![(0usize, false)];
    while let Some((b, expanded)) = stack.pop() {
        if expanded {
            post.push(b);
            continue;
        }
        stack.push((b, true));
        for &c in children(b).iter().rev() {
            stack.push((c, false));
        }
    }

    let mut builder = TermBuilder::new();
    let mut produced = vec![false; bags.len()];
    let mut created = vec![false; n];
    // Edges waiting for each vertex as tail and as head.
    let mut waiting_for = vec![[0usize; 2]; n];
    let mut vertex_leaf = vec![NodeId::new(0); n];
    let mut edge_leaf = vec![NodeId::new(0); g.num_edges()];
    let lab_err = |e: crate::term::TermError| -> TdError { unreachable!("labels are well-sorted: {e}") };

    for &b in &post {
        let mut have = false;
        for c in children(b) {
            if produced[c] {
                if have {
                    builder.oplus();
                }
                have = true;
            }
        }
        for &x in &created_at[b] {
            vertex_leaf[x] = builder.leaf(NEW);
            if have {
                builder.oplus();
            }
            have = true;
            let s = slot[x];
            for head in [false, true] {
                let l = waiting(s, head);
                if waiting_for[x][head as usize] > 0 {
                    if head {
                        builder.add(l, NEW).map_err(lab_err)?;
                    } else {
                        builder.add(NEW, l).map_err(lab_err)?;
                    }
                    builder.relab(l, done(width)).map_err(lab_err)?;
                }
            }
            for &e in &incident[x] {
                let (t, h) = g.edges()[e];
                let other = if t == x { h } else { t };
                if other != x && created[other] {
                    continue;
                }
                // x is the tail unless the edge comes in from another vertex
                let x_head = h == x && t != x;
                let l = waiting(s, x_head);
                edge_leaf[e] = builder.leaf(l);
                builder.oplus();
                if x_head {
                    builder.add(l, NEW).map_err(lab_err)?;
                } else {
                    builder.add(NEW, l).map_err(lab_err)?;
                }
                if other == x {
                    builder.add(l, NEW).map_err(lab_err)?;
                    builder.relab(l, done(width)).map_err(lab_err)?;
                } else {
                    let target = waiting(slot[other], !x_head);
                    builder.relab(l, target).map_err(lab_err)?;
                    waiting_for[other][!x_head as usize] += 1;
                }
            }
            builder.relab(NEW, OLD).map_err(lab_err)?;
            created[x] = true;
        }
        produced[b] = have;
    }
    let term = builder.finish_all();
    let labels = term.labels();
    let c_used = labels.iter().filter(|l| l.is_vertex()).count();
    let d_used = labels.iter().filter(|l| l.is_edge()).count();
    Ok(Compiled { term, vertex_leaf, edge_leaf, width, c_used, d_used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_correct, oracle_irredundant};
    use crate::td::parse_td;

    fn compile(g: &Digraph, td: &str) -> Compiled {
        let c = td_to_term(g, &parse_td(td).unwrap()).unwrap();
        assert!(c.reconstructs(g), "{}", c.term);
        assert!(oracle_correct(&c.term) && oracle_irredundant(&c.term), "{}", c.term);
        assert!(c.c_used <= 2 && c.d_used <= c.d_budget());
        c
    }

    #[test]
    fn single_vertex() {
        let c = compile(&Digraph::new(1), "s td 1 1 1\nb 1 1\n");
        assert_eq!(c.term.leaves().count(), 1);
        assert_eq!(c.d_used, 0);
    }

    #[test]
    fn single_edge() {
        let g = Digraph::from_edges(2, vec![(0, 1)]);
        let c = compile(&g, "s td 1 2 2\nb 1 1 2\n");
        assert!(c.d_used <= 5);
    }

    #[test]
    fn p4_with_loops_and_parallels() {
        let g = Digraph::from_edges(4, vec![(0, 1), (2, 1), (2, 3), (3, 2), (1, 1), (0, 1)]);
        let c = compile(&g, "s td 3 2 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\n1 2\n2 3\n");
        assert!(c.d_used <= 5);
    }

    #[test]
    fn branching_tree() {
        // star-shaped decomposition rooted in the middle bag
        let g = Digraph::from_edges(5, vec![(0, 1), (1, 2), (3, 1), (4, 1), (2, 0)]);
        compile(&g, "s td 3 3 5\nb 1 1 2 3\nb 2 2 4\nb 3 2 5\n1 2\n1 3\n");
    }

    #[test]
    fn edgeless_forest_of_bags() {
        compile(&Digraph::new(3), "s td 3 1 3\nb 1 1\nb 2 2\nb 3 3\n1 2\n1 3\n");
    }

    #[test]
    fn invalid_td_is_rejected() {
        let g = Digraph::from_edges(3, vec![(0, 2)]);
        let td = parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap();
        assert!(matches!(td_to_term(&g, &td), Err(TdError::EdgeCover { .. })));
    }
}
