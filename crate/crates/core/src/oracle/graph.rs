use std::collections::HashMap;
use std::fmt;

use crate::term::{BipartiteStruct, VertexId};

/// A directed graph with loops and parallel edges. Vertices are `0..n` and
/// edge `i` is `edges[i] = (tail, head)`; the file format numbers both
/// from 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("edge {edge} has endpoint {vertex}, but there are {n} vertices")]
    BadEndpoint { edge: usize, vertex: usize, n: usize },
}

/// An e-vertex without exactly one incoming and one outgoing incidence.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("e-vertex {vertex} has indegree {indegree} and outdegree {outdegree}")]
pub struct NotIncidence {
    pub vertex: usize,
    pub indegree: usize,
    pub outdegree: usize,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph { n, edges: Vec::new() }
    }

    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        assert!(edges.iter().all(|&(a, b)| a < n && b < n), "endpoint out of range");
        Digraph { n, edges }
    }

    pub fn add_edge(&mut self, tail: usize, head: usize) -> usize {
        assert!(tail < self.n && head < self.n, "endpoint out of range");
        self.edges.push((tail, head));
        self.edges.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, tail: usize, head: usize) -> bool {
        self.edges.contains(&(tail, head))
    }

    /// `adj[u][v]` is the number of edges `u → v`.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![vec![0; self.n]; self.n];
        for &(a, b) in &self.edges {
            adj[a][b] += 1;
        }
        adj
    }

    /// The same graph with vertex `v` renamed `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Digraph {
        Digraph { n: self.n, edges: self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect() }
    }

    /// True if some vertex bijection maps the edge multiset of `self` onto
    /// that of `other`. Brute force, for small graphs.
    pub fn is_isomorphic(&self, other: &Digraph) -> bool {
        if self.n != other.n || self.edges.len() != other.edges.len() {
            return false;
        }
        let mine = self.adjacency();
        let theirs = other.adjacency();
        let mut perm: Vec<usize> = (0..self.n).collect();
        let mut found = false;
        for_each_permutation(&mut perm, &mut |p| {
            if !found && (0..p.len()).all(|u| (0..p.len()).all(|v| mine[u][v] == theirs[p[u]][p[v]])) {
                found = true;
            }
            found
        });
        found
    }

    /// Equality of edge multisets under a known vertex map.
    pub fn equal_under(&self, other: &Digraph, map: &[usize]) -> bool {
        if self.n != other.n || self.edges.len() != other.edges.len() {
            return false;
        }
        let mut a: Vec<(usize, usize)> = self.edges.iter().map(|&(x, y)| (map[x], map[y])).collect();
        let mut b = other.edges.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    pub fn parse(text: &str) -> Result<Digraph, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: &str| GraphError::Syntax { line, msg: msg.to_string() };
            let words: Vec<&str> = raw.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(&format!("bad number '{s}'")));
            match words.as_slice() {
                [] | ["c", ..] => {}
                ["p", "digraph", n, m] => {
                    if header.is_some() {
                        return Err(err("second header"));
                    }
                    header = Some((num(n)?, num(m)?));
                }
                ["a", id, tail, head] => {
                    let Some((n, _)) = header else { return Err(err("edge before header")) };
                    let (id, tail, head) = (num(id)?, num(tail)?, num(head)?);
                    if id != edges.len() + 1 {
                        return Err(err(&format!("expected edge id {}", edges.len() + 1)));
                    }
                    for v in [tail, head] {
                        if v == 0 || v > n {
                            return Err(GraphError::BadEndpoint { edge: id, vertex: v, n });
                        }
                    }
                    edges.push((tail - 1, head - 1));
                }
                _ => return Err(err("expected 'p digraph <n> <m>', 'a <id> <tail> <head>' or 'c ...'")),
            }
        }
        let (n, m) = header.ok_or(GraphError::Syntax { line: 1, msg: "missing header".into() })?;
        if m != edges.len() {
            return Err(GraphError::Syntax {
                line: text.lines().count(),
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Ok(Digraph { n, edges })
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p digraph {} {}", self.n, self.edges.len())?;
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            writeln!(f, "a {} {} {}", i + 1, a + 1, b + 1)?;
        }
        Ok(())
    }
}

/// Heap's algorithm; stops when `f` returns true.
pub(crate) fn for_each_permutation(items: &mut [usize], f: &mut impl FnMut(&[usize]) -> bool) {
    let n = items.len();
    if f(items) {
        return;
    }
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            if f(items) {
                return;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// `G` with `Inc(G) = s`, and where each v-vertex and e-vertex went.
#[derive(Clone, Debug)]
pub struct Incidence {
    pub graph: Digraph,
    pub vertex_of: HashMap<VertexId, usize>,
    pub edge_of: HashMap<VertexId, usize>,
}

/// Reconstructs the graph of an incidence structure. Vertices and edges are
/// numbered in increasing leaf order.
pub fn graph_of_incidence(s: &BipartiteStruct) -> Result<Incidence, NotIncidence> {
    let mut vertex_of = HashMap::new();
    let mut edge_of = HashMap::new();
    for (v, label) in s.vertices() {
        if label.is_vertex() {
            vertex_of.insert(v, vertex_of.len());
        } else {
            edge_of.insert(v, edge_of.len());
        }
    }
    let mut ends: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), Vec::new()); edge_of.len()];
    for (x, y) in s.edges() {
        if let Some(&e) = edge_of.get(&y) {
            ends[e].0.push(vertex_of[&x]);
        } else {
            ends[edge_of[&x]].1.push(vertex_of[&y]);
        }
    }
    let mut g = Digraph::new(vertex_of.len());
    let mut by_index: Vec<(usize, VertexId)> = edge_of.iter().map(|(&v, &i)| (i, v)).collect();
    by_index.sort_unstable();
    for (i, v) in by_index {
        match (&ends[i].0[..], &ends[i].1[..]) {
            ([t], [h]) => {
                g.add_edge(*t, *h);
            }
            (ins, outs) => {
                return Err(NotIncidence {
                    vertex: v.index(),
                    indegree: ins.len(),
                    outdegree: outs.len(),
                })
            }
        }
    }
    Ok(Incidence { graph: g, vertex_of, edge_of })
}
