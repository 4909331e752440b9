use std::collections::BTreeSet;
use std::fmt;

use crate::oracle::Digraph;

/// A tree decomposition. Bags and vertices are 0-based internally and
/// 1-based in the PACE text format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Sorted vertex lists.
    bags: Vec<Vec<usize>>,
    tree: Vec<(usize, usize)>,
    /// Declared width: every bag has at most `width + 1` vertices.
    width: usize,
    vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TdError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("coverage: vertex {vertex} is in no bag")]
    Coverage { vertex: usize },
    #[error("edge cover: no bag contains both ends of edge {edge} ({tail} -> {head})")]
    EdgeCover { edge: usize, tail: usize, head: usize },
    #[error("connectivity: the bags containing vertex {vertex} do not form a subtree")]
    Connectivity { vertex: usize },
    #[error("width: bag {bag} has {size} vertices but the declared width is {width}")]
    Width { bag: usize, size: usize, width: usize },
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("decomposition is for {td} vertices but the graph has {graph}")]
    VertexCount { td: usize, graph: usize },
}

impl TreeDecomposition {
    /// Builds and checks a decomposition of a graph on `vertices` vertices.
    /// Edge cover is checked separately by [`TreeDecomposition::validate`].
    pub fn new(
        vertices: usize,
        width: usize,
        bags: Vec<Vec<usize>>,
        tree: Vec<(usize, usize)>,
    ) -> Result<Self, TdError> {
        let bags: Vec<Vec<usize>> = bags
            .into_iter()
            .map(|b| b.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
            .collect();
        let td = TreeDecomposition { bags, tree, width, vertices };
        td.check_shape()?;
        Ok(td)
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices
    }

    /// Largest bag size minus one (0 for no bags).
    pub fn actual_width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    fn check_shape(&self) -> Result<(), TdError> {
        let nb = self.bags.len();
        for (i, b) in self.bags.iter().enumerate() {
            if b.len() > self.width + 1 {
                return Err(TdError::Width { bag: i + 1, size: b.len(), width: self.width });
            }
            if let Some(&v) = b.iter().find(|&&v| v >= self.vertices) {
                return Err(TdError::NotATree(format!("bag {} mentions vertex {}", i + 1, v + 1)));
            }
        }
        if nb == 0 {
            return match self.vertices {
                0 => Ok(()),
                _ => Err(TdError::Coverage { vertex: 1 }),
            };
        }
        if self.tree.len() != nb - 1 {
            return Err(TdError::NotATree(format!("{} bags need {} tree edges, found {}", nb, nb - 1, self.tree.len())));
        }
        let mut parent: Vec<usize> = (0..nb).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.tree {
            if a >= nb || b >= nb {
                return Err(TdError::NotATree(format!("tree edge mentions bag {}", a.max(b) + 1)));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(TdError::NotATree(format!("tree edge {} {} closes a cycle", a + 1, b + 1)));
            }
            parent[ra] = rb;
        }
        // In a tree, a vertex's bags are connected iff they span one fewer
        // tree edge than there are of them.
        let mut bags_of = vec![0usize; self.vertices];
        let mut edges_of = vec![0usize; self.vertices];
        for b in &self.bags {
            for &v in b {
                bags_of[v] += 1;
            }
        }
        for &(a, b) in &self.tree {
            for v in intersection(&self.bags[a], &self.bags[b]) {
                edges_of[v] += 1;
            }
        }
        for v in 0..self.vertices {
            if bags_of[v] == 0 {
                return Err(TdError::Coverage { vertex: v + 1 });
            }
            if edges_of[v] + 1 != bags_of[v] {
                return Err(TdError::Connectivity { vertex: v + 1 });
            }
        }
        Ok(())
    }

    /// Checks that this is a decomposition of `g`.
    pub fn validate(&self, g: &Digraph) -> Result<(), TdError> {
        if self.vertices != g.num_vertices() {
            return Err(TdError::VertexCount { td: self.vertices, graph: g.num_vertices() });
        }
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for b in &self.bags {
            for (i, &x) in b.iter().enumerate() {
                for &y in &b[i..] {
                    pairs.insert((x, y));
                }
            }
        }
        for (i, &(t, h)) in g.edges().iter().enumerate() {
            if !pairs.contains(&(t.min(h), t.max(h))) {
                return Err(TdError::EdgeCover { edge: i + 1, tail: t + 1, head: h + 1 });
            }
        }
        Ok(())
    }
}

fn intersection<'a>(a: &'a [usize], b: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
    a.iter().copied().filter(move |v| b.binary_search(v).is_ok())
}

/// Parses the PACE 2017 `.td` format and checks coverage, connectivity
/// and width.
pub fn parse_td(text: &str) -> Result<TreeDecomposition, TdError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut tree = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| TdError::Syntax { line, msg };
        let words: Vec<&str> = raw.split_whitespace().collect();
        let nums = |ws: &[&str]| -> Result<Vec<usize>, TdError> {
            ws.iter().map(|w| w.parse::<usize>().map_err(|_| err(format!("bad number '{w}'")))).collect()
        };
        match words.as_slice() {
            [] | ["c", ..] => {}
            ["s", "td", rest @ ..] => {
                if header.is_some() {
                    return Err(err("second header".into()));
                }
                match nums(rest)?.as_slice() {
                    &[nb, size, n] => {
                        header = Some((nb, size, n));
                        bags = vec![None; nb];
                    }
                    _ => return Err(err("header must be 's td <bags> <max bag size> <vertices>'".into())),
                }
            }
            ["b", rest @ ..] => {
                let Some((nb, _, n)) = header else { return Err(err("bag before header".into())) };
                let v = nums(rest)?;
                let (&id, members) = v.split_first().ok_or_else(|| err("bag without id".into()))?;
                if id == 0 || id > nb {
                    return Err(err(format!("bag id {id} out of range 1..={nb}")));
                }
                if bags[id - 1].is_some() {
                    return Err(err(format!("bag {id} given twice")));
                }
                if let Some(&x) = members.iter().find(|&&x| x == 0 || x > n) {
                    return Err(err(format!("vertex {x} out of range 1..={n}")));
                }
                bags[id - 1] = Some(members.iter().map(|x| x - 1).collect());
            }
            _ => {
                let Some((nb, _, _)) = header else { return Err(err("tree edge before header".into())) };
                match *nums(&words)?.as_slice() {
                    [a, b] if (1..=nb).contains(&a) && (1..=nb).contains(&b) => tree.push((a - 1, b - 1)),
                    [_, _] => return Err(err("tree edge mentions an unknown bag".into())),
                    _ => return Err(err(format!("unexpected line '{raw}'"))),
                }
            }
        }
    }
    let (_, size, n) = header.ok_or(TdError::Syntax { line: 0, msg: "missing header".into() })?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or(TdError::Syntax { line: 0, msg: format!("bag {} missing", i + 1) }))
        .collect::<Result<Vec<_>, _>>()?;
    TreeDecomposition::new(n, size.saturating_sub(1), bags, tree)
}

impl fmt::Display for TreeDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "s td {} {} {}", self.bags.len(), self.width + 1, self.vertices)?;
        for (i, b) in self.bags.iter().enumerate() {
            write!(f, "b {}", i + 1)?;
            for v in b {
                write!(f, " {}", v + 1)?;
            }
            writeln!(f)?;
        }
        for (a, b) in &self.tree {
            writeln!(f, "{} {}", a + 1, b + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_in_one_bag() {
        let td = parse_td("c triangle\ns td 1 3 3\nb 1 1 2 3\n").unwrap();
        assert_eq!(td.width(), 2);
        let g = Digraph::from_edges(3, vec![(0, 1), (1, 2), (2, 0)]);
        td.validate(&g).unwrap();
    }

    #[test]
    fn path_decomposition_of_p4() {
        let td = parse_td("s td 3 2 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\n1 2\n2 3\n").unwrap();
        assert_eq!(td.width(), 1);
        let g = Digraph::from_edges(4, vec![(0, 1), (1, 2), (2, 3)]);
        td.validate(&g).unwrap();
    }

    #[test]
    fn missing_edge_pair_is_edge_cover_error() {
        let td = parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap();
        let g = Digraph::from_edges(3, vec![(0, 2)]);
        assert!(matches!(td.validate(&g), Err(TdError::EdgeCover { edge: 1, tail: 1, head: 3 })));
    }

    #[test]
    fn invariant_violations_are_named() {
        let cases = [
            ("s td 1 2 3\nb 1 1 2\n", "coverage"),
            ("s td 3 2 3\nb 1 1 2\nb 2 3\nb 3 1\n1 2\n2 3\n", "connectivity"),
            ("s td 1 2 3\nb 1 1 2 3\n", "width"),
            ("s td 2 2 2\nb 1 1\nb 2 2\n", "not a tree"),
            ("s td 1 2 2\nb 1 1 5\n", "line 2"),
        ];
        for (text, needle) in cases {
            let e = parse_td(text).unwrap_err().to_string();
            assert!(e.contains(needle), "{text:?}: {e}");
        }
    }

    #[test]
    fn display_round_trips() {
        let text = "s td 3 2 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\n1 2\n2 3\n";
        let td = parse_td(text).unwrap();
        assert_eq!(td.to_string(), text);
        assert_eq!(parse_td(&td.to_string()).unwrap(), td);
    }

    #[test]
    fn empty_decomposition() {
        let td = parse_td("s td 0 0 0\n").unwrap();
        td.validate(&Digraph::new(0)).unwrap();
    }
}
