use rand::seq::SliceRandom;
use rand::Rng;

use super::decomposition::TreeDecomposition;
use crate::oracle::{rng_for, Digraph};

/// A random partial k-tree on `n` vertices with its width-`k`
/// decomposition. The k-tree is grown by attaching each new vertex to a
/// k-clique of an existing bag; each of its edges is kept with probability
/// `density` and oriented at random.
pub fn gen_partial_ktree(k: usize, n: usize, density: f64, seed: u64) -> (Digraph, TreeDecomposition) {
    assert!(k >= 1 && n >= 1, "need k >= 1 and n >= 1");
    let density = density.clamp(0.0, 1.0);
    let mut rng = rng_for(seed);
    let mut g = Digraph::new(n);
    let keep = |g: &mut Digraph, rng: &mut rand_chacha::ChaCha8Rng, x: usize, y: usize| {
        if rng.gen_bool(density) {
            if rng.gen_bool(0.5) {
                g.add_edge(x, y);
            } else {
                g.add_edge(y, x);
            }
        }
    };
    let first = n.min(k + 1);
    for x in 0..first {
        for y in x + 1..first {
            keep(&mut g, &mut rng, x, y);
        }
    }
    let mut bags = vec![(0..first).collect::<Vec<_>>()];
    let mut tree = Vec::new();
    for v in first..n {
        let at = rng.gen_range(0..bags.len());
        let mut clique = bags[at].clone();
        let drop = rng.gen_range(0..clique.len());
        clique.remove(drop);
        for &u in &clique {
            keep(&mut g, &mut rng, u, v);
        }
        clique.push(v);
        tree.push((at, bags.len()));
        bags.push(clique);
    }
    // shuffle edge order so that edge ids carry no structure
    let mut edges = g.edges().to_vec();
    edges.shuffle(&mut rng);
    let g = Digraph::from_edges(n, edges);
    let td = TreeDecomposition::new(n, k, bags, tree).expect("k-tree decomposition is valid");
    (g, td)
}

/// Bags `{0, i, i+1}` for `i = 1..n-2`, in a path: width 2 for every `n`.
fn fan_td(n: usize) -> TreeDecomposition {
    let (bags, tree) = if n <= 3 {
        (vec![(0..n).collect()], vec![])
    } else {
        ((1..n - 1).map(|i| vec![0, i, i + 1]).collect(), (1..n - 2).map(|i| (i - 1, i)).collect())
    };
    TreeDecomposition::new(n, 2, bags, tree).expect("fan decomposition is valid")
}

/// The directed cycle `0 -> 1 -> ... -> n-1 -> 0` with a width-2
/// decomposition.
pub fn dicycle_with_td(n: usize) -> (Digraph, TreeDecomposition) {
    assert!(n >= 1);
    let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
    (Digraph::from_edges(n, edges), fan_td(n))
}

/// The directed path `0 -> 1 -> ... -> n-1` with the same decomposition
/// as [`dicycle_with_td`].
pub fn dipath_with_td(n: usize) -> (Digraph, TreeDecomposition) {
    assert!(n >= 1);
    let edges = (0..n - 1).map(|i| (i, i + 1)).collect();
    (Digraph::from_edges(n, edges), fan_td(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::td::{parse_td, td_to_term};

    #[test]
    fn ktrees_are_valid_and_deterministic() {
        for k in 1..=3 {
            for n in [1, 2, k + 1, 12] {
                let (g, td) = gen_partial_ktree(k, n, 0.7, 3);
                td.validate(&g).unwrap();
                assert_eq!(parse_td(&td.to_string()).unwrap(), td);
                assert_eq!(gen_partial_ktree(k, n, 0.7, 3), (g, td));
            }
        }
    }

    #[test]
    fn k1_gives_a_tree() {
        let (g, td) = gen_partial_ktree(1, 10, 1.0, 8);
        assert_eq!(g.num_edges(), 9);
        assert!(td.bags().iter().all(|b| b.len() == 2));
    }

    #[test]
    fn density_zero_is_edgeless() {
        let (g, td) = gen_partial_ktree(2, 9, 0.0, 1);
        assert_eq!(g.num_edges(), 0);
        td.validate(&g).unwrap();
    }

    #[test]
    fn cycle_and_path_compile() {
        for n in [1, 2, 3, 4, 7] {
            for (g, td) in [dicycle_with_td(n), dipath_with_td(n)] {
                let c = td_to_term(&g, &td).unwrap();
                assert!(c.reconstructs(&g));
                assert!(c.d_used <= 7);
            }
        }
    }
}
