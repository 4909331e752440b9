//! Seeded generators for graphs, terms and annotations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::{graph_of_incidence, Digraph};
use super::oracles::{oracle_correct, oracle_irredundant};
use crate::label::Label;
use crate::term::{evaluate, Annotation, AnnotatedSets, NodeId, Position, Term, TermBuilder};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Inclusive range of vertex counts.
    pub vertices: (usize, usize),
    /// Inclusive range of edge counts.
    pub edges: (usize, usize),
    /// Number of C-labels available.
    pub vertex_labels: usize,
    /// Number of D-labels available.
    pub edge_labels: usize,
    pub widths: (usize, usize),
    pub loops: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            vertices: (0, 7),
            edges: (0, 10),
            vertex_labels: 6,
            edge_labels: 6,
            widths: (0, 0),
            loops: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("no term within the label budget after {0} attempts")]
    Budget(usize),
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.vertices.0 > self.vertices.1 || self.edges.0 > self.edges.1 {
            return Err(GenError::Config("empty range".into()));
        }
        if self.vertex_labels < 1 || self.edge_labels < 1 {
            return Err(GenError::Config("label budgets must be at least 1".into()));
        }
        Ok(())
    }

    /// A copy with another seed, for trial `i` of a run.
    pub fn for_trial(&self, i: u64) -> GenConfig {
        GenConfig { seed: trial_seed(self.seed, i), ..self.clone() }
    }
}

/// Mixes a base seed and a trial index (splitmix64 finalizer).
pub fn trial_seed(seed: u64, i: u64) -> u64 {
    let mut z = seed ^ i.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gen_random_digraph(rng: &mut impl Rng, n: usize, m: usize, loops: bool) -> Digraph {
    let mut g = Digraph::new(n);
    if n == 0 || (n == 1 && !loops) {
        return g;
    }
    for _ in 0..m {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n);
        while !loops && b == a {
            b = rng.gen_range(0..n);
        }
        g.add_edge(a, b);
    }
    g
}

const ATTEMPTS: usize = 200;

/// A correct irredundant term denoting `Inc(G)` for a random `G`, and the
/// graph reconstructed from it (vertices and edges in leaf order).
pub fn gen_random_incidence_term(cfg: &GenConfig) -> Result<(Term, Digraph), GenError> {
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed);
    let n = rng.gen_range(cfg.vertices.0..=cfg.vertices.1);
    let m = rng.gen_range(cfg.edges.0..=cfg.edges.1);
    let g = gen_random_digraph(&mut rng, n, m, cfg.loops);
    let (t, recon) = encode_graph(&g, cfg.vertex_labels, cfg.edge_labels, &mut rng)?;
    let t = if cfg.widths == (0, 0) { t } else { random_annotation(&t, cfg.widths, &mut rng) };
    Ok((t, recon))
}

/// Encodes a given graph with a random decomposition, retrying until the
/// label budget suffices.
pub fn encode_graph(
    g: &Digraph,
    k: usize,
    l: usize,
    rng: &mut impl Rng,
) -> Result<(Term, Digraph), GenError> {
    for _ in 0..ATTEMPTS {
        if let Some((t, vertex_leaf)) = Encoder::new(g, k, l, rng).run(rng) {
            debug_assert!(oracle_correct(&t) && oracle_irredundant(&t));
            let inc = graph_of_incidence(&evaluate(&t)).expect("encoder output is correct");
            let perm: Vec<usize> = vertex_leaf.iter().map(|id| inc.vertex_of[id]).collect();
            assert!(g.equal_under(&inc.graph, &perm), "encoder changed the graph");
            return Ok((t, inc.graph));
        }
    }
    Err(GenError::Budget(ATTEMPTS))
}

#[derive(Clone, Debug)]
enum Item {
    Vertex(usize),
    /// Parallel edges with the same ends, created under one label.
    Bundle(Vec<usize>),
}

enum Tree {
    Leaf(usize),
    Merge(usize, usize),
}

/// One pending incidence `tail → e` or `e → head`, resolved at the merge
/// node where the two items first meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Incidence {
    vertex_item: usize,
    edge_item: usize,
    tail: bool,
}

struct Encoder {
    items: Vec<Item>,
    tree: Vec<Tree>,
    /// Node where each incidence is resolved.
    resolved_at: BTreeMap<Incidence, usize>,
    dead_c: Label,
    dead_d: Label,
    free_c: Vec<Label>,
    free_d: Vec<Label>,
}

/// Active label groups of a part: label → (remaining signature, items).
type Signature = BTreeSet<(usize, usize, bool)>;
type Part = BTreeMap<Label, (Signature, Vec<usize>)>;

impl Encoder {
    fn new(g: &Digraph, k: usize, l: usize, rng: &mut impl Rng) -> Encoder {
        let mut items: Vec<Item> = (0..g.num_vertices()).map(Item::Vertex).collect();
        let mut by_ends: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (e, &ends) in g.edges().iter().enumerate() {
            by_ends.entry(ends).or_default().push(e);
        }
        for (_, mut es) in by_ends {
            es.shuffle(rng);
            while !es.is_empty() {
                let take = rng.gen_range(1..=es.len());
                items.push(Item::Bundle(es.drain(..take).collect()));
            }
        }
        let mut incidences = Vec::new();
        for (i, item) in items.iter().enumerate() {
            if let Item::Bundle(es) = item {
                let (t, h) = g.edges()[es[0]];
                incidences.push(Incidence { vertex_item: t, edge_item: i, tail: true });
                incidences.push(Incidence { vertex_item: h, edge_item: i, tail: false });
            }
        }

        // Random merging, biased towards merges that resolve incidences.
        let mut tree: Vec<Tree> = (0..items.len()).map(Tree::Leaf).collect();
        let mut part_of: Vec<usize> = (0..items.len()).collect();
        let mut members: HashMap<usize, Vec<usize>> = (0..items.len()).map(|i| (i, vec![i])).collect();
        let mut resolved_at = BTreeMap::new();
        while members.len() > 1 {
            let pending: Vec<&Incidence> = incidences
                .iter()
                .filter(|inc| part_of[inc.vertex_item] != part_of[inc.edge_item])
                .collect();
            let (a, b) = if !pending.is_empty() && rng.gen_bool(0.75) {
                let inc = pending[rng.gen_range(0..pending.len())];
                (part_of[inc.vertex_item], part_of[inc.edge_item])
            } else {
                let mut keys: Vec<usize> = members.keys().copied().collect();
                keys.sort_unstable();
                let pick: Vec<&usize> = keys.choose_multiple(rng, 2).collect();
                (*pick[0], *pick[1])
            };
            let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            let node = tree.len();
            tree.push(Tree::Merge(a, b));
            for inc in &incidences {
                let (pv, pe) = (part_of[inc.vertex_item], part_of[inc.edge_item]);
                if (pv == a && pe == b) || (pv == b && pe == a) {
                    resolved_at.insert(*inc, node);
                }
            }
            let mut merged = members.remove(&a).unwrap();
            merged.extend(members.remove(&b).unwrap());
            for &i in &merged {
                part_of[i] = node;
            }
            members.insert(node, merged);
        }

        let mut cs: Vec<Label> = (1..=k as u32).map(Label::vertex).collect();
        let mut ds: Vec<Label> = (1..=l as u32).map(Label::edge).collect();
        cs.shuffle(rng);
        ds.shuffle(rng);
        let dead_c = cs.pop().expect("budget at least 1");
        let dead_d = ds.pop().expect("budget at least 1");
        Encoder { items, tree, resolved_at, dead_c, dead_d, free_c: cs, free_d: ds }
    }

    /// What `item` still has to be connected to strictly above `node`: the
    /// other item, the node, and the direction. Items with equal signatures
    /// can share a label.
    fn signature(&self, item: usize, node: usize) -> Signature {
        self.resolved_at
            .iter()
            .filter(|(_, &at)| at > node)
            .filter_map(|(inc, &at)| {
                if inc.vertex_item == item {
                    Some((inc.edge_item, at, inc.tail))
                } else if inc.edge_item == item {
                    Some((inc.vertex_item, at, inc.tail))
                } else {
                    None
                }
            })
            .collect()
    }

    fn pool(&self, sort_vertex: bool) -> &[Label] {
        if sort_vertex {
            &self.free_c
        } else {
            &self.free_d
        }
    }

    fn is_vertex_item(&self, i: usize) -> bool {
        matches!(self.items[i], Item::Vertex(_))
    }

    /// Emits the term; `None` if the label budget runs out. Also returns
    /// the leaf of every graph vertex.
    fn run(self, rng: &mut impl Rng) -> Option<(Term, Vec<NodeId>)> {
        let mut b = TermBuilder::new();
        if self.tree.is_empty() {
            b.empty();
            return Some((b.finish(), Vec::new()));
        }
        let n_vertices = self.items.iter().filter(|i| matches!(i, Item::Vertex(_))).count();
        let mut vertex_leaf = vec![NodeId::new(0); n_vertices];
        let mut parts: HashMap<usize, Part> = HashMap::new();
        let root = self.tree.len() - 1;
        // Explicit post-order over the merge tree.
        let mut stack = vec![(root, false)];
        while let Some((node, expanded)) = stack.pop() {
            match self.tree[node] {
                Tree::Leaf(i) => {
                    let part = self.emit_leaf(&mut b, i, node, rng, &mut vertex_leaf)?;
                    parts.insert(node, part);
                }
                Tree::Merge(l, r) if !expanded => {
                    stack.push((node, true));
                    stack.push((r, false));
                    stack.push((l, false));
                }
                Tree::Merge(l, r) => {
                    let left = parts.remove(&l).unwrap();
                    let right = parts.remove(&r).unwrap();
                    let part = self.emit_merge(&mut b, node, left, right, rng)?;
                    parts.insert(node, part);
                }
            }
        }
        Some((b.finish(), vertex_leaf))
    }

    fn emit_leaf(
        &self,
        b: &mut TermBuilder,
        i: usize,
        node: usize,
        rng: &mut impl Rng,
        vertex_leaf: &mut [NodeId],
    ) -> Option<Part> {
        let sig = self.signature(i, node);
        let is_v = self.is_vertex_item(i);
        let label = if sig.is_empty() {
            if is_v {
                self.dead_c
            } else {
                self.dead_d
            }
        } else {
            *self.pool(is_v).choose(rng)?
        };
        match &self.items[i] {
            Item::Vertex(v) => vertex_leaf[*v] = b.leaf(label),
            Item::Bundle(es) => {
                b.leaf(label);
                for _ in 1..es.len() {
                    b.leaf(label);
                    b.oplus();
                }
            }
        }
        if rng.gen_bool(0.05) {
            b.empty();
            b.oplus();
        }
        let mut part = Part::new();
        if !sig.is_empty() {
            part.insert(label, (sig, vec![i]));
        }
        Some(part)
    }

    fn emit_merge(
        &self,
        b: &mut TermBuilder,
        node: usize,
        left: Part,
        mut right: Part,
        rng: &mut impl Rng,
    ) -> Option<Part> {
        // Give each right group the label of the left group with the same
        // signature, or a label the left part does not use.
        let by_sig: HashMap<&Signature, Label> = left.iter().map(|(l, (s, _))| (s, *l)).collect();
        let mut taken: BTreeSet<Label> = left.keys().chain(right.keys()).copied().collect();
        let mut moves: Vec<(Label, Label)> = Vec::new();
        for (&r, (sig, _)) in &right {
            let target = match by_sig.get(sig) {
                Some(&l) => l,
                None if !left.contains_key(&r) => r,
                None => {
                    let fresh = self.fresh(r.is_vertex(), &taken, rng)?;
                    taken.insert(fresh);
                    fresh
                }
            };
            if target != r {
                moves.push((r, target));
            }
        }
        // Relabel the right operand so that no target is in use when it is
        // written; a cycle parks one group on a spare label.
        while !moves.is_empty() {
            let (from, to) = match moves.iter().position(|(_, t)| !right.contains_key(t)) {
                Some(p) => moves.remove(p),
                None => {
                    let (from, to) = moves.remove(0);
                    let spare = self.fresh(from.is_vertex(), &taken, rng)?;
                    taken.insert(spare);
                    moves.push((spare, to));
                    (from, spare)
                }
            };
            b.relab(from, to).ok()?;
            let group = right.remove(&from).expect("moved group exists");
            right.insert(to, group);
        }
        b.oplus();

        let mut part = left;
        for (label, (sig, items)) in right {
            part.entry(label).or_insert_with(|| (sig, Vec::new())).1.extend(items);
        }
        let label_of: HashMap<usize, Label> =
            part.iter().flat_map(|(l, (_, items))| items.iter().map(move |&i| (i, *l))).collect();

        let adds: BTreeSet<(Label, Label)> = self
            .resolved_at
            .iter()
            .filter(|(_, &at)| at == node)
            .map(|(inc, _)| {
                let (a, d) = (label_of[&inc.vertex_item], label_of[&inc.edge_item]);
                if inc.tail {
                    (a, d)
                } else {
                    (d, a)
                }
            })
            .collect();
        let mut adds: Vec<(Label, Label)> = adds.into_iter().collect();
        adds.shuffle(rng);
        for (from, to) in adds {
            b.add(from, to).ok()?;
        }
        if rng.gen_bool(0.05) {
            // An add between labels with no vertices creates nothing.
            let unused_c = self.fresh(true, &part.keys().copied().chain([self.dead_c]).collect(), rng);
            if let Some(c) = unused_c {
                b.add(c, self.dead_d).ok()?;
            }
        }

        // Retire finished groups and merge groups that became equivalent.
        let mut next = Part::new();
        let mut by_sig: HashMap<Signature, Label> = HashMap::new();
        for (label, (_, items)) in part {
            let sig = self.signature(items[0], node);
            if sig.is_empty() {
                b.relab(label, if label.is_vertex() { self.dead_c } else { self.dead_d }).ok()?;
            } else if let Some(&keep) = by_sig.get(&sig) {
                b.relab(label, keep).ok()?;
                next.get_mut(&keep).expect("kept group").1.extend(items);
            } else {
                by_sig.insert(sig.clone(), label);
                next.insert(label, (sig, items));
            }
        }
        Some(next)
    }

    fn fresh(&self, vertex: bool, taken: &BTreeSet<Label>, rng: &mut impl Rng) -> Option<Label> {
        let free: Vec<Label> = self.pool(vertex).iter().filter(|l| !taken.contains(l)).copied().collect();
        free.choose(rng).copied()
    }
}

/// Independent uniform membership bits for every leaf.
pub fn random_annotation(t: &Term, widths: (usize, usize), rng: &mut impl Rng) -> Term {
    t.with_annotations(|_, label| {
        let w = if label.is_vertex() { widths.0 } else { widths.1 };
        Annotation::from_bits(w, if w == 0 { 0 } else { rng.gen::<u32>() & ((1u64 << w) - 1) as u32 })
    })
}

/// Random set variables over the leaves of `t`, as positions.
pub fn gen_annotations(t: &Term, widths: (usize, usize), seed: u64) -> AnnotatedSets {
    let mut rng = rng_for(seed);
    let mut sets = AnnotatedSets::new(vec![BTreeSet::new(); widths.0], vec![BTreeSet::new(); widths.1]);
    let positions = t.all_positions();
    for id in t.leaves() {
        let label = t.leaf_label(id).expect("leaf");
        let vars = if label.is_vertex() { &mut sets.vertex_sets } else { &mut sets.edge_sets };
        for var in vars.iter_mut() {
            if rng.gen_bool(0.5) {
                var.insert(positions[id.index()].clone());
            }
        }
    }
    sets
}

/// Every set variable contains every leaf of its sort.
pub fn all_ones(t: &Term, widths: (usize, usize)) -> AnnotatedSets {
    let positions = t.all_positions();
    let of = |vertex: bool| -> BTreeSet<Position> {
        t.leaves()
            .filter(|&id| t.leaf_label(id).is_some_and(|l| l.is_vertex() == vertex))
            .map(|id| positions[id.index()].clone())
            .collect()
    };
    AnnotatedSets::new(vec![of(true); widths.0], vec![of(false); widths.1])
}

/// A random term of about `size` nodes over `k` C-labels and `l` D-labels,
/// with no correctness guarantee.
pub fn gen_random_term(seed: u64, size: usize, k: usize, l: usize, widths: (usize, usize)) -> Term {
    assert!(k >= 2 && l >= 2, "need two labels per sort for relabellings");
    let mut rng = rng_for(seed);
    let c = |rng: &mut ChaCha8Rng| Label::vertex(rng.gen_range(1..=k as u32));
    let d = |rng: &mut ChaCha8Rng| Label::edge(rng.gen_range(1..=l as u32));
    let mut b = TermBuilder::new();
    let mut emitted = 0;
    while emitted < size || b.pending() > 1 {
        let pending = b.pending();
        let roll = rng.gen_range(0..10);
        if pending >= 2 && (roll < 3 || emitted >= size) {
            b.oplus();
        } else if pending >= 1 && roll < 6 {
            let (from, to) = if rng.gen_bool(0.5) { (c(&mut rng), d(&mut rng)) } else { (d(&mut rng), c(&mut rng)) };
            b.add(from, to).expect("sorts differ");
        } else if pending >= 1 && roll < 7 {
            let vertex = rng.gen_bool(0.5);
            let (from, mut to) = if vertex { (c(&mut rng), c(&mut rng)) } else { (d(&mut rng), d(&mut rng)) };
            while to == from {
                to = if vertex { c(&mut rng) } else { d(&mut rng) };
            }
            b.relab(from, to).expect("same sort, distinct");
        } else if roll == 9 && rng.gen_bool(0.1) {
            b.empty();
        } else {
            let label = if rng.gen_bool(0.5) { c(&mut rng) } else { d(&mut rng) };
            let w = if label.is_vertex() { widths.0 } else { widths.1 };
            b.leaf_annotated(label, Annotation::from_bits(w, rng.gen::<u32>() & ((1u64 << w) - 1) as u32));
        }
        emitted += 1;
    }
    b.finish()
}

/// One fresh label per vertex and per edge: the union of all leaves, then
/// for each edge its two incidences. `keep(e, tail)` selects incidences, so
/// dropping some yields incorrect but irredundant terms.
pub fn naive_term(g: &Digraph, keep: impl Fn(usize, bool) -> bool) -> Term {
    let mut b = TermBuilder::new();
    let n = g.num_vertices();
    let m = g.num_edges();
    if n + m == 0 {
        b.empty();
        return b.finish();
    }
    for v in 0..n {
        b.leaf(Label::vertex(v as u32 + 1));
        if v > 0 {
            b.oplus();
        }
    }
    for e in 0..m {
        b.leaf(Label::edge(e as u32 + 1));
        if n + e > 0 {
            b.oplus();
        }
    }
    for (e, &(t, h)) in g.edges().iter().enumerate() {
        let d = Label::edge(e as u32 + 1);
        if keep(e, true) {
            b.add(Label::vertex(t as u32 + 1), d).expect("sorts differ");
        }
        if keep(e, false) {
            b.add(d, Label::vertex(h as u32 + 1)).expect("sorts differ");
        }
    }
    b.finish()
}

/// Every digraph on at most `max_n` vertices with at most `max_m` edges,
/// loops and parallel edges included, as edge multisets (not up to
/// isomorphism).
pub fn all_small_digraphs(max_n: usize, max_m: usize) -> Vec<Digraph> {
    let mut out = Vec::new();
    for n in 0..=max_n {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        for m in 0..=max_m {
            if pairs.is_empty() && m > 0 {
                break;
            }
            // nondecreasing index sequences = multisets of size m
            let mut idx = vec![0usize; m];
            loop {
                out.push(Digraph::from_edges(n, idx.iter().map(|&i| pairs[i]).collect()));
                let Some(p) = (0..m).rev().find(|&p| idx[p] + 1 < pairs.len()) else { break };
                idx[p] += 1;
                for q in p + 1..m {
                    idx[q] = idx[p];
                }
            }
        }
    }
    out
}

/// Every annotation of `t` with the given widths, by enumerating bit
/// patterns of all leaves.
pub fn all_annotations(t: &Term, widths: (usize, usize)) -> Vec<Term> {
    let leaves: Vec<(NodeId, usize)> = t
        .leaves()
        .map(|id| {
            let l = t.leaf_label(id).expect("leaf");
            (id, if l.is_vertex() { widths.0 } else { widths.1 })
        })
        .collect();
    let total: usize = leaves.iter().map(|(_, w)| w).sum();
    assert!(total < 24, "too many annotation bits to enumerate");
    (0u32..1 << total)
        .map(|mask| {
            let mut offset: HashMap<NodeId, (usize, usize)> = HashMap::new();
            let mut at = 0;
            for &(id, w) in &leaves {
                offset.insert(id, (at, w));
                at += w;
            }
            t.with_annotations(|id, _| {
                let (at, w) = offset[&id];
                Annotation::from_bits(w, (mask >> at) & ((1u64 << w) - 1) as u32)
            })
        })
        .collect()
}
