//! Brute-force semantics and generators for differential testing.

mod diff;
mod gen;
mod graph;
mod oracles;

pub use diff::{diff_run, exhaustive_small, shrink, DiffError, DiffReport, Mismatch, Reference, SHRINK_STEPS};
pub use gen::{
    all_annotations, all_ones, all_small_digraphs, encode_graph, gen_annotations,
    gen_random_digraph, gen_random_incidence_term, gen_random_term, naive_term,
    random_annotation, rng_for, trial_seed, GenConfig, GenError,
};
pub use graph::{graph_of_incidence, Digraph, GraphError, Incidence, NotIncidence};
pub use oracles::{
    graph_sets, is_single_cycle, oracle_correct, oracle_dirham, oracle_dirham_subsets,
    oracle_edge, oracle_for, oracle_inc, oracle_irredundant, oracle_link, oracle_subgraph,
    oracle_widths, GraphSets, LinkMode, OracleError, DIRHAM_CAP,
};
