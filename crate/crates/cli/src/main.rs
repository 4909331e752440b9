//! `flyterm`: evaluate terms, check properties, compile tree
//! decompositions, run differential tests and benchmarks.
//!
//! Exit codes: 0 accepted (or success), 1 rejected (or mismatches found),
//! 2 usage or input error. Machine output is JSON (CSV for `bench`) on
//! stdout; a one-line summary goes to stderr.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use flyterm::automata::registry;
use flyterm::fa::{RunOptions, RunStats};
use flyterm::oracle::{
    diff_run, exhaustive_small, gen_annotations, gen_random_digraph, gen_random_incidence_term,
    graph_of_incidence, random_annotation, rng_for, Digraph, GenConfig, Reference,
};
use flyterm::td::{dicycle_with_td, dipath_with_td, gen_partial_ktree, parse_td, td_to_term};
use flyterm::term::{annotate, evaluate, AnnotatedSets};
use flyterm::{parse_term, Position, Term};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Parser)]
#[command(name = "flyterm", version, about = "Fly-automata over clique-width terms of incidence graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered automata.
    List,
    /// Run an automaton on a term, guarded by the correctness and
    /// irredundancy checks.
    Check(CheckArgs),
    /// Evaluate a term to its graph or a label census.
    Eval {
        #[arg(long)]
        term: PathBuf,
        #[arg(long, value_enum, default_value = "graph")]
        emit: Emit,
    },
    /// Compile a graph and a tree decomposition of it into a term.
    Td2term {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        td: PathBuf,
        /// Output term file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare an automaton with its oracle or with another automaton.
    Diff {
        automaton: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest vertex count of generated graphs.
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        /// Largest edge count of generated graphs.
        #[arg(long, default_value_t = 10)]
        max_m: usize,
        /// Compare with this automaton instead of the oracle.
        #[arg(long)]
        against: Option<String>,
        /// Check every graph with at most 3 vertices and 3 edges instead.
        #[arg(long)]
        exhaustive_small: bool,
    },
    /// Time an automaton on a family of growing graphs; prints CSV.
    Bench {
        automaton: String,
        #[arg(long, value_enum)]
        family: Family,
        /// Comma-separated ascending sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Width of random partial k-trees.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Runs per size; the fastest is reported.
        #[arg(long, default_value_t = 3)]
        repeat: usize,
    },
    /// Generate graphs, terms or decompositions.
    Gen {
        #[command(subcommand)]
        what: GenWhat,
    },
}

#[derive(clap::Args)]
struct CheckArgs {
    #[arg(long)]
    automaton: String,
    #[arg(long)]
    term: PathBuf,
    /// JSON file of set variables by leaf position:
    /// {"vertex_sets": [["1.2", ...], ...], "edge_sets": [...]}.
    #[arg(long, conflicts_with = "seed")]
    sets: Option<PathBuf>,
    /// Draw random set variables with this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Skip the correctness guard.
    #[arg(long)]
    assume_correct: bool,
    /// Skip the irredundancy guard.
    #[arg(long)]
    assume_irredundant: bool,
    /// Also write the run statistics to this file.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Graph,
    Stats,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Path,
    Cycle,
    RandomKtree,
}

#[derive(Subcommand)]
enum GenWhat {
    /// A random digraph in the graph file format.
    Graph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        no_loops: bool,
    },
    /// A random correct irredundant term.
    Term {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[arg(long, default_value_t = 10)]
        max_m: usize,
        /// Annotation widths as "p,m".
        #[arg(long, default_value = "0,0")]
        widths: String,
    },
    /// A random partial k-tree and its decomposition.
    Ktree {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        graph_out: PathBuf,
        #[arg(long)]
        td_out: PathBuf,
    },
}

/// A usage or input error: exit status 2.
struct Fail(String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(e.to_string())
    }
}

type Res = Result<ExitCode, Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => list(),
        Command::Check(args) => check(args),
        Command::Eval { term, emit } => eval(&term, emit),
        Command::Td2term { graph, td, out } => td2term(&graph, &td, out.as_deref()),
        Command::Diff { automaton, trials, seed, max_n, max_m, against, exhaustive_small } => {
            diff(&automaton, trials, seed, (max_n, max_m), against, exhaustive_small)
        }
        Command::Bench { automaton, family, sizes, seed, k, repeat } => {
            bench(&automaton, family, &sizes, seed, k, repeat)
        }
        Command::Gen { what } => gen(what),
    };
    result.unwrap_or_else(|Fail(msg)| {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    })
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail(format!("{}: {e}", path.display())))
}

fn read_term(path: &Path) -> Result<Term, Fail> {
    parse_term(&read(path)?).map_err(|e| Fail(format!("{}: {e}", path.display())))
}

fn print_json(v: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run_options() -> Result<RunOptions, Fail> {
    let mut opts = RunOptions::default();
    if let Ok(v) = std::env::var("FLYTERM_CACHE_BYTES") {
        opts.memo_bytes = v.trim().parse().map_err(|_| Fail(format!("FLYTERM_CACHE_BYTES: bad value '{v}'")))?;
    }
    Ok(opts)
}

fn list() -> Res {
    let entries: Vec<_> = registry::ENTRIES
        .iter()
        .map(|e| json!({"id": e.id, "summary": e.summary, "widths": e.widths, "needs_guard": e.needs_guard}))
        .collect();
    print_json(&entries);
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct SetsFile {
    #[serde(default)]
    vertex_sets: Vec<Vec<String>>,
    #[serde(default)]
    edge_sets: Vec<Vec<String>>,
}

fn load_sets(path: &Path) -> Result<AnnotatedSets, Fail> {
    let f: SetsFile = serde_json::from_str(&read(path)?).map_err(|e| Fail(format!("{}: {e}", path.display())))?;
    let conv = |sets: Vec<Vec<String>>| -> Result<Vec<BTreeSet<Position>>, Fail> {
        sets.into_iter()
            .map(|s| s.iter().map(|p| p.parse::<Position>().map_err(Fail)).collect())
            .collect()
    };
    Ok(AnnotatedSets::new(conv(f.vertex_sets)?, conv(f.edge_sets)?))
}

#[derive(Serialize)]
struct CheckReport {
    automaton: String,
    /// "accepted", "rejected" or "guard_failed".
    verdict: &'static str,
    accepted: bool,
    guard_failed: Option<&'static str>,
    guards: BTreeMap<&'static str, Option<bool>>,
    stats: Option<RunStats>,
}

fn check(args: CheckArgs) -> Res {
    let entry = registry::lookup(&args.automaton).ok_or_else(|| {
        Fail(format!("unknown automaton '{}' (see `flyterm list`)", args.automaton))
    })?;
    let a = registry::build(entry.id).expect("registered");
    let mut t = read_term(&args.term)?;
    if let Some(path) = &args.sets {
        t = annotate(&t, &load_sets(path)?)?;
    } else if let Some(seed) = args.seed {
        t = annotate(&t, &gen_annotations(&t, entry.widths, seed))?;
    }
    let opts = run_options()?;
    a.signature().admits(&t)?;

    let bare = t.strip_annotations();
    let mut guards = BTreeMap::new();
    let mut guard_failed = None;
    for (id, skip) in [("irr", args.assume_irredundant), ("ct", args.assume_correct)] {
        let skip = skip || entry.id == id;
        let ok = if skip { None } else { Some(registry::build(id).expect("registered").check(&bare, &opts)?.accepted) };
        guards.insert(id, ok);
        if ok == Some(false) && guard_failed.is_none() {
            guard_failed = Some(id);
        }
    }
    let stats = match guard_failed {
        Some(_) => None,
        None => Some(a.check(&t, &opts)?.stats),
    };
    let accepted = stats.as_ref().is_some_and(|s| s.accepted);
    let verdict = match (guard_failed, accepted) {
        (Some(_), _) => "guard_failed",
        (None, true) => "accepted",
        (None, false) => "rejected",
    };
    let report = CheckReport { automaton: entry.id.to_string(), verdict, accepted, guard_failed, guards, stats };
    if let Some(path) = &args.stats {
        write(path, &serde_json::to_string_pretty(&report.stats)?)?;
    }
    print_json(&report);
    match guard_failed {
        Some(g) => eprintln!("{}: guard {g} failed", entry.id),
        None => eprintln!("{}: {verdict}", entry.id),
    }
    Ok(if accepted { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn eval(path: &Path, emit: Emit) -> Res {
    let t = read_term(path)?;
    let s = evaluate(&t);
    match emit {
        Emit::Graph => {
            let inc = graph_of_incidence(&s)?;
            print!("{}", inc.graph);
            eprintln!("{} vertices, {} edges", inc.graph.num_vertices(), inc.graph.num_edges());
        }
        Emit::Stats => {
            let mut per_label: BTreeMap<i32, usize> = BTreeMap::new();
            for (_, l) in s.vertices() {
                *per_label.entry(l.value()).or_default() += 1;
            }
            let v = s.vertices().filter(|(_, l)| l.is_vertex()).count();
            print_json(&json!({
                "v_vertices": v,
                "e_vertices": s.num_vertices() - v,
                "incidences": s.num_edges(),
                "per_label": per_label,
            }));
            eprintln!("{} vertices, {} incidences", s.num_vertices(), s.num_edges());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn td2term(graph: &Path, td: &Path, out: Option<&Path>) -> Res {
    let g = Digraph::parse(&read(graph)?).map_err(|e| Fail(format!("{}: {e}", graph.display())))?;
    let td = parse_td(&read(td)?)?;
    let c = td_to_term(&g, &td)?;
    let text = c.term.to_sexpr() + "\n";
    match out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    let summary = json!({
        "C_used": c.c_used,
        "D_used": c.d_used,
        "D_budget": c.d_budget(),
        "width": c.width,
        "nodes": c.term.len(),
    });
    if out.is_some() {
        print_json(&summary);
    }
    eprintln!("C_used {} D_used {} (budget {}), {} nodes", c.c_used, c.d_used, c.d_budget(), c.term.len());
    Ok(ExitCode::SUCCESS)
}

fn diff(
    id: &str,
    trials: u64,
    seed: u64,
    (max_n, max_m): (usize, usize),
    against: Option<String>,
    exhaustive: bool,
) -> Res {
    let report = if exhaustive {
        exhaustive_small(id, 3, 3)?
    } else {
        let cfg = GenConfig { seed, vertices: (0, max_n), edges: (0, max_m), ..GenConfig::default() };
        cfg.validate()?;
        let reference = against.map_or(Reference::Oracle, Reference::Automaton);
        diff_run(id, &reference, &cfg, trials)?
    };
    print_json(&report);
    eprintln!(
        "{} vs {}: {} trials, {} mismatches, {} skipped",
        report.automaton,
        report.reference,
        report.trials,
        report.mismatches.len(),
        report.skipped
    );
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn bench(id: &str, family: Family, sizes: &[usize], seed: u64, k: usize, repeat: usize) -> Res {
    let entry = registry::lookup(id).ok_or_else(|| Fail(format!("unknown automaton '{id}'")))?;
    if sizes.is_empty() {
        return Err(Fail("--sizes needs at least one size".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(Fail("--sizes must be positive and ascending".into()));
    }
    if matches!(family, Family::RandomKtree) && k == 0 {
        return Err(Fail("--k must be at least 1".into()));
    }
    let a = registry::build(id).expect("registered");
    let opts = RunOptions { short_circuit: false, ..run_options()? };
    println!("size,nodes,millis,max_state_bytes,ndeg,accepted");
    for &n in sizes {
        let (g, td) = match family {
            Family::Path => dipath_with_td(n),
            Family::Cycle => dicycle_with_td(n),
            Family::RandomKtree => gen_partial_ktree(k, n, 0.5, seed),
        };
        let mut t = td_to_term(&g, &td)?.term;
        if entry.widths != (0, 0) {
            t = random_annotation(&t, entry.widths, &mut rng_for(seed));
        }
        let mut best = f64::INFINITY;
        let mut stats = None;
        for _ in 0..repeat.max(1) {
            let start = Instant::now();
            let v = a.check(&t, &opts)?;
            best = best.min(start.elapsed().as_secs_f64() * 1e3);
            stats = Some(v.stats);
        }
        let s = stats.expect("at least one run");
        println!("{n},{},{best:.3},{},{},{}", t.len(), s.max_state_bytes, s.ndeg, s.accepted);
    }
    eprintln!("{id}: {} sizes", sizes.len());
    Ok(ExitCode::SUCCESS)
}

fn parse_widths(s: &str) -> Result<(usize, usize), Fail> {
    let bad = || Fail(format!("widths must look like 'p,m', got '{s}'"));
    let (p, m) = s.split_once(',').ok_or_else(bad)?;
    Ok((p.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?))
}

fn gen(what: GenWhat) -> Res {
    match what {
        GenWhat::Graph { n, m, seed, no_loops } => {
            if no_loops && n < 2 && m > 0 {
                return Err(Fail("edges without loops need at least 2 vertices".into()));
            }
            if n == 0 && m > 0 {
                return Err(Fail("edges need at least one vertex".into()));
            }
            print!("{}", gen_random_digraph(&mut rng_for(seed), n, m, !no_loops));
        }
        GenWhat::Term { seed, max_n, max_m, widths } => {
            let cfg = GenConfig {
                seed,
                vertices: (0, max_n),
                edges: (0, max_m),
                widths: parse_widths(&widths)?,
                ..GenConfig::default()
            };
            let (t, g) = gen_random_incidence_term(&cfg)?;
            println!("{t}");
            eprintln!("{} nodes for a graph with {} vertices, {} edges", t.len(), g.num_vertices(), g.num_edges());
        }
        GenWhat::Ktree { k, n, density, seed, graph_out, td_out } => {
            if k == 0 || n == 0 {
                return Err(Fail("--k and --n must be at least 1".into()));
            }
            let (g, td) = gen_partial_ktree(k, n, density, seed);
            write(&graph_out, &g.to_string())?;
            write(&td_out, &td.to_string())?;
            eprintln!("{} vertices, {} edges, {} bags of width {k}", n, g.num_edges(), td.bags().len());
        }
    }
    Ok(ExitCode::SUCCESS)
}
