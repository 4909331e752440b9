//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so the lines reach the output of
//! `cargo test` directly. Exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use flyterm::automata::{declared_state_count, registry};
use flyterm::fa::{DynAutomaton, RunOptions};
use flyterm::oracle::{
    all_small_digraphs, diff_run, exhaustive_small, gen_random_incidence_term, gen_random_term,
    rng_for, trial_seed, GenConfig, Reference,
};
use flyterm::td::{dicycle_with_td, dipath_with_td, gen_partial_ktree, td_to_term, Compiled};
use flyterm::term::{evaluate, make_irredundant};
use flyterm::{Label, Term};
use rand::seq::SliceRandom;
use rand::Rng;

/// Seed shared by all randomized criteria.
const SEED: u64 = 0x00ac_ce55;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn quiet() -> RunOptions {
    RunOptions { timing: false, ..RunOptions::default() }
}

fn accepts(a: &dyn DynAutomaton, t: &Term) -> bool {
    a.check(t, &quiet()).expect("term fits the automaton").accepted
}

fn state_counts() -> Outcome {
    let forms: [(&str, fn(u64, u64) -> u64); 4] = [
        ("ct", |k, l| 3u64.pow(k as u32) * 5u64.pow(l as u32) + 1),
        ("edg", |k, l| (k + 1).pow(2) * 5u64.pow(l as u32) + 2),
        ("inc", |k, l| (k + 1) * (l + 1) + 2),
        ("link-ee", |k, l| 4u64.pow(k as u32) * 5u64.pow(l as u32) + 1),
    ];
    let mut bad = Vec::new();
    let mut checked = 0;
    for (id, form) in forms {
        for k in 1..=3 {
            for l in 1..=3 {
                checked += 1;
                let got = declared_state_count(id, k, l);
                if got != Ok(form(k as u64, l as u64)) {
                    bad.push(format!("{id}({k},{l})={got:?}"));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} counts, mismatches: {bad:?}"))
}

fn small_world() -> Outcome {
    let (mut runs, mut bad) = (0, Vec::new());
    for e in registry::ENTRIES {
        let r = exhaustive_small(e.id, 3, 3).expect("small world runs");
        runs += r.trials;
        if r.skipped > 0 {
            bad.push(format!("{}: {} skipped", e.id, r.skipped));
        }
        bad.extend(r.mismatches.iter().take(2).map(|m| format!("{} on {}", e.id, m.term)));
    }
    let graphs = all_small_digraphs(3, 3).len();
    outcome(bad.is_empty(), format!("{graphs} graphs, {runs} runs, mismatches: {bad:?}"))
}

fn randomized() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for e in registry::ENTRIES {
        let (trials, vertices) = if e.id == "dirham" { (300, (0, 7)) } else { (1000, (0, 7)) };
        let cfg = GenConfig { seed: SEED, vertices, ..GenConfig::default() };
        let r = diff_run(e.id, &Reference::Oracle, &cfg, trials).expect("diff runs");
        pass &= r.passed() && r.skipped == 0;
        lines.push(format!("{}:{}/{}", e.id, r.mismatches.len(), r.trials));
        if let Some(m) = r.mismatches.first() {
            lines.push(format!("first {} shrunk to {}", e.id, m.shrunk));
        }
    }
    outcome(pass, format!("seed {SEED:#x}, mismatches per automaton: {}", lines.join(" ")))
}

fn composed_vs_direct() -> Outcome {
    let cfg = GenConfig { seed: SEED ^ 4, widths: (2, 0), ..GenConfig::default() };
    let direct = registry::build("edg").expect("registered");
    let composed = registry::build("composed-edg").expect("registered");
    let (mut mismatches, mut larger, mut max_direct, mut max_composed) = (0, 0, 0, 0);
    for i in 0..500 {
        let (t, _) = gen_random_incidence_term(&cfg.for_trial(i)).expect("generator");
        let opts = RunOptions { short_circuit: false, ..quiet() };
        let d = direct.check(&t, &opts).expect("widths");
        let c = composed.check(&t, &opts).expect("widths");
        mismatches += (d.accepted != c.accepted) as usize;
        larger += (c.stats.max_state_bytes > d.stats.max_state_bytes) as usize;
        max_direct = max_direct.max(d.stats.max_state_bytes);
        max_composed = max_composed.max(c.stats.max_state_bytes);
    }
    outcome(
        mismatches == 0 && larger > 0,
        format!(
            "500 terms, mismatches {mismatches}; composed states larger on {larger} terms \
             (max bytes composed {max_composed}, direct {max_direct})"
        ),
    )
}

/// Random terms for the structural checks: half arbitrary, half encodings
/// of random graphs.
fn structural_terms(seed: u64, widths: (usize, usize), count: u64) -> Vec<Term> {
    (0..count)
        .map(|i| {
            let s = trial_seed(seed, i);
            if i % 2 == 0 {
                gen_random_term(s, 30, 3, 3, widths)
            } else {
                let cfg = GenConfig { seed: s, widths, ..GenConfig::default() };
                gen_random_incidence_term(&cfg).expect("generator").0
            }
        })
        .collect()
}

/// A sort-respecting injective relabelling into `1..=9` on each side.
fn random_bijection(t: &Term, rng: &mut impl Rng) -> BTreeMap<Label, Label> {
    let mut map = BTreeMap::new();
    for vertex in [true, false] {
        let mut targets: Vec<u32> = (1..=9).collect();
        targets.shuffle(rng);
        let ls: Vec<Label> = t.labels().into_iter().filter(|l| l.is_vertex() == vertex).collect();
        for (l, n) in ls.into_iter().zip(targets) {
            map.insert(l, if vertex { Label::vertex(n) } else { Label::edge(n) });
        }
    }
    map
}

fn locality_equivariance() -> Outcome {
    let (mut local_bad, mut equi_bad, mut checks) = (Vec::new(), Vec::new(), 0);
    for e in registry::ENTRIES {
        let a = registry::build(e.id).expect("registered");
        let mut rng = rng_for(SEED ^ 5);
        for t in structural_terms(SEED ^ 5, e.widths, 500) {
            checks += 1;
            let labels = t.labels();
            let visited = a.visited(&t).expect("widths");
            if let Some(v) = visited.iter().find(|v| !v.labels.is_subset(&labels)) {
                local_bad.push(format!("{}: node {} mentions {:?}", e.id, v.node, v.labels));
            }
            let map = random_bijection(&t, &mut rng);
            let u = t.map_labels(|l| map[&l]).expect("bijection respects sorts");
            let sizes = |vs: &[flyterm::fa::VisitedState]| {
                let mut s: Vec<usize> = vs.iter().map(|v| v.bytes).collect();
                s.sort_unstable();
                s
            };
            let same_sizes = sizes(&visited) == sizes(&a.visited(&u).expect("widths"));
            if accepts(a.as_ref(), &t) != accepts(a.as_ref(), &u) || !same_sizes {
                equi_bad.push(format!("{} on {t}", e.id));
            }
        }
    }
    outcome(
        local_bad.is_empty() && equi_bad.is_empty(),
        format!(
            "{checks} (automaton, term) pairs; locality violations {}, equivariance violations {} {:?}",
            local_bad.len(),
            equi_bad.len(),
            local_bad.iter().chain(&equi_bad).take(3).collect::<Vec<_>>()
        ),
    )
}

/// For every subterm and label class of an irredundant term, the degree
/// gained above the subterm is the same for all members of the class.
fn degree_offsets_constant(t: &Term) -> bool {
    let full = evaluate(t).degrees();
    t.post_order().all(|id| {
        let offset = t.subterm_range(id).start;
        let sub = evaluate(&t.subterm(id)).shifted(offset);
        let deg = sub.degrees();
        let mut gain: BTreeMap<Label, (isize, isize)> = BTreeMap::new();
        let constant = sub.vertices().all(|(v, l)| {
            let (i, o) = deg[&v];
            let (fi, fo) = full[&v];
            let d = (fi as isize - i as isize, fo as isize - o as isize);
            d.0 >= 0 && d.1 >= 0 && *gain.entry(l).or_insert(d) == d
        });
        constant
    })
}

fn degree_offsets() -> Outcome {
    let terms: Vec<Term> = structural_terms(SEED ^ 6, (0, 0), 500).iter().map(make_irredundant).collect();
    let bad = terms.iter().filter(|t| !degree_offsets_constant(t)).count();
    let positions: usize = terms.iter().map(Term::len).sum();
    outcome(bad == 0, format!("500 irredundant terms, {positions} positions, violations {bad}"))
}

fn td_pipeline() -> Outcome {
    let ct = registry::build("ct").expect("registered");
    let irr = registry::build("irr").expect("registered");
    let mut bad = Vec::new();
    let mut worst_d = BTreeMap::new();
    for k in 1..=3usize {
        let mut rng = rng_for(SEED ^ k as u64);
        for i in 0..50u64 {
            let n = rng.gen_range(1..=20);
            let density = rng.gen_range(0.2..=1.0);
            let (g, td) = gen_partial_ktree(k, n, density, trial_seed(SEED, i));
            let c = td_to_term(&g, &td).expect("generated decomposition is valid");
            let ok = accepts(ct.as_ref(), &c.term)
                && accepts(irr.as_ref(), &c.term)
                && c.reconstructs(&g)
                && c.c_used <= 2
                && c.d_used <= 2 * k + 3
                && c.term.len() <= Compiled::size_bound(&g, &td);
            let w = worst_d.entry(k).or_insert(0);
            *w = (*w).max(c.d_used);
            if !ok {
                bad.push(format!("k={k} n={n} seed={}", trial_seed(SEED, i)));
            }
        }
    }
    outcome(bad.is_empty(), format!("150 partial k-trees, max D-labels per k {worst_d:?}, violations {bad:?}"))
}

fn min_time(runs: usize, mut f: impl FnMut()) -> Duration {
    (0..runs)
        .map(|_| {
            let s = Instant::now();
            f();
            s.elapsed()
        })
        .min()
        .expect("at least one run")
}

fn dirham_scale() -> Outcome {
    let a = registry::build("dirham").expect("registered");
    let full = RunOptions { short_circuit: false, ..quiet() };
    let sizes = [1_000usize, 10_000, 100_000];
    let mut verdicts_ok = true;
    let mut times = Vec::new();
    let mut lens = Vec::new();
    for &n in &sizes {
        let (cg, ctd) = dicycle_with_td(n);
        let (pg, ptd) = dipath_with_td(n);
        let cycle = td_to_term(&cg, &ctd).expect("valid").term;
        let path = td_to_term(&pg, &ptd).expect("valid").term;
        verdicts_ok &= accepts(a.as_ref(), &cycle) && !accepts(a.as_ref(), &path);
        let runs = if n >= 100_000 { 3 } else { 7 };
        let t = min_time(runs, || {
            a.check(&cycle, &full).expect("runs");
            a.check(&path, &full).expect("runs");
        });
        times.push(t);
        lens.push(cycle.len() + path.len());
    }
    let growth_ok = times.windows(2).zip(lens.windows(2)).all(|(t, l)| {
        let size_ratio = l[1] as f64 / l[0] as f64;
        t[1].as_secs_f64() <= 2.0 * size_ratio * t[0].as_secs_f64()
    });
    let shown: Vec<String> = sizes.iter().zip(&times).map(|(n, t)| format!("n={n}: {:.2}ms", t.as_secs_f64() * 1e3)).collect();
    outcome(verdicts_ok && growth_ok, format!("cycles accepted, paths rejected: {verdicts_ok}; {}", shown.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("state-space counts", state_counts),
        ("exhaustive small world", small_world),
        ("randomized oracle equivalence", randomized),
        ("composed vs direct edg", composed_vs_direct),
        ("locality and label equivariance", locality_equivariance),
        ("degree offsets per label class", degree_offsets),
        ("decomposition to term pipeline", td_pipeline),
        ("dirham at scale", dirham_scale),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("acceptance {name}: {verdict} ({:.1}s) {}", start.elapsed().as_secs_f64(), o.detail);
        failed += !o.pass as usize;
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all 8 criteria passed");
}
