//! Differential runs of an automaton against an oracle or another
//! automaton, with shrinking of counterexamples.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::gen::{
    all_annotations, all_small_digraphs, gen_random_incidence_term, naive_term, rng_for, trial_seed,
    GenConfig, GenError,
};
use super::oracles::{oracle_for, oracle_irredundant, OracleError};
use crate::automata::registry;
use crate::fa::{DynAutomaton, RunError, RunOptions};
use crate::label::Label;
use crate::term::{NodeId, Symbol, Term, TermBuilder};

/// Largest number of candidate checks a shrink may spend.
pub const SHRINK_STEPS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reference {
    /// The brute-force oracle of the same property.
    Oracle,
    /// Another registered automaton.
    Automaton(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub trial: u64,
    pub seed: u64,
    pub term: String,
    pub shrunk: String,
    pub automaton: bool,
    pub reference: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffReport {
    pub automaton: String,
    pub reference: String,
    pub trials: u64,
    /// Trials where the reference could not decide (oracle cap).
    pub skipped: u64,
    pub accepted: u64,
    pub mismatches: Vec<Mismatch>,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiffError {
    #[error("unknown automaton '{0}'")]
    Unknown(String),
    #[error("automata '{0}' and '{1}' read different widths")]
    Widths(String, String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Run(#[from] RunError),
}

enum Outcome {
    Agree(bool),
    Differ(bool, bool),
    Skipped,
}

struct Judge {
    id: String,
    automaton: Box<dyn DynAutomaton>,
    reference: Option<Box<dyn DynAutomaton>>,
    /// Which inputs the comparison is meaningful on.
    pre: Precondition,
}

#[derive(Clone, Copy)]
enum Precondition {
    Any,
    Irredundant,
    CorrectIrredundant,
}

impl Judge {
    fn verdicts(&self, t: &Term) -> Result<Option<(bool, bool)>, DiffError> {
        let opts = RunOptions { timing: false, ..RunOptions::default() };
        let got = self.automaton.check(t, &opts)?.accepted;
        let want = match &self.reference {
            Some(r) => r.check(t, &opts)?.accepted,
            None => match oracle_for(&self.id, t) {
                Ok(b) => b,
                Err(OracleError::TooLarge { .. }) => return Ok(None),
                Err(e) => return Err(RunError::Invalid(e.to_string()).into()),
            },
        };
        Ok(Some((got, want)))
    }

    fn admissible(&self, t: &Term) -> bool {
        match self.pre {
            Precondition::Any => true,
            Precondition::Irredundant => oracle_irredundant(t),
            Precondition::CorrectIrredundant => {
                matches!(registry::guard_failure(t), Ok(None))
            }
        }
    }

    fn judge(&self, t: &Term) -> Result<Outcome, DiffError> {
        Ok(match self.verdicts(t)? {
            None => Outcome::Skipped,
            Some((a, b)) if a == b => Outcome::Agree(a),
            Some((a, b)) => Outcome::Differ(a, b),
        })
    }

    fn still_fails(&self, t: &Term) -> bool {
        self.admissible(t) && matches!(self.verdicts(t), Ok(Some((a, b))) if a != b)
    }
}

/// Runs `trials` generated instances through automaton `id` and the
/// reference. Annotations are drawn at the automaton's widths. For `irr`
/// and `ct`, half of the instances are perturbed so that both answers
/// occur.
pub fn diff_run(
    id: &str,
    reference: &Reference,
    cfg: &GenConfig,
    trials: u64,
) -> Result<DiffReport, DiffError> {
    let entry = registry::lookup(id).ok_or_else(|| DiffError::Unknown(id.to_string()))?;
    let judge = Judge {
        id: id.to_string(),
        automaton: registry::build(id).expect("registered"),
        reference: match reference {
            Reference::Oracle => None,
            Reference::Automaton(other) => {
                let r = registry::build(other).ok_or_else(|| DiffError::Unknown(other.clone()))?;
                if r.signature().widths() != entry.widths {
                    return Err(DiffError::Widths(id.to_string(), other.clone()));
                }
                Some(r)
            }
        },
        pre: match id {
            "irr" => Precondition::Any,
            "ct" => Precondition::Irredundant,
            _ => Precondition::CorrectIrredundant,
        },
    };
    let cfg = GenConfig { widths: entry.widths, ..cfg.clone() };
    let perturb = !entry.needs_guard;

    let results: Vec<Result<(Outcome, u64, Term), DiffError>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(cfg.seed, i);
            let (mut t, _) = gen_random_incidence_term(&GenConfig { seed, ..cfg.clone() })?;
            if perturb {
                let mut rng = rng_for(seed ^ 0x5eed);
                if rng.gen_bool(0.5) {
                    t = perturbed(&t, &mut rng, id == "irr");
                }
            }
            Ok((judge.judge(&t)?, i, t))
        })
        .collect();

    let mut report = DiffReport {
        automaton: id.to_string(),
        reference: match reference {
            Reference::Oracle => "oracle".to_string(),
            Reference::Automaton(o) => o.clone(),
        },
        trials,
        skipped: 0,
        accepted: 0,
        mismatches: Vec::new(),
    };
    for r in results {
        let (outcome, i, t) = r?;
        match outcome {
            Outcome::Skipped => report.skipped += 1,
            Outcome::Agree(a) => report.accepted += a as u64,
            Outcome::Differ(a, b) => {
                let shrunk = shrink(&t, |c| judge.still_fails(c));
                report.mismatches.push(Mismatch {
                    trial: i,
                    seed: trial_seed(cfg.seed, i),
                    term: t.to_sexpr(),
                    shrunk: shrunk.to_sexpr(),
                    automaton: a,
                    reference: b,
                });
            }
        }
    }
    report.mismatches.sort_by(|a, b| a.term.cmp(&b.term));
    Ok(report)
}

/// Checks automaton `id` against its oracle on every digraph with at most
/// `max_n` vertices and `max_m` edges, naively encoded, under every
/// annotation. For `irr` and `ct`, every subset of the incidences is tried
/// as well, and for `irr` each full encoding with one `add` repeated.
/// `trials` counts the terms checked.
pub fn exhaustive_small(id: &str, max_n: usize, max_m: usize) -> Result<DiffReport, DiffError> {
    let entry = registry::lookup(id).ok_or_else(|| DiffError::Unknown(id.to_string()))?;
    let a = registry::build(id).expect("registered");
    let opts = RunOptions { timing: false, ..RunOptions::default() };
    let mut report = DiffReport {
        automaton: id.to_string(),
        reference: "oracle".to_string(),
        trials: 0,
        skipped: 0,
        accepted: 0,
        mismatches: Vec::new(),
    };
    for g in all_small_digraphs(max_n, max_m) {
        let m = g.num_edges();
        let mut bases = vec![naive_term(&g, |_, _| true)];
        if !entry.needs_guard {
            bases = (0u32..1 << (2 * m))
                .map(|mask| naive_term(&g, |i, tail| mask >> (2 * i + tail as usize) & 1 == 1))
                .collect();
        }
        if id == "irr" {
            for (i, &(t, _)) in g.edges().iter().enumerate() {
                let d = Label::edge(i as u32 + 1);
                let full = naive_term(&g, |_, _| true);
                bases.push(Term::add(Label::vertex(t as u32 + 1), d, full).expect("sorts differ"));
            }
        }
        for base in bases {
            for t in all_annotations(&base, entry.widths) {
                let got = a.check(&t, &opts)?.accepted;
                let want = match oracle_for(id, &t) {
                    Ok(b) => b,
                    Err(OracleError::TooLarge { .. }) => {
                        report.skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(RunError::Invalid(e.to_string()).into()),
                };
                report.accepted += got as u64;
                if got != want {
                    report.mismatches.push(Mismatch {
                        trial: report.trials,
                        seed: 0,
                        term: t.to_sexpr(),
                        shrunk: t.to_sexpr(),
                        automaton: got,
                        reference: want,
                    });
                }
                report.trials += 1;
            }
        }
    }
    Ok(report)
}

/// A small random change: drop an `add`, repeat one (only if
/// `allow_redundant`), or add a dangling e-vertex.
fn perturbed(t: &Term, rng: &mut impl Rng, allow_redundant: bool) -> Term {
    let adds: Vec<NodeId> = t.post_order().filter(|&id| matches!(t.symbol(id), Symbol::Add { .. })).collect();
    let choice = rng.gen_range(0..3);
    if adds.is_empty() || choice == 2 || (choice == 1 && !allow_redundant) {
        let (p, m) = t.widths().unwrap_or((None, None));
        let d = Label::edge(rng.gen_range(1..=3));
        let leaf = Term::leaf_annotated(d, crate::term::Annotation::zeros(m.unwrap_or(0)));
        let _ = p;
        return Term::oplus(t.clone(), leaf);
    }
    let target = adds[rng.gen_range(0..adds.len())];
    let mut b = TermBuilder::new();
    for id in t.post_order() {
        let sym = *t.symbol(id);
        if id == target {
            if choice == 0 {
                continue;
            }
            b.symbol(sym).expect("valid symbol");
        }
        b.symbol(sym).expect("valid symbol");
    }
    b.finish()
}

/// Candidate simplifications of `t`: each `⊕` replaced by one operand,
/// each unary node by its operand, each leaf by `(empty)`.
fn candidates(t: &Term) -> impl Iterator<Item = Term> + '_ {
    t.post_order().rev().flat_map(move |id| {
        let replacements: Vec<NodeId> = match t.symbol(id) {
            Symbol::Empty => vec![],
            Symbol::Leaf { .. } => vec![id],
            _ => t.children(id).as_vec(),
        };
        replacements.into_iter().map(move |r| splice(t, id, r))
    })
}

/// `t` with the subterm at `at` replaced by the subterm at `by` (a
/// descendant), or by `(empty)` when `by == at`.
fn splice(t: &Term, at: NodeId, by: NodeId) -> Term {
    let range = t.subterm_range(at);
    let inner = t.subterm_range(by);
    let mut b = TermBuilder::new();
    for (i, node) in t.nodes().iter().enumerate() {
        if i < range.start || i > range.end - 1 {
            b.symbol(node.symbol).expect("valid symbol");
        } else if i == range.end - 1 {
            if by == at {
                b.empty();
            } else {
                for j in inner.clone() {
                    b.symbol(t.nodes()[j].symbol).expect("valid symbol");
                }
            }
        }
    }
    b.finish()
}

/// Greedy shrinking: keep applying the first simplification that still
/// fails, within [`SHRINK_STEPS`] checks.
pub fn shrink(t: &Term, fails: impl Fn(&Term) -> bool) -> Term {
    let mut best = t.clone();
    let mut steps = 0;
    'outer: loop {
        let current = best.clone();
        for c in candidates(&current) {
            steps += 1;
            if steps > SHRINK_STEPS {
                break 'outer;
            }
            if c.len() < best.len() && fails(&c) {
                best = c;
                continue 'outer;
            }
        }
        break;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    #[test]
    fn shrink_finds_minimal_leaf() {
        let t = parse_term("(add 1 -1 (oplus (oplus (leaf 1) (leaf 2)) (relab 3 4 (leaf -2))))").unwrap();
        // "fails" whenever some e-vertex is present
        let s = shrink(&t, |c| c.labels().iter().any(|l| l.is_edge()));
        assert_eq!(s.to_sexpr(), "(leaf -2)");
    }

    #[test]
    fn splice_replaces_subterm() {
        let t = parse_term("(oplus (leaf 1) (add 1 -1 (leaf -1)))").unwrap();
        let add = NodeId::new(2);
        assert_eq!(splice(&t, add, NodeId::new(1)).to_sexpr(), "(oplus (leaf 1) (leaf -1))");
        assert_eq!(splice(&t, NodeId::new(0), NodeId::new(0)).to_sexpr(), "(oplus (empty) (add 1 -1 (leaf -1)))");
    }

    #[test]
    fn small_diff_passes() {
        let cfg = GenConfig { seed: 11, ..GenConfig::default() };
        for id in ["ct", "irr", "edg"] {
            let r = diff_run(id, &Reference::Oracle, &cfg, 50).unwrap();
            assert!(r.passed(), "{id}: {:?}", r.mismatches);
        }
    }
}
