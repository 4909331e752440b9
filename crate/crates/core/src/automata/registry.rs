//! Automata by stable string id.

use super::{Ct, DirHam, Edg, HamCore, Inc, IncDirection, Irr, LinkAA, LinkAE, LinkEA, LinkEE};
use crate::fa::{
    determinize, erase, image, inverse_image, product, relativize, run_deterministic, AcceptMode,
    DropLastBit, DynAutomaton, FlyAutomaton, RelativizeScope, RunError, RunOptions, SelectBits,
};
use crate::label::Sort;
use crate::term::Term;

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub id: &'static str,
    pub summary: &'static str,
    /// Annotation widths `(p, m)` the automaton reads.
    pub widths: (usize, usize),
    /// Whether answers are only meaningful on correct irredundant terms.
    pub needs_guard: bool,
}

pub const ENTRIES: &[Entry] = &[
    Entry { id: "irr", summary: "no add recreates an existing edge", widths: (0, 0), needs_guard: false },
    Entry { id: "ct", summary: "the value is an incidence graph", widths: (0, 0), needs_guard: false },
    Entry { id: "inc-xu", summary: "X = {x}, U = {u}, x -> u", widths: (1, 1), needs_guard: true },
    Entry { id: "inc-uy", summary: "X = {y}, U = {u}, u -> y", widths: (1, 1), needs_guard: true },
    Entry { id: "edg", summary: "X = {x}, Y = {y}, x -> y", widths: (2, 0), needs_guard: true },
    Entry { id: "link-ee", summary: "some x in X has an edge to some y in Y", widths: (2, 0), needs_guard: true },
    Entry { id: "link-ae", summary: "every x in X has an edge to some y in Y", widths: (2, 0), needs_guard: true },
    Entry { id: "link-aa", summary: "every x in X has an edge to every y in Y", widths: (2, 0), needs_guard: true },
    Entry { id: "link-ea", summary: "some x in X has an edge to every y in Y", widths: (2, 0), needs_guard: true },
    Entry { id: "ham-core", summary: "the graph is one directed cycle, or empty", widths: (0, 0), needs_guard: true },
    Entry { id: "dirham", summary: "the graph has a directed Hamiltonian cycle", widths: (0, 0), needs_guard: true },
    Entry { id: "subgraph", summary: "the selected vertices and edges form a subgraph", widths: (1, 1), needs_guard: true },
    Entry { id: "composed-edg", summary: "edg built from two inc automata by projection", widths: (2, 0), needs_guard: true },
];

pub fn ids() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|e| e.id)
}

pub fn lookup(id: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.id == id)
}

/// `edg(X, Y)` as `∃U. inc(X, U) ∧ inc(U, Y)`, determinized on the fly.
pub fn composed_edg() -> impl FlyAutomaton {
    let xu = inverse_image(
        Inc::new(IncDirection::XtoU),
        SelectBits::new((2, 1), vec![0], vec![0]).expect("bits in range"),
    )
    .expect("widths match");
    let uy = inverse_image(
        Inc::new(IncDirection::UtoY),
        SelectBits::new((2, 1), vec![1], vec![0]).expect("bits in range"),
    )
    .expect("widths match");
    let both = product(xu, uy, AcceptMode::And).expect("widths match");
    let h = DropLastBit::new(Sort::Edge, (2, 1)).expect("edge bit present");
    determinize(image(both, h).expect("widths match"))
}

/// Subgraph test: relativized correctness over one bit per sort.
pub fn subgraph() -> impl FlyAutomaton {
    relativize(Ct::new(), RelativizeScope::Both).expect("widths match")
}

/// Builds a deterministic automaton. `dirham` is the determinization of
/// the guessing automaton.
pub fn build(id: &str) -> Option<Box<dyn DynAutomaton>> {
    Some(match id {
        "irr" => erase(Irr::new()),
        "ct" => erase(Ct::new()),
        "inc-xu" => erase(Inc::new(IncDirection::XtoU)),
        "inc-uy" => erase(Inc::new(IncDirection::UtoY)),
        "edg" => erase(Edg),
        "link-ee" => erase(LinkEE),
        "link-ae" => erase(LinkAE),
        "link-aa" => erase(LinkAA),
        "link-ea" => erase(LinkEA),
        "ham-core" => erase(HamCore),
        "dirham" => erase(determinize(DirHam)),
        "subgraph" => erase(subgraph()),
        "composed-edg" => erase(composed_edg()),
        _ => return None,
    })
}

/// The first guard a term fails: `"irr"` if some `add` is redundant, `"ct"`
/// if its value is not an incidence graph.
pub fn guard_failure(t: &Term) -> Result<Option<&'static str>, RunError> {
    let (p, m) = t.widths().map_err(|e| RunError::Invalid(e.to_string()))?;
    let (p, m) = (p.unwrap_or(0), m.unwrap_or(0));
    let opts = RunOptions { timing: false, ..RunOptions::default() };
    if !run_deterministic(&Irr::with_widths(p, m), t, &opts)?.accepted {
        return Ok(Some("irr"));
    }
    if !run_deterministic(&Ct::with_widths(p, m), t, &opts)?.accepted {
        return Ok(Some("ct"));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_builds_with_declared_widths() {
        for e in ENTRIES {
            let a = build(e.id).unwrap();
            assert_eq!(a.signature().widths(), e.widths, "{}", e.id);
            assert!(a.is_deterministic(), "{}", e.id);
        }
        assert!(build("nope").is_none());
    }
}
