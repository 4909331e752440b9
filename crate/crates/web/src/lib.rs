//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export takes plain strings and returns a JSON string; the same
//! functions without the `wasm_bindgen` wrapper are used by native tests.

use flyterm::automata::registry;
use flyterm::fa::RunOptions;
use flyterm::oracle::graph_of_incidence;
use flyterm::td::{dicycle_with_td, dipath_with_td, gen_partial_ktree, td_to_term};
use flyterm::term::evaluate;
use flyterm::parse_term;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest family size the page may request.
pub const MAX_FAMILY: usize = 20_000;

/// The graph a term denotes, if it is an incidence graph, and a census.
pub fn evaluate_json(text: &str) -> Result<Value, String> {
    let t = parse_term(text).map_err(|e| e.to_string())?;
    let s = evaluate(&t);
    let labels: Vec<Value> = s.vertices().map(|(v, l)| json!([v.index(), l.value()])).collect();
    let incidences: Vec<Value> = s.edges().map(|(x, y)| json!([x.index(), y.index()])).collect();
    let graph = match graph_of_incidence(&s) {
        Ok(inc) => json!({"n": inc.graph.num_vertices(), "edges": inc.graph.edges(), "text": inc.graph.to_string()}),
        Err(e) => json!({"error": e.to_string()}),
    };
    Ok(json!({"nodes": t.len(), "vertices": labels, "incidences": incidences, "graph": graph}))
}

/// Runs a registered automaton after the irredundancy and correctness
/// guards, which are skipped for the guard automata themselves.
pub fn check_json(automaton: &str, text: &str) -> Result<Value, String> {
    let entry = registry::lookup(automaton).ok_or_else(|| format!("unknown automaton '{automaton}'"))?;
    let t = parse_term(text).map_err(|e| e.to_string())?;
    let opts = RunOptions { timing: false, ..RunOptions::default() };
    let bare = t.strip_annotations();
    for guard in ["irr", "ct"] {
        if entry.needs_guard {
            let ok = registry::build(guard).expect("registered").check(&bare, &opts).map_err(|e| e.to_string())?;
            if !ok.accepted {
                return Ok(json!({"automaton": entry.id, "verdict": "guard_failed", "guard_failed": guard}));
            }
        }
    }
    let a = registry::build(entry.id).expect("registered");
    let (accepted, trace) = a.trace(&t).map_err(|e| e.to_string())?;
    let v = a.check(&t, &opts).map_err(|e| e.to_string())?;
    let root: Vec<String> = trace.last().cloned().unwrap_or_default();
    Ok(json!({
        "automaton": entry.id,
        "verdict": if accepted { "accepted" } else { "rejected" },
        "root_states": root,
        "distinct_states": v.stats.distinct_states,
        "max_state_bytes": v.stats.max_state_bytes,
    }))
}

/// Builds a graph family, compiles it through its tree decomposition, and
/// runs `dirham` on the result.
pub fn compile_family_json(family: &str, n: usize, seed: u64) -> Result<Value, String> {
    if n == 0 || n > MAX_FAMILY {
        return Err(format!("size must be between 1 and {MAX_FAMILY}"));
    }
    let (g, td) = match family {
        "cycle" => dicycle_with_td(n),
        "path" => dipath_with_td(n),
        "ktree" => gen_partial_ktree(2, n, 0.6, seed),
        other => return Err(format!("unknown family '{other}'")),
    };
    let c = td_to_term(&g, &td).map_err(|e| e.to_string())?;
    let opts = RunOptions { timing: false, ..RunOptions::default() };
    let ham = registry::build("dirham").expect("registered").check(&c.term, &opts).map_err(|e| e.to_string())?;
    let preview: String = c.term.to_sexpr().chars().take(4000).collect();
    Ok(json!({
        "vertices": g.num_vertices(),
        "edges": g.num_edges(),
        "width": c.width,
        "nodes": c.term.len(),
        "c_used": c.c_used,
        "d_used": c.d_used,
        "d_budget": c.d_budget(),
        "dirham": ham.accepted,
        "term_preview": preview,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn evaluate_term(text: &str) -> Result<String, JsValue> {
    to_js(evaluate_json(text))
}

#[wasm_bindgen]
pub fn check_term(automaton: &str, text: &str) -> Result<String, JsValue> {
    to_js(check_json(automaton, text))
}

#[wasm_bindgen]
pub fn compile_family(family: &str, n: usize, seed: u64) -> Result<String, JsValue> {
    to_js(compile_family_json(family, n, seed))
}

#[wasm_bindgen]
pub fn automata() -> String {
    let v: Vec<Value> = registry::ENTRIES
        .iter()
        .map(|e| json!({"id": e.id, "summary": e.summary, "widths": e.widths}))
        .collect();
    Value::Array(v).to_string()
}
