use std::collections::{HashMap, HashSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{FlyAutomaton, RunError, Sink, StateValue};
use crate::term::{NodeId, Symbol, Term};

/// Approximate footprint of one memo entry, used to turn a byte budget into
/// an entry count.
const MEMO_ENTRY_BYTES: usize = 64;

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Stop as soon as a sink state is produced.
    pub short_circuit: bool,
    /// Byte budget of the transition memo; 0 disables it.
    pub memo_bytes: usize,
    /// Measure wall time.
    pub timing: bool,
    /// Keep the state (set) computed at every node.
    pub keep_trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { short_circuit: true, memo_bytes: 64 << 20, timing: true, keep_trace: false }
    }
}

impl RunOptions {
    /// Full run with trace, no early exit.
    pub fn traced() -> Self {
        RunOptions { short_circuit: false, keep_trace: true, ..RunOptions::default() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub nodes: usize,
    pub distinct_states: usize,
    pub max_state_bytes: usize,
    pub ndeg: usize,
    pub millis: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct DetRun<S> {
    /// State at the root, or the sink that ended the run early.
    pub root: S,
    pub accepted: bool,
    pub stats: RunStats,
    /// Node where a sink stopped the run, if it did.
    pub stopped_at: Option<NodeId>,
    /// States per node in post-order; `None` for nodes never reached.
    pub trace: Option<Vec<Option<S>>>,
}

#[derive(Clone, Debug)]
pub struct StarRun<S> {
    pub root: Vec<S>,
    pub accepted: bool,
    pub stats: RunStats,
    pub trace: Option<Vec<Vec<S>>>,
}

struct Interner<S> {
    states: Vec<S>,
    index: HashMap<S, u32>,
    max_bytes: usize,
}

impl<S: StateValue> Interner<S> {
    fn intern(&mut self, q: S) -> u32 {
        if let Some(&i) = self.index.get(&q) {
            return i;
        }
        let i = self.states.len() as u32;
        self.max_bytes = self.max_bytes.max(q.encoded_len());
        self.states.push(q.clone());
        self.index.insert(q, i);
        i
    }
}

/// Computes the unique run of a deterministic automaton bottom-up.
///
/// Identical states are interned, and transitions are memoized on
/// `(symbol, child state ids)`; the memo is cleared when it outgrows its
/// budget, which only costs recomputation.
pub fn run_deterministic<A: FlyAutomaton>(
    a: &A,
    t: &Term,
    opts: &RunOptions,
) -> Result<DetRun<A::State>, RunError> {
    if !a.is_deterministic() {
        return Err(RunError::NeedsDeterministic("run_deterministic"));
    }
    a.signature().admits(t)?;
    let start = opts.timing.then(Instant::now);
    let memo_cap = opts.memo_bytes / MEMO_ENTRY_BYTES;
    let mut memo: HashMap<(Symbol, u32, u32), u32> = HashMap::new();
    let mut interner = Interner { states: Vec::new(), index: HashMap::new(), max_bytes: 0 };
    let mut stack: Vec<u32> = Vec::new();
    let mut trace: Option<Vec<u32>> = opts.keep_trace.then(|| Vec::with_capacity(t.len()));
    let mut out = Vec::with_capacity(1);
    let mut stopped_at = None;

    for id in t.post_order() {
        let sym = t.symbol(id);
        let base = stack.len() - sym.arity();
        let key = (
            *sym,
            stack.get(base).copied().unwrap_or(u32::MAX),
            stack.get(base + 1).copied().unwrap_or(u32::MAX),
        );
        let sid = match memo.get(&key) {
            Some(&s) => s,
            None => {
                out.clear();
                let children: Vec<&A::State> =
                    stack[base..].iter().map(|&c| &interner.states[c as usize]).collect();
                a.transitions(sym, &children, &mut out);
                if out.len() != 1 {
                    return Err(RunError::NotDeterministic { node: id.index(), count: out.len() });
                }
                let sid = interner.intern(out.pop().unwrap());
                if memo_cap > 0 {
                    if memo.len() >= memo_cap {
                        memo.clear();
                    }
                    memo.insert(key, sid);
                }
                sid
            }
        };
        stack.truncate(base);
        stack.push(sid);
        if let Some(tr) = trace.as_mut() {
            tr.push(sid);
        }
        if opts.short_circuit && a.sink(&interner.states[sid as usize]).is_some() {
            stopped_at = Some(id);
            break;
        }
    }

    let root_id = *stack.last().expect("term is nonempty");
    let root = interner.states[root_id as usize].clone();
    let accepted = match (stopped_at, a.sink(&root)) {
        (Some(_), Some(Sink::Success)) => true,
        (Some(_), _) => false,
        (None, _) => a.is_accepting(&root),
    };
    let stats = RunStats {
        nodes: t.len(),
        distinct_states: interner.states.len(),
        max_state_bytes: interner.max_bytes,
        ndeg: 1,
        millis: start.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1000.0),
        accepted,
    };
    let trace = trace.map(|tr| {
        let mut full: Vec<Option<A::State>> =
            tr.iter().map(|&s| Some(interner.states[s as usize].clone())).collect();
        full.resize(t.len(), None);
        full
    });
    Ok(DetRun { root, accepted, stats, stopped_at, trace })
}

/// Computes `run*`: the set of states reachable at every node.
pub fn run_star<A: FlyAutomaton>(
    a: &A,
    t: &Term,
    opts: &RunOptions,
) -> Result<StarRun<A::State>, RunError> {
    a.signature().admits(t)?;
    let start = opts.timing.then(Instant::now);
    let mut seen: HashSet<A::State> = HashSet::new();
    let mut max_bytes = 0;
    let mut ndeg = 0;
    let mut stack: Vec<Vec<A::State>> = Vec::new();
    let mut trace: Option<Vec<Vec<A::State>>> = opts.keep_trace.then(Vec::new);

    for id in t.post_order() {
        let sym = t.symbol(id);
        let base = stack.len() - sym.arity();
        let mut out = Vec::new();
        match &stack[base..] {
            [] => a.transitions(sym, &[], &mut out),
            [c] => {
                for q in c {
                    a.transitions(sym, &[q], &mut out);
                }
            }
            [l, r] => {
                for q1 in l {
                    for q2 in r {
                        a.transitions(sym, &[q1, q2], &mut out);
                    }
                }
            }
            _ => unreachable!("arity at most 2"),
        }
        out.sort();
        out.dedup();
        ndeg = ndeg.max(out.len());
        for q in &out {
            if !seen.contains(q) {
                max_bytes = max_bytes.max(q.encoded_len());
                seen.insert(q.clone());
            }
        }
        stack.truncate(base);
        if let Some(tr) = trace.as_mut() {
            tr.push(out.clone());
        }
        stack.push(out);
    }

    let root = stack.pop().expect("term is nonempty");
    let accepted = root.iter().any(|q| a.is_accepting(q));
    let stats = RunStats {
        nodes: t.len(),
        distinct_states: seen.len(),
        max_state_bytes: max_bytes,
        ndeg,
        millis: start.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1000.0),
        accepted,
    };
    Ok(StarRun { root, accepted, stats, trace })
}
