use std::collections::BTreeSet;

use super::run::{run_deterministic, run_star, RunOptions, RunStats};
use super::{FlyAutomaton, RunError, Signature, StateValue};
use crate::label::Label;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub accepted: bool,
    pub stats: RunStats,
}

/// One state seen during a full run, reduced to what property tests need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisitedState {
    pub node: usize,
    pub labels: BTreeSet<Label>,
    pub bytes: usize,
}

/// Object-safe view of a [`FlyAutomaton`], used where automata with
/// different state types are handled uniformly.
pub trait DynAutomaton: Send + Sync {
    fn signature(&self) -> Signature;

    fn is_deterministic(&self) -> bool;

    /// Decides membership: the unique run if deterministic, `run*` otherwise.
    fn check(&self, t: &Term, opts: &RunOptions) -> Result<Verdict, RunError>;

    /// Every state of `run*` at every node, without early exit.
    fn visited(&self, t: &Term) -> Result<Vec<VisitedState>, RunError>;

    /// Debug renderings of the state set at every node (post-order).
    fn trace(&self, t: &Term) -> Result<(bool, Vec<Vec<String>>), RunError>;
}

struct Erased<A>(A);

/// Wraps an automaton as a trait object.
pub fn erase<A: FlyAutomaton + 'static>(a: A) -> Box<dyn DynAutomaton> {
    Box::new(Erased(a))
}

impl<A: FlyAutomaton> DynAutomaton for Erased<A> {
    fn signature(&self) -> Signature {
        self.0.signature()
    }

    fn is_deterministic(&self) -> bool {
        self.0.is_deterministic()
    }

    fn check(&self, t: &Term, opts: &RunOptions) -> Result<Verdict, RunError> {
        if self.0.is_deterministic() {
            let r = run_deterministic(&self.0, t, opts)?;
            Ok(Verdict { accepted: r.accepted, stats: r.stats })
        } else {
            let r = run_star(&self.0, t, opts)?;
            Ok(Verdict { accepted: r.accepted, stats: r.stats })
        }
    }

    fn visited(&self, t: &Term) -> Result<Vec<VisitedState>, RunError> {
        let (_, per_node) = self.states_per_node(t)?;
        let mut out = Vec::new();
        for (node, states) in per_node.into_iter().enumerate() {
            for q in states {
                let mut labels = BTreeSet::new();
                q.collect_labels(&mut labels);
                out.push(VisitedState { node, labels, bytes: q.encoded_len() });
            }
        }
        Ok(out)
    }

    fn trace(&self, t: &Term) -> Result<(bool, Vec<Vec<String>>), RunError> {
        let (accepted, per_node) = self.states_per_node(t)?;
        let rendered =
            per_node.iter().map(|qs| qs.iter().map(|q| format!("{q:?}")).collect()).collect();
        Ok((accepted, rendered))
    }
}

impl<A: FlyAutomaton> Erased<A> {
    fn states_per_node(&self, t: &Term) -> Result<(bool, Vec<Vec<A::State>>), RunError> {
        let opts = RunOptions { timing: false, ..RunOptions::traced() };
        if self.0.is_deterministic() {
            let r = run_deterministic(&self.0, t, &opts)?;
            let trace = r.trace.expect("trace requested");
            Ok((r.accepted, trace.into_iter().map(|q| q.into_iter().collect()).collect()))
        } else {
            let r = run_star(&self.0, t, &opts)?;
            Ok((r.accepted, r.trace.expect("trace requested")))
        }
    }
}
