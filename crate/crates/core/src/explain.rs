//! Smallest explanation and enumeration of all subset-minimal explanations.
//!
//! Both work on the features of an [`ExplanationProblem`] in non-increasing
//! delta order. The enumeration is a depth-first search over "pick" /
//! "skip" decisions for each sorted position, exploring "pick" first. A
//! node is a leaf as soon as its picked total covers phi, and a node is
//! only entered when the picked total plus every remaining delta still
//! covers phi, so every branch ends in an explanation. Between two
//! consecutive explanations the search does linear work in the number of
//! features.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::problem::ExplanationProblem;
use crate::xlc::Literal;

/// A subset-minimal set of fixed features (0-based, ascending).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiExplanation {
    features: Vec<usize>,
}

impl PiExplanation {
    pub fn new(mut features: Vec<usize>) -> Self {
        features.sort_unstable();
        PiExplanation { features }
    }

    pub fn features(&self) -> &[usize] {
        &self.features
    }

    pub fn cardinality(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Rendered literals, when the problem was derived from a model.
    pub fn literals(&self, problem: &ExplanationProblem) -> Vec<Literal> {
        self.features
            .iter()
            .filter_map(|&j| problem.literal(j))
            .collect()
    }

    pub fn into_features(self) -> Vec<usize> {
        self.features
    }
}

/// Greedy smallest explanation: take sorted deltas until they cover phi.
pub fn find_one(problem: &ExplanationProblem) -> Result<PiExplanation> {
    let mut picked = Vec::new();
    let mut residual = problem.phi();
    for &j in problem.search_order() {
        if problem.residual_covered(residual) {
            break;
        }
        residual -= problem.deltas()[j];
        picked.push(j);
    }
    if !problem.residual_covered(residual) {
        return Err(Error::Infeasible);
    }
    Ok(PiExplanation::new(picked))
}

/// Decision taken at one sorted position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flip {
    Unused,
    Picked,
    Backtracked,
}

/// Outcome of [`backtrack_to_valid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Continue,
    Exhausted,
}

/// Search state of the enumeration, over sorted positions.
///
/// `residuals[r]` is phi minus the picked deltas above depth `r`, kept per
/// depth so that backtracking restores it exactly. `suffix[r]` is the sum of
/// sorted deltas from position `r` on.
#[derive(Clone, Debug)]
pub struct EnumerationState {
    pub flip: Vec<Flip>,
    pub depth: usize,
    residuals: Vec<f64>,
    deltas: Vec<f64>,
    suffix: Vec<f64>,
}

impl EnumerationState {
    pub fn new(problem: &ExplanationProblem) -> Self {
        let deltas: Vec<f64> = problem
            .search_order()
            .iter()
            .map(|&j| problem.deltas()[j])
            .collect();
        let mut suffix = vec![0.0; deltas.len() + 1];
        for r in (0..deltas.len()).rev() {
            suffix[r] = suffix[r + 1] + deltas[r];
        }
        let mut residuals = vec![0.0; deltas.len() + 1];
        residuals[0] = problem.phi();
        EnumerationState {
            flip: vec![Flip::Unused; deltas.len()],
            depth: 0,
            residuals,
            deltas,
            suffix,
        }
    }

    /// Phi minus the deltas picked on the path to the current node.
    pub fn residual(&self) -> f64 {
        self.residuals[self.depth]
    }

    /// Whether the current node's picked total covers phi.
    pub fn is_leaf(&self, problem: &ExplanationProblem) -> bool {
        problem.residual_covered(self.residual())
    }

    /// Pruning rule: some completion of the current prefix covers phi.
    pub fn admits_leaf(&self, problem: &ExplanationProblem) -> bool {
        if problem.is_strict() {
            self.suffix[self.depth] > self.residual()
        } else {
            self.suffix[self.depth] >= self.residual()
        }
    }

    /// Greedy descent from the current node, picking every position until
    /// the node is a leaf. Returns `false` if positions run out first,
    /// which cannot happen from a node that passed the pruning rule.
    pub fn descend(&mut self, problem: &ExplanationProblem) -> bool {
        while !self.is_leaf(problem) {
            if self.depth == self.deltas.len() {
                return false;
            }
            let r = self.depth;
            self.flip[r] = Flip::Picked;
            self.residuals[r + 1] = self.residuals[r] - self.deltas[r];
            self.depth = r + 1;
        }
        true
    }

    /// Sorted positions picked on the path to the current node.
    pub fn picked_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.flip[..self.depth]
            .iter()
            .enumerate()
            .filter(|(_, f)| **f == Flip::Picked)
            .map(|(r, _)| r)
    }

    /// Approximate heap footprint of the state in bytes.
    pub fn heap_bytes(&self) -> usize {
        self.flip.capacity() * std::mem::size_of::<Flip>()
            + (self.residuals.capacity() + self.deltas.capacity() + self.suffix.capacity())
                * std::mem::size_of::<f64>()
    }
}

/// Moves the search from a leaf (or a pruned node) to the next node that is
/// guaranteed to lead to a leaf.
///
/// Walks up from the current depth to the deepest picked position, turns it
/// into a skip and restores the residual. If the skip branch cannot reach
/// phi any more, keeps walking up. Positions below the new depth are reset
/// to unused.
pub fn backtrack_to_valid(state: &mut EnumerationState, problem: &ExplanationProblem) -> Step {
    let mut r = state.depth;
    while r > 0 {
        r -= 1;
        match state.flip[r] {
            Flip::Picked => {
                state.flip[r] = Flip::Backtracked;
                state.residuals[r + 1] = state.residuals[r];
                state.depth = r + 1;
                if state.admits_leaf(problem) {
                    return Step::Continue;
                }
                state.flip[r] = Flip::Unused;
            }
            Flip::Backtracked | Flip::Unused => state.flip[r] = Flip::Unused,
        }
    }
    state.depth = 0;
    Step::Exhausted
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Start,
    Running,
    Done,
}

/// Resumable enumeration of all subset-minimal explanations.
///
/// Memory is linear in the number of features; each explanation is
/// produced after linear work. The first explanation is the greedy
/// smallest one.
pub struct Enumerator<'p> {
    problem: &'p ExplanationProblem,
    state: EnumerationState,
    remaining: Option<usize>,
    phase: Phase,
}

impl<'p> Enumerator<'p> {
    pub fn new(problem: &'p ExplanationProblem, limit: Option<usize>) -> Self {
        Enumerator {
            problem,
            state: EnumerationState::new(problem),
            remaining: limit,
            phase: Phase::Start,
        }
    }

    pub fn state(&self) -> &EnumerationState {
        &self.state
    }

    /// `true` once the search space is exhausted (not merely the limit hit).
    pub fn is_exhausted(&self) -> bool {
        self.phase == Phase::Done
    }

    fn current(&self) -> PiExplanation {
        let order = self.problem.search_order();
        let explanation =
            PiExplanation::new(self.state.picked_positions().map(|r| order[r]).collect());
        debug_assert!(self.problem.is_explanation(explanation.features()));
        explanation
    }

    fn advance(&mut self) -> bool {
        match self.phase {
            Phase::Done => return false,
            Phase::Start => {
                self.phase = Phase::Running;
                if !self.state.admits_leaf(self.problem) && !self.state.is_leaf(self.problem) {
                    self.phase = Phase::Done;
                    return false;
                }
            }
            Phase::Running => {
                if backtrack_to_valid(&mut self.state, self.problem) == Step::Exhausted {
                    self.phase = Phase::Done;
                    return false;
                }
            }
        }
        let reached = self.state.descend(self.problem);
        debug_assert!(reached, "pruning admitted a node without a leaf below it");
        if !reached {
            self.phase = Phase::Done;
        }
        reached
    }
}

impl Iterator for Enumerator<'_> {
    type Item = PiExplanation;

    fn next(&mut self) -> Option<PiExplanation> {
        if self.remaining == Some(0) {
            return None;
        }
        if !self.advance() {
            return None;
        }
        if let Some(n) = self.remaining.as_mut() {
            *n -= 1;
        }
        Some(self.current())
    }
}

/// Enumerates every subset-minimal explanation, up to `limit` of them.
pub fn enumerate(problem: &ExplanationProblem, limit: Option<usize>) -> Enumerator<'_> {
    Enumerator::new(problem, limit)
}

/// Elapsed time since the start of enumeration at each yield.
///
/// With a limit, the timestamp buffer is allocated and written once before
/// the clock starts so that first-touch page faults do not show up as gaps.
pub fn delay_probe(problem: &ExplanationProblem, limit: Option<usize>) -> Vec<Duration> {
    let mut stamps = vec![Duration::ZERO; limit.unwrap_or(0).min(1 << 24)];
    let mut count = 0;
    let start = Instant::now();
    for explanation in enumerate(problem, limit) {
        std::hint::black_box(&explanation);
        let now = start.elapsed();
        if count < stamps.len() {
            stamps[count] = now;
        } else {
            stamps.push(now);
        }
        count += 1;
    }
    stamps.truncate(count);
    stamps
}
