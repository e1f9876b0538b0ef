//! Concrete rational-time semantics of a timed automaton and the online
//! monitor for timed good windows and direct window objectives on finite
//! runs.
//!
//! Objectives are defined on infinite paths; on a finite prefix the monitor
//! reports three-valued verdicts: a window is `Closed` once its running
//! minimum priority turns even within the bound, `Broken` once the bound
//! elapses with the minimum still odd, and `Open` otherwise.

use num::Signed;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::model::{Compiled, CompiledConstraint, LocIdx};
use crate::rational::{self, Time};
use crate::region::{build_region_graph, ClockRegion, RegionGraph, RegionIdx, StateRegion, StepKind};

/// A state of the uncountable transition system: location plus exact
/// clock valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteState {
    pub location: LocIdx,
    pub valuation: Vec<Time>,
}

impl ConcreteState {
    pub fn initial(model: &Compiled) -> Self {
        ConcreteState {
            location: model.initial,
            valuation: vec![rational::zero(); model.clock_count()],
        }
    }

    pub fn gamma(&self, model: &Compiled) -> &Time {
        &self.valuation[model.gamma]
    }

    pub fn region(&self, model: &Compiled) -> StateRegion {
        StateRegion {
            location: self.location,
            clocks: ClockRegion::of_valuation(&self.valuation, model.bounds())
                .expect("valuations are non-negative"),
        }
    }
}

/// A move `(delay, action)`; `action = None` is the pure delay move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub delay: Time,
    pub action: Option<String>,
}

impl Move {
    pub fn delay_only(delay: Time) -> Self {
        Move { delay, action: None }
    }
}

/// A finite run: `states[i] --moves[i]--> states[i+1]`.
///
/// `p1_responsible` records, for game runs, whether player 1 was
/// responsible for each transition; plain automaton paths leave it empty.
#[derive(Debug, Clone, Default)]
pub struct Run {
    pub states: Vec<ConcreteState>,
    pub moves: Vec<Move>,
    pub p1_responsible: Vec<bool>,
}

impl Run {
    pub fn from_initial(model: &Compiled) -> Self {
        Run {
            states: vec![ConcreteState::initial(model)],
            moves: Vec::new(),
            p1_responsible: Vec::new(),
        }
    }

    pub fn last(&self) -> &ConcreteState {
        self.states.last().expect("runs are never empty")
    }

    /// Total elapsed time, read off the global clock.
    pub fn span(&self, model: &Compiled) -> Time {
        self.last().gamma(model) - self.states[0].gamma(model)
    }

    pub fn push(&mut self, mv: Move, state: ConcreteState) {
        self.moves.push(mv);
        self.states.push(state);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MoveError {
    #[error("negative delay")]
    NegativeDelay,
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("no edge with action `{0}` is enabled: guard {1} fails")]
    GuardFailed(String, String),
    #[error("invariant {0} violated during delay")]
    InvariantDuringDelay(String),
    #[error("invariant {0} violated at edge target")]
    TargetInvariant(String),
}

/// First failing atom of a constraint on a concrete valuation, if any.
fn failing_atom(
    model: &Compiled,
    constraint: &CompiledConstraint,
    valuation: &[Time],
) -> Option<String> {
    for &(clock, relation, bound) in &constraint.atoms {
        let v = &valuation[clock];
        let b = rational::time(i64::from(bound));
        let ok = match relation {
            crate::model::Relation::Lt => *v < b,
            crate::model::Relation::Le => *v <= b,
            crate::model::Relation::Ge => *v >= b,
            crate::model::Relation::Gt => *v > b,
        };
        if !ok {
            return Some(format!(
                "{} {} {}",
                model.clock_names[clock],
                relation.symbol(),
                bound
            ));
        }
    }
    None
}

/// Applies a move to a state per the transition relation: the invariant
/// must hold after the delay, the (unique) matching edge must be enabled,
/// and the reset state must satisfy the target invariant.
pub fn apply_move(
    model: &Compiled,
    state: &ConcreteState,
    mv: &Move,
) -> Result<ConcreteState, MoveError> {
    if mv.delay.is_negative() {
        return Err(MoveError::NegativeDelay);
    }
    let mut delayed = state.valuation.clone();
    for v in &mut delayed {
        *v += &mv.delay;
    }
    if let Some(atom) = failing_atom(model, &model.invariants[state.location], &delayed) {
        return Err(MoveError::InvariantDuringDelay(atom));
    }
    let Some(action) = &mv.action else {
        return Ok(ConcreteState {
            location: state.location,
            valuation: delayed,
        });
    };

    let mut last_guard = None;
    for &ei in &model.edges_from[state.location] {
        let edge = &model.edges[ei];
        if edge.action != *action {
            continue;
        }
        match failing_atom(model, &edge.guard, &delayed) {
            Some(atom) => last_guard = Some(atom),
            None => {
                let mut reset = delayed.clone();
                for &x in &edge.resets {
                    reset[x] = rational::zero();
                }
                if let Some(atom) = failing_atom(model, &model.invariants[edge.target], &reset) {
                    return Err(MoveError::TargetInvariant(atom));
                }
                return Ok(ConcreteState {
                    location: edge.target,
                    valuation: reset,
                });
            }
        }
    }
    match last_guard {
        Some(atom) => Err(MoveError::GuardFailed(action.clone(), atom)),
        None => Err(MoveError::UnknownAction(action.clone())),
    }
}

/// Status of the window opened at a given run position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowStatus {
    /// The running minimum priority turned even after `elapsed < lambda`.
    Closed { at_index: usize, elapsed: Time },
    /// Verdict still open: minimum odd, bound not yet reached.
    Open { min_priority: u32, elapsed: Time },
    /// `lambda` time units elapsed with the minimum still odd.
    Broken { elapsed: Time },
}

/// Monitors the window opened at `start` on one priority dimension.
pub fn window_status(
    model: &Compiled,
    run: &Run,
    dimension: usize,
    start: usize,
    lambda: u64,
) -> WindowStatus {
    assert!(start < run.states.len(), "start index within run");
    let t0 = run.states[start].gamma(model).clone();
    let bound = rational::time(lambda as i64);
    let mut min_priority: Option<u32> = None;
    let mut elapsed = rational::zero();
    for (n, state) in run.states.iter().enumerate().skip(start) {
        elapsed = state.gamma(model) - &t0;
        if elapsed >= bound {
            // The running minimum over everything strictly before this
            // state is odd, otherwise the window would have closed.
            return WindowStatus::Broken { elapsed };
        }
        let p = model.priority(state.location, dimension);
        let m = min_priority.map_or(p, |m| m.min(p));
        min_priority = Some(m);
        if m % 2 == 0 {
            return WindowStatus::Closed {
                at_index: n,
                elapsed,
            };
        }
    }
    WindowStatus::Open {
        min_priority: min_priority.expect("at least the start state"),
        elapsed,
    }
}

/// Per-dimension verdict of the direct objective on a finite prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixVerdict {
    /// The window opened at this index is broken: the direct objective is
    /// conclusively violated.
    ViolatedAt(usize),
    /// Earliest window that is still open.
    PendingFrom(usize),
    /// Every window opened so far has closed.
    ClearSoFar,
}

/// Evaluates every window start on one dimension in `O(n * D)`.
///
/// A window starting at `i` closes at the first `j >= i` where the
/// priority is even and no smaller priority occurred in between; it breaks
/// if `lambda` elapses first.
pub fn dimension_verdict(
    model: &Compiled,
    run: &Run,
    dimension: usize,
    lambda: u64,
) -> PrefixVerdict {
    let n = run.states.len();
    let priorities: Vec<u32> = run
        .states
        .iter()
        .map(|s| model.priority(s.location, dimension))
        .collect();
    let gammas: Vec<&Time> = run.states.iter().map(|s| s.gamma(model)).collect();
    let bound = rational::time(lambda as i64);

    // closure[i]: first j >= i with even priority forming the running
    // minimum of [i, j]; usize::MAX when none exists in the run.
    let evens: Vec<u32> = (0..model.priority_count).filter(|p| p % 2 == 0).collect();
    let mut next_record = vec![usize::MAX; evens.len()];
    let mut closure = vec![usize::MAX; n];
    for i in (0..n).rev() {
        for (k, &e) in evens.iter().enumerate() {
            if priorities[i] == e {
                next_record[k] = i;
            } else if priorities[i] < e {
                next_record[k] = usize::MAX;
            }
        }
        closure[i] = next_record.iter().copied().min().unwrap_or(usize::MAX);
    }

    // deadline[i]: first j with gamma_j - gamma_i >= lambda (two-pointer).
    let mut deadline = vec![usize::MAX; n];
    let mut j = 0;
    for i in 0..n {
        if j < i {
            j = i;
        }
        while j < n && gammas[j] - gammas[i] < bound {
            j += 1;
        }
        if j < n {
            deadline[i] = j;
        }
    }

    let mut pending = None;
    for i in 0..n {
        match (closure[i], deadline[i]) {
            (c, d) if c < d && c != usize::MAX => {} // closed in time
            (_, d) if d != usize::MAX => return PrefixVerdict::ViolatedAt(i),
            _ => pending = pending.or(Some(i)),
        }
    }
    match pending {
        Some(i) => PrefixVerdict::PendingFrom(i),
        None => PrefixVerdict::ClearSoFar,
    }
}

/// [`dimension_verdict`] on every dimension.
pub fn check_prefix_direct(model: &Compiled, run: &Run, lambda: u64) -> Vec<PrefixVerdict> {
    (0..model.dimensions)
        .map(|k| dimension_verdict(model, run, k, lambda))
        .collect()
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("no time-divergent continuation exists from region {region}")]
pub struct DivergenceDeadlock {
    pub region: String,
}

/// Vertices of the region graph from which time can still diverge: those
/// that reach a strongly connected component containing both a
/// gamma-integral and a gamma-fractional region.
pub fn divergence_capable(model: &Compiled, graph: &RegionGraph) -> Vec<bool> {
    let n = graph.vertex_count();
    let sccs = strongly_connected_components(n, |v| graph.out[v].iter().map(|&(_, t)| t));
    let mut scc_toggles = vec![(false, false); sccs.iter().max().map_or(0, |&s| s + 1)];
    for v in 0..n {
        let int = graph.gamma_integral(model, v);
        let entry = &mut scc_toggles[sccs[v]];
        if int {
            entry.0 = true;
        } else {
            entry.1 = true;
        }
    }
    let mut capable: Vec<bool> = (0..n)
        .map(|v| scc_toggles[sccs[v]].0 && scc_toggles[sccs[v]].1)
        .collect();
    // Backward closure.
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if !capable[v] && graph.out[v].iter().any(|&(_, t)| capable[t]) {
                capable[v] = true;
                changed = true;
            }
        }
    }
    capable
}

/// Tarjan's algorithm, iterative. Returns the SCC id of each vertex.
pub fn strongly_connected_components<I>(n: usize, successors: impl Fn(usize) -> I) -> Vec<usize>
where
    I: Iterator<Item = usize>,
{
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut scc = vec![usize::MAX; n];
    let mut next_index = 0;
    let mut scc_count = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // (vertex, successor list, cursor)
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, successors(root).collect(), 0));
        while let Some(&mut (v, ref succs, ref mut cursor)) = call.last_mut() {
            if *cursor < succs.len() {
                let w = succs[*cursor];
                *cursor += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, successors(w).collect(), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack nonempty");
                        on_stack[w] = false;
                        scc[w] = scc_count;
                        if w == v {
                            break;
                        }
                    }
                    scc_count += 1;
                }
                call.pop();
                if let Some(&mut (parent, _, _)) = call.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }
    scc
}

/// Generates `count` runs by uniformly choosing among enabled region-level
/// options, realizing delays at midpoints. Every returned run has a global
/// clock span of at least `horizon`; generation is deterministic per seed.
pub fn sample_runs(
    model: &Compiled,
    count: usize,
    horizon: &Time,
    seed: u64,
) -> Result<Vec<Run>, DivergenceDeadlock> {
    let graph = build_region_graph(model);
    sample_runs_on(model, &graph, count, horizon, seed)
}

/// [`sample_runs`] against a prebuilt region graph.
pub fn sample_runs_on(
    model: &Compiled,
    graph: &RegionGraph,
    count: usize,
    horizon: &Time,
    seed: u64,
) -> Result<Vec<Run>, DivergenceDeadlock> {
    let capable = divergence_capable(model, graph);
    if !capable[graph.initial] {
        return Err(DivergenceDeadlock {
            region: graph.regions[graph.initial].canonical_string(model),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = Vec::with_capacity(count);
    for _ in 0..count {
        runs.push(random_walk(model, graph, &capable, horizon, &mut rng));
    }
    Ok(runs)
}

fn random_walk(
    model: &Compiled,
    graph: &RegionGraph,
    capable: &[bool],
    horizon: &Time,
    rng: &mut ChaCha8Rng,
) -> Run {
    let mut run = Run::from_initial(model);
    let mut region = graph.initial;
    while &run.span(model) < horizon {
        let options: Vec<&(StepKind, RegionIdx)> = graph.out[region]
            .iter()
            .filter(|&&(_, t)| capable[t])
            .collect();
        let &(kind, target) = *options
            .choose(rng)
            .expect("divergence-capable regions keep a capable successor");
        let state = run.last();
        let mv = match kind {
            StepKind::Delay => {
                let delta = graph.regions[region].clocks.step_delay(&state.valuation);
                Move::delay_only(delta)
            }
            StepKind::Edge(ei) => Move {
                delay: rational::zero(),
                action: Some(model.edges[ei].action.clone()),
            },
        };
        let next = apply_move(model, state, &mv).expect("region-level options are enabled");
        debug_assert_eq!(next.region(model), graph.regions[target]);
        run.push(mv, next);
        region = target;
    }
    run
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{ClockConstraint, Compiled, Relation};
    use crate::rational::{ratio, time};

    fn compiled_figure() -> Compiled {
        let (a, p) = fixtures::figure_automaton();
        Compiled::new(&a, &p).unwrap()
    }

    fn mv(delay: Time, action: Option<&str>) -> Move {
        Move {
            delay,
            action: action.map(str::to_string),
        }
    }

    #[test]
    fn apply_move_follows_paper_example() {
        let model = compiled_figure();
        let s0 = ConcreteState::initial(&model);
        let s1 = apply_move(&model, &s0, &mv(time(1), Some("a"))).unwrap();
        assert_eq!(model.location_names[s1.location], "l1");
        assert_eq!(s1.valuation, vec![time(1), time(1)]);

        // Zero-delay bottom move is the identity.
        let same = apply_move(&model, &s1, &mv(time(0), None)).unwrap();
        assert_eq!(same, s1);
    }

    #[test]
    fn apply_move_names_the_failing_invariant() {
        let model = compiled_figure();
        let s = ConcreteState {
            location: 0,
            valuation: vec![ratio(1, 2), ratio(1, 2)],
        };
        let err = apply_move(&model, &s, &mv(time(1), Some("a"))).unwrap_err();
        assert_eq!(err, MoveError::InvariantDuringDelay("x <= 1".into()));
        let err = apply_move(&model, &s, &mv(time(0), Some("zz"))).unwrap_err();
        assert_eq!(err, MoveError::UnknownAction("zz".into()));
    }

    /// The run (l0,0)(l1,1)(l1,2)(l1,3) used in the strictness lemma.
    fn divergent_in_l1(model: &Compiled) -> Run {
        let mut run = Run::from_initial(model);
        let s1 = apply_move(model, run.last(), &mv(time(1), Some("a"))).unwrap();
        run.push(mv(time(1), Some("a")), s1);
        for _ in 0..2 {
            let next = apply_move(model, run.last(), &mv(time(1), None)).unwrap();
            run.push(mv(time(1), None), next);
        }
        run
    }

    #[test]
    fn window_breaks_when_no_small_even_priority_is_seen() {
        let model = compiled_figure();
        let run = divergent_in_l1(&model);
        // From the start the minimum stays 1 (odd): broken at elapsed 2.
        assert_eq!(
            window_status(&model, &run, 0, 0, 2),
            WindowStatus::Broken { elapsed: time(2) }
        );
        // From index 1 only the even priority 2 appears.
        assert_eq!(
            window_status(&model, &run, 0, 1, 1),
            WindowStatus::Closed {
                at_index: 1,
                elapsed: time(0)
            }
        );
    }

    #[test]
    fn window_closes_immediately_on_even_start() {
        let model = compiled_figure();
        let mut run = Run::from_initial(&model);
        for action in ["a", "a"] {
            let next = apply_move(&model, run.last(), &mv(time(0), Some(action))).unwrap();
            run.push(mv(time(0), Some(action)), next);
        }
        // Now at l2 with priority 0.
        assert_eq!(
            window_status(&model, &run, 0, 2, 7),
            WindowStatus::Closed {
                at_index: 2,
                elapsed: time(0)
            }
        );
    }

    #[test]
    fn prefix_verdicts_on_figure_runs() {
        let model = compiled_figure();
        let run = divergent_in_l1(&model);
        assert_eq!(check_prefix_direct(&model, &run, 2), vec![PrefixVerdict::ViolatedAt(0)]);

        // A short run with an odd minimum and too little elapsed time.
        let mut short = Run::from_initial(&model);
        let next = apply_move(&model, short.last(), &mv(ratio(1, 2), None)).unwrap();
        short.push(mv(ratio(1, 2), None), next);
        assert_eq!(
            check_prefix_direct(&model, &short, 1),
            vec![PrefixVerdict::PendingFrom(0)]
        );
    }

    #[test]
    fn clear_verdict_on_even_only_run() {
        let (a, p) = fixtures::one_location(ClockConstraint::truth(), 0);
        let model = Compiled::new(&a, &p).unwrap();
        let mut run = Run::from_initial(&model);
        for _ in 0..4 {
            let next = apply_move(&model, run.last(), &mv(ratio(1, 2), None)).unwrap();
            run.push(mv(ratio(1, 2), None), next);
        }
        assert_eq!(check_prefix_direct(&model, &run, 3), vec![PrefixVerdict::ClearSoFar]);
    }

    #[test]
    fn dimension_verdict_agrees_with_naive_scan() {
        let model = compiled_figure();
        let runs = sample_runs(&model, 8, &time(6), 11).unwrap();
        for run in &runs {
            for lambda in [0, 1, 2, 5] {
                let fast = dimension_verdict(&model, run, 0, lambda);
                let naive = naive_verdict(&model, run, 0, lambda);
                assert_eq!(fast, naive, "lambda={lambda}");
            }
        }
    }

    fn naive_verdict(model: &Compiled, run: &Run, dim: usize, lambda: u64) -> PrefixVerdict {
        let mut pending = None;
        for i in 0..run.states.len() {
            match window_status(model, run, dim, i, lambda) {
                WindowStatus::Broken { .. } => return PrefixVerdict::ViolatedAt(i),
                WindowStatus::Open { .. } => pending = pending.or(Some(i)),
                WindowStatus::Closed { .. } => {}
            }
        }
        match pending {
            Some(i) => PrefixVerdict::PendingFrom(i),
            None => PrefixVerdict::ClearSoFar,
        }
    }

    #[test]
    fn sampling_is_deterministic_and_reaches_horizon() {
        let model = compiled_figure();
        let a = sample_runs(&model, 3, &time(10), 42).unwrap();
        let b = sample_runs(&model, 3, &time(10), 42).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.states, y.states);
        }
        for run in &a {
            assert!(run.span(&model) >= time(10));
        }
        let c = sample_runs(&model, 1, &time(10), 43).unwrap();
        assert!(a[0].states != c[0].states || a[0].moves.len() != c[0].moves.len());
    }

    #[test]
    fn invariant_trap_reports_divergence_deadlock() {
        let (a, p) = fixtures::one_location(ClockConstraint::atom("x", Relation::Le, 1), 0);
        let model = Compiled::new(&a, &p).unwrap();
        let err = sample_runs(&model, 1, &time(5), 1).unwrap_err();
        assert!(err.region.contains("l0"));
    }

    #[test]
    fn monitor_is_monotone_in_lambda_and_extension() {
        let model = compiled_figure();
        let run = divergent_in_l1(&model);
        // Broken for lambda implies broken for every smaller lambda.
        for lambda in 0..=2 {
            assert!(matches!(
                window_status(&model, &run, 0, 0, lambda),
                WindowStatus::Broken { .. }
            ));
        }
        // Closed for lambda implies closed for every larger lambda.
        for lambda in 1..=5 {
            assert!(matches!(
                window_status(&model, &run, 0, 1, lambda),
                WindowStatus::Closed { .. }
            ));
        }
        // Extension keeps closed windows closed and broken windows broken.
        let mut extended = run.clone();
        let next = apply_move(&model, extended.last(), &mv(time(1), None)).unwrap();
        extended.push(mv(time(1), None), next);
        assert!(matches!(
            window_status(&model, &extended, 0, 0, 2),
            WindowStatus::Broken { .. }
        ));
        assert!(matches!(
            window_status(&model, &extended, 0, 1, 1),
            WindowStatus::Closed { .. }
        ));
    }

    #[test]
    fn sampled_steps_agree_with_region_abstraction() {
        let model = compiled_figure();
        let graph = build_region_graph(&model);
        let runs = sample_runs(&model, 4, &time(4), 7).unwrap();
        for run in &runs {
            for state in &run.states {
                assert!(graph.lookup(&state.region(&model)).is_some());
            }
        }
    }
}
