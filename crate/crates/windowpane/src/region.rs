//! Clock regions: the canonical finite quotient of clock valuations, with
//! reset and delay-successor operations and the region graph built from
//! them.
//!
//! A region stores, per clock, either the integral part `k` of the clock
//! (while the clock is at most its largest compared constant) or the fact
//! that it has passed that constant, plus the ordering of the fractional
//! parts of the tracked clocks. The global clock's fractional part is
//! tracked forever, even after it passes its largest constant — that is
//! what makes the passage of integer time bounds (ticks) visible at region
//! level.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::model::{ClockIdx, Compiled, CompiledConstraint, EdgeIdx, LocIdx, Relation};
use crate::rational::{self, Time};

/// Integral information for one clock inside a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClockInterval {
    /// `floor(v(x)) = k` and `v(x) <= c_x`.
    Bounded(u32),
    /// `v(x) > c_x`.
    Above,
}

/// Bounds context for region operations: which clock is the global clock
/// and the largest constant each clock is compared to.
#[derive(Debug, Clone, Copy)]
pub struct Bounds<'a> {
    pub gamma: ClockIdx,
    pub max_consts: &'a [u32],
}

impl Compiled {
    pub fn bounds(&self) -> Bounds<'_> {
        Bounds {
            gamma: self.gamma,
            max_consts: &self.max_consts,
        }
    }
}

/// A canonical clock region.
///
/// `blocks[0]` is the zero-fraction block (possibly empty); `blocks[1..]`
/// are nonempty and ordered by strictly increasing fractional part. Every
/// tracked clock (bounded interval, or the global clock) sits in exactly
/// one block; untracked clocks appear in none. Block members are sorted by
/// clock index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockRegion {
    pub intervals: Vec<ClockInterval>,
    pub blocks: Vec<Vec<ClockIdx>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("negative valuation for clock index {0}")]
    NegativeValuation(ClockIdx),
    #[error("constant {bound} on clock index {clock} exceeds region granularity {max}")]
    Granularity {
        clock: ClockIdx,
        bound: u32,
        max: u32,
    },
    #[error("the global clock cannot be reset")]
    GlobalClockReset,
}

impl ClockRegion {
    fn tracked(&self, x: ClockIdx, bounds: Bounds<'_>) -> bool {
        x == bounds.gamma || matches!(self.intervals[x], ClockInterval::Bounded(_))
    }

    /// Region of a concrete valuation.
    pub fn of_valuation(valuation: &[Time], bounds: Bounds<'_>) -> Result<Self, RegionError> {
        use num::Signed;
        let n = valuation.len();
        let mut intervals = Vec::with_capacity(n);
        for (x, v) in valuation.iter().enumerate() {
            if v.is_negative() {
                return Err(RegionError::NegativeValuation(x));
            }
            let floor = rational::floor_u64(v);
            if floor > u64::from(bounds.max_consts[x])
                || (floor == u64::from(bounds.max_consts[x]) && !rational::is_integral(v))
            {
                intervals.push(ClockInterval::Above);
            } else {
                intervals.push(ClockInterval::Bounded(floor as u32));
            }
        }
        let mut region = ClockRegion {
            intervals,
            blocks: vec![Vec::new()],
        };
        // Group tracked clocks by fractional part, ascending.
        let mut fracs: Vec<(Time, ClockIdx)> = (0..n)
            .filter(|&x| region.tracked(x, bounds))
            .map(|x| (rational::frac(&valuation[x]), x))
            .collect();
        fracs.sort();
        for (f, x) in fracs {
            if f == rational::zero() {
                region.blocks[0].push(x);
            } else {
                let fits_last = region.blocks.len() > 1
                    && rational::frac(&valuation[*region.blocks.last().unwrap().last().unwrap()])
                        == f;
                if fits_last {
                    region.blocks.last_mut().unwrap().push(x);
                } else {
                    region.blocks.push(vec![x]);
                }
            }
        }
        Ok(region)
    }

    /// Region containing the zero valuation.
    pub fn zero(clock_count: usize, bounds: Bounds<'_>) -> Self {
        let _ = bounds;
        ClockRegion {
            intervals: vec![ClockInterval::Bounded(0); clock_count],
            blocks: vec![(0..clock_count).collect()],
        }
    }

    /// Whether the global clock currently has an integral value.
    pub fn gamma_integral(&self, bounds: Bounds<'_>) -> bool {
        self.blocks[0].contains(&bounds.gamma)
    }

    /// Uniform satisfaction of a constraint atom inside the region. Errors
    /// when the atom's constant exceeds the granularity the region was
    /// built for.
    pub fn satisfies_atom(
        &self,
        clock: ClockIdx,
        relation: Relation,
        bound: u32,
        bounds: Bounds<'_>,
    ) -> Result<bool, RegionError> {
        if bound > bounds.max_consts[clock] {
            return Err(RegionError::Granularity {
                clock,
                bound,
                max: bounds.max_consts[clock],
            });
        }
        let c = i64::from(bound);
        Ok(match self.intervals[clock] {
            ClockInterval::Above => matches!(relation, Relation::Ge | Relation::Gt),
            ClockInterval::Bounded(k) => {
                let k = i64::from(k);
                if self.blocks[0].contains(&clock) {
                    relation.holds(k, c)
                } else {
                    // k < v < k + 1 and c is an integer.
                    match relation {
                        Relation::Lt | Relation::Le => k < c,
                        Relation::Ge | Relation::Gt => k >= c,
                    }
                }
            }
        })
    }

    pub fn satisfies(
        &self,
        constraint: &CompiledConstraint,
        bounds: Bounds<'_>,
    ) -> Result<bool, RegionError> {
        for &(clock, relation, bound) in &constraint.atoms {
            if !self.satisfies_atom(clock, relation, bound, bounds)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Resets the given clocks to zero. The global clock must not be among
    /// them.
    pub fn reset(&self, resets: &[ClockIdx], bounds: Bounds<'_>) -> Result<Self, RegionError> {
        if resets.contains(&bounds.gamma) {
            return Err(RegionError::GlobalClockReset);
        }
        let mut region = self.clone();
        for &x in resets {
            region.intervals[x] = ClockInterval::Bounded(0);
            for block in &mut region.blocks {
                block.retain(|&y| y != x);
            }
            region.blocks[0].push(x);
        }
        region.blocks[0].sort_unstable();
        let zero = region.blocks.remove(0);
        region.blocks.retain(|b| !b.is_empty());
        region.blocks.insert(0, zero);
        Ok(region)
    }

    /// The immediate delay successor.
    ///
    /// If the zero-fraction block is nonempty, its clocks acquire an
    /// infinitesimal positive fraction (clocks exactly at their maximal
    /// constant pass it and stop being tracked; the global clock never
    /// does). Otherwise the maximal-fraction block wraps to the next
    /// integer and becomes the new zero block.
    pub fn delay_successor(&self, bounds: Bounds<'_>) -> Self {
        let mut region = self.clone();
        if !region.blocks[0].is_empty() {
            let zero = std::mem::take(&mut region.blocks[0]);
            let mut opened = Vec::new();
            for x in zero {
                match region.intervals[x] {
                    ClockInterval::Bounded(k) if k == bounds.max_consts[x] => {
                        region.intervals[x] = ClockInterval::Above;
                        if x == bounds.gamma {
                            opened.push(x);
                        }
                    }
                    ClockInterval::Bounded(_) => opened.push(x),
                    ClockInterval::Above => {
                        debug_assert_eq!(x, bounds.gamma);
                        opened.push(x);
                    }
                }
            }
            if !opened.is_empty() {
                region.blocks.insert(1, opened);
            }
        } else {
            debug_assert!(region.blocks.len() > 1, "the global clock is always tracked");
            let mut top = region.blocks.pop().expect("nonempty block list");
            for &x in &top {
                if let ClockInterval::Bounded(k) = region.intervals[x] {
                    debug_assert!(k < bounds.max_consts[x]);
                    region.intervals[x] = ClockInterval::Bounded(k + 1);
                }
            }
            top.sort_unstable();
            region.blocks[0] = top;
        }
        region
    }

    /// Exact delay that moves a member valuation of this region to the
    /// immediate successor region, realized at the midpoint of the open
    /// step (and exactly on the boundary for wrap steps).
    pub fn step_delay(&self, valuation: &[Time]) -> Time {
        let max_frac = self
            .blocks
            .iter()
            .skip(1)
            .flatten()
            .map(|&x| rational::frac(&valuation[x]))
            .max()
            .unwrap_or_else(rational::zero);
        let gap = rational::one() - max_frac;
        if self.blocks[0].is_empty() {
            gap
        } else {
            gap / rational::time(2)
        }
    }

    /// A representative valuation: fractional parts are spread evenly over
    /// `(0, 1)` by block index.
    pub fn representative(&self, bounds: Bounds<'_>) -> Vec<Time> {
        let n = self.intervals.len();
        let denom = self.blocks.len() as i64 + 1;
        let mut valuation = vec![rational::zero(); n];
        for x in 0..n {
            let base = match self.intervals[x] {
                ClockInterval::Bounded(k) => i64::from(k),
                ClockInterval::Above => i64::from(bounds.max_consts[x]) + 1,
            };
            let block = self
                .blocks
                .iter()
                .position(|b| b.contains(&x))
                .unwrap_or(0);
            valuation[x] = rational::time(base) + rational::ratio(block as i64, denom);
        }
        valuation
    }

    /// Canonical textual encoding, stable across runs.
    pub fn canonical_string(&self, clock_names: &[String]) -> String {
        let mut s = String::new();
        for (x, iv) in self.intervals.iter().enumerate() {
            if x > 0 {
                s.push(',');
            }
            match iv {
                ClockInterval::Above => {
                    let _ = write!(s, "{}:above", clock_names[x]);
                }
                ClockInterval::Bounded(k) => {
                    let positive_frac = self.blocks.iter().skip(1).any(|b| b.contains(&x));
                    let _ = write!(
                        s,
                        "{}:{}{}",
                        clock_names[x],
                        k,
                        if positive_frac { "+" } else { "" }
                    );
                }
            }
        }
        s.push_str("|frac:");
        for (i, block) in self.blocks.iter().enumerate() {
            let names: Vec<&str> = block.iter().map(|&x| clock_names[x].as_str()).collect();
            let _ = write!(s, "({}:{{{}}})", i, names.join(","));
        }
        s
    }
}

/// A state region: location plus clock region.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateRegion {
    pub location: LocIdx,
    pub clocks: ClockRegion,
}

impl StateRegion {
    pub fn canonical_string(&self, model: &Compiled) -> String {
        format!(
            "{}|{}",
            model.location_names[self.location],
            self.clocks.canonical_string(&model.clock_names)
        )
    }
}

/// Kind of a region-graph transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// To the immediate delay successor.
    Delay,
    /// Through the given automaton edge, fired without further delay.
    Edge(EdgeIdx),
}

pub type RegionIdx = usize;

/// The reachable region abstraction: one vertex per reachable state region,
/// delay steps to immediate successors only, edge steps from regions whose
/// guard already holds.
#[derive(Debug, Clone)]
pub struct RegionGraph {
    pub regions: Vec<StateRegion>,
    pub initial: RegionIdx,
    pub out: Vec<Vec<(StepKind, RegionIdx)>>,
    index: HashMap<StateRegion, RegionIdx>,
}

impl RegionGraph {
    pub fn vertex_count(&self) -> usize {
        self.regions.len()
    }

    pub fn lookup(&self, region: &StateRegion) -> Option<RegionIdx> {
        self.index.get(region).copied()
    }

    /// Number of distinct clock regions among the reachable vertices.
    pub fn clock_region_count(&self) -> usize {
        let mut seen: Vec<&ClockRegion> = self.regions.iter().map(|r| &r.clocks).collect();
        seen.sort();
        seen.dedup();
        seen.len()
    }

    /// The delay-successor path from `start`: follows delay edges until
    /// none is available (invariant truncation) or a region repeats.
    /// Returns the visited vertices (`start` first) and, on repetition,
    /// the in-path index of the repeated region.
    pub fn delay_path(&self, start: RegionIdx) -> (Vec<RegionIdx>, Option<usize>) {
        let mut path = vec![start];
        let mut cycle_start = None;
        loop {
            let cur = *path.last().unwrap();
            let next = self
                .out[cur]
                .iter()
                .find(|(kind, _)| *kind == StepKind::Delay)
                .map(|&(_, t)| t);
            match next {
                None => break,
                Some(n) => {
                    if let Some(pos) = path.iter().position(|&r| r == n) {
                        cycle_start = Some(pos);
                        break;
                    }
                    path.push(n);
                }
            }
        }
        (path, cycle_start)
    }

    /// Vertices on the path whose global clock is integral.
    pub fn gamma_integral(&self, model: &Compiled, idx: RegionIdx) -> bool {
        self.regions[idx].clocks.gamma_integral(model.bounds())
    }
}

/// Maximal prefix of the delay-successor sequence whose members satisfy the
/// location invariant, truncated at the first repetition (`cycle_start`
/// marks the first occurrence) or the first invariant violation.
pub fn delay_chain(
    start: &ClockRegion,
    invariant: &CompiledConstraint,
    bounds: Bounds<'_>,
) -> (Vec<ClockRegion>, Option<usize>) {
    debug_assert!(start.satisfies(invariant, bounds).unwrap_or(false));
    let mut chain = vec![start.clone()];
    loop {
        let next = chain.last().unwrap().delay_successor(bounds);
        if !next.satisfies(invariant, bounds).unwrap_or(false) {
            return (chain, None);
        }
        if let Some(pos) = chain.iter().position(|r| *r == next) {
            return (chain, Some(pos));
        }
        chain.push(next);
    }
}

/// Upper bound on the number of clock regions:
/// `|C|! * 2^|C| * prod(2 c_x + 1)`.
pub fn clock_region_bound(model: &Compiled) -> u64 {
    let c = model.clock_count() as u64;
    let factorial: u64 = (1..=c).product::<u64>().max(1);
    let product: u64 = model
        .max_consts
        .iter()
        .map(|&cx| 2 * u64::from(cx) + 1)
        .product();
    factorial * (1u64 << c) * product
}

/// Breadth-first closure of the region abstraction from the initial state
/// region.
pub fn build_region_graph(model: &Compiled) -> RegionGraph {
    let bounds = model.bounds();
    let initial_region = StateRegion {
        location: model.initial,
        clocks: ClockRegion::zero(model.clock_count(), bounds),
    };
    debug_assert!(initial_region
        .clocks
        .satisfies(&model.invariants[model.initial], bounds)
        .unwrap_or(false));

    let mut graph = RegionGraph {
        regions: vec![initial_region.clone()],
        initial: 0,
        out: vec![Vec::new()],
        index: HashMap::from([(initial_region, 0)]),
    };
    let mut work = vec![0usize];
    while let Some(cur) = work.pop() {
        let StateRegion { location, clocks } = graph.regions[cur].clone();
        let mut successors: Vec<(StepKind, StateRegion)> = Vec::new();

        let next = clocks.delay_successor(bounds);
        if next
            .satisfies(&model.invariants[location], bounds)
            .expect("invariant constants are within granularity")
        {
            successors.push((StepKind::Delay, StateRegion { location, clocks: next }));
        }

        for &ei in &model.edges_from[location] {
            let edge = &model.edges[ei];
            if !clocks
                .satisfies(&edge.guard, bounds)
                .expect("guard constants are within granularity")
            {
                continue;
            }
            let reset = clocks
                .reset(&edge.resets, bounds)
                .expect("validated edges never reset the global clock");
            if reset
                .satisfies(&model.invariants[edge.target], bounds)
                .expect("invariant constants are within granularity")
            {
                successors.push((
                    StepKind::Edge(ei),
                    StateRegion {
                        location: edge.target,
                        clocks: reset,
                    },
                ));
            }
        }

        for (kind, region) in successors {
            let idx = match graph.index.get(&region) {
                Some(&i) => i,
                None => {
                    let i = graph.regions.len();
                    graph.regions.push(region.clone());
                    graph.out.push(Vec::new());
                    graph.index.insert(region, i);
                    work.push(i);
                    i
                }
            };
            graph.out[cur].push((kind, idx));
        }
    }

    debug_assert!(
        (graph.clock_region_count() as u64) <= clock_region_bound(model),
        "region count exceeds the theoretical bound"
    );
    graph
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{ClockConstraint, Relation};
    use crate::model::Compiled;
    use crate::rational::{ratio, time};

    fn compiled_figure() -> Compiled {
        let (a, p) = fixtures::figure_automaton();
        Compiled::new(&a, &p).unwrap()
    }

    // Clock indices in the figure model: clocks sort as [gamma, x].
    const GAMMA_I: usize = 0;
    const X_I: usize = 1;

    #[test]
    fn region_of_equal_fractions_share_a_block() {
        let model = compiled_figure();
        // x = 0.5, gamma = 0.5 with c_x = 1.
        let v = vec![ratio(1, 2), ratio(1, 2)];
        let r = ClockRegion::of_valuation(&v, model.bounds()).unwrap();
        assert_eq!(r.intervals[X_I], ClockInterval::Bounded(0));
        assert!(r.blocks[0].is_empty());
        assert_eq!(r.blocks[1], vec![GAMMA_I, X_I]);
    }

    #[test]
    fn region_of_integral_valuation() {
        let model = compiled_figure();
        let v = vec![time(1), time(1)]; // gamma = 1, x = 1
        let r = ClockRegion::of_valuation(&v, model.bounds()).unwrap();
        assert_eq!(r.intervals[X_I], ClockInterval::Bounded(1));
        // gamma has c = 0, so gamma = 1 is above but still integral.
        assert_eq!(r.intervals[GAMMA_I], ClockInterval::Above);
        assert_eq!(r.blocks[0], vec![GAMMA_I, X_I]);
    }

    #[test]
    fn region_of_drops_clock_above_its_constant() {
        let model = compiled_figure();
        // x = 2.3 with c_x = 1 is untracked; gamma = 0.7 keeps its fraction.
        let v = vec![ratio(7, 10), ratio(23, 10)];
        let r = ClockRegion::of_valuation(&v, model.bounds()).unwrap();
        assert_eq!(r.intervals[X_I], ClockInterval::Above);
        assert!(r.blocks[0].is_empty());
        assert_eq!(r.blocks[1], vec![GAMMA_I]);
        assert_eq!(r.blocks.len(), 2);
    }

    #[test]
    fn satisfies_tracks_interval_boundaries() {
        let model = compiled_figure();
        let v = vec![ratio(1, 4), ratio(1, 2)]; // x fractional below 1
        let r = ClockRegion::of_valuation(&v, model.bounds()).unwrap();
        assert!(r
            .satisfies_atom(X_I, Relation::Lt, 1, model.bounds())
            .unwrap());
        assert!(!r
            .satisfies_atom(X_I, Relation::Ge, 1, model.bounds())
            .unwrap());
        // A constant beyond the granularity is a contract breach.
        assert!(matches!(
            r.satisfies_atom(X_I, Relation::Le, 5, model.bounds()),
            Err(RegionError::Granularity { .. })
        ));
    }

    #[test]
    fn reset_is_idempotent_and_identity_on_empty() {
        let model = compiled_figure();
        let v = vec![ratio(3, 4), ratio(1, 3)];
        let r = ClockRegion::of_valuation(&v, model.bounds()).unwrap();
        assert_eq!(r.reset(&[], model.bounds()).unwrap(), r);
        let once = r.reset(&[X_I], model.bounds()).unwrap();
        let twice = once.reset(&[X_I], model.bounds()).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once.intervals[X_I], ClockInterval::Bounded(0));
        assert!(once.blocks[0].contains(&X_I));
        assert!(matches!(
            r.reset(&[GAMMA_I], model.bounds()),
            Err(RegionError::GlobalClockReset)
        ));
    }

    #[test]
    fn delay_successor_open_and_wrap() {
        let model = compiled_figure();
        let zero = ClockRegion::zero(2, model.bounds());
        // Opening up from the zero region: both clocks fractional.
        let s1 = zero.delay_successor(model.bounds());
        assert!(s1.blocks[0].is_empty());
        assert_eq!(s1.blocks[1], vec![GAMMA_I, X_I]);
        // Wrap: the maximal (only) block reaches the next integer.
        let s2 = s1.delay_successor(model.bounds());
        assert_eq!(s2.blocks[0], vec![GAMMA_I, X_I]);
        assert_eq!(s2.intervals[X_I], ClockInterval::Bounded(1));
    }

    #[test]
    fn delay_successor_terminal_two_cycle() {
        let model = compiled_figure();
        // All non-gamma clocks above: successors alternate with period 2.
        let v = vec![time(5), time(5)];
        let r = ClockRegion::of_valuation(&v, model.bounds()).unwrap();
        let s1 = r.delay_successor(model.bounds());
        let s2 = s1.delay_successor(model.bounds());
        let s3 = s2.delay_successor(model.bounds());
        assert_eq!(s2, r);
        assert_eq!(s3, s1);
        assert_ne!(s1, r);
        assert!(r.gamma_integral(model.bounds()));
        assert!(!s1.gamma_integral(model.bounds()));
    }

    #[test]
    fn delay_chain_truncates_on_invariant() {
        let model = compiled_figure();
        let inv = &model.invariants[0]; // l0: x <= 1
        let zero = ClockRegion::zero(2, model.bounds());
        let (chain, cycle) = delay_chain(&zero, inv, model.bounds());
        // x=0, 0<x<1, x=1, then x>1 violates.
        assert_eq!(chain.len(), 3);
        assert_eq!(cycle, None);
        assert_eq!(chain[2].intervals[X_I], ClockInterval::Bounded(1));
    }

    #[test]
    fn delay_chain_cycles_when_unconstrained() {
        let model = compiled_figure();
        let inv = &model.invariants[1]; // l1: true
        let v = vec![time(2), time(2)];
        let start = ClockRegion::of_valuation(&v, model.bounds()).unwrap();
        let (chain, cycle) = delay_chain(&start, inv, model.bounds());
        assert_eq!(chain.len(), 2);
        assert_eq!(cycle, Some(0));
    }

    #[test]
    fn figure_graph_reaches_response_location() {
        let model = compiled_figure();
        let graph = build_region_graph(&model);
        assert!(graph.vertex_count() > 0);
        // Every vertex lies on a path to a vertex at l2 (index of "l2" = 2).
        let l2 = 2;
        let mut can_reach = vec![false; graph.vertex_count()];
        for (i, r) in graph.regions.iter().enumerate() {
            if r.location == l2 {
                can_reach[i] = true;
            }
        }
        // Fixed-point backward propagation.
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..graph.vertex_count() {
                if !can_reach[v] && graph.out[v].iter().any(|&(_, t)| can_reach[t]) {
                    can_reach[v] = true;
                    changed = true;
                }
            }
        }
        assert!(can_reach.iter().all(|&b| b), "some region cannot reach l2");
        assert!((graph.clock_region_count() as u64) <= clock_region_bound(&model));
    }

    #[test]
    fn invariant_trap_blocks_delay() {
        // Invariant x <= 0 freezes time entirely: only the initial region
        // is reachable (all clocks advance together, so gamma is frozen
        // along with x).
        let (a, p) = fixtures::one_location(ClockConstraint::atom("x", Relation::Le, 0), 0);
        let model = Compiled::new(&a, &p).unwrap();
        let graph = build_region_graph(&model);
        assert_eq!(graph.vertex_count(), 1);
    }

    #[test]
    fn single_clock_free_automaton_settles_into_two_region_cycle() {
        // One location, invariant true, c = 0 for every clock: after the
        // initial region (all clocks at 0, below their constants) the graph
        // settles into the gamma-integral <-> gamma-fractional 2-cycle.
        let (a, p) = fixtures::one_location(ClockConstraint::truth(), 0);
        let model = Compiled::new(&a, &p).unwrap();
        let graph = build_region_graph(&model);
        assert_eq!(graph.vertex_count(), 3);
        let (path, cycle) = graph.delay_path(graph.initial);
        assert_eq!(path.len(), 3);
        assert_eq!(cycle, Some(1));
    }

    #[test]
    fn canonical_string_is_stable() {
        let model = compiled_figure();
        let v = vec![ratio(1, 2), ratio(3, 2)];
        let r = ClockRegion::of_valuation(&v, model.bounds()).unwrap();
        assert_eq!(
            r.canonical_string(&model.clock_names),
            "gamma:above,x:above|frac:(0:{})(1:{gamma})"
        );
        let v2 = vec![time(0), ratio(1, 2)];
        let r2 = ClockRegion::of_valuation(&v2, model.bounds()).unwrap();
        assert_eq!(
            r2.canonical_string(&model.clock_names),
            "gamma:0,x:0+|frac:(0:{gamma})(1:{x})"
        );
    }
}
