//! Core data model: timed automata, priority functions and timed games,
//! together with well-formedness validation.
//!
//! The model types are name-based so that syntactically well-formed but
//! semantically broken inputs (dangling location references, global-clock
//! resets, ...) can be represented and reported by [`validate_model`].
//! Algorithms downstream work on a [`Compiled`] view that interns names as
//! indices; it can only be obtained from a bundle that validates cleanly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Reserved name of the global clock. It is implicit in every automaton,
/// measures total elapsed time and can never be reset.
pub const GAMMA: &str = "gamma";

/// Comparison operator of a single constraint atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    Lt,
    Le,
    Ge,
    Gt,
}

impl Relation {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// One atom `clock ~ bound` of a clock constraint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConstraintAtom {
    pub clock: String,
    pub relation: Relation,
    pub bound: u32,
}

/// A conjunction of constraint atoms; the empty conjunction is `true`.
///
/// Equalities `x == c` are stored desugared as the two atoms `x >= c` and
/// `x <= c`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClockConstraint {
    pub atoms: Vec<ConstraintAtom>,
}

impl ClockConstraint {
    pub fn truth() -> Self {
        ClockConstraint { atoms: Vec::new() }
    }

    pub fn atom(clock: &str, relation: Relation, bound: u32) -> Self {
        ClockConstraint {
            atoms: vec![ConstraintAtom {
                clock: clock.to_string(),
                relation,
                bound,
            }],
        }
    }

    pub fn and(mut self, clock: &str, relation: Relation, bound: u32) -> Self {
        self.atoms.push(ConstraintAtom {
            clock: clock.to_string(),
            relation,
            bound,
        });
        self
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Largest bound attached to `clock`, if the clock is mentioned at all.
    pub fn max_bound(&self, clock: &str) -> Option<u32> {
        self.atoms
            .iter()
            .filter(|a| a.clock == clock)
            .map(|a| a.bound)
            .max()
    }
}

impl fmt::Display for ClockConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "true");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " && ")?;
            }
            write!(f, "{} {} {}", a.clock, a.relation.symbol(), a.bound)?;
        }
        Ok(())
    }
}

/// Per-location data: invariant and priority vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub invariant: ClockConstraint,
    pub priorities: Vec<u32>,
}

/// An edge `source --guard, action, resets--> target`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub guard: ClockConstraint,
    pub action: String,
    pub resets: BTreeSet<String>,
    pub target: String,
}

/// A timed automaton. The clock set always contains [`GAMMA`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedAutomaton {
    /// Locations in canonical (sorted) order, with invariants and priorities.
    pub locations: BTreeMap<String, Location>,
    pub initial: String,
    /// Canonically sorted clock set, `gamma` included.
    pub clocks: BTreeSet<String>,
    pub actions: BTreeSet<String>,
    /// Edges sorted by `(source, action, target, guard, resets)`.
    pub edges: Vec<Edge>,
}

impl TimedAutomaton {
    /// Assembles an automaton in canonical form: `gamma` is added to the
    /// clock set, actions are collected from the edges and edges are sorted.
    pub fn new(
        locations: BTreeMap<String, Location>,
        initial: &str,
        clocks: impl IntoIterator<Item = String>,
        mut edges: Vec<Edge>,
    ) -> Self {
        let mut clocks: BTreeSet<String> = clocks.into_iter().collect();
        clocks.insert(GAMMA.to_string());
        let actions = edges.iter().map(|e| e.action.clone()).collect();
        edges.sort();
        TimedAutomaton {
            locations,
            initial: initial.to_string(),
            clocks,
            actions,
            edges,
        }
    }

    /// Largest constant `clock` is compared to in guards and invariants;
    /// 0 if the clock is never mentioned.
    pub fn max_constant(&self, clock: &str) -> Result<u32, UnknownClock> {
        if !self.clocks.contains(clock) {
            return Err(UnknownClock(clock.to_string()));
        }
        let mut best = 0;
        for loc in self.locations.values() {
            if let Some(b) = loc.invariant.max_bound(clock) {
                best = best.max(b);
            }
        }
        for e in &self.edges {
            if let Some(b) = e.guard.max_bound(clock) {
                best = best.max(b);
            }
        }
        Ok(best)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown clock `{0}`")]
pub struct UnknownClock(pub String);

/// A `K`-dimensional priority function over the locations of an automaton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorityFunction {
    pub dimensions: usize,
    /// Priorities range over `0..priority_count`.
    pub priority_count: u32,
    pub table: BTreeMap<String, Vec<u32>>,
}

impl PriorityFunction {
    /// Builds a priority function from the per-location vectors of an
    /// automaton, inferring `K` and `D` (`D` is one above the largest
    /// priority used, and at least 1).
    pub fn from_automaton(automaton: &TimedAutomaton) -> Self {
        let table: BTreeMap<String, Vec<u32>> = automaton
            .locations
            .iter()
            .map(|(name, loc)| (name.clone(), loc.priorities.clone()))
            .collect();
        let dimensions = table.values().map(|v| v.len()).max().unwrap_or(1).max(1);
        let priority_count = table
            .values()
            .flat_map(|v| v.iter().copied())
            .max()
            .map_or(1, |m| m + 1);
        PriorityFunction {
            dimensions,
            priority_count,
            table,
        }
    }

    pub fn priority(&self, location: &str, dimension: usize) -> u32 {
        self.table[location][dimension]
    }
}

/// A timed game: an automaton plus a partition of its actions between the
/// two players.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedGame {
    pub automaton: TimedAutomaton,
    pub p1_actions: BTreeSet<String>,
    pub p2_actions: BTreeSet<String>,
}

/// A single well-formedness violation, pointing at the offending location
/// or edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// `location <name>`, `edge <source> -> <target>` or `model`.
    pub site: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.site, self.message)
    }
}

/// Result of [`validate_model`]: empty iff the model is well-formed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, site: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            site: site.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_constraint(
    report: &mut ValidationReport,
    site: &str,
    constraint: &ClockConstraint,
    clocks: &BTreeSet<String>,
) {
    for atom in &constraint.atoms {
        if !clocks.contains(&atom.clock) {
            report.push(site, format!("unknown clock `{}`", atom.clock));
        }
    }
}

/// Satisfiability of a conjunction of integer-bounded atoms over
/// non-negative reals, per clock. Used for the determinism check.
fn conjunction_satisfiable(a: &ClockConstraint, b: &ClockConstraint) -> bool {
    let mut per_clock: BTreeMap<&str, Vec<(Relation, u32)>> = BTreeMap::new();
    for atom in a.atoms.iter().chain(b.atoms.iter()) {
        per_clock
            .entry(atom.clock.as_str())
            .or_default()
            .push((atom.relation, atom.bound));
    }
    // Each clock ranges over [0, +inf). Intersect half-open intervals with
    // doubled integer endpoints so strictness stays exact.
    for atoms in per_clock.values() {
        let mut lo = 0i64; // 2*bound, +1 when strict
        let mut hi = i64::MAX;
        for &(rel, bound) in atoms {
            let b = 2 * i64::from(bound);
            match rel {
                Relation::Ge => lo = lo.max(b),
                Relation::Gt => lo = lo.max(b + 1),
                Relation::Le => hi = hi.min(b),
                Relation::Lt => hi = hi.min(b - 1),
            }
        }
        if lo > hi {
            return false;
        }
    }
    true
}

/// Checks every structural invariant of the model types; violations are
/// data, not failures. An empty report licenses [`Compiled::new`].
pub fn validate_model(
    automaton: &TimedAutomaton,
    priorities: &PriorityFunction,
    partition: Option<(&BTreeSet<String>, &BTreeSet<String>)>,
) -> ValidationReport {
    let mut report = ValidationReport::default();

    if !automaton.locations.contains_key(&automaton.initial) {
        report.push("model", format!("unknown initial location `{}`", automaton.initial));
    }
    if !automaton.clocks.contains(GAMMA) {
        report.push("model", "clock set lacks the global clock");
    }

    for (name, loc) in &automaton.locations {
        let site = format!("location {name}");
        check_constraint(&mut report, &site, &loc.invariant, &automaton.clocks);
    }

    for e in &automaton.edges {
        let site = format!("edge {} -> {}", e.source, e.target);
        if !automaton.locations.contains_key(&e.source) {
            report.push(&site, format!("unknown location {}", e.source));
        }
        if !automaton.locations.contains_key(&e.target) {
            report.push(&site, format!("unknown location {}", e.target));
        }
        check_constraint(&mut report, &site, &e.guard, &automaton.clocks);
        if e.resets.contains(GAMMA) {
            report.push(&site, "global clock reset");
        }
        for r in &e.resets {
            if !automaton.clocks.contains(r) {
                report.push(&site, format!("unknown clock `{r}` in reset set"));
            }
        }
    }

    // Determinism: no two distinct same-action edges out of one location
    // with jointly satisfiable guards.
    for (i, a) in automaton.edges.iter().enumerate() {
        for b in automaton.edges.iter().skip(i + 1) {
            if a.source == b.source
                && a.action == b.action
                && conjunction_satisfiable(&a.guard, &b.guard)
            {
                report.push(
                    format!("location {}", a.source),
                    format!("nondeterministic action {}", a.action),
                );
            }
        }
    }

    // The initial state (l_init, 0) must satisfy its invariant: the zero
    // valuation fails only atoms of the form x > c or x >= c with c > 0.
    if let Some(loc) = automaton.locations.get(&automaton.initial) {
        let zero_ok = loc
            .invariant
            .atoms
            .iter()
            .all(|a| a.relation.holds(0, i64::from(a.bound)));
        if !zero_ok {
            report.push(
                format!("location {}", automaton.initial),
                "initial state violates its invariant",
            );
        }
    }

    // Priorities: every location mapped, uniform dimension, entries < D.
    for name in automaton.locations.keys() {
        match priorities.table.get(name) {
            None => report.push(format!("location {name}"), "no priority vector"),
            Some(v) => {
                if v.len() != priorities.dimensions {
                    report.push(
                        format!("location {name}"),
                        format!(
                            "priority vector has {} entries, expected {}",
                            v.len(),
                            priorities.dimensions
                        ),
                    );
                }
                for &p in v {
                    if p >= priorities.priority_count {
                        report.push(
                            format!("location {name}"),
                            format!("priority {p} out of range (D = {})", priorities.priority_count),
                        );
                    }
                }
            }
        }
    }
    if priorities.dimensions == 0 {
        report.push("model", "priority function has zero dimensions");
    }
    if priorities.priority_count == 0 {
        report.push("model", "priority function has zero priorities");
    }

    // Player partition, when present.
    if let Some((p1, p2)) = partition {
        for a in p1.intersection(p2) {
            report.push("model", format!("action {a} assigned to both players"));
        }
        let union: BTreeSet<_> = p1.union(p2).cloned().collect();
        for a in automaton.actions.difference(&union) {
            report.push("model", format!("action {a} assigned to no player"));
        }
        for a in union.difference(&automaton.actions) {
            report.push("model", format!("partition names unknown action {a}"));
        }
    }

    report
}

/// Index of a location in a [`Compiled`] model.
pub type LocIdx = usize;
/// Index of a clock in a [`Compiled`] model. The global clock has a fixed
/// index stored in [`Compiled::gamma`].
pub type ClockIdx = usize;
/// Index of an edge in a [`Compiled`] model.
pub type EdgeIdx = usize;

/// A constraint with clock names resolved to indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledConstraint {
    pub atoms: Vec<(ClockIdx, Relation, u32)>,
}

#[derive(Debug, Clone)]
pub struct CompiledEdge {
    pub source: LocIdx,
    pub guard: CompiledConstraint,
    pub action: String,
    pub resets: Vec<ClockIdx>,
    pub target: LocIdx,
}

/// Interned, validated view of an automaton plus priorities. All region and
/// game algorithms run on this type.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub location_names: Vec<String>,
    pub initial: LocIdx,
    pub clock_names: Vec<String>,
    pub gamma: ClockIdx,
    pub invariants: Vec<CompiledConstraint>,
    /// Priority vectors, one per location, indexed like `location_names`.
    pub priorities: Vec<Vec<u32>>,
    pub dimensions: usize,
    pub priority_count: u32,
    pub edges: Vec<CompiledEdge>,
    /// Edges grouped by source location.
    pub edges_from: Vec<Vec<EdgeIdx>>,
    /// Largest constant each clock is compared to (0 if unmentioned).
    pub max_consts: Vec<u32>,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("model failed validation:\n{0}")]
pub struct InvalidModel(pub ValidationReport);

impl Compiled {
    pub fn new(automaton: &TimedAutomaton, priorities: &PriorityFunction) -> Result<Self, InvalidModel> {
        let report = validate_model(automaton, priorities, None);
        if !report.is_clean() {
            return Err(InvalidModel(report));
        }

        let location_names: Vec<String> = automaton.locations.keys().cloned().collect();
        let loc_idx: BTreeMap<&str, LocIdx> = location_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let clock_names: Vec<String> = automaton.clocks.iter().cloned().collect();
        let clock_idx: BTreeMap<&str, ClockIdx> = clock_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let gamma = clock_idx[GAMMA];

        let compile_constraint = |c: &ClockConstraint| CompiledConstraint {
            atoms: c
                .atoms
                .iter()
                .map(|a| (clock_idx[a.clock.as_str()], a.relation, a.bound))
                .collect(),
        };

        let invariants = automaton
            .locations
            .values()
            .map(|l| compile_constraint(&l.invariant))
            .collect();
        let prio_table: Vec<Vec<u32>> = location_names
            .iter()
            .map(|n| priorities.table[n].clone())
            .collect();

        let edges: Vec<CompiledEdge> = automaton
            .edges
            .iter()
            .map(|e| CompiledEdge {
                source: loc_idx[e.source.as_str()],
                guard: compile_constraint(&e.guard),
                action: e.action.clone(),
                resets: e.resets.iter().map(|r| clock_idx[r.as_str()]).collect(),
                target: loc_idx[e.target.as_str()],
            })
            .collect();
        let mut edges_from = vec![Vec::new(); location_names.len()];
        for (i, e) in edges.iter().enumerate() {
            edges_from[e.source].push(i);
        }

        let max_consts = clock_names
            .iter()
            .map(|c| automaton.max_constant(c).expect("clock exists"))
            .collect();

        let initial = loc_idx[automaton.initial.as_str()];
        Ok(Compiled {
            location_names,
            initial,
            clock_names,
            gamma,
            invariants,
            priorities: prio_table,
            dimensions: priorities.dimensions,
            priority_count: priorities.priority_count,
            edges,
            edges_from,
            max_consts,
        })
    }

    pub fn priority(&self, location: LocIdx, dimension: usize) -> u32 {
        self.priorities[location][dimension]
    }

    pub fn clock_count(&self) -> usize {
        self.clock_names.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn figure_automaton_validates_cleanly() {
        let (automaton, priorities) = fixtures::figure_automaton();
        let report = validate_model(&automaton, &priorities, None);
        assert!(report.is_clean(), "unexpected violations: {report}");
    }

    #[test]
    fn global_clock_reset_is_flagged() {
        let (mut automaton, priorities) = fixtures::figure_automaton();
        automaton.edges[0].resets.insert(GAMMA.to_string());
        let report = validate_model(&automaton, &priorities, None);
        assert!(report
            .violations
            .iter()
            .any(|v| v.message.contains("global clock reset")));
    }

    #[test]
    fn boundary_overlap_is_nondeterministic() {
        // Two a-edges guarded x <= 1 and x >= 1 are jointly satisfiable at x = 1.
        let mut locations = BTreeMap::new();
        locations.insert(
            "l0".to_string(),
            Location {
                invariant: ClockConstraint::truth(),
                priorities: vec![0],
            },
        );
        locations.insert(
            "l1".to_string(),
            Location {
                invariant: ClockConstraint::truth(),
                priorities: vec![0],
            },
        );
        let edges = vec![
            Edge {
                source: "l0".into(),
                guard: ClockConstraint::atom("x", Relation::Le, 1),
                action: "a".into(),
                resets: BTreeSet::new(),
                target: "l1".into(),
            },
            Edge {
                source: "l0".into(),
                guard: ClockConstraint::atom("x", Relation::Ge, 1),
                action: "a".into(),
                resets: BTreeSet::new(),
                target: "l0".into(),
            },
        ];
        let automaton = TimedAutomaton::new(locations, "l0", vec!["x".to_string()], edges);
        let priorities = PriorityFunction::from_automaton(&automaton);
        let report = validate_model(&automaton, &priorities, None);
        assert!(report
            .violations
            .iter()
            .any(|v| v.message.contains("nondeterministic action a")));

        // Strict variants exclude the boundary and are deterministic.
        let (mut automaton2, _) = (automaton.clone(), ());
        automaton2.edges[0].guard = ClockConstraint::atom("x", Relation::Lt, 1);
        automaton2.edges[1].guard = ClockConstraint::atom("x", Relation::Gt, 1);
        let priorities2 = PriorityFunction::from_automaton(&automaton2);
        let report2 = validate_model(&automaton2, &priorities2, None);
        assert!(report2.is_clean(), "{report2}");
    }

    #[test]
    fn max_constant_covers_guards_and_invariants() {
        let (automaton, _) = fixtures::figure_automaton();
        assert_eq!(automaton.max_constant("x").unwrap(), 1);
        assert_eq!(automaton.max_constant(GAMMA).unwrap(), 0);
        assert!(automaton.max_constant("zz").is_err());

        let mut locations = BTreeMap::new();
        locations.insert(
            "l0".to_string(),
            Location {
                invariant: ClockConstraint::atom("x", Relation::Le, 2),
                priorities: vec![0],
            },
        );
        let edges = vec![Edge {
            source: "l0".into(),
            guard: ClockConstraint::atom("x", Relation::Gt, 3),
            action: "a".into(),
            resets: BTreeSet::new(),
            target: "l0".into(),
        }];
        let automaton = TimedAutomaton::new(locations, "l0", vec!["x".to_string()], edges);
        assert_eq!(automaton.max_constant("x").unwrap(), 3);
    }

    #[test]
    fn validation_is_idempotent_and_edge_order_independent() {
        let (mut automaton, priorities) = fixtures::figure_automaton();
        automaton.edges[0].resets.insert(GAMMA.to_string());
        let first = validate_model(&automaton, &priorities, None);
        let second = validate_model(&automaton, &priorities, None);
        assert_eq!(first, second);

        automaton.edges.reverse();
        let reversed = validate_model(&automaton, &priorities, None);
        let mut msgs: Vec<_> = first.violations.iter().map(|v| &v.message).collect();
        let mut rmsgs: Vec<_> = reversed.violations.iter().map(|v| &v.message).collect();
        msgs.sort();
        rmsgs.sort();
        assert_eq!(msgs, rmsgs);
    }

    #[test]
    fn partition_must_cover_actions() {
        let (automaton, priorities) = fixtures::figure_automaton();
        let p1: BTreeSet<String> = BTreeSet::new();
        let p2: BTreeSet<String> = BTreeSet::new();
        let report = validate_model(&automaton, &priorities, Some((&p1, &p2)));
        assert!(report
            .violations
            .iter()
            .any(|v| v.message.contains("assigned to no player")));
    }
}
