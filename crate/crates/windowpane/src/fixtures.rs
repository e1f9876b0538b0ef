//! Small ready-made models used by the guide, the test suites and the
//! examples shipped with the command-line tool.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{
    ClockConstraint, Edge, Location, PriorityFunction, Relation, TimedAutomaton, TimedGame,
};

/// The three-location automaton used throughout the guide: a request
/// location of priority 1 with invariant `x <= 1`, an unconstrained
/// priority-2 location where time can diverge, and a priority-0 response
/// location. Every cycle resets `x`, but the window opened in `l0` can be
/// held open arbitrarily long in `l1`.
pub fn figure_automaton() -> (TimedAutomaton, PriorityFunction) {
    let mut locations = BTreeMap::new();
    locations.insert(
        "l0".to_string(),
        Location {
            invariant: ClockConstraint::atom("x", Relation::Le, 1),
            priorities: vec![1],
        },
    );
    locations.insert(
        "l1".to_string(),
        Location {
            invariant: ClockConstraint::truth(),
            priorities: vec![2],
        },
    );
    locations.insert(
        "l2".to_string(),
        Location {
            invariant: ClockConstraint::atom("x", Relation::Le, 1),
            priorities: vec![0],
        },
    );
    let edges = vec![
        Edge {
            source: "l0".into(),
            guard: ClockConstraint::truth(),
            action: "a".into(),
            resets: BTreeSet::new(),
            target: "l1".into(),
        },
        Edge {
            source: "l1".into(),
            guard: ClockConstraint::truth(),
            action: "a".into(),
            resets: BTreeSet::from(["x".to_string()]),
            target: "l2".into(),
        },
        Edge {
            source: "l2".into(),
            guard: ClockConstraint::truth(),
            action: "a".into(),
            resets: BTreeSet::from(["x".to_string()]),
            target: "l0".into(),
        },
    ];
    let automaton = TimedAutomaton::new(locations, "l0", vec!["x".to_string()], edges);
    let priorities = PriorityFunction::from_automaton(&automaton);
    (automaton, priorities)
}

/// [`figure_automaton`] as a game with all actions controlled by the given
/// player (1 or 2).
pub fn figure_game(owner: u8) -> (TimedGame, PriorityFunction) {
    let (automaton, priorities) = figure_automaton();
    let actions = automaton.actions.clone();
    let (p1, p2) = match owner {
        1 => (actions, BTreeSet::new()),
        _ => (BTreeSet::new(), actions),
    };
    (
        TimedGame {
            automaton,
            p1_actions: p1,
            p2_actions: p2,
        },
        priorities,
    )
}

/// A single-location automaton with the given invariant and one clock `x`;
/// handy for exercising delay chains.
pub fn one_location(invariant: ClockConstraint, priority: u32) -> (TimedAutomaton, PriorityFunction) {
    let mut locations = BTreeMap::new();
    locations.insert(
        "l0".to_string(),
        Location {
            invariant,
            priorities: vec![priority],
        },
    );
    let automaton = TimedAutomaton::new(locations, "l0", vec!["x".to_string()], Vec::new());
    let priorities = PriorityFunction::from_automaton(&automaton);
    (automaton, priorities)
}
