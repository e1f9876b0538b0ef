//! Chain-response families derived from priority functions, their compact
//! deterministic Büchi automata, counter products, request/response
//! absorption for the fixed-point solver, and the tick/blame expansion
//! that turns an objective automaton into a winning-condition automaton.

use std::collections::BTreeSet;

use crate::model::{Compiled, LocIdx};
use crate::region::{RegionGraph, RegionIdx};

/// A set of state regions given by a base location set refined by explicit
/// region inclusions and exclusions (the explicit sets take precedence).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegionPredicate {
    pub locations: BTreeSet<LocIdx>,
    pub included: BTreeSet<RegionIdx>,
    pub excluded: BTreeSet<RegionIdx>,
}

impl RegionPredicate {
    pub fn of_locations(locations: impl IntoIterator<Item = LocIdx>) -> Self {
        RegionPredicate {
            locations: locations.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn contains(&self, region: RegionIdx, graph: &RegionGraph) -> bool {
        if self.included.contains(&region) {
            return true;
        }
        if self.excluded.contains(&region) {
            return false;
        }
        self.locations.contains(&graph.regions[region].location)
    }
}

/// An ordered list of request-response pairs whose response sets form a
/// descending chain (largest odd priority first) and are disjoint from all
/// request sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainFamily {
    pub pairs: Vec<(RegionPredicate, RegionPredicate)>,
}

impl ChainFamily {
    /// One pair per odd priority in use on the dimension: requests are the
    /// locations carrying that priority, responses the locations with a
    /// smaller-or-equal even priority. Ordered by descending odd priority,
    /// so the last pair has the fewest responses.
    pub fn derive(model: &Compiled, dimension: usize) -> Self {
        let mut pairs = Vec::new();
        let mut odd: Vec<u32> = (0..model.priority_count).filter(|p| p % 2 == 1).collect();
        odd.sort_unstable_by(|a, b| b.cmp(a));
        for j in odd {
            let requests: BTreeSet<LocIdx> = (0..model.location_names.len())
                .filter(|&l| model.priority(l, dimension) == j)
                .collect();
            if requests.is_empty() {
                continue;
            }
            let responses: BTreeSet<LocIdx> = (0..model.location_names.len())
                .filter(|&l| {
                    let p = model.priority(l, dimension);
                    p % 2 == 0 && p <= j
                })
                .collect();
            pairs.push((
                RegionPredicate::of_locations(requests),
                RegionPredicate::of_locations(responses),
            ));
        }
        ChainFamily { pairs }
    }

    /// Marks a set of winning regions as responses for every pair and
    /// removes them from every request set, as the fixed-point loop does.
    pub fn absorb(&mut self, winning: &BTreeSet<RegionIdx>) {
        for (rq, rp) in &mut self.pairs {
            for &r in winning {
                rq.included.remove(&r);
                rq.excluded.insert(r);
                rp.excluded.remove(&r);
                rp.included.insert(r);
            }
        }
    }

    /// Instantiates the family over the reachable regions of a graph,
    /// interning regions as letters.
    pub fn to_letter_family(&self, graph: &RegionGraph) -> LetterFamily {
        let pairs = self
            .pairs
            .iter()
            .map(|(rq, rp)| {
                let requests = (0..graph.vertex_count())
                    .filter(|&r| rq.contains(r, graph))
                    .collect();
                let responses = (0..graph.vertex_count())
                    .filter(|&r| rp.contains(r, graph))
                    .collect();
                (requests, responses)
            })
            .collect();
        LetterFamily {
            alphabet_size: graph.vertex_count(),
            pairs,
        }
    }
}

/// A chain-response family over an interned alphabet `0..alphabet_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetterFamily {
    pub alphabet_size: usize,
    /// `(requests, responses)`, responses descending along the list.
    pub pairs: Vec<(BTreeSet<usize>, BTreeSet<usize>)>,
}

impl LetterFamily {
    /// Checks the chain and disjointness invariants.
    pub fn is_chain(&self) -> bool {
        for w in self.pairs.windows(2) {
            if !w[1].1.is_subset(&w[0].1) {
                return false;
            }
        }
        self.pairs
            .iter()
            .all(|(rq, _)| self.pairs.iter().all(|(_, rp)| rq.is_disjoint(rp)))
    }
}

/// A total deterministic parity automaton over an interned alphabet.
/// Machines with priorities {0, 1} are the deterministic Büchi automata of
/// the construction; state priorities, not transitions, carry acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpa {
    pub states: usize,
    pub initial: usize,
    pub alphabet_size: usize,
    /// `delta[state][letter]`.
    pub delta: Vec<Vec<usize>>,
    pub priority: Vec<u32>,
    /// Priorities range over `0..priority_count`.
    pub priority_count: u32,
}

impl Dpa {
    pub fn step(&self, state: usize, letter: usize) -> usize {
        self.delta[state][letter]
    }

    /// Acceptance of the ultimately periodic word `u v^ω`: the smallest
    /// priority seen infinitely often must be even.
    pub fn accepts_lasso(&self, u: &[usize], v: &[usize]) -> bool {
        assert!(!v.is_empty(), "lasso cycles are nonempty");
        let mut q = self.initial;
        for &l in u {
            q = self.step(q, l);
        }
        // Iterate laps of v until a lap-start state repeats; the minimum
        // priority is taken over the states visited in the repeating laps.
        let mut lap_starts: Vec<usize> = vec![q];
        let mut lap_mins: Vec<u32> = Vec::new();
        loop {
            let mut min = u32::MAX;
            for &l in v {
                q = self.step(q, l);
                min = min.min(self.priority[q]);
            }
            lap_mins.push(min);
            if let Some(k) = lap_starts.iter().position(|&s| s == q) {
                let cycle_min = lap_mins[k..].iter().copied().min().expect("nonempty");
                return cycle_min % 2 == 0;
            }
            lap_starts.push(q);
        }
    }
}

/// The `(r + 1)`-state Büchi automaton of a chain-response family: state 0
/// means no pending request, state `q > 0` tracks the pending request with
/// the fewest responses seen so far.
pub fn chain_dba(family: &LetterFamily) -> Dpa {
    debug_assert!(family.is_chain());
    let r = family.pairs.len();
    let states = r + 1;
    let mut delta = vec![vec![0usize; family.alphabet_size]; states];
    for q in 0..states {
        for letter in 0..family.alphabet_size {
            delta[q][letter] = if q != 0 && family.pairs[q - 1].1.contains(&letter) {
                0
            } else {
                let mut next = q;
                for (i, (rq, _)) in family.pairs.iter().enumerate() {
                    if rq.contains(&letter) {
                        next = next.max(i + 1);
                    }
                }
                next
            };
        }
    }
    let priority = (0..states).map(|q| u32::from(q != 0)).collect();
    Dpa {
        states,
        initial: 0,
        alphabet_size: family.alphabet_size,
        delta,
        priority,
        priority_count: 2,
    }
}

/// Generalized-Büchi counter product of Büchi automata: states are tuples
/// plus an active index that advances whenever the active machine sits in
/// an accepting state. Allocates exactly `prod(|Q_i|) * n` states.
pub fn intersect_dbas(machines: &[Dpa]) -> Dpa {
    assert!(!machines.is_empty());
    let alphabet_size = machines[0].alphabet_size;
    assert!(
        machines.iter().all(|m| m.alphabet_size == alphabet_size),
        "alphabet mismatch"
    );
    let n = machines.len();
    let tuple_count: usize = machines.iter().map(|m| m.states).product();
    let states = tuple_count * n;

    let decode = |mut s: usize| -> (Vec<usize>, usize) {
        let active = s % n;
        s /= n;
        let mut qs = vec![0; n];
        for (i, m) in machines.iter().enumerate() {
            qs[i] = s % m.states;
            s /= m.states;
        }
        (qs, active)
    };
    let encode = |qs: &[usize], active: usize| -> usize {
        let mut s = 0;
        for (i, m) in machines.iter().enumerate().rev() {
            s = s * m.states + qs[i];
        }
        s * n + active
    };

    let mut delta = vec![vec![0usize; alphabet_size]; states];
    let mut priority = vec![1u32; states];
    for s in 0..states {
        let (qs, active) = decode(s);
        let accepting = machines[active].priority[qs[active]] == 0;
        priority[s] = u32::from(!accepting);
        for letter in 0..alphabet_size {
            let qs2: Vec<usize> = qs
                .iter()
                .enumerate()
                .map(|(i, &q)| machines[i].step(q, letter))
                .collect();
            let active2 = if accepting { (active + 1) % n } else { active };
            delta[s][letter] = encode(&qs2, active2);
        }
    }
    let initial = encode(
        &machines.iter().map(|m| m.initial).collect::<Vec<_>>(),
        0,
    );
    Dpa {
        states,
        initial,
        alphabet_size,
        delta,
        priority,
        priority_count: 2,
    }
}

/// The tick/blame expansion of an objective automaton into a
/// winning-condition automaton.
///
/// States are `(q, tick, blame, h)` where `h` tracks the smallest base
/// priority seen since the last tick. Priorities: `h` on tick states, the
/// odd constant `D'` on blamed tickless states, the even `D' + 1`
/// otherwise, so that time-convergent blameless plays are accepting and
/// time-convergent plays where player 1 keeps acting are rejecting.
#[derive(Debug, Clone)]
pub struct ExpandedDpa {
    /// The objective automaton this expands.
    pub base: Dpa,
    pub states: usize,
    pub initial: usize,
    /// `delta[state][letter * 4 + tick * 2 + blame]`.
    pub delta: Vec<Vec<usize>>,
    pub priority: Vec<u32>,
    pub priority_count: u32,
    pub d_prime: u32,
}

impl ExpandedDpa {
    pub fn encode(&self, q: usize, tick: bool, blame: bool, h: u32) -> usize {
        let d = self.base.priority_count as usize;
        ((q * 2 + usize::from(tick)) * 2 + usize::from(blame)) * d + h as usize
    }

    pub fn decode(&self, s: usize) -> (usize, bool, bool, u32) {
        let d = self.base.priority_count as usize;
        let h = (s % d) as u32;
        let rest = s / d;
        let blame = rest % 2 == 1;
        let rest = rest / 2;
        let tick = rest % 2 == 1;
        (rest / 2, tick, blame, h)
    }

    pub fn step(&self, state: usize, letter: usize, tick: bool, blame: bool) -> usize {
        self.delta[state][letter * 4 + usize::from(tick) * 2 + usize::from(blame)]
    }

    /// The state reached on (re)entry: the automaton restarted and fed the
    /// single letter `(letter, tick=false, blame=false)`.
    pub fn entry(&self, letter: usize) -> usize {
        self.step(self.initial, letter, false, false)
    }
}

pub fn expand_condition(base: &Dpa) -> ExpandedDpa {
    let d = base.priority_count;
    let d_prime = if d % 2 == 1 { d } else { d - 1 };
    let states = base.states * 4 * d as usize;
    let mut expanded = ExpandedDpa {
        base: base.clone(),
        states,
        initial: 0,
        delta: vec![vec![0usize; base.alphabet_size * 4]; states],
        priority: vec![0; states],
        priority_count: d_prime + 2,
        d_prime,
    };
    expanded.initial = expanded.encode(base.initial, false, false, d - 1);
    for s in 0..states {
        let (q, tick, blame, h) = expanded.decode(s);
        expanded.priority[s] = if tick {
            h
        } else if blame {
            d_prime
        } else {
            d_prime + 1
        };
        for letter in 0..base.alphabet_size {
            for (t2, b2) in [(false, false), (false, true), (true, false), (true, true)] {
                let q2 = base.step(q, letter);
                let h2 = if tick {
                    base.priority[q2]
                } else {
                    h.min(base.priority[q2])
                };
                let target = expanded.encode(q2, t2, b2, h2);
                expanded.delta[s][letter * 4 + usize::from(t2) * 2 + usize::from(b2)] = target;
            }
        }
    }
    expanded
}
