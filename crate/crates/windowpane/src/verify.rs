//! Verification of (generalized) direct and indirect bounded window
//! objectives on timed automata.
//!
//! A violation witness is a lasso in the odd-minimum product space: an
//! anchor region from which a product cycle is reachable that keeps the
//! running minimum priority odd and toggles the parity of the global clock
//! (so the looping path is time-divergent). The indirect variant
//! additionally requires the anchor's region to be reachable back from the
//! cycle. Anchors are enumerated deterministically instead of guessed.

use std::collections::HashMap;

use crate::model::Compiled;
use crate::rational::{self, Time};
use crate::region::{RegionGraph, RegionIdx, StateRegion};
use crate::semantics::{apply_move, strongly_connected_components, Move, Run};

/// Witness to the violation of a bounded window objective on one
/// dimension.
#[derive(Debug, Clone)]
pub struct ViolationWitness {
    pub dimension: usize,
    /// Region path `initial -> ... -> r1 -> ... -> r2`; `anchor_pos` marks
    /// the anchor r1 and the last element is the cycle anchor r2. The
    /// running minimum priority from r1 onward is odd at every position.
    pub prefix: Vec<RegionIdx>,
    pub anchor_pos: usize,
    /// Cycle `r2 -> ... -> r2` (the closing edge back to `cycle[0]` is
    /// implicit); the running minimum stays odd and both parities of the
    /// global clock occur.
    pub cycle: Vec<RegionIdx>,
    /// Positions in `cycle` of a gamma-integral and a gamma-fractional
    /// region.
    pub gamma_integral_pos: usize,
    pub gamma_fractional_pos: usize,
    /// Indirect mode only: region path `r2 -> ... -> r1`.
    pub return_path: Option<Vec<RegionIdx>>,
}

impl ViolationWitness {
    pub fn anchor(&self) -> RegionIdx {
        self.prefix[self.anchor_pos]
    }

    pub fn cycle_anchor(&self) -> RegionIdx {
        *self.prefix.last().expect("prefix ends at the cycle anchor")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Direct,
    Indirect,
}

/// Per-dimension verification outcome.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub mode: Mode,
    /// `None` on a dimension means the objective holds there.
    pub dimensions: Vec<Option<ViolationWitness>>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.dimensions.iter().all(Option::is_none)
    }
}

/// Plain breadth-first path in the region graph.
pub fn region_path(graph: &RegionGraph, from: RegionIdx, to: RegionIdx) -> Option<Vec<RegionIdx>> {
    let mut parent = vec![usize::MAX; graph.vertex_count()];
    let mut queue = std::collections::VecDeque::from([from]);
    parent[from] = from;
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &(_, t) in &graph.out[v] {
            if parent[t] == usize::MAX {
                parent[t] = v;
                queue.push_back(t);
            }
        }
    }
    None
}

/// The odd-minimum product space seeded at one anchor region: nodes are
/// `(region, running minimum)` pairs with an odd minimum; transitions
/// where the minimum would turn even are pruned.
struct OddProduct {
    nodes: Vec<(RegionIdx, u32)>,
    out: Vec<Vec<usize>>,
    parent: Vec<usize>,
}

impl OddProduct {
    fn explore(model: &Compiled, graph: &RegionGraph, dimension: usize, anchor: RegionIdx) -> Option<Self> {
        let m0 = model.priority(graph.regions[anchor].location, dimension);
        if m0 % 2 == 0 {
            return None;
        }
        let mut index: HashMap<(RegionIdx, u32), usize> = HashMap::new();
        let mut product = OddProduct {
            nodes: vec![(anchor, m0)],
            out: vec![Vec::new()],
            parent: vec![usize::MAX],
        };
        index.insert((anchor, m0), 0);
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(n) = queue.pop_front() {
            let (region, m) = product.nodes[n];
            for &(_, target) in &graph.out[region] {
                let m2 = m.min(model.priority(graph.regions[target].location, dimension));
                if m2 % 2 == 0 {
                    continue;
                }
                let next = *index.entry((target, m2)).or_insert_with(|| {
                    product.nodes.push((target, m2));
                    product.out.push(Vec::new());
                    product.parent.push(n);
                    queue.push_back(product.nodes.len() - 1);
                    product.nodes.len() - 1
                });
                if !product.out[n].contains(&next) {
                    product.out[n].push(next);
                }
            }
        }
        Some(product)
    }

    fn path_from_root(&self, node: usize) -> Vec<usize> {
        let mut path = vec![node];
        let mut cur = node;
        while self.parent[cur] != usize::MAX {
            cur = self.parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Shortest path between product nodes restricted to one SCC.
    fn scc_path(&self, sccs: &[usize], from: usize, to: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.nodes.len()];
        parent[from] = from;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return path;
            }
            for &t in &self.out[v] {
                if sccs[t] == sccs[from] && parent[t] == usize::MAX {
                    parent[t] = v;
                    queue.push_back(t);
                }
            }
        }
        unreachable!("nodes of one SCC are mutually reachable within it")
    }
}

/// Searches for a path from `start` visiting the target predicates in
/// order while the running minimum priority on the dimension stays odd at
/// every prefix.
pub fn ordered_target_reach(
    model: &Compiled,
    graph: &RegionGraph,
    dimension: usize,
    start: RegionIdx,
    targets: &[&dyn Fn(&StateRegion) -> bool],
) -> Option<Vec<RegionIdx>> {
    let m0 = model.priority(graph.regions[start].location, dimension);
    if m0 % 2 == 0 {
        return None;
    }
    let advance = |region: RegionIdx, mut ti: usize| {
        while ti < targets.len() && targets[ti](&graph.regions[region]) {
            ti += 1;
        }
        ti
    };
    type Node = (RegionIdx, u32, usize);
    let start_node: Node = (start, m0, advance(start, 0));
    let mut parent: HashMap<Node, Node> = HashMap::from([(start_node, start_node)]);
    let mut queue = std::collections::VecDeque::from([start_node]);
    while let Some(node) = queue.pop_front() {
        let (region, m, ti) = node;
        if ti == targets.len() {
            let mut path = vec![region];
            let mut cur = node;
            while parent[&cur] != cur {
                cur = parent[&cur];
                path.push(cur.0);
            }
            path.reverse();
            return Some(path);
        }
        for &(_, target) in &graph.out[region] {
            let m2 = m.min(model.priority(graph.regions[target].location, dimension));
            if m2 % 2 == 0 {
                continue;
            }
            let next: Node = (target, m2, advance(target, ti));
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(node);
                queue.push_back(next);
            }
        }
    }
    None
}

fn find_violation(
    model: &Compiled,
    graph: &RegionGraph,
    dimension: usize,
    mode: Mode,
) -> Option<ViolationWitness> {
    for anchor in 0..graph.vertex_count() {
        let Some(product) = OddProduct::explore(model, graph, dimension, anchor) else {
            continue;
        };
        let n = product.nodes.len();
        let sccs = strongly_connected_components(n, |v| product.out[v].iter().copied());
        let scc_count = sccs.iter().max().map_or(0, |&s| s + 1);
        let mut has_edge = vec![false; scc_count];
        let mut parity = vec![(false, false); scc_count];
        for v in 0..n {
            let scc = sccs[v];
            if graph.gamma_integral(model, product.nodes[v].0) {
                parity[scc].0 = true;
            } else {
                parity[scc].1 = true;
            }
            for &t in &product.out[v] {
                if sccs[t] == scc {
                    has_edge[scc] = true;
                }
            }
        }

        for entry in 0..n {
            let scc = sccs[entry];
            if !(has_edge[scc] && parity[scc].0 && parity[scc].1) {
                continue;
            }
            // The indirect criterion additionally needs the anchor's region
            // to be reachable from the cycle.
            let cycle_region = product.nodes[entry].0;
            let return_path = match mode {
                Mode::Direct => None,
                Mode::Indirect => match region_path(graph, cycle_region, anchor) {
                    Some(p) => Some(p),
                    None => continue,
                },
            };

            // Assemble the cycle through both parities inside the SCC.
            let int_node = (0..n)
                .find(|&v| sccs[v] == scc && graph.gamma_integral(model, product.nodes[v].0))
                .expect("SCC contains a gamma-integral node");
            let frac_node = (0..n)
                .find(|&v| sccs[v] == scc && !graph.gamma_integral(model, product.nodes[v].0))
                .expect("SCC contains a gamma-fractional node");
            let mut cycle_nodes = product.scc_path(&sccs, entry, int_node);
            let to_frac = product.scc_path(&sccs, int_node, frac_node);
            cycle_nodes.extend_from_slice(&to_frac[1..]);
            let back = product.scc_path(&sccs, frac_node, entry);
            cycle_nodes.extend_from_slice(&back[1..]);
            // The assembly closed the loop; the implicit closing edge makes
            // the trailing entry node redundant.
            cycle_nodes.pop();
            let gamma_integral_pos = cycle_nodes
                .iter()
                .position(|&v| v == int_node)
                .expect("integral witness on cycle");
            let gamma_fractional_pos = cycle_nodes
                .iter()
                .position(|&v| v == frac_node)
                .expect("fractional witness on cycle");

            let product_prefix = product.path_from_root(entry);
            let entry_path = region_path(graph, graph.initial, anchor)
                .expect("graph vertices are reachable from the initial region");
            let anchor_pos = entry_path.len() - 1;
            let mut prefix = entry_path;
            prefix.extend(product_prefix[1..].iter().map(|&v| product.nodes[v].0));

            return Some(ViolationWitness {
                dimension,
                prefix,
                anchor_pos,
                cycle: cycle_nodes.iter().map(|&v| product.nodes[v].0).collect(),
                gamma_integral_pos,
                gamma_fractional_pos,
                return_path,
            });
        }
    }
    None
}

/// Direct criterion: a reachable anchor with an odd-minimum product cycle
/// containing both parities of the global clock.
pub fn find_direct_violation(
    model: &Compiled,
    graph: &RegionGraph,
    dimension: usize,
) -> Option<ViolationWitness> {
    find_violation(model, graph, dimension, Mode::Direct)
}

/// Indirect criterion: as the direct one, plus plain reachability from the
/// cycle back to the anchor's region.
pub fn find_indirect_violation(
    model: &Compiled,
    graph: &RegionGraph,
    dimension: usize,
) -> Option<ViolationWitness> {
    find_violation(model, graph, dimension, Mode::Indirect)
}

/// Decides the verification problem dimension by dimension.
pub fn verify(model: &Compiled, graph: &RegionGraph, mode: Mode) -> Verdict {
    let dimensions = (0..model.dimensions)
        .map(|k| find_violation(model, graph, k, mode))
        .collect();
    Verdict { mode, dimensions }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("witness inconsistent with region graph: no step {from} -> {to}")]
pub struct WitnessReplayError {
    pub from: String,
    pub to: String,
}

/// A realized witness: the concrete run plus the positions needed by the
/// monitors (anchor entry and, for indirect stages, the odd-minimum
/// segments).
#[derive(Debug, Clone)]
pub struct RealizedWitness {
    pub run: Run,
    /// Run index at which the anchor region r1 is (first) entered.
    pub anchor_index: usize,
    /// For indirect realizations: state index ranges `[start, end]` of the
    /// stage segments (stage n loops the cycle n+1 times).
    pub stage_segments: Vec<(usize, usize)>,
}

fn realize_step(
    model: &Compiled,
    graph: &RegionGraph,
    run: &mut Run,
    from: RegionIdx,
    to: RegionIdx,
) -> Result<(), WitnessReplayError> {
    use crate::region::StepKind;
    let step = graph.out[from]
        .iter()
        .find(|&&(_, t)| t == to)
        .map(|&(k, _)| k)
        .ok_or_else(|| WitnessReplayError {
            from: graph.regions[from].canonical_string(model),
            to: graph.regions[to].canonical_string(model),
        })?;
    let state = run.last().clone();
    debug_assert_eq!(state.region(model), graph.regions[from]);
    let mv = match step {
        StepKind::Delay => Move::delay_only(graph.regions[from].clocks.step_delay(&state.valuation)),
        StepKind::Edge(ei) => Move {
            delay: rational::zero(),
            action: Some(model.edges[ei].action.clone()),
        },
    };
    let next = apply_move(model, &state, &mv).expect("region-graph steps are enabled");
    run.push(mv, next);
    Ok(())
}

fn realize_path(
    model: &Compiled,
    graph: &RegionGraph,
    run: &mut Run,
    path: &[RegionIdx],
) -> Result<(), WitnessReplayError> {
    for w in path.windows(2) {
        realize_step(model, graph, run, w[0], w[1])?;
    }
    Ok(())
}

fn realize_cycle_lap(
    model: &Compiled,
    graph: &RegionGraph,
    run: &mut Run,
    cycle: &[RegionIdx],
) -> Result<(), WitnessReplayError> {
    realize_path(model, graph, run, cycle)?;
    realize_step(model, graph, run, *cycle.last().unwrap(), cycle[0])
}

/// Realizes a witness as a concrete run.
///
/// Direct witnesses reach the anchor, follow the odd-minimum prefix and
/// loop the cycle until both at least `stages` laps are done and at least
/// `stages` time units elapsed since the anchor. Indirect witnesses run
/// the staged construction: stage `n` loops the cycle `n + 1` times and
/// then returns to the anchor region.
pub fn realize_witness(
    model: &Compiled,
    graph: &RegionGraph,
    witness: &ViolationWitness,
    stages: u32,
) -> Result<RealizedWitness, WitnessReplayError> {
    let mut run = Run::from_initial(model);
    if graph.initial != witness.prefix[0] {
        return Err(WitnessReplayError {
            from: graph.regions[graph.initial].canonical_string(model),
            to: graph.regions[witness.prefix[0]].canonical_string(model),
        });
    }
    let anchor_index = witness.anchor_pos;
    let mut stage_segments = Vec::new();

    match &witness.return_path {
        None => {
            realize_path(model, graph, &mut run, &witness.prefix)?;
            let anchor_gamma = run.states[anchor_index].gamma(model).clone();
            let goal: Time = rational::time(i64::from(stages));
            let mut laps = 0;
            while laps < stages || run.last().gamma(model) - &anchor_gamma < goal {
                realize_cycle_lap(model, graph, &mut run, &witness.cycle)?;
                laps += 1;
            }
        }
        Some(ret) => {
            realize_path(model, graph, &mut run, &witness.prefix[..=witness.anchor_pos])?;
            let after_anchor = &witness.prefix[witness.anchor_pos..];
            for stage in 1..=stages {
                let seg_start = run.states.len() - 1;
                realize_path(model, graph, &mut run, after_anchor)?;
                for _ in 0..=stage {
                    realize_cycle_lap(model, graph, &mut run, &witness.cycle)?;
                }
                stage_segments.push((seg_start, run.states.len() - 1));
                realize_path(model, graph, &mut run, ret)?;
            }
        }
    }

    Ok(RealizedWitness {
        run,
        anchor_index,
        stage_segments,
    })
}
