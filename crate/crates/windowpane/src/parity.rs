//! Zielonka's recursive algorithm for finite turn-based parity games with
//! min-parity acceptance (player 1 wins a play iff the smallest priority
//! seen infinitely often is even), with memoryless strategies for both
//! players and deterministic attractor-based tie-breaking.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    fn likes(priority: u32) -> Player {
        if priority % 2 == 0 {
            Player::P1
        } else {
            Player::P2
        }
    }
}

/// A finite turn-based parity game. Every vertex must have at least one
/// outgoing edge.
#[derive(Debug, Clone)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub out: Vec<Vec<usize>>,
}

impl ParityGame {
    pub fn vertex_count(&self) -> usize {
        self.owner.len()
    }
}

/// Winning partition and memoryless strategies. `strategy1[v]` is the
/// chosen successor for a P1-owned vertex inside `win1` (symmetrically for
/// P2).
#[derive(Debug, Clone)]
pub struct ParitySolution {
    pub win1: Vec<bool>,
    pub strategy1: Vec<Option<usize>>,
    pub strategy2: Vec<Option<usize>>,
}

impl ParitySolution {
    pub fn win2(&self) -> Vec<bool> {
        self.win1.iter().map(|w| !w).collect()
    }
}

/// Result of an attractor computation: membership, BFS rank (targets have
/// rank 0) and the strategy of the attracting player on its non-target
/// members.
pub struct Attractor {
    pub member: Vec<bool>,
    pub rank: Vec<usize>,
    pub strategy: Vec<Option<usize>>,
}

/// Least set containing `targets` and closed under "the attracting player
/// can enter / the opponent must enter", restricted to `sub`.
///
/// Strategy choices are deterministic: among successors in the attractor,
/// the one with minimal rank, ties by smallest vertex id. Vertices with
/// identical successor sets therefore receive the same choice.
pub fn attractor(game: &ParityGame, player: Player, targets: &[bool], sub: &[bool]) -> Attractor {
    let n = game.vertex_count();
    let mut member = vec![false; n];
    let mut rank = vec![usize::MAX; n];
    // Remaining successors inside `sub` for opponent vertices.
    let mut pending: Vec<usize> = (0..n)
        .map(|v| game.out[v].iter().filter(|&&t| sub[t]).count())
        .collect();
    let mut frontier: Vec<usize> = Vec::new();
    for v in 0..n {
        if sub[v] && targets[v] {
            member[v] = true;
            rank[v] = 0;
            frontier.push(v);
        }
    }
    // Backward closure, layer by layer; predecessor lists are recomputed
    // per call because subgames shrink during the recursion.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        if sub[v] {
            for &t in &game.out[v] {
                if sub[t] {
                    preds[t].push(v);
                }
            }
        }
    }
    let mut layer = 1usize;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in &preds[v] {
                if member[u] {
                    continue;
                }
                let enters = if game.owner[u] == player {
                    true
                } else {
                    pending[u] -= 1;
                    pending[u] == 0
                };
                if enters && (game.owner[u] == player || pending[u] == 0) {
                    member[u] = true;
                    rank[u] = layer;
                    next.push(u);
                }
            }
        }
        frontier = next;
        layer += 1;
    }

    let mut strategy = vec![None; n];
    for v in 0..n {
        if member[v] && rank[v] > 0 && game.owner[v] == player {
            strategy[v] = game.out[v]
                .iter()
                .copied()
                .filter(|&t| sub[t] && member[t])
                .min_by_key(|&t| (rank[t], t));
        }
    }
    Attractor {
        member,
        rank,
        strategy,
    }
}

/// Solves the game exactly; every vertex is won by exactly one player and
/// the returned strategies are winning on their regions.
pub fn solve_parity(game: &ParityGame) -> ParitySolution {
    let n = game.vertex_count();
    debug_assert!(game.out.iter().all(|o| !o.is_empty()), "no deadlocks");
    let sub = vec![true; n];
    let (win1, strategy1, strategy2) = solve_rec(game, &sub);
    ParitySolution {
        win1,
        strategy1,
        strategy2,
    }
}

fn solve_rec(game: &ParityGame, sub: &[bool]) -> (Vec<bool>, Vec<Option<usize>>, Vec<Option<usize>>) {
    let n = game.vertex_count();
    let empty = (vec![false; n], vec![None; n], vec![None; n]);
    let Some(min_priority) = (0..n).filter(|&v| sub[v]).map(|v| game.priority[v]).min() else {
        return empty;
    };
    let alpha = Player::likes(min_priority);

    let targets: Vec<bool> = (0..n)
        .map(|v| sub[v] && game.priority[v] == min_priority)
        .collect();
    let attr = attractor(game, alpha, &targets, sub);
    let rest: Vec<bool> = (0..n).map(|v| sub[v] && !attr.member[v]).collect();
    let (w1, s1, s2) = solve_rec(game, &rest);

    let (w_alpha, w_beta, s_alpha, s_beta) = match alpha {
        Player::P1 => (&w1, &negate(&w1, &rest), &s1, &s2),
        Player::P2 => (&negate(&w1, &rest), &w1, &s2, &s1),
    };

    if w_beta.iter().all(|&b| !b) {
        // alpha wins all of `sub`.
        let mut strat_alpha = s_alpha.clone();
        for v in 0..n {
            if sub[v] && attr.member[v] && game.owner[v] == alpha && strat_alpha[v].is_none() {
                strat_alpha[v] = match attr.strategy[v] {
                    Some(t) => Some(t),
                    // Priority-`m` vertices may move anywhere inside `sub`.
                    None => game.out[v].iter().copied().filter(|&t| sub[t]).min(),
                };
            }
        }
        let win1 = match alpha {
            Player::P1 => sub.to_vec(),
            Player::P2 => vec![false; n],
        };
        return match alpha {
            Player::P1 => (win1, strat_alpha, vec![None; n]),
            Player::P2 => (win1, vec![None; n], strat_alpha),
        };
    }

    // beta wins at least its recursive region; attract to it and re-solve.
    let beta = alpha.opponent();
    let battr = attractor(game, beta, w_beta, sub);
    let rest2: Vec<bool> = (0..n).map(|v| sub[v] && !battr.member[v]).collect();
    let (w1_2, s1_2, s2_2) = solve_rec(game, &rest2);

    let mut win1_total = w1_2;
    let mut strat1 = s1_2;
    let mut strat2 = s2_2;
    for v in 0..n {
        if battr.member[v] {
            match beta {
                Player::P1 => win1_total[v] = true,
                Player::P2 => win1_total[v] = false,
            }
        }
    }
    let (strat_beta_total, s_beta_rec) = match beta {
        Player::P1 => (&mut strat1, s_beta),
        Player::P2 => (&mut strat2, s_beta),
    };
    for v in 0..n {
        if battr.member[v] && game.owner[v] == beta && strat_beta_total[v].is_none() {
            strat_beta_total[v] = if w_beta[v] {
                s_beta_rec[v]
            } else {
                battr.strategy[v]
            };
        }
    }
    (win1_total, strat1, strat2)
}

fn negate(set: &[bool], sub: &[bool]) -> Vec<bool> {
    set.iter()
        .zip(sub)
        .map(|(&s, &in_sub)| in_sub && !s)
        .collect()
}
