//! Collision-free joint action selection.
//!
//! Agents commit actions one at a time in decreasing order of their best
//! score. Each agent takes its highest-scoring action among those that are
//! not terrain-blocked and whose target keeps the safety distance from every
//! already-committed next position; an agent left with no feasible action
//! holds its cell (a flagged null action) and its position joins the
//! committed set. Ties break toward the lower action index, and equal best
//! scores decide in agent-index order.

use crate::grid::{Action, Cell, NavMap};

#[derive(Debug, Clone)]
pub struct ConsensusOutcome {
    /// Chosen action per agent; `None` is the null (hold) fallback.
    pub actions: Vec<Option<Action>>,
    /// Post-move position per agent.
    pub next_positions: Vec<Cell>,
    /// Decision order (agent indices, highest score first).
    pub order: Vec<usize>,
    /// How many agents fell back to the null action.
    pub nulls: usize,
}

/// Greedy-sequential safe action selection over per-agent action scores.
pub fn safe_consensus(
    map: &NavMap,
    positions: &[Cell],
    scores: &[[f64; 8]],
    d_safety_m: f64,
) -> ConsensusOutcome {
    assert_eq!(positions.len(), scores.len(), "one score vector per agent");
    let n = positions.len();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ma = scores[a].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mb = scores[b].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        mb.total_cmp(&ma).then(a.cmp(&b))
    });

    let mut actions = vec![None; n];
    let mut next_positions = positions.to_vec();
    let mut committed: Vec<Cell> = Vec::with_capacity(n);
    let mut nulls = 0;

    for &j in &order {
        let mut best: Option<(f64, usize, Cell)> = None;
        for (ai, action) in Action::ALL.into_iter().enumerate() {
            let s = scores[j][ai];
            // minus infinity marks an action censored by the caller
            if s == f64::NEG_INFINITY {
                continue;
            }
            let Some(target) = map.apply_action(positions[j], action) else {
                continue;
            };
            if committed.iter().any(|&c| map.distance_m(c, target) < d_safety_m) {
                continue;
            }
            // strictly-greater keeps the lowest action index on ties
            if best.map_or(true, |(bs, _, _)| s > bs) {
                best = Some((s, ai, target));
            }
        }
        match best {
            Some((_, ai, target)) => {
                actions[j] = Action::from_index(ai);
                next_positions[j] = target;
                committed.push(target);
            }
            None => {
                nulls += 1;
                next_positions[j] = positions[j];
                committed.push(positions[j]);
            }
        }
    }

    ConsensusOutcome { actions, next_positions, order, nulls }
}
