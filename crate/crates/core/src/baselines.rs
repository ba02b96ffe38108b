//! Comparison planners: lawn-mower sweep, random wanderer, and GP-enhanced
//! particle swarm. All three emit per-agent action scores (a one-hot on the
//! desired move, or all minus-infinity for a deliberate hold) and are routed
//! through the same safe-consensus layer as the learned policy, so every
//! comparison shares the safety machinery.

use crate::grid::{Action, Cell, NavMap};
use crate::localgp::LocalGpModel;
use crate::rng::stream_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Score vector holding the agent in place.
pub const HOLD: [f64; 8] = [f64::NEG_INFINITY; 8];

fn one_hot(a: Action) -> [f64; 8] {
    let mut s = [0.0; 8];
    s[a.index()] = 1.0;
    s
}

fn feasible(map: &NavMap, pos: Cell) -> Vec<Action> {
    Action::ALL
        .into_iter()
        .filter(|&a| map.apply_action(pos, a).is_some())
        .collect()
}

/// Boustrophedon sweep: run straight, and at an obstacle shift one lane
/// (one move along the fixed perpendicular offset) and reverse. When even
/// the lane shift is blocked a fresh random feasible heading restarts the
/// sweep (counted in `fallbacks`).
pub struct LmppPlanner {
    headings: Vec<Action>,
    offsets: Vec<Action>,
    /// Agents that just executed a lane shift and must reverse.
    shifting: Vec<bool>,
    rng: ChaCha8Rng,
    pub fallbacks: usize,
}

/// The two directions perpendicular to a heading on the 8-connected grid.
fn perpendicular(a: Action) -> [Action; 2] {
    let (dr, dc) = a.delta();
    let left = (-dc, dr);
    let right = (dc, -dr);
    let find = |d: (i64, i64)| Action::ALL.into_iter().find(|a| a.delta() == d).unwrap();
    [find(left), find(right)]
}

/// Lane-shift direction for a heading, preferring a side that is feasible
/// from the current cell so corner restarts sweep away from the wall.
fn pick_offset(map: &NavMap, pos: Cell, heading: Action, rng: &mut ChaCha8Rng) -> Action {
    let perp = perpendicular(heading);
    let open: Vec<Action> = perp
        .into_iter()
        .filter(|&a| map.apply_action(pos, a).is_some())
        .collect();
    match open.len() {
        0 => perp[rng.gen_range(0..2)],
        1 => open[0],
        _ => open[rng.gen_range(0..open.len())],
    }
}

impl LmppPlanner {
    pub fn new(map: &NavMap, positions: &[Cell], seed: u64) -> Self {
        let mut rng = stream_rng(seed, "lmpp", 0);
        let mut headings = Vec::new();
        let mut offsets = Vec::new();
        for &p in positions {
            let f = feasible(map, p);
            let heading = if f.is_empty() {
                Action::South
            } else {
                f[rng.gen_range(0..f.len())]
            };
            headings.push(heading);
            let offset = pick_offset(map, p, heading, &mut rng);
            offsets.push(offset);
        }
        LmppPlanner { headings, offsets, shifting: vec![false; positions.len()], rng, fallbacks: 0 }
    }

    /// Explicit initial state, for geometry tests.
    pub fn with_state(headings: Vec<Action>, offsets: Vec<Action>, seed: u64) -> Self {
        let n = headings.len();
        LmppPlanner {
            headings,
            offsets,
            shifting: vec![false; n],
            rng: stream_rng(seed, "lmpp", 0),
            fallbacks: 0,
        }
    }

    pub fn scores(&mut self, map: &NavMap, positions: &[Cell]) -> Vec<[f64; 8]> {
        positions
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                if self.shifting[j] {
                    // lane shift done: travel back along the parallel line
                    self.headings[j] = self.headings[j].reverse();
                    self.shifting[j] = false;
                }
                if map.apply_action(p, self.headings[j]).is_some() {
                    return one_hot(self.headings[j]);
                }
                if map.apply_action(p, self.offsets[j]).is_some() {
                    self.shifting[j] = true;
                    return one_hot(self.offsets[j]);
                }
                // boxed sweep: restart with a fresh random feasible heading
                self.fallbacks += 1;
                let f = feasible(map, p);
                if f.is_empty() {
                    return HOLD;
                }
                let heading = f[self.rng.gen_range(0..f.len())];
                self.headings[j] = heading;
                self.offsets[j] = pick_offset(map, p, heading, &mut self.rng);
                one_hot(heading)
            })
            .collect()
    }

    /// Consensus may override the desired move; the executed action becomes
    /// the new heading so the sweep continues from reality.
    pub fn observe_executed(&mut self, executed: &[Option<Action>]) {
        for (j, a) in executed.iter().enumerate() {
            if let Some(a) = a {
                if self.shifting[j] {
                    if *a != self.offsets[j] {
                        // the shift was censored; stay in sweep mode
                        self.shifting[j] = false;
                        self.headings[j] = *a;
                    }
                } else if *a != self.headings[j] {
                    self.headings[j] = *a;
                }
            }
        }
    }
}

/// Straight-line wanderer: keep the heading while it is feasible; when
/// blocked pick uniformly among the feasible actions excluding the reverse,
/// falling back to the reverse only when it is the sole way out.
pub struct RwppPlanner {
    headings: Vec<Action>,
    rng: ChaCha8Rng,
}

impl RwppPlanner {
    pub fn new(map: &NavMap, positions: &[Cell], seed: u64) -> Self {
        let mut rng = stream_rng(seed, "rwpp", 0);
        let headings = positions
            .iter()
            .map(|&p| {
                let f = feasible(map, p);
                if f.is_empty() {
                    Action::South
                } else {
                    f[rng.gen_range(0..f.len())]
                }
            })
            .collect();
        RwppPlanner { headings, rng }
    }

    pub fn with_headings(headings: Vec<Action>, seed: u64) -> Self {
        RwppPlanner { headings, rng: stream_rng(seed, "rwpp", 0) }
    }

    pub fn scores(&mut self, map: &NavMap, positions: &[Cell]) -> Vec<[f64; 8]> {
        positions
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                if map.apply_action(p, self.headings[j]).is_some() {
                    return one_hot(self.headings[j]);
                }
                let f = feasible(map, p);
                let reverse = self.headings[j].reverse();
                let candidates: Vec<Action> = f.iter().cloned().filter(|&a| a != reverse).collect();
                let pick = if !candidates.is_empty() {
                    candidates[self.rng.gen_range(0..candidates.len())]
                } else if f.contains(&reverse) {
                    reverse
                } else {
                    return HOLD;
                };
                self.headings[j] = pick;
                one_hot(pick)
            })
            .collect()
    }

    pub fn observe_executed(&mut self, executed: &[Option<Action>]) {
        for (j, a) in executed.iter().enumerate() {
            if let Some(a) = a {
                self.headings[j] = *a;
            }
        }
    }
}

/// PSO velocity-update coefficients (not published with the original
/// formulation; these defaults are logged with every results file).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PsoCoefficients {
    pub inertia: f64,
    /// Weights of the four attractors: max-uncertainty cell, personal best,
    /// fleet best, max-predicted-mean cell.
    pub attraction: [f64; 4],
}

impl Default for PsoCoefficients {
    fn default() -> Self {
        PsoCoefficients { inertia: 0.7, attraction: [1.0; 4] }
    }
}

/// GP-enhanced particle swarm: each vehicle is a particle whose velocity is
/// pulled toward the model's uncertainty peak, its own best measurement, the
/// fleet's best measurement, and the model's mean peak. By default this
/// planner runs against a single global GP.
pub struct PsoPlanner {
    coeffs: PsoCoefficients,
    velocities: Vec<(f64, f64)>,
    personal_best: Vec<(f64, Cell)>,
    fleet_best: (f64, Cell),
    rng: ChaCha8Rng,
}

impl PsoPlanner {
    /// `initial` pairs each agent's start cell with its first measurement.
    pub fn new(coeffs: PsoCoefficients, initial: &[(Cell, f64)], seed: u64) -> Self {
        let personal_best: Vec<(f64, Cell)> = initial.iter().map(|&(c, v)| (v, c)).collect();
        let fleet_best = personal_best
            .iter()
            .cloned()
            .max_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
            .expect("at least one agent");
        PsoPlanner {
            coeffs,
            velocities: vec![(0.0, 0.0); initial.len()],
            personal_best,
            fleet_best,
            rng: stream_rng(seed, "pso", 0),
        }
    }

    pub fn personal_best(&self, j: usize) -> (f64, Cell) {
        self.personal_best[j]
    }

    pub fn velocity(&self, j: usize) -> (f64, f64) {
        self.velocities[j]
    }

    /// Velocity update and angular snap of the new velocity onto the 8
    /// movement directions. A vanishing velocity yields a hold.
    pub fn scores(
        &mut self,
        map: &NavMap,
        positions: &[Cell],
        model: &LocalGpModel,
    ) -> Vec<[f64; 8]> {
        let sigma_peak = argmax_cell(map, model.fused_std());
        let mu_peak = argmax_cell(map, model.fused_mean());
        positions
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let attractors = [
                    sigma_peak,
                    self.personal_best[j].1,
                    self.fleet_best.1,
                    mu_peak,
                ];
                let (mut vr, mut vc) = self.velocities[j];
                vr *= self.coeffs.inertia;
                vc *= self.coeffs.inertia;
                for (k, &attr) in attractors.iter().enumerate() {
                    let u: f64 = self.rng.gen();
                    vr += self.coeffs.attraction[k] * u * (attr.row as f64 - p.row as f64);
                    vc += self.coeffs.attraction[k] * u * (attr.col as f64 - p.col as f64);
                }
                self.velocities[j] = (vr, vc);
                if nearest_direction((vr, vc)).is_none() {
                    return HOLD;
                }
                // degrade to the nearest map-feasible direction by angle
                directions_by_angle((vr, vc))
                    .into_iter()
                    .find(|&a| map.apply_action(p, a).is_some())
                    .map_or(HOLD, one_hot)
            })
            .collect()
    }

    /// Feeds the new measurements into the personal/fleet bests.
    pub fn observe_measurements(&mut self, positions: &[Cell], values: &[f64]) {
        for (j, (&p, &v)) in positions.iter().zip(values).enumerate() {
            if v > self.personal_best[j].0 {
                self.personal_best[j] = (v, p);
            }
            if v > self.fleet_best.0 {
                self.fleet_best = (v, p);
            }
        }
    }
}

/// Cell with the maximum value, ties resolved by (row, col) order.
fn argmax_cell(map: &NavMap, values: &[f64]) -> Cell {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    map.navigable_cells()[best]
}

/// The movement direction closest in angle to `v`; `None` when `v` vanishes.
pub fn nearest_direction(v: (f64, f64)) -> Option<Action> {
    let norm = (v.0 * v.0 + v.1 * v.1).sqrt();
    if norm < 1e-9 {
        return None;
    }
    Some(directions_by_angle(v)[0])
}

/// All 8 directions sorted by angular distance to `v` (ties by index).
fn directions_by_angle(v: (f64, f64)) -> [Action; 8] {
    let norm = (v.0 * v.0 + v.1 * v.1).sqrt();
    let mut out = Action::ALL;
    out.sort_by(|a, b| {
        let cos = |x: &Action| {
            let u = x.unit_vector();
            (u.0 * v.0 + u.1 * v.1) / norm
        };
        cos(b).total_cmp(&cos(a)).then(a.index().cmp(&b.index()))
    });
    out
}
