//! The fleet POMDP: episode lifecycle, egocentric 5-channel observations and
//! information-gain rewards with redundancy discounting.
//!
//! One environment instance is single-writer; run several instances with
//! independent seeds for vectorized collection. Rewards are computed once per
//! step after every agent's sample has been routed into the model: the reward
//! of agent `j` sums the absolute change of the fused surface over the
//! agent's influence disk, each cell discounted by the number of agents whose
//! disks share it.

use crate::error::{Error, Result};
use crate::grid::{Action, Cell, NavMap};
use crate::groundtruth::{generate, GtConfig, ScalarField};
use crate::localgp::{LocalGpModel, LocalLayout, ModelConfig};
use crate::rng::{derive_seed, stream_rng};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    /// Absolute change of the fused mean surface.
    #[serde(rename = "mu")]
    DeltaMu,
    /// Absolute change of the fused uncertainty surface.
    #[serde(rename = "sigma")]
    DeltaSigma,
}

#[derive(Debug, Clone)]
pub struct EnvConfig {
    pub n_agents: usize,
    pub gt: GtConfig,
    pub reward: RewardKind,
    /// Mission length in moves (the 29 km budget at 580 m per move).
    pub budget: usize,
    pub d_safety_m: f64,
    /// Lattice spacing of the local GP layout.
    pub layout_spacing_m: f64,
    /// Influence radius nu_k; also the reward disk radius.
    pub influence_radius_m: f64,
    pub model: ModelConfig,
    /// Replace the local bank with a single unbounded GP.
    pub use_global_model: bool,
}

impl EnvConfig {
    pub fn new(gt: GtConfig, n_agents: usize) -> Self {
        EnvConfig {
            n_agents,
            gt,
            reward: RewardKind::DeltaMu,
            budget: 50,
            d_safety_m: 300.0,
            layout_spacing_m: 2000.0,
            influence_radius_m: 1450.0,
            model: ModelConfig::default(),
            use_global_model: false,
        }
    }
}

/// Egocentric observation: five H x W channel images (fused mean, fused
/// uncertainty, navigation mask, own position, other positions), each min-max
/// normalized to [0, 1]. The surface channels are shared between the agents
/// of one step, so observations are cheap to clone and to keep in replay.
#[derive(Debug, Clone)]
pub struct Observation {
    height: usize,
    width: usize,
    mu: Arc<Vec<f32>>,
    sigma: Arc<Vec<f32>>,
    nav_mask: Arc<Vec<f32>>,
    agent: Cell,
    others: Vec<Cell>,
}

pub const OBS_CHANNELS: usize = 5;

impl Observation {
    /// Builds an observation from raw channel data; meant for tests, toy
    /// gradient checks and benches rather than production paths.
    pub fn synthetic(
        height: usize,
        width: usize,
        mu: Vec<f32>,
        sigma: Vec<f32>,
        nav_mask: Vec<f32>,
        agent: Cell,
        others: Vec<Cell>,
    ) -> Self {
        assert_eq!(mu.len(), height * width);
        assert_eq!(sigma.len(), height * width);
        assert_eq!(nav_mask.len(), height * width);
        Observation {
            height,
            width,
            mu: Arc::new(mu),
            sigma: Arc::new(sigma),
            nav_mask: Arc::new(nav_mask),
            agent,
            others,
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (OBS_CHANNELS, self.height, self.width)
    }

    pub(crate) fn mu_channel(&self) -> &[f32] {
        &self.mu
    }

    pub(crate) fn sigma_channel(&self) -> &[f32] {
        &self.sigma
    }

    pub(crate) fn mask_channel(&self) -> &[f32] {
        &self.nav_mask
    }

    pub fn agent_position(&self) -> Cell {
        self.agent
    }

    pub fn other_positions(&self) -> &[Cell] {
        &self.others
    }

    /// Materializes the channel-major stack (mu, sigma, mask, self, others).
    pub fn to_stack(&self) -> Vec<f32> {
        let hw = self.height * self.width;
        let mut out = vec![0.0f32; OBS_CHANNELS * hw];
        out[..hw].copy_from_slice(&self.mu);
        out[hw..2 * hw].copy_from_slice(&self.sigma);
        out[2 * hw..3 * hw].copy_from_slice(&self.nav_mask);
        out[3 * hw + self.agent.row * self.width + self.agent.col] = 1.0;
        for &o in &self.others {
            out[4 * hw + o.row * self.width + o.col] = 1.0;
        }
        out
    }

    /// One channel as an H x W image.
    pub fn channel(&self, c: usize) -> Vec<f32> {
        let hw = self.height * self.width;
        let stack = self.to_stack();
        stack[c * hw..(c + 1) * hw].to_vec()
    }
}

/// One agent-step of experience.
#[derive(Debug, Clone)]
pub struct Transition {
    pub obs: Observation,
    pub action: Action,
    pub reward: f64,
    pub next_obs: Observation,
    pub done: bool,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub rewards: Vec<f64>,
    pub observations: Vec<Observation>,
    pub done: bool,
}

/// Seats a fleet: agent `j` draws uniformly from its deployment zone
/// (`zones[j mod zones]`; all water when the map has no zones) until the
/// pairwise separation clears the safety distance, with 1000 draws per agent
/// before giving up.
pub fn place_fleet(
    map: &NavMap,
    n_agents: usize,
    d_safety_m: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Cell>> {
    let zones = map.zones();
    let mut positions: Vec<Cell> = Vec::with_capacity(n_agents);
    for j in 0..n_agents {
        let candidates: &[Cell] = if zones.is_empty() {
            map.navigable_cells()
        } else {
            &zones[j % zones.len()].cells
        };
        let mut placed = false;
        for _ in 0..1000 {
            let cell = candidates[rng.gen_range(0..candidates.len())];
            if positions.iter().all(|&p| map.distance_m(p, cell) >= d_safety_m) {
                positions.push(cell);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Config(format!(
                "could not seat agent {j} at safe separation after 1000 draws"
            )));
        }
    }
    Ok(positions)
}

/// Number of agents whose influence disk of radius `radius_m` contains `x`.
pub fn redundancy(map: &NavMap, positions: &[Cell], x: Cell, radius_m: f64) -> usize {
    positions
        .iter()
        .filter(|&&p| map.distance_m(p, x) <= radius_m)
        .count()
}

/// Redundancy-discounted absolute surface change over agent `j`'s disk.
///
/// `before`/`after` are fused (mean, std) surface pairs over navigable cells;
/// the reward kind picks which of the two the delta is taken on. Positions
/// are the post-move fleet positions of the step being rewarded.
pub fn reward(
    map: &NavMap,
    before: (&[f64], &[f64]),
    after: (&[f64], &[f64]),
    positions: &[Cell],
    j: usize,
    kind: RewardKind,
    radius_m: f64,
) -> f64 {
    let (surf_before, surf_after) = match kind {
        RewardKind::DeltaMu => (before.0, after.0),
        RewardKind::DeltaSigma => (before.1, after.1),
    };
    let mut total = 0.0;
    for cell in map.disk(positions[j], radius_m) {
        let i = map.nav_index(cell).expect("disk cells are navigable");
        let delta = (surf_after[i] - surf_before[i]).abs();
        let rho = redundancy(map, positions, cell, radius_m);
        total += delta / rho as f64;
    }
    total
}

pub struct Environment {
    map: Arc<NavMap>,
    cfg: EnvConfig,
    layout: LocalLayout,
    nav_mask: Arc<Vec<f32>>,
    // episode state
    gt: Option<ScalarField>,
    model: Option<LocalGpModel>,
    positions: Vec<Cell>,
    step_count: usize,
    prev_mu: Vec<f64>,
    prev_sigma: Vec<f64>,
    cur_mu_norm: Arc<Vec<f32>>,
    cur_sigma_norm: Arc<Vec<f32>>,
}

impl Environment {
    pub fn new(map: Arc<NavMap>, cfg: EnvConfig) -> Result<Self> {
        if cfg.n_agents == 0 {
            return Err(Error::Config("fleet needs at least one agent".into()));
        }
        if cfg.budget == 0 {
            return Err(Error::Config("step budget must be positive".into()));
        }
        let layout = if cfg.use_global_model {
            LocalLayout::global(&map)
        } else {
            LocalLayout::build(&map, cfg.layout_spacing_m, cfg.influence_radius_m)?
        };
        let mut mask = vec![0.0f32; map.height() * map.width()];
        for &cell in map.navigable_cells() {
            mask[cell.row * map.width() + cell.col] = 1.0;
        }
        let ncells = map.navigable_count();
        Ok(Environment {
            map,
            cfg,
            layout,
            nav_mask: Arc::new(mask),
            gt: None,
            model: None,
            positions: Vec::new(),
            step_count: 0,
            prev_mu: vec![0.0; ncells],
            prev_sigma: vec![0.0; ncells],
            cur_mu_norm: Arc::new(Vec::new()),
            cur_sigma_norm: Arc::new(Vec::new()),
        })
    }

    pub fn map(&self) -> &NavMap {
        &self.map
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn layout(&self) -> &LocalLayout {
        &self.layout
    }

    pub fn positions(&self) -> &[Cell] {
        &self.positions
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn model(&self) -> &LocalGpModel {
        self.model.as_ref().expect("reset the environment first")
    }

    pub fn ground_truth(&self) -> &ScalarField {
        self.gt.as_ref().expect("reset the environment first")
    }

    /// Fused surfaces before the latest model update.
    pub fn previous_surfaces(&self) -> (&[f64], &[f64]) {
        (&self.prev_mu, &self.prev_sigma)
    }

    pub fn min_pairwise_separation_m(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.positions.len() {
            for j in i + 1..self.positions.len() {
                min = min.min(self.map.distance_m(self.positions[i], self.positions[j]));
            }
        }
        min
    }

    /// Starts an episode: draws the ground truth, seats every agent in its
    /// deployment zone at safe separation, takes the initial measurements and
    /// rebuilds the model. Emits no reward.
    pub fn reset(&mut self, seed: u64) -> Result<Vec<Observation>> {
        let gt_cfg = self.cfg.gt.with_seed(derive_seed(seed, "gt", 0));
        let gt = generate(&self.map, &gt_cfg)?;

        let mut rng = stream_rng(seed, "placement", 0);
        let positions = place_fleet(&self.map, self.cfg.n_agents, self.cfg.d_safety_m, &mut rng)?;

        let mut model = LocalGpModel::new(&self.map, self.layout.clone(), self.cfg.model);
        let batch: Vec<(Cell, f64)> = positions
            .iter()
            .map(|&p| Ok((p, gt.field.value(&self.map, p)?)))
            .collect::<Result<_>>()?;
        model.add_samples(&self.map, &batch)?;

        self.prev_mu = model.fused_mean().to_vec();
        self.prev_sigma = model.fused_std().to_vec();
        self.gt = Some(gt.field);
        self.model = Some(model);
        self.positions = positions;
        self.step_count = 0;
        self.refresh_observation_surfaces();
        Ok((0..self.cfg.n_agents).map(|j| self.observe(j)).collect())
    }

    fn refresh_observation_surfaces(&mut self) {
        let model = self.model.as_ref().expect("model present");
        self.cur_mu_norm = Arc::new(self.normalized_channel(model.fused_mean()));
        self.cur_sigma_norm = Arc::new(self.normalized_channel(model.fused_std()));
    }

    /// Expands navigable values into an image and min-max normalizes it;
    /// constant channels become all-zeros.
    fn normalized_channel(&self, values: &[f64]) -> Vec<f32> {
        let w = self.map.width();
        let mut img = vec![0.0f64; self.map.height() * w];
        for (i, &cell) in self.map.navigable_cells().iter().enumerate() {
            img[cell.row * w + cell.col] = values[i];
        }
        let min = img.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = img.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max - min <= 1e-12 {
            return vec![0.0f32; img.len()];
        }
        img.iter().map(|v| ((v - min) / (max - min)) as f32).collect()
    }

    /// Egocentric observation of agent `j` for the current state.
    pub fn observe(&self, j: usize) -> Observation {
        assert!(j < self.positions.len(), "agent index out of range");
        Observation {
            height: self.map.height(),
            width: self.map.width(),
            mu: Arc::clone(&self.cur_mu_norm),
            sigma: Arc::clone(&self.cur_sigma_norm),
            nav_mask: Arc::clone(&self.nav_mask),
            agent: self.positions[j],
            others: self
                .positions
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &p)| p)
                .collect(),
        }
    }

    /// Advances one step: all agents move simultaneously, measure, the model
    /// ingests the batch, and rewards are the redundancy-discounted surface
    /// changes. Actions must already be consensus-validated; an unsafe or
    /// blocked action is a contract violation, not a recoverable condition.
    pub fn step(&mut self, actions: &[Option<Action>]) -> Result<StepOutcome> {
        if actions.len() != self.cfg.n_agents {
            return Err(Error::Contract(format!(
                "expected {} actions, got {}",
                self.cfg.n_agents,
                actions.len()
            )));
        }
        if self.step_count >= self.cfg.budget {
            return Err(Error::Contract("episode already finished".into()));
        }

        let mut next_positions = Vec::with_capacity(actions.len());
        for (j, &action) in actions.iter().enumerate() {
            let next = match action {
                Some(a) => self.map.apply_action(self.positions[j], a).ok_or_else(|| {
                    Error::Contract(format!(
                        "blocked action {a} for agent {j} at {} reached the environment",
                        self.positions[j]
                    ))
                })?,
                None => self.positions[j],
            };
            next_positions.push(next);
        }
        for i in 0..next_positions.len() {
            for j in i + 1..next_positions.len() {
                let d = self.map.distance_m(next_positions[i], next_positions[j]);
                if d < self.cfg.d_safety_m {
                    return Err(Error::Contract(format!(
                        "agents {i} and {j} would end {d:.0} m apart (safety {} m)",
                        self.cfg.d_safety_m
                    )));
                }
            }
        }

        let gt = self.gt.as_ref().expect("reset the environment first");
        let batch: Vec<(Cell, f64)> = next_positions
            .iter()
            .map(|&p| Ok((p, gt.value(&self.map, p)?)))
            .collect::<Result<_>>()?;

        let model = self.model.as_mut().expect("reset the environment first");
        let before_mu = model.fused_mean().to_vec();
        let before_sigma = model.fused_std().to_vec();
        model.add_samples(&self.map, &batch)?;

        let after_mu = model.fused_mean();
        let after_sigma = model.fused_std();
        let rewards: Vec<f64> = (0..self.cfg.n_agents)
            .map(|j| {
                reward(
                    &self.map,
                    (&before_mu, &before_sigma),
                    (after_mu, after_sigma),
                    &next_positions,
                    j,
                    self.cfg.reward,
                    self.cfg.influence_radius_m,
                )
            })
            .collect();

        self.prev_mu = before_mu;
        self.prev_sigma = before_sigma;
        self.positions = next_positions;
        self.step_count += 1;
        self.refresh_observation_surfaces();

        Ok(StepOutcome {
            rewards,
            observations: (0..self.cfg.n_agents).map(|j| self.observe(j)).collect(),
            done: self.step_count == self.cfg.budget,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundtruth::GtKind;

    fn env(n_agents: usize) -> Environment {
        let map = Arc::new(NavMap::default_map().clone());
        Environment::new(map, EnvConfig::new(GtConfig::new(GtKind::Wqp, 0), n_agents)).unwrap()
    }

    #[test]
    fn reset_places_single_agent_in_zone() {
        let mut e = env(1);
        e.reset(7).unwrap();
        let zone = &e.map().zones()[0];
        assert!(zone.cells.contains(&e.positions()[0]));
        assert_eq!(e.model().measurement_count(), 1);
    }

    #[test]
    fn reset_is_deterministic() {
        let mut a = env(3);
        let mut b = env(3);
        a.reset(42).unwrap();
        b.reset(42).unwrap();
        assert_eq!(a.positions(), b.positions());
        assert_eq!(a.ground_truth().values(), b.ground_truth().values());
    }

    #[test]
    fn resets_respect_safety_separation() {
        let mut e = env(3);
        for seed in 0..1000 {
            e.reset(seed).unwrap();
            assert!(e.min_pairwise_separation_m() >= 300.0, "seed {seed}");
        }
    }

    #[test]
    fn observation_channels_are_normalized() {
        let mut e = env(1);
        let obs = e.reset(3).unwrap().remove(0);
        let (c, h, w) = obs.dims();
        assert_eq!((c, h, w), (5, 58, 38));

        // single agent: others channel all zero
        assert!(obs.channel(4).iter().all(|&v| v == 0.0));
        // map channel equals the navigability mask
        let mask = obs.channel(2);
        for (i, &v) in mask.iter().enumerate() {
            let cell = Cell::new(i / w, i % w);
            assert_eq!(v, if e.map().is_navigable(cell) { 1.0 } else { 0.0 });
        }
        // one-hot self channel
        let own = obs.channel(3);
        assert_eq!(own.iter().filter(|&&v| v != 0.0).count(), 1);
        assert_eq!(own[obs.agent_position().row * w + obs.agent_position().col], 1.0);
        // everything bounded
        let stack = obs.to_stack();
        assert!(stack.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn observations_swap_with_agent_index() {
        let mut e = env(2);
        e.reset(11).unwrap();
        let a = e.observe(0);
        let b = e.observe(1);
        assert_eq!(a.agent_position(), b.other_positions()[0]);
        assert_eq!(b.agent_position(), a.other_positions()[0]);
        assert_eq!(a.channel(3), b.channel(4));
        assert_eq!(a.channel(4), b.channel(3));
    }

    #[test]
    fn redundancy_counts_disks() {
        let map = NavMap::default_map();
        let p = Cell::new(20, 18);
        assert_eq!(redundancy(map, &[p], p, 1450.0), 1);
        assert_eq!(redundancy(map, &[p, p], p, 1450.0), 2);

        // random layouts against a brute-force membership count
        let mut rng = crate::rng::stream_rng(5, "redundancy", 0);
        use rand::Rng;
        let cells = map.navigable_cells();
        for _ in 0..200 {
            let positions: Vec<Cell> =
                (0..3).map(|_| cells[rng.gen_range(0..cells.len())]).collect();
            let x = cells[rng.gen_range(0..cells.len())];
            let got = redundancy(map, &positions, x, 1450.0);
            let expect = positions
                .iter()
                .filter(|&&p| {
                    let dr = p.row as f64 - x.row as f64;
                    let dc = p.col as f64 - x.col as f64;
                    (dr * dr + dc * dc).sqrt() * 290.0 <= 1450.0
                })
                .count();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn co_located_agents_halve_the_reward() {
        let map = NavMap::default_map();
        let ncells = map.navigable_count();
        let before = (vec![0.0; ncells], vec![1.0; ncells]);
        let mut after_mu = vec![0.0; ncells];
        // synthetic change concentrated near the shared position
        let p = Cell::new(20, 18);
        for cell in map.disk(p, 1450.0) {
            after_mu[map.nav_index(cell).unwrap()] = 0.4;
        }
        let after = (after_mu, vec![1.0; ncells]);

        let solo = reward(
            map,
            (&before.0, &before.1),
            (&after.0, &after.1),
            &[p],
            0,
            RewardKind::DeltaMu,
            1450.0,
        );
        let pair = reward(
            map,
            (&before.0, &before.1),
            (&after.0, &after.1),
            &[p, p],
            0,
            RewardKind::DeltaMu,
            1450.0,
        );
        assert_eq!(pair, solo / 2.0);
    }

    #[test]
    fn resampling_known_cell_gives_zero_reward() {
        let mut e = env(1);
        e.reset(9).unwrap();
        // hold in place: the agent re-measures its current cell
        let out = e.step(&[None]).unwrap();
        assert!(out.rewards[0] < 1e-6, "reward {}", out.rewards[0]);
    }

    #[test]
    fn step_rewards_match_formula_oracle() {
        let mut e = env(2);
        e.reset(13).unwrap();
        let before = (e.model().fused_mean().to_vec(), e.model().fused_std().to_vec());
        let actions = first_feasible_actions(&e);
        let out = e.step(&actions).unwrap();
        let after = (e.model().fused_mean().to_vec(), e.model().fused_std().to_vec());

        for j in 0..2 {
            let mut expect = 0.0;
            for cell in e.map().disk(e.positions()[j], 1450.0) {
                let i = e.map().nav_index(cell).unwrap();
                let delta = (after.0[i] - before.0[i]).abs();
                let rho = e
                    .positions()
                    .iter()
                    .filter(|&&p| e.map().distance_m(p, cell) <= 1450.0)
                    .count() as f64;
                expect += delta / rho;
            }
            assert!((out.rewards[j] - expect).abs() < 1e-12);
        }
    }

    fn first_feasible_actions(e: &Environment) -> Vec<Option<Action>> {
        // pick per-agent feasible moves that keep pairwise safety
        let mut chosen: Vec<Option<Action>> = Vec::new();
        let mut committed: Vec<Cell> = Vec::new();
        for (j, &p) in e.positions().iter().enumerate() {
            let mut pick = None;
            for a in Action::ALL {
                if let Some(next) = e.map().apply_action(p, a) {
                    let safe = committed
                        .iter()
                        .all(|&c| e.map().distance_m(c, next) >= 300.0);
                    let vs_pending = e.positions()[j + 1..]
                        .iter()
                        .all(|&q| e.map().distance_m(q, next) >= 300.0);
                    if safe && vs_pending {
                        pick = Some(a);
                        committed.push(next);
                        break;
                    }
                }
            }
            if pick.is_none() {
                committed.push(p);
            }
            chosen.push(pick);
        }
        chosen
    }

    #[test]
    fn episode_ends_exactly_at_budget() {
        let mut e = env(1);
        e.reset(2).unwrap();
        let mut done = false;
        for step in 1..=50 {
            let actions = first_feasible_actions(&e);
            let out = e.step(&actions).unwrap();
            done = out.done;
            assert_eq!(done, step == 50, "step {step}");
        }
        assert!(done);
        assert!(e.step(&[None]).is_err(), "stepping past the budget must fail");
    }

    #[test]
    fn blocked_action_is_a_contract_error() {
        let mut e = env(1);
        e.reset(4).unwrap();
        // find a blocked direction from the current cell
        let blocked = Action::ALL
            .into_iter()
            .find(|&a| e.map().apply_action(e.positions()[0], a).is_none());
        if let Some(a) = blocked {
            assert!(matches!(e.step(&[Some(a)]), Err(Error::Contract(_))));
        }
    }

    #[test]
    fn sample_count_grows_by_fleet_size() {
        let mut e = env(3);
        e.reset(21).unwrap();
        let n0 = e.model().measurement_count();
        let actions = first_feasible_actions(&e);
        e.step(&actions).unwrap();
        assert_eq!(e.model().measurement_count(), n0 + 3);
    }

    #[test]
    fn rewards_are_non_negative_for_both_kinds() {
        for kind in [RewardKind::DeltaMu, RewardKind::DeltaSigma] {
            let map = Arc::new(NavMap::default_map().clone());
            let mut cfg = EnvConfig::new(GtConfig::new(GtKind::Algae, 0), 2);
            cfg.reward = kind;
            let mut e = Environment::new(map, cfg).unwrap();
            e.reset(5).unwrap();
            for _ in 0..10 {
                let actions = first_feasible_actions(&e);
                let out = e.step(&actions).unwrap();
                assert!(out.rewards.iter().all(|&r| r >= 0.0));
                if out.done {
                    break;
                }
            }
        }
    }

    #[test]
    fn single_agent_episode_reward_equals_surface_change_sum() {
        let mut e = env(1);
        e.reset(31).unwrap();
        let mut total = 0.0;
        let mut expect = 0.0;
        for _ in 0..10 {
            let before = e.model().fused_mean().to_vec();
            let actions = first_feasible_actions(&e);
            let out = e.step(&actions).unwrap();
            total += out.rewards[0];
            let after = e.model().fused_mean();
            for cell in e.map().disk(e.positions()[0], 1450.0) {
                let i = e.map().nav_index(cell).unwrap();
                expect += (after[i] - before[i]).abs();
            }
        }
        assert!((total - expect).abs() < 1e-9);
    }
}
