//! Gravity-style agglomerative simulation over an affinity matrix.
//!
//! Actors start as singleton communities embedded in an n-dimensional
//! influence space (each community's position is its row of the
//! influence matrix S, initially its affinity row with self-influence
//! set to 1). Communities attract one another with a force that grows
//! with affinity and mass and falls off with squared distance. The time
//! step is renormalized every iteration so the fastest community moves
//! exactly `delta`, which keeps the integration stable no matter how
//! close two communities get. When a community's influence over another
//! reaches that community's self-influence, the two fuse; fusion
//! continues until a single community remains, and the recorded fusion
//! times form the dendrogram that partition selection works on.
//!
//! Invariants the simulation maintains (and the tests check):
//! - total mass is conserved exactly across fusions,
//! - a run over n actors produces exactly n-1 fusions,
//! - simulated time never decreases and every movement step has dt > 0,
//! - the longest displacement in an iteration never exceeds `delta`,
//! - zero-affinity pairs are never visited by the force loop,
//! - two runs with identical inputs produce bit-identical dendrograms.

use crate::affinity::{self, AffinityError};
use crate::dendrogram::{Dendrogram, DendrogramError, Fusion};
use crate::graph::{DegreeMode, Graph};
use crate::tnorm::TNorm;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("graph has {n} actors; at least 2 are required")]
    TooSmall { n: usize },
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Affinity(#[from] AffinityError),
    #[error(
        "simulation stalled at iteration {iteration}: no positive affinity \
         connects the component groups {components}"
    )]
    Stall { iteration: u64, components: String },
    #[error("communities {a} and {b} are not both live")]
    NotLive { a: usize, b: usize },
    #[error(transparent)]
    Dendrogram(#[from] DendrogramError),
}

/// How masses enter the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Mass-blind: the mass exponent is pinned to zero, every community
    /// accelerates and is timed as if it had unit mass.
    Naive,
    /// Mass-aware: heavy communities resist movement (1/m^p) and, when
    /// fastest, dictate a proportionally longer time step.
    #[default]
    EarlyRoman,
}

/// Where the first iteration's `delta` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaMode {
    /// Use the configured `delta` from the first iteration on.
    Static,
    /// Derive the first iteration's displacement budget from the
    /// smallest influence gap still separating any interacting pair,
    /// then fall back to the configured `delta`. Skips the dead time a
    /// small static `delta` spends crossing the initial gaps.
    #[default]
    DynamicFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Blend between best-friend and best-common-friend affinity.
    pub alpha: f64,
    /// Mass exponent (inertia); only active under the early-roman policy.
    pub p: f64,
    /// Mass-product exponent inside the force term; 0 removes the term.
    pub c: f64,
    pub tnorm: TNorm,
    /// Displacement of the fastest community per iteration.
    pub delta: f64,
    pub delta_mode: DeltaMode,
    pub policy: Policy,
    /// Fixed community count for selection; `None` selects by score.
    pub target_k: Option<usize>,
    /// Abort after this many consecutive iterations without a fusion.
    pub max_stall_iterations: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            alpha: 0.7,
            p: 3.0,
            c: 0.0,
            tnorm: TNorm::Product,
            delta: 0.1,
            delta_mode: DeltaMode::DynamicFirst,
            policy: Policy::EarlyRoman,
            target_k: None,
            max_stall_iterations: 1_000_000,
        }
    }
}

impl EngineConfig {
    fn validate(&self, n: usize) -> Result<(), EngineError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(EngineError::Config(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if !self.delta.is_finite() || self.delta <= 0.0 {
            return Err(EngineError::Config(format!(
                "delta must be positive and finite, got {}",
                self.delta
            )));
        }
        if !self.p.is_finite() || self.p < 0.0 {
            return Err(EngineError::Config(format!(
                "mass exponent p must be finite and non-negative, got {}",
                self.p
            )));
        }
        if !self.c.is_finite() {
            return Err(EngineError::Config(format!(
                "force exponent c must be finite, got {}",
                self.c
            )));
        }
        if let Some(k) = self.target_k {
            if k < 1 || k > n {
                return Err(EngineError::Config(format!(
                    "target_k must lie in 1..={n}, got {k}"
                )));
            }
        }
        if self.max_stall_iterations == 0 {
            return Err(EngineError::Config(
                "max_stall_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn effective_p(&self) -> f64 {
        match self.policy {
            Policy::Naive => 0.0,
            Policy::EarlyRoman => self.p,
        }
    }
}

/// A live community: a stable id (never recycled), the actor indices it
/// absorbed, and its social value.
#[derive(Debug, Clone, PartialEq)]
pub struct Community {
    pub id: usize,
    pub members: Vec<usize>,
    pub mass: f64,
}

/// Full simulation state. `affinity` and `influence` are k×k row-major
/// matrices over the live communities, in live-list order; row i of
/// `influence` is community i's position, and `influence[i][j]` is the
/// influence community j exerts over i.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub n0: usize,
    pub labels: Vec<String>,
    pub live: Vec<Community>,
    pub affinity: Vec<f64>,
    pub influence: Vec<f64>,
    pub t: f64,
    pub iteration: u64,
    /// Stable ids of zero-degree, zero-affinity actors. They sit out of
    /// the dynamics entirely and are attached at the end of the run.
    pub flagged: Vec<usize>,
}

impl SimulationState {
    pub fn k(&self) -> usize {
        self.live.len()
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.affinity[i * self.live.len() + j]
    }

    pub fn s(&self, i: usize, j: usize) -> f64 {
        self.influence[i * self.live.len() + j]
    }

    pub fn position_of(&self, id: usize) -> Option<usize> {
        self.live.iter().position(|c| c.id == id)
    }

    fn is_flagged(&self, id: usize) -> bool {
        self.flagged.binary_search(&id).is_ok()
    }

    /// Communities that actually take part in the dynamics.
    fn active_count(&self) -> usize {
        self.live.iter().filter(|c| !self.is_flagged(c.id)).count()
    }
}

/// Unit-time forces for one iteration, plus the bookkeeping the run
/// loop and the invariant checks need.
#[derive(Debug, Clone)]
pub struct StepForces {
    /// Per live community: displacement per unit time (u_i).
    pub unit: Vec<Vec<f64>>,
    pub magnitudes: Vec<f64>,
    /// Interacting pairs at zero distance, as (low, high) stable ids;
    /// they must fuse before any movement makes sense.
    pub coincident: Vec<(usize, usize)>,
    /// Ordered pairs the force loop actually touched.
    pub visited_pairs: u64,
    /// Ordered pairs with positive affinity, counted independently.
    pub nonzero_pairs: u64,
}

/// One movement iteration in the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub t: f64,
    pub dt: f64,
    pub live: usize,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub dendrogram: Dendrogram,
    /// Movement iterations executed (collision-only passes not counted).
    pub iterations: u64,
    pub visited_pairs: u64,
    pub nonzero_pairs: u64,
    /// True when every iteration visited no more pairs than had
    /// positive affinity — the sparsity contract of the force loop.
    pub sparsity_respected: bool,
    pub warnings: Vec<String>,
    pub trace: Option<Vec<TraceRow>>,
}

/// Builds the initial state: combined affinity, unweighted connection
/// counts as social values, influence = affinity with unit diagonal.
pub fn initialize(g: &Graph, cfg: &EngineConfig) -> Result<SimulationState, EngineError> {
    let n = g.n();
    if n < 2 {
        return Err(EngineError::TooSmall { n });
    }
    cfg.validate(n)?;
    let aff = affinity::combine(g, cfg.alpha)?;
    let mut affinity = Vec::with_capacity(n * n);
    for i in 0..n {
        affinity.extend_from_slice(aff.row(i));
    }
    let mut influence = affinity.clone();
    for i in 0..n {
        influence[i * n + i] = 1.0;
    }
    let mut live = Vec::with_capacity(n);
    let mut flagged = Vec::new();
    for i in 0..n {
        let mass = g.connection_count(i, DegreeMode::Total) as f64;
        if mass == 0.0 {
            let detached = (0..n).all(|j| affinity[i * n + j] == 0.0 && affinity[j * n + i] == 0.0);
            if detached {
                flagged.push(i);
            }
        }
        live.push(Community {
            id: i,
            members: vec![i],
            mass,
        });
    }
    Ok(SimulationState {
        n0: n,
        labels: g.labels().to_vec(),
        live,
        affinity,
        influence,
        t: 0.0,
        iteration: 0,
        flagged,
    })
}

/// Accumulates the unit-time force on every live community:
/// u_i = (1/m_i^p) · Σ over j with A(i,j) > 0 of
///       T((m_i·m_j)^c, A(i,j)) · (s_j − s_i) / d³.
/// Pairs at zero distance contribute no force and are reported as
/// coincident instead.
pub fn unit_forces(state: &SimulationState, cfg: &EngineConfig) -> StepForces {
    let k = state.k();
    let p = cfg.effective_p();
    let mut unit = vec![vec![0.0; k]; k];
    let mut magnitudes = vec![0.0; k];
    let mut coincident: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut visited = 0u64;
    for i in 0..k {
        let mi = state.live[i].mass;
        let inv_inertia = if p == 0.0 { 1.0 } else { 1.0 / mi.powf(p) };
        for j in 0..k {
            if j == i || state.affinity[i * k + j] <= 0.0 {
                continue;
            }
            visited += 1;
            let mut d2 = 0.0;
            for x in 0..k {
                let dx = state.influence[j * k + x] - state.influence[i * k + x];
                d2 += dx * dx;
            }
            if d2 == 0.0 {
                let (a, b) = (state.live[i].id, state.live[j].id);
                coincident.insert((a.min(b), a.max(b)));
                continue;
            }
            let mass_term = if cfg.c == 0.0 {
                1.0
            } else {
                (mi * state.live[j].mass).powf(cfg.c)
            };
            let pull = cfg.tnorm.apply(mass_term, state.affinity[i * k + j]);
            let coef = inv_inertia * pull / (d2 * d2.sqrt());
            for x in 0..k {
                unit[i][x] += coef * (state.influence[j * k + x] - state.influence[i * k + x]);
            }
        }
        magnitudes[i] = unit[i].iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let mut nonzero = 0u64;
    for i in 0..k {
        for j in 0..k {
            if i != j && state.affinity[i * k + j] > 0.0 {
                nonzero += 1;
            }
        }
    }
    StepForces {
        unit,
        magnitudes,
        coincident: coincident.into_iter().collect(),
        visited_pairs: visited,
        nonzero_pairs: nonzero,
    }
}

/// Displacements over an externally chosen time step: g_i = u_i · dt.
pub fn attraction_step(state: &SimulationState, cfg: &EngineConfig, dt: f64) -> Vec<Vec<f64>> {
    let forces = unit_forces(state, cfg);
    forces
        .unit
        .into_iter()
        .map(|row| row.into_iter().map(|v| v * dt).collect())
        .collect()
}

/// Position of the fastest community: highest unit-force magnitude,
/// lowest live index on ties. `None` when everything is at rest.
fn fastest(forces: &StepForces) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &m) in forces.magnitudes.iter().enumerate() {
        if m > 0.0 && best.map_or(true, |b| m > forces.magnitudes[b]) {
            best = Some(i);
        }
    }
    best
}

/// Sum of force magnitudes on community `f` per unit of its inertia-free
/// pull: Σ T((m_f·m_j)^c, A(f,j)) / d². Renormalizing dt by this bounds
/// the fastest displacement by `delta` (triangle inequality).
fn pull_magnitude_sum(state: &SimulationState, cfg: &EngineConfig, f: usize) -> f64 {
    let k = state.k();
    let mf = state.live[f].mass;
    let mut sum = 0.0;
    for j in 0..k {
        if j == f || state.affinity[f * k + j] <= 0.0 {
            continue;
        }
        let mut d2 = 0.0;
        for x in 0..k {
            let dx = state.influence[j * k + x] - state.influence[f * k + x];
            d2 += dx * dx;
        }
        if d2 == 0.0 {
            continue;
        }
        let mass_term = if cfg.c == 0.0 {
            1.0
        } else {
            (mf * state.live[j].mass).powf(cfg.c)
        };
        sum += cfg.tnorm.apply(mass_term, state.affinity[f * k + j]) / d2;
    }
    sum
}

/// The adaptive time step: dt = delta · m_F^p / Σ_j T(...)/d², where F
/// is the fastest community. Errors with a stall diagnostic when no
/// community feels any force.
pub fn compute_dt(
    state: &SimulationState,
    cfg: &EngineConfig,
    delta: f64,
) -> Result<f64, EngineError> {
    let forces = unit_forces(state, cfg);
    let f = fastest(&forces).ok_or_else(|| stall_error(state))?;
    let p = cfg.effective_p();
    let inertia = if p == 0.0 {
        1.0
    } else {
        state.live[f].mass.powf(p)
    };
    Ok(delta * inertia / pull_magnitude_sum(state, cfg, f))
}

/// Moves every community by its displacement scaled by its mass and
/// advances the clock: s_i += g_i / m_i, t += dt.
pub fn apply_movement(state: &mut SimulationState, displacements: &[Vec<f64>], dt: f64) {
    let k = state.k();
    for i in 0..k {
        let m = state.live[i].mass;
        if m <= 0.0 {
            continue;
        }
        for x in 0..k {
            state.influence[i * k + x] += displacements[i][x] / m;
        }
    }
    state.t += dt;
}

/// All unordered pairs where one community's influence over another has
/// reached that community's self-influence: s(i,j) >= s(j,j) for either
/// orientation. Returned as (low, high) stable ids in ascending order.
pub fn detect_collisions(state: &SimulationState) -> Vec<(usize, usize)> {
    let k = state.k();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..k {
        if state.is_flagged(state.live[i].id) {
            continue;
        }
        for j in 0..k {
            if i == j || state.is_flagged(state.live[j].id) {
                continue;
            }
            if state.influence[i * k + j] >= state.influence[j * k + j] {
                let (a, b) = (state.live[i].id, state.live[j].id);
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    pairs.into_iter().collect()
}

/// Fuses two live communities (by stable id) into a new one appended at
/// the end of the live list. Rows and columns of both matrices merge by
/// mass-weighted mean; the new self-influence is the mass-weighted mean
/// of the old diagonals; masses add exactly.
pub fn fuse(state: &mut SimulationState, a: usize, b: usize) -> Result<Fusion, EngineError> {
    let (pa, pb) = match (state.position_of(a), state.position_of(b)) {
        (Some(pa), Some(pb)) if a != b => (pa, pb),
        _ => return Err(EngineError::NotLive { a, b }),
    };
    let k = state.k();
    let ma = state.live[pa].mass;
    let mb = state.live[pb].mass;
    let total = ma + mb;
    // zero-mass fusions (two detached actors) fall back to a plain mean
    let (wa, wb) = if total > 0.0 {
        (ma / total, mb / total)
    } else {
        (0.5, 0.5)
    };
    let new_id = 2 * state.n0 - k;

    let keep: Vec<usize> = (0..k).filter(|&x| x != pa && x != pb).collect();
    let kn = k - 1;
    let mut affinity = vec![0.0; kn * kn];
    let mut influence = vec![0.0; kn * kn];
    for (xi, &x) in keep.iter().enumerate() {
        for (yi, &y) in keep.iter().enumerate() {
            affinity[xi * kn + yi] = state.affinity[x * k + y];
            influence[xi * kn + yi] = state.influence[x * k + y];
        }
        // column toward the merged community, then its row
        affinity[xi * kn + (kn - 1)] =
            wa * state.affinity[x * k + pa] + wb * state.affinity[x * k + pb];
        influence[xi * kn + (kn - 1)] =
            wa * state.influence[x * k + pa] + wb * state.influence[x * k + pb];
        affinity[(kn - 1) * kn + xi] =
            wa * state.affinity[pa * k + x] + wb * state.affinity[pb * k + x];
        influence[(kn - 1) * kn + xi] =
            wa * state.influence[pa * k + x] + wb * state.influence[pb * k + x];
    }
    affinity[(kn - 1) * kn + (kn - 1)] = 0.0;
    influence[(kn - 1) * kn + (kn - 1)] =
        wa * state.influence[pa * k + pa] + wb * state.influence[pb * k + pb];

    let mut members = state.live[pa].members.clone();
    members.extend_from_slice(&state.live[pb].members);
    members.sort_unstable();

    let mut live = Vec::with_capacity(kn);
    for &x in &keep {
        live.push(state.live[x].clone());
    }
    live.push(Community {
        id: new_id,
        members,
        mass: total,
    });

    state.flagged.retain(|&id| id != a && id != b);
    state.live = live;
    state.affinity = affinity;
    state.influence = influence;

    Ok(Fusion {
        t: state.t,
        left: a.min(b),
        right: a.max(b),
        new_id,
        mass: total,
    })
}

/// The displacement budget for the very first iteration under
/// dynamic-first mode: the smallest influence gap any interacting pair
/// still has to close, floored at 1e-9.
pub fn first_iteration_delta(
    state: &SimulationState,
    cfg: &EngineConfig,
) -> Result<f64, EngineError> {
    if cfg.delta_mode != DeltaMode::DynamicFirst {
        return Err(EngineError::Config(
            "first_iteration_delta requires the dynamic-first delta mode".into(),
        ));
    }
    let k = state.k();
    let mut best: Option<f64> = None;
    for i in 0..k {
        for j in 0..k {
            if i == j || state.affinity[i * k + j] <= 0.0 {
                continue;
            }
            let gap = (state.influence[j * k + j] - state.influence[i * k + j]).max(1e-9);
            best = Some(best.map_or(gap, |b: f64| b.min(gap)));
        }
    }
    best.ok_or_else(|| stall_error(state))
}

/// Formats the positive-affinity components of the live communities for
/// the stall diagnostic.
fn stall_error(state: &SimulationState) -> EngineError {
    let k = state.k();
    let mut comp: Vec<usize> = (0..k).collect();
    fn root(comp: &mut Vec<usize>, mut x: usize) -> usize {
        while comp[x] != x {
            comp[x] = comp[comp[x]];
            x = comp[x];
        }
        x
    }
    for i in 0..k {
        for j in 0..k {
            if i != j && (state.affinity[i * k + j] > 0.0 || state.affinity[j * k + i] > 0.0) {
                let (ri, rj) = (root(&mut comp, i), root(&mut comp, j));
                if ri != rj {
                    comp[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<String>> = Vec::new();
    let mut seen: Vec<(usize, usize)> = Vec::new(); // (root, group index)
    for i in 0..k {
        let r = root(&mut comp, i);
        let gi = match seen.iter().find(|&&(sr, _)| sr == r) {
            Some(&(_, gi)) => gi,
            None => {
                seen.push((r, groups.len()));
                groups.push(Vec::new());
                groups.len() - 1
            }
        };
        for &m in &state.live[i].members {
            groups[gi].push(state.labels[m].clone());
        }
    }
    let formatted = groups
        .iter()
        .map(|g| format!("{{{}}}", g.join(", ")))
        .collect::<Vec<_>>()
        .join(", ");
    EngineError::Stall {
        iteration: state.iteration,
        components: formatted,
    }
}

/// Repeatedly fuses the lowest collision candidate until none remain.
fn collision_cascade(
    state: &mut SimulationState,
    fusions: &mut Vec<Fusion>,
) -> Result<bool, EngineError> {
    let mut any = false;
    loop {
        let candidates = detect_collisions(state);
        match candidates.first() {
            Some(&(a, b)) => {
                fusions.push(fuse(state, a, b)?);
                any = true;
            }
            None => return Ok(any),
        }
    }
}

/// Attaches each detached actor to the live community it has the most
/// original adjacency toward (lowest stable id on ties) at the current
/// simulated time.
fn attach_detached(
    g: &Graph,
    state: &mut SimulationState,
    fusions: &mut Vec<Fusion>,
) -> Result<(), EngineError> {
    while state.k() > 1 {
        let src = state
            .live
            .iter()
            .filter(|c| state.is_flagged(c.id))
            .map(|c| c.id)
            .min()
            .unwrap_or_else(|| state.live[0].id);
        let mut best: Option<(f64, usize)> = None;
        for cand in &state.live {
            if cand.id == src {
                continue;
            }
            let src_pos = state.position_of(src).expect("src is live");
            let mut adjacency = 0.0;
            for &u in &state.live[src_pos].members {
                for &v in &cand.members {
                    adjacency += g.weight(u, v) + g.weight(v, u);
                }
            }
            let better = match best {
                None => true,
                Some((score, id)) => {
                    adjacency > score || (adjacency == score && cand.id < id)
                }
            };
            if better {
                best = Some((adjacency, cand.id));
            }
        }
        let (_, target) = best.expect("at least two live communities");
        fusions.push(fuse(state, src, target)?);
    }
    Ok(())
}

pub fn run(g: &Graph, cfg: &EngineConfig) -> Result<RunReport, EngineError> {
    run_inner(g, cfg, false)
}

pub fn run_traced(g: &Graph, cfg: &EngineConfig) -> Result<RunReport, EngineError> {
    run_inner(g, cfg, true)
}

fn run_inner(g: &Graph, cfg: &EngineConfig, traced: bool) -> Result<RunReport, EngineError> {
    let mut state = initialize(g, cfg)?;
    let mut fusions: Vec<Fusion> = Vec::with_capacity(state.n0 - 1);
    let mut warnings = Vec::new();
    if !state.flagged.is_empty() {
        let names: Vec<&str> = state
            .flagged
            .iter()
            .map(|&i| state.labels[i].as_str())
            .collect();
        warnings.push(format!(
            "{} actor(s) with no connections and no affinity sit out of the \
             dynamics and are attached at the end: {}",
            names.len(),
            names.join(", ")
        ));
    }
    let mut trace = traced.then(Vec::new);
    let mut visited_total = 0u64;
    let mut nonzero_total = 0u64;
    let mut sparsity_respected = true;
    let mut since_fusion = 0u64;

    // actors may already dominate each other before anything moves
    collision_cascade(&mut state, &mut fusions)?;

    while state.active_count() >= 2 {
        let forces = unit_forces(&state, cfg);
        visited_total += forces.visited_pairs;
        nonzero_total += forces.nonzero_pairs;
        sparsity_respected &= forces.visited_pairs <= forces.nonzero_pairs;

        // coincident communities fuse without movement or time advance
        if let Some(&(a, b)) = forces.coincident.first() {
            fusions.push(fuse(&mut state, a, b)?);
            collision_cascade(&mut state, &mut fusions)?;
            since_fusion = 0;
            continue;
        }

        let f = match fastest(&forces) {
            Some(f) => f,
            None => return Err(stall_error(&state)),
        };
        let delta = if state.iteration == 0 && cfg.delta_mode == DeltaMode::DynamicFirst {
            first_iteration_delta(&state, cfg)?
        } else {
            cfg.delta
        };
        let p = cfg.effective_p();
        let inertia = if p == 0.0 {
            1.0
        } else {
            state.live[f].mass.powf(p)
        };
        let dt = delta * inertia / pull_magnitude_sum(&state, cfg, f);

        let displacements: Vec<Vec<f64>> = forces
            .unit
            .iter()
            .map(|row| row.iter().map(|v| v * dt).collect())
            .collect();
        apply_movement(&mut state, &displacements, dt);
        state.iteration += 1;
        if let Some(t) = trace.as_mut() {
            t.push(TraceRow {
                iteration: state.iteration,
                t: state.t,
                dt,
                live: state.k(),
            });
        }

        if collision_cascade(&mut state, &mut fusions)? {
            since_fusion = 0;
        } else {
            since_fusion += 1;
            if since_fusion >= cfg.max_stall_iterations {
                return Err(stall_error(&state));
            }
        }
    }

    attach_detached(g, &mut state, &mut fusions)?;

    let total_time = state.t;
    let dendrogram = Dendrogram::new(state.n0, fusions, total_time)?;
    Ok(RunReport {
        dendrogram,
        iterations: state.iteration,
        visited_pairs: visited_total,
        nonzero_pairs: nonzero_total,
        sparsity_respected,
        warnings,
        trace,
    })
}
