//! Classical gravitational clustering over point features.
//!
//! The original point-cloud formulation: every actor becomes a unit-mass
//! particle whose coordinates are its adjacency (or affinity) row, and
//! plain Newtonian attraction pulls the particles together. The time
//! step is chosen so the fastest particle moves exactly `delta`, and two
//! particles fuse into their centre of masses once they pass within
//! `epsilon` of each other. Unlike the affinity simulation, masses play
//! no role in the force beyond their gravitational pull, and the
//! recommended cut is the configuration with the longest bare lifespan.

use crate::affinity::{self, AffinityError};
use crate::dendrogram::{Dendrogram, DendrogramError, Fusion};
use crate::graph::Graph;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassicError {
    #[error("graph has no actors; at least 1 is required")]
    Empty,
    #[error("invalid classic configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Affinity(#[from] AffinityError),
    #[error(
        "no particle feels a net force at iteration {iteration}; \
         {remaining} particles can no longer approach each other"
    )]
    Stall { iteration: u64, remaining: usize },
    #[error("run exceeded {max_iterations} iterations with {remaining} particles left")]
    MaxIterations {
        max_iterations: u64,
        remaining: usize,
    },
    #[error(transparent)]
    Dendrogram(#[from] DendrogramError),
}

/// Which per-actor coordinate vectors seed the particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSource {
    /// Raw adjacency rows — the original formulation.
    #[default]
    AdjacencyRows,
    /// Rows of the default blended affinity matrix (alpha = 0.7).
    AffinityRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicConfig {
    /// Gravitational constant.
    pub g: f64,
    /// Collision radius. `None` derives it at initialization as 1e-3 of
    /// the largest initial pairwise distance.
    pub epsilon: Option<f64>,
    /// Displacement of the fastest particle per iteration.
    pub delta: f64,
    pub max_iterations: u64,
    pub feature_source: FeatureSource,
}

impl Default for ClassicConfig {
    fn default() -> Self {
        ClassicConfig {
            g: 1.0,
            epsilon: None,
            delta: 0.1,
            max_iterations: 1_000_000,
            feature_source: FeatureSource::AdjacencyRows,
        }
    }
}

impl ClassicConfig {
    fn validate(&self) -> Result<(), ClassicError> {
        if !self.g.is_finite() || self.g <= 0.0 {
            return Err(ClassicError::Config(format!(
                "g must be a positive real, got {}",
                self.g
            )));
        }
        if let Some(eps) = self.epsilon {
            if !eps.is_finite() || eps <= 0.0 {
                return Err(ClassicError::Config(format!(
                    "epsilon must be a positive real, got {eps}"
                )));
            }
        }
        if !self.delta.is_finite() || self.delta <= 0.0 {
            return Err(ClassicError::Config(format!(
                "delta must be a positive real, got {}",
                self.delta
            )));
        }
        if self.max_iterations == 0 {
            return Err(ClassicError::Config(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Particle {
    pub id: usize,
    pub mass: f64,
    pub position: Vec<f64>,
}

/// The live particle set of a run in progress. Fused particles take
/// fresh ids `n0, n0+1, ...` exactly like the affinity simulation, so
/// the recorded fusions form a valid dendrogram.
#[derive(Debug, Clone)]
pub struct ParticleSystem {
    n0: usize,
    epsilon: f64,
    particles: Vec<Particle>,
    t: f64,
    iteration: u64,
}

impl ParticleSystem {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// The collision radius in force for this run (resolved at
    /// initialization when the configuration leaves it derived).
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn total_mass(&self) -> f64 {
        self.particles.iter().map(|p| p.mass).sum()
    }

    fn position_of(&self, id: usize) -> Option<usize> {
        self.particles.iter().position(|p| p.id == id)
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn initialize(g: &Graph, cfg: &ClassicConfig) -> Result<ParticleSystem, ClassicError> {
    cfg.validate()?;
    let n = g.n();
    if n == 0 {
        return Err(ClassicError::Empty);
    }
    let features: Vec<Vec<f64>> = match cfg.feature_source {
        FeatureSource::AdjacencyRows => (0..n).map(|i| g.row(i).to_vec()).collect(),
        FeatureSource::AffinityRows => {
            let a = affinity::combine(g, 0.7)?;
            (0..n).map(|i| a.row(i).to_vec()).collect()
        }
    };
    let epsilon = match cfg.epsilon {
        Some(eps) => eps,
        None => {
            let mut max_dist: f64 = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    max_dist = max_dist.max(distance(&features[i], &features[j]));
                }
            }
            // All-coincident inputs degenerate to a single fusion
            // cascade at t = 0, where any radius works.
            if max_dist > 0.0 {
                1e-3 * max_dist
            } else {
                1e-3
            }
        }
    };
    let particles = features
        .into_iter()
        .enumerate()
        .map(|(id, position)| Particle {
            id,
            mass: 1.0,
            position,
        })
        .collect();
    Ok(ParticleSystem {
        n0: n,
        epsilon,
        particles,
        t: 0.0,
        iteration: 0,
    })
}

/// Fuse two live particles into their centre of masses with summed mass.
fn fuse(sys: &mut ParticleSystem, a: usize, b: usize) -> Fusion {
    let pa = sys.position_of(a).expect("fuse target must be live");
    let pb = sys.position_of(b).expect("fuse target must be live");
    let (pa, pb) = (pa.min(pb), pa.max(pb));
    let second = sys.particles.remove(pb);
    let first = sys.particles.remove(pa);
    let mass = first.mass + second.mass;
    let position: Vec<f64> = first
        .position
        .iter()
        .zip(&second.position)
        .map(|(x, y)| (first.mass * x + second.mass * y) / mass)
        .collect();
    let new_id = 2 * sys.n0 - (sys.particles.len() + 2);
    sys.particles.push(Particle {
        id: new_id,
        mass,
        position,
    });
    Fusion {
        t: sys.t,
        left: a.min(b),
        right: a.max(b),
        new_id,
        mass,
    }
}

/// Merge every pair closer than `epsilon`, cascading: each fusion can
/// drop the merged particle within range of a third. Seeded candidate
/// pairs (from a movement step's path check) are honoured first.
fn merge_cascade(sys: &mut ParticleSystem, seed: BTreeSet<(usize, usize)>) -> Vec<Fusion> {
    let mut fusions = Vec::new();
    let mut candidates = seed;
    loop {
        for (i, p) in sys.particles.iter().enumerate() {
            for q in sys.particles.iter().skip(i + 1) {
                if distance(&p.position, &q.position) < sys.epsilon {
                    candidates.insert((p.id.min(q.id), p.id.max(q.id)));
                }
            }
        }
        let pair = candidates.iter().copied().find(|&(a, b)| {
            sys.position_of(a).is_some() && sys.position_of(b).is_some()
        });
        let Some((a, b)) = pair else {
            return fusions;
        };
        candidates.clear();
        fusions.push(fuse(sys, a, b));
    }
}

/// One movement iteration: Newtonian accelerations, a time step scaled
/// so the fastest particle covers exactly `delta`, then fusion of every
/// pair whose straight-line paths passed within `epsilon` during the
/// step. Checking the paths rather than the endpoints keeps a close
/// pair from leapfrogging each other forever on alternating sides.
pub fn classic_step(
    sys: &mut ParticleSystem,
    cfg: &ClassicConfig,
) -> Result<Vec<Fusion>, ClassicError> {
    if sys.len() < 2 {
        return Ok(Vec::new());
    }
    let k = sys.len();
    let dim = sys.particles[0].position.len();
    let mut accel = vec![vec![0.0; dim]; k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let d = distance(&sys.particles[i].position, &sys.particles[j].position);
            if d == 0.0 {
                // Coincident survivors merge in the collision pass; a
                // force between them is undefined and unnecessary.
                continue;
            }
            let scale = 0.5 * cfg.g * sys.particles[j].mass / (d * d * d);
            for x in 0..dim {
                accel[i][x] +=
                    scale * (sys.particles[j].position[x] - sys.particles[i].position[x]);
            }
        }
    }
    let best = accel.iter().map(|a| norm(a)).fold(0.0f64, f64::max);
    if best <= 0.0 {
        return Err(ClassicError::Stall {
            iteration: sys.iteration,
            remaining: k,
        });
    }
    let dt = (cfg.delta / best).sqrt();
    let dt2 = dt * dt;

    // Path-based collision check: minimum over the straight-line step of
    // the inter-particle distance, computed from the relative segment.
    let mut seed = BTreeSet::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let pi = &sys.particles[i].position;
            let pj = &sys.particles[j].position;
            let mut w_dot_v = 0.0;
            let mut v_dot_v = 0.0;
            for x in 0..dim {
                let w = pj[x] - pi[x];
                let v = (accel[j][x] - accel[i][x]) * dt2;
                w_dot_v += w * v;
                v_dot_v += v * v;
            }
            let tau = if v_dot_v > 0.0 {
                (-w_dot_v / v_dot_v).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut min_sq = 0.0;
            for x in 0..dim {
                let w = pj[x] - pi[x];
                let v = (accel[j][x] - accel[i][x]) * dt2;
                let c = w + tau * v;
                min_sq += c * c;
            }
            if min_sq.sqrt() < sys.epsilon {
                let (a, b) = (sys.particles[i].id, sys.particles[j].id);
                seed.insert((a.min(b), a.max(b)));
            }
        }
    }

    for (i, p) in sys.particles.iter_mut().enumerate() {
        for x in 0..dim {
            p.position[x] += accel[i][x] * dt2;
        }
    }
    sys.t += dt;
    sys.iteration += 1;
    Ok(merge_cascade(sys, seed))
}

pub fn classic_run(g: &Graph, cfg: &ClassicConfig) -> Result<Dendrogram, ClassicError> {
    let mut sys = initialize(g, cfg)?;
    let mut fusions = merge_cascade(&mut sys, BTreeSet::new());
    while sys.len() >= 2 {
        if sys.iteration >= cfg.max_iterations {
            return Err(ClassicError::MaxIterations {
                max_iterations: cfg.max_iterations,
                remaining: sys.len(),
            });
        }
        fusions.extend(classic_step(&mut sys, cfg)?);
    }
    Ok(Dendrogram::new(sys.n0, fusions, sys.t)?)
}
