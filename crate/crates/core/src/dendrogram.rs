//! The binary merge tree produced by a clustering run, and partition
//! selection over its configurations.
//!
//! Leaves carry ids `0..n`; each fusion appends a fresh id, so the id
//! space never recycles. A *configuration* is the partition that exists
//! between two consecutive fusions; its lifespan is the simulated time it
//! survives. Every candidate partition is a horizontal cut of the tree.

use crate::metrics::Partition;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DendrogramError {
    #[error("expected {expected} fusions for {n} leaves, got {got}")]
    WrongFusionCount { n: usize, expected: usize, got: usize },
    #[error("fusion {index} at t={t} precedes its predecessor")]
    DecreasingTime { index: usize, t: f64 },
    #[error("fusion {index} references id {id} which is not live")]
    NotLive { index: usize, id: usize },
    #[error("fusion {index} must create id {expected}, created {got}")]
    NonSequentialId { index: usize, expected: usize, got: usize },
    #[error("fixed-k cut requires 1 <= k <= {n}, got {k}")]
    BadK { k: usize, n: usize },
}

/// One merge event: communities `left` and `right` fuse at simulated
/// time `t` into a new community `new_id` of social value `mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fusion {
    pub t: f64,
    pub left: usize,
    pub right: usize,
    #[serde(rename = "new")]
    pub new_id: usize,
    pub mass: f64,
}

/// The ordered fusion history of a full run: exactly `n - 1` fusions
/// with non-decreasing timestamps forming a binary merge tree over the
/// `n` leaves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    n: usize,
    fusions: Vec<Fusion>,
    total_time: f64,
}

/// How a partition is chosen from the dendrogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionMode {
    /// Maximize `R = lifespan × ln(k)` over the inter-fusion
    /// configurations, excluding the initial all-singleton state and the
    /// final single community. Rewards partitions that are both stable
    /// in time and informative.
    Score,
    /// Cut to exactly `k` communities.
    FixedK(usize),
    /// Maximize bare lifespan, initial configuration included — the
    /// classical gravitational selection rule.
    Lifespan,
}

/// One inter-fusion configuration with its score ingredients.
#[derive(Debug, Clone)]
pub struct ConfigurationScore {
    pub partition: Partition,
    pub lifespan: f64,
    pub k: usize,
    /// `lifespan × ln(k)`; zero whenever `k = 1`.
    pub r: f64,
}

impl Dendrogram {
    pub fn new(n: usize, fusions: Vec<Fusion>, total_time: f64) -> Result<Self, DendrogramError> {
        if fusions.len() + 1 != n {
            return Err(DendrogramError::WrongFusionCount {
                n,
                expected: n.saturating_sub(1),
                got: fusions.len(),
            });
        }
        let mut live: Vec<bool> = vec![true; 2 * n];
        for id in n..2 * n {
            live[id] = false;
        }
        let mut prev_t = 0.0;
        for (index, f) in fusions.iter().enumerate() {
            if f.t < prev_t || !f.t.is_finite() {
                return Err(DendrogramError::DecreasingTime { index, t: f.t });
            }
            prev_t = f.t;
            let expected = n + index;
            if f.new_id != expected {
                return Err(DendrogramError::NonSequentialId {
                    index,
                    expected,
                    got: f.new_id,
                });
            }
            for id in [f.left, f.right] {
                if id >= live.len() || !live[id] {
                    return Err(DendrogramError::NotLive { index, id });
                }
                live[id] = false;
            }
            live[f.new_id] = true;
        }
        Ok(Dendrogram {
            n,
            fusions,
            total_time,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fusions(&self) -> &[Fusion] {
        &self.fusions
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// The partition after the first `applied` fusions
    /// (`applied = 0` is the all-singleton state).
    pub fn cut(&self, applied: usize) -> Partition {
        assert!(applied < self.n, "cut index out of range");
        // union by id: root[id] chases to the representative
        let mut parent: Vec<usize> = (0..self.n + applied).collect();
        for f in &self.fusions[..applied] {
            parent[f.left] = f.new_id;
            parent[f.right] = f.new_id;
        }
        let root = |mut id: usize| -> usize {
            while parent[id] != id {
                id = parent[id];
            }
            id
        };
        let assignment: Vec<usize> = (0..self.n).map(|i| root(i)).collect();
        Partition::from_labels(&assignment).expect("non-empty by construction")
    }

    /// Every configuration whose lifespan is bounded by a following
    /// fusion: after `f` fusions for `f = 0..n-1`. The final single
    /// community is not enumerated (nothing bounds its lifespan).
    pub fn configurations(&self) -> Vec<ConfigurationScore> {
        let mut out = Vec::with_capacity(self.fusions.len());
        for applied in 0..self.fusions.len() {
            let start = if applied == 0 {
                0.0
            } else {
                self.fusions[applied - 1].t
            };
            let lifespan = self.fusions[applied].t - start;
            let k = self.n - applied;
            let r = if k > 1 {
                lifespan * (k as f64).ln()
            } else {
                0.0
            };
            out.push(ConfigurationScore {
                partition: self.cut(applied),
                lifespan,
                k,
                r,
            });
        }
        out
    }

    /// Selects a partition. Ties on the score go to the earliest
    /// configuration, keeping selection deterministic.
    pub fn select(&self, mode: SelectionMode) -> Result<Partition, DendrogramError> {
        match mode {
            SelectionMode::FixedK(k) => {
                if k < 1 || k > self.n {
                    return Err(DendrogramError::BadK { k, n: self.n });
                }
                Ok(self.cut(self.n - k))
            }
            SelectionMode::Score => {
                let configs = self.configurations();
                // skip the initial all-singleton configuration; k = 1
                // never appears here (the final config is not enumerated)
                let best = configs
                    .iter()
                    .skip(1)
                    .filter(|c| c.r > 0.0)
                    .max_by(|a, b| a.r.partial_cmp(&b.r).unwrap().then(std::cmp::Ordering::Greater));
                match best {
                    Some(c) => Ok(c.partition.clone()),
                    // n = 2, or every candidate collapsed instantly: fall
                    // back to the fully fused partition
                    None => Ok(self.cut(self.n - 1)),
                }
            }
            SelectionMode::Lifespan => {
                let configs = self.configurations();
                let best = configs.iter().max_by(|a, b| {
                    a.lifespan
                        .partial_cmp(&b.lifespan)
                        .unwrap()
                        .then(std::cmp::Ordering::Greater)
                });
                match best {
                    Some(c) => Ok(c.partition.clone()),
                    None => Ok(self.cut(self.n - 1)),
                }
            }
        }
    }

    /// Machine-readable export: a JSON document with one record per
    /// fusion.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dendrogram serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let raw: Dendrogram = serde_json::from_str(text)?;
        Dendrogram::new(raw.n, raw.fusions, raw.total_time)
            .map_err(|e| serde::de::Error::custom(e.to_string()))
    }
}
