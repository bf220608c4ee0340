//! The five affinity transforms and the convex best-friend /
//! best-common-friend combination consumed by the engine.
//!
//! Every transform maps a weighted graph (or temporal graph) to an n×n
//! matrix of strengths in [0,1] with a zero diagonal. "Personal"
//! affinities (best friend, friends forever) normalize by an actor's own
//! connectivity and behave like a zero-sum game; "structural" ones
//! (machiavelli) compare node-level aggregates.

use crate::graph::{DegreeMode, Graph, TemporalGraph};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AffinityError {
    #[error("base affinity has {base} actors, graph has {graph}")]
    DimensionMismatch { base: usize, graph: usize },
    #[error("alpha must lie in [0,1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("friends-forever requires temporal slices")]
    NeedsTemporal,
    #[error("affinity spec nests deeper than two levels")]
    TooDeep,
}

/// Which transform produced a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AffinityKind {
    BestFriend,
    BestCommonFriend,
    FriendsForever,
    SocialNetworking,
    Machiavelli,
    Combined { alpha: f64 },
}

/// Pairwise strengths in [0,1]; entry `(x, y)` answers "how strongly is
/// x tied to y". Generally asymmetric. The diagonal is 0 for every kind:
/// self-affinity is never consumed by the transforms, and the engine's
/// self-influence lives in its own matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    n: usize,
    values: Vec<f64>,
    kind: AffinityKind,
}

impl AffinityMatrix {
    fn zeroed(n: usize, kind: AffinityKind) -> Self {
        AffinityMatrix {
            n,
            values: vec![0.0; n * n],
            kind,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> AffinityKind {
        self.kind
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.n + y]
    }

    #[inline]
    pub fn row(&self, x: usize) -> &[f64] {
        &self.values[x * self.n..(x + 1) * self.n]
    }

    #[inline]
    fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[x * self.n + y] = v;
    }

    /// Matrix CSV in the same layout graph-core uses: label header row,
    /// then one row of values per actor.
    pub fn to_matrix_csv(&self, labels: &[String]) -> String {
        assert_eq!(labels.len(), self.n);
        let mut out = labels.join(",");
        out.push('\n');
        for x in 0..self.n {
            let row: Vec<String> = self.row(x).iter().map(|v| format!("{v}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Heatmap-ready long form: one `row,col,value` line per cell.
    pub fn to_long_csv(&self, labels: &[String]) -> String {
        assert_eq!(labels.len(), self.n);
        let mut out = String::from("row,col,value\n");
        for x in 0..self.n {
            for y in 0..self.n {
                out.push_str(&format!("{},{},{}\n", labels[x], labels[y], self.value(x, y)));
            }
        }
        out
    }
}

/// A recipe for building an affinity matrix, including the nested base
/// used by social-networking and affinity-over-affinity best-common-friend.
/// Nesting is capped at two levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AffinitySpec {
    BestFriend,
    BestCommonFriend {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<Box<AffinitySpec>>,
    },
    FriendsForever,
    SocialNetworking { base: Box<AffinitySpec> },
    Machiavelli,
    Combined { alpha: f64 },
}

impl AffinitySpec {
    fn depth(&self) -> usize {
        match self {
            AffinitySpec::BestCommonFriend { base: Some(b) } => 1 + b.depth(),
            AffinitySpec::SocialNetworking { base } => 1 + base.depth(),
            _ => 1,
        }
    }

    /// Builds the described matrix over `g`. Friends-forever cannot be
    /// resolved on a single snapshot and reports [`AffinityError::NeedsTemporal`].
    pub fn resolve(&self, g: &Graph) -> Result<AffinityMatrix, AffinityError> {
        if self.depth() > 2 {
            return Err(AffinityError::TooDeep);
        }
        match self {
            AffinitySpec::BestFriend => Ok(best_friend(g)),
            AffinitySpec::BestCommonFriend { base } => {
                let resolved = match base {
                    Some(b) => Some(b.resolve(g)?),
                    None => None,
                };
                best_common_friend(g, resolved.as_ref())
            }
            AffinitySpec::FriendsForever => Err(AffinityError::NeedsTemporal),
            AffinitySpec::SocialNetworking { base } => social_networking(g, base),
            AffinitySpec::Machiavelli => Ok(machiavelli(g)),
            AffinitySpec::Combined { alpha } => combine(g, *alpha),
        }
    }
}

/// Best friend: `A(x,y) = C_xy / Σ_a C_xa` — the share of x's total
/// out-connectivity spent on y. Rows of actors with zero out-degree stay
/// all-zero rather than erroring; real corpora contain near-isolated
/// actors and the engine tolerates zero attraction.
pub fn best_friend(g: &Graph) -> AffinityMatrix {
    let n = g.n();
    let mut a = AffinityMatrix::zeroed(n, AffinityKind::BestFriend);
    for x in 0..n {
        let total: f64 = g.row(x).iter().sum();
        if total == 0.0 {
            continue;
        }
        for y in 0..n {
            if y != x {
                a.set(x, y, g.weight(x, y) / total);
            }
        }
    }
    a
}

/// Best common friend: `A(x,y) = max_z min(M_xz, M_yz) / Σ_a M_xa` with z
/// ranging over third parties only (a direct edge must not masquerade as
/// a common friend). `M` is `base` when given, the adjacency otherwise —
/// the transform stacks on previously computed affinities.
pub fn best_common_friend(
    g: &Graph,
    base: Option<&AffinityMatrix>,
) -> Result<AffinityMatrix, AffinityError> {
    let n = g.n();
    if let Some(b) = base {
        if b.n() != n {
            return Err(AffinityError::DimensionMismatch {
                base: b.n(),
                graph: n,
            });
        }
    }
    let m = |x: usize, y: usize| -> f64 {
        match base {
            Some(b) => b.value(x, y),
            None => g.weight(x, y),
        }
    };
    let mut a = AffinityMatrix::zeroed(n, AffinityKind::BestCommonFriend);
    for x in 0..n {
        let total: f64 = (0..n).map(|c| m(x, c)).sum();
        if total == 0.0 {
            continue;
        }
        for y in 0..n {
            if y == x {
                continue;
            }
            let mut best = 0.0f64;
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                let link = m(x, z).min(m(y, z));
                if link > best {
                    best = link;
                }
            }
            a.set(x, y, best / total);
        }
    }
    Ok(a)
}

/// Friends forever: the per-slice best-friend affinity averaged over the
/// temporal slices. Slices where x has nothing to give contribute 0 (the
/// literal formula counts them, it does not skip them).
pub fn friends_forever(tg: &TemporalGraph) -> AffinityMatrix {
    let n = tg.slices()[0].n();
    let t = tg.len() as f64;
    let mut a = AffinityMatrix::zeroed(n, AffinityKind::FriendsForever);
    for slice in tg.slices() {
        let bf = best_friend(slice);
        for i in 0..n * n {
            a.values[i] += bf.values[i];
        }
    }
    for v in &mut a.values {
        *v /= t;
    }
    a
}

/// Social networking: `A(x,y)` is the unweighted arithmetic mean of the
/// base affinity `A'(x', y)` over the actors x' that x is positively tied
/// to under the base — "would the majority of x's connections befriend y".
pub fn social_networking(g: &Graph, base: &AffinitySpec) -> Result<AffinityMatrix, AffinityError> {
    let b = base.resolve(g)?;
    let n = g.n();
    let mut a = AffinityMatrix::zeroed(n, AffinityKind::SocialNetworking);
    for x in 0..n {
        let friends: Vec<usize> = (0..n).filter(|&x2| b.value(x, x2) > 0.0).collect();
        if friends.is_empty() {
            continue;
        }
        for y in 0..n {
            if y == x {
                continue;
            }
            let sum: f64 = friends.iter().map(|&x2| b.value(x2, y)).sum();
            a.set(x, y, sum / friends.len() as f64);
        }
    }
    Ok(a)
}

/// Machiavelli: compares the total influence reachable through each
/// actor's neighbourhood, `I_a = Σ degree(x')` over out-neighbours x'
/// (unweighted total degree). `A(x,y) = 1 − |I_x − I_y| / max(I_x, I_y)`,
/// symmetric by construction; a pair involving an empty neighbourhood
/// scores 0.
pub fn machiavelli(g: &Graph) -> AffinityMatrix {
    let n = g.n();
    let influence: Vec<f64> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&x2| g.weight(a, x2) > 0.0)
                .map(|x2| g.connection_count(x2, DegreeMode::Total) as f64)
                .sum()
        })
        .collect();
    let mut a = AffinityMatrix::zeroed(n, AffinityKind::Machiavelli);
    for x in 0..n {
        for y in 0..n {
            if y == x {
                continue;
            }
            let max = influence[x].max(influence[y]);
            if max > 0.0 {
                a.set(x, y, 1.0 - (influence[x] - influence[y]).abs() / max);
            }
        }
    }
    a
}

/// Convex combination `α·BF + (1−α)·BCF` over the adjacency matrix — the
/// engine's default affinity. α = 1 is exactly best-friend, α = 0 exactly
/// best-common-friend.
pub fn combine(g: &Graph, alpha: f64) -> Result<AffinityMatrix, AffinityError> {
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(AffinityError::AlphaOutOfRange(alpha));
    }
    let bf = best_friend(g);
    let bcf = best_common_friend(g, None)?;
    let mut a = AffinityMatrix::zeroed(g.n(), AffinityKind::Combined { alpha });
    for i in 0..a.values.len() {
        a.values[i] = alpha * bf.values[i] + (1.0 - alpha) * bcf.values[i];
    }
    Ok(a)
}
