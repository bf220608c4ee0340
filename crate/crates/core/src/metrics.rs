//! Partition quality measures: modularity, modularity density, NMI, ARI.
//!
//! All four are pure functions over immutable inputs and invariant under
//! community-id permutation. Directed graphs are symmetrized (by the max
//! of the two directions) before the modularity family is applied.

use crate::graph::Graph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("community ids must be contiguous from 0 (missing id {0})")]
    NonContiguous(usize),
    #[error("partition is empty")]
    EmptyPartition,
    #[error("partitions cover different actor sets ({a} vs {b} actors)")]
    ActorMismatch { a: usize, b: usize },
    #[error("partition covers {part} actors but the graph has {graph}")]
    GraphMismatch { part: usize, graph: usize },
    #[error("metric undefined on a graph with zero edges")]
    ZeroEdges,
    #[error("partition parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A community labeling: actor index -> community id, ids contiguous
/// from 0. The id values carry no meaning beyond identity; every metric
/// here is invariant under permuting them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Validates that ids form a contiguous 0..k range.
    pub fn new(assignment: Vec<usize>) -> Result<Self, MetricsError> {
        if assignment.is_empty() {
            return Err(MetricsError::EmptyPartition);
        }
        let k = assignment.iter().max().unwrap() + 1;
        let mut present = vec![false; k];
        for &c in &assignment {
            present[c] = true;
        }
        if let Some(missing) = present.iter().position(|p| !p) {
            return Err(MetricsError::NonContiguous(missing));
        }
        Ok(Partition { assignment, k })
    }

    /// Canonical renumbering of arbitrary hashable labels: community ids
    /// are handed out in order of first appearance by actor index.
    pub fn from_labels<T: std::hash::Hash + Eq>(labels: &[T]) -> Result<Self, MetricsError> {
        if labels.is_empty() {
            return Err(MetricsError::EmptyPartition);
        }
        let mut ids = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Ok(Partition {
            assignment,
            k: ids.len(),
        })
    }

    /// Parses the `actor_label,community_id` CSV against a known label
    /// order; ids are canonically renumbered.
    pub fn from_csv(text: &str, labels: &[String]) -> Result<Self, MetricsError> {
        let index: std::collections::HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut raw: Vec<Option<String>> = vec![None; labels.len()];
        for (line0, row) in text.lines().enumerate() {
            let line = line0 + 1;
            let row = row.trim();
            if row.is_empty() || (line == 1 && row == "actor_label,community_id") {
                continue;
            }
            let (label, id) = row.rsplit_once(',').ok_or(MetricsError::Parse {
                line,
                msg: "expected `actor_label,community_id`".into(),
            })?;
            let actor = *index.get(label).ok_or(MetricsError::Parse {
                line,
                msg: format!("unknown actor `{label}`"),
            })?;
            if raw[actor].is_some() {
                return Err(MetricsError::Parse {
                    line,
                    msg: format!("actor `{label}` assigned twice"),
                });
            }
            raw[actor] = Some(id.trim().to_string());
        }
        let rows: Vec<String> = raw
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or(MetricsError::Parse {
                    line: 0,
                    msg: format!("actor `{}` missing from partition", labels[i]),
                })
            })
            .collect::<Result<_, _>>()?;
        Partition::from_labels(&rows)
    }

    pub fn to_csv(&self, labels: &[String]) -> String {
        assert_eq!(labels.len(), self.assignment.len());
        let mut out = String::from("actor_label,community_id\n");
        for (l, c) in labels.iter().zip(&self.assignment) {
            out.push_str(&format!("{l},{c}\n"));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn community_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == c)
            .collect()
    }
}

/// Everything `evaluate` reports in one record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub k: usize,
    pub modularity: f64,
    pub modularity_density: f64,
    pub nmi: Option<f64>,
    pub ari: Option<f64>,
}

/// The undirected reading of a graph: max of the two directions.
fn symmetrized(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            w[i * n + j] = if g.directed() {
                g.weight(i, j).max(g.weight(j, i))
            } else {
                g.weight(i, j)
            };
        }
    }
    w
}

fn check_cover(g: &Graph, part: &Partition) -> Result<(), MetricsError> {
    if part.n() != g.n() {
        return Err(MetricsError::GraphMismatch {
            part: part.n(),
            graph: g.n(),
        });
    }
    Ok(())
}

/// Newman–Girvan modularity, weighted, on the undirected reading:
/// `Q = Σ_c [ w_c/2m − (K_c/2m)² ]` with `w_c` the within-community weight
/// (both directions), `K_c` the summed strengths and `2m` the total
/// strength. The accumulation order makes the one-community partition
/// score exactly 0: `w_c` and `K_c` then reproduce `2m` bit for bit.
pub fn modularity(g: &Graph, part: &Partition) -> Result<f64, MetricsError> {
    check_cover(g, part)?;
    let n = g.n();
    let w = symmetrized(g);
    let strengths: Vec<f64> = (0..n).map(|i| w[i * n..(i + 1) * n].iter().sum()).collect();
    let two_m: f64 = strengths.iter().sum();
    if two_m == 0.0 {
        return Err(MetricsError::ZeroEdges);
    }
    let mut q = 0.0;
    for c in 0..part.k() {
        let members = part.members(c);
        let mut w_c = 0.0;
        let mut k_c = 0.0;
        for &i in &members {
            let mut row_sum = 0.0;
            for &j in &members {
                row_sum += w[i * n + j];
            }
            w_c += row_sum;
            k_c += strengths[i];
        }
        let frac = k_c / two_m;
        q += w_c / two_m - frac * frac;
    }
    Ok(q)
}

/// Li et al. modularity density: `D = Σ_c (2·L_in − L_out) / |c|` with
/// unweighted edge counts on the undirected reading. Less forgiving of
/// merged small communities than plain modularity.
pub fn modularity_density(g: &Graph, part: &Partition) -> Result<f64, MetricsError> {
    check_cover(g, part)?;
    let n = g.n();
    let w = symmetrized(g);
    let mut d = 0.0;
    for c in 0..part.k() {
        let members = part.members(c);
        if members.is_empty() {
            return Err(MetricsError::EmptyPartition);
        }
        let inside = vec![false; n];
        let mut inside = inside;
        for &i in &members {
            inside[i] = true;
        }
        let mut l_in = 0usize;
        let mut l_out = 0usize;
        for &i in &members {
            for j in 0..n {
                if w[i * n + j] == 0.0 {
                    continue;
                }
                if inside[j] {
                    if j > i {
                        l_in += 1;
                    }
                } else {
                    l_out += 1;
                }
            }
        }
        d += (2.0 * l_in as f64 - l_out as f64) / members.len() as f64;
    }
    Ok(d)
}

fn contingency(a: &Partition, b: &Partition) -> Result<Vec<Vec<u64>>, MetricsError> {
    if a.n() != b.n() {
        return Err(MetricsError::ActorMismatch { a: a.n(), b: b.n() });
    }
    let mut table = vec![vec![0u64; b.k()]; a.k()];
    for i in 0..a.n() {
        table[a.community_of(i)][b.community_of(i)] += 1;
    }
    Ok(table)
}

/// Normalized mutual information with arithmetic-mean normalization:
/// `2·I(a,b) / (H(a) + H(b))`. When both entropies vanish the partitions
/// are both the one-block labeling, i.e. identical: 1. When exactly one
/// vanishes there is nothing shared: 0.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64, MetricsError> {
    let table = contingency(a, b)?;
    let n = a.n() as f64;
    let row: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<u64> = (0..b.k()).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let entropy = |marginal: &[u64]| -> f64 {
        -marginal
            .iter()
            .filter(|&&m| m > 0)
            .map(|&m| {
                let p = m as f64 / n;
                p * p.ln()
            })
            .sum::<f64>()
    };
    let h_a = entropy(&row);
    let h_b = entropy(&col);
    if h_a == 0.0 && h_b == 0.0 {
        return Ok(1.0);
    }
    if h_a == 0.0 || h_b == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &nij) in r.iter().enumerate() {
            if nij > 0 {
                let p = nij as f64 / n;
                mi += p * ((n * nij as f64) / (row[i] as f64 * col[j] as f64)).ln();
            }
        }
    }
    Ok((2.0 * mi / (h_a + h_b)).clamp(0.0, 1.0))
}

/// Adjusted Rand index via the contingency-table formula, with the
/// pair-count sums done in integer arithmetic. A degenerate denominator
/// (both partitions trivial in the same way) is perfect agreement: 1.
pub fn ari(a: &Partition, b: &Partition) -> Result<f64, MetricsError> {
    let table = contingency(a, b)?;
    let choose2 = |m: u64| -> u128 { (m as u128) * (m.saturating_sub(1) as u128) / 2 };
    let row: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<u64> = (0..b.k()).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let s_ij: u128 = table.iter().flatten().map(|&m| choose2(m)).sum();
    let s_a: u128 = row.iter().map(|&m| choose2(m)).sum();
    let s_b: u128 = col.iter().map(|&m| choose2(m)).sum();
    let s_t = choose2(a.n() as u64);
    let expected = (s_a as f64) * (s_b as f64) / (s_t as f64);
    let denom = 0.5 * (s_a as f64 + s_b as f64) - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((s_ij as f64 - expected) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphFormat;

    // ---- independent oracles: straight from the definitions, no shared
    // code with the implementations above ----

    fn oracle_modularity(g: &Graph, part: &Partition) -> f64 {
        let n = g.n();
        let w = |i: usize, j: usize| -> f64 {
            if g.directed() {
                g.weight(i, j).max(g.weight(j, i))
            } else {
                g.weight(i, j)
            }
        };
        let k: Vec<f64> = (0..n).map(|i| (0..n).map(|j| w(i, j)).sum()).collect();
        let two_m: f64 = k.iter().sum();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if part.community_of(i) == part.community_of(j) {
                    q += w(i, j) - k[i] * k[j] / two_m;
                }
            }
        }
        q / two_m
    }

    fn oracle_density(g: &Graph, part: &Partition) -> f64 {
        let n = g.n();
        let connected = |i: usize, j: usize| -> bool {
            g.weight(i, j) != 0.0 || g.weight(j, i) != 0.0
        };
        (0..part.k())
            .map(|c| {
                let members: Vec<usize> = (0..n).filter(|&i| part.community_of(i) == c).collect();
                let mut l_in = 0.0;
                let mut l_out = 0.0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        if !connected(i, j) {
                            continue;
                        }
                        let ci = part.community_of(i) == c;
                        let cj = part.community_of(j) == c;
                        if ci && cj {
                            l_in += 1.0;
                        } else if ci != cj {
                            l_out += 1.0;
                        }
                    }
                }
                (2.0 * l_in - l_out) / members.len() as f64
            })
            .sum()
    }

    fn oracle_nmi(a: &Partition, b: &Partition) -> f64 {
        let n = a.n() as f64;
        let p_joint = |ca: usize, cb: usize| -> f64 {
            (0..a.n())
                .filter(|&i| a.community_of(i) == ca && b.community_of(i) == cb)
                .count() as f64
                / n
        };
        let p_a = |c: usize| -> f64 { a.members(c).len() as f64 / n };
        let p_b = |c: usize| -> f64 { b.members(c).len() as f64 / n };
        let mut mi = 0.0;
        for ca in 0..a.k() {
            for cb in 0..b.k() {
                let p = p_joint(ca, cb);
                if p > 0.0 {
                    mi += p * (p / (p_a(ca) * p_b(cb))).ln();
                }
            }
        }
        let h = |k: usize, p: &dyn Fn(usize) -> f64| -> f64 {
            -(0..k)
                .map(|c| {
                    let v = p(c);
                    if v > 0.0 {
                        v * v.ln()
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
        };
        let (ha, hb) = (h(a.k(), &p_a), h(b.k(), &p_b));
        if ha == 0.0 && hb == 0.0 {
            return 1.0;
        }
        if ha == 0.0 || hb == 0.0 {
            return 0.0;
        }
        2.0 * mi / (ha + hb)
    }

    /// Pair-counting ARI — an algebraically different route than the
    /// contingency formula used by the implementation.
    fn oracle_ari(a: &Partition, b: &Partition) -> f64 {
        let n = a.n();
        let (mut n11, mut n00, mut n10, mut n01) = (0f64, 0f64, 0f64, 0f64);
        for i in 0..n {
            for j in (i + 1)..n {
                let same_a = a.community_of(i) == a.community_of(j);
                let same_b = b.community_of(i) == b.community_of(j);
                match (same_a, same_b) {
                    (true, true) => n11 += 1.0,
                    (false, false) => n00 += 1.0,
                    (true, false) => n10 += 1.0,
                    (false, true) => n01 += 1.0,
                }
            }
        }
        let denom = (n11 + n10) * (n10 + n00) + (n11 + n01) * (n01 + n00);
        if denom == 0.0 {
            return 1.0;
        }
        2.0 * (n11 * n00 - n10 * n01) / denom
    }

    // ---- deterministic generator shared with the acceptance suite ----

    pub(crate) struct SplitMix(pub u64);

    impl SplitMix {
        pub fn next(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^ (z >> 31)
        }

        pub fn below(&mut self, bound: usize) -> usize {
            (self.next() % bound as u64) as usize
        }
    }

    pub(crate) fn random_graph(seed: u64, max_n: usize) -> Graph {
        let mut rng = SplitMix(seed);
        let n = 3 + rng.below(max_n - 2);
        let directed = rng.next() % 2 == 0;
        let mut weights = vec![0.0; n * n];
        // random spanning tree keeps it connected
        for i in 1..n {
            let j = rng.below(i);
            let w = (1 + rng.below(16)) as f64 / 4.0;
            weights[i * n + j] = w;
            weights[j * n + i] = w;
        }
        let extras = n + rng.below(2 * n);
        for _ in 0..extras {
            let i = rng.below(n);
            let j = rng.below(n);
            if i == j {
                continue;
            }
            let w = (1 + rng.below(16)) as f64 / 4.0;
            weights[i * n + j] = w;
            if !directed {
                weights[j * n + i] = w;
            }
        }
        if !directed {
            for i in 0..n {
                for j in 0..i {
                    let w = weights[i * n + j].max(weights[j * n + i]);
                    weights[i * n + j] = w;
                    weights[j * n + i] = w;
                }
            }
        }
        let labels = (0..n).map(|i| format!("v{i}")).collect();
        Graph::from_matrix(labels, weights, directed).unwrap()
    }

    pub(crate) fn random_partition(rng: &mut SplitMix, n: usize) -> Partition {
        let k = 1 + rng.below(n.min(6));
        let labels: Vec<usize> = (0..n).map(|_| rng.below(k)).collect();
        Partition::from_labels(&labels).unwrap()
    }

    // ---- frozen examples ----

    #[test]
    fn one_community_modularity_is_exactly_zero() {
        for seed in 0..25u64 {
            let g = random_graph(seed, 30);
            let part = Partition::new(vec![0; g.n()]).unwrap();
            assert_eq!(modularity(&g, &part).unwrap(), 0.0, "seed {seed}");
        }
    }

    #[test]
    fn two_k2_components_split_scores_half() {
        let g = Graph::load("a b\nc d", GraphFormat::EdgeList, false).unwrap();
        let part = Partition::new(vec![0, 0, 1, 1]).unwrap();
        assert!((modularity(&g, &part).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_k2_components_density_is_two() {
        let g = Graph::load("a b\nc d", GraphFormat::EdgeList, false).unwrap();
        let part = Partition::new(vec![0, 0, 1, 1]).unwrap();
        assert_eq!(modularity_density(&g, &part).unwrap(), 2.0);
    }

    #[test]
    fn internal_edge_free_community_has_nonpositive_density_term() {
        // Star: center in one community, leaves (no edges among them) in
        // another; the leaf community term is -L_out/|c| < 0.
        let g = Graph::load("hub a\nhub b\nhub c", GraphFormat::EdgeList, false).unwrap();
        let part = Partition::new(vec![0, 1, 1, 1]).unwrap();
        // leaf community: L_in = 0, L_out = 3, |c| = 3 -> term -1
        // hub community: L_in = 0, L_out = 3, |c| = 1 -> term -3
        assert_eq!(modularity_density(&g, &part).unwrap(), -4.0);
    }

    #[test]
    fn zero_edge_graph_is_rejected() {
        let g = Graph::from_matrix(
            vec!["a".into(), "b".into()],
            vec![0.0; 4],
            false,
        )
        .unwrap();
        let part = Partition::new(vec![0, 1]).unwrap();
        assert!(matches!(
            modularity(&g, &part),
            Err(MetricsError::ZeroEdges)
        ));
    }

    #[test]
    fn identical_partitions_agree_perfectly() {
        let part = Partition::from_labels(&[0, 0, 1, 2, 1, 0]).unwrap();
        assert_eq!(nmi(&part, &part).unwrap(), 1.0);
        assert_eq!(ari(&part, &part).unwrap(), 1.0);
    }

    #[test]
    fn one_block_vs_singletons_shares_nothing() {
        let a = Partition::new(vec![0; 5]).unwrap();
        let b = Partition::new(vec![0, 1, 2, 3, 4]).unwrap();
        assert_eq!(nmi(&a, &b).unwrap(), 0.0);
        // ARI denominator degenerates differently here: Sa covers all
        // pairs, Sb none.
        let v = ari(&a, &b).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn both_trivial_one_block_partitions_are_identical() {
        let a = Partition::new(vec![0; 4]).unwrap();
        assert_eq!(nmi(&a, &a).unwrap(), 1.0);
        assert_eq!(ari(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn random_labelings_have_near_zero_ari() {
        let mut rng = SplitMix(0xC0FFEE);
        let n = 200;
        // independent non-degenerate labelings (k >= 2; two one-block
        // partitions are identical, not independent)
        let draw = |rng: &mut SplitMix| {
            let k = 2 + rng.below(5);
            let labels: Vec<usize> = (0..n).map(|_| rng.below(k)).collect();
            Partition::from_labels(&labels).unwrap()
        };
        let mut worst = 0.0f64;
        let mut total = 0.0;
        for _ in 0..100 {
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            let v = ari(&a, &b).unwrap();
            worst = worst.max(v.abs());
            total += v.abs();
        }
        assert!(worst < 0.05, "worst |ARI| = {worst}");
        assert!(total / 100.0 < 0.02);
    }

    #[test]
    fn label_permutation_leaves_all_metrics_unchanged() {
        let g = random_graph(7, 20);
        let n = g.n();
        let mut rng = SplitMix(99);
        let part = random_partition(&mut rng, n);
        // permute community ids: c -> k-1-c
        let permuted = Partition::new(
            part.assignment()
                .iter()
                .map(|&c| part.k() - 1 - c)
                .collect(),
        )
        .unwrap();
        let truth = random_partition(&mut rng, n);
        assert_eq!(
            modularity(&g, &part).unwrap(),
            modularity(&g, &permuted).unwrap()
        );
        assert_eq!(
            modularity_density(&g, &part).unwrap(),
            modularity_density(&g, &permuted).unwrap()
        );
        assert!((nmi(&part, &truth).unwrap() - nmi(&permuted, &truth).unwrap()).abs() < 1e-12);
        assert!((ari(&part, &truth).unwrap() - ari(&permuted, &truth).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn nmi_and_ari_are_symmetric() {
        let mut rng = SplitMix(4242);
        for _ in 0..20 {
            let a = random_partition(&mut rng, 40);
            let b = random_partition(&mut rng, 40);
            assert!((nmi(&a, &b).unwrap() - nmi(&b, &a).unwrap()).abs() < 1e-12);
            assert!((ari(&a, &b).unwrap() - ari(&b, &a).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn implementations_match_oracles_on_random_inputs() {
        // The full 200-graph sweep lives in the acceptance suite; this is
        // the fast development loop.
        let mut rng = SplitMix(31337);
        for seed in 0..40u64 {
            let g = random_graph(seed * 11 + 1, 50);
            let n = g.n();
            let part = random_partition(&mut rng, n);
            let other = random_partition(&mut rng, n);
            assert!(
                (modularity(&g, &part).unwrap() - oracle_modularity(&g, &part)).abs() < 1e-10
            );
            assert!(
                (modularity_density(&g, &part).unwrap() - oracle_density(&g, &part)).abs()
                    < 1e-10
            );
            assert!((nmi(&part, &other).unwrap() - oracle_nmi(&part, &other)).abs() < 1e-10);
            assert!((ari(&part, &other).unwrap() - oracle_ari(&part, &other)).abs() < 1e-10);
        }
    }

    #[test]
    fn modularity_stays_in_range() {
        let mut rng = SplitMix(777);
        for seed in 100..140u64 {
            let g = random_graph(seed, 40);
            let part = random_partition(&mut rng, g.n());
            let q = modularity(&g, &part).unwrap();
            assert!((-1.0..=1.0).contains(&q));
        }
    }

    #[test]
    fn partition_requires_contiguous_ids() {
        assert!(matches!(
            Partition::new(vec![0, 2, 2]),
            Err(MetricsError::NonContiguous(1))
        ));
        assert!(Partition::new(vec![0, 1, 2]).is_ok());
    }

    #[test]
    fn partition_csv_round_trips() {
        let labels: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let part = Partition::new(vec![0, 1, 0, 1]).unwrap();
        let csv = part.to_csv(&labels);
        let back = Partition::from_csv(&csv, &labels).unwrap();
        assert_eq!(part, back);
    }

    #[test]
    fn partition_csv_rejects_unknown_and_missing_actors() {
        let labels: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        assert!(Partition::from_csv("actor_label,community_id\na,0\nz,1\n", &labels).is_err());
        assert!(Partition::from_csv("actor_label,community_id\na,0\n", &labels).is_err());
    }

    #[test]
    fn actor_set_mismatch_is_an_error() {
        let a = Partition::new(vec![0, 1]).unwrap();
        let b = Partition::new(vec![0, 1, 1]).unwrap();
        assert!(matches!(
            nmi(&a, &b),
            Err(MetricsError::ActorMismatch { .. })
        ));
        assert!(matches!(
            ari(&a, &b),
            Err(MetricsError::ActorMismatch { .. })
        ));
    }
}
