//! The release gate. One test per acceptance criterion, each printing a
//! single `ACCEPTANCE <name>: PASS/FAIL — detail` line before asserting,
//! so `cargo test --test acceptance -- --nocapture` reads as a checklist.
//!
//! Benchmark reproduction criteria drive the compiled CLI binary exactly
//! as a user would; the property suites exercise the library directly
//! against independent brute-force oracles.

use borgia::dendrogram::SelectionMode;
use borgia::engine::{self, DeltaMode, EngineConfig};
use borgia::graph::{DegreeMode, Graph};
use borgia::metrics::{self, Partition};
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn verdict(name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let line = format!("ACCEPTANCE {name}: {status} — {detail}");
    println!("{line}");
    assert!(ok, "{line}");
}

// ---------------------------------------------------------------------------
// CLI plumbing for the benchmark criteria

fn cli(out_dir: &Path, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_borgia"));
    cmd.arg("--out").arg(out_dir);
    cmd.args(args);
    cmd.output().expect("binary spawns")
}

fn expect_success(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

struct Scores {
    k: usize,
    nmi: f64,
    ari: f64,
}

/// Runs `cluster` with the given engine flags and `evaluate` against the
/// bundled ground truth; returns the scores and the cluster wall time.
fn cluster_and_evaluate(dataset: &str, flags: &[&str]) -> (Scores, f64, tempfile::TempDir) {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["cluster"];
    args.extend_from_slice(flags);
    args.push(dataset);
    let started = Instant::now();
    let out = cli(tmp.path(), &args);
    let elapsed = started.elapsed().as_secs_f64();
    expect_success(&out, "cluster");
    let out = cli(tmp.path(), &["evaluate", dataset]);
    expect_success(&out, "evaluate");
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let row = stdout.lines().nth(1).expect("metrics row");
    let fields: Vec<&str> = row.split(',').collect();
    (
        Scores {
            k: fields[0].parse().unwrap(),
            nmi: fields[3].parse().unwrap(),
            ari: fields[4].parse().unwrap(),
        },
        elapsed,
        tmp,
    )
}

#[test]
fn dolphins_exact_reproduction() {
    let (scores, secs, _tmp) =
        cluster_and_evaluate("dolphins", &["--alpha", "0.7", "--p", "3", "--c", "0"]);
    let ok = scores.k == 2 && scores.ari >= 0.99 && secs < 30.0;
    verdict(
        "dolphins-exact-reproduction",
        ok,
        &format!(
            "{} communities, ARI {:.4}, NMI {:.4} in {:.1}s (need exactly 2, ARI >= 0.99, < 30s)",
            scores.k, scores.ari, scores.nmi, secs
        ),
    );
}

#[test]
fn karate_reproduction() {
    let (scores, _secs, tmp) =
        cluster_and_evaluate("karate", &["--alpha", "0.7", "--p", "3", "--c", "0"]);
    let within_window =
        (scores.ari - 0.8822).abs() <= 0.05 && (scores.nmi - 0.8324).abs() <= 0.05;
    let fallback = scores.k == 2 && scores.ari >= 0.70;
    if scores.k == 2 && within_window {
        verdict(
            "karate-reproduction",
            true,
            &format!(
                "2 communities, ARI {:.4} and NMI {:.4} inside the target windows",
                scores.ari, scores.nmi
            ),
        );
        return;
    }
    // The windowed target missed; the fallback rule requires the
    // deviation to be written into the run manifest.
    let manifest_path = tmp.path().join("manifest.json");
    let note = format!(
        "boundary deviation: ARI {:.4} and NMI {:.4} fall outside the 0.8822+/-0.05 \
         and 0.8324+/-0.05 windows; accepted under the fallback rule \
         (2 communities, ARI >= 0.70)",
        scores.ari, scores.nmi
    );
    let out = cli(
        tmp.path(),
        &[
            "evaluate",
            "karate",
            "--update-manifest",
            manifest_path.to_str().unwrap(),
            "--note",
            &note,
        ],
    );
    expect_success(&out, "evaluate --update-manifest");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    let documented = manifest["notes"]
        .as_array()
        .is_some_and(|notes| notes.iter().any(|n| n.as_str() == Some(note.as_str())));
    verdict(
        "karate-reproduction",
        fallback && documented,
        &format!(
            "{} communities, ARI {:.4}, NMI {:.4}; outside the target windows, \
             fallback rule applied and the deviation recorded in the manifest",
            scores.k, scores.ari, scores.nmi
        ),
    );
}

#[test]
fn football_conference_recovery() {
    let (scores, secs, _tmp) =
        cluster_and_evaluate("football", &["--alpha", "1", "--p", "0", "--c", "0"]);
    let ok = (11..=13).contains(&scores.k) && scores.nmi >= 0.85 && secs < 120.0;
    verdict(
        "football-conference-recovery",
        ok,
        &format!(
            "{} communities, NMI {:.4} in {:.1}s (need 12±1, NMI >= 0.85, < 2min)",
            scores.k, scores.nmi, secs
        ),
    );
}

#[test]
fn polbooks_leaning_recovery() {
    let (scores, _secs, _tmp) =
        cluster_and_evaluate("polbooks", &["--alpha", "1", "--p", "0", "--c", "0"]);
    let ok = (2..=4).contains(&scores.k) && scores.nmi >= 0.50;
    verdict(
        "polbooks-leaning-recovery",
        ok,
        &format!(
            "{} communities, NMI {:.4} (need 3±1, NMI >= 0.50)",
            scores.k, scores.nmi
        ),
    );
}

#[test]
fn delta_mode_equivalence() {
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["karate", "dolphins"] {
        let ds = borgia::datasets::load_benchmark(name).unwrap();
        let static_cfg = EngineConfig {
            delta_mode: DeltaMode::Static,
            ..EngineConfig::default()
        };
        let dynamic_cfg = EngineConfig {
            delta_mode: DeltaMode::DynamicFirst,
            ..EngineConfig::default()
        };
        let st = engine::run(&ds.graph, &static_cfg).unwrap();
        let dy = engine::run(&ds.graph, &dynamic_cfg).unwrap();
        let pst = st.dendrogram.select(SelectionMode::Score).unwrap();
        let pdy = dy.dendrogram.select(SelectionMode::Score).unwrap();
        let same = pst.assignment() == pdy.assignment();
        let fewer = dy.iterations < st.iterations;
        ok &= same && fewer;
        details.push(format!(
            "{name}: partitions {}, iterations {} vs {} static ({})",
            if same { "identical" } else { "DIFFER" },
            dy.iterations,
            st.iterations,
            if fewer { "fewer" } else { "NOT fewer" },
        ));
    }
    verdict("delta-mode-equivalence", ok, &details.join("; "));
}

// ---------------------------------------------------------------------------
// deterministic random graphs and partitions for the property suites

struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }

    fn unit(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Connected undirected graph: a random spanning tree plus extra edges,
/// integer weights 1..=5.
fn random_connected(rng: &mut SplitMix, n: usize) -> Graph {
    let mut weights = vec![0.0; n * n];
    let set = |w: &mut Vec<f64>, i: usize, j: usize, v: f64| {
        w[i * n + j] = v;
        w[j * n + i] = v;
    };
    for i in 1..n {
        let j = rng.below(i as u64) as usize;
        let v = (rng.below(5) + 1) as f64;
        set(&mut weights, i, j, v);
    }
    let extras = rng.below((n as u64) * 2);
    for _ in 0..extras {
        let i = rng.below(n as u64) as usize;
        let j = rng.below(n as u64) as usize;
        if i != j {
            let v = (rng.below(5) + 1) as f64;
            set(&mut weights, i, j, v);
        }
    }
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    Graph::from_matrix(labels, weights, false).unwrap()
}

fn random_partition(rng: &mut SplitMix, n: usize) -> Partition {
    loop {
        let k = 2 + rng.below(7.min(n as u64 - 1)) as usize;
        let ids: Vec<u64> = (0..n).map(|_| rng.below(k as u64)).collect();
        let distinct: std::collections::HashSet<u64> = ids.iter().copied().collect();
        if distinct.len() >= 2 {
            return Partition::from_labels(&ids).unwrap();
        }
    }
}

// ---------------------------------------------------------------------------
// metric oracles: same definitions, different accumulation

/// Pairwise definitional modularity: (1/2m) Σ_ij (w_ij − s_i s_j / 2m) δ_ij.
fn oracle_modularity(g: &Graph, part: &Partition) -> f64 {
    let n = g.n();
    let w = |i: usize, j: usize| {
        if g.directed() {
            (g.weight(i, j) + g.weight(j, i)) / 2.0
        } else {
            g.weight(i, j)
        }
    };
    let strength: Vec<f64> = (0..n).map(|i| (0..n).map(|j| w(i, j)).sum()).collect();
    let two_m: f64 = strength.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if part.community_of(i) == part.community_of(j) {
                q += w(i, j) / two_m - strength[i] * strength[j] / (two_m * two_m);
            }
        }
    }
    q
}

/// Unordered-pair modularity density: Σ_c (2·in(c) − out(c)) / |c| with
/// unweighted edge counts.
fn oracle_density(g: &Graph, part: &Partition) -> f64 {
    let n = g.n();
    let connected = |i: usize, j: usize| g.weight(i, j) != 0.0 || g.weight(j, i) != 0.0;
    let mut d = 0.0;
    for c in 0..part.k() {
        let size = part.members(c).len() as f64;
        let mut inside = 0.0;
        let mut outside = 0.0;
        for i in 0..n {
            if part.community_of(i) != c {
                continue;
            }
            for j in (i + 1)..n {
                if !connected(i, j) {
                    continue;
                }
                if part.community_of(j) == c {
                    inside += 1.0;
                } else {
                    outside += 1.0;
                }
            }
            for j in 0..i {
                if part.community_of(j) != c && connected(i, j) {
                    outside += 1.0;
                }
            }
        }
        d += (2.0 * inside - outside) / size;
    }
    d
}

/// NMI from joint counts, arithmetic-mean normalization.
fn oracle_nmi(a: &Partition, b: &Partition) -> f64 {
    let n = a.n() as f64;
    let mut joint = vec![vec![0.0; b.k()]; a.k()];
    for i in 0..a.n() {
        joint[a.community_of(i)][b.community_of(i)] += 1.0;
    }
    let pa: Vec<f64> = joint.iter().map(|row| row.iter().sum::<f64>() / n).collect();
    let pb: Vec<f64> = (0..b.k())
        .map(|j| joint.iter().map(|row| row[j]).sum::<f64>() / n)
        .collect();
    let entropy = |p: &[f64]| -> f64 {
        -p.iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| x * x.ln())
            .sum::<f64>()
    };
    let mut info = 0.0;
    for (i, row) in joint.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            if count > 0.0 {
                let pij = count / n;
                info += pij * (pij / (pa[i] * pb[j])).ln();
            }
        }
    }
    let denom = entropy(&pa) + entropy(&pb);
    if denom == 0.0 {
        1.0
    } else {
        2.0 * info / denom
    }
}

/// ARI by brute-force pair counting over all actor pairs.
fn oracle_ari(a: &Partition, b: &Partition) -> f64 {
    let n = a.n();
    let (mut t_a, mut t_b, mut t_ab) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        for j in (i + 1)..n {
            let same_a = a.community_of(i) == a.community_of(j);
            let same_b = b.community_of(i) == b.community_of(j);
            t_a += same_a as u64 as f64;
            t_b += same_b as u64 as f64;
            t_ab += (same_a && same_b) as u64 as f64;
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let expected = t_a * t_b / pairs;
    let max = (t_a + t_b) / 2.0;
    if max == expected {
        1.0
    } else {
        (t_ab - expected) / (max - expected)
    }
}

#[test]
fn metric_oracle_suite() {
    let mut rng = SplitMix(0xACCE_97A0);
    let mut worst: f64 = 0.0;
    let mut one_community_exact = true;
    for _ in 0..200 {
        let n = 4 + rng.below(47) as usize; // 4..=50
        let g = random_connected(&mut rng, n);
        let part = random_partition(&mut rng, n);
        let truth = random_partition(&mut rng, n);

        let q = metrics::modularity(&g, &part).unwrap();
        let d = metrics::modularity_density(&g, &part).unwrap();
        let i = metrics::nmi(&part, &truth).unwrap();
        let r = metrics::ari(&part, &truth).unwrap();
        worst = worst
            .max((q - oracle_modularity(&g, &part)).abs())
            .max((d - oracle_density(&g, &part)).abs())
            .max((i - oracle_nmi(&part, &truth)).abs())
            .max((r - oracle_ari(&part, &truth)).abs());

        let whole = Partition::from_labels(&vec![0u8; n]).unwrap();
        one_community_exact &= metrics::modularity(&g, &whole).unwrap() == 0.0;
    }
    let ok = worst <= 1e-10 && one_community_exact;
    verdict(
        "metric-oracle-suite",
        ok,
        &format!(
            "200 random graphs n<=50: worst oracle deviation {worst:.2e} (need <= 1e-10), \
             one-community modularity exactly 0: {one_community_exact}"
        ),
    );
}

#[test]
fn engine_invariant_suite() {
    let mut rng = SplitMix(0xACCE_97A1);
    let cfg = EngineConfig::default();
    let mut checked = 0usize;
    for _ in 0..100 {
        let n = 4 + rng.below(57) as usize; // 4..=60
        let g = random_connected(&mut rng, n);
        let report = engine::run_traced(&g, &cfg).unwrap();
        let d = &report.dendrogram;

        assert_eq!(d.fusions().len(), n - 1, "n-1 fusions on n={n}");

        // exact mass conservation: every fusion adds, the root carries all
        let mut mass: Vec<f64> = (0..n)
            .map(|i| g.connection_count(i, DegreeMode::Total) as f64)
            .collect();
        let total: f64 = mass.iter().sum();
        for f in d.fusions() {
            assert_eq!(
                f.mass,
                mass[f.left] + mass[f.right],
                "fusion mass adds exactly on n={n}"
            );
            assert_eq!(mass.len(), f.new_id, "fusion ids append in order");
            mass.push(f.mass);
        }
        assert_eq!(d.fusions().last().unwrap().mass, total, "root mass on n={n}");

        let mut prev = 0.0;
        for f in d.fusions() {
            assert!(f.t >= prev, "non-decreasing timestamps on n={n}");
            prev = f.t;
        }
        for row in report.trace.as_ref().unwrap() {
            assert!(row.dt > 0.0, "dt > 0 every iteration on n={n}");
        }
        assert!(
            report.sparsity_respected,
            "visited pairs bounded by nonzero-affinity pairs on n={n}"
        );

        let again = engine::run_traced(&g, &cfg).unwrap();
        assert_eq!(
            d.to_json(),
            again.dendrogram.to_json(),
            "bit-identical rerun on n={n}"
        );
        assert_eq!(report.iterations, again.iterations);
        checked += 1;
    }
    verdict(
        "engine-invariant-suite",
        checked == 100,
        &format!(
            "{checked}/100 random graphs n<=60: exact mass conservation, n-1 fusions, \
             ordered timestamps, positive dt, sparsity bound, bit-identical reruns"
        ),
    );
}

#[test]
fn affinity_property_suite() {
    use borgia::affinity::AffinitySpec;
    let mut rng = SplitMix(0xACCE_97A2);
    let mut checked = 0usize;
    for _ in 0..1000 {
        let n = 3 + rng.below(22) as usize; // 3..=24
        let g = random_connected(&mut rng, n);
        let alpha = rng.unit();

        let bf = AffinitySpec::BestFriend.resolve(&g).unwrap();
        let bcf = AffinitySpec::BestCommonFriend { base: None }.resolve(&g).unwrap();
        let ma = AffinitySpec::Machiavelli.resolve(&g).unwrap();
        let mix = AffinitySpec::Combined { alpha }.resolve(&g).unwrap();
        let all = AffinitySpec::Combined { alpha: 1.0 }.resolve(&g).unwrap();
        let none = AffinitySpec::Combined { alpha: 0.0 }.resolve(&g).unwrap();

        for x in 0..n {
            let mut row_sum = 0.0;
            for y in 0..n {
                for m in [&bf, &bcf, &ma, &mix] {
                    let v = m.value(x, y);
                    assert!((0.0..=1.0).contains(&v), "range [0,1] on n={n}");
                }
                row_sum += bf.value(x, y);
                // combine endpoints are the pure transforms, bit for bit
                assert_eq!(all.value(x, y), bf.value(x, y), "alpha=1 endpoint");
                assert_eq!(none.value(x, y), bcf.value(x, y), "alpha=0 endpoint");
                // symmetric input makes the Machiavelli view symmetric
                assert_eq!(ma.value(x, y), ma.value(y, x), "MA symmetry");
                if x != y {
                    // densification: support is exactly the common-friend
                    // relation, which reaches beyond direct adjacency
                    let common = (0..n)
                        .any(|e| e != x && e != y && g.weight(x, e) > 0.0 && g.weight(y, e) > 0.0);
                    assert_eq!(
                        bcf.value(x, y) > 0.0,
                        common,
                        "BCF support = common-friend relation"
                    );
                }
            }
            // connected graphs: every actor has someone to spend on
            assert!(
                (row_sum - 1.0).abs() <= 1e-9,
                "BF row sums to 1, got {row_sum} on n={n}"
            );
        }
        checked += 1;
    }
    verdict(
        "affinity-property-suite",
        checked == 1000,
        &format!(
            "{checked}/1000 random graphs: [0,1] range, BF row sums 1, MA symmetry, \
             BCF common-friend densification, combine endpoint identities"
        ),
    );
}

#[test]
fn scaling_behavior() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli(
        tmp.path(),
        &[
            "sweep",
            "--edge-fraction-grid",
            "0.125,0.25,0.5,1",
            "--repeats",
            "5",
            "eurovision",
        ],
    );
    expect_success(&out, "sweep");
    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();

    // fraction -> (edge count, runtimes of clean rows)
    let mut groups: Vec<(f64, usize, Vec<f64>)> = Vec::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let fraction: f64 = cols[3].parse().unwrap();
        let edges: usize = cols[6].parse().unwrap();
        let clean = line.ends_with(',');
        if !clean {
            continue; // a disconnected sample stalls honestly; skip its row
        }
        let runtime: f64 = cols[10].parse().unwrap();
        match groups.iter_mut().find(|(f, _, _)| *f == fraction) {
            Some((_, _, list)) => list.push(runtime),
            None => groups.push((fraction, edges, vec![runtime])),
        }
    }
    groups.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let enough = groups.len() == 4 && groups.iter().all(|(_, _, list)| list.len() >= 3);

    let median = |list: &[f64]| -> f64 {
        let mut v = list.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let medians: Vec<(usize, f64)> = groups
        .iter()
        .map(|(_, edges, list)| (*edges, median(list)))
        .collect();
    let monotone = medians.windows(2).all(|w| w[1].1 >= w[0].1);
    let (e_lo, t_lo) = medians[0];
    let (e_hi, t_hi) = medians[medians.len() - 1];
    let slope = (t_hi / t_lo).ln() / (e_hi as f64 / e_lo as f64).ln();
    let ok = enough && monotone && slope < 2.0;
    verdict(
        "scaling-behavior",
        ok,
        &format!(
            "median runtimes {} over edge counts {}; monotone nondecreasing: {monotone}, \
             log-log slope {slope:.2} (need < 2)",
            medians
                .iter()
                .map(|(_, t)| format!("{t:.0}ms"))
                .collect::<Vec<_>>()
                .join(" -> "),
            medians
                .iter()
                .map(|(e, _)| e.to_string())
                .collect::<Vec<_>>()
                .join(" -> "),
        ),
    );
}
