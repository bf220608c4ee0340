//! Bundled benchmark networks, paragraph co-occurrence ingestion for
//! literary corpora, and point-based vote-record loading.

use crate::graph::{Graph, GraphError, GraphFormat, TemporalGraph};
use crate::metrics::{MetricsError, Partition};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("unknown dataset {name:?}; available: karate, dolphins, football, polbooks")]
    Unknown { name: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("corpus vocabulary holds {got} token(s) after filtering; at least 2 are required")]
    VocabularyTooSmall { got: usize },
    #[error("corpus slice offset {offset} is not an ascending char boundary within the {len}-byte text")]
    BadSlice { offset: usize, len: usize },
    #[error("vote row {line}: {msg}")]
    VoteRow { line: usize, msg: String },
    #[error("no vote rows fall in the year range {lo}..={hi}")]
    EmptyRange { lo: i32, hi: i32 },
}

/// A benchmark graph with its published ground-truth communities.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub graph: Graph,
    pub ground_truth: Option<Partition>,
    pub name: String,
    pub provenance: String,
}

/// Names accepted by [`load_benchmark`], in canonical order.
pub const BENCHMARKS: [&str; 4] = ["karate", "dolphins", "football", "polbooks"];

/// Year coverage of the bundled vote record.
pub const EUROVISION_YEARS: RangeInclusive<i32> = 1957..=2019;

/// The bundled Eurovision finals record (52 countries, 2102 positively
/// weighted directed edges over the full years) aggregated over `years`.
pub fn eurovision(years: RangeInclusive<i32>) -> Result<Graph, DatasetError> {
    load_votes(include_str!("../data/eurovision_votes.csv"), years)
}

pub fn load_benchmark(name: &str) -> Result<LabeledDataset, DatasetError> {
    let (edges, labels, provenance) = match name {
        "karate" => (
            include_str!("../data/karate.edges"),
            include_str!("../data/karate_labels.csv"),
            "Zachary karate club; 34 members, 78 ties, 2 factions",
        ),
        "dolphins" => (
            include_str!("../data/dolphins.edges"),
            include_str!("../data/dolphins_labels.csv"),
            "Lusseau Doubtful Sound bottlenose dolphins; 62 animals, 159 ties, 2 pods",
        ),
        "football" => (
            include_str!("../data/football.edges"),
            include_str!("../data/football_labels.csv"),
            "Girvan-Newman Division I-A 2000 schedule; 115 teams, 613 games, 12 conferences",
        ),
        "polbooks" => (
            include_str!("../data/polbooks.edges"),
            include_str!("../data/polbooks_labels.csv"),
            "Krebs US politics books; 105 titles, 441 co-purchases, 3 leanings",
        ),
        _ => {
            return Err(DatasetError::Unknown {
                name: name.to_string(),
            })
        }
    };
    let graph = Graph::load(edges, GraphFormat::EdgeList, false)?;
    let ground_truth = Some(Partition::from_csv(labels, graph.labels())?);
    Ok(LabeledDataset {
        graph,
        ground_truth,
        name: name.to_string(),
        provenance: provenance.to_string(),
    })
}

/// The co-occurrence counting unit. Paragraphs are the only unit the
/// ingestion pipeline recognizes today.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoUnit {
    #[default]
    Paragraph,
}

/// Recipe for turning raw text into a word co-occurrence network.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub text: String,
    /// Vocabulary cap: keep this many of the most frequent tokens.
    pub top_n: usize,
    pub unit: CoUnit,
    /// Chapter-start byte offsets; when present, one graph per chapter
    /// is built over the shared whole-text vocabulary.
    pub slicing: Option<Vec<usize>>,
    pub stopwords: BTreeSet<String>,
}

fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
}

/// Blank-line-separated paragraphs (a line of pure whitespace separates).
fn paragraphs(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push_str(line);
            cur.push('\n');
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn cooccurrence_weights(text: &str, vocab: &HashMap<String, usize>, n: usize) -> Vec<f64> {
    let mut weights = vec![0.0; n * n];
    for para in paragraphs(text) {
        let present: BTreeSet<usize> = tokens(&para).filter_map(|t| vocab.get(&t).copied()).collect();
        for &i in &present {
            for &j in &present {
                if i < j {
                    weights[i * n + j] += 1.0;
                    weights[j * n + i] += 1.0;
                }
            }
        }
    }
    weights
}

/// Builds the word co-occurrence network: tokens lowercased, split on
/// non-alphabetic characters, stopwords dropped, vocabulary capped to
/// the `top_n` most frequent tokens (ties broken alphabetically), and an
/// undirected edge weighted by the number of paragraphs in which both
/// words appear. With `slicing`, also returns one graph per chapter over
/// the same whole-text vocabulary.
pub fn build_cooccurrence(
    spec: &CorpusSpec,
) -> Result<(Graph, Option<TemporalGraph>), DatasetError> {
    let CoUnit::Paragraph = spec.unit;
    let mut counts: HashMap<String, u64> = HashMap::new();
    for t in tokens(&spec.text) {
        if !spec.stopwords.contains(&t) {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(spec.top_n);
    if ranked.len() < 2 {
        return Err(DatasetError::VocabularyTooSmall { got: ranked.len() });
    }
    let labels: Vec<String> = ranked.iter().map(|(w, _)| w.clone()).collect();
    let vocab: HashMap<String, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let n = labels.len();

    let full = Graph::from_matrix(
        labels.clone(),
        cooccurrence_weights(&spec.text, &vocab, n),
        false,
    )?;

    let temporal = match &spec.slicing {
        None => None,
        Some(offsets) => {
            let len = spec.text.len();
            let mut prev = None;
            for &off in offsets {
                let ascending = prev.map_or(true, |p| off > p);
                if !ascending || off > len || !spec.text.is_char_boundary(off) {
                    return Err(DatasetError::BadSlice { offset: off, len });
                }
                prev = Some(off);
            }
            let mut slices = Vec::with_capacity(offsets.len());
            for (k, &start) in offsets.iter().enumerate() {
                let end = offsets.get(k + 1).copied().unwrap_or(len);
                let chapter = &spec.text[start..end];
                slices.push(Graph::from_matrix(
                    labels.clone(),
                    cooccurrence_weights(chapter, &vocab, n),
                    false,
                )?);
            }
            Some(TemporalGraph::new(slices)?)
        }
    };
    Ok((full, temporal))
}

/// Aggregates a point-vote record (header `year,from,to,points`) into a
/// directed graph: edge weight = total points given from → to across the
/// year range. Country labels are sorted for a stable actor order.
pub fn load_votes(csv: &str, years: RangeInclusive<i32>) -> Result<Graph, DatasetError> {
    let (lo, hi) = (*years.start(), *years.end());
    let mut totals: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut countries: BTreeSet<String> = BTreeSet::new();
    let mut selected = 0usize;
    let mut saw_header = false;
    for (line0, raw) in csv.lines().enumerate() {
        let line = line0 + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        if !saw_header {
            let lowered = row.to_lowercase().replace(' ', "");
            if lowered != "year,from,to,points" {
                return Err(DatasetError::VoteRow {
                    line,
                    msg: format!("expected header `year,from,to,points`, found {row:?}"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(DatasetError::VoteRow {
                line,
                msg: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let year: i32 = fields[0].parse().map_err(|_| DatasetError::VoteRow {
            line,
            msg: format!("bad year {:?}", fields[0]),
        })?;
        let points: f64 = fields[3].parse().map_err(|_| DatasetError::VoteRow {
            line,
            msg: format!("bad points {:?}", fields[3]),
        })?;
        if !points.is_finite() || points < 0.0 {
            return Err(DatasetError::VoteRow {
                line,
                msg: format!("points must be a finite non-negative number, got {points}"),
            });
        }
        let (from, to) = (fields[1], fields[2]);
        if from.is_empty() || to.is_empty() {
            return Err(DatasetError::VoteRow {
                line,
                msg: "empty country code".into(),
            });
        }
        if from == to {
            return Err(DatasetError::VoteRow {
                line,
                msg: format!("self-vote {from} → {to}"),
            });
        }
        if !years.contains(&year) {
            continue;
        }
        selected += 1;
        countries.insert(from.to_string());
        countries.insert(to.to_string());
        *totals.entry((from.to_string(), to.to_string())).or_insert(0.0) += points;
    }
    if !saw_header {
        return Err(DatasetError::VoteRow {
            line: 1,
            msg: "empty input: missing `year,from,to,points` header".into(),
        });
    }
    if selected == 0 {
        return Err(DatasetError::EmptyRange { lo, hi });
    }
    let labels: Vec<String> = countries.into_iter().collect();
    let index: HashMap<&String, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let n = labels.len();
    let mut weights = vec![0.0; n * n];
    for ((from, to), pts) in totals {
        if pts > 0.0 {
            weights[index[&from] * n + index[&to]] = pts;
        }
    }
    Ok(Graph::from_matrix(labels, weights, true)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmarks_match_published_shapes() {
        for (name, n, k) in [
            ("karate", 34, 2),
            ("dolphins", 62, 2),
            ("football", 115, 12),
            ("polbooks", 105, 3),
        ] {
            let ds = load_benchmark(name).unwrap();
            assert_eq!(ds.graph.n(), n, "{name} actor count");
            let truth = ds.ground_truth.unwrap();
            assert_eq!(truth.n(), n, "{name} truth coverage");
            assert_eq!(truth.k(), k, "{name} ground-truth communities");
            assert_eq!(ds.name, name);
        }
    }

    #[test]
    fn unknown_benchmark_lists_available() {
        let err = load_benchmark("enron").unwrap_err().to_string();
        for name in BENCHMARKS {
            assert!(err.contains(name), "{err:?} should list {name}");
        }
    }

    #[test]
    fn two_paragraph_example() {
        let spec = CorpusSpec {
            text: "a b.\n\na c.".into(),
            top_n: 3,
            unit: CoUnit::Paragraph,
            slicing: None,
            stopwords: BTreeSet::new(),
        };
        let (g, temporal) = build_cooccurrence(&spec).unwrap();
        assert!(temporal.is_none());
        assert_eq!(g.n(), 3);
        let w = |x: &str, y: &str| g.weight(g.index_of(x).unwrap(), g.index_of(y).unwrap());
        assert_eq!(w("a", "b"), 1.0);
        assert_eq!(w("a", "c"), 1.0);
        assert_eq!(w("b", "c"), 0.0);
    }

    #[test]
    fn stopwords_leave_the_vocabulary() {
        let spec = CorpusSpec {
            text: "the cat saw the dog".into(),
            top_n: 10,
            unit: CoUnit::Paragraph,
            slicing: None,
            stopwords: ["the".to_string()].into_iter().collect(),
        };
        let (g, _) = build_cooccurrence(&spec).unwrap();
        assert_eq!(g.n(), 3);
        assert!(g.index_of("the").is_none());
    }

    #[test]
    fn boundary_ties_break_alphabetically_and_prefix_grows() {
        // x appears 3 times; m, q, z twice each — the cap cuts into the tie.
        let text = "x x x m m q q z z";
        let base = CorpusSpec {
            text: text.into(),
            top_n: 2,
            unit: CoUnit::Paragraph,
            slicing: None,
            stopwords: BTreeSet::new(),
        };
        let (g2, _) = build_cooccurrence(&base).unwrap();
        assert_eq!(g2.labels(), &["x".to_string(), "m".to_string()]);
        let (g3, _) = build_cooccurrence(&CorpusSpec {
            top_n: 3,
            ..base.clone()
        })
        .unwrap();
        assert_eq!(
            g3.labels(),
            &["x".to_string(), "m".to_string(), "q".to_string()]
        );
    }

    #[test]
    fn tokens_lowercase_and_split_on_non_alphabetic() {
        let spec = CorpusSpec {
            text: "Cat-DOG! cat2dog".into(),
            top_n: 10,
            unit: CoUnit::Paragraph,
            slicing: None,
            stopwords: BTreeSet::new(),
        };
        let (g, _) = build_cooccurrence(&spec).unwrap();
        // "Cat-DOG! cat2dog" tokenizes to cat, dog, cat, dog.
        assert_eq!(g.n(), 2);
        assert_eq!(g.labels(), &["cat".to_string(), "dog".to_string()]);
        assert_eq!(g.weight(0, 1), 1.0);
    }

    #[test]
    fn tiny_vocabulary_is_rejected() {
        let spec = CorpusSpec {
            text: "solo solo solo".into(),
            top_n: 5,
            unit: CoUnit::Paragraph,
            slicing: None,
            stopwords: BTreeSet::new(),
        };
        assert!(matches!(
            build_cooccurrence(&spec),
            Err(DatasetError::VocabularyTooSmall { got: 1 })
        ));
    }

    #[test]
    fn slicing_builds_per_chapter_graphs_over_shared_vocabulary() {
        let ch1 = "a b.\n\n";
        let ch2 = "a c.";
        let spec = CorpusSpec {
            text: format!("{ch1}{ch2}"),
            top_n: 3,
            unit: CoUnit::Paragraph,
            slicing: Some(vec![0, ch1.len()]),
            stopwords: BTreeSet::new(),
        };
        let (full, temporal) = build_cooccurrence(&spec).unwrap();
        let tg = temporal.unwrap();
        assert_eq!(tg.len(), 2);
        for s in tg.slices() {
            assert_eq!(s.labels(), full.labels());
        }
        let w = |g: &Graph, x: &str, y: &str| {
            g.weight(g.index_of(x).unwrap(), g.index_of(y).unwrap())
        };
        assert_eq!(w(&tg.slices()[0], "a", "b"), 1.0);
        assert_eq!(w(&tg.slices()[0], "a", "c"), 0.0);
        assert_eq!(w(&tg.slices()[1], "a", "c"), 1.0);
    }

    #[test]
    fn bad_slice_offsets_are_rejected() {
        let base = CorpusSpec {
            text: "a b c".into(),
            top_n: 3,
            unit: CoUnit::Paragraph,
            slicing: None,
            stopwords: BTreeSet::new(),
        };
        for offsets in [vec![3, 2], vec![0, 99]] {
            let spec = CorpusSpec {
                slicing: Some(offsets),
                ..base.clone()
            };
            assert!(matches!(
                build_cooccurrence(&spec),
                Err(DatasetError::BadSlice { .. })
            ));
        }
    }

    #[test]
    fn single_vote_row() {
        let g = load_votes("year,from,to,points\n2010,SE,NO,12", 2010..=2010).unwrap();
        assert_eq!(g.n(), 2);
        assert!(g.directed());
        assert_eq!(g.labels(), &["NO".to_string(), "SE".to_string()]);
        assert_eq!(g.weight(1, 0), 12.0);
        assert_eq!(g.weight(0, 1), 0.0);
    }

    #[test]
    fn votes_sum_within_range_only() {
        let csv = "year,from,to,points\n2009,SE,NO,4\n2010,SE,NO,12\n2011,SE,NO,6";
        let all = load_votes(csv, 2009..=2011).unwrap();
        assert_eq!(all.weight(1, 0), 22.0);
        let one = load_votes(csv, 2010..=2010).unwrap();
        assert_eq!(one.weight(1, 0), 12.0);
    }

    #[test]
    fn vote_rows_are_order_independent() {
        let a = "year,from,to,points\n2010,SE,NO,12\n2010,NO,SE,8\n2011,SE,DK,3";
        let b = "year,from,to,points\n2011,SE,DK,3\n2010,NO,SE,8\n2010,SE,NO,12";
        let ga = load_votes(a, 2010..=2011).unwrap();
        let gb = load_votes(b, 2010..=2011).unwrap();
        assert_eq!(ga.labels(), gb.labels());
        for i in 0..ga.n() {
            assert_eq!(ga.row(i), gb.row(i));
        }
    }

    #[test]
    fn empty_year_range_is_an_error() {
        let csv = "year,from,to,points\n2010,SE,NO,12";
        assert!(matches!(
            load_votes(csv, 1990..=1995),
            Err(DatasetError::EmptyRange { lo: 1990, hi: 1995 })
        ));
    }

    #[test]
    fn malformed_vote_rows_name_the_line() {
        for (csv, want_line) in [
            ("year,from,to,points\n2010,SE,NO", 2),
            ("year,from,to,points\n2010,SE,NO,abc", 2),
            ("year,from,to,points\nnope,SE,NO,4", 2),
            ("year,from,to,points\n2010,SE,NO,4\n2011,FI,FI,2", 3),
            ("not,a,header\n2010,SE,NO,4", 1),
        ] {
            match load_votes(csv, 2000..=2020) {
                Err(DatasetError::VoteRow { line, .. }) => assert_eq!(line, want_line, "{csv:?}"),
                other => panic!("expected VoteRow error for {csv:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn bundled_vote_record_loads_to_frozen_shape() {
        let g = eurovision(EUROVISION_YEARS).unwrap();
        assert_eq!(g.n(), 52);
        let edges: usize = (0..g.n())
            .map(|i| g.row(i).iter().filter(|&&w| w > 0.0).count())
            .sum();
        assert_eq!(edges, 2102);
    }

    #[test]
    fn decade_slice_is_smaller_but_loads() {
        let g = eurovision(2010..=2019).unwrap();
        assert!(g.n() <= 52 && g.n() >= 30);
    }
}
