//! Canonical graph representation shared by every other module: dense
//! weighted adjacency with actor labels, basic statistics, and
//! (de)serialization in three text formats.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("negative weight at line {line}")]
    NegativeWeight { line: usize },
    #[error("self-loop on actor `{label}` rejected (line {line})")]
    SelfLoop { label: String, line: usize },
    #[error("duplicate label `{label}`")]
    DuplicateLabel { label: String },
    #[error("duplicate edge `{src}` -> `{dst}` at line {line}")]
    DuplicateEdge { src: String, dst: String, line: usize },
    #[error("graph must contain at least one edge")]
    Empty,
    #[error("undirected graph has asymmetric weights at ({i},{j})")]
    Asymmetric { i: usize, j: usize },
    #[error("invalid weight matrix: {0}")]
    BadMatrix(String),
    #[error("density undefined for fewer than two actors")]
    TooSmall,
    #[error("temporal slices disagree: {0}")]
    InconsistentSlices(String),
    #[error("label `{0}` contains whitespace and cannot be written as an edge list")]
    UnserializableLabel(String),
}

/// Which incident edges a degree query counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    In,
    Out,
    Total,
}

/// Serialization formats understood by [`Graph::load`] / [`Graph::save`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// Lines `src dst [weight]`, whitespace-separated, `#` comments,
    /// missing weight defaults to 1.0.
    EdgeList,
    /// First row actor labels, following rows the weight matrix.
    MatrixCsv,
    /// Minimal GML: `node [ id label ]` and `edge [ source target value ]`
    /// records; unknown keys inside records are ignored.
    GmlSubset,
}

/// A weighted graph over named actors. Weights are stored densely,
/// row-major; entry `(i, j)` is the weight of the edge `i -> j`.
/// Undirected graphs keep both triangle halves populated so row-oriented
/// formulas read uniformly.
///
/// Invariants enforced at construction: non-negative weights, zero
/// diagonal (self-loops are rejected), unique non-empty labels, and a
/// symmetric matrix when `directed` is false. Values are immutable after
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    weights: Vec<f64>,
    n: usize,
    directed: bool,
}

impl Graph {
    /// Builds a graph from `(src, dst, weight)` triples; labels are
    /// registered in order of first appearance.
    pub fn from_edges<S: AsRef<str>>(
        directed: bool,
        edges: &[(S, S, f64)],
    ) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut labels: Vec<String> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let mut triples = Vec::with_capacity(edges.len());
        for (line0, (s, d, w)) in edges.iter().enumerate() {
            let line = line0 + 1;
            let (s, d) = (s.as_ref(), d.as_ref());
            if !w.is_finite() {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("non-finite weight {w}"),
                });
            }
            if *w < 0.0 {
                return Err(GraphError::NegativeWeight { line });
            }
            if s == d {
                return Err(GraphError::SelfLoop {
                    label: s.to_string(),
                    line,
                });
            }
            let mut id = |name: &str| -> usize {
                *index.entry(name.to_string()).or_insert_with(|| {
                    labels.push(name.to_string());
                    labels.len() - 1
                })
            };
            let (si, di) = (id(s), id(d));
            triples.push((si, di, *w, line));
        }
        let n = labels.len();
        let mut weights = vec![0.0; n * n];
        for (si, di, w, line) in triples {
            let occupied = weights[si * n + di] != 0.0
                || (!directed && weights[di * n + si] != 0.0);
            if occupied {
                return Err(GraphError::DuplicateEdge {
                    src: labels[si].clone(),
                    dst: labels[di].clone(),
                    line,
                });
            }
            weights[si * n + di] = w;
            if !directed {
                weights[di * n + si] = w;
            }
        }
        Ok(Graph {
            labels,
            weights,
            n,
            directed,
        })
    }

    /// Builds a graph from an explicit label list and a row-major weight
    /// matrix, validating every structural invariant.
    pub fn from_matrix(
        labels: Vec<String>,
        weights: Vec<f64>,
        directed: bool,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        if weights.len() != n * n {
            return Err(GraphError::BadMatrix(format!(
                "{} labels but {} weights",
                n,
                weights.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if l.is_empty() {
                return Err(GraphError::BadMatrix("empty label".into()));
            }
            if !seen.insert(l.clone()) {
                return Err(GraphError::DuplicateLabel { label: l.clone() });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let w = weights[i * n + j];
                if !w.is_finite() || w < 0.0 {
                    return Err(GraphError::BadMatrix(format!(
                        "invalid weight {w} at ({i},{j})"
                    )));
                }
            }
            if weights[i * n + i] != 0.0 {
                return Err(GraphError::SelfLoop {
                    label: labels[i].clone(),
                    line: i + 2,
                });
            }
        }
        if !directed {
            for i in 0..n {
                for j in (i + 1)..n {
                    if weights[i * n + j] != weights[j * n + i] {
                        return Err(GraphError::Asymmetric { i, j });
                    }
                }
            }
        }
        Ok(Graph {
            labels,
            weights,
            n,
            directed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Row `i` of the weight matrix (out-edge weights of actor `i`).
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    /// Weighted degree: the sum of incident edge weights under `mode`.
    /// For undirected graphs all modes agree. Panics if `i` is out of
    /// range, like any index access.
    pub fn degree(&self, i: usize, mode: DegreeMode) -> f64 {
        assert!(i < self.n, "actor index {i} out of range (n = {})", self.n);
        let out = || self.row(i).iter().sum::<f64>();
        let inn = || (0..self.n).map(|j| self.weight(j, i)).sum::<f64>();
        if !self.directed {
            return out();
        }
        match mode {
            DegreeMode::Out => out(),
            DegreeMode::In => inn(),
            DegreeMode::Total => inn() + out(),
        }
    }

    /// Unweighted degree: the number of incident edges under `mode`
    /// (nonzero weights counted once each). The engine's social value
    /// uses this variant.
    pub fn connection_count(&self, i: usize, mode: DegreeMode) -> usize {
        assert!(i < self.n, "actor index {i} out of range (n = {})", self.n);
        let out = || self.row(i).iter().filter(|w| **w != 0.0).count();
        let inn = || (0..self.n).filter(|&j| self.weight(j, i) != 0.0).count();
        if !self.directed {
            return out();
        }
        match mode {
            DegreeMode::Out => out(),
            DegreeMode::In => inn(),
            DegreeMode::Total => inn() + out(),
        }
    }

    /// Fraction of possible edges present: nonzero entries over
    /// `n(n-1)` when directed, nonzero unordered pairs over `n(n-1)/2`
    /// when undirected.
    pub fn density(&self) -> Result<f64, GraphError> {
        if self.n < 2 {
            return Err(GraphError::TooSmall);
        }
        let present = if self.directed {
            (0..self.n)
                .flat_map(|i| (0..self.n).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j && self.weight(i, j) != 0.0)
                .count()
        } else {
            (0..self.n)
                .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
                .filter(|&(i, j)| self.weight(i, j) != 0.0)
                .count()
        };
        let possible = if self.directed {
            self.n * (self.n - 1)
        } else {
            self.n * (self.n - 1) / 2
        };
        Ok(present as f64 / possible as f64)
    }

    /// Parses a graph from text in the given format. Directedness is the
    /// caller's declaration; undirected inputs are stored symmetrically.
    pub fn load(text: &str, format: GraphFormat, directed: bool) -> Result<Self, GraphError> {
        match format {
            GraphFormat::EdgeList => parse_edge_list(text, directed),
            GraphFormat::MatrixCsv => parse_matrix_csv(text, directed),
            GraphFormat::GmlSubset => parse_gml(text, directed),
        }
    }

    /// Serializes the graph so that [`Graph::load`] round-trips to an
    /// equal value.
    pub fn save(&self, format: GraphFormat) -> Result<String, GraphError> {
        match format {
            GraphFormat::EdgeList => self.to_edge_list(),
            GraphFormat::MatrixCsv => Ok(self.to_matrix_csv()),
            GraphFormat::GmlSubset => Ok(self.to_gml()),
        }
    }

    fn to_edge_list(&self) -> Result<String, GraphError> {
        for l in &self.labels {
            if l.chars().any(char::is_whitespace) {
                return Err(GraphError::UnserializableLabel(l.clone()));
            }
        }
        let mut out = String::new();
        for i in 0..self.n {
            let js: Box<dyn Iterator<Item = usize>> = if self.directed {
                Box::new(0..self.n)
            } else {
                Box::new(i + 1..self.n)
            };
            for j in js {
                let w = self.weight(i, j);
                if w != 0.0 {
                    out.push_str(&format!("{}\t{}\t{}\n", self.labels[i], self.labels[j], w));
                }
            }
        }
        Ok(out)
    }

    fn to_matrix_csv(&self) -> String {
        let mut out = self.labels.join(",");
        out.push('\n');
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|w| format!("{w}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn to_gml(&self) -> String {
        let mut out = String::from("graph [\n");
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("  node [ id {i} label \"{l}\" ]\n"));
        }
        for i in 0..self.n {
            let js: Box<dyn Iterator<Item = usize>> = if self.directed {
                Box::new(0..self.n)
            } else {
                Box::new(i + 1..self.n)
            };
            for j in js {
                let w = self.weight(i, j);
                if w != 0.0 {
                    out.push_str(&format!("  edge [ source {i} target {j} value {w} ]\n"));
                }
            }
        }
        out.push_str("]\n");
        out
    }
}

fn parse_edge_list(text: &str, directed: bool) -> Result<Graph, GraphError> {
    let mut edges: Vec<(String, String, f64)> = Vec::new();
    let mut line_of: Vec<usize> = Vec::new();
    for (line0, raw) in text.lines().enumerate() {
        let line = line0 + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(GraphError::Parse {
                line,
                msg: format!("expected `src dst [weight]`, found {} fields", fields.len()),
            });
        }
        let w = if fields.len() == 3 {
            fields[2].parse::<f64>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("weight `{}` is not a number", fields[2]),
            })?
        } else {
            1.0
        };
        if w < 0.0 {
            return Err(GraphError::NegativeWeight { line });
        }
        edges.push((fields[0].to_string(), fields[1].to_string(), w));
        line_of.push(line);
    }
    // Re-map construction errors to the source line they came from.
    Graph::from_edges(directed, &edges).map_err(|e| match e {
        GraphError::SelfLoop { label, line } => GraphError::SelfLoop {
            label,
            line: line_of[line - 1],
        },
        GraphError::DuplicateEdge { src, dst, line } => GraphError::DuplicateEdge {
            src,
            dst,
            line: line_of[line - 1],
        },
        GraphError::NegativeWeight { line } => GraphError::NegativeWeight {
            line: line_of[line - 1],
        },
        other => other,
    })
}

fn parse_matrix_csv(text: &str, directed: bool) -> Result<Graph, GraphError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(GraphError::Empty)?;
    let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let n = labels.len();
    let mut weights = vec![0.0; n * n];
    let mut rows_seen = 0;
    for (line0, raw) in lines {
        let line = line0 + 1;
        if rows_seen == n {
            return Err(GraphError::Parse {
                line,
                msg: format!("more than {n} weight rows"),
            });
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != n {
            return Err(GraphError::Parse {
                line,
                msg: format!("expected {n} columns, found {}", fields.len()),
            });
        }
        for (j, f) in fields.iter().enumerate() {
            let w = f.trim().parse::<f64>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("weight `{}` in column {} is not a number", f.trim(), j + 1),
            })?;
            if w < 0.0 {
                return Err(GraphError::NegativeWeight { line });
            }
            weights[rows_seen * n + j] = w;
        }
        rows_seen += 1;
    }
    if rows_seen != n {
        return Err(GraphError::Parse {
            line: 0,
            msg: format!("expected {n} weight rows, found {rows_seen}"),
        });
    }
    let g = Graph::from_matrix(labels, weights, directed)?;
    if g.weights.iter().all(|w| *w == 0.0) {
        return Err(GraphError::Empty);
    }
    Ok(g)
}

/// Tolerant reader for the GML subset: `node` and `edge` blocks with
/// `id`/`label` and `source`/`target`/`value` keys; anything else inside a
/// block is skipped.
fn parse_gml(text: &str, directed: bool) -> Result<Graph, GraphError> {
    // Tokenize: identifiers, numbers, quoted strings, brackets.
    let mut tokens: Vec<(usize, String)> = Vec::new();
    for (line0, raw) in text.lines().enumerate() {
        let line = line0 + 1;
        let mut rest = raw.trim();
        while !rest.is_empty() {
            if let Some(stripped) = rest.strip_prefix('"') {
                let end = stripped.find('"').ok_or(GraphError::Parse {
                    line,
                    msg: "unterminated string".into(),
                })?;
                tokens.push((line, format!("\"{}", &stripped[..end])));
                rest = stripped[end + 1..].trim_start();
            } else if let Some(stripped) = rest.strip_prefix('[') {
                tokens.push((line, "[".into()));
                rest = stripped.trim_start();
            } else if let Some(stripped) = rest.strip_prefix(']') {
                tokens.push((line, "]".into()));
                rest = stripped.trim_start();
            } else {
                let end = rest
                    .find(|c: char| c.is_whitespace() || c == '[' || c == ']' || c == '"')
                    .unwrap_or(rest.len());
                tokens.push((line, rest[..end].to_string()));
                rest = rest[end..].trim_start();
            }
        }
    }
    let mut pos = 0;
    let mut nodes: Vec<(i64, String)> = Vec::new();
    let mut edges: Vec<(usize, i64, i64, f64)> = Vec::new();
    while pos < tokens.len() {
        let (line, tok) = &tokens[pos];
        match tok.as_str() {
            "node" | "edge" => {
                let kind = tok.clone();
                let line = *line;
                pos += 1;
                if pos >= tokens.len() || tokens[pos].1 != "[" {
                    return Err(GraphError::Parse {
                        line,
                        msg: format!("`{kind}` not followed by `[`"),
                    });
                }
                pos += 1;
                let mut attrs: Vec<(String, String)> = Vec::new();
                while pos < tokens.len() && tokens[pos].1 != "]" {
                    let key = tokens[pos].1.clone();
                    pos += 1;
                    if pos >= tokens.len() {
                        return Err(GraphError::Parse {
                            line,
                            msg: format!("dangling key `{key}`"),
                        });
                    }
                    let val = tokens[pos].1.clone();
                    if val == "[" || val == "]" {
                        return Err(GraphError::Parse {
                            line,
                            msg: format!("key `{key}` has no value"),
                        });
                    }
                    pos += 1;
                    attrs.push((key, val));
                }
                if pos >= tokens.len() {
                    return Err(GraphError::Parse {
                        line,
                        msg: "unterminated block".into(),
                    });
                }
                pos += 1; // consume ]
                let get = |k: &str| attrs.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
                let unquote = |v: String| v.strip_prefix('"').map(str::to_string).unwrap_or(v);
                if kind == "node" {
                    let id: i64 = get("id")
                        .ok_or(GraphError::Parse {
                            line,
                            msg: "node without id".into(),
                        })?
                        .parse()
                        .map_err(|_| GraphError::Parse {
                            line,
                            msg: "node id is not an integer".into(),
                        })?;
                    let label = get("label").map(unquote).unwrap_or_else(|| id.to_string());
                    nodes.push((id, label));
                } else {
                    let want = |k: &str| -> Result<i64, GraphError> {
                        get(k)
                            .ok_or(GraphError::Parse {
                                line,
                                msg: format!("edge without {k}"),
                            })?
                            .parse()
                            .map_err(|_| GraphError::Parse {
                                line,
                                msg: format!("edge {k} is not an integer"),
                            })
                    };
                    let (s, t) = (want("source")?, want("target")?);
                    let w = match get("value") {
                        Some(v) => v.parse::<f64>().map_err(|_| GraphError::Parse {
                            line,
                            msg: "edge value is not a number".into(),
                        })?,
                        None => 1.0,
                    };
                    edges.push((line, s, t, w));
                }
            }
            _ => pos += 1,
        }
    }
    if edges.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut label_of = std::collections::HashMap::new();
    for (id, label) in &nodes {
        if label_of.insert(*id, label.clone()).is_some() {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!("duplicate node id {id}"),
            });
        }
    }
    let named: Vec<(String, String, f64)> = edges
        .iter()
        .map(|(line, s, t, w)| {
            let name = |id: i64| -> Result<String, GraphError> {
                label_of.get(&id).cloned().ok_or(GraphError::Parse {
                    line: *line,
                    msg: format!("edge references undeclared node {id}"),
                })
            };
            Ok((name(*s)?, name(*t)?, *w))
        })
        .collect::<Result<_, GraphError>>()?;
    // Preserve the declared node order for actors that have edges; GML
    // ids may be sparse, so go through labels.
    let mut ordered: Vec<(String, String, f64)> = Vec::new();
    let declared: Vec<String> = nodes.iter().map(|(_, l)| l.clone()).collect();
    let mut seen = std::collections::HashSet::new();
    for l in &declared {
        if !seen.insert(l.clone()) {
            return Err(GraphError::DuplicateLabel { label: l.clone() });
        }
    }
    // from_edges registers labels in first-appearance order over the edge
    // stream; emitting zero-weight sentinel edges would corrupt the graph,
    // so instead sort edges by declared node order of the source.
    let rank: std::collections::HashMap<&String, usize> =
        declared.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let mut idx: Vec<usize> = (0..named.len()).collect();
    idx.sort_by_key(|&k| {
        (
            rank.get(&named[k].0).copied().unwrap_or(usize::MAX),
            rank.get(&named[k].1).copied().unwrap_or(usize::MAX),
        )
    });
    for k in idx {
        ordered.push(named[k].clone());
    }
    Graph::from_edges(directed, &ordered)
}

/// An ordered sequence of graph snapshots over one shared actor set,
/// consumed by the friends-forever affinity.
#[derive(Debug, Clone)]
pub struct TemporalGraph {
    slices: Vec<Graph>,
}

impl TemporalGraph {
    pub fn new(slices: Vec<Graph>) -> Result<Self, GraphError> {
        let first = slices.first().ok_or(GraphError::InconsistentSlices(
            "need at least one slice".into(),
        ))?;
        for (k, s) in slices.iter().enumerate().skip(1) {
            if s.n() != first.n() {
                return Err(GraphError::InconsistentSlices(format!(
                    "slice {k} has {} actors, slice 0 has {}",
                    s.n(),
                    first.n()
                )));
            }
            if s.labels() != first.labels() {
                return Err(GraphError::InconsistentSlices(format!(
                    "slice {k} labels differ from slice 0"
                )));
            }
        }
        Ok(TemporalGraph { slices })
    }

    pub fn slices(&self) -> &[Graph] {
        &self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }
}
