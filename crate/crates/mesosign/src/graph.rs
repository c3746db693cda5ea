use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};

/// Edge-list dialect accepted by the loaders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeListFormat {
    /// Whitespace-separated `src dst weight` lines.
    Plain,
    /// Comma-separated lines with an optional `source,target,weight` header.
    Csv,
}

/// A directed signed graph as read from disk, before symmetrization.
///
/// Arc weights keep their original magnitude; only their sign matters for the
/// undirected reduction. Self-loops are dropped on ingest and counted.
#[derive(Debug, Clone)]
pub struct DirectedSignedGraph {
    node_count: usize,
    arcs: Vec<(u32, u32, f64)>,
    labels: Vec<String>,
    dropped_self_loops: usize,
}

impl DirectedSignedGraph {
    pub fn new(node_count: usize, arcs: Vec<(u32, u32, f64)>) -> Result<Self> {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Self::with_labels(node_count, arcs, labels, 0)
    }

    pub(crate) fn with_labels(
        node_count: usize,
        arcs: Vec<(u32, u32, f64)>,
        labels: Vec<String>,
        dropped_self_loops: usize,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(arcs.len());
        for &(s, t, w) in &arcs {
            if s as usize >= node_count || t as usize >= node_count {
                return Err(Error::validation(format!("arc ({s},{t}) out of range")));
            }
            if s == t {
                return Err(Error::validation(format!("self-loop at node {s}")));
            }
            if w == 0.0 {
                return Err(Error::validation(format!("zero-weight arc ({s},{t})")));
            }
            if !seen.insert((s, t)) {
                return Err(Error::validation(format!("duplicate arc ({s},{t})")));
            }
        }
        Ok(Self {
            node_count,
            arcs,
            labels,
            dropped_self_loops,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &[(u32, u32, f64)] {
        &self.arcs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of self-loop lines dropped while loading.
    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }
}

/// A simple undirected signed graph: at most one edge per node pair, each
/// carrying sign +1 or -1. The universal input object of the toolkit.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    node_count: usize,
    edges: Vec<(u32, u32, i8)>,
    adj: Vec<Vec<(u32, i8)>>,
    labels: Vec<String>,
    l_pos: usize,
    l_neg: usize,
}

impl SignedGraph {
    pub fn new(node_count: usize, mut edges: Vec<(u32, u32, i8)>) -> Result<Self> {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Self::with_labels_inner(node_count, &mut edges, labels)
    }

    pub(crate) fn with_labels(
        node_count: usize,
        mut edges: Vec<(u32, u32, i8)>,
        labels: Vec<String>,
    ) -> Result<Self> {
        Self::with_labels_inner(node_count, &mut edges, labels)
    }

    fn with_labels_inner(
        node_count: usize,
        edges: &mut Vec<(u32, u32, i8)>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if labels.len() != node_count {
            return Err(Error::validation("label table does not match node count"));
        }
        for e in edges.iter_mut() {
            if e.0 as usize >= node_count || e.1 as usize >= node_count {
                return Err(Error::validation(format!(
                    "edge ({},{}) out of range",
                    e.0, e.1
                )));
            }
            if e.0 == e.1 {
                return Err(Error::validation(format!("self-loop at node {}", e.0)));
            }
            if e.2 != 1 && e.2 != -1 {
                return Err(Error::validation(format!("sign must be +1 or -1: {}", e.2)));
            }
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::validation("duplicate edge"));
        }
        let mut adj = vec![Vec::new(); node_count];
        let mut l_pos = 0;
        let mut l_neg = 0;
        for &(u, v, s) in edges.iter() {
            adj[u as usize].push((v, s));
            adj[v as usize].push((u, s));
            if s > 0 {
                l_pos += 1;
            } else {
                l_neg += 1;
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self {
            node_count,
            edges: std::mem::take(edges),
            adj,
            labels,
            l_pos,
            l_neg,
        })
    }

    /// Convenience constructor for fixtures and doc examples.
    pub fn from_edges(node_count: usize, edges: &[(u32, u32, i8)]) -> Result<Self> {
        Self::new(node_count, edges.to_vec())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(u32, u32, i8)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn positive_edge_count(&self) -> usize {
        self.l_pos
    }

    pub fn negative_edge_count(&self) -> usize {
        self.l_neg
    }

    /// Neighbors of `u` with edge signs, sorted by neighbor id.
    pub fn neighbors(&self, u: u32) -> &[(u32, i8)] {
        &self.adj[u as usize]
    }

    pub fn degree(&self, u: u32) -> usize {
        self.adj[u as usize].len()
    }

    /// Sign of the edge {u,v}, if present.
    pub fn edge_sign(&self, u: u32, v: u32) -> Option<i8> {
        self.adj[u as usize]
            .binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| self.adj[u as usize][i].1)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, u: u32) -> &str {
        &self.labels[u as usize]
    }

    /// Inverse of the label table: original label -> compact node id.
    pub fn id_of(&self, label: &str) -> Option<u32> {
        self.labels.iter().position(|l| l == label).map(|i| i as u32)
    }

    /// Returns a new graph with every edge sign negated.
    pub fn sign_flipped(&self) -> SignedGraph {
        let edges = self.edges.iter().map(|&(u, v, s)| (u, v, -s)).collect();
        SignedGraph::with_labels(self.node_count, edges, self.labels.clone())
            .expect("flipping signs preserves validity")
    }
}

/// Descriptive statistics of a signed graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub l: usize,
    pub l_pos: usize,
    pub l_neg: usize,
    /// L-/L+; `None` (serialized as null) when the graph has no positive edges.
    pub neg_pos_ratio: Option<f64>,
    pub mean_degree: f64,
    pub density: f64,
}

fn tokenize(line: &str, format: EdgeListFormat) -> Vec<String> {
    // Both dialects tolerate the other separator; `format` mainly reflects
    // how the file was declared (e.g. a .csv extension).
    let _ = format;
    if line.contains(',') {
        line.split(',').map(|t| t.trim().to_string()).collect()
    } else {
        line.split_whitespace().map(|t| t.to_string()).collect()
    }
}

fn is_header(tokens: &[String]) -> bool {
    tokens.len() == 3
        && tokens[0].eq_ignore_ascii_case("source")
        && tokens[1].eq_ignore_ascii_case("target")
        && tokens[2].eq_ignore_ascii_case("weight")
}

struct ParsedLines {
    labels: Vec<String>,
    /// (line number, src id, dst id, weight)
    rows: Vec<(usize, u32, u32, f64)>,
    dropped_self_loops: usize,
}

fn parse_lines(text: &str, format: EdgeListFormat) -> Result<ParsedLines> {
    let mut label_ids: HashMap<String, u32> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    let mut dropped = 0usize;
    let intern = |tok: &str, labels: &mut Vec<String>, map: &mut HashMap<String, u32>| -> u32 {
        if let Some(&id) = map.get(tok) {
            return id;
        }
        let id = labels.len() as u32;
        labels.push(tok.to_string());
        map.insert(tok.to_string(), id);
        id
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let tokens = tokenize(line, format);
        if is_header(&tokens) {
            continue;
        }
        if tokens.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 3 fields, found {}", tokens.len()),
            ));
        }
        let weight: f64 = tokens[2]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad weight '{}'", tokens[2])))?;
        if weight == 0.0 {
            return Err(Error::parse(line_no, "zero weight"));
        }
        if !weight.is_finite() {
            return Err(Error::parse(line_no, "non-finite weight"));
        }
        let s = intern(&tokens[0], &mut labels, &mut label_ids);
        let t = intern(&tokens[1], &mut labels, &mut label_ids);
        if s == t {
            dropped += 1;
            continue;
        }
        rows.push((line_no, s, t, weight));
    }
    Ok(ParsedLines {
        labels,
        rows,
        dropped_self_loops: dropped,
    })
}

/// Parses a directed signed edge list.
///
/// Input labels are remapped to contiguous ids in order of first appearance;
/// the original labels are retained on the graph for reporting. Self-loops
/// are dropped (and counted), zero weights and duplicate ordered pairs are
/// rejected.
pub fn load_edge_list(text: &str, format: EdgeListFormat) -> Result<DirectedSignedGraph> {
    let parsed = parse_lines(text, format)?;
    let mut seen = HashSet::with_capacity(parsed.rows.len());
    let mut arcs = Vec::with_capacity(parsed.rows.len());
    for &(line_no, s, t, w) in &parsed.rows {
        if !seen.insert((s, t)) {
            return Err(Error::parse(
                line_no,
                format!(
                    "duplicate arc {} -> {}",
                    parsed.labels[s as usize], parsed.labels[t as usize]
                ),
            ));
        }
        arcs.push((s, t, w));
    }
    DirectedSignedGraph::with_labels(
        parsed.labels.len(),
        arcs,
        parsed.labels,
        parsed.dropped_self_loops,
    )
}

/// Parses an edge list whose lines already describe undirected edges.
///
/// Each line becomes one signed edge (weights binarized to their sign);
/// duplicate unordered pairs are rejected. Also returns the number of
/// dropped self-loop lines.
pub fn load_undirected_edge_list(
    text: &str,
    format: EdgeListFormat,
) -> Result<(SignedGraph, usize)> {
    let parsed = parse_lines(text, format)?;
    let mut seen = HashSet::with_capacity(parsed.rows.len());
    let mut edges = Vec::with_capacity(parsed.rows.len());
    for &(line_no, s, t, w) in &parsed.rows {
        let key = (s.min(t), s.max(t));
        if !seen.insert(key) {
            return Err(Error::parse(
                line_no,
                format!(
                    "duplicate undirected edge {{{},{}}}",
                    parsed.labels[s as usize], parsed.labels[t as usize]
                ),
            ));
        }
        edges.push((s, t, if w > 0.0 { 1 } else { -1 }));
    }
    let graph = SignedGraph::with_labels(parsed.labels.len(), edges, parsed.labels)?;
    Ok((graph, parsed.dropped_self_loops))
}

/// Reduces a directed signed graph to a simple undirected signed graph.
///
/// Per unordered pair: opposite signs in the two directions give a negative
/// edge; otherwise the edge takes the sign of the weight sum. Weights are
/// binarized to +-1.
pub fn symmetrize(d: &DirectedSignedGraph) -> SignedGraph {
    let mut pair_weights: HashMap<(u32, u32), (f64, f64)> = HashMap::new();
    for &(s, t, w) in d.arcs() {
        let key = (s.min(t), s.max(t));
        let entry = pair_weights.entry(key).or_insert((0.0, 0.0));
        if s < t {
            entry.0 = w;
        } else {
            entry.1 = w;
        }
    }
    let mut edges: Vec<(u32, u32, i8)> = pair_weights
        .into_iter()
        .map(|((u, v), (w_uv, w_vu))| {
            let sign = if w_uv * w_vu < 0.0 {
                -1
            } else if w_uv + w_vu > 0.0 {
                1
            } else {
                -1
            };
            (u, v, sign)
        })
        .collect();
    edges.sort_unstable();
    SignedGraph::with_labels(d.node_count(), edges, d.labels().to_vec())
        .expect("symmetrization of a valid digraph is valid")
}

/// Induced subgraph on the largest connected component (sign-blind
/// connectivity), with node ids compacted. Ties between equally large
/// components go to the one containing the smallest original node id.
pub fn largest_connected_component(g: &SignedGraph) -> SignedGraph {
    let n = g.node_count();
    if n == 0 {
        return g.clone();
    }
    let mut component = vec![usize::MAX; n];
    let mut comp_sizes = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let cid = comp_sizes.len();
        let mut size = 0usize;
        let mut queue = VecDeque::from([start as u32]);
        component[start] = cid;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &(v, _) in g.neighbors(u) {
                if component[v as usize] == usize::MAX {
                    component[v as usize] = cid;
                    queue.push_back(v);
                }
            }
        }
        comp_sizes.push(size);
    }
    // Components are discovered in order of their smallest node id, so the
    // first maximal one implements the tie-break rule.
    let best = comp_sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap();
    let mut new_id = vec![u32::MAX; n];
    let mut labels = Vec::new();
    let mut next = 0u32;
    for u in 0..n {
        if component[u] == best {
            new_id[u] = next;
            labels.push(g.label(u as u32).to_string());
            next += 1;
        }
    }
    let edges = g
        .edges()
        .iter()
        .filter(|&&(u, v, _)| component[u as usize] == best && component[v as usize] == best)
        .map(|&(u, v, s)| (new_id[u as usize], new_id[v as usize], s))
        .collect();
    SignedGraph::with_labels(next as usize, edges, labels)
        .expect("induced subgraph of a valid graph is valid")
}

/// Node/edge counts, sign ratio, mean degree, and density.
pub fn descriptive_stats(g: &SignedGraph) -> GraphStats {
    let n = g.node_count();
    let l = g.edge_count();
    let density = if n >= 2 {
        2.0 * l as f64 / (n as f64 * (n as f64 - 1.0))
    } else {
        0.0
    };
    GraphStats {
        n,
        l,
        l_pos: g.positive_edge_count(),
        l_neg: g.negative_edge_count(),
        neg_pos_ratio: if g.positive_edge_count() > 0 {
            Some(g.negative_edge_count() as f64 / g.positive_edge_count() as f64)
        } else {
            None
        },
        mean_degree: if n > 0 { 2.0 * l as f64 / n as f64 } else { 0.0 },
        density,
    }
}
