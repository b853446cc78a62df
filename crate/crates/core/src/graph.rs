//! Weighted undirected coauthorship graphs and their structural metrics.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::PublicationSet;
use crate::error::{Error, Result};

/// How the link between two coauthors is weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingScheme {
    /// Weight 1 iff the pair shares at least one publication.
    Binary,
    /// Number of common publications.
    Count,
    /// Sum over common publications of a fractional credit per paper.
    Strength,
}

impl WeightingScheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(Self::Binary),
            "count" => Ok(Self::Count),
            "strength" => Ok(Self::Strength),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Binary => "binary",
            Self::Count => "count",
            Self::Strength => "strength",
        }
    }
}

/// Per-paper divisor used by the strength scheme.
///
/// `CoauthorsMinusOne` makes every multi-author paper contribute exactly 1 to
/// each author's strength degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrengthDivisor {
    CoauthorsMinusOne,
    Coauthors,
}

impl StrengthDivisor {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "n-1" => Ok(Self::CoauthorsMinusOne),
            "n" => Ok(Self::Coauthors),
            other => Err(Error::UnknownScheme(format!("strength divisor {other}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CoauthorsMinusOne => "n-1",
            Self::Coauthors => "n",
        }
    }
}

pub type NodeId = usize;

/// Undirected weighted graph over researcher ids.
///
/// Nodes are interned to dense indices in lexicographic id order; adjacency
/// lists are sorted by neighbor. Every author appearing in the source set is
/// a node, including authors of single-author papers (isolated nodes).
#[derive(Debug, Clone)]
pub struct CoauthorGraph {
    ids: Vec<String>,
    index: HashMap<String, NodeId>,
    adj: Vec<Vec<(NodeId, f64)>>,
    strengths: Vec<f64>,
    n_edges: usize,
    scheme: WeightingScheme,
}

/// Edge weights are accumulated as integer counts per unit-fraction
/// denominator, so node strengths divide out exactly: a node's strength under
/// the n-1 divisor is the integer number of its multi-author papers, with no
/// floating-point drift.
type UnitWeight = BTreeMap<u64, u64>;

fn unit_to_f64(units: &UnitWeight) -> f64 {
    units.iter().map(|(&d, &c)| c as f64 / d as f64).sum()
}

pub fn build_graph(
    set: &PublicationSet,
    scheme: WeightingScheme,
    divisor: StrengthDivisor,
) -> CoauthorGraph {
    let mut ids: Vec<String> = set
        .records()
        .iter()
        .flat_map(|r| r.authors.iter().cloned())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let index: HashMap<String, NodeId> = ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();

    let mut edge_units: HashMap<(NodeId, NodeId), UnitWeight> = HashMap::new();
    for rec in set.records() {
        let k = rec.authors.len();
        if k < 2 {
            continue;
        }
        let denom: u64 = match scheme {
            WeightingScheme::Binary | WeightingScheme::Count => 1,
            WeightingScheme::Strength => match divisor {
                StrengthDivisor::CoauthorsMinusOne => (k - 1) as u64,
                StrengthDivisor::Coauthors => k as u64,
            },
        };
        let members: Vec<NodeId> = rec.authors.iter().map(|a| index[a]).collect();
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let key = (members[i].min(members[j]), members[i].max(members[j]));
                *edge_units.entry(key).or_default().entry(denom).or_insert(0) += 1;
            }
        }
    }

    let n = ids.len();
    let mut adj: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); n];
    let mut node_units: Vec<UnitWeight> = vec![UnitWeight::new(); n];
    let mut n_edges = 0;
    for ((a, b), mut units) in edge_units {
        if scheme == WeightingScheme::Binary {
            units = UnitWeight::from([(1, 1)]);
        }
        let w = unit_to_f64(&units);
        adj[a].push((b, w));
        adj[b].push((a, w));
        for (&d, &c) in &units {
            *node_units[a].entry(d).or_insert(0) += c;
            *node_units[b].entry(d).or_insert(0) += c;
        }
        n_edges += 1;
    }
    for list in &mut adj {
        list.sort_unstable_by_key(|&(nbr, _)| nbr);
    }
    let strengths = node_units.iter().map(unit_to_f64).collect();

    CoauthorGraph {
        ids,
        index,
        adj,
        strengths,
        n_edges,
        scheme,
    }
}

impl CoauthorGraph {
    pub fn n_nodes(&self) -> usize {
        self.ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn scheme(&self) -> WeightingScheme {
        self.scheme
    }

    pub fn id_of(&self, node: NodeId) -> &str {
        &self.ids[node]
    }

    pub fn node_of(&self, id: &str) -> Option<NodeId> {
        self.index.get(id).copied()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, f64)] {
        &self.adj[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adj[node].len()
    }

    /// Total incident weight, accumulated exactly at build time.
    pub fn strength(&self, node: NodeId) -> f64 {
        self.strengths[node]
    }

    pub fn weight(&self, a: NodeId, b: NodeId) -> f64 {
        self.adj[a]
            .binary_search_by_key(&b, |&(nbr, _)| nbr)
            .map(|pos| self.adj[a][pos].1)
            .unwrap_or(0.0)
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adj[a]
            .binary_search_by_key(&b, |&(nbr, _)| nbr)
            .is_ok()
    }

    /// Connected components as node lists, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<NodeId>> {
        let n = self.n_nodes();
        let mut comp = vec![usize::MAX; n];
        let mut components = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let cid = components.len();
            let mut members = Vec::new();
            comp[start] = cid;
            stack.push(start);
            while let Some(v) = stack.pop() {
                members.push(v);
                for &(u, _) in &self.adj[v] {
                    if comp[u] == usize::MAX {
                        comp[u] = cid;
                        stack.push(u);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    /// Component id per node, matching the order of [`Self::connected_components`].
    pub fn component_ids(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n_nodes()];
        for (cid, members) in self.connected_components().iter().enumerate() {
            for &v in members {
                comp[v] = cid;
            }
        }
        comp
    }

    /// Local clustering coefficient on the binarized graph; 0 for degree < 2.
    pub fn local_clustering(&self, node: NodeId) -> f64 {
        let nbrs = &self.adj[node];
        let d = nbrs.len();
        if d < 2 {
            return 0.0;
        }
        let mut links = 0usize;
        for i in 0..d {
            for j in (i + 1)..d {
                if self.has_edge(nbrs[i].0, nbrs[j].0) {
                    links += 1;
                }
            }
        }
        2.0 * links as f64 / (d * (d - 1)) as f64
    }

    /// Induced subgraph over string ids, preserving weights.
    pub fn subgraph(&self, members: &[String]) -> Result<CoauthorGraph> {
        let nodes: Vec<NodeId> = members
            .iter()
            .map(|id| {
                self.node_of(id)
                    .ok_or_else(|| Error::MissingNode(id.clone()))
            })
            .collect::<Result<_>>()?;
        Ok(self.subgraph_by_nodes(&nodes))
    }

    /// Induced subgraph over node indices (indices must be valid).
    pub fn subgraph_by_nodes(&self, members: &[NodeId]) -> CoauthorGraph {
        let mut members: Vec<NodeId> = members.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut ids: Vec<String> = members.iter().map(|&v| self.ids[v].clone()).collect();
        ids.sort_unstable();
        let index: HashMap<String, NodeId> = ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let old_to_new: HashMap<NodeId, NodeId> =
            members.iter().map(|&v| (v, index[&self.ids[v]])).collect();
        let n = ids.len();
        let mut adj: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); n];
        let mut strengths = vec![0.0; n];
        let mut n_edges = 0;
        for &v in &members {
            let nv = old_to_new[&v];
            for &(u, w) in &self.adj[v] {
                if let Some(&nu) = old_to_new.get(&u) {
                    adj[nv].push((nu, w));
                    strengths[nv] += w;
                    if nv < nu {
                        n_edges += 1;
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(nbr, _)| nbr);
        }
        CoauthorGraph {
            ids,
            index,
            adj,
            strengths,
            n_edges,
            scheme: self.scheme,
        }
    }

    /// Internal binarized edge density of a member set.
    pub fn community_density(&self, members: &[NodeId]) -> Result<f64> {
        let k = members.len();
        if k < 2 {
            return Err(Error::UndefinedMetric(format!(
                "density needs at least 2 members, got {k}"
            )));
        }
        let inside: std::collections::HashSet<NodeId> = members.iter().copied().collect();
        let mut internal = 0usize;
        for &v in members {
            for &(u, _) in &self.adj[v] {
                if u > v && inside.contains(&u) {
                    internal += 1;
                }
            }
        }
        Ok(internal as f64 / (k * (k - 1) / 2) as f64)
    }

    /// Global transitivity of the induced binarized subgraph:
    /// 3 * triangles / connected triplets, 0 when no triplets exist.
    pub fn community_transitivity(&self, members: &[NodeId]) -> Result<f64> {
        let k = members.len();
        if k < 3 {
            return Err(Error::UndefinedMetric(format!(
                "transitivity needs at least 3 members, got {k}"
            )));
        }
        let inside: std::collections::HashSet<NodeId> = members.iter().copied().collect();
        let mut triangles = 0usize;
        let mut triplets = 0usize;
        for &v in members {
            let nbrs: Vec<NodeId> = self.adj[v]
                .iter()
                .map(|&(u, _)| u)
                .filter(|u| inside.contains(u))
                .collect();
            let d = nbrs.len();
            if d < 2 {
                continue;
            }
            triplets += d * (d - 1) / 2;
            for i in 0..d {
                for j in (i + 1)..d {
                    if self.has_edge(nbrs[i], nbrs[j]) {
                        triangles += 1;
                    }
                }
            }
        }
        if triplets == 0 {
            return Ok(0.0);
        }
        // Each triangle is seen once per corner, so the count is already
        // 3 * (distinct triangles).
        Ok(triangles as f64 / triplets as f64)
    }

    /// Edge list CSV: `source_id,target_id,weight`, lexicographically smaller
    /// id first, rows sorted.
    pub fn write_edge_list<W: Write>(
        &self,
        mut writer: W,
        fmt: impl Fn(f64) -> String,
    ) -> Result<()> {
        writeln!(writer, "source_id,target_id,weight")?;
        let mut rows: Vec<(&str, &str, f64)> = Vec::with_capacity(self.n_edges);
        for v in 0..self.n_nodes() {
            for &(u, w) in &self.adj[v] {
                if v < u {
                    let (a, b) = if self.ids[v] <= self.ids[u] {
                        (self.ids[v].as_str(), self.ids[u].as_str())
                    } else {
                        (self.ids[u].as_str(), self.ids[v].as_str())
                    };
                    rows.push((a, b, w));
                }
            }
        }
        rows.sort_unstable_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        for (a, b, w) in rows {
            writeln!(
                writer,
                "{},{},{}",
                crate::csv_escape(a),
                crate::csv_escape(b),
                fmt(w)
            )?;
        }
        Ok(())
    }
}

/// Network-level descriptive metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkSummary {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub density: f64,
    pub avg_clustering: f64,
    pub avg_binary_degree: f64,
    pub avg_weighted_degree: f64,
    pub avg_strength_degree: f64,
    pub n_components: usize,
    pub lcc_size: usize,
}

/// Summarize `g` together with the count- and strength-weighted degree means
/// recomputed from the source set, using `divisor` for the strength view.
pub fn network_summary_with(
    g: &CoauthorGraph,
    set: &PublicationSet,
    divisor: StrengthDivisor,
) -> NetworkSummary {
    let n = g.n_nodes();
    let e = g.n_edges();
    let density = if n >= 2 {
        2.0 * e as f64 / (n as f64 * (n as f64 - 1.0))
    } else {
        0.0
    };
    let avg_clustering = if n == 0 {
        0.0
    } else {
        (0..n).map(|v| g.local_clustering(v)).sum::<f64>() / n as f64
    };
    let avg_binary_degree = if n == 0 {
        0.0
    } else {
        2.0 * e as f64 / n as f64
    };

    let count_graph = build_graph(set, WeightingScheme::Count, divisor);
    let strength_graph = build_graph(set, WeightingScheme::Strength, divisor);
    let mean_strength = |gr: &CoauthorGraph| {
        if gr.n_nodes() == 0 {
            0.0
        } else {
            (0..gr.n_nodes()).map(|v| gr.strength(v)).sum::<f64>() / gr.n_nodes() as f64
        }
    };

    let components = g.connected_components();
    let lcc_size = components.iter().map(Vec::len).max().unwrap_or(0);

    NetworkSummary {
        n_nodes: n,
        n_edges: e,
        density,
        avg_clustering,
        avg_binary_degree,
        avg_weighted_degree: mean_strength(&count_graph),
        avg_strength_degree: mean_strength(&strength_graph),
        n_components: components.len(),
        lcc_size,
    }
}

pub fn network_summary(g: &CoauthorGraph, set: &PublicationSet) -> NetworkSummary {
    network_summary_with(g, set, StrengthDivisor::CoauthorsMinusOne)
}
