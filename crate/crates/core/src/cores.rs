//! Community-level network and k-core placement.

use std::collections::HashSet;
use std::io::Write;

use crate::community::CommunityPartition;
use crate::error::Result;
use crate::graph::CoauthorGraph;
use crate::segregation::{Category, SegregationReport};

/// Unweighted graph with one node per community; an edge joins two
/// communities whenever any of their members share a coauthorship.
#[derive(Debug, Clone)]
pub struct CommunityGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    n_edges: usize,
}

impl CommunityGraph {
    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn neighbors(&self, c: usize) -> &[usize] {
        &self.adj[c]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_edges);
        for (c, nbrs) in self.adj.iter().enumerate() {
            for &d in nbrs {
                if c < d {
                    out.push((c, d));
                }
            }
        }
        out
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut seen = HashSet::new();
        let mut adj = vec![Vec::new(); n];
        let mut n_edges = 0;
        for &(a, b) in edges {
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            if seen.insert(key) {
                adj[a].push(b);
                adj[b].push(a);
                n_edges += 1;
            }
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        Self { n, adj, n_edges }
    }
}

pub fn build_community_graph(g: &CoauthorGraph, p: &CommunityPartition) -> CommunityGraph {
    let mut edges = Vec::new();
    for v in 0..g.n_nodes() {
        let cv = p.assignment[v];
        for &(u, _) in g.neighbors(v) {
            if v < u && p.assignment[u] != cv {
                edges.push((cv, p.assignment[u]));
            }
        }
    }
    CommunityGraph::from_edges(p.n_communities(), &edges)
}

/// Coreness per community from iterative minimum-degree peeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreAssignment {
    pub coreness: Vec<usize>,
    pub max_core: usize,
}

/// Bucket peeling: repeatedly remove the minimum-degree node, assigning it
/// the running core level. Isolated nodes get coreness 0.
pub fn k_core_decomposition(cg: &CommunityGraph) -> CoreAssignment {
    let n = cg.n_nodes();
    let mut degree: Vec<usize> = (0..n).map(|v| cg.neighbors(v).len()).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_deg + 1];
    for v in 0..n {
        buckets[degree[v]].push(v);
    }

    let mut coreness = vec![0usize; n];
    let mut removed = vec![false; n];
    let mut level = 0usize;
    let mut processed = 0usize;
    while processed < n {
        let mut d = 0;
        loop {
            // Buckets can hold stale entries whose degree has since dropped;
            // skip them.
            while let Some(&v) = buckets[d].last() {
                if removed[v] || degree[v] != d {
                    buckets[d].pop();
                } else {
                    break;
                }
            }
            if !buckets[d].is_empty() {
                break;
            }
            d += 1;
        }
        let v = buckets[d].pop().unwrap();
        level = level.max(d);
        coreness[v] = level;
        removed[v] = true;
        processed += 1;
        for &u in cg.neighbors(v) {
            if !removed[u] && degree[u] > 0 {
                degree[u] -= 1;
                buckets[degree[u]].push(u);
            }
        }
    }

    let max_core = coreness.iter().copied().max().unwrap_or(0);
    CoreAssignment { coreness, max_core }
}

/// One row of the per-core aggregate table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CoreRow {
    pub coreness: usize,
    pub n_researchers: usize,
    pub n_researchers_highly_segregated: usize,
    pub n_researchers_non_segregated: usize,
    pub n_communities: usize,
    pub avg_community_size: f64,
}

/// Aggregate researchers and communities per core level, split by
/// segregation category.
pub fn core_category_table(
    ca: &CoreAssignment,
    p: &CommunityPartition,
    sr: &SegregationReport,
) -> Vec<CoreRow> {
    let mut rows: Vec<CoreRow> = (0..=ca.max_core)
        .map(|k| CoreRow {
            coreness: k,
            n_researchers: 0,
            n_researchers_highly_segregated: 0,
            n_researchers_non_segregated: 0,
            n_communities: 0,
            avg_community_size: 0.0,
        })
        .collect();
    for (cid, members) in p.communities.iter().enumerate() {
        let row = &mut rows[ca.coreness[cid]];
        row.n_communities += 1;
        row.n_researchers += members.len();
        match sr.category_of(cid) {
            Some(Category::HighlySegregated) => {
                row.n_researchers_highly_segregated += members.len();
            }
            Some(Category::NonSegregated) => {
                row.n_researchers_non_segregated += members.len();
            }
            _ => {}
        }
    }
    for row in &mut rows {
        if row.n_communities > 0 {
            row.avg_community_size = row.n_researchers as f64 / row.n_communities as f64;
        }
    }
    rows
}

pub fn write_coreness<W: Write>(ca: &CoreAssignment, mut writer: W) -> Result<()> {
    writeln!(writer, "community_id,coreness")?;
    for (cid, &k) in ca.coreness.iter().enumerate() {
        writeln!(writer, "{cid},{k}")?;
    }
    Ok(())
}

/// Read the CSV written by [`write_coreness`]; rows must cover community ids
/// 0..n contiguously.
pub fn read_coreness<R: std::io::BufRead>(reader: R) -> Result<CoreAssignment> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, row) in csv_reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let err = |message: String| crate::error::Error::Parse { line, message };
        if row.len() != 2 {
            return Err(err(format!("expected 2 columns, got {}", row.len())));
        }
        pairs.push((
            row[0].parse().map_err(|e| err(format!("community: {e}")))?,
            row[1].parse().map_err(|e| err(format!("coreness: {e}")))?,
        ));
    }
    pairs.sort_unstable();
    let mut coreness = Vec::with_capacity(pairs.len());
    for (expected, (cid, k)) in pairs.into_iter().enumerate() {
        if cid != expected {
            return Err(crate::error::Error::Parse {
                line: 0,
                message: format!("coreness file misses community {expected}"),
            });
        }
        coreness.push(k);
    }
    let max_core = coreness.iter().copied().max().unwrap_or(0);
    Ok(CoreAssignment { coreness, max_core })
}

pub fn write_core_table<W: Write>(
    rows: &[CoreRow],
    mut writer: W,
    fmt: impl Fn(f64) -> String,
) -> Result<()> {
    writeln!(
        writer,
        "coreness,n_researchers,n_researchers_highly_segregated,n_researchers_non_segregated,n_communities,avg_community_size"
    )?;
    for r in rows {
        writeln!(
            writer,
            "{},{},{},{},{},{}",
            r.coreness,
            r.n_researchers,
            r.n_researchers_highly_segregated,
            r.n_researchers_non_segregated,
            r.n_communities,
            fmt(r.avg_community_size)
        )?;
    }
    Ok(())
}
