//! Spectral segregation scoring: row-normalized transition view, per-community
//! submatrices, dominant eigenpairs, and category assignment.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::community::CommunityPartition;
use crate::error::{Error, Result};
use crate::graph::{CoauthorGraph, NodeId};

/// Row sums of the full graph's weight matrix, defining the row-stochastic
/// transition matrix w(i,j)/row_sum(i) over non-isolated nodes.
pub struct TransitionView<'g> {
    graph: &'g CoauthorGraph,
    row_sum: Vec<f64>,
}

impl<'g> TransitionView<'g> {
    pub fn new(graph: &'g CoauthorGraph) -> Self {
        let row_sum = (0..graph.n_nodes())
            .map(|v| graph.neighbors(v).iter().map(|&(_, w)| w).sum())
            .collect();
        Self { graph, row_sum }
    }

    pub fn row_sum(&self, node: NodeId) -> f64 {
        self.row_sum[node]
    }
}

/// Dense restriction of the transition matrix to one community's members.
///
/// Row i holds w(m_i, m_j)/row_sum(m_i); rows of members with only external
/// edges are all zero, and a row sums to 1 exactly when its member has no
/// external edges.
#[derive(Debug, Clone)]
pub struct CommunitySubmatrix {
    members: Vec<NodeId>,
    entries: Vec<f64>,
}

impl CommunitySubmatrix {
    pub fn from_entries(members: Vec<NodeId>, entries: Vec<f64>) -> Self {
        assert_eq!(members.len() * members.len(), entries.len());
        Self { members, entries }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.members.len() + j]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        let n = self.members.len();
        self.entries[i * n..(i + 1) * n].iter().sum()
    }
}

/// Restrict the transition matrix to `members`. Members must carry at least
/// one incident edge in the full graph; an isolated member is an error and
/// the community is reported instead of scored.
pub fn community_submatrix(
    t: &TransitionView<'_>,
    members: &[NodeId],
) -> Result<CommunitySubmatrix> {
    let mut members: Vec<NodeId> = members.to_vec();
    members.sort_unstable();
    let n = members.len();
    let local: HashMap<NodeId, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut entries = vec![0.0; n * n];
    for (i, &v) in members.iter().enumerate() {
        let rs = t.row_sum(v);
        if rs == 0.0 {
            return Err(Error::IsolatedNode(t.graph.id_of(v).to_string()));
        }
        for &(u, w) in t.graph.neighbors(v) {
            if let Some(&j) = local.get(&u) {
                entries[i * n + j] = w / rs;
            }
        }
    }
    Ok(CommunitySubmatrix { members, entries })
}

/// Dominant eigenpair of a non-negative matrix by power iteration.
///
/// Iterates on B + I from the uniform positive vector so bipartite spectra
/// (lambda and -lambda both extremal, as in any tree-shaped community) cannot
/// stall the iteration; the shift leaves eigenvectors unchanged and the
/// reported estimate is the plain Rayleigh quotient of B. Convergence is
/// declared when successive estimates differ by less than `tol`. Returns the
/// eigenvalue and the L1-normalized non-negative eigenvector.
pub fn dominant_eigenpair(
    b: &CommunitySubmatrix,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, Vec<f64>)> {
    let n = b.order();
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut prev = f64::INFINITY;
    for _ in 0..max_iter {
        for i in 0..n {
            let mut acc = x[i];
            let row = &b.entries[i * n..(i + 1) * n];
            for (j, &w) in row.iter().enumerate() {
                acc += w * x[j];
            }
            y[i] = acc;
        }
        // Rayleigh quotient of B itself: x'(B+I)x / x'x - 1.
        let num: f64 = x.iter().zip(&y).map(|(&xi, &yi)| xi * yi).sum();
        let den: f64 = x.iter().map(|&xi| xi * xi).sum();
        let estimate = num / den - 1.0;
        if (estimate - prev).abs() < tol {
            let norm: f64 = x.iter().sum();
            let v = x.iter().map(|&xi| xi / norm).collect();
            return Ok((estimate, v));
        }
        prev = estimate;
        let norm: f64 = y.iter().sum();
        for i in 0..n {
            x[i] = y[i] / norm;
        }
    }
    Err(Error::NonConvergence {
        last_estimate: prev,
        iterations: max_iter,
    })
}

/// Vector norm used in the index denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsiNorm {
    /// Collapses the index to the dominant eigenvalue itself; whole
    /// disconnected components score exactly 1.
    L1,
    /// Literal evaluation with the Euclidean norm in the denominator.
    L2,
}

impl SsiNorm {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Self::L1),
            "l2" => Ok(Self::L2),
            other => Err(Error::Config(format!("unknown ssi norm {other}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::L1 => "l1",
            Self::L2 => "l2",
        }
    }
}

/// Eigen-iteration settings; defaults favour robustness on small matrices.
#[derive(Debug, Clone, Copy)]
pub struct SsiOptions {
    pub norm: SsiNorm,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SsiOptions {
    fn default() -> Self {
        Self {
            norm: SsiNorm::L1,
            tol: 1e-12,
            max_iter: 100_000,
        }
    }
}

/// Segregation index of one community submatrix: the eigenvalue-weighted
/// eigenvector mass over the chosen vector norm.
pub fn ssi(b: &CommunitySubmatrix, opts: &SsiOptions) -> Result<f64> {
    let (lambda, v) = dominant_eigenpair(b, opts.tol, opts.max_iter)?;
    match opts.norm {
        SsiNorm::L1 => Ok(lambda),
        SsiNorm::L2 => {
            let l2: f64 = v.iter().map(|&x| x * x).sum::<f64>().sqrt();
            let mass: f64 = v.iter().sum();
            Ok(lambda * mass / l2)
        }
    }
}

/// Segregation category of a community.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Category {
    NonSegregated,
    ModeratelySegregated,
    HighlySegregated,
    CompletelySegregated,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::NonSegregated => "non_segregated",
            Self::ModeratelySegregated => "moderately_segregated",
            Self::HighlySegregated => "highly_segregated",
            Self::CompletelySegregated => "completely_segregated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "non_segregated" => Some(Self::NonSegregated),
            "moderately_segregated" => Some(Self::ModeratelySegregated),
            "highly_segregated" => Some(Self::HighlySegregated),
            "completely_segregated" => Some(Self::CompletelySegregated),
            _ => None,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-community segregation result.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunitySsi {
    pub community: usize,
    pub size: usize,
    pub raw_ssi: f64,
    pub normalized_ssi: Option<f64>,
    pub category: Option<Category>,
    pub is_disconnected_component: bool,
    pub converged: bool,
}

/// A community that could not be scored, kept out of the statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SsiException {
    pub community: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SegregationReport {
    pub entries: Vec<CommunitySsi>,
    pub exceptions: Vec<SsiException>,
    pub mean: Option<f64>,
    pub stdev: Option<f64>,
    pub sigma_k: f64,
    pub degenerate_normalization: bool,
}

impl SegregationReport {
    pub fn entry(&self, community: usize) -> Option<&CommunitySsi> {
        self.entries.iter().find(|e| e.community == community)
    }

    /// Category lookup by community id; None for excluded communities.
    pub fn category_of(&self, community: usize) -> Option<Category> {
        self.entry(community).and_then(|e| e.category)
    }
}

/// Score every community of a partition. Communities equal to whole connected
/// components are pinned at SSI 1 without eigen computation; the rest are
/// scored independently (and in parallel) from the shared transition view.
pub fn ssi_all(g: &CoauthorGraph, p: &CommunityPartition, opts: &SsiOptions) -> SegregationReport {
    let comp_ids = g.component_ids();
    let mut comp_sizes: HashMap<usize, usize> = HashMap::new();
    for &c in &comp_ids {
        *comp_sizes.entry(c).or_insert(0) += 1;
    }
    let view = TransitionView::new(g);

    enum Outcome {
        Scored(CommunitySsi),
        Failed(SsiException),
    }

    let outcomes: Vec<Outcome> = p
        .communities
        .par_iter()
        .enumerate()
        .map(|(cid, members)| {
            let whole_component = {
                let first = comp_ids[members[0]];
                members.iter().all(|&v| comp_ids[v] == first) && comp_sizes[&first] == members.len()
            };
            if whole_component {
                return Outcome::Scored(CommunitySsi {
                    community: cid,
                    size: members.len(),
                    raw_ssi: 1.0,
                    normalized_ssi: None,
                    category: None,
                    is_disconnected_component: true,
                    converged: true,
                });
            }
            let sub = match community_submatrix(&view, members) {
                Ok(sub) => sub,
                Err(e) => {
                    return Outcome::Failed(SsiException {
                        community: cid,
                        reason: e.to_string(),
                    })
                }
            };
            match ssi(&sub, opts) {
                Ok(value) => Outcome::Scored(CommunitySsi {
                    community: cid,
                    size: members.len(),
                    raw_ssi: value,
                    normalized_ssi: None,
                    category: None,
                    is_disconnected_component: false,
                    converged: true,
                }),
                Err(e) => Outcome::Failed(SsiException {
                    community: cid,
                    reason: e.to_string(),
                }),
            }
        })
        .collect();

    let mut report = SegregationReport::default();
    for outcome in outcomes {
        match outcome {
            Outcome::Scored(entry) => report.entries.push(entry),
            Outcome::Failed(exception) => report.exceptions.push(exception),
        }
    }
    report
}

/// Min-max normalize the non-pinned scores, then cut categories at
/// `mean +/- k * stdev` of the normalized distribution (population stdev).
/// Pinned disconnected components stay at 1 as CompletelySegregated. A
/// degenerate distribution (all scores equal) leaves everything moderate.
pub fn normalize_and_categorize(
    mut report: SegregationReport,
    boundary_k: f64,
) -> Result<SegregationReport> {
    let scored: Vec<f64> = report
        .entries
        .iter()
        .filter(|e| !e.is_disconnected_component)
        .map(|e| e.raw_ssi)
        .collect();
    if scored.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 non-disconnected communities to normalize, have {}",
            scored.len()
        )));
    }
    let min = scored.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = scored.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let degenerate_range = min == max;

    let normalize = |raw: f64| {
        if degenerate_range {
            0.0
        } else {
            (raw - min) / (max - min)
        }
    };
    let normalized: Vec<f64> = scored.iter().map(|&r| normalize(r)).collect();
    let n = normalized.len() as f64;
    let mean = normalized.iter().sum::<f64>() / n;
    let variance = normalized.iter().map(|&v| (v - mean).powi(2)).sum::<f64>() / n;
    let stdev = variance.sqrt();

    let high_cut = mean + boundary_k * stdev;
    let low_cut = mean - boundary_k * stdev;
    for entry in &mut report.entries {
        if entry.is_disconnected_component {
            entry.normalized_ssi = Some(1.0);
            entry.category = Some(Category::CompletelySegregated);
            continue;
        }
        let v = normalize(entry.raw_ssi);
        entry.normalized_ssi = Some(v);
        entry.category = Some(if stdev == 0.0 {
            Category::ModeratelySegregated
        } else if v >= high_cut {
            Category::HighlySegregated
        } else if v <= low_cut {
            Category::NonSegregated
        } else {
            Category::ModeratelySegregated
        });
    }
    report.mean = Some(mean);
    report.stdev = Some(stdev);
    report.sigma_k = boundary_k;
    report.degenerate_normalization = degenerate_range || stdev == 0.0;
    Ok(report)
}

/// Rebuild report entries from the CSV written by [`write_report`].
/// Distribution stats live in the separate stats file and are not restored.
pub fn read_report<R: std::io::BufRead>(reader: R) -> Result<SegregationReport> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let mut report = SegregationReport::default();
    for (i, row) in csv_reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let err = |message: String| Error::Parse { line, message };
        if row.len() != 7 {
            return Err(err(format!("expected 7 columns, got {}", row.len())));
        }
        report.entries.push(CommunitySsi {
            community: row[0].parse().map_err(|e| err(format!("community: {e}")))?,
            size: row[1].parse().map_err(|e| err(format!("size: {e}")))?,
            raw_ssi: row[2].parse().map_err(|e| err(format!("raw_ssi: {e}")))?,
            normalized_ssi: if row[3].is_empty() {
                None
            } else {
                Some(
                    row[3]
                        .parse()
                        .map_err(|e| err(format!("normalized: {e}")))?,
                )
            },
            category: if row[4].is_empty() {
                None
            } else {
                Some(
                    Category::parse(&row[4])
                        .ok_or_else(|| err(format!("unknown category {:?}", &row[4])))?,
                )
            },
            is_disconnected_component: row[5]
                .parse()
                .map_err(|e| err(format!("is_disconnected: {e}")))?,
            converged: row[6].parse().map_err(|e| err(format!("converged: {e}")))?,
        });
    }
    Ok(report)
}

/// CSV export: one row per scored community.
pub fn write_report<W: Write>(
    report: &SegregationReport,
    mut writer: W,
    fmt: impl Fn(f64) -> String,
) -> Result<()> {
    writeln!(
        writer,
        "community_id,size,raw_ssi,normalized_ssi,category,is_disconnected,converged"
    )?;
    for e in &report.entries {
        writeln!(
            writer,
            "{},{},{},{},{},{},{}",
            e.community,
            e.size,
            fmt(e.raw_ssi),
            e.normalized_ssi.map(&fmt).unwrap_or_default(),
            e.category.map(|c| c.as_str()).unwrap_or(""),
            e.is_disconnected_component,
            e.converged
        )?;
    }
    Ok(())
}
