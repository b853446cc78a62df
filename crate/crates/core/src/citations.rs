//! Per-researcher citation variables grouped by segregation category, core
//! position, and productivity.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::community::CommunityPartition;
use crate::cores::CoreAssignment;
use crate::corpus::{CitationIndex, PublicationSet};
use crate::error::{Error, Result};
use crate::graph::CoauthorGraph;
use crate::segregation::{Category, SegregationReport};
use crate::stats::ecdf;

/// Productivity ranges over focal-year paper counts. The default follows the
/// 1-5 / 6-10 / >10 split; alternative inclusive ranges can be configured and
/// the last range is open-ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductivityBuckets {
    ranges: Vec<(usize, Option<usize>)>,
    labels: Vec<String>,
}

impl Default for ProductivityBuckets {
    fn default() -> Self {
        Self {
            ranges: vec![(1, Some(5)), (6, Some(10)), (11, None)],
            labels: vec!["1-5".into(), "6-10".into(), ">10".into()],
        }
    }
}

impl ProductivityBuckets {
    /// Buckets from ascending lower edges, e.g. [1, 9, 81, 92].
    pub fn from_lower_edges(edges: &[usize]) -> Result<Self> {
        if edges.is_empty() || edges[0] == 0 || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "bucket edges must be ascending and start at >= 1".into(),
            ));
        }
        let mut ranges = Vec::with_capacity(edges.len());
        let mut labels = Vec::with_capacity(edges.len());
        for (i, &lo) in edges.iter().enumerate() {
            if i + 1 < edges.len() {
                let hi = edges[i + 1] - 1;
                ranges.push((lo, Some(hi)));
                labels.push(format!("{lo}-{hi}"));
            } else {
                ranges.push((lo, None));
                labels.push(format!(">{}", lo - 1));
            }
        }
        Ok(Self { ranges, labels })
    }

    pub fn label_of(&self, n_pubs: usize) -> Result<&str> {
        if n_pubs == 0 {
            return Err(Error::UndefinedBucket);
        }
        for (i, &(lo, hi)) in self.ranges.iter().enumerate() {
            if n_pubs >= lo && hi.is_none_or(|h| n_pubs <= h) {
                return Ok(&self.labels[i]);
            }
        }
        Err(Error::UndefinedBucket)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Default bucket label for a focal-year paper count.
pub fn productivity_bucket(n_pubs: usize) -> Result<String> {
    ProductivityBuckets::default()
        .label_of(n_pubs)
        .map(str::to_string)
}

/// What one citation event is when tallying a researcher's citations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CitationCounting {
    /// A citing paper counts once per cited researcher, however many of
    /// their papers it cites.
    #[default]
    PerResearcher,
    /// A citing paper counts once per cited paper.
    PerPaper,
}

impl CitationCounting {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "researcher" => Ok(Self::PerResearcher),
            "paper" => Ok(Self::PerPaper),
            other => Err(Error::Config(format!("unknown citation unit {other}"))),
        }
    }
}

/// Citation variables for one researcher. Proportions are undefined (None)
/// when the researcher received no citations.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationProfile {
    pub researcher_id: String,
    pub n_pubs_focal_year: usize,
    pub total_citations: usize,
    pub citations_per_paper: f64,
    pub prop_same_community: Option<f64>,
    pub prop_coauthors: Option<f64>,
    /// Variant that does not count the researcher themself as a coauthor
    /// match (drops pure self-citations).
    pub prop_coauthors_excl_self: Option<f64>,
    pub category: Category,
    pub coreness: usize,
    pub productivity_bucket: String,
}

#[derive(Debug, Clone, Default)]
pub struct ProfileBuild {
    pub profiles: Vec<CitationProfile>,
    /// Researchers skipped because their community carries no category.
    pub skipped: Vec<String>,
}

/// Build one profile per graph node (researchers with focal-year papers in
/// the studied communities).
///
/// `set` is the citation universe: it must contain the focal-year papers and
/// the later citing papers. A citing paper dated within
/// `focal_year..=window_end` counts once per cited researcher, regardless of
/// how many of that researcher's papers it cites.
#[allow(clippy::too_many_arguments)]
pub fn citation_profiles(
    set: &PublicationSet,
    idx: &CitationIndex,
    g: &CoauthorGraph,
    p: &CommunityPartition,
    sr: &SegregationReport,
    ca: &CoreAssignment,
    focal_year: i32,
    window_end: i32,
    buckets: &ProductivityBuckets,
) -> Result<ProfileBuild> {
    citation_profiles_with(
        set,
        idx,
        g,
        p,
        sr,
        ca,
        focal_year,
        window_end,
        buckets,
        CitationCounting::PerResearcher,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn citation_profiles_with(
    set: &PublicationSet,
    idx: &CitationIndex,
    g: &CoauthorGraph,
    p: &CommunityPartition,
    sr: &SegregationReport,
    ca: &CoreAssignment,
    focal_year: i32,
    window_end: i32,
    buckets: &ProductivityBuckets,
    counting: CitationCounting,
) -> Result<ProfileBuild> {
    if focal_year > window_end {
        return Err(Error::Config(format!(
            "focal year {focal_year} is after window end {window_end}"
        )));
    }
    // Focal-year papers per researcher node.
    let mut focal_papers: Vec<Vec<usize>> = vec![Vec::new(); g.n_nodes()];
    for (ri, rec) in set.records().iter().enumerate() {
        if rec.year != focal_year {
            continue;
        }
        for author in &rec.authors {
            if let Some(v) = g.node_of(author) {
                focal_papers[v].push(ri);
            }
        }
    }

    let results: Vec<std::result::Result<CitationProfile, String>> = (0..g.n_nodes())
        .into_par_iter()
        .filter(|&v| !focal_papers[v].is_empty())
        .map(|v| {
            let community = p.assignment[v];
            let Some(category) = sr.category_of(community) else {
                return Err(g.id_of(v).to_string());
            };
            let my_papers = &focal_papers[v];
            let n_pubs = my_papers.len();

            let mut coauthors: HashSet<&str> = HashSet::new();
            for &ri in my_papers {
                for author in &set.records()[ri].authors {
                    if author != g.id_of(v) {
                        coauthors.insert(author.as_str());
                    }
                }
            }

            // Citation events within the window: one per citing paper under
            // per-researcher counting, one per (citing, cited) pair under
            // per-paper counting.
            let mut citing: HashSet<&str> = HashSet::new();
            let mut events: Vec<&crate::corpus::PublicationRecord> = Vec::new();
            for &ri in my_papers {
                let cited_id = &set.records()[ri].paper_id;
                for rec in idx.citing(set, cited_id) {
                    if rec.year < focal_year || rec.year > window_end {
                        continue;
                    }
                    match counting {
                        CitationCounting::PerResearcher => {
                            if citing.insert(rec.paper_id.as_str()) {
                                events.push(rec);
                            }
                        }
                        CitationCounting::PerPaper => events.push(rec),
                    }
                }
            }
            let total = events.len();
            let mut n_same_community = 0usize;
            let mut n_coauthor = 0usize;
            let mut n_coauthor_excl_self = 0usize;
            for rec in &events {
                let mut same = false;
                let mut coauth = false;
                let mut coauth_excl = false;
                for author in &rec.authors {
                    if !same {
                        if let Some(u) = g.node_of(author) {
                            if p.assignment[u] == community {
                                same = true;
                            }
                        }
                    }
                    let is_self = author == g.id_of(v);
                    let is_coauthor = coauthors.contains(author.as_str());
                    if is_self || is_coauthor {
                        coauth = true;
                    }
                    if is_coauthor {
                        coauth_excl = true;
                    }
                }
                if same {
                    n_same_community += 1;
                }
                if coauth {
                    n_coauthor += 1;
                }
                if coauth_excl {
                    n_coauthor_excl_self += 1;
                }
            }

            let proportion = |num: usize| {
                if total == 0 {
                    None
                } else {
                    Some(num as f64 / total as f64)
                }
            };
            Ok(CitationProfile {
                researcher_id: g.id_of(v).to_string(),
                n_pubs_focal_year: n_pubs,
                total_citations: total,
                citations_per_paper: total as f64 / n_pubs as f64,
                prop_same_community: proportion(n_same_community),
                prop_coauthors: proportion(n_coauthor),
                prop_coauthors_excl_self: proportion(n_coauthor_excl_self),
                category,
                coreness: ca.coreness[community],
                productivity_bucket: buckets.label_of(n_pubs).expect("n_pubs >= 1").to_string(),
            })
        })
        .collect();

    let mut build = ProfileBuild::default();
    for r in results {
        match r {
            Ok(profile) => build.profiles.push(profile),
            Err(id) => build.skipped.push(id),
        }
    }
    Ok(build)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CitationVariable {
    TotalCitations,
    CitationsPerPaper,
    PropSameCommunity,
    PropCoauthors,
}

impl CitationVariable {
    pub const ALL: [CitationVariable; 4] = [
        Self::TotalCitations,
        Self::CitationsPerPaper,
        Self::PropSameCommunity,
        Self::PropCoauthors,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::TotalCitations => "total_citations",
            Self::CitationsPerPaper => "citations_per_paper",
            Self::PropSameCommunity => "prop_same_community",
            Self::PropCoauthors => "prop_coauthors",
        }
    }

    /// Value for one profile; None when undefined (proportions of uncited
    /// researchers are excluded rather than fabricated).
    pub fn value(self, profile: &CitationProfile) -> Option<f64> {
        match self {
            Self::TotalCitations => Some(profile.total_citations as f64),
            Self::CitationsPerPaper => Some(profile.citations_per_paper),
            Self::PropSameCommunity => profile.prop_same_community,
            Self::PropCoauthors => profile.prop_coauthors,
        }
    }
}

/// Optional grouping keys beyond the segregation category.
#[derive(Debug, Clone, Copy, Default)]
pub struct GroupBy {
    pub coreness: bool,
    pub bucket: bool,
}

/// Empirical CDF of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfSeries {
    pub category: Category,
    pub coreness: Option<usize>,
    pub bucket: Option<String>,
    pub n: usize,
    pub low_n: bool,
    pub points: Vec<(f64, f64)>,
}

/// Group profiles by category (optionally refined by coreness and bucket) and
/// compute each group's empirical CDF for `variable`. Groups smaller than
/// `min_n` are emitted but flagged.
pub fn cohort_cdf(
    profiles: &[CitationProfile],
    variable: CitationVariable,
    group_by: GroupBy,
    min_n: usize,
) -> Vec<CdfSeries> {
    type Key = (u8, Option<usize>, Option<String>);
    let mut groups: BTreeMap<Key, Vec<f64>> = BTreeMap::new();
    for profile in profiles {
        let key: Key = (
            category_rank(profile.category),
            group_by.coreness.then_some(profile.coreness),
            group_by.bucket.then(|| profile.productivity_bucket.clone()),
        );
        let entry = groups.entry(key).or_default();
        if let Some(v) = variable.value(profile) {
            entry.push(v);
        }
    }
    groups
        .into_iter()
        .map(|((cat, coreness, bucket), values)| CdfSeries {
            category: category_from_rank(cat),
            coreness,
            bucket,
            n: values.len(),
            low_n: values.len() < min_n,
            points: ecdf(&values),
        })
        .collect()
}

fn category_rank(c: Category) -> u8 {
    match c {
        Category::NonSegregated => 0,
        Category::ModeratelySegregated => 1,
        Category::HighlySegregated => 2,
        Category::CompletelySegregated => 3,
    }
}

fn category_from_rank(r: u8) -> Category {
    match r {
        0 => Category::NonSegregated,
        1 => Category::ModeratelySegregated,
        2 => Category::HighlySegregated,
        _ => Category::CompletelySegregated,
    }
}

/// Average ranks (1-based) with ties sharing their mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut idx = 0;
    while idx < n {
        let mut run = 1;
        while idx + run < n && values[order[idx + run]] == values[order[idx]] {
            run += 1;
        }
        let mean_rank = (idx + 1 + idx + run) as f64 / 2.0;
        for r in 0..run {
            ranks[order[idx + r]] = mean_rank;
        }
        idx += run;
    }
    ranks
}

/// Spearman rank correlation with average-rank ties and the t-approximation
/// for the two-sided p-value.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InsufficientData(
            "spearman needs >= 3 paired observations".into(),
        ));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for i in 0..x.len() {
        let dx = rx[i] - mean;
        let dy = ry[i] - mean;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "all values tied in one variable".into(),
        ));
    }
    let rho = cov / (var_x * var_y).sqrt();
    let p = if rho.abs() >= 1.0 {
        0.0
    } else {
        let t = rho * ((n - 2.0) / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, n - 2.0).expect("valid dof");
        2.0 * (1.0 - dist.cdf(t.abs()))
    };
    Ok((rho, p))
}

/// Spearman correlation between focal-year productivity and total citations.
pub fn citation_productivity_correlation(profiles: &[CitationProfile]) -> Result<(f64, f64)> {
    let x: Vec<f64> = profiles
        .iter()
        .map(|p| p.n_pubs_focal_year as f64)
        .collect();
    let y: Vec<f64> = profiles.iter().map(|p| p.total_citations as f64).collect();
    spearman(&x, &y)
}

pub fn write_profiles<W: Write>(
    profiles: &[CitationProfile],
    mut writer: W,
    fmt: impl Fn(f64) -> String,
) -> Result<()> {
    writeln!(
        writer,
        "researcher_id,n_pubs_focal_year,total_citations,citations_per_paper,prop_same_community,prop_coauthors,prop_coauthors_excl_self,category,coreness,productivity_bucket"
    )?;
    for p in profiles {
        let opt = |v: Option<f64>| v.map(&fmt).unwrap_or_default();
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{},{},{}",
            crate::csv_escape(&p.researcher_id),
            p.n_pubs_focal_year,
            p.total_citations,
            fmt(p.citations_per_paper),
            opt(p.prop_same_community),
            opt(p.prop_coauthors),
            opt(p.prop_coauthors_excl_self),
            p.category.as_str(),
            p.coreness,
            p.productivity_bucket
        )?;
    }
    Ok(())
}

pub fn write_cdf_series<W: Write>(
    blocks: &[(CitationVariable, Vec<CdfSeries>)],
    mut writer: W,
    fmt: impl Fn(f64) -> String,
) -> Result<()> {
    writeln!(
        writer,
        "variable,category,coreness,bucket,n,low_n,value,cdf"
    )?;
    for (variable, series) in blocks {
        for s in series {
            let coreness = s.coreness.map(|c| c.to_string()).unwrap_or_default();
            let bucket = s.bucket.clone().unwrap_or_default();
            for &(value, cdf) in &s.points {
                writeln!(
                    writer,
                    "{},{},{},{},{},{},{},{}",
                    variable.as_str(),
                    s.category.as_str(),
                    coreness,
                    bucket,
                    s.n,
                    s.low_n,
                    fmt(value),
                    fmt(cdf)
                )?;
            }
        }
    }
    Ok(())
}

/// Reconstruct profile rows from the CSV written by [`write_profiles`].
pub fn read_profiles<R: std::io::BufRead>(reader: R) -> Result<Vec<CitationProfile>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let mut out = Vec::new();
    let parse_opt = |s: &str| -> Option<f64> {
        if s.is_empty() {
            None
        } else {
            s.parse().ok()
        }
    };
    for (i, row) in csv_reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let err = |message: String| Error::Parse { line, message };
        if row.len() != 10 {
            return Err(err(format!("expected 10 columns, got {}", row.len())));
        }
        out.push(CitationProfile {
            researcher_id: row[0].to_string(),
            n_pubs_focal_year: row[1].parse().map_err(|e| err(format!("n_pubs: {e}")))?,
            total_citations: row[2].parse().map_err(|e| err(format!("total: {e}")))?,
            citations_per_paper: row[3].parse().map_err(|e| err(format!("cpp: {e}")))?,
            prop_same_community: parse_opt(&row[4]),
            prop_coauthors: parse_opt(&row[5]),
            prop_coauthors_excl_self: parse_opt(&row[6]),
            category: Category::parse(&row[7])
                .ok_or_else(|| err(format!("unknown category {:?}", &row[7])))?,
            coreness: row[8].parse().map_err(|e| err(format!("coreness: {e}")))?,
            productivity_bucket: row[9].to_string(),
        });
    }
    Ok(out)
}

/// Keep a profile list deterministic regardless of construction order.
pub fn sort_profiles(profiles: &mut [CitationProfile]) {
    profiles.sort_by(|a, b| a.researcher_id.cmp(&b.researcher_id));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::CommunityPartition;
    use crate::cores::CoreAssignment;
    use crate::corpus::{build_citation_index, PublicationRecord, PublicationSet};
    use crate::graph::{build_graph, StrengthDivisor, WeightingScheme};
    use crate::segregation::{CommunitySsi, SegregationReport};

    fn paper(id: &str, year: i32, authors: &[&str], cites: &[&str]) -> PublicationRecord {
        PublicationRecord {
            paper_id: id.into(),
            year,
            field: "CS".into(),
            authors: authors.iter().map(|s| s.to_string()).collect(),
            cited_paper_ids: cites.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn report_for(categories: &[Category]) -> SegregationReport {
        SegregationReport {
            entries: categories
                .iter()
                .enumerate()
                .map(|(i, &category)| CommunitySsi {
                    community: i,
                    size: 2,
                    raw_ssi: 0.5,
                    normalized_ssi: Some(0.5),
                    category: Some(category),
                    is_disconnected_component: false,
                    converged: true,
                })
                .collect(),
            ..Default::default()
        }
    }

    /// Two researchers a, b with 2 joint focal papers; 10 later papers cite
    /// p1, each by a same-community author (b is in the community).
    fn two_paper_fixture() -> (PublicationSet, CoauthorGraph) {
        let mut records = vec![
            paper("p1", 2011, &["a", "b"], &[]),
            paper("p2", 2011, &["a", "b"], &[]),
        ];
        for i in 0..10 {
            records.push(paper(&format!("c{i}"), 2012 + i % 3, &["b"], &["p1"]));
        }
        let set = PublicationSet::from_records(records).unwrap();
        let focal = crate::corpus::filter_field_year(&set, "CS", 2011);
        let g = build_graph(
            &focal,
            WeightingScheme::Strength,
            StrengthDivisor::CoauthorsMinusOne,
        );
        (set, g)
    }

    #[test]
    fn citations_per_paper_and_proportions() {
        let (set, g) = two_paper_fixture();
        let idx = build_citation_index(&set);
        let p = CommunityPartition::from_labels(&[0, 0], "manual", 0, true);
        let sr = report_for(&[Category::HighlySegregated]);
        let ca = CoreAssignment {
            coreness: vec![0],
            max_core: 0,
        };
        let build = citation_profiles(
            &set,
            &idx,
            &g,
            &p,
            &sr,
            &ca,
            2011,
            2020,
            &ProductivityBuckets::default(),
        )
        .unwrap();
        assert!(build.skipped.is_empty());
        let a = build
            .profiles
            .iter()
            .find(|x| x.researcher_id == "a")
            .unwrap();
        assert_eq!(a.n_pubs_focal_year, 2);
        assert_eq!(a.total_citations, 10);
        assert_eq!(a.citations_per_paper, 5.0);
        // Every citing paper is authored by b: same community and coauthor.
        assert_eq!(a.prop_same_community, Some(1.0));
        assert_eq!(a.prop_coauthors, Some(1.0));
        assert_eq!(a.prop_coauthors_excl_self, Some(1.0));
        // For b the citing papers are self-authored: coauthor under the
        // self-inclusive rule, not under the exclusive variant.
        let b = build
            .profiles
            .iter()
            .find(|x| x.researcher_id == "b")
            .unwrap();
        assert_eq!(b.prop_coauthors, Some(1.0));
        assert_eq!(b.prop_coauthors_excl_self, Some(0.0));
    }

    #[test]
    fn window_end_monotonicity() {
        let (set, g) = two_paper_fixture();
        let idx = build_citation_index(&set);
        let p = CommunityPartition::from_labels(&[0, 0], "manual", 0, true);
        let sr = report_for(&[Category::HighlySegregated]);
        let ca = CoreAssignment {
            coreness: vec![0],
            max_core: 0,
        };
        let mut previous = 0;
        for window_end in [2011, 2012, 2013, 2014, 2020] {
            let build = citation_profiles(
                &set,
                &idx,
                &g,
                &p,
                &sr,
                &ca,
                2011,
                window_end,
                &ProductivityBuckets::default(),
            )
            .unwrap();
            let a = build
                .profiles
                .iter()
                .find(|x| x.researcher_id == "a")
                .unwrap();
            assert!(a.total_citations >= previous);
            previous = a.total_citations;
        }
        assert_eq!(previous, 10);
    }

    #[test]
    fn one_event_per_citing_paper() {
        // q cites both of a's focal papers: one event per researcher, two
        // per paper.
        let records = vec![
            paper("p1", 2011, &["a"], &[]),
            paper("p2", 2011, &["a"], &[]),
            paper("q", 2012, &["z"], &["p1", "p2"]),
        ];
        let set = PublicationSet::from_records(records).unwrap();
        let focal = crate::corpus::filter_field_year(&set, "CS", 2011);
        let g = build_graph(
            &focal,
            WeightingScheme::Strength,
            StrengthDivisor::CoauthorsMinusOne,
        );
        let idx = build_citation_index(&set);
        let p = CommunityPartition::from_labels(&[0], "manual", 0, true);
        let sr = report_for(&[Category::ModeratelySegregated]);
        let ca = CoreAssignment {
            coreness: vec![0],
            max_core: 0,
        };
        let build = citation_profiles(
            &set,
            &idx,
            &g,
            &p,
            &sr,
            &ca,
            2011,
            2020,
            &ProductivityBuckets::default(),
        )
        .unwrap();
        assert_eq!(build.profiles[0].total_citations, 1);

        let per_paper = citation_profiles_with(
            &set,
            &idx,
            &g,
            &p,
            &sr,
            &ca,
            2011,
            2020,
            &ProductivityBuckets::default(),
            CitationCounting::PerPaper,
        )
        .unwrap();
        assert_eq!(per_paper.profiles[0].total_citations, 2);
        assert_eq!(per_paper.profiles[0].citations_per_paper, 1.0);
    }

    #[test]
    fn zero_citations_leave_proportions_undefined() {
        let records = vec![paper("p1", 2011, &["a", "b"], &[])];
        let set = PublicationSet::from_records(records).unwrap();
        let g = build_graph(
            &set,
            WeightingScheme::Strength,
            StrengthDivisor::CoauthorsMinusOne,
        );
        let idx = build_citation_index(&set);
        let p = CommunityPartition::from_labels(&[0, 0], "manual", 0, true);
        let sr = report_for(&[Category::NonSegregated]);
        let ca = CoreAssignment {
            coreness: vec![0],
            max_core: 0,
        };
        let build = citation_profiles(
            &set,
            &idx,
            &g,
            &p,
            &sr,
            &ca,
            2011,
            2020,
            &ProductivityBuckets::default(),
        )
        .unwrap();
        for profile in &build.profiles {
            assert_eq!(profile.total_citations, 0);
            assert_eq!(profile.prop_same_community, None);
        }
    }

    #[test]
    fn bucket_boundaries() {
        assert_eq!(productivity_bucket(5).unwrap(), "1-5");
        assert_eq!(productivity_bucket(6).unwrap(), "6-10");
        assert_eq!(productivity_bucket(10).unwrap(), "6-10");
        assert_eq!(productivity_bucket(11).unwrap(), ">10");
        assert!(matches!(
            productivity_bucket(0),
            Err(Error::UndefinedBucket)
        ));
    }

    #[test]
    fn custom_bucket_edges() {
        let buckets = ProductivityBuckets::from_lower_edges(&[1, 9, 81, 92]).unwrap();
        assert_eq!(buckets.label_of(8).unwrap(), "1-8");
        assert_eq!(buckets.label_of(9).unwrap(), "9-80");
        assert_eq!(buckets.label_of(91).unwrap(), "81-91");
        assert_eq!(buckets.label_of(92).unwrap(), ">91");
        assert!(ProductivityBuckets::from_lower_edges(&[0, 5]).is_err());
    }

    fn quick_profile(id: &str, category: Category, total: usize) -> CitationProfile {
        CitationProfile {
            researcher_id: id.into(),
            n_pubs_focal_year: 1,
            total_citations: total,
            citations_per_paper: total as f64,
            prop_same_community: if total > 0 { Some(0.5) } else { None },
            prop_coauthors: if total > 0 { Some(0.25) } else { None },
            prop_coauthors_excl_self: if total > 0 { Some(0.25) } else { None },
            category,
            coreness: 1,
            productivity_bucket: "1-5".into(),
        }
    }

    #[test]
    fn cdf_steps_per_group() {
        let profiles = vec![
            quick_profile("a", Category::NonSegregated, 1),
            quick_profile("b", Category::NonSegregated, 2),
            quick_profile("c", Category::NonSegregated, 3),
        ];
        let series = cohort_cdf(
            &profiles,
            CitationVariable::TotalCitations,
            GroupBy::default(),
            1,
        );
        assert_eq!(series.len(), 1);
        assert_eq!(
            series[0].points,
            vec![(1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0), (3.0, 1.0)]
        );
    }

    #[test]
    fn undefined_proportions_yield_empty_flagged_series() {
        let profiles = vec![quick_profile("a", Category::NonSegregated, 0)];
        let series = cohort_cdf(
            &profiles,
            CitationVariable::PropSameCommunity,
            GroupBy::default(),
            5,
        );
        assert_eq!(series.len(), 1);
        assert!(series[0].points.is_empty());
        assert!(series[0].low_n);
        // The same researchers do appear in the total-citations CDF with 0.
        let tc = cohort_cdf(
            &profiles,
            CitationVariable::TotalCitations,
            GroupBy::default(),
            5,
        );
        assert_eq!(tc[0].points, vec![(0.0, 1.0)]);
    }

    #[test]
    fn spearman_extremes_and_ties() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [10.0, 20.0, 30.0, 40.0];
        let (rho, p) = spearman(&x, &y).unwrap();
        assert_eq!(rho, 1.0);
        assert_eq!(p, 0.0);

        let reversed = [40.0, 30.0, 20.0, 10.0];
        let (rho, _) = spearman(&x, &reversed).unwrap();
        assert_eq!(rho, -1.0);

        // Hand-ranked tied data: x ranks {1, 2.5, 2.5, 4}, y ranks
        // {1.5, 1.5, 3, 4}; Pearson over the ranks gives 3.75/4.5 = 5/6.
        let xt = [1.0, 2.0, 2.0, 5.0];
        let yt = [3.0, 3.0, 4.0, 9.0];
        let (rho, _) = spearman(&xt, &yt).unwrap();
        assert!((rho - 5.0 / 6.0).abs() < 1e-12);

        let flat = [1.0, 1.0, 1.0, 1.0];
        assert!(matches!(
            spearman(&flat, &y),
            Err(Error::UndefinedCorrelation(_))
        ));
    }

    #[test]
    fn profiles_csv_round_trip() {
        let profiles = vec![
            quick_profile("a", Category::NonSegregated, 3),
            quick_profile("b", Category::HighlySegregated, 0),
        ];
        let mut buf = Vec::new();
        write_profiles(&profiles, &mut buf, |x| format!("{x}")).unwrap();
        let back = read_profiles(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, profiles);
    }
}
