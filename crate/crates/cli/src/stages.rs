//! Stage implementations. Every stage writes its declared CSV outputs plus a
//! `manifest_<stage>.json` into the output directory; all floats go through
//! the shared 12-significant-digit formatter so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use segnet_core::citations::{
    citation_profiles_with, cohort_cdf, read_profiles, write_cdf_series, write_profiles,
    CitationCounting, CitationProfile, CitationVariable, GroupBy, ProductivityBuckets,
};
use segnet_core::community::{
    fast_greedy_modularity, label_propagation, papers_per_community, partition_quality,
    read_partition, write_partition, CommunityPartition,
};
use segnet_core::cores::{
    build_community_graph, core_category_table, k_core_decomposition, read_coreness,
    write_core_table, write_coreness, CoreAssignment,
};
use segnet_core::corpus::{
    build_citation_index, filter_field, filter_field_year, parse_corpus, write_corpus,
    PublicationSet,
};
use segnet_core::fmt_sig12;
use segnet_core::graph::{
    build_graph, network_summary_with, CoauthorGraph, StrengthDivisor, WeightingScheme,
};
use segnet_core::segregation::{
    normalize_and_categorize, read_report, ssi_all, write_report, Category, SegregationReport,
    SsiNorm, SsiOptions,
};
use segnet_core::stats::{
    gaussian_kde_2d, histogram_pdf, ks_two_sample, mann_whitney_u, size_bins, zscore_vs_opposite,
    Alternative, TestMode, ZScoreOutcome, EXACT_SIZE_CAP, ZSCORE_MIN_REFERENCE,
};
use segnet_core::synth::{generate, write_sources, write_teams, SynthConfig};

use crate::manifest::{file_name_of, StageWriter};
use crate::{
    CitationsArgs, CompareArgs, CoresArgs, CorpusArgs, DetectArgs, GraphArgs, IngestArgs,
    PipelineArgs, SsiArgs, SynthArgs, WeightingArgs,
};

fn load_corpus(path: &Path) -> Result<PublicationSet> {
    let file = File::open(path).with_context(|| format!("opening corpus {}", path.display()))?;
    parse_corpus(BufReader::new(file)).with_context(|| format!("parsing corpus {}", path.display()))
}

fn parse_weighting(args: &WeightingArgs) -> Result<(WeightingScheme, StrengthDivisor)> {
    Ok((
        WeightingScheme::parse(&args.weighting)?,
        StrengthDivisor::parse(&args.strength_divisor)?,
    ))
}

fn focal_graph(
    set: &PublicationSet,
    corpus: &CorpusArgs,
    weighting: &WeightingArgs,
) -> Result<(PublicationSet, CoauthorGraph)> {
    let (scheme, divisor) = parse_weighting(weighting)?;
    let focal = filter_field_year(set, &corpus.field, corpus.year);
    let graph = build_graph(&focal, scheme, divisor);
    Ok((focal, graph))
}

fn corpus_config(args: &CorpusArgs) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("input".to_string(), file_name_of(&args.input)),
        ("field".to_string(), args.field.clone()),
        ("year".to_string(), args.year.to_string()),
    ])
}

fn weighting_config(config: &mut BTreeMap<String, String>, args: &WeightingArgs) {
    config.insert("weighting".into(), args.weighting.clone());
    config.insert("strength_divisor".into(), args.strength_divisor.clone());
}

pub fn ingest(args: &IngestArgs) -> Result<()> {
    let set = load_corpus(&args.corpus.input)?;
    let by_field = filter_field(&set, &args.corpus.field);
    let focal = filter_field_year(&set, &args.corpus.field, args.corpus.year);

    let mut stage = StageWriter::new(&args.out.out, "ingest")?;
    write_corpus(&by_field, stage.create("corpus_field.jsonl")?)?;
    write_corpus(&focal, stage.create("corpus_focal.jsonl")?)?;
    let mut stats = stage.create("ingest_stats.csv")?;
    writeln!(stats, "n_records,n_field_records,n_focal_records")?;
    writeln!(stats, "{},{},{}", set.len(), by_field.len(), focal.len())?;
    drop(stats);

    stage.finish(None, corpus_config(&args.corpus), &[&args.corpus.input])
}

pub fn graph(args: &GraphArgs) -> Result<()> {
    let set = load_corpus(&args.corpus.input)?;
    let (focal, g) = focal_graph(&set, &args.corpus, &args.weighting)?;
    let (_, divisor) = parse_weighting(&args.weighting)?;
    let summary = network_summary_with(&g, &focal, divisor);

    let mut stage = StageWriter::new(&args.out.out, "graph")?;
    g.write_edge_list(stage.create("edges.csv")?, fmt_sig12)?;
    let mut out = stage.create("network_summary.csv")?;
    writeln!(
        out,
        "n_nodes,n_edges,density,avg_clustering,avg_binary_degree,avg_weighted_degree,avg_strength_degree,n_components,lcc_size"
    )?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        summary.n_nodes,
        summary.n_edges,
        fmt_sig12(summary.density),
        fmt_sig12(summary.avg_clustering),
        fmt_sig12(summary.avg_binary_degree),
        fmt_sig12(summary.avg_weighted_degree),
        fmt_sig12(summary.avg_strength_degree),
        summary.n_components,
        summary.lcc_size
    )?;
    drop(out);

    let mut config = corpus_config(&args.corpus);
    weighting_config(&mut config, &args.weighting);
    stage.finish(None, config, &[&args.corpus.input])
}

fn detect_partition(
    g: &CoauthorGraph,
    algo: &str,
    seed: u64,
    max_sweeps: usize,
    partition_file: Option<&Path>,
) -> Result<CommunityPartition> {
    match algo {
        "labelprop" => Ok(label_propagation(g, seed, max_sweeps)),
        "fastgreedy" => Ok(fast_greedy_modularity(g).0),
        "external" => {
            let path = partition_file.context("--algo external requires --partition-file")?;
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            Ok(read_partition(g, BufReader::new(file))?)
        }
        other => bail!("unknown detection algorithm {other:?}"),
    }
}

pub fn detect(args: &DetectArgs) -> Result<()> {
    let set = load_corpus(&args.corpus.input)?;
    let (focal, g) = focal_graph(&set, &args.corpus, &args.weighting)?;
    let partition = detect_partition(
        &g,
        &args.algo,
        args.seed,
        args.max_sweeps,
        args.partition_file.as_deref(),
    )?;
    let quality = partition_quality(&g, &partition);
    let papers = papers_per_community(&focal, &g, &partition);

    let mut stage = StageWriter::new(&args.out.out, "detect")?;
    write_partition(&g, &partition, stage.create("partition.csv")?)?;
    let mut out = stage.create("partition_quality.csv")?;
    writeln!(
        out,
        "n_communities,n_connected_communities,n_strong_communities,mean_embeddedness,modularity,boundary_papers,converged"
    )?;
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        quality.n_communities,
        quality.n_connected_communities,
        quality.n_strong_communities,
        fmt_sig12(quality.mean_embeddedness),
        fmt_sig12(quality.modularity),
        papers.boundary,
        partition.converged
    )?;
    drop(out);
    let mut out = stage.create("papers_per_community.csv")?;
    writeln!(out, "community_id,n_papers")?;
    for (cid, &count) in papers.per_community.iter().enumerate() {
        writeln!(out, "{cid},{count}")?;
    }
    drop(out);

    let mut config = corpus_config(&args.corpus);
    weighting_config(&mut config, &args.weighting);
    config.insert("algo".into(), args.algo.clone());
    config.insert("max_sweeps".into(), args.max_sweeps.to_string());
    if let Some(p) = &args.partition_file {
        config.insert("partition_file".into(), file_name_of(p));
    }
    let mut inputs: Vec<&Path> = vec![&args.corpus.input];
    if let Some(p) = &args.partition_file {
        inputs.push(p);
    }
    stage.finish(Some(args.seed), config, &inputs)
}

fn load_partition(g: &CoauthorGraph, path: &Path) -> Result<CommunityPartition> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_partition(g, BufReader::new(file))?)
}

pub fn ssi(args: &SsiArgs) -> Result<()> {
    let set = load_corpus(&args.corpus.input)?;
    let (_, g) = focal_graph(&set, &args.corpus, &args.weighting)?;
    let partition = load_partition(&g, &args.partition_file)?;
    let opts = SsiOptions {
        norm: SsiNorm::parse(&args.ssi_norm)?,
        ..Default::default()
    };
    let report = ssi_all(&g, &partition, &opts);
    let report = normalize_and_categorize(report, args.sigma_k)?;

    let mut stage = StageWriter::new(&args.out.out, "ssi")?;
    write_report(&report, stage.create("ssi_report.csv")?, fmt_sig12)?;

    let mut out = stage.create("ssi_stats.csv")?;
    writeln!(
        out,
        "mean,stdev,sigma_k,n_communities,n_disconnected,n_exceptions,degenerate_normalization"
    )?;
    let n_disconnected = report
        .entries
        .iter()
        .filter(|e| e.is_disconnected_component)
        .count();
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        report.mean.map(fmt_sig12).unwrap_or_default(),
        report.stdev.map(fmt_sig12).unwrap_or_default(),
        fmt_sig12(report.sigma_k),
        report.entries.len(),
        n_disconnected,
        report.exceptions.len(),
        report.degenerate_normalization
    )?;
    drop(out);

    let mut out = stage.create("ssi_exceptions.csv")?;
    writeln!(out, "community_id,reason")?;
    for e in &report.exceptions {
        writeln!(out, "{},{}", e.community, e.reason.replace(',', ";"))?;
    }
    drop(out);

    // Normalized-score density over the eigen-scored communities (the pinned
    // disconnected ones all sit at 1).
    let scored: Vec<f64> = report
        .entries
        .iter()
        .filter(|e| !e.is_disconnected_component)
        .filter_map(|e| e.normalized_ssi)
        .collect();
    let mut out = stage.create("ssi_pdf.csv")?;
    writeln!(out, "bin_center,density")?;
    if !scored.is_empty() {
        let (centers, densities) = histogram_pdf(&scored, 50)?;
        for (c, d) in centers.iter().zip(&densities) {
            writeln!(out, "{},{}", fmt_sig12(*c), fmt_sig12(*d))?;
        }
    }
    drop(out);

    let mut config = corpus_config(&args.corpus);
    weighting_config(&mut config, &args.weighting);
    config.insert("partition_file".into(), file_name_of(&args.partition_file));
    config.insert("ssi_norm".into(), args.ssi_norm.clone());
    config.insert("sigma_k".into(), fmt_sig12(args.sigma_k));
    stage.finish(None, config, &[&args.corpus.input, &args.partition_file])
}

fn load_report(path: &Path) -> Result<SegregationReport> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_report(BufReader::new(file))?)
}

pub fn cores(args: &CoresArgs) -> Result<()> {
    let set = load_corpus(&args.corpus.input)?;
    let (_, g) = focal_graph(&set, &args.corpus, &args.weighting)?;
    let partition = load_partition(&g, &args.partition_file)?;
    let report = load_report(&args.ssi_file)?;
    let cg = build_community_graph(&g, &partition);
    let assignment = k_core_decomposition(&cg);
    let table = core_category_table(&assignment, &partition, &report);

    let mut stage = StageWriter::new(&args.out.out, "cores")?;
    let mut out = stage.create("community_graph.csv")?;
    writeln!(out, "community_a,community_b")?;
    for (a, b) in cg.edges() {
        writeln!(out, "{a},{b}")?;
    }
    drop(out);
    write_coreness(&assignment, stage.create("coreness.csv")?)?;
    write_core_table(&table, stage.create("core_table.csv")?, fmt_sig12)?;

    // Per-community metric sheet feeding the compare stage.
    let mut out = stage.create("community_metrics.csv")?;
    writeln!(
        out,
        "community_id,size,density,clustering,coreness,category,raw_ssi,normalized_ssi"
    )?;
    for (cid, members) in partition.communities.iter().enumerate() {
        let density = g
            .community_density(members)
            .map(fmt_sig12)
            .unwrap_or_default();
        let clustering = g
            .community_transitivity(members)
            .map(fmt_sig12)
            .unwrap_or_default();
        let entry = report.entry(cid);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            cid,
            members.len(),
            density,
            clustering,
            assignment.coreness[cid],
            entry
                .and_then(|e| e.category)
                .map(|c| c.as_str())
                .unwrap_or(""),
            entry.map(|e| fmt_sig12(e.raw_ssi)).unwrap_or_default(),
            entry
                .and_then(|e| e.normalized_ssi)
                .map(fmt_sig12)
                .unwrap_or_default()
        )?;
    }
    drop(out);

    let mut config = corpus_config(&args.corpus);
    weighting_config(&mut config, &args.weighting);
    config.insert("partition_file".into(), file_name_of(&args.partition_file));
    config.insert("ssi_file".into(), file_name_of(&args.ssi_file));
    stage.finish(
        None,
        config,
        &[&args.corpus.input, &args.partition_file, &args.ssi_file],
    )
}

pub fn citations(args: &CitationsArgs) -> Result<()> {
    let set = load_corpus(&args.corpus.input)?;
    let universe = filter_field(&set, &args.corpus.field);
    let (_, g) = focal_graph(&set, &args.corpus, &args.weighting)?;
    let partition = load_partition(&g, &args.partition_file)?;
    let report = load_report(&args.ssi_file)?;
    let cores_file = File::open(&args.cores_file)
        .with_context(|| format!("opening {}", args.cores_file.display()))?;
    let assignment: CoreAssignment = read_coreness(BufReader::new(cores_file))?;
    let idx = build_citation_index(&universe);
    let buckets = ProductivityBuckets::default();
    let counting = CitationCounting::parse(&args.citation_unit)?;

    let build = citation_profiles_with(
        &universe,
        &idx,
        &g,
        &partition,
        &report,
        &assignment,
        args.corpus.year,
        args.window_end,
        &buckets,
        counting,
    )?;
    let mut profiles = build.profiles;
    segnet_core::citations::sort_profiles(&mut profiles);

    let mut stage = StageWriter::new(&args.out.out, "citations")?;
    write_profiles(&profiles, stage.create("citation_profiles.csv")?, fmt_sig12)?;

    let groupings = [
        GroupBy {
            coreness: false,
            bucket: false,
        },
        GroupBy {
            coreness: true,
            bucket: false,
        },
        GroupBy {
            coreness: false,
            bucket: true,
        },
        GroupBy {
            coreness: true,
            bucket: true,
        },
    ];
    let mut blocks = Vec::new();
    for variable in CitationVariable::ALL {
        for group_by in groupings {
            blocks.push((variable, cohort_cdf(&profiles, variable, group_by, 5)));
        }
    }
    write_cdf_series(&blocks, stage.create("citation_cdf.csv")?, fmt_sig12)?;

    let mut out = stage.create("spearman.csv")?;
    writeln!(out, "rho,p_value,n_profiles,note")?;
    match segnet_core::citations::citation_productivity_correlation(&profiles) {
        Ok((rho, p)) => writeln!(
            out,
            "{},{},{},",
            fmt_sig12(rho),
            fmt_sig12(p),
            profiles.len()
        )?,
        Err(e) => writeln!(
            out,
            ",,{},{}",
            profiles.len(),
            e.to_string().replace(',', ";")
        )?,
    }
    drop(out);

    if !build.skipped.is_empty() {
        eprintln!(
            "segnet: skipped {} researchers in uncategorized communities",
            build.skipped.len()
        );
    }

    let mut config = corpus_config(&args.corpus);
    weighting_config(&mut config, &args.weighting);
    config.insert("partition_file".into(), file_name_of(&args.partition_file));
    config.insert("ssi_file".into(), file_name_of(&args.ssi_file));
    config.insert("cores_file".into(), file_name_of(&args.cores_file));
    config.insert("window_end".into(), args.window_end.to_string());
    config.insert("citation_unit".into(), args.citation_unit.clone());
    stage.finish(
        None,
        config,
        &[
            &args.corpus.input,
            &args.partition_file,
            &args.ssi_file,
            &args.cores_file,
        ],
    )
}

/// Rows of community_metrics.csv used by the compare stage.
struct MetricsRow {
    community: usize,
    size: usize,
    density: Option<f64>,
    clustering: Option<f64>,
    coreness: usize,
    category: Option<Category>,
    normalized_ssi: Option<f64>,
}

fn load_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));
    let mut rows = Vec::new();
    let opt = |s: &str| -> Option<f64> {
        if s.is_empty() {
            None
        } else {
            s.parse().ok()
        }
    };
    for record in reader.records() {
        let record = record?;
        rows.push(MetricsRow {
            community: record[0].parse()?,
            size: record[1].parse()?,
            density: opt(&record[2]),
            clustering: opt(&record[3]),
            coreness: record[4].parse()?,
            category: Category::parse(&record[5]),
            normalized_ssi: opt(&record[7]),
        });
    }
    Ok(rows)
}

fn load_bins_file(path: &Path) -> Result<Vec<usize>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut edges = Vec::new();
    for token in text.split([',', '\n', ' ']) {
        let token = token.trim();
        if !token.is_empty() {
            edges.push(
                token.parse::<usize>().with_context(|| {
                    format!("bad size-bin edge {token:?} in {}", path.display())
                })?,
            );
        }
    }
    if edges.is_empty() {
        bail!("bins file {} holds no edges", path.display());
    }
    Ok(edges)
}

pub fn compare(args: &CompareArgs) -> Result<()> {
    let profiles_file = File::open(&args.profiles)
        .with_context(|| format!("opening {}", args.profiles.display()))?;
    let profiles = read_profiles(BufReader::new(profiles_file))?;
    let metrics = load_metrics(&args.metrics)?;
    let override_edges = args.bins_file.as_deref().map(load_bins_file).transpose()?;

    let mut stage = StageWriter::new(&args.out.out, "compare")?;

    write_comparison_table(&profiles, stage.create("comparison.csv")?)?;
    write_zscores(
        &metrics,
        override_edges.as_deref(),
        stage.create("community_zscores.csv")?,
        stage.create("size_bins.csv")?,
    )?;
    write_kde_grids(&metrics, stage.create("kde_size_ssi.csv")?)?;

    let mut config = BTreeMap::from([
        ("profiles".to_string(), file_name_of(&args.profiles)),
        ("metrics".to_string(), file_name_of(&args.metrics)),
    ]);
    if let Some(p) = &args.bins_file {
        config.insert("bins_file".into(), file_name_of(p));
    }
    let mut inputs: Vec<&Path> = vec![&args.profiles, &args.metrics];
    if let Some(p) = &args.bins_file {
        inputs.push(p);
    }
    stage.finish(None, config, &inputs)
}

/// One row per (core, productivity range, variable): highly segregated vs
/// non-segregated researchers, KS and MW. Exact mode when the pooled sample
/// fits the enumeration cap.
fn write_comparison_table<W: Write>(profiles: &[CitationProfile], mut out: W) -> Result<()> {
    writeln!(
        out,
        "core,productivity_range,variable,ks_p,mw_p,ks_code,mw_code"
    )?;
    let mut cores: Vec<usize> = profiles
        .iter()
        .filter(|p| {
            matches!(
                p.category,
                Category::HighlySegregated | Category::NonSegregated
            )
        })
        .map(|p| p.coreness)
        .collect();
    cores.sort_unstable();
    cores.dedup();
    let buckets = ProductivityBuckets::default();

    for &core in &cores {
        for bucket in buckets.labels() {
            for variable in CitationVariable::ALL {
                let collect = |category: Category| -> Vec<f64> {
                    profiles
                        .iter()
                        .filter(|p| {
                            p.category == category
                                && p.coreness == core
                                && &p.productivity_bucket == bucket
                        })
                        .filter_map(|p| variable.value(p))
                        .collect()
                };
                let high = collect(Category::HighlySegregated);
                let non = collect(Category::NonSegregated);
                if high.is_empty() || non.is_empty() {
                    writeln!(out, "{core},{bucket},{},,,,", variable.as_str())?;
                    continue;
                }
                let mode = if high.len() + non.len() <= EXACT_SIZE_CAP {
                    TestMode::Exact
                } else {
                    TestMode::Asymptotic
                };
                let ks = ks_two_sample(&high, &non, mode)?;
                let mw = mann_whitney_u(&high, &non, mode, Alternative::TwoSided)?;
                writeln!(
                    out,
                    "{core},{bucket},{},{},{},{},{}",
                    variable.as_str(),
                    fmt_sig12(ks.p_value),
                    fmt_sig12(mw.p_value),
                    ks.significance_code,
                    mw.significance_code
                )?;
            }
        }
    }
    Ok(())
}

/// Size-controlled z-scores: each highly/non-segregated community's metric
/// against all opposite-category communities in the same size range.
fn write_zscores<W: Write>(
    metrics: &[MetricsRow],
    override_edges: Option<&[usize]>,
    mut out: W,
    mut bins_out: W,
) -> Result<()> {
    writeln!(out, "community_id,category,size_bin,metric,zscore,flag")?;
    writeln!(bins_out, "bin_index,lo,hi")?;
    let studied: Vec<&MetricsRow> = metrics
        .iter()
        .filter(|m| {
            matches!(
                m.category,
                Some(Category::HighlySegregated) | Some(Category::NonSegregated)
            )
        })
        .collect();
    if studied.is_empty() {
        return Ok(());
    }
    let sizes: Vec<usize> = studied.iter().map(|m| m.size).collect();
    let bins = size_bins(&sizes, 10, override_edges)?;
    for (i, &(lo, hi)) in bins.ranges.iter().enumerate() {
        writeln!(bins_out, "{i},{lo},{hi}")?;
    }

    let metric_of = |m: &MetricsRow, name: &str| -> Option<f64> {
        match name {
            "density" => m.density,
            "clustering" => m.clustering,
            "coreness" => Some(m.coreness as f64),
            "normalized_ssi" => m.normalized_ssi,
            _ => None,
        }
    };

    for row in &studied {
        let bin = bins.assign(row.size);
        let own_category = row.category.expect("studied rows are categorized");
        for metric in ["density", "clustering", "coreness", "normalized_ssi"] {
            let Some(value) = metric_of(row, metric) else {
                continue;
            };
            let reference: Vec<f64> = studied
                .iter()
                .filter(|other| other.category != row.category && bins.assign(other.size) == bin)
                .filter_map(|other| metric_of(other, metric))
                .collect();
            let outcome = zscore_vs_opposite(value, &reference, ZSCORE_MIN_REFERENCE);
            let (z, flag) = match outcome {
                ZScoreOutcome::Score(z) => (fmt_sig12(z), "ok"),
                ZScoreOutcome::InsufficientReference => (String::new(), "insufficient_reference"),
                ZScoreOutcome::DegenerateReference => (String::new(), "degenerate_reference"),
            };
            writeln!(
                out,
                "{},{},{},{metric},{z},{flag}",
                row.community,
                own_category.as_str(),
                bins.label(bin)
            )?;
        }
    }
    Ok(())
}

/// Long-format KDE grids of (normalized SSI, community size) per core and
/// category. Groups too small or with a degenerate axis are skipped.
fn write_kde_grids<W: Write>(metrics: &[MetricsRow], mut out: W) -> Result<()> {
    writeln!(out, "core,category,ssi,size,density")?;
    let mut cores: Vec<usize> = metrics.iter().map(|m| m.coreness).collect();
    cores.sort_unstable();
    cores.dedup();
    for &core in &cores {
        for category in [Category::HighlySegregated, Category::NonSegregated] {
            let points: Vec<(f64, f64)> = metrics
                .iter()
                .filter(|m| m.coreness == core && m.category == Some(category))
                .filter_map(|m| m.normalized_ssi.map(|s| (s, m.size as f64)))
                .collect();
            if points.len() < 2 {
                continue;
            }
            let Ok(grid) = gaussian_kde_2d(&points, None, 25) else {
                continue;
            };
            for (yi, &gy) in grid.ys.iter().enumerate() {
                for (xi, &gx) in grid.xs.iter().enumerate() {
                    writeln!(
                        out,
                        "{core},{},{},{},{}",
                        category.as_str(),
                        fmt_sig12(gx),
                        fmt_sig12(gy),
                        fmt_sig12(grid.at(xi, yi))
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn parse_range(text: &str, flag: &str) -> Result<(usize, usize)> {
    let (lo, hi) = text
        .split_once(':')
        .with_context(|| format!("--{flag} expects lo:hi, got {text:?}"))?;
    Ok((
        lo.trim()
            .parse()
            .with_context(|| format!("--{flag} low bound {lo:?}"))?,
        hi.trim()
            .parse()
            .with_context(|| format!("--{flag} high bound {hi:?}"))?,
    ))
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let config = SynthConfig {
        n_teams: args.teams,
        team_size_range: parse_range(&args.team_size, "team-size")?,
        papers_per_team_range: parse_range(&args.papers, "papers")?,
        authors_per_paper_range: parse_range(&args.authors, "authors")?,
        mixing: args.mixing,
        citation_rate: args.citation_rate,
        internal_citation_bias: args.internal_bias,
        seed: args.seed,
        focal_year: args.year,
        window_end: args.window_end,
        field: args.field.clone(),
    };
    let output = generate(&config)?;

    let mut stage = StageWriter::new(&args.out.out, "synth")?;
    write_corpus(&output.set, stage.create("corpus.jsonl")?)?;
    write_teams(&output, stage.create("teams.csv")?)?;
    write_sources(&output, stage.create("paper_sources.csv")?)?;

    let config_echo = BTreeMap::from([
        ("teams".to_string(), args.teams.to_string()),
        ("team_size".to_string(), args.team_size.clone()),
        ("papers".to_string(), args.papers.clone()),
        ("authors".to_string(), args.authors.clone()),
        ("mixing".to_string(), fmt_sig12(args.mixing)),
        ("citation_rate".to_string(), fmt_sig12(args.citation_rate)),
        ("internal_bias".to_string(), fmt_sig12(args.internal_bias)),
        ("field".to_string(), args.field.clone()),
        ("year".to_string(), args.year.to_string()),
        ("window_end".to_string(), args.window_end.to_string()),
    ]);
    stage.finish(Some(args.seed), config_echo, &[])
}

pub fn pipeline(args: &PipelineArgs) -> Result<()> {
    let out = &args.out.out;
    ingest(&IngestArgs {
        corpus: args.corpus.clone(),
        out: crate::OutArgs { out: out.clone() },
    })?;
    graph(&GraphArgs {
        corpus: args.corpus.clone(),
        weighting: args.weighting.clone(),
        out: crate::OutArgs { out: out.clone() },
    })?;
    detect(&DetectArgs {
        corpus: args.corpus.clone(),
        weighting: args.weighting.clone(),
        algo: args.algo.clone(),
        partition_file: args.partition_file.clone(),
        seed: args.seed,
        max_sweeps: args.max_sweeps,
        out: crate::OutArgs { out: out.clone() },
    })?;
    let partition_file = out.join("partition.csv");
    ssi(&SsiArgs {
        corpus: args.corpus.clone(),
        weighting: args.weighting.clone(),
        partition_file: partition_file.clone(),
        ssi_norm: args.ssi_norm.clone(),
        sigma_k: args.sigma_k,
        out: crate::OutArgs { out: out.clone() },
    })?;
    let ssi_file = out.join("ssi_report.csv");
    cores(&CoresArgs {
        corpus: args.corpus.clone(),
        weighting: args.weighting.clone(),
        partition_file: partition_file.clone(),
        ssi_file: ssi_file.clone(),
        out: crate::OutArgs { out: out.clone() },
    })?;
    citations(&CitationsArgs {
        corpus: args.corpus.clone(),
        weighting: args.weighting.clone(),
        partition_file,
        ssi_file,
        cores_file: out.join("coreness.csv"),
        window_end: args.window_end,
        citation_unit: args.citation_unit.clone(),
        out: crate::OutArgs { out: out.clone() },
    })?;
    compare(&CompareArgs {
        profiles: out.join("citation_profiles.csv"),
        metrics: out.join("community_metrics.csv"),
        bins_file: args.bins_file.clone(),
        out: crate::OutArgs { out: out.clone() },
    })?;

    let mut config = corpus_config(&args.corpus);
    weighting_config(&mut config, &args.weighting);
    config.insert("algo".into(), args.algo.clone());
    config.insert("max_sweeps".into(), args.max_sweeps.to_string());
    config.insert("ssi_norm".into(), args.ssi_norm.clone());
    config.insert("sigma_k".into(), fmt_sig12(args.sigma_k));
    config.insert("window_end".into(), args.window_end.to_string());
    config.insert("citation_unit".into(), args.citation_unit.clone());
    if let Some(p) = &args.bins_file {
        config.insert("bins_file".into(), file_name_of(p));
    }
    let stage = StageWriter::new(out, "pipeline")?;
    stage.finish(Some(args.seed), config, &[&args.corpus.input])
}
