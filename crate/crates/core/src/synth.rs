//! Synthetic publication corpora with planted team structure, tunable
//! cross-team mixing, and labeled citation sources. Ground truth for every
//! downstream stage.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::corpus::{PublicationRecord, PublicationSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_teams: usize,
    pub team_size_range: (usize, usize),
    pub papers_per_team_range: (usize, usize),
    pub authors_per_paper_range: (usize, usize),
    /// Probability that a focal paper draws authors from two teams.
    pub mixing: f64,
    /// Mean citing papers per focal paper.
    pub citation_rate: f64,
    /// Probability that a citation is drawn from the cited team; the
    /// remainder splits evenly between coauthor-sourced and external.
    pub internal_citation_bias: f64,
    pub seed: u64,
    pub focal_year: i32,
    pub window_end: i32,
    pub field: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_teams: 10,
            team_size_range: (4, 8),
            papers_per_team_range: (4, 10),
            authors_per_paper_range: (2, 4),
            mixing: 0.0,
            citation_rate: 1.0,
            internal_citation_bias: 0.5,
            seed: 0,
            focal_year: 2011,
            window_end: 2020,
            field: "CS".into(),
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let check_range = |name: &str, (lo, hi): (usize, usize)| {
            if lo == 0 || lo > hi {
                Err(Error::Config(format!("{name} range ({lo}, {hi}) is empty")))
            } else {
                Ok(())
            }
        };
        if self.n_teams == 0 {
            return Err(Error::Config("need at least one team".into()));
        }
        check_range("team_size", self.team_size_range)?;
        check_range("papers_per_team", self.papers_per_team_range)?;
        check_range("authors_per_paper", self.authors_per_paper_range)?;
        if self.authors_per_paper_range.0 < 2 {
            return Err(Error::Config(
                "authors_per_paper must start at 2 so planted teams stay connected".into(),
            ));
        }
        if self.authors_per_paper_range.1 > self.team_size_range.0 {
            return Err(Error::Config(format!(
                "authors_per_paper up to {} exceeds the smallest team size {}",
                self.authors_per_paper_range.1, self.team_size_range.0
            )));
        }
        if !(0.0..=1.0).contains(&self.mixing) {
            return Err(Error::Config("mixing must be in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.internal_citation_bias) {
            return Err(Error::Config(
                "internal_citation_bias must be in [0, 1]".into(),
            ));
        }
        if self.citation_rate < 0.0 {
            return Err(Error::Config("citation_rate must be non-negative".into()));
        }
        if self.focal_year > self.window_end {
            return Err(Error::Config("focal_year is after window_end".into()));
        }
        if self.citation_rate > 0.0 && self.window_end == self.focal_year {
            return Err(Error::Config(
                "citations need window_end > focal_year".into(),
            ));
        }
        Ok(())
    }
}

/// Intended provenance of a citing paper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceLabel {
    SameTeam,
    Coauthor,
    External,
}

impl SourceLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SameTeam => "same_team",
            Self::Coauthor => "coauthor",
            Self::External => "external",
        }
    }
}

impl fmt::Display for SourceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub set: PublicationSet,
    /// Team of every researcher that appears in the corpus.
    pub team_of: BTreeMap<String, usize>,
    /// Intended source label per citing paper.
    pub paper_source: BTreeMap<String, SourceLabel>,
}

/// Generate a corpus. Deterministic given the seed. With `mixing = 0` every
/// planted team is a whole disconnected component of the focal-year graph:
/// team papers are drawn as overlapping windows over a shuffled member ring,
/// so consecutive papers share an author.
pub fn generate(config: &SynthConfig) -> Result<SynthOutput> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let team_members: Vec<Vec<String>> = (0..config.n_teams)
        .map(|t| {
            let size = rng.gen_range(config.team_size_range.0..=config.team_size_range.1);
            (0..size).map(|i| format!("t{t:03}_r{i:03}")).collect()
        })
        .collect();

    let mut records: Vec<PublicationRecord> = Vec::new();
    let mut paper_team: Vec<usize> = Vec::new();
    let mut paper_counter = 0usize;

    for team in 0..config.n_teams {
        let mut ring = team_members[team].clone();
        ring.shuffle(&mut rng);
        let n_papers =
            rng.gen_range(config.papers_per_team_range.0..=config.papers_per_team_range.1);
        let mut ptr = 0usize;
        for _ in 0..n_papers {
            let k =
                rng.gen_range(config.authors_per_paper_range.0..=config.authors_per_paper_range.1);
            let cross = config.mixing > 0.0 && rng.gen_bool(config.mixing);
            let authors: Vec<String> = if cross && config.n_teams > 1 {
                let mut partner = rng.gen_range(0..config.n_teams - 1);
                if partner >= team {
                    partner += 1;
                }
                let own_half = (k / 2).max(1);
                let partner_half = (k - own_half).max(1);
                let mut authors: Vec<String> = team_members[team]
                    .choose_multiple(&mut rng, own_half)
                    .cloned()
                    .collect();
                authors.extend(
                    team_members[partner]
                        .choose_multiple(&mut rng, partner_half)
                        .cloned(),
                );
                authors
            } else {
                let authors = (0..k)
                    .map(|o| ring[(ptr + o) % ring.len()].clone())
                    .collect();
                ptr = (ptr + k - 1) % ring.len();
                authors
            };
            records.push(PublicationRecord {
                paper_id: format!("p{paper_counter:05}"),
                year: config.focal_year,
                field: config.field.clone(),
                authors,
                cited_paper_ids: vec![],
            });
            paper_team.push(team);
            paper_counter += 1;
        }
    }

    let n_focal = records.len();
    let mut paper_source = BTreeMap::new();
    let mut citing_counter = 0usize;
    let mut external_counter = 0usize;
    if config.citation_rate > 0.0 {
        let poisson = Poisson::new(config.citation_rate)
            .map_err(|e| Error::Config(format!("bad citation rate: {e}")))?;
        for cited_idx in 0..n_focal {
            let n_cites = poisson.sample(&mut rng) as usize;
            for _ in 0..n_cites {
                let cited_id = records[cited_idx].paper_id.clone();
                let cited_authors = records[cited_idx].authors.clone();
                let team = paper_team[cited_idx];
                let draw: f64 = rng.gen();
                let label = if draw < config.internal_citation_bias {
                    SourceLabel::SameTeam
                } else if draw
                    < config.internal_citation_bias + (1.0 - config.internal_citation_bias) / 2.0
                {
                    SourceLabel::Coauthor
                } else {
                    SourceLabel::External
                };
                let authors: Vec<String> = match label {
                    SourceLabel::SameTeam => {
                        let members = &team_members[team];
                        let n = rng.gen_range(1..=members.len().min(3));
                        members.choose_multiple(&mut rng, n).cloned().collect()
                    }
                    SourceLabel::Coauthor => {
                        let n = rng.gen_range(1..=cited_authors.len());
                        cited_authors
                            .choose_multiple(&mut rng, n)
                            .cloned()
                            .collect()
                    }
                    SourceLabel::External => {
                        let n = rng.gen_range(1..=3);
                        (0..n)
                            .map(|_| {
                                let id = format!("x{external_counter:05}");
                                external_counter += 1;
                                id
                            })
                            .collect()
                    }
                };
                let year = rng.gen_range(config.focal_year + 1..=config.window_end);
                let paper_id = format!("c{citing_counter:05}");
                citing_counter += 1;
                paper_source.insert(paper_id.clone(), label);
                records.push(PublicationRecord {
                    paper_id,
                    year,
                    field: config.field.clone(),
                    authors,
                    cited_paper_ids: vec![cited_id],
                });
            }
        }
    }

    let mut team_of = BTreeMap::new();
    for rec in &records {
        for author in &rec.authors {
            if let Some(team_str) = author.strip_prefix('t') {
                if let Some((t, _)) = team_str.split_once("_r") {
                    if let Ok(team) = t.parse::<usize>() {
                        team_of.insert(author.clone(), team);
                    }
                }
            }
        }
    }

    Ok(SynthOutput {
        set: PublicationSet::from_records(records)?,
        team_of,
        paper_source,
    })
}

pub fn write_teams<W: Write>(out: &SynthOutput, mut writer: W) -> Result<()> {
    writeln!(writer, "researcher_id,team_id")?;
    for (id, team) in &out.team_of {
        writeln!(writer, "{},{team}", crate::csv_escape(id))?;
    }
    Ok(())
}

pub fn write_sources<W: Write>(out: &SynthOutput, mut writer: W) -> Result<()> {
    writeln!(writer, "paper_id,source_label")?;
    for (id, label) in &out.paper_source {
        writeln!(writer, "{id},{label}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::write_corpus;
    use crate::graph::{build_graph, StrengthDivisor, WeightingScheme};

    fn base_config() -> SynthConfig {
        SynthConfig {
            n_teams: 5,
            team_size_range: (4, 6),
            papers_per_team_range: (3, 6),
            authors_per_paper_range: (2, 4),
            mixing: 0.0,
            citation_rate: 1.0,
            internal_citation_bias: 0.5,
            seed: 11,
            focal_year: 2011,
            window_end: 2015,
            field: "CS".into(),
        }
    }

    #[test]
    fn zero_mixing_plants_teams_as_components() {
        let out = generate(&base_config()).unwrap();
        let focal = crate::corpus::filter_field_year(&out.set, "CS", 2011);
        let g = build_graph(
            &focal,
            WeightingScheme::Strength,
            StrengthDivisor::CoauthorsMinusOne,
        );
        let comps = g.connected_components();
        assert!(comps.len() >= 5);
        // Every component holds exactly one team.
        for comp in &comps {
            let teams: std::collections::HashSet<usize> =
                comp.iter().map(|&v| out.team_of[g.id_of(v)]).collect();
            assert_eq!(teams.len(), 1);
        }
        // And every team occupies exactly one component.
        let comp_ids = g.component_ids();
        for team in 0..5 {
            let comps_of_team: std::collections::HashSet<usize> = (0..g.n_nodes())
                .filter(|&v| out.team_of[g.id_of(v)] == team)
                .map(|v| comp_ids[v])
                .collect();
            assert_eq!(
                comps_of_team.len(),
                1,
                "team {team} split across components"
            );
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let config = SynthConfig {
            mixing: 0.3,
            ..base_config()
        };
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        write_corpus(&a.set, &mut buf_a).unwrap();
        write_corpus(&b.set, &mut buf_b).unwrap();
        assert_eq!(buf_a, buf_b);
        assert_eq!(a.team_of, b.team_of);
        assert_eq!(a.paper_source, b.paper_source);
    }

    #[test]
    fn full_bias_labels_everything_same_team() {
        let config = SynthConfig {
            internal_citation_bias: 1.0,
            ..base_config()
        };
        let out = generate(&config).unwrap();
        assert!(!out.paper_source.is_empty());
        assert!(out
            .paper_source
            .values()
            .all(|&l| l == SourceLabel::SameTeam));
    }

    #[test]
    fn citing_records_join_the_corpus() {
        let out = generate(&base_config()).unwrap();
        for paper_id in out.paper_source.keys() {
            let rec = out.set.get(paper_id).expect("citing record present");
            assert_eq!(rec.cited_paper_ids.len(), 1);
            assert!(out.set.contains(&rec.cited_paper_ids[0]));
            assert!(rec.year > 2011 && rec.year <= 2015);
        }
    }

    #[test]
    fn zero_citation_rate_is_allowed() {
        let config = SynthConfig {
            citation_rate: 0.0,
            window_end: 2011,
            ..base_config()
        };
        let out = generate(&config).unwrap();
        assert!(out.paper_source.is_empty());
        assert!(out.set.records().iter().all(|r| r.year == 2011));
    }

    #[test]
    fn infeasible_configs_are_rejected() {
        let too_many_authors = SynthConfig {
            authors_per_paper_range: (2, 9),
            team_size_range: (4, 6),
            ..base_config()
        };
        assert!(matches!(generate(&too_many_authors), Err(Error::Config(_))));

        let single_author = SynthConfig {
            authors_per_paper_range: (1, 3),
            ..base_config()
        };
        assert!(matches!(generate(&single_author), Err(Error::Config(_))));

        let bad_mixing = SynthConfig {
            mixing: 1.5,
            ..base_config()
        };
        assert!(matches!(generate(&bad_mixing), Err(Error::Config(_))));

        let no_window = SynthConfig {
            citation_rate: 1.0,
            window_end: 2011,
            ..base_config()
        };
        assert!(matches!(generate(&no_window), Err(Error::Config(_))));
    }

    #[test]
    fn ground_truth_csvs_have_expected_shape() {
        let out = generate(&base_config()).unwrap();
        let mut teams = Vec::new();
        write_teams(&out, &mut teams).unwrap();
        let teams = String::from_utf8(teams).unwrap();
        assert!(teams.starts_with("researcher_id,team_id\n"));
        assert!(teams.lines().count() > 5);

        let mut sources = Vec::new();
        write_sources(&out, &mut sources).unwrap();
        let sources = String::from_utf8(sources).unwrap();
        assert!(sources.starts_with("paper_id,source_label\n"));
    }
}
