//! Publication corpus ingestion: line-delimited record parsing, field/year
//! filtering, and citation indexing.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One publication: identity, provenance, author list, and outgoing references.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub paper_id: String,
    pub year: i32,
    pub field: String,
    pub authors: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cited_paper_ids: Vec<String>,
}

/// An immutable collection of publications indexed by paper id.
#[derive(Debug, Clone, Default)]
pub struct PublicationSet {
    records: Vec<PublicationRecord>,
    id_index: HashMap<String, usize>,
}

impl PublicationSet {
    pub fn from_records(records: Vec<PublicationRecord>) -> Result<Self> {
        let mut id_index = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if id_index.insert(r.paper_id.clone(), i).is_some() {
                return Err(Error::DuplicateId(r.paper_id.clone()));
            }
        }
        Ok(Self { records, id_index })
    }

    pub fn records(&self) -> &[PublicationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, paper_id: &str) -> Option<&PublicationRecord> {
        self.id_index.get(paper_id).map(|&i| &self.records[i])
    }

    pub fn contains(&self, paper_id: &str) -> bool {
        self.id_index.contains_key(paper_id)
    }
}

/// Parse a UTF-8 line-delimited corpus, one JSON record per line.
///
/// Duplicate authors within a record are collapsed (first occurrence kept);
/// blank lines are skipped. A repeated paper id anywhere in the stream is an
/// error, as is a record with no authors or a non-positive year.
pub fn parse_corpus<R: BufRead>(reader: R) -> Result<PublicationSet> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut rec: PublicationRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if rec.authors.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("record {} has no authors", rec.paper_id),
            });
        }
        if rec.year <= 0 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("record {} has non-positive year {}", rec.paper_id, rec.year),
            });
        }
        dedup_preserving_order(&mut rec.authors);
        if !seen.insert(rec.paper_id.clone()) {
            return Err(Error::DuplicateId(rec.paper_id.clone()));
        }
        records.push(rec);
    }
    PublicationSet::from_records(records)
}

/// Serialize a set back to the line-delimited form accepted by [`parse_corpus`].
pub fn write_corpus<W: Write>(set: &PublicationSet, mut writer: W) -> Result<()> {
    for rec in &set.records {
        let line = serde_json::to_string(rec).map_err(|e| Error::Parse {
            line: 0,
            message: e.to_string(),
        })?;
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Records matching both `field` and `year`; the input set is untouched.
pub fn filter_field_year(set: &PublicationSet, field: &str, year: i32) -> PublicationSet {
    let records: Vec<PublicationRecord> = set
        .records
        .iter()
        .filter(|r| r.field == field && r.year == year)
        .cloned()
        .collect();
    PublicationSet::from_records(records).expect("filtered subset keeps unique ids")
}

/// Records matching `field` across all years.
pub fn filter_field(set: &PublicationSet, field: &str) -> PublicationSet {
    let records: Vec<PublicationRecord> = set
        .records
        .iter()
        .filter(|r| r.field == field)
        .cloned()
        .collect();
    PublicationSet::from_records(records).expect("filtered subset keeps unique ids")
}

/// Reverse citation map: cited paper id to the records citing it.
///
/// Keys may reference papers outside the set; values always index records in
/// the source set. Self-references (a paper listing its own id) are dropped.
#[derive(Debug, Clone, Default)]
pub struct CitationIndex {
    cited_to_citing: HashMap<String, Vec<usize>>,
}

impl CitationIndex {
    /// Records citing `paper_id`, resolved against the set used to build the index.
    pub fn citing<'a>(
        &'a self,
        set: &'a PublicationSet,
        paper_id: &str,
    ) -> impl Iterator<Item = &'a PublicationRecord> + 'a {
        self.cited_to_citing
            .get(paper_id)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &set.records[i])
    }

    pub fn n_citations(&self, paper_id: &str) -> usize {
        self.cited_to_citing.get(paper_id).map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.cited_to_citing.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cited_to_citing.len()
    }
}

pub fn build_citation_index(set: &PublicationSet) -> CitationIndex {
    let mut cited_to_citing: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, rec) in set.records.iter().enumerate() {
        let mut seen = HashSet::new();
        for cited in &rec.cited_paper_ids {
            // One link per (citing, cited) pair; self-references dropped.
            if cited == &rec.paper_id || !seen.insert(cited) {
                continue;
            }
            cited_to_citing.entry(cited.clone()).or_default().push(i);
        }
    }
    CitationIndex { cited_to_citing }
}

fn dedup_preserving_order(items: &mut Vec<String>) {
    let mut seen = HashSet::new();
    items.retain(|x| seen.insert(x.clone()));
}
