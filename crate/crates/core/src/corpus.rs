//! Publication metadata ingestion: comma-delimited files with a header row
//! and RFC-4180 quoting, schema validation, and per-venue/per-year summaries.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::textio;

pub const YEAR_MIN: i32 = 1900;
pub const YEAR_MAX: i32 = 2100;

/// One publication; the unit of analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationRecord {
    pub id: String,
    pub venue: String,
    pub year: i32,
    pub title: String,
    /// May be empty; such records are kept in summaries but excluded from
    /// embedding and clustering.
    pub abstract_text: String,
    pub authors: Vec<String>,
    pub keywords: Vec<String>,
    pub doi: Option<String>,
}

impl PublicationRecord {
    pub fn has_abstract(&self) -> bool {
        !self.abstract_text.trim().is_empty()
    }
}

/// An ordered collection of records from one venue export.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub records: Vec<PublicationRecord>,
    pub venue_label: String,
    /// Inclusive [min, max] over the records' years.
    pub year_range: (i32, i32),
}

impl Corpus {
    /// Records whose abstract is non-empty, in corpus order.
    pub fn analyzed_records(&self) -> impl Iterator<Item = &PublicationRecord> {
        self.records.iter().filter(|r| r.has_abstract())
    }

    pub fn record_by_id(&self, id: &str) -> Option<&PublicationRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

/// Table-I style statistics for one corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSummary {
    pub venue_label: String,
    pub year_range: (i32, i32),
    pub publication_count: usize,
    pub per_year_counts: BTreeMap<i32, usize>,
}

impl DatasetSummary {
    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "venue: {}\nyears: {}-{}\npublications: {}\n\nyear\tcount\n",
            self.venue_label, self.year_range.0, self.year_range.1, self.publication_count
        ));
        for (year, count) in &self.per_year_counts {
            out.push_str(&format!("{year}\t{count}\n"));
        }
        out
    }

    /// Machine-readable key-value document.
    pub fn to_kv(&self) -> String {
        let mut w = textio::SectionWriter::new("dataset summary");
        w.section("summary")
            .param("venue", &self.venue_label)
            .param("year_min", self.year_range.0)
            .param("year_max", self.year_range.1)
            .param("publication_count", self.publication_count);
        w.section("per_year");
        for (year, count) in &self.per_year_counts {
            w.row([year.to_string(), count.to_string()]);
        }
        w.finish()
    }
}

/// Column-name mapping from the input file's header to record fields.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusSchema {
    pub id: Option<String>,
    pub venue: String,
    pub year: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_col: String,
    pub authors: Option<String>,
    pub keywords: Option<String>,
    pub doi: Option<String>,
    /// Separator for list-valued cells (authors, keywords).
    pub list_separator: String,
}

impl Default for CorpusSchema {
    fn default() -> Self {
        CorpusSchema {
            id: None,
            venue: "venue".to_string(),
            year: "year".to_string(),
            title: "title".to_string(),
            abstract_col: "abstract".to_string(),
            authors: Some("authors".to_string()),
            keywords: Some("keywords".to_string()),
            doi: Some("doi".to_string()),
            list_separator: ";".to_string(),
        }
    }
}

/// Strict aborts at the first bad row; permissive skips bad rows and reports them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadMode {
    Strict,
    Permissive,
}

/// One skipped row or advisory produced by a permissive load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadIssue {
    pub line: u64,
    pub reason: String,
}

/// Everything a load produces: the corpus plus per-row diagnostics.
#[derive(Debug, Clone)]
pub struct LoadReport {
    pub corpus: Corpus,
    /// Rows skipped in permissive mode.
    pub skipped: Vec<LoadIssue>,
    /// Records with empty abstracts (kept, but flagged).
    pub empty_abstracts: Vec<String>,
    /// Duplicate-DOI advisories (records kept).
    pub duplicate_dois: Vec<LoadIssue>,
}

/// Loads a comma-delimited corpus file.
pub fn load_corpus(path: &Path, schema: &CorpusSchema, mode: LoadMode) -> Result<LoadReport> {
    let file = std::fs::File::open(path).map_err(|e| {
        Error::Config(format!("cannot open corpus file {}: {e}", path.display()))
    })?;
    load_corpus_from_reader(file, schema, mode, None)
}

/// Loads from any reader; `venue_label` overrides the derived label.
pub fn load_corpus_from_reader<R: Read>(
    reader: R,
    schema: &CorpusSchema,
    mode: LoadMode,
    venue_label: Option<&str>,
) -> Result<LoadReport> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = csv_reader
        .headers()
        .map_err(|e| Error::EmptyCorpus(format!("cannot read header row: {e}")))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyCorpus("file has no header row".to_string()));
    }

    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema {
                column: name.to_string(),
            })
    };
    // Required columns must exist; optional ones are resolved best-effort.
    let venue_idx = col(&schema.venue)?;
    let year_idx = col(&schema.year)?;
    let title_idx = col(&schema.title)?;
    let abstract_idx = col(&schema.abstract_col)?;
    let opt_col = |name: Option<&str>| name.and_then(|n| headers.iter().position(|h| h == n));
    let id_idx = opt_col(schema.id.as_deref());
    let authors_idx = opt_col(schema.authors.as_deref());
    let keywords_idx = opt_col(schema.keywords.as_deref());
    let doi_idx = opt_col(schema.doi.as_deref());

    let mut records: Vec<PublicationRecord> = Vec::new();
    let mut skipped = Vec::new();
    let mut seen_ids: std::collections::HashSet<String> = std::collections::HashSet::new();
    let mut row_number: u64 = 0;

    for row in csv_reader.records() {
        row_number += 1;
        // Physical file line when the reader can report it (quoted fields
        // may span lines); the data-row ordinal otherwise.
        let line = match &row {
            Ok(record) => record.position().map(|p| p.line()).unwrap_or(row_number + 1),
            Err(e) => e
                .position()
                .map(|p| p.line())
                .unwrap_or(row_number + 1),
        };
        let parsed = row
            .map_err(|e| Error::Row {
                line,
                reason: format!("malformed row: {e}"),
            })
            .and_then(|record| {
                parse_record(
                    &record,
                    line,
                    row_number,
                    venue_idx,
                    year_idx,
                    title_idx,
                    abstract_idx,
                    id_idx,
                    authors_idx,
                    keywords_idx,
                    doi_idx,
                    &schema.list_separator,
                    &mut seen_ids,
                )
            });
        match parsed {
            Ok(record) => records.push(record),
            Err(Error::Row { line, reason }) => match mode {
                LoadMode::Strict => return Err(Error::Row { line, reason }),
                LoadMode::Permissive => skipped.push(LoadIssue { line, reason }),
            },
            Err(other) => return Err(other),
        }
    }

    if records.is_empty() {
        return Err(Error::EmptyCorpus(format!(
            "no valid data rows ({} skipped)",
            skipped.len()
        )));
    }

    let year_min = records.iter().map(|r| r.year).min().unwrap();
    let year_max = records.iter().map(|r| r.year).max().unwrap();
    let venue_label = match venue_label {
        Some(label) => label.to_string(),
        None => derive_venue_label(&records),
    };

    let empty_abstracts = records
        .iter()
        .filter(|r| !r.has_abstract())
        .map(|r| r.id.clone())
        .collect();

    let mut doi_seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut duplicate_dois = Vec::new();
    for (idx, record) in records.iter().enumerate() {
        if let Some(doi) = &record.doi {
            if let Some(first) = doi_seen.get(doi) {
                duplicate_dois.push(LoadIssue {
                    line: idx as u64 + 2,
                    reason: format!(
                        "doi {doi:?} already seen on record {:?}",
                        records[*first].id
                    ),
                });
            } else {
                doi_seen.insert(doi.clone(), idx);
            }
        }
    }

    Ok(LoadReport {
        corpus: Corpus {
            records,
            venue_label,
            year_range: (year_min, year_max),
        },
        skipped,
        empty_abstracts,
        duplicate_dois,
    })
}

#[allow(clippy::too_many_arguments)]
fn parse_record(
    record: &csv::StringRecord,
    line: u64,
    row_number: u64,
    venue_idx: usize,
    year_idx: usize,
    title_idx: usize,
    abstract_idx: usize,
    id_idx: Option<usize>,
    authors_idx: Option<usize>,
    keywords_idx: Option<usize>,
    doi_idx: Option<usize>,
    list_separator: &str,
    seen_ids: &mut std::collections::HashSet<String>,
) -> Result<PublicationRecord> {
    let get = |idx: usize| record.get(idx).unwrap_or("").trim().to_string();
    let row_err = |reason: String| Error::Row { line, reason };

    let venue = get(venue_idx);
    if venue.is_empty() {
        return Err(row_err("venue is empty".to_string()));
    }
    let year_raw = get(year_idx);
    let year: i32 = year_raw
        .parse()
        .map_err(|_| row_err(format!("unparseable year {year_raw:?}")))?;
    if !(YEAR_MIN..=YEAR_MAX).contains(&year) {
        return Err(row_err(format!(
            "year {year} outside [{YEAR_MIN}, {YEAR_MAX}]"
        )));
    }

    let id = match id_idx {
        Some(idx) => {
            let value = get(idx);
            if value.is_empty() {
                return Err(row_err("id is empty".to_string()));
            }
            value
        }
        // Stable synthetic id: derived from position, identical across reloads.
        None => format!("{venue}:{row_number}"),
    };
    if !seen_ids.insert(id.clone()) {
        return Err(row_err(format!("duplicate id {id:?}")));
    }

    let split_list = |idx: Option<usize>| -> Vec<String> {
        idx.map(|i| {
            get(i)
                .split(list_separator)
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default()
    };

    let doi = doi_idx.map(&get).filter(|d| !d.is_empty());

    Ok(PublicationRecord {
        id,
        venue,
        year,
        title: get(title_idx),
        abstract_text: get(abstract_idx),
        authors: split_list(authors_idx),
        keywords: split_list(keywords_idx),
        doi,
    })
}

/// Most frequent venue string, ties broken lexicographically.
fn derive_venue_label(records: &[PublicationRecord]) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records {
        *counts.entry(r.venue.as_str()).or_insert(0) += 1;
    }
    counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(venue, _)| venue.to_string())
        .unwrap_or_default()
}

/// Canonical column order for written corpora; reloading with the default
/// schema round-trips every field.
pub const CANONICAL_HEADER: [&str; 8] = [
    "id", "venue", "year", "title", "abstract", "authors", "keywords", "doi",
];

/// Renders a corpus as canonical comma-delimited bytes.
pub fn corpus_to_csv_bytes(corpus: &Corpus) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    {
        let mut writer = csv::WriterBuilder::new().from_writer(&mut bytes);
        writer
            .write_record(CANONICAL_HEADER)
            .map_err(|e| Error::Internal(format!("csv write: {e}")))?;
        for r in &corpus.records {
            writer
                .write_record([
                    r.id.as_str(),
                    r.venue.as_str(),
                    &r.year.to_string(),
                    r.title.as_str(),
                    r.abstract_text.as_str(),
                    &r.authors.join(";"),
                    &r.keywords.join(";"),
                    r.doi.as_deref().unwrap_or(""),
                ])
                .map_err(|e| Error::Internal(format!("csv write: {e}")))?;
        }
        writer
            .flush()
            .map_err(|e| Error::Internal(format!("csv write: {e}")))?;
    }
    Ok(bytes)
}

/// Writes a corpus in the canonical comma-delimited layout.
pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let bytes = corpus_to_csv_bytes(corpus)?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Schema that reads back a file produced by [`write_corpus`].
pub fn canonical_schema() -> CorpusSchema {
    CorpusSchema {
        id: Some("id".to_string()),
        ..CorpusSchema::default()
    }
}

/// Materializes Table I-style statistics.
pub fn summarize(corpus: &Corpus) -> DatasetSummary {
    let mut per_year_counts: BTreeMap<i32, usize> = BTreeMap::new();
    for r in &corpus.records {
        *per_year_counts.entry(r.year).or_insert(0) += 1;
    }
    DatasetSummary {
        venue_label: corpus.venue_label.clone(),
        year_range: corpus.year_range,
        publication_count: corpus.records.len(),
        per_year_counts,
    }
}
