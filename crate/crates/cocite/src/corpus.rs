//! Bibliographic records, the journal/subject-category catalog, time
//! windows, and sample selection.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One bibliographic record: a citing paper and its deduplicated reference
/// list. References are ids of other papers, which may or may not have a
/// record of their own in the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperRecord {
    pub id: String,
    pub year: i32,
    pub journal: String,
    pub references: Vec<String>,
}

/// On-disk JSON-Lines shape of a record.
#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    id: String,
    year: i32,
    journal: String,
    refs: Vec<String>,
}

/// Supported corpus file formats. JSON-Lines is canonical; CSV encodes the
/// reference list as a `;`-separated field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown corpus format {other:?} (expected jsonl or csv)"
            ))),
        }
    }
}

/// An in-memory corpus with id lookup and ingestion statistics.
#[derive(Debug, Default)]
pub struct Corpus {
    records: Vec<PaperRecord>,
    by_id: FxHashMap<String, usize>,
    /// References dropped because they repeated an earlier reference of the
    /// same citing paper.
    pub dropped_duplicate_refs: u64,
    /// References dropped because a paper cited itself.
    pub dropped_self_refs: u64,
}

impl Corpus {
    pub fn new() -> Self {
        Corpus::default()
    }

    /// Add a record, deduplicating its reference list and dropping
    /// self-references. Fails if the paper id is already present.
    pub fn push(&mut self, mut record: PaperRecord) -> Result<()> {
        if self.by_id.contains_key(&record.id) {
            return Err(Error::DuplicatePaperId(record.id));
        }
        let mut seen = FxHashSet::default();
        let before = record.references.len() as u64;
        let mut self_refs = 0u64;
        record.references.retain(|r| {
            if r == &record.id {
                self_refs += 1;
                false
            } else {
                seen.insert(r.clone())
            }
        });
        let after = record.references.len() as u64;
        self.dropped_self_refs += self_refs;
        self.dropped_duplicate_refs += before - after - self_refs;
        self.by_id.insert(record.id.clone(), self.records.len());
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[PaperRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&PaperRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }
}

/// Journal metadata: subject-category assignments (a journal may carry
/// several) and display names. Journals absent from the catalog are
/// "unindexed".
#[derive(Debug, Default, Clone)]
pub struct JournalCatalog {
    categories: FxHashMap<String, Vec<String>>,
    names: FxHashMap<String, String>,
}

impl JournalCatalog {
    pub fn new() -> Self {
        JournalCatalog::default()
    }

    /// Register one journal-category assignment. Repeated assignments of the
    /// same category are ignored; category lists stay sorted.
    pub fn assign(&mut self, journal: &str, category: &str, name: &str) {
        let list = self.categories.entry(journal.to_string()).or_default();
        if let Err(pos) = list.binary_search_by(|c| c.as_str().cmp(category)) {
            list.insert(pos, category.to_string());
        }
        self.names
            .entry(journal.to_string())
            .or_insert_with(|| name.to_string());
    }

    /// Sorted subject categories of a journal, or `None` if unindexed.
    pub fn categories_of(&self, journal: &str) -> Option<&[String]> {
        self.categories.get(journal).map(|v| v.as_slice())
    }

    pub fn name_of(&self, journal: &str) -> Option<&str> {
        self.names.get(journal).map(|s| s.as_str())
    }

    pub fn is_indexed(&self, journal: &str) -> bool {
        self.categories.contains_key(journal)
    }

    pub fn journal_carries(&self, journal: &str, category: &str) -> bool {
        self.categories_of(journal)
            .is_some_and(|cats| cats.binary_search_by(|c| c.as_str().cmp(category)).is_ok())
    }

    /// True if any journal carries the category.
    pub fn knows_category(&self, category: &str) -> bool {
        self.categories
            .values()
            .any(|cats| cats.binary_search_by(|c| c.as_str().cmp(category)).is_ok())
    }

    pub fn journals(&self) -> impl Iterator<Item = &str> {
        self.categories.keys().map(|s| s.as_str())
    }
}

/// The three analysis intervals around the sampled "present".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Interval {
    Past,
    Present,
    Future,
}

impl Interval {
    pub const ALL: [Interval; 3] = [Interval::Past, Interval::Present, Interval::Future];

    pub fn index(self) -> usize {
        match self {
            Interval::Past => 0,
            Interval::Present => 1,
            Interval::Future => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Interval> {
        match i {
            0 => Some(Interval::Past),
            1 => Some(Interval::Present),
            2 => Some(Interval::Future),
            _ => None,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Past => write!(f, "past"),
            Interval::Present => write!(f, "present"),
            Interval::Future => write!(f, "future"),
        }
    }
}

/// Contiguous, disjoint past/present/future year windows. The present may
/// span several years; past and future windows sit immediately before and
/// after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub t0_start: i32,
    pub t0_end: i32,
    pub past_len: u32,
    pub future_len: u32,
}

impl WindowSpec {
    pub const DEFAULT_PAST_LEN: u32 = 7;
    pub const DEFAULT_FUTURE_LEN: u32 = 7;

    pub fn new(t0_start: i32, t0_end: i32, past_len: u32, future_len: u32) -> Result<Self> {
        if t0_end < t0_start {
            return Err(Error::InvalidConfig(format!(
                "present window end {t0_end} precedes start {t0_start}"
            )));
        }
        if past_len == 0 || future_len == 0 {
            return Err(Error::InvalidConfig(
                "past and future window lengths must be at least 1".into(),
            ));
        }
        Ok(WindowSpec {
            t0_start,
            t0_end,
            past_len,
            future_len,
        })
    }

    /// Single present year with the default 7-year past/future windows.
    pub fn single_year(t0: i32) -> Self {
        WindowSpec {
            t0_start: t0,
            t0_end: t0,
            past_len: Self::DEFAULT_PAST_LEN,
            future_len: Self::DEFAULT_FUTURE_LEN,
        }
    }

    /// Inclusive year range of an interval.
    pub fn years(&self, interval: Interval) -> std::ops::RangeInclusive<i32> {
        match interval {
            Interval::Past => (self.t0_start - self.past_len as i32)..=(self.t0_start - 1),
            Interval::Present => self.t0_start..=self.t0_end,
            Interval::Future => (self.t0_end + 1)..=(self.t0_end + self.future_len as i32),
        }
    }

    /// Interval containing `year`, if any.
    pub fn interval_of(&self, year: i32) -> Option<Interval> {
        Interval::ALL
            .into_iter()
            .find(|&iv| self.years(iv).contains(&year))
    }

    /// First and last year covered by any interval.
    pub fn full_span(&self) -> std::ops::RangeInclusive<i32> {
        *self.years(Interval::Past).start()..=*self.years(Interval::Future).end()
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}..={} (past {}, future {})",
            self.t0_start, self.t0_end, self.past_len, self.future_len
        )
    }
}

/// Records of one interval that passed the sampling rule, as indices into
/// the corpus record list (ascending, hence deterministic).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    pub interval: Interval,
    members: Vec<usize>,
}

impl SampleSet {
    /// Build a sample directly from record indices. Indices are sorted and
    /// deduplicated so member order never depends on construction order.
    pub fn from_members(interval: Interval, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        SampleSet { interval, members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn records<'a>(&'a self, corpus: &'a Corpus) -> impl Iterator<Item = &'a PaperRecord> {
        self.members.iter().map(|&i| &corpus.records()[i])
    }
}

/// How a cited work resolves against the corpus and catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution<'a> {
    /// Journal known and indexed: usable at every aggregation level.
    Full {
        journal: &'a str,
        categories: &'a [String],
    },
    /// The cited work has a record but its journal is not in the catalog;
    /// usable at paper level only.
    UnindexedJournal { journal: &'a str },
    /// No record for the cited id; usable at paper level only.
    Dangling,
}

/// Resolve a cited work to its journal and subject categories.
pub fn resolve_levels<'a>(
    corpus: &'a Corpus,
    catalog: &'a JournalCatalog,
    cited_id: &str,
) -> Resolution<'a> {
    match corpus.get(cited_id) {
        None => Resolution::Dangling,
        Some(record) => match catalog.categories_of(&record.journal) {
            Some(categories) => Resolution::Full {
                journal: &record.journal,
                categories,
            },
            None => Resolution::UnindexedJournal {
                journal: &record.journal,
            },
        },
    }
}

/// Select the records of `interval` that cite at least `min_field_journals`
/// distinct journals carrying `field_category`. With `min_field_journals`
/// of zero, every record in the interval is selected.
pub fn select_sample(
    corpus: &Corpus,
    catalog: &JournalCatalog,
    window: &WindowSpec,
    interval: Interval,
    field_category: &str,
    min_field_journals: usize,
) -> Result<SampleSet> {
    if min_field_journals > 0 && !catalog.knows_category(field_category) {
        return Err(Error::UnknownCategory(field_category.to_string()));
    }
    let years = window.years(interval);
    let mut members = Vec::new();
    for (idx, record) in corpus.records().iter().enumerate() {
        if !years.contains(&record.year) {
            continue;
        }
        if min_field_journals == 0 {
            members.push(idx);
            continue;
        }
        let mut field_journals = BTreeSet::new();
        for cited in &record.references {
            if let Resolution::Full { journal, .. } = resolve_levels(corpus, catalog, cited) {
                if catalog.journal_carries(journal, field_category) {
                    field_journals.insert(journal);
                    if field_journals.len() >= min_field_journals {
                        break;
                    }
                }
            }
        }
        if field_journals.len() >= min_field_journals {
            members.push(idx);
        }
    }
    Ok(SampleSet { interval, members })
}

/// Load a corpus file in either supported format.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::io(format!("opening corpus {}", path.display()), e))?;
    let reader = BufReader::new(file);
    match format {
        CorpusFormat::Jsonl => load_jsonl(path, reader),
        CorpusFormat::Csv => load_csv(path, reader),
    }
}

fn load_jsonl(path: &Path, reader: impl BufRead) -> Result<Corpus> {
    let mut corpus = Corpus::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: e.to_string(),
            })?;
        corpus.push(PaperRecord {
            id: raw.id,
            year: raw.year,
            journal: raw.journal,
            references: raw.refs,
        })?;
    }
    Ok(corpus)
}

fn load_csv(path: &Path, reader: impl BufRead) -> Result<Corpus> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let mut corpus = Corpus::new();
    for (recno, row) in csv_reader.records().enumerate() {
        let row = row?;
        let field = |i: usize, name: &str| -> Result<&str> {
            row.get(i).ok_or_else(|| Error::MalformedRecord {
                path: path.to_path_buf(),
                line: recno + 2,
                message: format!("missing column {name}"),
            })
        };
        let id = field(0, "id")?.to_string();
        let year: i32 = field(1, "year")?.parse().map_err(|_| Error::MalformedRecord {
            path: path.to_path_buf(),
            line: recno + 2,
            message: format!("year is not an integer: {:?}", row.get(1).unwrap_or("")),
        })?;
        let journal = field(2, "journal")?.to_string();
        let refs_field = field(3, "refs")?;
        let references: Vec<String> = if refs_field.is_empty() {
            Vec::new()
        } else {
            refs_field.split(';').map(|s| s.to_string()).collect()
        };
        corpus.push(PaperRecord {
            id,
            year,
            journal,
            references,
        })?;
    }
    Ok(corpus)
}

/// Write a corpus in the canonical JSON-Lines format.
pub fn write_corpus_jsonl(corpus: &Corpus, writer: &mut impl Write) -> Result<()> {
    for record in corpus.records() {
        let raw = RawRecord {
            id: record.id.clone(),
            year: record.year,
            journal: record.journal.clone(),
            refs: record.references.clone(),
        };
        let line = serde_json::to_string(&raw)?;
        writeln!(writer, "{line}").map_err(|e| Error::io("writing corpus", e))?;
    }
    Ok(())
}

/// Load a catalog CSV with columns `journal_id,subject_category_id,journal_name`.
pub fn load_catalog(path: &Path) -> Result<JournalCatalog> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::io(format!("opening catalog {}", path.display()), e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));
    let mut catalog = JournalCatalog::new();
    for (recno, row) in reader.records().enumerate() {
        let row = row?;
        let get = |i: usize, name: &str| -> Result<&str> {
            row.get(i).ok_or_else(|| Error::MalformedRecord {
                path: path.to_path_buf(),
                line: recno + 2,
                message: format!("missing column {name}"),
            })
        };
        catalog.assign(get(0, "journal_id")?, get(1, "subject_category_id")?, get(2, "journal_name")?);
    }
    Ok(catalog)
}

/// Write a catalog as CSV, rows sorted for byte-stable output.
pub fn write_catalog_csv(catalog: &JournalCatalog, writer: &mut impl Write) -> Result<()> {
    let mut rows: Vec<(String, String, String)> = Vec::new();
    for journal in catalog.journals() {
        let name = catalog.name_of(journal).unwrap_or(journal);
        for category in catalog.categories_of(journal).unwrap_or(&[]) {
            rows.push((journal.to_string(), category.clone(), name.to_string()));
        }
    }
    rows.sort();
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record(["journal_id", "subject_category_id", "journal_name"])?;
    for (journal, category, name) in rows {
        csv_writer.write_record([&journal, &category, &name])?;
    }
    csv_writer.flush().map_err(|e| Error::io("writing catalog", e))?;
    Ok(())
}
