//! Pair-level novelty and anticipation scores, and their aggregation to
//! per-paper score vectors.
//!
//! Scores are computed for pairs observed in the present interval. Novelty
//! weights use element citation counts taken over the past and present
//! intervals together; anticipation share deltas compare a pair's share of
//! all pair events between the future and past intervals.

use std::io::{BufRead, Write};

use smallvec::SmallVec;

use crate::cooccur::{IntervalCounts, Level};
use crate::corpus::{Corpus, Interval, JournalCatalog, PaperRecord, Resolution, SampleSet,
    resolve_levels};
use crate::error::{Error, Result};
use crate::provenance::Meta;

/// Normalization weight 1/(dᵢ·dⱼ) over positive citation counts.
pub fn weight_w(d_i: u64, d_j: u64) -> Result<f64> {
    if d_i == 0 || d_j == 0 {
        return Err(Error::DegenerateStatistics(format!(
            "weight requires positive citation counts, got ({d_i}, {d_j})"
        )));
    }
    Ok(1.0 / (d_i as f64 * d_j as f64))
}

/// Weighted combined past+present pair frequency.
pub fn novelty_value(f_past: u64, f_present: u64, d_i: u64, d_j: u64) -> Result<f64> {
    Ok((f_past + f_present) as f64 * weight_w(d_i, d_j)?)
}

/// 1 when the pair never occurred in the past interval, else 0.
pub fn absolute_novelty_value(f_past: u64) -> u8 {
    u8::from(f_past == 0)
}

/// Weighted future pair frequency; the weight stays on past+present counts.
pub fn anticipation_value(f_future: u64, d_i: u64, d_j: u64) -> Result<f64> {
    Ok(f_future as f64 * weight_w(d_i, d_j)?)
}

/// Difference between the pair's share of all future pair events and its
/// share of all past pair events.
pub fn share_delta_value(
    f_past: u64,
    total_past: u64,
    f_future: u64,
    total_future: u64,
) -> Result<f64> {
    if total_past == 0 || total_future == 0 {
        return Err(Error::DegenerateStatistics(
            "share delta undefined: an interval has no pair events at this level".into(),
        ));
    }
    Ok(f_future as f64 / total_future as f64 - f_past as f64 / total_past as f64)
}

/// Ratio of present to past pair frequency, with one added to the
/// denominator so a fresh pair scores its present count.
pub fn alt_ratio_value(f_past: u64, f_present: u64) -> f64 {
    f_present as f64 / (f_past + 1) as f64
}

/// Per-pair score access over a counts table, with level totals cached for
/// the share-delta scores.
pub struct Scorer<'a> {
    counts: &'a IntervalCounts,
    totals_past: [u64; 3],
    totals_future: [u64; 3],
}

impl<'a> Scorer<'a> {
    pub fn new(counts: &'a IntervalCounts) -> Self {
        let totals = |interval: Interval| {
            [
                counts.total_pair_events(interval, Level::Paper),
                counts.total_pair_events(interval, Level::Journal),
                counts.total_pair_events(interval, Level::Subject),
            ]
        };
        Scorer {
            counts,
            totals_past: totals(Interval::Past),
            totals_future: totals(Interval::Future),
        }
    }

    pub fn counts(&self) -> &IntervalCounts {
        self.counts
    }

    fn freq(&self, interval: Interval, level: Level, a: &str, b: &str) -> u64 {
        self.counts.pair_freq(interval, level, a, b)
    }

    /// Element citation count over past plus present, the weight basis.
    fn weight_basis(&self, level: Level, elem: &str) -> u64 {
        self.counts.elem_count(Interval::Past, level, elem)
            + self.counts.elem_count(Interval::Present, level, elem)
    }

    /// Novelty score of a pair at a level (CIT, JR, SC of the score table).
    pub fn novelty(&self, level: Level, a: &str, b: &str) -> Result<f64> {
        novelty_value(
            self.freq(Interval::Past, level, a, b),
            self.freq(Interval::Present, level, a, b),
            self.weight_basis(level, a),
            self.weight_basis(level, b),
        )
    }

    /// Paper-level absolute novelty flag (the NCIT building block).
    pub fn absolute_novelty(&self, a: &str, b: &str) -> u8 {
        absolute_novelty_value(self.freq(Interval::Past, Level::Paper, a, b))
    }

    /// Paper-level anticipation score (ACIT).
    pub fn anticipation(&self, a: &str, b: &str) -> Result<f64> {
        anticipation_value(
            self.freq(Interval::Future, Level::Paper, a, b),
            self.weight_basis(Level::Paper, a),
            self.weight_basis(Level::Paper, b),
        )
    }

    /// Share-delta anticipation score (AJR, ASC); journal and subject levels
    /// only.
    pub fn share_delta(&self, level: Level, a: &str, b: &str) -> Result<f64> {
        if level == Level::Paper {
            return Err(Error::InvalidConfig(
                "share-delta scores are defined at the journal and subject levels".into(),
            ));
        }
        share_delta_value(
            self.freq(Interval::Past, level, a, b),
            self.totals_past[level.index()],
            self.freq(Interval::Future, level, a, b),
            self.totals_future[level.index()],
        )
    }

    /// Present-to-past ratio (the "alt" scores).
    pub fn alt_ratio(&self, level: Level, a: &str, b: &str) -> f64 {
        alt_ratio_value(
            self.freq(Interval::Past, level, a, b),
            self.freq(Interval::Present, level, a, b),
        )
    }

    /// Σ share delta over every pair present in the past or future interval
    /// at a level. Sums to zero because each interval's shares sum to one.
    pub fn share_delta_total(&self, level: Level) -> Result<f64> {
        let mut keys: Vec<(String, String)> = Vec::new();
        for interval in [Interval::Past, Interval::Future] {
            for (a, b, _) in self.counts.iter_pairs(interval, level) {
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                keys.push((a.to_string(), b.to_string()));
            }
        }
        keys.sort_unstable();
        keys.dedup();
        let mut total = 0.0;
        for (a, b) in &keys {
            total += self.share_delta(level, a, b)?;
        }
        Ok(total)
    }
}

/// Mean and 90th-percentile of a paper's pair novelty scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoveltyStats {
    pub mean: f64,
    pub p90: f64,
}

/// Paper-level aggregates of one citing paper.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperLevelScores {
    pub novelty: NoveltyStats,
    /// Percentage of reference pairs never co-cited in the past interval.
    pub new_pair_pct: f64,
    pub anticipation_mean: f64,
    pub alt_mean: f64,
    pub pair_count: u64,
}

/// Journal- or subject-level aggregates of one citing paper.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupLevelScores {
    pub novelty: NoveltyStats,
    pub share_delta_mean: f64,
    pub alt_mean: f64,
    pub pair_count: u64,
}

/// All per-paper score aggregates. Levels with no countable pair are
/// `None` (missing), never zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperScoreVector {
    pub paper_id: String,
    pub year: i32,
    pub journal: String,
    pub paper: Option<PaperLevelScores>,
    pub journal_level: Option<GroupLevelScores>,
    pub subject_level: Option<GroupLevelScores>,
    /// Citations received from the sampled future-interval papers.
    pub future_citations: u64,
}

/// Nearest-rank 90th percentile: the smallest element whose cumulative
/// share reaches 0.9. `values` must be non-empty.
fn p90_nearest_rank(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(|x, y| x.partial_cmp(y).expect("scores are finite"));
    let n = values.len() as u64;
    let rank = (9 * n).div_ceil(10).max(1);
    values[(rank - 1) as usize]
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

struct LookupRef {
    paper: u32,
    journal: Option<u32>,
    subjects: SmallVec<[u32; 3]>,
}

/// Compute the score vector of one sampled citing paper against counts that
/// were built over the same sample.
pub fn aggregate_paper(
    corpus: &Corpus,
    catalog: &JournalCatalog,
    scorer: &Scorer<'_>,
    record: &PaperRecord,
) -> Result<PaperScoreVector> {
    let counts = scorer.counts;
    let interner = counts.interner();
    let mismatch = || Error::CountsSampleMismatch(record.id.clone());

    let refs: Vec<LookupRef> = record
        .references
        .iter()
        .map(|cited| {
            let paper = interner.get(cited).ok_or_else(mismatch)?;
            Ok(match resolve_levels(corpus, catalog, cited) {
                Resolution::Full {
                    journal,
                    categories,
                } => LookupRef {
                    paper,
                    journal: Some(interner.get(journal).ok_or_else(mismatch)?),
                    subjects: categories
                        .iter()
                        .map(|c| interner.get(c).ok_or_else(mismatch))
                        .collect::<Result<_>>()?,
                },
                Resolution::UnindexedJournal { .. } | Resolution::Dangling => LookupRef {
                    paper,
                    journal: None,
                    subjects: SmallVec::new(),
                },
            })
        })
        .collect::<Result<_>>()?;

    let pair_counts = |interval: Interval, level: Level, a: u32, b: u32| {
        counts.pair_freq_ids(interval, level, a, b)
    };
    let basis = |level: Level, e: u32| {
        counts.elem_count_id(Interval::Past, level, e)
            + counts.elem_count_id(Interval::Present, level, e)
    };

    let mut cit_scores = Vec::new();
    let mut new_pairs = 0u64;
    let mut acit_sum = 0.0;
    let mut cit_alt_sum = 0.0;
    let mut jr_scores = Vec::new();
    let mut ajr_sum = 0.0;
    let mut jr_alt_sum = 0.0;
    let mut sc_scores = Vec::new();
    let mut asc_sum = 0.0;
    let mut sc_alt_sum = 0.0;

    let score_group_pair = |level: Level,
                            a: u32,
                            b: u32,
                            scores: &mut Vec<f64>,
                            delta_sum: &mut f64,
                            alt_sum: &mut f64|
     -> Result<()> {
        let f_past = pair_counts(Interval::Past, level, a, b);
        let f_present = pair_counts(Interval::Present, level, a, b);
        let f_future = pair_counts(Interval::Future, level, a, b);
        scores.push(novelty_value(f_past, f_present, basis(level, a), basis(level, b))?);
        let (total_past, total_future) = (
            scorer.totals_past[level.index()],
            scorer.totals_future[level.index()],
        );
        *delta_sum += share_delta_value(f_past, total_past, f_future, total_future)?;
        *alt_sum += alt_ratio_value(f_past, f_present);
        Ok(())
    };

    for i in 0..refs.len() {
        for j in (i + 1)..refs.len() {
            let (ri, rj) = (&refs[i], &refs[j]);
            let f_past = pair_counts(Interval::Past, Level::Paper, ri.paper, rj.paper);
            let f_present = pair_counts(Interval::Present, Level::Paper, ri.paper, rj.paper);
            let f_future = pair_counts(Interval::Future, Level::Paper, ri.paper, rj.paper);
            let (d_i, d_j) = (basis(Level::Paper, ri.paper), basis(Level::Paper, rj.paper));
            cit_scores.push(novelty_value(f_past, f_present, d_i, d_j)?);
            new_pairs += absolute_novelty_value(f_past) as u64;
            acit_sum += anticipation_value(f_future, d_i, d_j)?;
            cit_alt_sum += alt_ratio_value(f_past, f_present);

            if let (Some(ja), Some(jb)) = (ri.journal, rj.journal) {
                score_group_pair(Level::Journal, ja, jb, &mut jr_scores, &mut ajr_sum, &mut jr_alt_sum)?;
            }
            for &sa in &ri.subjects {
                for &sb in &rj.subjects {
                    score_group_pair(Level::Subject, sa, sb, &mut sc_scores, &mut asc_sum, &mut sc_alt_sum)?;
                }
            }
        }
    }

    let paper = if cit_scores.is_empty() {
        None
    } else {
        let n = cit_scores.len() as u64;
        Some(PaperLevelScores {
            novelty: NoveltyStats {
                mean: mean(&cit_scores),
                p90: p90_nearest_rank(&mut cit_scores),
            },
            new_pair_pct: 100.0 * new_pairs as f64 / n as f64,
            anticipation_mean: acit_sum / n as f64,
            alt_mean: cit_alt_sum / n as f64,
            pair_count: n,
        })
    };
    let group = |scores: &mut Vec<f64>, delta_sum: f64, alt_sum: f64| {
        if scores.is_empty() {
            None
        } else {
            let n = scores.len() as u64;
            Some(GroupLevelScores {
                novelty: NoveltyStats {
                    mean: mean(scores),
                    p90: p90_nearest_rank(scores),
                },
                share_delta_mean: delta_sum / n as f64,
                alt_mean: alt_sum / n as f64,
                pair_count: n,
            })
        }
    };
    let journal_level = group(&mut jr_scores, ajr_sum, jr_alt_sum);
    let subject_level = group(&mut sc_scores, asc_sum, sc_alt_sum);

    Ok(PaperScoreVector {
        paper_id: record.id.clone(),
        year: record.year,
        journal: record.journal.clone(),
        paper,
        journal_level,
        subject_level,
        future_citations: counts.elem_count(Interval::Future, Level::Paper, &record.id),
    })
}

/// Score every paper of the present-interval sample, in sample order.
pub fn score_papers(
    corpus: &Corpus,
    catalog: &JournalCatalog,
    counts: &IntervalCounts,
    sample: &SampleSet,
) -> Result<Vec<PaperScoreVector>> {
    if sample.interval != Interval::Present {
        return Err(Error::InvalidConfig(
            "scores are computed for the present-interval sample".into(),
        ));
    }
    let scorer = Scorer::new(counts);
    sample
        .records(corpus)
        .map(|record| aggregate_paper(corpus, catalog, &scorer, record))
        .collect()
}

/// The per-paper score variables of the analysis, in output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScoreVar {
    CitMean,
    CitP90,
    JrMean,
    JrP90,
    ScMean,
    ScP90,
    NcitPct,
    AcitMean,
    AjrMean,
    AscMean,
    CitAltMean,
    JrAltMean,
    ScAltMean,
}

impl ScoreVar {
    pub const ALL: [ScoreVar; 13] = [
        ScoreVar::CitMean,
        ScoreVar::CitP90,
        ScoreVar::JrMean,
        ScoreVar::JrP90,
        ScoreVar::ScMean,
        ScoreVar::ScP90,
        ScoreVar::NcitPct,
        ScoreVar::AcitMean,
        ScoreVar::AjrMean,
        ScoreVar::AscMean,
        ScoreVar::CitAltMean,
        ScoreVar::JrAltMean,
        ScoreVar::ScAltMean,
    ];

    /// Column name in the score table.
    pub fn column(self) -> &'static str {
        match self {
            ScoreVar::CitMean => "cit_mean",
            ScoreVar::CitP90 => "cit_p90",
            ScoreVar::JrMean => "jr_mean",
            ScoreVar::JrP90 => "jr_p90",
            ScoreVar::ScMean => "sc_mean",
            ScoreVar::ScP90 => "sc_p90",
            ScoreVar::NcitPct => "ncit_pct",
            ScoreVar::AcitMean => "acit_mean",
            ScoreVar::AjrMean => "ajr_mean",
            ScoreVar::AscMean => "asc_mean",
            ScoreVar::CitAltMean => "cit_alt_mean",
            ScoreVar::JrAltMean => "jr_alt_mean",
            ScoreVar::ScAltMean => "sc_alt_mean",
        }
    }

    pub fn from_column(name: &str) -> Option<ScoreVar> {
        ScoreVar::ALL.into_iter().find(|v| v.column() == name)
    }

    pub fn extract(self, v: &PaperScoreVector) -> Option<f64> {
        match self {
            ScoreVar::CitMean => v.paper.as_ref().map(|p| p.novelty.mean),
            ScoreVar::CitP90 => v.paper.as_ref().map(|p| p.novelty.p90),
            ScoreVar::JrMean => v.journal_level.as_ref().map(|g| g.novelty.mean),
            ScoreVar::JrP90 => v.journal_level.as_ref().map(|g| g.novelty.p90),
            ScoreVar::ScMean => v.subject_level.as_ref().map(|g| g.novelty.mean),
            ScoreVar::ScP90 => v.subject_level.as_ref().map(|g| g.novelty.p90),
            ScoreVar::NcitPct => v.paper.as_ref().map(|p| p.new_pair_pct),
            ScoreVar::AcitMean => v.paper.as_ref().map(|p| p.anticipation_mean),
            ScoreVar::AjrMean => v.journal_level.as_ref().map(|g| g.share_delta_mean),
            ScoreVar::AscMean => v.subject_level.as_ref().map(|g| g.share_delta_mean),
            ScoreVar::CitAltMean => v.paper.as_ref().map(|p| p.alt_mean),
            ScoreVar::JrAltMean => v.journal_level.as_ref().map(|g| g.alt_mean),
            ScoreVar::ScAltMean => v.subject_level.as_ref().map(|g| g.alt_mean),
        }
    }

    /// Default polynomial degree for the logistic fits.
    pub fn default_degree(self) -> usize {
        match self {
            ScoreVar::AjrMean | ScoreVar::AscMean => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for ScoreVar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.column())
    }
}

const SCORE_HEADER: [&str; 20] = [
    "paper_id",
    "year",
    "journal",
    "cit_mean",
    "cit_p90",
    "jr_mean",
    "jr_p90",
    "sc_mean",
    "sc_p90",
    "ncit_pct",
    "acit_mean",
    "ajr_mean",
    "asc_mean",
    "cit_alt_mean",
    "jr_alt_mean",
    "sc_alt_mean",
    "n_pairs_paper",
    "n_pairs_journal",
    "n_pairs_subject",
    "future_citations",
];

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write the score table as CSV, one row per citing paper. Missing levels
/// produce empty fields.
pub fn write_scores_csv(
    scores: &[PaperScoreVector],
    meta: &Meta,
    writer: &mut impl Write,
) -> Result<()> {
    for line in meta.comment_lines() {
        writeln!(writer, "{line}").map_err(|e| Error::io("writing score table", e))?;
    }
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record(SCORE_HEADER)?;
    for v in scores {
        let row: Vec<String> = vec![
            v.paper_id.clone(),
            v.year.to_string(),
            v.journal.clone(),
            fmt_opt(v.paper.as_ref().map(|p| p.novelty.mean)),
            fmt_opt(v.paper.as_ref().map(|p| p.novelty.p90)),
            fmt_opt(v.journal_level.as_ref().map(|g| g.novelty.mean)),
            fmt_opt(v.journal_level.as_ref().map(|g| g.novelty.p90)),
            fmt_opt(v.subject_level.as_ref().map(|g| g.novelty.mean)),
            fmt_opt(v.subject_level.as_ref().map(|g| g.novelty.p90)),
            fmt_opt(v.paper.as_ref().map(|p| p.new_pair_pct)),
            fmt_opt(v.paper.as_ref().map(|p| p.anticipation_mean)),
            fmt_opt(v.journal_level.as_ref().map(|g| g.share_delta_mean)),
            fmt_opt(v.subject_level.as_ref().map(|g| g.share_delta_mean)),
            fmt_opt(v.paper.as_ref().map(|p| p.alt_mean)),
            fmt_opt(v.journal_level.as_ref().map(|g| g.alt_mean)),
            fmt_opt(v.subject_level.as_ref().map(|g| g.alt_mean)),
            v.paper.as_ref().map_or(0, |p| p.pair_count).to_string(),
            v.journal_level.as_ref().map_or(0, |g| g.pair_count).to_string(),
            v.subject_level.as_ref().map_or(0, |g| g.pair_count).to_string(),
            v.future_citations.to_string(),
        ];
        csv_writer.write_record(&row)?;
    }
    csv_writer
        .flush()
        .map_err(|e| Error::io("writing score table", e))?;
    Ok(())
}

/// Read a score table written by [`write_scores_csv`]. Leading `#` comment
/// lines are skipped.
pub fn read_scores_csv(reader: impl BufRead) -> Result<Vec<PaperScoreVector>> {
    let mut body = String::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io("reading score table", e))?;
        if line.starts_with('#') {
            continue;
        }
        body.push_str(&line);
        body.push('\n');
    }
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes());
    let headers = csv_reader.headers()?.clone();
    let expected: Vec<&str> = SCORE_HEADER.to_vec();
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::MalformedRecord {
            path: "<scores>".into(),
            line: 1,
            message: format!("unexpected score table header {got:?}"),
        });
    }

    let parse_f = |s: &str, line: usize| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse::<f64>().map(Some).map_err(|_| Error::MalformedRecord {
                path: "<scores>".into(),
                line,
                message: format!("bad number {s:?}"),
            })
        }
    };
    let parse_u = |s: &str, line: usize| -> Result<u64> {
        s.parse::<u64>().map_err(|_| Error::MalformedRecord {
            path: "<scores>".into(),
            line,
            message: format!("bad count {s:?}"),
        })
    };

    let mut out = Vec::new();
    for (recno, row) in csv_reader.records().enumerate() {
        let row = row?;
        let line = recno + 2;
        let get = |i: usize| row.get(i).unwrap_or("");
        let n_paper = parse_u(get(16), line)?;
        let n_journal = parse_u(get(17), line)?;
        let n_subject = parse_u(get(18), line)?;
        let paper = if n_paper > 0 {
            Some(PaperLevelScores {
                novelty: NoveltyStats {
                    mean: parse_f(get(3), line)?.ok_or_else(|| Error::MalformedRecord {
                        path: "<scores>".into(),
                        line,
                        message: "cit_mean missing for a paper with pairs".into(),
                    })?,
                    p90: parse_f(get(4), line)?.unwrap_or_default(),
                },
                new_pair_pct: parse_f(get(9), line)?.unwrap_or_default(),
                anticipation_mean: parse_f(get(10), line)?.unwrap_or_default(),
                alt_mean: parse_f(get(13), line)?.unwrap_or_default(),
                pair_count: n_paper,
            })
        } else {
            None
        };
        let group = |mean_i: usize, p90_i: usize, delta_i: usize, alt_i: usize, n: u64| -> Result<Option<GroupLevelScores>> {
            if n == 0 {
                return Ok(None);
            }
            Ok(Some(GroupLevelScores {
                novelty: NoveltyStats {
                    mean: parse_f(get(mean_i), line)?.unwrap_or_default(),
                    p90: parse_f(get(p90_i), line)?.unwrap_or_default(),
                },
                share_delta_mean: parse_f(get(delta_i), line)?.unwrap_or_default(),
                alt_mean: parse_f(get(alt_i), line)?.unwrap_or_default(),
                pair_count: n,
            }))
        };
        out.push(PaperScoreVector {
            paper_id: get(0).to_string(),
            year: get(1).parse().map_err(|_| Error::MalformedRecord {
                path: "<scores>".into(),
                line,
                message: format!("bad year {:?}", get(1)),
            })?,
            journal: get(2).to_string(),
            paper,
            journal_level: group(5, 6, 11, 14, n_journal)?,
            subject_level: group(7, 8, 12, 15, n_subject)?,
            future_citations: parse_u(get(19), line)?,
        });
    }
    Ok(out)
}
