//! Naive brute-force scorer: recounts every pair frequency with nested
//! loops over string-keyed tables and re-derives every score by literal
//! transcription of the index formulas. Shares no code with the optimized
//! counting and scoring path, so agreement between the two is meaningful
//! verification. Intentionally O(n²·refs²); refuses large corpora.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::{Corpus, Interval, JournalCatalog, PaperRecord, WindowSpec};
use crate::error::{Error, Result};
use crate::indexes::{GroupLevelScores, NoveltyStats, PaperLevelScores, PaperScoreVector};

const ORACLE_PAPER_LIMIT: usize = 1000;

type PairTable = BTreeMap<(String, String), u64>;
type ElemTable = BTreeMap<String, u64>;

#[derive(Default)]
struct NaiveCounts {
    // [interval][level] with levels 0=paper, 1=journal, 2=subject
    pairs: [[PairTable; 3]; 3],
    elems: [[ElemTable; 3]; 3],
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn interval_slot(window: &WindowSpec, year: i32) -> Option<usize> {
    if window.years(Interval::Past).contains(&year) {
        Some(0)
    } else if window.years(Interval::Present).contains(&year) {
        Some(1)
    } else if window.years(Interval::Future).contains(&year) {
        Some(2)
    } else {
        None
    }
}

/// Journal of a cited work when that journal is catalogued, else None.
fn indexed_journal<'a>(
    corpus: &'a Corpus,
    catalog: &JournalCatalog,
    cited: &str,
) -> Option<&'a str> {
    let journal = &corpus.get(cited)?.journal;
    catalog.categories_of(journal).map(|_| journal.as_str())
}

fn subject_list<'a>(
    corpus: &'a Corpus,
    catalog: &'a JournalCatalog,
    cited: &str,
) -> Vec<&'a str> {
    match corpus.get(cited) {
        Some(rec) => catalog
            .categories_of(&rec.journal)
            .map(|cats| cats.iter().map(|c| c.as_str()).collect())
            .unwrap_or_default(),
        None => Vec::new(),
    }
}

/// Independent re-statement of the sampling rule.
fn passes_rule(
    corpus: &Corpus,
    catalog: &JournalCatalog,
    record: &PaperRecord,
    field_category: &str,
    min_field_journals: usize,
) -> bool {
    if min_field_journals == 0 {
        return true;
    }
    let mut journals = BTreeSet::new();
    for cited in &record.references {
        if let Some(journal) = indexed_journal(corpus, catalog, cited) {
            if catalog
                .categories_of(journal)
                .is_some_and(|cats| cats.iter().any(|c| c == field_category))
            {
                journals.insert(journal.to_string());
            }
        }
    }
    journals.len() >= min_field_journals
}

fn count_paper(
    counts: &mut NaiveCounts,
    corpus: &Corpus,
    catalog: &JournalCatalog,
    record: &PaperRecord,
    slot: usize,
) {
    for cited in &record.references {
        *counts.elems[slot][0].entry(cited.clone()).or_insert(0) += 1;
        if let Some(journal) = indexed_journal(corpus, catalog, cited) {
            *counts.elems[slot][1].entry(journal.to_string()).or_insert(0) += 1;
        }
        for sc in subject_list(corpus, catalog, cited) {
            *counts.elems[slot][2].entry(sc.to_string()).or_insert(0) += 1;
        }
    }
    let refs = &record.references;
    for i in 0..refs.len() {
        for j in (i + 1)..refs.len() {
            *counts.pairs[slot][0]
                .entry(ordered(&refs[i], &refs[j]))
                .or_insert(0) += 1;
            let ja = indexed_journal(corpus, catalog, &refs[i]);
            let jb = indexed_journal(corpus, catalog, &refs[j]);
            if let (Some(ja), Some(jb)) = (ja, jb) {
                *counts.pairs[slot][1].entry(ordered(ja, jb)).or_insert(0) += 1;
            }
            for sa in subject_list(corpus, catalog, &refs[i]) {
                for sb in subject_list(corpus, catalog, &refs[j]) {
                    *counts.pairs[slot][2].entry(ordered(sa, sb)).or_insert(0) += 1;
                }
            }
        }
    }
}

/// First sorted value whose cumulative share of the list reaches 0.9.
fn ninetieth(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    for (k, value) in sorted.iter().enumerate() {
        if (k + 1) as f64 / n as f64 >= 0.9 {
            return *value;
        }
    }
    *sorted.last().unwrap()
}

/// Recompute every per-paper score vector by direct enumeration.
pub fn brute_force_scores(
    corpus: &Corpus,
    catalog: &JournalCatalog,
    window: &WindowSpec,
    field_category: &str,
    min_field_journals: usize,
) -> Result<Vec<PaperScoreVector>> {
    if corpus.len() > ORACLE_PAPER_LIMIT {
        return Err(Error::OracleCorpusTooLarge {
            n: corpus.len(),
            limit: ORACLE_PAPER_LIMIT,
        });
    }
    if min_field_journals > 0 {
        let known = catalog
            .journals()
            .any(|j| catalog.categories_of(j).is_some_and(|c| c.iter().any(|x| x == field_category)));
        if !known {
            return Err(Error::UnknownCategory(field_category.to_string()));
        }
    }

    let mut counts = NaiveCounts::default();
    let mut sampled: [Vec<&PaperRecord>; 3] = Default::default();
    for record in corpus.records() {
        let Some(slot) = interval_slot(window, record.year) else {
            continue;
        };
        if passes_rule(corpus, catalog, record, field_category, min_field_journals) {
            sampled[slot].push(record);
        }
    }
    for slot in 0..3 {
        for record in &sampled[slot] {
            count_paper(&mut counts, corpus, catalog, record, slot);
        }
    }

    let level_total = |slot: usize, level: usize| -> u64 { counts.pairs[slot][level].values().sum() };
    let d_basis = |level: usize, elem: &str| -> u64 {
        counts.elems[0][level].get(elem).copied().unwrap_or(0)
            + counts.elems[1][level].get(elem).copied().unwrap_or(0)
    };
    let freq = |slot: usize, level: usize, a: &str, b: &str| -> u64 {
        counts.pairs[slot][level]
            .get(&ordered(a, b))
            .copied()
            .unwrap_or(0)
    };

    let mut vectors = Vec::new();
    for record in &sampled[1] {
        let refs = &record.references;

        let mut cit_scores = Vec::new();
        let mut new_flags = 0u64;
        let mut acit = Vec::new();
        let mut cit_alt = Vec::new();
        let mut jr_scores = Vec::new();
        let mut ajr = Vec::new();
        let mut jr_alt = Vec::new();
        let mut sc_scores = Vec::new();
        let mut asc = Vec::new();
        let mut sc_alt = Vec::new();

        for i in 0..refs.len() {
            for j in (i + 1)..refs.len() {
                let (a, b) = (&refs[i], &refs[j]);
                let f_past = freq(0, 0, a, b);
                let f_present = freq(1, 0, a, b);
                let f_future = freq(2, 0, a, b);
                let (da, db) = (d_basis(0, a), d_basis(0, b));
                if da == 0 || db == 0 {
                    return Err(Error::DegenerateStatistics(format!(
                        "oracle: zero citation count for a present-interval pair of {}",
                        record.id
                    )));
                }
                let w = 1.0 / (da as f64 * db as f64);
                cit_scores.push((f_past + f_present) as f64 * w);
                if f_past == 0 {
                    new_flags += 1;
                }
                acit.push(f_future as f64 * w);
                cit_alt.push(f_present as f64 / (f_past + 1) as f64);

                let ja = indexed_journal(corpus, catalog, a);
                let jb = indexed_journal(corpus, catalog, b);
                if let (Some(ja), Some(jb)) = (ja, jb) {
                    score_group(
                        1, ja, jb, &counts, &level_total, record,
                        &mut jr_scores, &mut ajr, &mut jr_alt,
                    )?;
                }
                for sa in subject_list(corpus, catalog, a) {
                    for sb in subject_list(corpus, catalog, b) {
                        score_group(
                            2, sa, sb, &counts, &level_total, record,
                            &mut sc_scores, &mut asc, &mut sc_alt,
                        )?;
                    }
                }
            }
        }

        let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let paper = if cit_scores.is_empty() {
            None
        } else {
            Some(PaperLevelScores {
                novelty: NoveltyStats {
                    mean: avg(&cit_scores),
                    p90: ninetieth(&cit_scores),
                },
                new_pair_pct: 100.0 * new_flags as f64 / cit_scores.len() as f64,
                anticipation_mean: avg(&acit),
                alt_mean: avg(&cit_alt),
                pair_count: cit_scores.len() as u64,
            })
        };
        let group = |scores: &[f64], deltas: &[f64], alts: &[f64]| {
            if scores.is_empty() {
                None
            } else {
                Some(GroupLevelScores {
                    novelty: NoveltyStats {
                        mean: avg(scores),
                        p90: ninetieth(scores),
                    },
                    share_delta_mean: avg(deltas),
                    alt_mean: avg(alts),
                    pair_count: scores.len() as u64,
                })
            }
        };

        let future_citations = sampled[2]
            .iter()
            .map(|r| r.references.iter().filter(|c| *c == &record.id).count() as u64)
            .sum();

        vectors.push(PaperScoreVector {
            paper_id: record.id.clone(),
            year: record.year,
            journal: record.journal.clone(),
            paper,
            journal_level: group(&jr_scores, &ajr, &jr_alt),
            subject_level: group(&sc_scores, &asc, &sc_alt),
            future_citations,
        });
    }
    Ok(vectors)
}

#[allow(clippy::too_many_arguments)]
fn score_group(
    level: usize,
    a: &str,
    b: &str,
    counts: &NaiveCounts,
    level_total: &dyn Fn(usize, usize) -> u64,
    record: &PaperRecord,
    scores: &mut Vec<f64>,
    deltas: &mut Vec<f64>,
    alts: &mut Vec<f64>,
) -> Result<()> {
    let get = |slot: usize| -> u64 {
        counts.pairs[slot][level]
            .get(&ordered(a, b))
            .copied()
            .unwrap_or(0)
    };
    let (f_past, f_present, f_future) = (get(0), get(1), get(2));
    let d = |elem: &str| -> u64 {
        counts.elems[0][level].get(elem).copied().unwrap_or(0)
            + counts.elems[1][level].get(elem).copied().unwrap_or(0)
    };
    let (da, db) = (d(a), d(b));
    if da == 0 || db == 0 {
        return Err(Error::DegenerateStatistics(format!(
            "oracle: zero citation count at level {level} for a pair of {}",
            record.id
        )));
    }
    scores.push((f_past + f_present) as f64 / (da as f64 * db as f64));
    let (tot_past, tot_future) = (level_total(0, level), level_total(2, level));
    if tot_past == 0 || tot_future == 0 {
        return Err(Error::DegenerateStatistics(
            "oracle: empty past or future pair table".into(),
        ));
    }
    deltas.push(f_future as f64 / tot_future as f64 - f_past as f64 / tot_past as f64);
    alts.push(f_present as f64 / (f_past + 1) as f64);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PaperRecord;

    fn push(corpus: &mut Corpus, id: &str, year: i32, journal: &str, refs: &[&str]) {
        corpus
            .push(PaperRecord {
                id: id.into(),
                year,
                journal: journal.into(),
                references: refs.iter().map(|s| s.to_string()).collect(),
            })
            .unwrap();
    }

    #[test]
    fn oversized_corpus_is_refused() {
        let mut corpus = Corpus::new();
        for i in 0..1001 {
            push(&mut corpus, &format!("P{i}"), 2003, "J0", &[]);
        }
        let window = WindowSpec::single_year(2003);
        let err = brute_force_scores(&corpus, &JournalCatalog::new(), &window, "SC0", 0)
            .unwrap_err();
        assert!(matches!(err, Error::OracleCorpusTooLarge { n: 1001, .. }));
    }

    #[test]
    fn all_new_reference_lists_score_full_ncit() {
        // Past activity exists, but on different pairs: every pair cited in
        // the present is brand new.
        let mut corpus = Corpus::new();
        let mut catalog = JournalCatalog::new();
        catalog.assign("J0", "SC0", "Journal 0");
        push(&mut corpus, "X", 1990, "J0", &[]);
        push(&mut corpus, "Y", 1990, "J0", &[]);
        push(&mut corpus, "Z", 1990, "J0", &[]);
        push(&mut corpus, "V", 1990, "J0", &[]);
        push(&mut corpus, "W", 1990, "J0", &[]);
        push(&mut corpus, "PA", 2001, "J0", &["V", "W"]);
        push(&mut corpus, "A", 2003, "J0", &["X", "Y", "Z"]);
        push(&mut corpus, "F", 2004, "J0", &["X", "Y"]);
        let window = WindowSpec::new(2003, 2003, 2, 2).unwrap();
        let vectors = brute_force_scores(&corpus, &catalog, &window, "SC0", 0).unwrap();
        let a = vectors.iter().find(|v| v.paper_id == "A").unwrap();
        assert_eq!(a.paper.as_ref().unwrap().new_pair_pct, 100.0);
    }

    #[test]
    fn static_pair_distribution_zeroes_share_deltas() {
        // Past and future cite identical patterns → every share delta is 0.
        let mut corpus = Corpus::new();
        let mut catalog = JournalCatalog::new();
        catalog.assign("J0", "SC0", "Journal 0");
        catalog.assign("J1", "SC1", "Journal 1");
        push(&mut corpus, "X", 1990, "J0", &[]);
        push(&mut corpus, "Y", 1990, "J1", &[]);
        push(&mut corpus, "PA", 2001, "J0", &["X", "Y"]);
        push(&mut corpus, "PR", 2003, "J0", &["X", "Y"]);
        push(&mut corpus, "FU", 2004, "J0", &["X", "Y"]);
        let window = WindowSpec::new(2003, 2003, 2, 2).unwrap();
        let vectors = brute_force_scores(&corpus, &catalog, &window, "SC0", 0).unwrap();
        let pr = vectors.iter().find(|v| v.paper_id == "PR").unwrap();
        assert_eq!(pr.journal_level.as_ref().unwrap().share_delta_mean, 0.0);
        assert_eq!(pr.subject_level.as_ref().unwrap().share_delta_mean, 0.0);
    }

    #[test]
    fn ninetieth_is_nearest_rank() {
        let vals: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(ninetieth(&vals), 9.0);
        assert_eq!(ninetieth(&[5.0]), 5.0);
        assert_eq!(ninetieth(&[1.0, 2.0, 3.0]), 3.0);
    }
}
