//! Co-citation pair enumeration and interval frequency counting at the
//! paper, journal, and subject-category levels.
//!
//! Counting is the hot path: element ids are interned to `u32`, pair keys
//! are packed into `u64`, and citing papers are counted shard-parallel with
//! a commutative integer merge, so results are identical for any shard
//! layout or thread count.

pub mod cache;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::corpus::{Corpus, Interval, JournalCatalog, PaperRecord, Resolution, SampleSet,
    WindowSpec, resolve_levels};
use crate::error::{Error, Result};

/// Aggregation level of a co-citation pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    Paper,
    Journal,
    Subject,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Paper, Level::Journal, Level::Subject];

    pub fn index(self) -> usize {
        match self {
            Level::Paper => 0,
            Level::Journal => 1,
            Level::Subject => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Level> {
        match i {
            0 => Some(Level::Paper),
            1 => Some(Level::Journal),
            2 => Some(Level::Subject),
            _ => None,
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Level::Paper => write!(f, "paper"),
            Level::Journal => write!(f, "journal"),
            Level::Subject => write!(f, "subject"),
        }
    }
}

/// String interning table. Ids are assigned in first-seen order, which makes
/// them deterministic for a fixed input ordering.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Interner {
    lookup: FxHashMap<Box<str>, u32>,
    strings: Vec<Box<str>>,
}

impl Interner {
    pub fn new() -> Self {
        Interner::default()
    }

    pub fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.lookup.get(s) {
            return id;
        }
        let id = u32::try_from(self.strings.len()).expect("interner overflow");
        let boxed: Box<str> = s.into();
        self.strings.push(boxed.clone());
        self.lookup.insert(boxed, id);
        id
    }

    pub fn get(&self, s: &str) -> Option<u32> {
        self.lookup.get(s).copied()
    }

    pub fn resolve(&self, id: u32) -> &str {
        &self.strings[id as usize]
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn strings(&self) -> impl Iterator<Item = &str> {
        self.strings.iter().map(|s| s.as_ref())
    }
}

/// Pack a canonical (a ≤ b) id pair into a map key.
#[inline]
pub(crate) fn pack_pair(a: u32, b: u32) -> u64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    ((lo as u64) << 32) | hi as u64
}

#[inline]
pub(crate) fn unpack_pair(key: u64) -> (u32, u32) {
    ((key >> 32) as u32, key as u32)
}

/// Pair frequencies F and element citation counts d for one
/// (interval, level) cell.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub(crate) pairs: FxHashMap<u64, u64>,
    pub(crate) elems: FxHashMap<u32, u64>,
}

impl CountTable {
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Σ F over all pairs in this cell.
    pub fn total_pair_events(&self) -> u64 {
        self.pairs.values().sum()
    }

    fn absorb(&mut self, other: CountTable) {
        for (k, v) in other.pairs {
            *self.pairs.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.elems {
            *self.elems.entry(k).or_insert(0) += v;
        }
    }
}

/// A cited work resolved against corpus and catalog, in interned form.
/// `journal` is `None` for dangling references and unindexed journals;
/// those stay countable at paper level only.
#[derive(Debug, Clone)]
pub(crate) struct ResolvedRef {
    pub paper: u32,
    pub journal: Option<u32>,
    pub subjects: SmallVec<[u32; 3]>,
}

#[derive(Debug, Clone)]
pub(crate) struct ResolvedPaper {
    pub citing: u32,
    pub refs: Vec<ResolvedRef>,
}

/// All pair and element counts for the three intervals and three levels,
/// plus the id table they are expressed in.
#[derive(Debug, Clone)]
pub struct IntervalCounts {
    window: WindowSpec,
    tables: [[CountTable; 3]; 3],
    interner: Interner,
    citing: [Vec<u32>; 3],
}

impl IntervalCounts {
    pub fn window(&self) -> &WindowSpec {
        &self.window
    }

    pub fn interner(&self) -> &Interner {
        &self.interner
    }

    pub(crate) fn table(&self, interval: Interval, level: Level) -> &CountTable {
        &self.tables[interval.index()][level.index()]
    }

    /// Pair frequency, symmetric in the two element ids.
    pub fn pair_freq(&self, interval: Interval, level: Level, a: &str, b: &str) -> u64 {
        match (self.interner.get(a), self.interner.get(b)) {
            (Some(a), Some(b)) => self.pair_freq_ids(interval, level, a, b),
            _ => 0,
        }
    }

    #[inline]
    pub(crate) fn pair_freq_ids(&self, interval: Interval, level: Level, a: u32, b: u32) -> u64 {
        self.table(interval, level)
            .pairs
            .get(&pack_pair(a, b))
            .copied()
            .unwrap_or(0)
    }

    /// Element citation count d within one interval.
    pub fn elem_count(&self, interval: Interval, level: Level, elem: &str) -> u64 {
        self.interner
            .get(elem)
            .map_or(0, |id| self.elem_count_id(interval, level, id))
    }

    #[inline]
    pub(crate) fn elem_count_id(&self, interval: Interval, level: Level, id: u32) -> u64 {
        self.table(interval, level)
            .elems
            .get(&id)
            .copied()
            .unwrap_or(0)
    }

    pub fn total_pair_events(&self, interval: Interval, level: Level) -> u64 {
        self.table(interval, level).total_pair_events()
    }

    /// Iterate pairs of one cell as (element a, element b, F); unordered.
    pub fn iter_pairs(
        &self,
        interval: Interval,
        level: Level,
    ) -> impl Iterator<Item = (&str, &str, u64)> {
        self.table(interval, level).pairs.iter().map(|(&k, &f)| {
            let (a, b) = unpack_pair(k);
            (self.interner.resolve(a), self.interner.resolve(b), f)
        })
    }

    /// Citing paper ids counted in an interval.
    pub fn citing_papers(&self, interval: Interval) -> impl Iterator<Item = &str> {
        self.citing[interval.index()]
            .iter()
            .map(|&id| self.interner.resolve(id))
    }

    pub fn citing_count(&self, interval: Interval) -> usize {
        self.citing[interval.index()].len()
    }
}

/// Resolve one record's references in interned form. Interning order is the
/// reference order of the record, so it is deterministic for a fixed corpus.
fn resolve_record(
    record: &PaperRecord,
    corpus: &Corpus,
    catalog: &JournalCatalog,
    interner: &mut Interner,
) -> ResolvedPaper {
    let citing = interner.intern(&record.id);
    let refs = record
        .references
        .iter()
        .map(|cited| {
            let paper = interner.intern(cited);
            match resolve_levels(corpus, catalog, cited) {
                Resolution::Full {
                    journal,
                    categories,
                } => ResolvedRef {
                    paper,
                    journal: Some(interner.intern(journal)),
                    subjects: categories.iter().map(|c| interner.intern(c)).collect(),
                },
                Resolution::UnindexedJournal { .. } | Resolution::Dangling => ResolvedRef {
                    paper,
                    journal: None,
                    subjects: SmallVec::new(),
                },
            }
        })
        .collect();
    ResolvedPaper { citing, refs }
}

pub(crate) fn resolve_sample(
    sample: &SampleSet,
    corpus: &Corpus,
    catalog: &JournalCatalog,
    interner: &mut Interner,
) -> Vec<ResolvedPaper> {
    sample
        .records(corpus)
        .map(|record| resolve_record(record, corpus, catalog, interner))
        .collect()
}

/// Count one chunk of citing papers into fresh per-level tables.
fn count_chunk(papers: &[ResolvedPaper]) -> [CountTable; 3] {
    let mut tables: [CountTable; 3] = Default::default();
    for paper in papers {
        for r in &paper.refs {
            *tables[Level::Paper.index()].elems.entry(r.paper).or_insert(0) += 1;
            if let Some(journal) = r.journal {
                *tables[Level::Journal.index()].elems.entry(journal).or_insert(0) += 1;
            }
            for &sc in &r.subjects {
                *tables[Level::Subject.index()].elems.entry(sc).or_insert(0) += 1;
            }
        }
        let refs = &paper.refs;
        for i in 0..refs.len() {
            for j in (i + 1)..refs.len() {
                let (ri, rj) = (&refs[i], &refs[j]);
                *tables[Level::Paper.index()]
                    .pairs
                    .entry(pack_pair(ri.paper, rj.paper))
                    .or_insert(0) += 1;
                if let (Some(ja), Some(jb)) = (ri.journal, rj.journal) {
                    *tables[Level::Journal.index()]
                        .pairs
                        .entry(pack_pair(ja, jb))
                        .or_insert(0) += 1;
                }
                for &sa in &ri.subjects {
                    for &sb in &rj.subjects {
                        *tables[Level::Subject.index()]
                            .pairs
                            .entry(pack_pair(sa, sb))
                            .or_insert(0) += 1;
                    }
                }
            }
        }
    }
    tables
}

fn count_interval(papers: &[ResolvedPaper], shards: usize) -> [CountTable; 3] {
    if shards <= 1 || papers.len() < 2 {
        return count_chunk(papers);
    }
    let chunk_size = papers.len().div_ceil(shards);
    let partials: Vec<[CountTable; 3]> = papers
        .par_chunks(chunk_size)
        .map(count_chunk)
        .collect();
    // Integer addition commutes, so draining shards in order is both
    // deterministic and equal to any other merge order.
    let mut merged: [CountTable; 3] = Default::default();
    for partial in partials {
        for (dst, src) in merged.iter_mut().zip(partial) {
            dst.absorb(src);
        }
    }
    merged
}

/// Count pair frequencies and element citations for all three intervals.
///
/// `samples` must come from `select_sample` over the same window, one per
/// interval. `shards` controls parallelism only; any value produces the
/// same counts.
pub fn count_intervals(
    corpus: &Corpus,
    catalog: &JournalCatalog,
    window: &WindowSpec,
    samples: &[SampleSet; 3],
    shards: usize,
) -> Result<IntervalCounts> {
    let mut interner = Interner::new();
    let mut resolved: [Vec<ResolvedPaper>; 3] = Default::default();
    let mut citing: [Vec<u32>; 3] = Default::default();
    for sample in samples {
        let years = window.years(sample.interval);
        for record in sample.records(corpus) {
            if !years.contains(&record.year) {
                return Err(Error::MergeMismatch);
            }
        }
        let papers = resolve_sample(sample, corpus, catalog, &mut interner);
        citing[sample.interval.index()] = papers.iter().map(|p| p.citing).collect();
        resolved[sample.interval.index()] = papers;
    }

    let mut tables: [[CountTable; 3]; 3] = Default::default();
    for interval in Interval::ALL {
        tables[interval.index()] = count_interval(&resolved[interval.index()], shards);
    }

    Ok(IntervalCounts {
        window: *window,
        tables,
        interner,
        citing,
    })
}

/// Merge counts built over disjoint partitions of the same sampled corpus.
///
/// Parts may carry different id tables; entries are reconciled by element
/// string. Overlapping citing-paper sets are a hard error. The merged value
/// is independent of part order.
pub fn merge_counts(parts: Vec<IntervalCounts>) -> Result<IntervalCounts> {
    let mut iter = parts.into_iter();
    let Some(mut merged) = iter.next() else {
        return Err(Error::MergeMismatch);
    };
    let mut seen_citing: [FxHashSet<String>; 3] = Default::default();
    for interval in Interval::ALL {
        for id in merged.citing_papers(interval) {
            seen_citing[interval.index()].insert(id.to_string());
        }
    }
    for part in iter {
        if part.window != merged.window {
            return Err(Error::MergeMismatch);
        }
        for interval in Interval::ALL {
            for id in part.citing_papers(interval) {
                if !seen_citing[interval.index()].insert(id.to_string()) {
                    return Err(Error::OverlappingPartitions(id.to_string()));
                }
            }
        }
        // Remap the part's ids into the accumulator's interner.
        let remap: Vec<u32> = part
            .interner
            .strings()
            .map(|s| merged.interner.intern(s))
            .collect();
        for interval in Interval::ALL {
            let part_citing = &part.citing[interval.index()];
            merged.citing[interval.index()]
                .extend(part_citing.iter().map(|&id| remap[id as usize]));
            for level in Level::ALL {
                let src = &part.tables[interval.index()][level.index()];
                let dst = &mut merged.tables[interval.index()][level.index()];
                for (&key, &freq) in &src.pairs {
                    let (a, b) = unpack_pair(key);
                    let key = pack_pair(remap[a as usize], remap[b as usize]);
                    *dst.pairs.entry(key).or_insert(0) += freq;
                }
                for (&elem, &count) in &src.elems {
                    *dst.elems.entry(remap[elem as usize]).or_insert(0) += count;
                }
            }
        }
    }
    Ok(merged)
}

/// Enumerate one record's co-citation pairs at a level, as element id pairs
/// canonicalized lexicographically. Repeats express multiplicity. Cited
/// works that do not resolve to an indexed journal are skipped at the
/// journal and subject levels.
pub fn enumerate_pairs(
    record: &PaperRecord,
    corpus: &Corpus,
    catalog: &JournalCatalog,
    level: Level,
) -> Vec<(String, String)> {
    let mut interner = Interner::new();
    let resolved = resolve_record(record, corpus, catalog, &mut interner);
    let mut out = Vec::new();
    let mut push = |interner: &Interner, a: u32, b: u32| {
        let (a, b) = (interner.resolve(a), interner.resolve(b));
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        out.push((a.to_string(), b.to_string()));
    };
    let refs = &resolved.refs;
    for i in 0..refs.len() {
        for j in (i + 1)..refs.len() {
            let (ri, rj) = (&refs[i], &refs[j]);
            match level {
                Level::Paper => push(&interner, ri.paper, rj.paper),
                Level::Journal => {
                    if let (Some(a), Some(b)) = (ri.journal, rj.journal) {
                        push(&interner, a, b);
                    }
                }
                Level::Subject => {
                    for &sa in &ri.subjects {
                        for &sb in &rj.subjects {
                            push(&interner, sa, sb);
                        }
                    }
                }
            }
        }
    }
    out
}
