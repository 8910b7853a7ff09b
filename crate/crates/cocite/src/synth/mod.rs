//! Seeded synthetic corpora with controllable structure, plus an
//! independent brute-force scorer used as the verification oracle for the
//! optimized pipeline.
//!
//! The generator uses ChaCha8 (a portable, documented stream cipher RNG)
//! so identical configs reproduce identical corpora on any platform.

pub mod oracle;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cooccur::Level;
use crate::corpus::{Corpus, Interval, JournalCatalog, PaperRecord, WindowSpec};
use crate::error::{Error, Result};

/// A deliberately over-represented pair in one interval: the designated
/// pair's chance of being co-cited by an interval paper is
/// `multiplier × base_pair_prob` instead of `base_pair_prob`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlantedTrend {
    pub level: Level,
    pub a: String,
    pub b: String,
    pub interval: Interval,
    pub multiplier: f64,
}

/// Generator configuration. Deserializable from TOML or JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub window: WindowSpec,
    pub journal_count: u32,
    pub subject_count: u32,
    /// Chance of assigning each additional subject category to a journal
    /// beyond its base one.
    #[serde(default = "default_extra_category_prob")]
    pub extra_category_prob: f64,
    pub papers_per_year: u32,
    pub refs_min: u32,
    pub refs_max: u32,
    /// Exponent of the preferential-attachment weight (citations+1)^α.
    #[serde(default = "default_attachment_exponent")]
    pub attachment_exponent: f64,
    /// Baseline chance that a designated pair is co-cited by one paper;
    /// planted trends multiply this.
    #[serde(default = "default_base_pair_prob")]
    pub base_pair_prob: f64,
    #[serde(default)]
    pub planted: Vec<PlantedTrend>,
}

fn default_extra_category_prob() -> f64 {
    0.2
}

fn default_attachment_exponent() -> f64 {
    1.0
}

fn default_base_pair_prob() -> f64 {
    0.05
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let bail = |msg: String| Err(Error::InfeasibleSynthConfig(msg));
        if self.papers_per_year == 0 {
            return bail("papers_per_year of zero produces an empty corpus".into());
        }
        if self.journal_count == 0 || self.subject_count == 0 {
            return bail("journal_count and subject_count must be positive".into());
        }
        if self.refs_min > self.refs_max {
            return bail(format!(
                "refs_min {} exceeds refs_max {}",
                self.refs_min, self.refs_max
            ));
        }
        let years = self.window.full_span().count() as u64;
        let max_available = (years - 1) * self.papers_per_year as u64;
        if self.refs_min as u64 > max_available {
            return bail(format!(
                "refs_min {} exceeds the {} papers available before the final year",
                self.refs_min, max_available
            ));
        }
        if !(0.0..=1.0).contains(&self.extra_category_prob)
            || !(0.0..=1.0).contains(&self.base_pair_prob)
        {
            return bail("probabilities must lie in [0, 1]".into());
        }
        if self.attachment_exponent < 0.0 {
            return bail("attachment_exponent must be non-negative".into());
        }
        for trend in &self.planted {
            if trend.multiplier < 1.0 {
                return bail(format!(
                    "trend multiplier {} must be at least 1",
                    trend.multiplier
                ));
            }
        }
        Ok(())
    }
}

/// Fenwick tree over per-paper attachment weights; supports O(log n)
/// weight updates and weighted sampling by prefix-sum descent.
struct WeightedIndex {
    tree: Vec<f64>,
}

impl WeightedIndex {
    fn new(capacity: usize) -> Self {
        WeightedIndex {
            tree: vec![0.0; capacity + 1],
        }
    }

    fn add(&mut self, index: usize, delta: f64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        self.prefix(self.tree.len() - 1)
    }

    fn prefix(&self, mut count: usize) -> f64 {
        let mut sum = 0.0;
        while count > 0 {
            sum += self.tree[count];
            count -= count & count.wrapping_neg();
        }
        sum
    }

    /// Index of the first element whose cumulative weight exceeds `target`.
    fn locate(&self, mut target: f64) -> usize {
        let mut pos = 0usize;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos // zero-based element index
    }
}

fn paper_id(index: usize) -> String {
    format!("P{index:06}")
}

fn journal_id(index: u32) -> String {
    format!("J{index:03}")
}

fn subject_id(index: u32) -> String {
    format!("SC{index:02}")
}

/// Generate a corpus and catalog from a config. Output is a pure function
/// of the config; references only point to earlier-year papers.
pub fn generate_corpus(config: &SynthConfig) -> Result<(Corpus, JournalCatalog)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut catalog = JournalCatalog::new();
    for j in 0..config.journal_count {
        let journal = journal_id(j);
        let name = format!("Journal {j}");
        catalog.assign(&journal, &subject_id(j % config.subject_count), &name);
        for sc in 0..config.subject_count {
            if sc != j % config.subject_count && rng.random::<f64>() < config.extra_category_prob {
                catalog.assign(&journal, &subject_id(sc), &name);
            }
        }
    }

    let years: Vec<i32> = config.window.full_span().collect();
    let total_papers = years.len() * config.papers_per_year as usize;
    let mut weights = WeightedIndex::new(total_papers);
    let exponent = config.attachment_exponent;
    let weight_of = |citations: u32| ((citations + 1) as f64).powf(exponent);

    // Static metadata of every paper, filled year by year.
    let mut paper_years: Vec<i32> = Vec::with_capacity(total_papers);
    let mut paper_journals: Vec<u32> = Vec::with_capacity(total_papers);
    let mut citations: Vec<u32> = vec![0; total_papers];
    // Prior papers by journal and by subject category, for trend injection.
    let mut by_journal: Vec<Vec<usize>> = vec![Vec::new(); config.journal_count as usize];
    let mut by_subject: Vec<Vec<usize>> = vec![Vec::new(); config.subject_count as usize];

    let mut trend_available: Vec<bool> = vec![false; config.planted.len()];
    let mut references: Vec<Vec<usize>> = Vec::with_capacity(total_papers);

    let mut citable = 0usize; // papers from earlier years, eligible targets
    for (year_idx, &year) in years.iter().enumerate() {
        // Papers of the previous year become citable.
        let newly_citable = year_idx * config.papers_per_year as usize;
        while citable < newly_citable {
            weights.add(citable, weight_of(0));
            let journal = paper_journals[citable] as usize;
            by_journal[journal].push(citable);
            for cat in catalog
                .categories_of(&journal_id(paper_journals[citable]))
                .unwrap_or(&[])
            {
                let sc_index: usize = cat[2..].parse().expect("generated subject id");
                by_subject[sc_index].push(citable);
            }
            citable += 1;
        }

        for _ in 0..config.papers_per_year {
            let journal = rng.random_range(0..config.journal_count);
            let target = rng.random_range(config.refs_min..=config.refs_max) as usize;
            let take = target.min(citable);
            let mut refs: Vec<usize> = Vec::with_capacity(take);
            if take == citable {
                refs.extend(0..citable);
            } else {
                let mut chosen = rustc_hash::FxHashSet::default();
                while refs.len() < take {
                    let total = weights.total();
                    let pick = weights.locate(rng.random::<f64>() * total);
                    let pick = pick.min(citable - 1);
                    if chosen.insert(pick) {
                        refs.push(pick);
                    }
                }
            }

            // Trend injection: force-include the designated pair with the
            // boosted probability.
            let interval = config.window.interval_of(year);
            for (t_idx, trend) in config.planted.iter().enumerate() {
                if interval != Some(trend.interval) {
                    continue;
                }
                let elements = trend_elements(
                    trend,
                    citable,
                    &by_journal,
                    &by_subject,
                    &mut rng,
                );
                let Some((first, second)) = elements else {
                    continue;
                };
                trend_available[t_idx] = true;
                let chance = (trend.multiplier * config.base_pair_prob).min(1.0);
                if rng.random::<f64>() < chance {
                    if !refs.contains(&first) {
                        refs.push(first);
                    }
                    if !refs.contains(&second) {
                        refs.push(second);
                    }
                }
            }

            for &cited in &refs {
                let old = weight_of(citations[cited]);
                citations[cited] += 1;
                weights.add(cited, weight_of(citations[cited]) - old);
            }

            paper_years.push(year);
            paper_journals.push(journal);
            references.push(refs);
        }
    }

    for (t_idx, trend) in config.planted.iter().enumerate() {
        if !trend_available[t_idx] {
            return Err(Error::InfeasibleSynthConfig(format!(
                "planted trend on ({:?}, {:?}) was never realizable in its interval",
                trend.a, trend.b
            )));
        }
    }

    let mut corpus = Corpus::new();
    for index in 0..total_papers {
        corpus.push(PaperRecord {
            id: paper_id(index),
            year: paper_years[index],
            journal: journal_id(paper_journals[index]),
            references: references[index].iter().map(|&r| paper_id(r)).collect(),
        })?;
    }
    Ok((corpus, catalog))
}

/// Resolve a trend's designated pair to two citable paper indices, or
/// `None` when the elements are not available yet.
fn trend_elements(
    trend: &PlantedTrend,
    citable: usize,
    by_journal: &[Vec<usize>],
    by_subject: &[Vec<usize>],
    rng: &mut ChaCha8Rng,
) -> Option<(usize, usize)> {
    let parse_index = |id: &str, prefix: &str| -> Option<usize> {
        id.strip_prefix(prefix).and_then(|s| s.parse().ok())
    };
    match trend.level {
        Level::Paper => {
            let a = parse_index(&trend.a, "P")?;
            let b = parse_index(&trend.b, "P")?;
            (a != b && a < citable && b < citable).then_some((a, b))
        }
        Level::Journal => {
            let a = parse_index(&trend.a, "J")?;
            let b = parse_index(&trend.b, "J")?;
            pick_pair(by_journal.get(a)?, by_journal.get(b)?, a == b, rng)
        }
        Level::Subject => {
            let a = parse_index(&trend.a, "SC")?;
            let b = parse_index(&trend.b, "SC")?;
            pick_pair(by_subject.get(a)?, by_subject.get(b)?, a == b, rng)
        }
    }
}

fn pick_pair(
    pool_a: &[usize],
    pool_b: &[usize],
    same_pool: bool,
    rng: &mut ChaCha8Rng,
) -> Option<(usize, usize)> {
    if same_pool {
        if pool_a.len() < 2 {
            return None;
        }
        let i = rng.random_range(0..pool_a.len());
        let mut j = rng.random_range(0..pool_a.len() - 1);
        if j >= i {
            j += 1;
        }
        Some((pool_a[i], pool_a[j]))
    } else {
        if pool_a.is_empty() || pool_b.is_empty() {
            return None;
        }
        let a = pool_a[rng.random_range(0..pool_a.len())];
        let b = pool_b[rng.random_range(0..pool_b.len())];
        (a != b).then_some((a, b))
    }
}
