//! Hit-paper labeling, percentile analysis, hit-probability curves,
//! logistic model fitting, and mutual information.

pub mod logistic;

use std::collections::BTreeMap;
use std::hash::Hash;
use std::io::Write;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::indexes::{PaperScoreVector, ScoreVar};
use crate::provenance::Meta;

pub use logistic::{LogisticFit, TermBlock, fit_logistic, hierarchical_fit, null_deviance};

/// Binary top-impact labels over the sampled papers.
#[derive(Debug, Clone)]
pub struct HitLabels {
    by_paper: BTreeMap<String, bool>,
    /// Smallest citation count that labels a paper a hit.
    pub threshold: u64,
    pub realized_rate: f64,
    /// Set when ties forced the realized rate far from the target.
    pub degenerate_ties: bool,
}

impl HitLabels {
    pub fn get(&self, paper_id: &str) -> Option<bool> {
        self.by_paper.get(paper_id).copied()
    }

    pub fn len(&self) -> usize {
        self.by_paper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_paper.is_empty()
    }

    pub fn hit_count(&self) -> usize {
        self.by_paper.values().filter(|&&v| v).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.by_paper.iter().map(|(id, &hit)| (id.as_str(), hit))
    }
}

/// Label the top `top_frac` of papers by future citation count.
///
/// The threshold is the smallest count whose tail fraction does not exceed
/// `top_frac`; ties are included or excluded together. When even the
/// maximum count exceeds the target fraction, the maximum is used and the
/// labeling is flagged degenerate.
pub fn hit_labels(future_citations: &[(String, u64)], top_frac: f64) -> Result<HitLabels> {
    if future_citations.is_empty() {
        return Err(Error::DegenerateStatistics(
            "no papers to label as hits".into(),
        ));
    }
    if !(0.0..1.0).contains(&top_frac) || top_frac <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "top_frac must lie in (0, 1), got {top_frac}"
        )));
    }
    let n = future_citations.len();
    let mut tail: BTreeMap<u64, usize> = BTreeMap::new();
    for (_, count) in future_citations {
        *tail.entry(*count).or_insert(0) += 1;
    }
    if tail.len() == 1 {
        return Err(Error::DegenerateStatistics(
            "every paper has the same citation count; top fraction is undefined".into(),
        ));
    }

    // Walk distinct counts descending, accumulating the tail size. Pick the
    // smallest count still within the target fraction.
    let mut cumulative = 0usize;
    let mut threshold: Option<u64> = None;
    for (&count, &freq) in tail.iter().rev() {
        cumulative += freq;
        if cumulative as f64 / n as f64 <= top_frac {
            threshold = Some(count);
        } else {
            break;
        }
    }
    let (threshold, degenerate_ties) = match threshold {
        Some(v) => (v, false),
        // Even the maximum count overshoots the fraction; a zero-hit
        // labeling is useless, so fall back to the maximum and flag it.
        None => (*tail.keys().next_back().unwrap(), true),
    };

    let by_paper: BTreeMap<String, bool> = future_citations
        .iter()
        .map(|(id, count)| (id.clone(), *count >= threshold))
        .collect();
    let hits = by_paper.values().filter(|&&v| v).count();
    Ok(HitLabels {
        by_paper,
        threshold,
        realized_rate: hits as f64 / n as f64,
        degenerate_ties,
    })
}

/// Integer percentiles in [1, 100] with max-rank tie handling: tied values
/// share the percentile of their highest rank.
#[derive(Debug, Clone)]
pub struct PercentileSeries {
    pub variable: String,
    by_paper: BTreeMap<String, u32>,
}

impl PercentileSeries {
    pub fn get(&self, paper_id: &str) -> Option<u32> {
        self.by_paper.get(paper_id).copied()
    }

    pub fn len(&self) -> usize {
        self.by_paper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_paper.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.by_paper.iter().map(|(id, &p)| (id.as_str(), p))
    }
}

/// Percentile of each value: rank r(x) = |{v : v ≤ x}|, percentile
/// ⌈100·r/N⌉.
pub fn percentile_rank(variable: &str, values: &[(String, f64)]) -> PercentileSeries {
    let n = values.len() as u64;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .1
            .partial_cmp(&values[b].1)
            .expect("scores are finite")
    });
    let mut by_paper = BTreeMap::new();
    let mut i = 0;
    while i < order.len() {
        // run of tied values: all receive the max rank of the run
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]].1 == values[order[i]].1 {
            j += 1;
        }
        let rank = (j + 1) as u64;
        let percentile = (100 * rank).div_ceil(n) as u32;
        for &idx in &order[i..=j] {
            by_paper.insert(values[idx].0.clone(), percentile);
        }
        i = j + 1;
    }
    PercentileSeries {
        variable: variable.to_string(),
        by_paper,
    }
}

/// One occupied percentile bin of a hit-probability curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub percentile: u32,
    pub probability: f64,
    pub n: u64,
}

/// Hit probability per occupied percentile bin, ascending. The bin-weighted
/// mean equals the overall hit rate over the shared domain.
pub fn hit_curve(series: &PercentileSeries, labels: &HitLabels) -> Vec<CurvePoint> {
    let mut bins: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for (id, percentile) in series.iter() {
        if let Some(hit) = labels.get(id) {
            let bin = bins.entry(percentile).or_insert((0, 0));
            bin.1 += 1;
            if hit {
                bin.0 += 1;
            }
        }
    }
    bins.into_iter()
        .map(|(percentile, (hits, n))| CurvePoint {
            percentile,
            probability: hits as f64 / n as f64,
            n,
        })
        .collect()
}

/// Mutual information between a percentile series and the hit labels.
#[derive(Debug, Clone, Serialize)]
pub struct MIResult {
    pub variable: String,
    pub mi_bits: f64,
}

/// Plugin (maximum-likelihood) mutual information in bits over a sample of
/// discrete pairs. Empty cells contribute nothing; the estimate is clamped
/// at zero against negative round-off.
pub fn plugin_mi_bits<A, B>(pairs: &[(A, B)]) -> f64
where
    A: Eq + Hash + Clone,
    B: Eq + Hash + Clone,
{
    let n = pairs.len();
    if n == 0 {
        return 0.0;
    }
    let mut joint: FxHashMap<(A, B), u64> = FxHashMap::default();
    let mut margin_a: FxHashMap<A, u64> = FxHashMap::default();
    let mut margin_b: FxHashMap<B, u64> = FxHashMap::default();
    for (a, b) in pairs {
        *joint.entry((a.clone(), b.clone())).or_insert(0) += 1;
        *margin_a.entry(a.clone()).or_insert(0) += 1;
        *margin_b.entry(b.clone()).or_insert(0) += 1;
    }
    let n = n as f64;
    let mut mi = 0.0;
    for ((a, b), &count) in &joint {
        let p_xy = count as f64 / n;
        let p_x = margin_a[a] as f64 / n;
        let p_y = margin_b[b] as f64 / n;
        mi += p_xy * (p_xy / (p_x * p_y)).log2();
    }
    mi.max(0.0)
}

/// MI between percentile bins and hit labels over their shared domain.
pub fn mutual_information(labels: &HitLabels, series: &PercentileSeries) -> MIResult {
    let pairs: Vec<(u32, bool)> = series
        .iter()
        .filter_map(|(id, pct)| labels.get(id).map(|hit| (pct, hit)))
        .collect();
    MIResult {
        variable: series.variable.clone(),
        mi_bits: plugin_mi_bits(&pairs),
    }
}

/// Analysis configuration: hit fraction and per-variable polynomial
/// degrees (defaults applied for absent entries).
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub top_frac: f64,
    pub degrees: BTreeMap<ScoreVar, usize>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            top_frac: 0.05,
            degrees: BTreeMap::new(),
        }
    }
}

impl AnalyzeOptions {
    pub fn degree_of(&self, var: ScoreVar) -> usize {
        self.degrees
            .get(&var)
            .copied()
            .unwrap_or_else(|| var.default_degree())
    }
}

/// Per-variable outcome: curve, fit (when the preconditions held), MI.
#[derive(Debug)]
pub struct VariableAnalysis {
    pub variable: ScoreVar,
    pub degree: usize,
    pub curve: Vec<CurvePoint>,
    pub fit: Option<LogisticFit>,
    pub fit_skipped: Option<String>,
    pub mi_bits: f64,
    pub n: usize,
}

/// Hierarchical entry sequences, nested by variable blocks.
#[derive(Debug)]
pub struct HierarchicalAnalysis {
    pub name: String,
    pub variables: Vec<ScoreVar>,
    pub n: usize,
    pub fits: Vec<LogisticFit>,
}

/// Full downstream analysis of a score table.
#[derive(Debug)]
pub struct AnalysisResult {
    pub labels: HitLabels,
    pub variables: Vec<VariableAnalysis>,
    pub hierarchical: Vec<HierarchicalAnalysis>,
}

/// The two hierarchical entry orders: citation-, then journal-, then
/// subject-category based scores.
pub const HIERARCHIES: [(&str, [ScoreVar; 3]); 2] = [
    (
        "alternative",
        [ScoreVar::CitAltMean, ScoreVar::JrAltMean, ScoreVar::ScAltMean],
    ),
    (
        "anticipation",
        [ScoreVar::AcitMean, ScoreVar::AjrMean, ScoreVar::AscMean],
    ),
];

/// Run the whole downstream analysis: hit labels from future citations,
/// then per-variable percentiles, curves, bivariate fits, MI, and the two
/// hierarchical fit sequences. Missing scores are deleted listwise per
/// variable (jointly for hierarchical fits).
pub fn analyze(scores: &[PaperScoreVector], options: &AnalyzeOptions) -> Result<AnalysisResult> {
    let future: Vec<(String, u64)> = scores
        .iter()
        .map(|v| (v.paper_id.clone(), v.future_citations))
        .collect();
    let labels = hit_labels(&future, options.top_frac)?;

    let mut variables = Vec::new();
    for var in ScoreVar::ALL {
        let values: Vec<(String, f64)> = scores
            .iter()
            .filter_map(|v| var.extract(v).map(|x| (v.paper_id.clone(), x)))
            .collect();
        if values.is_empty() {
            variables.push(VariableAnalysis {
                variable: var,
                degree: options.degree_of(var),
                curve: Vec::new(),
                fit: None,
                fit_skipped: Some("no observations".into()),
                mi_bits: 0.0,
                n: 0,
            });
            continue;
        }
        let series = percentile_rank(var.column(), &values);
        let curve = hit_curve(&series, &labels);
        let mi = mutual_information(&labels, &series);
        let degree = options.degree_of(var);
        let (x, y) = joined_xy(&[&series], &labels);
        let fit = match fit_logistic(
            &[TermBlock::new(var.column(), degree, x.into_iter().next().unwrap())],
            &y,
            None,
        ) {
            Ok(fit) => (Some(fit), None),
            Err(Error::DegenerateStatistics(reason)) => (None, Some(reason)),
            Err(e) => return Err(e),
        };
        variables.push(VariableAnalysis {
            variable: var,
            degree,
            curve,
            fit: fit.0,
            fit_skipped: fit.1,
            mi_bits: mi.mi_bits,
            n: values.len(),
        });
    }

    let mut hierarchical = Vec::new();
    for (name, vars) in HIERARCHIES {
        let series: Vec<PercentileSeries> = vars
            .iter()
            .map(|var| {
                let values: Vec<(String, f64)> = scores
                    .iter()
                    .filter_map(|v| var.extract(v).map(|x| (v.paper_id.clone(), x)))
                    .collect();
                percentile_rank(var.column(), &values)
            })
            .collect();
        let refs: Vec<&PercentileSeries> = series.iter().collect();
        let (xs, y) = joined_xy(&refs, &labels);
        if y.is_empty() {
            continue;
        }
        let blocks: Vec<TermBlock> = vars
            .iter()
            .zip(xs)
            .map(|(var, x)| TermBlock::new(var.column(), options.degree_of(*var), x))
            .collect();
        match hierarchical_fit(&blocks, &y) {
            Ok(fits) => hierarchical.push(HierarchicalAnalysis {
                name: name.to_string(),
                variables: vars.to_vec(),
                n: y.len(),
                fits,
            }),
            Err(Error::DegenerateStatistics(_)) => {}
            Err(e) => return Err(e),
        }
    }

    Ok(AnalysisResult {
        labels,
        variables,
        hierarchical,
    })
}

/// Joint listwise deletion: keep papers present in every series and the
/// labels; percentiles are scaled to (0, 1].
fn joined_xy(series: &[&PercentileSeries], labels: &HitLabels) -> (Vec<Vec<f64>>, Vec<bool>) {
    let mut xs = vec![Vec::new(); series.len()];
    let mut y = Vec::new();
    let Some(first) = series.first() else {
        // Intercept-only callers join the labels alone.
        return (xs, labels.iter().map(|(_, hit)| hit).collect());
    };
    'paper: for (id, _) in first.iter() {
        let Some(hit) = labels.get(id) else {
            continue;
        };
        let mut row = Vec::with_capacity(series.len());
        for s in series {
            match s.get(id) {
                Some(pct) => row.push(pct as f64 / 100.0),
                None => continue 'paper,
            }
        }
        for (slot, value) in xs.iter_mut().zip(row) {
            slot.push(value);
        }
        y.push(hit);
    }
    (xs, y)
}

// ---- report output ----------------------------------------------------

#[derive(Serialize)]
struct ReportMeta<'a> {
    tool_version: &'a str,
    config_digest: &'a str,
    inputs: Vec<ReportInput<'a>>,
}

#[derive(Serialize)]
struct ReportInput<'a> {
    name: &'a str,
    sha256: &'a str,
}

#[derive(Serialize)]
struct HitReport {
    n: usize,
    hit_count: usize,
    threshold: u64,
    realized_rate: f64,
    degenerate_ties: bool,
}

#[derive(Serialize)]
struct VariableReport<'a> {
    variable: &'a str,
    degree: usize,
    n: usize,
    mi_bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<&'a LogisticFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit_skipped: Option<&'a str>,
}

#[derive(Serialize)]
struct HierarchicalStepReport<'a> {
    variable_added: &'a str,
    degree_added: usize,
    residual_deviance: f64,
    deviance_drop: f64,
    df_added: usize,
    converged: bool,
    separation: bool,
}

#[derive(Serialize)]
struct HierarchicalReport<'a> {
    name: &'a str,
    n: usize,
    null_deviance: f64,
    steps: Vec<HierarchicalStepReport<'a>>,
}

#[derive(Serialize)]
struct AnalysisReport<'a> {
    meta: ReportMeta<'a>,
    hits: HitReport,
    bivariate: Vec<VariableReport<'a>>,
    hierarchical: Vec<HierarchicalReport<'a>>,
}

/// Write the fits-and-MI report as pretty JSON.
pub fn write_report_json(
    result: &AnalysisResult,
    meta: &Meta,
    writer: &mut impl Write,
) -> Result<()> {
    let report = AnalysisReport {
        meta: ReportMeta {
            tool_version: &meta.tool_version,
            config_digest: &meta.config_digest,
            inputs: meta
                .input_digests
                .iter()
                .map(|(name, sha256)| ReportInput { name, sha256 })
                .collect(),
        },
        hits: HitReport {
            n: result.labels.len(),
            hit_count: result.labels.hit_count(),
            threshold: result.labels.threshold,
            realized_rate: result.labels.realized_rate,
            degenerate_ties: result.labels.degenerate_ties,
        },
        bivariate: result
            .variables
            .iter()
            .map(|v| VariableReport {
                variable: v.variable.column(),
                degree: v.degree,
                n: v.n,
                mi_bits: v.mi_bits,
                fit: v.fit.as_ref(),
                fit_skipped: v.fit_skipped.as_deref(),
            })
            .collect(),
        hierarchical: result
            .hierarchical
            .iter()
            .map(|h| HierarchicalReport {
                name: &h.name,
                n: h.n,
                null_deviance: h.fits[0].residual_deviance,
                steps: h
                    .fits
                    .windows(2)
                    .zip(&h.variables)
                    .map(|(pair, var)| HierarchicalStepReport {
                        variable_added: var.column(),
                        degree_added: pair[1].variables.last().map_or(0, |(_, d)| *d),
                        residual_deviance: pair[1].residual_deviance,
                        deviance_drop: pair[0].residual_deviance - pair[1].residual_deviance,
                        df_added: pair[1].coefficients.len() - pair[0].coefficients.len(),
                        converged: pair[1].converged,
                        separation: pair[1].separation,
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *writer, &report)?;
    writer
        .write_all(b"\n")
        .map_err(|e| Error::io("writing report", e))?;
    Ok(())
}

/// Write every variable's hit curve as CSV: variable, percentile,
/// probability, n.
pub fn write_curves_csv(
    result: &AnalysisResult,
    meta: &Meta,
    writer: &mut impl Write,
) -> Result<()> {
    for line in meta.comment_lines() {
        writeln!(writer, "{line}").map_err(|e| Error::io("writing curves", e))?;
    }
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record(["variable", "percentile", "probability", "n"])?;
    for v in &result.variables {
        for point in &v.curve {
            csv_writer.write_record([
                v.variable.column().to_string(),
                point.percentile.to_string(),
                point.probability.to_string(),
                point.n.to_string(),
            ])?;
        }
    }
    csv_writer
        .flush()
        .map_err(|e| Error::io("writing curves", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("P{i:05}")).collect()
    }

    #[test]
    fn top_five_percent_of_distinct_counts() {
        let papers: Vec<(String, u64)> = ids(100)
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id, i as u64))
            .collect();
        let labels = hit_labels(&papers, 0.05).unwrap();
        assert_eq!(labels.threshold, 95);
        assert_eq!(labels.hit_count(), 5);
        assert_eq!(labels.realized_rate, 0.05);
        assert!(!labels.degenerate_ties);
        for (id, count) in &papers {
            assert_eq!(labels.get(id).unwrap(), *count >= 95);
        }
    }

    #[test]
    fn tie_heavy_counts_fall_back_with_a_flag() {
        let papers: Vec<(String, u64)> = [5u64, 5, 5, 5, 1]
            .iter()
            .enumerate()
            .map(|(i, &c)| (format!("P{i}"), c))
            .collect();
        let labels = hit_labels(&papers, 0.2).unwrap();
        assert_eq!(labels.threshold, 5);
        assert!(labels.degenerate_ties);
        assert_eq!(labels.realized_rate, 0.8);
    }

    #[test]
    fn unique_maximum_is_the_only_hit() {
        let papers: Vec<(String, u64)> = [0u64, 1, 1, 2, 9]
            .iter()
            .enumerate()
            .map(|(i, &c)| (format!("P{i}"), c))
            .collect();
        let labels = hit_labels(&papers, 0.2).unwrap();
        assert_eq!(labels.hit_count(), 1);
        assert!(labels.get("P4").unwrap());
        assert!(!labels.degenerate_ties);
    }

    #[test]
    fn constant_counts_are_a_degenerate_error() {
        let papers: Vec<(String, u64)> =
            ids(10).into_iter().map(|id| (id, 3u64)).collect();
        assert!(matches!(
            hit_labels(&papers, 0.05).unwrap_err(),
            Error::DegenerateStatistics(_)
        ));
    }

    #[test]
    fn distinct_values_fill_percentiles_one_to_hundred() {
        let values: Vec<(String, f64)> = ids(100)
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id, i as f64))
            .collect();
        let series = percentile_rank("v", &values);
        let mut seen: Vec<u32> = series.iter().map(|(_, p)| p).collect();
        seen.sort_unstable();
        assert_eq!(seen, (1..=100).collect::<Vec<u32>>());
    }

    #[test]
    fn massive_ties_share_one_percentile() {
        // 80 identical values among 100: all get percentile ⌈100·80/100⌉ = 80
        let mut values: Vec<(String, f64)> = Vec::new();
        for (i, id) in ids(100).into_iter().enumerate() {
            let v = if i < 80 { 1.0 } else { 2.0 + i as f64 };
            values.push((id, v));
        }
        let series = percentile_rank("v", &values);
        for i in 0..80 {
            assert_eq!(series.get(&format!("P{i:05}")).unwrap(), 80);
        }
    }

    #[test]
    fn single_value_is_the_hundredth_percentile() {
        let series = percentile_rank("v", &[("only".into(), 42.0)]);
        assert_eq!(series.get("only").unwrap(), 100);
    }

    #[test]
    fn percentiles_are_invariant_under_monotone_transforms() {
        let values: Vec<(String, f64)> = ids(50)
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id, (i as f64 * 0.37).sin() + i as f64 * 0.01))
            .collect();
        let transformed: Vec<(String, f64)> = values
            .iter()
            .map(|(id, v)| (id.clone(), v.exp() * 3.0 + 1.0))
            .collect();
        let a = percentile_rank("v", &values);
        let b = percentile_rank("v", &transformed);
        for (id, p) in a.iter() {
            assert_eq!(b.get(id), Some(p));
        }
    }

    #[test]
    fn curve_weighted_mean_recovers_the_hit_rate() {
        let n = 1000;
        let papers: Vec<(String, u64)> = ids(n)
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id, (i * 7 % 113) as u64))
            .collect();
        let labels = hit_labels(&papers, 0.05).unwrap();
        let values: Vec<(String, f64)> = papers
            .iter()
            .map(|(id, c)| (id.clone(), (*c as f64 * 0.9).cos()))
            .collect();
        let curve = hit_curve(&percentile_rank("v", &values), &labels);
        let weighted: f64 = curve.iter().map(|p| p.probability * p.n as f64).sum();
        let total: f64 = curve.iter().map(|p| p.n as f64).sum();
        let rate = labels.hit_count() as f64 / labels.len() as f64;
        assert!((weighted / total - rate).abs() < 1e-12);
    }

    #[test]
    fn score_driven_labels_zero_the_lower_bins() {
        let n = 200;
        let values: Vec<(String, f64)> = ids(n)
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id, i as f64))
            .collect();
        // label = score above median → bins ≤ 50 have probability 0
        let papers: Vec<(String, u64)> = values
            .iter()
            .map(|(id, v)| (id.clone(), if *v >= 100.0 { 10 } else { 0 }))
            .collect();
        let labels = hit_labels(&papers, 0.5).unwrap();
        let curve = hit_curve(&percentile_rank("v", &values), &labels);
        for point in &curve {
            if point.percentile <= 50 {
                assert_eq!(point.probability, 0.0);
            } else {
                assert_eq!(point.probability, 1.0);
            }
        }
    }

    #[test]
    fn empty_bins_are_omitted() {
        // two distinct values among 10 papers → exactly two occupied bins
        let values: Vec<(String, f64)> = ids(10)
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id, if i < 5 { 1.0 } else { 2.0 }))
            .collect();
        let papers: Vec<(String, u64)> = ids(10)
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id, i as u64))
            .collect();
        let labels = hit_labels(&papers, 0.2).unwrap();
        let curve = hit_curve(&percentile_rank("v", &values), &labels);
        assert_eq!(curve.len(), 2);
        assert_eq!(curve[0].percentile, 50);
        assert_eq!(curve[1].percentile, 100);
    }

    #[test]
    fn independent_product_table_has_exactly_zero_mi() {
        // 4 bins × 100 papers each, 5 hits per bin: exact independence.
        let mut pairs = Vec::new();
        for bin in 0u32..4 {
            for k in 0..100 {
                pairs.push((bin, k < 5));
            }
        }
        assert_eq!(plugin_mi_bits(&pairs), 0.0);
    }

    #[test]
    fn deterministic_function_reaches_label_entropy() {
        // hit is a function of the bin; p(hit) = 0.05 → MI = H(0.05)
        let mut pairs = Vec::new();
        for bin in 0u32..100 {
            pairs.push((bin, bin >= 95));
        }
        let h = -(0.05f64 * 0.05f64.log2() + 0.95 * 0.95f64.log2());
        assert!((plugin_mi_bits(&pairs) - h).abs() < 1e-12);
        assert!((h - 0.28640).abs() < 1e-4);
    }

    #[test]
    fn mi_is_symmetric_and_non_negative() {
        let pairs: Vec<(u32, u32)> = (0..500u32)
            .map(|i| (i % 7, (i * i + 3 * i) % 5))
            .collect();
        let swapped: Vec<(u32, u32)> = pairs.iter().map(|&(a, b)| (b, a)).collect();
        let forward = plugin_mi_bits(&pairs);
        let backward = plugin_mi_bits(&swapped);
        assert!((forward - backward).abs() < 1e-12);
        assert!(forward >= 0.0);
    }

    #[test]
    fn shuffled_labels_keep_mi_near_the_plugin_bias() {
        // N = 10⁴, 100 bins, labels shuffled: MI ≈ bias ≈ (bins−1)/(2N ln 2)
        let n = 10_000u32;
        let mut state = 7u64;
        let mut pairs = Vec::with_capacity(n as usize);
        for i in 0..n {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let hit = ((state >> 11) as f64 / (1u64 << 53) as f64) < 0.05;
            pairs.push((i % 100, hit));
        }
        let mi = plugin_mi_bits(&pairs);
        assert!(mi < 0.02, "shuffled MI {mi}");
    }

    fn synthetic_scores(n: usize) -> Vec<PaperScoreVector> {
        use crate::indexes::{GroupLevelScores, NoveltyStats, PaperLevelScores};
        (0..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                PaperScoreVector {
                    paper_id: format!("P{i:05}"),
                    year: 2003,
                    journal: format!("J{}", i % 5),
                    paper: Some(PaperLevelScores {
                        novelty: NoveltyStats { mean: x, p90: x * 1.5 },
                        new_pair_pct: 100.0 * x,
                        anticipation_mean: x * x,
                        alt_mean: 1.0 - x / 2.0,
                        pair_count: 3,
                    }),
                    journal_level: Some(GroupLevelScores {
                        novelty: NoveltyStats { mean: x / 2.0, p90: x },
                        share_delta_mean: x - 0.5,
                        alt_mean: 0.3 + x,
                        pair_count: 3,
                    }),
                    subject_level: Some(GroupLevelScores {
                        novelty: NoveltyStats { mean: x / 3.0, p90: x },
                        share_delta_mean: 0.5 - x,
                        alt_mean: 0.2 + x * 0.1,
                        pair_count: 3,
                    }),
                    future_citations: ((i * 13) % 97) as u64,
                }
            })
            .collect()
    }

    #[test]
    fn analysis_covers_every_variable() {
        let scores = synthetic_scores(400);
        let result = analyze(&scores, &AnalyzeOptions::default()).unwrap();
        assert_eq!(result.variables.len(), ScoreVar::ALL.len());
        assert_eq!(result.hierarchical.len(), 2);
        for h in &result.hierarchical {
            assert_eq!(h.fits.len(), 4);
            for pair in h.fits.windows(2) {
                assert!(pair[1].residual_deviance <= pair[0].residual_deviance + 1e-9);
            }
        }
        let mut buf = Vec::new();
        write_report_json(&result, &Meta::for_tests(), &mut buf).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert!(parsed["bivariate"].as_array().unwrap().len() == 13);
        let mut curves = Vec::new();
        write_curves_csv(&result, &Meta::for_tests(), &mut curves).unwrap();
        assert!(curves.starts_with(b"# tool cocite"));
    }
}
