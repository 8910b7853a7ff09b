//! Journal citation network and per-journal index table, exported for
//! external layout tools (GEXF 1.2 or a CSV edge list).

use std::collections::BTreeMap;
use std::io::Write;

use crate::cooccur::Level;
use crate::corpus::{Corpus, Interval, JournalCatalog, Resolution, SampleSet, resolve_levels};
use crate::error::{Error, Result};
use crate::indexes::{PaperScoreVector, ScoreVar};
use crate::provenance::Meta;

/// Unweighted means of the six table scores over a journal's sampled
/// papers; each score averages papers where it is non-missing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JournalIndexMeans {
    pub cit_alt: Option<f64>,
    pub jr_alt: Option<f64>,
    pub sc_alt: Option<f64>,
    pub acit: Option<f64>,
    pub ajr: Option<f64>,
    pub asc: Option<f64>,
    /// Sampled papers published in the journal.
    pub paper_count: u64,
}

const TABLE_VARS: [ScoreVar; 6] = [
    ScoreVar::CitAltMean,
    ScoreVar::JrAltMean,
    ScoreVar::ScAltMean,
    ScoreVar::AcitMean,
    ScoreVar::AjrMean,
    ScoreVar::AscMean,
];

#[derive(Debug, Clone, PartialEq)]
pub struct JournalNode {
    pub journal: String,
    pub name: String,
    pub citations_received: u64,
    pub means: JournalIndexMeans,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge {
    pub source: String,
    pub target: String,
    pub weight: u64,
}

/// Edge semantics of the exported network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Directed: weight counts references from sampled papers published in
    /// the source journal to works in the target journal.
    DirectCitation,
    /// Undirected: weight is the present-interval co-citation frequency of
    /// the journal pair.
    CoCitation,
}

/// Directed journal citation graph; nodes and edges sorted by id for
/// byte-stable export.
#[derive(Debug, Clone)]
pub struct JournalGraph {
    pub nodes: Vec<JournalNode>,
    pub edges: Vec<GraphEdge>,
    pub edge_kind: EdgeKind,
    pub warning: Option<String>,
}

fn mean_of(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Per-journal index means over sampled papers grouped by publishing
/// journal. Journals without sampled papers are absent.
fn index_means_by_journal(scores: &[PaperScoreVector]) -> BTreeMap<String, JournalIndexMeans> {
    let mut groups: BTreeMap<String, Vec<&PaperScoreVector>> = BTreeMap::new();
    for v in scores {
        groups.entry(v.journal.clone()).or_default().push(v);
    }
    groups
        .into_iter()
        .map(|(journal, papers)| {
            let collect = |var: ScoreVar| -> Option<f64> {
                let values: Vec<f64> =
                    papers.iter().filter_map(|v| var.extract(v)).collect();
                mean_of(&values)
            };
            let means = JournalIndexMeans {
                cit_alt: collect(TABLE_VARS[0]),
                jr_alt: collect(TABLE_VARS[1]),
                sc_alt: collect(TABLE_VARS[2]),
                acit: collect(TABLE_VARS[3]),
                ajr: collect(TABLE_VARS[4]),
                asc: collect(TABLE_VARS[5]),
                paper_count: papers.len() as u64,
            };
            (journal, means)
        })
        .collect()
}

/// Citations received per indexed journal from the sampled papers'
/// references.
fn citations_received(
    corpus: &Corpus,
    catalog: &JournalCatalog,
    sample: &SampleSet,
) -> BTreeMap<String, u64> {
    let mut received: BTreeMap<String, u64> = BTreeMap::new();
    for record in sample.records(corpus) {
        for cited in &record.references {
            if let Resolution::Full { journal, .. } = resolve_levels(corpus, catalog, cited) {
                *received.entry(journal.to_string()).or_insert(0) += 1;
            }
        }
    }
    received
}

/// Rank journals by citations received (ties broken by id) and keep the
/// top `top_k`.
fn top_journals(received: &BTreeMap<String, u64>, top_k: usize) -> Vec<String> {
    let mut ranked: Vec<(&String, &u64)> = received.iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(top_k)
        .map(|(j, _)| j.clone())
        .collect()
}

/// Build the journal network over the present-interval sample.
pub fn build_journal_graph(
    corpus: &Corpus,
    catalog: &JournalCatalog,
    sample: &SampleSet,
    scores: &[PaperScoreVector],
    top_k: usize,
    edge_kind: EdgeKind,
) -> Result<JournalGraph> {
    if sample.interval != Interval::Present {
        return Err(Error::InvalidConfig(
            "the journal graph is built over the present-interval sample".into(),
        ));
    }
    let received = citations_received(corpus, catalog, sample);
    let warning = (top_k > received.len()).then(|| {
        format!(
            "requested top {top_k} journals but only {} received citations; keeping all",
            received.len()
        )
    });
    let kept = top_journals(&received, top_k);
    let kept_set: std::collections::BTreeSet<&str> = kept.iter().map(|s| s.as_str()).collect();
    let means = index_means_by_journal(scores);

    let mut nodes: Vec<JournalNode> = kept
        .iter()
        .map(|journal| JournalNode {
            journal: journal.clone(),
            name: catalog.name_of(journal).unwrap_or(journal).to_string(),
            citations_received: received[journal],
            means: means.get(journal).cloned().unwrap_or_default(),
        })
        .collect();
    nodes.sort_by(|a, b| a.journal.cmp(&b.journal));

    let mut edge_weights: BTreeMap<(String, String), u64> = BTreeMap::new();
    match edge_kind {
        EdgeKind::DirectCitation => {
            for record in sample.records(corpus) {
                if !kept_set.contains(record.journal.as_str()) {
                    continue;
                }
                for cited in &record.references {
                    if let Resolution::Full { journal, .. } =
                        resolve_levels(corpus, catalog, cited)
                    {
                        if kept_set.contains(journal) {
                            *edge_weights
                                .entry((record.journal.clone(), journal.to_string()))
                                .or_insert(0) += 1;
                        }
                    }
                }
            }
        }
        EdgeKind::CoCitation => {
            for record in sample.records(corpus) {
                for (a, b) in crate::cooccur::enumerate_pairs(record, corpus, catalog, Level::Journal)
                {
                    if kept_set.contains(a.as_str()) && kept_set.contains(b.as_str()) {
                        *edge_weights.entry((a, b)).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    let edges: Vec<GraphEdge> = edge_weights
        .into_iter()
        .map(|((source, target), weight)| GraphEdge {
            source,
            target,
            weight,
        })
        .collect();

    Ok(JournalGraph {
        nodes,
        edges,
        edge_kind,
        warning,
    })
}

/// One row of the per-journal index table.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalIndexRow {
    pub journal: String,
    pub name: String,
    pub citations_received: u64,
    pub means: JournalIndexMeans,
}

/// Per-journal score means for the `top_k` most-cited journals that
/// published at least one sampled paper.
pub fn journal_index_table(
    corpus: &Corpus,
    catalog: &JournalCatalog,
    sample: &SampleSet,
    scores: &[PaperScoreVector],
    top_k: usize,
) -> Vec<JournalIndexRow> {
    let received = citations_received(corpus, catalog, sample);
    let means = index_means_by_journal(scores);
    let mut ranked: Vec<(&String, u64)> = means
        .keys()
        .map(|j| (j, received.get(j).copied().unwrap_or(0)))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(top_k)
        .map(|(journal, cited)| JournalIndexRow {
            journal: journal.clone(),
            name: catalog.name_of(journal).unwrap_or(journal).to_string(),
            citations_received: cited,
            means: means[journal].clone(),
        })
        .collect()
}

/// Write the index table as CSV, rows in ranking order.
pub fn write_journal_table_csv(
    rows: &[JournalIndexRow],
    meta: &Meta,
    writer: &mut impl Write,
) -> Result<()> {
    for line in meta.comment_lines() {
        writeln!(writer, "{line}").map_err(|e| Error::io("writing journal table", e))?;
    }
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record([
        "journal_id",
        "journal_name",
        "citations_received",
        "n_papers",
        "cit_alt_mean",
        "jr_alt_mean",
        "sc_alt_mean",
        "acit_mean",
        "ajr_mean",
        "asc_mean",
    ])?;
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in rows {
        csv_writer.write_record([
            row.journal.clone(),
            row.name.clone(),
            row.citations_received.to_string(),
            row.means.paper_count.to_string(),
            fmt(row.means.cit_alt),
            fmt(row.means.jr_alt),
            fmt(row.means.sc_alt),
            fmt(row.means.acit),
            fmt(row.means.ajr),
            fmt(row.means.asc),
        ])?;
    }
    csv_writer
        .flush()
        .map_err(|e| Error::io("writing journal table", e))?;
    Ok(())
}

/// Export format for the network itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Gexf,
    EdgelistCsv,
}

impl std::str::FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gexf" => Ok(GraphFormat::Gexf),
            "edgelist_csv" | "csv" => Ok(GraphFormat::EdgelistCsv),
            other => Err(Error::InvalidConfig(format!(
                "unknown graph format {other:?} (expected gexf or edgelist_csv)"
            ))),
        }
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            other => out.push(other),
        }
    }
    out
}

const NODE_ATTRS: [(&str, &str); 7] = [
    ("citations_received", "long"),
    ("cit_alt_mean", "double"),
    ("jr_alt_mean", "double"),
    ("sc_alt_mean", "double"),
    ("acit_mean", "double"),
    ("ajr_mean", "double"),
    ("asc_mean", "double"),
];

/// Write the graph in the requested format. Output is deterministic:
/// nodes and edges are already sorted, floats use shortest round-trip
/// formatting.
pub fn export_graph(
    graph: &JournalGraph,
    format: GraphFormat,
    meta: &Meta,
    writer: &mut impl Write,
) -> Result<()> {
    match format {
        GraphFormat::Gexf => export_gexf(graph, meta, writer),
        GraphFormat::EdgelistCsv => export_edgelist(graph, meta, writer),
    }
}

fn export_gexf(graph: &JournalGraph, meta: &Meta, w: &mut impl Write) -> Result<()> {
    let io = |e| Error::io("writing GEXF", e);
    let edge_type = match graph.edge_kind {
        EdgeKind::DirectCitation => "directed",
        EdgeKind::CoCitation => "undirected",
    };
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#).map_err(io)?;
    writeln!(
        w,
        r#"<gexf xmlns="http://www.gexf.net/1.2draft" xmlns:viz="http://www.gexf.net/1.2draft/viz" version="1.2">"#
    )
    .map_err(io)?;
    writeln!(w, "  <meta>")
        .map_err(io)?;
    writeln!(
        w,
        "    <creator>cocite {}</creator>",
        xml_escape(&meta.tool_version)
    )
    .map_err(io)?;
    let mut description = format!("config sha256 {}", meta.config_digest);
    for (name, digest) in &meta.input_digests {
        description.push_str(&format!("; input {name} sha256 {digest}"));
    }
    writeln!(w, "    <description>{}</description>", xml_escape(&description)).map_err(io)?;
    writeln!(w, "  </meta>").map_err(io)?;
    writeln!(w, r#"  <graph mode="static" defaultedgetype="{edge_type}">"#).map_err(io)?;
    writeln!(w, r#"    <attributes class="node">"#).map_err(io)?;
    for (idx, (title, ty)) in NODE_ATTRS.iter().enumerate() {
        writeln!(
            w,
            r#"      <attribute id="{idx}" title="{title}" type="{ty}"/>"#
        )
        .map_err(io)?;
    }
    writeln!(w, "    </attributes>").map_err(io)?;

    writeln!(w, "    <nodes>").map_err(io)?;
    for node in &graph.nodes {
        writeln!(
            w,
            r#"      <node id="{}" label="{}">"#,
            xml_escape(&node.journal),
            xml_escape(&node.name)
        )
        .map_err(io)?;
        writeln!(w, "        <attvalues>").map_err(io)?;
        let mut attvalue = |idx: usize, value: Option<String>| -> Result<()> {
            if let Some(value) = value {
                writeln!(
                    w,
                    r#"          <attvalue for="{idx}" value="{}"/>"#,
                    xml_escape(&value)
                )
                .map_err(io)?;
            }
            Ok(())
        };
        attvalue(0, Some(node.citations_received.to_string()))?;
        attvalue(1, node.means.cit_alt.map(|v| v.to_string()))?;
        attvalue(2, node.means.jr_alt.map(|v| v.to_string()))?;
        attvalue(3, node.means.sc_alt.map(|v| v.to_string()))?;
        attvalue(4, node.means.acit.map(|v| v.to_string()))?;
        attvalue(5, node.means.ajr.map(|v| v.to_string()))?;
        attvalue(6, node.means.asc.map(|v| v.to_string()))?;
        writeln!(w, "        </attvalues>").map_err(io)?;
        // node size carries the citations-received ranking for layout tools
        writeln!(
            w,
            r#"        <viz:size value="{}"/>"#,
            node.citations_received
        )
        .map_err(io)?;
        writeln!(w, "      </node>").map_err(io)?;
    }
    writeln!(w, "    </nodes>").map_err(io)?;

    writeln!(w, "    <edges>").map_err(io)?;
    for (idx, edge) in graph.edges.iter().enumerate() {
        writeln!(
            w,
            r#"      <edge id="{idx}" source="{}" target="{}" weight="{}"/>"#,
            xml_escape(&edge.source),
            xml_escape(&edge.target),
            edge.weight
        )
        .map_err(io)?;
    }
    writeln!(w, "    </edges>").map_err(io)?;
    writeln!(w, "  </graph>").map_err(io)?;
    writeln!(w, "</gexf>").map_err(io)?;
    Ok(())
}

fn export_edgelist(graph: &JournalGraph, meta: &Meta, w: &mut impl Write) -> Result<()> {
    for line in meta.comment_lines() {
        writeln!(w, "{line}").map_err(|e| Error::io("writing edge list", e))?;
    }
    let mut csv_writer = csv::Writer::from_writer(w);
    csv_writer.write_record(["source", "target", "weight"])?;
    for edge in &graph.edges {
        csv_writer.write_record([
            edge.source.clone(),
            edge.target.clone(),
            edge.weight.to_string(),
        ])?;
    }
    csv_writer
        .flush()
        .map_err(|e| Error::io("writing edge list", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooccur::count_intervals;
    use crate::corpus::{PaperRecord, WindowSpec, select_sample};
    use crate::indexes::score_papers;

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

    /// Three journals; J1 papers cite J2 works twice, nothing cites J0
    /// works except one self-feeding reference chain for ranking ties.
    fn fixture() -> (Corpus, JournalCatalog, WindowSpec, Vec<PaperScoreVector>, SampleSet) {
        let mut catalog = JournalCatalog::new();
        catalog.assign("J0", "SC0", "Journal Zero");
        catalog.assign("J1", "SC0", "Journal One");
        catalog.assign("J2", "SC1", "Journal Two");
        let mut corpus = Corpus::new();
        push(&mut corpus, "X", 1995, "J2", &[]);
        push(&mut corpus, "Y", 1995, "J2", &[]);
        push(&mut corpus, "Z", 1995, "J0", &[]);
        push(&mut corpus, "V", 1995, "J1", &[]);
        push(&mut corpus, "PA", 2001, "J1", &["X", "Y"]);
        push(&mut corpus, "N1", 2003, "J1", &["X", "Y"]);
        push(&mut corpus, "N2", 2003, "J0", &["X", "Z", "V"]);
        push(&mut corpus, "FU", 2004, "J1", &["X", "Y"]);
        let window = WindowSpec::new(2003, 2003, 2, 2).unwrap();
        let samples = Interval::ALL
            .map(|iv| select_sample(&corpus, &catalog, &window, iv, "SC0", 0).unwrap());
        let counts = count_intervals(&corpus, &catalog, &window, &samples, 1).unwrap();
        let sample = samples[Interval::Present.index()].clone();
        let scores = score_papers(&corpus, &catalog, &counts, &sample).unwrap();
        (corpus, catalog, window, scores, sample)
    }

    #[test]
    fn one_paper_citing_two_works_makes_a_weight_two_edge() {
        let (corpus, catalog, _, scores, sample) = fixture();
        let graph = build_journal_graph(
            &corpus, &catalog, &sample, &scores, 10, EdgeKind::DirectCitation,
        )
        .unwrap();
        // N1 (J1) cites X and Y, both in J2.
        let edge = graph
            .edges
            .iter()
            .find(|e| e.source == "J1" && e.target == "J2")
            .expect("J1→J2 edge");
        assert_eq!(edge.weight, 2);
        // No references from J2 papers: no reverse edge.
        assert!(!graph.edges.iter().any(|e| e.source == "J2"));
    }

    #[test]
    fn out_edge_weights_equal_resolvable_references_in_kept_journals() {
        let (corpus, catalog, _, scores, sample) = fixture();
        let graph = build_journal_graph(
            &corpus, &catalog, &sample, &scores, 10, EdgeKind::DirectCitation,
        )
        .unwrap();
        let total: u64 = graph.edges.iter().map(|e| e.weight).sum();
        // N1: X,Y → J2; N2: X → J2, Z → J0, V → J1. All journals kept, so 5.
        assert_eq!(total, 5);
    }

    #[test]
    fn truncation_keeps_the_most_cited_journals() {
        let (corpus, catalog, _, scores, sample) = fixture();
        let graph = build_journal_graph(
            &corpus, &catalog, &sample, &scores, 1, EdgeKind::DirectCitation,
        )
        .unwrap();
        // J2 receives 3 citations (X twice, Y once), J0 one.
        assert_eq!(graph.nodes.len(), 1);
        assert_eq!(graph.nodes[0].journal, "J2");
        assert!(graph.warning.is_none());
        // Edges between dropped journals disappear.
        assert!(graph.edges.is_empty());
    }

    #[test]
    fn oversized_top_k_keeps_all_and_warns() {
        let (corpus, catalog, _, scores, sample) = fixture();
        let graph = build_journal_graph(
            &corpus, &catalog, &sample, &scores, 70, EdgeKind::DirectCitation,
        )
        .unwrap();
        assert_eq!(graph.nodes.len(), 3); // every journal received citations
        assert!(graph.warning.is_some());
    }

    #[test]
    fn single_paper_journal_row_equals_that_papers_scores() {
        let (corpus, catalog, _, scores, sample) = fixture();
        let rows = journal_index_table(&corpus, &catalog, &sample, &scores, 10);
        let n2 = scores.iter().find(|v| v.paper_id == "N2").unwrap();
        let j0 = rows.iter().find(|r| r.journal == "J0").unwrap();
        assert_eq!(j0.means.paper_count, 1);
        assert_eq!(
            j0.means.cit_alt,
            n2.paper.as_ref().map(|p| p.alt_mean)
        );
        assert_eq!(
            j0.means.acit,
            n2.paper.as_ref().map(|p| p.anticipation_mean)
        );
    }

    #[test]
    fn journal_means_average_over_papers() {
        use crate::indexes::{NoveltyStats, PaperLevelScores};
        let make = |id: &str, alt: f64| PaperScoreVector {
            paper_id: id.into(),
            year: 2003,
            journal: "JX".into(),
            paper: Some(PaperLevelScores {
                novelty: NoveltyStats { mean: 0.0, p90: 0.0 },
                new_pair_pct: 0.0,
                anticipation_mean: 0.0,
                alt_mean: alt,
                pair_count: 1,
            }),
            journal_level: None,
            subject_level: None,
            future_citations: 0,
        };
        let means = index_means_by_journal(&[make("A", 0.9), make("B", 1.1)]);
        assert_eq!(means["JX"].cit_alt, Some(1.0));
        // journal-level scores are missing on both rows → mean missing
        assert_eq!(means["JX"].jr_alt, None);
    }

    #[test]
    fn table_truncates_to_top_k_rows() {
        let (corpus, catalog, _, scores, sample) = fixture();
        let rows = journal_index_table(&corpus, &catalog, &sample, &scores, 36);
        assert!(rows.len() <= 36);
        let rows1 = journal_index_table(&corpus, &catalog, &sample, &scores, 1);
        assert_eq!(rows1.len(), 1);
    }

    #[test]
    fn empty_graph_exports_valid_gexf() {
        let graph = JournalGraph {
            nodes: Vec::new(),
            edges: Vec::new(),
            edge_kind: EdgeKind::DirectCitation,
            warning: None,
        };
        let mut buf = Vec::new();
        export_graph(&graph, GraphFormat::Gexf, &Meta::for_tests(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("<nodes>"));
        assert!(text.contains("</gexf>"));
        // well-formed XML per quick-xml
        let mut reader = quick_xml::Reader::from_str(&text);
        loop {
            match reader.read_event().unwrap() {
                quick_xml::events::Event::Eof => break,
                _ => continue,
            }
        }
    }

    #[test]
    fn edgelist_rows_match_edge_count() {
        let (corpus, catalog, _, scores, sample) = fixture();
        let graph = build_journal_graph(
            &corpus, &catalog, &sample, &scores, 10, EdgeKind::DirectCitation,
        )
        .unwrap();
        let mut buf = Vec::new();
        export_graph(&graph, GraphFormat::EdgelistCsv, &Meta::for_tests(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let data_rows = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .count()
            - 1; // header
        assert_eq!(data_rows, graph.edges.len());
    }

    #[test]
    fn export_is_byte_stable() {
        let (corpus, catalog, _, scores, sample) = fixture();
        let graph = build_journal_graph(
            &corpus, &catalog, &sample, &scores, 10, EdgeKind::DirectCitation,
        )
        .unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        export_graph(&graph, GraphFormat::Gexf, &Meta::for_tests(), &mut a).unwrap();
        export_graph(&graph, GraphFormat::Gexf, &Meta::for_tests(), &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cocitation_edges_use_pair_frequencies() {
        let (corpus, catalog, _, scores, sample) = fixture();
        let graph = build_journal_graph(
            &corpus, &catalog, &sample, &scores, 10, EdgeKind::CoCitation,
        )
        .unwrap();
        // N1 co-cites two J2 works → self-pair (J2, J2) with weight 1;
        // N2 co-cites J2 and J0 works → (J0, J2) weight 1.
        assert!(graph
            .edges
            .iter()
            .any(|e| e.source == "J2" && e.target == "J2" && e.weight == 1));
        assert!(graph
            .edges
            .iter()
            .any(|e| e.source == "J0" && e.target == "J2" && e.weight == 1));
    }

    #[test]
    fn names_are_escaped_in_gexf() {
        let graph = JournalGraph {
            nodes: vec![JournalNode {
                journal: "J<&>".into(),
                name: "Tom & Jerry's \"Journal\"".into(),
                citations_received: 1,
                means: JournalIndexMeans::default(),
            }],
            edges: Vec::new(),
            edge_kind: EdgeKind::DirectCitation,
            warning: None,
        };
        let mut buf = Vec::new();
        export_graph(&graph, GraphFormat::Gexf, &Meta::for_tests(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("Tom &amp; Jerry&apos;s &quot;Journal&quot;"));
        let mut reader = quick_xml::Reader::from_str(&text);
        loop {
            match reader.read_event().unwrap() {
                quick_xml::events::Event::Eof => break,
                _ => continue,
            }
        }
    }
}
