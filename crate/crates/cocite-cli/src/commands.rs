//! The pipeline subcommands. Stages communicate through files in the
//! output directory so each stage can be rerun and diffed independently.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use cocite::cooccur::cache::{CacheProvenance, read_cache, write_cache};
use cocite::cooccur::count_intervals;
use cocite::corpus::{Corpus, Interval, JournalCatalog, SampleSet, load_catalog, load_corpus,
    write_catalog_csv, write_corpus_jsonl};
use cocite::error::{Error, Result};
use cocite::graphexport::{EdgeKind, GraphFormat, build_journal_graph, export_graph,
    journal_index_table, write_journal_table_csv};
use cocite::indexes::{read_scores_csv, score_papers, write_scores_csv};
use cocite::stats::{analyze, write_curves_csv, write_report_json};
use cocite::synth::{SynthConfig, generate_corpus};

use crate::config::{RunConfig, TOOL_VERSION, combined_digest, output_meta};

pub const CACHE_FILE: &str = "counts.ccl";
pub const SCORES_FILE: &str = "scores.csv";
pub const CURVES_FILE: &str = "curves.csv";
pub const REPORT_FILE: &str = "fits.json";
pub const TABLE_FILE: &str = "journal_table.csv";

fn ensure_output_dir(config: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&config.output_dir).map_err(|e| {
        Error::io(
            format!("creating output dir {}", config.output_dir.display()),
            e,
        )
    })
}

fn load_inputs(config: &RunConfig) -> Result<(Corpus, JournalCatalog)> {
    let corpus = load_corpus(&config.corpus, config.corpus_format)?;
    let catalog = load_catalog(&config.catalog)?;
    Ok((corpus, catalog))
}

fn derive_samples(config: &RunConfig, corpus: &Corpus, catalog: &JournalCatalog) -> Result<[SampleSet; 3]> {
    let mut samples = Vec::with_capacity(3);
    for interval in Interval::ALL {
        samples.push(cocite::corpus::select_sample(
            corpus,
            catalog,
            &config.window,
            interval,
            &config.field_category,
            config.min_field_journals,
        )?);
    }
    Ok(samples.try_into().expect("three intervals"))
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))
}

/// Count pair frequencies over the sampled corpus into the binary cache.
pub fn cmd_count(config: &RunConfig) -> Result<PathBuf> {
    ensure_output_dir(config)?;
    let (corpus, catalog) = load_inputs(config)?;
    if corpus.dropped_duplicate_refs > 0 || corpus.dropped_self_refs > 0 {
        eprintln!(
            "note: dropped {} duplicate and {} self references at ingestion",
            corpus.dropped_duplicate_refs, corpus.dropped_self_refs
        );
    }
    let samples = derive_samples(config, &corpus, &catalog)?;
    let counts = count_intervals(&corpus, &catalog, &config.window, &samples, config.shards)?;
    let provenance = CacheProvenance {
        tool_version: TOOL_VERSION.to_string(),
        config_digest: config.semantic_digest(),
        input_digest: combined_digest(&[&config.corpus, &config.catalog])?,
    };
    let path = config.output_dir.join(CACHE_FILE);
    let mut writer = create_file(&path)?;
    write_cache(&counts, &provenance, &mut writer)?;
    writer
        .flush()
        .map_err(|e| Error::io("flushing counts cache", e))?;
    Ok(path)
}

/// Score the present-interval sample against a counts cache.
pub fn cmd_score(config: &RunConfig, cache_path: Option<&Path>) -> Result<PathBuf> {
    ensure_output_dir(config)?;
    let default_cache = config.output_dir.join(CACHE_FILE);
    let cache_path = cache_path.unwrap_or(&default_cache);
    let mut reader = BufReader::new(File::open(cache_path).map_err(|e| {
        Error::io(format!("opening counts cache {}", cache_path.display()), e)
    })?);
    let (counts, provenance) = read_cache(&mut reader)?;

    if counts.window() != &config.window {
        return Err(Error::WindowMismatch {
            cache: counts.window().to_string(),
            requested: config.window.to_string(),
        });
    }
    if provenance.config_digest != config.semantic_digest() {
        return Err(Error::CacheFormat(
            "cache was built with a different run configuration".into(),
        ));
    }

    let (corpus, catalog) = load_inputs(config)?;
    let samples = derive_samples(config, &corpus, &catalog)?;
    let present = &samples[Interval::Present.index()];

    // The cache must describe exactly this sample.
    let mut cached: Vec<&str> = counts.citing_papers(Interval::Present).collect();
    let mut derived: Vec<&str> = present.records(&corpus).map(|r| r.id.as_str()).collect();
    cached.sort_unstable();
    derived.sort_unstable();
    if cached != derived {
        return Err(Error::CountsSampleMismatch(format!(
            "cache covers {} citing papers, sample has {}",
            cached.len(),
            derived.len()
        )));
    }

    let scores = score_papers(&corpus, &catalog, &counts, present)?;
    let meta = output_meta(config, &[&config.corpus, &config.catalog, cache_path])?;
    let path = config.output_dir.join(SCORES_FILE);
    let mut writer = create_file(&path)?;
    write_scores_csv(&scores, &meta, &mut writer)?;
    writer
        .flush()
        .map_err(|e| Error::io("flushing score table", e))?;
    Ok(path)
}

/// Hit curves, bivariate and hierarchical fits, and mutual information.
pub fn cmd_analyze(config: &RunConfig, scores_path: Option<&Path>) -> Result<(PathBuf, PathBuf)> {
    ensure_output_dir(config)?;
    let default_scores = config.output_dir.join(SCORES_FILE);
    let scores_path = scores_path.unwrap_or(&default_scores);
    let reader = BufReader::new(File::open(scores_path).map_err(|e| {
        Error::io(format!("opening score table {}", scores_path.display()), e)
    })?);
    let scores = read_scores_csv(reader)?;
    let result = analyze(&scores, &config.degree_options())?;

    let meta = output_meta(config, &[scores_path])?;
    let curves_path = config.output_dir.join(CURVES_FILE);
    let mut curves_writer = create_file(&curves_path)?;
    write_curves_csv(&result, &meta, &mut curves_writer)?;
    curves_writer
        .flush()
        .map_err(|e| Error::io("flushing curves", e))?;

    let report_path = config.output_dir.join(REPORT_FILE);
    let mut report_writer = create_file(&report_path)?;
    write_report_json(&result, &meta, &mut report_writer)?;
    report_writer
        .flush()
        .map_err(|e| Error::io("flushing report", e))?;
    Ok((curves_path, report_path))
}

/// Journal citation network plus the per-journal index table.
pub fn cmd_graph(config: &RunConfig, scores_path: Option<&Path>) -> Result<Vec<PathBuf>> {
    ensure_output_dir(config)?;
    let default_scores = config.output_dir.join(SCORES_FILE);
    let scores_path = scores_path.unwrap_or(&default_scores);
    let reader = BufReader::new(File::open(scores_path).map_err(|e| {
        Error::io(format!("opening score table {}", scores_path.display()), e)
    })?);
    let scores = read_scores_csv(reader)?;

    let (corpus, catalog) = load_inputs(config)?;
    let samples = derive_samples(config, &corpus, &catalog)?;
    let present = &samples[Interval::Present.index()];

    let edge_kind = if config.cocitation_edges {
        EdgeKind::CoCitation
    } else {
        EdgeKind::DirectCitation
    };
    let graph = build_journal_graph(
        &corpus,
        &catalog,
        present,
        &scores,
        config.top_k_journals,
        edge_kind,
    )?;
    if let Some(warning) = &graph.warning {
        eprintln!("note: {warning}");
    }

    let meta = output_meta(config, &[&config.corpus, &config.catalog, scores_path])?;
    let mut written = Vec::new();

    let graph_path = match config.graph_format {
        GraphFormat::Gexf => config.output_dir.join("journals.gexf"),
        GraphFormat::EdgelistCsv => config.output_dir.join("journal_edges.csv"),
    };
    let mut graph_writer = create_file(&graph_path)?;
    export_graph(&graph, config.graph_format, &meta, &mut graph_writer)?;
    graph_writer
        .flush()
        .map_err(|e| Error::io("flushing graph", e))?;
    written.push(graph_path);

    let rows = journal_index_table(&corpus, &catalog, present, &scores, config.top_k_journals);
    let table_path = config.output_dir.join(TABLE_FILE);
    let mut table_writer = create_file(&table_path)?;
    write_journal_table_csv(&rows, &meta, &mut table_writer)?;
    table_writer
        .flush()
        .map_err(|e| Error::io("flushing journal table", e))?;
    written.push(table_path);
    Ok(written)
}

/// Generate a synthetic corpus and catalog from a TOML (or JSON) config.
pub fn cmd_synth(synth_config: &Path, output_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let text = std::fs::read_to_string(synth_config).map_err(|e| {
        Error::io(format!("reading synth config {}", synth_config.display()), e)
    })?;
    let config: SynthConfig = if synth_config.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text)?
    } else {
        toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", synth_config.display())))?
    };
    let (corpus, catalog) = generate_corpus(&config)?;

    std::fs::create_dir_all(output_dir)
        .map_err(|e| Error::io(format!("creating output dir {}", output_dir.display()), e))?;
    let corpus_path = output_dir.join("corpus.jsonl");
    let mut corpus_writer = create_file(&corpus_path)?;
    write_corpus_jsonl(&corpus, &mut corpus_writer)?;
    corpus_writer
        .flush()
        .map_err(|e| Error::io("flushing corpus", e))?;

    let catalog_path = output_dir.join("catalog.csv");
    let mut catalog_writer = create_file(&catalog_path)?;
    write_catalog_csv(&catalog, &mut catalog_writer)?;
    catalog_writer
        .flush()
        .map_err(|e| Error::io("flushing catalog", e))?;
    Ok((corpus_path, catalog_path))
}

/// Run the full pipeline: count, score, analyze, graph.
pub fn cmd_pipeline(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    written.push(cmd_count(config)?);
    written.push(cmd_score(config, None)?);
    let (curves, report) = cmd_analyze(config, None)?;
    written.push(curves);
    written.push(report);
    written.extend(cmd_graph(config, None)?);
    Ok(written)
}

/// Verify the per-paper score table against the brute-force oracle; meant
/// for small corpora and debugging.
pub fn cmd_verify(config: &RunConfig) -> Result<()> {
    let (corpus, catalog) = load_inputs(config)?;
    let samples = derive_samples(config, &corpus, &catalog)?;
    let counts = count_intervals(&corpus, &catalog, &config.window, &samples, config.shards)?;
    let fast = score_papers(
        &corpus,
        &catalog,
        &counts,
        &samples[Interval::Present.index()],
    )?;
    let oracle = cocite::synth::oracle::brute_force_scores(
        &corpus,
        &catalog,
        &config.window,
        &config.field_category,
        config.min_field_journals,
    )?;
    if fast.len() != oracle.len() {
        return Err(Error::DegenerateStatistics(format!(
            "verification failed: {} vs {} score vectors",
            fast.len(),
            oracle.len()
        )));
    }
    let close = |a: f64, b: f64| {
        a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
    };
    for (f, o) in fast.iter().zip(&oracle) {
        let same = f.paper_id == o.paper_id
            && f.future_citations == o.future_citations
            && match (&f.paper, &o.paper) {
                (None, None) => true,
                (Some(a), Some(b)) => {
                    a.pair_count == b.pair_count
                        && close(a.novelty.mean, b.novelty.mean)
                        && close(a.novelty.p90, b.novelty.p90)
                        && close(a.new_pair_pct, b.new_pair_pct)
                        && close(a.anticipation_mean, b.anticipation_mean)
                        && close(a.alt_mean, b.alt_mean)
                }
                _ => false,
            };
        if !same {
            return Err(Error::DegenerateStatistics(format!(
                "verification failed at paper {}",
                f.paper_id
            )));
        }
    }
    println!("verified {} score vectors against the brute-force oracle", fast.len());
    Ok(())
}
