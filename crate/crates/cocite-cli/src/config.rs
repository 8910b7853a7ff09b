//! Run configuration: defaults, TOML config file, command-line overrides
//! (flags beat config, config beats defaults), and the digests embedded in
//! every output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use cocite::corpus::{CorpusFormat, WindowSpec};
use cocite::error::{Error, Result};
use cocite::graphexport::GraphFormat;
use cocite::indexes::ScoreVar;
use cocite::provenance::Meta;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub corpus_format: CorpusFormat,
    pub catalog: PathBuf,
    pub window: WindowSpec,
    pub field_category: String,
    pub min_field_journals: usize,
    pub top_frac: f64,
    pub top_k_journals: usize,
    pub shards: usize,
    pub output_dir: PathBuf,
    pub graph_format: GraphFormat,
    pub cocitation_edges: bool,
    pub degrees: BTreeMap<ScoreVar, usize>,
}

/// Config-file shape; every field optional so flags can fill the gaps.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    corpus: Option<PathBuf>,
    corpus_format: Option<String>,
    catalog: Option<PathBuf>,
    t0_start: Option<i32>,
    t0_end: Option<i32>,
    past_len: Option<u32>,
    future_len: Option<u32>,
    field_category: Option<String>,
    min_field_journals: Option<usize>,
    top_frac: Option<f64>,
    top_k_journals: Option<usize>,
    shards: Option<usize>,
    output_dir: Option<PathBuf>,
    graph_format: Option<String>,
    cocitation_edges: Option<bool>,
    degrees: Option<BTreeMap<String, usize>>,
}

/// Flags shared by the pipeline subcommands.
#[derive(Debug, Default, Args)]
pub struct ConfigOverrides {
    /// TOML run configuration; flags override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Corpus file (JSON-Lines by default).
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Corpus format: jsonl or csv.
    #[arg(long, value_name = "FMT")]
    pub corpus_format: Option<String>,
    /// Journal catalog CSV.
    #[arg(long, value_name = "FILE")]
    pub catalog: Option<PathBuf>,
    /// First year of the present interval.
    #[arg(long, value_name = "YEAR")]
    pub t0_start: Option<i32>,
    /// Last year of the present interval (defaults to t0_start).
    #[arg(long, value_name = "YEAR")]
    pub t0_end: Option<i32>,
    /// Years in the past interval.
    #[arg(long, value_name = "N")]
    pub past_len: Option<u32>,
    /// Years in the future interval.
    #[arg(long, value_name = "N")]
    pub future_len: Option<u32>,
    /// Subject category that defines the analysis field.
    #[arg(long, value_name = "CATEGORY")]
    pub field_category: Option<String>,
    /// Distinct field journals a paper must cite to enter the sample.
    #[arg(long, value_name = "N")]
    pub min_field_journals: Option<usize>,
    /// Hit-paper fraction.
    #[arg(long, value_name = "FRAC")]
    pub top_frac: Option<f64>,
    /// Journals kept in the network export.
    #[arg(long, value_name = "N")]
    pub top_k_journals: Option<usize>,
    /// Parallel shards for counting.
    #[arg(long, value_name = "N")]
    pub shards: Option<usize>,
    /// Directory for all outputs.
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Graph export format: gexf or edgelist_csv.
    #[arg(long, value_name = "FMT")]
    pub graph_format: Option<String>,
    /// Export co-citation edges instead of direct citations.
    #[arg(long)]
    pub cocitation_edges: bool,
    /// Per-variable polynomial degree, e.g. --degree ajr_mean=3 (repeatable).
    #[arg(long = "degree", value_name = "VAR=N")]
    pub degrees: Vec<String>,
}

fn parse_degree_flag(spec: &str) -> Result<(ScoreVar, usize)> {
    let (name, value) = spec.split_once('=').ok_or_else(|| {
        Error::InvalidConfig(format!("--degree expects VAR=N, got {spec:?}"))
    })?;
    let var = ScoreVar::from_column(name)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown score variable {name:?}")))?;
    let degree: usize = value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad degree {value:?} for {name}")))?;
    if !(1..=4).contains(&degree) {
        return Err(Error::InvalidConfig(format!(
            "degree for {name} must be 1..=4, got {degree}"
        )));
    }
    Ok((var, degree))
}

impl RunConfig {
    /// Resolve defaults, config file, and flags into a validated config.
    pub fn resolve(overrides: &ConfigOverrides) -> Result<RunConfig> {
        let file: FileConfig = match &overrides.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::io(format!("reading config {}", path.display()), e)
                })?;
                toml::from_str(&text)
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };

        let corpus = overrides
            .corpus
            .clone()
            .or(file.corpus)
            .ok_or_else(|| Error::InvalidConfig("no corpus file given".into()))?;
        let catalog = overrides
            .catalog
            .clone()
            .or(file.catalog)
            .ok_or_else(|| Error::InvalidConfig("no catalog file given".into()))?;
        let corpus_format: CorpusFormat = overrides
            .corpus_format
            .clone()
            .or(file.corpus_format)
            .map_or(Ok(CorpusFormat::Jsonl), |s| s.parse())?;
        let t0_start = overrides
            .t0_start
            .or(file.t0_start)
            .ok_or_else(|| Error::InvalidConfig("no t0_start year given".into()))?;
        let t0_end = overrides.t0_end.or(file.t0_end).unwrap_or(t0_start);
        let window = WindowSpec::new(
            t0_start,
            t0_end,
            overrides
                .past_len
                .or(file.past_len)
                .unwrap_or(WindowSpec::DEFAULT_PAST_LEN),
            overrides
                .future_len
                .or(file.future_len)
                .unwrap_or(WindowSpec::DEFAULT_FUTURE_LEN),
        )?;
        let min_field_journals = overrides
            .min_field_journals
            .or(file.min_field_journals)
            .unwrap_or(2);
        let field_category = overrides
            .field_category
            .clone()
            .or(file.field_category)
            .unwrap_or_default();
        if min_field_journals > 0 && field_category.is_empty() {
            return Err(Error::InvalidConfig(
                "field_category is required when min_field_journals > 0".into(),
            ));
        }
        let top_frac = overrides.top_frac.or(file.top_frac).unwrap_or(0.05);
        if !(top_frac > 0.0 && top_frac < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "top_frac must lie in (0, 1), got {top_frac}"
            )));
        }
        let graph_format: GraphFormat = overrides
            .graph_format
            .clone()
            .or(file.graph_format)
            .map_or(Ok(GraphFormat::Gexf), |s| s.parse())?;

        let mut degrees: BTreeMap<ScoreVar, usize> = BTreeMap::new();
        if let Some(file_degrees) = file.degrees {
            for (name, degree) in file_degrees {
                let var = ScoreVar::from_column(&name).ok_or_else(|| {
                    Error::InvalidConfig(format!("unknown score variable {name:?} in config"))
                })?;
                degrees.insert(var, degree);
            }
        }
        for spec in &overrides.degrees {
            let (var, degree) = parse_degree_flag(spec)?;
            degrees.insert(var, degree);
        }
        for (&var, &degree) in &degrees {
            if !(1..=4).contains(&degree) {
                return Err(Error::InvalidConfig(format!(
                    "degree for {var} must be 1..=4, got {degree}"
                )));
            }
        }

        Ok(RunConfig {
            corpus,
            corpus_format,
            catalog,
            window,
            field_category,
            min_field_journals,
            top_frac,
            top_k_journals: overrides
                .top_k_journals
                .or(file.top_k_journals)
                .unwrap_or(70),
            shards: overrides.shards.or(file.shards).unwrap_or(8).max(1),
            output_dir: overrides
                .output_dir
                .clone()
                .or(file.output_dir)
                .unwrap_or_else(|| PathBuf::from("out")),
            graph_format,
            cocitation_edges: overrides.cocitation_edges || file.cocitation_edges.unwrap_or(false),
            degrees,
        })
    }

    /// Digest of the semantic configuration: the fields that change what is
    /// computed, not how (shards, formats, and paths are excluded so reruns
    /// and re-sharded runs stay cache-compatible).
    pub fn semantic_digest(&self) -> [u8; 32] {
        let mut canonical = String::new();
        canonical.push_str(&format!(
            "t0_start={}\nt0_end={}\npast_len={}\nfuture_len={}\n",
            self.window.t0_start, self.window.t0_end, self.window.past_len, self.window.future_len
        ));
        canonical.push_str(&format!("field_category={}\n", self.field_category));
        canonical.push_str(&format!("min_field_journals={}\n", self.min_field_journals));
        canonical.push_str(&format!("top_frac={}\n", self.top_frac));
        canonical.push_str(&format!("top_k_journals={}\n", self.top_k_journals));
        for var in ScoreVar::ALL {
            canonical.push_str(&format!(
                "degree.{}={}\n",
                var.column(),
                self.degrees.get(&var).copied().unwrap_or(var.default_degree())
            ));
        }
        Sha256::digest(canonical.as_bytes()).into()
    }

    pub fn degree_options(&self) -> cocite::stats::AnalyzeOptions {
        cocite::stats::AnalyzeOptions {
            top_frac: self.top_frac,
            degrees: self.degrees.clone(),
        }
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of a file's contents.
pub fn file_digest(path: &Path) -> Result<[u8; 32]> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    Ok(Sha256::digest(&bytes).into())
}

/// Combined digest of several files, order-sensitive.
pub fn combined_digest(paths: &[&Path]) -> Result<[u8; 32]> {
    let mut hasher = Sha256::new();
    for path in paths {
        hasher.update(file_digest(path)?);
    }
    Ok(hasher.finalize().into())
}

/// Provenance header for output files.
pub fn output_meta(config: &RunConfig, inputs: &[&Path]) -> Result<Meta> {
    let mut input_digests = Vec::new();
    for path in inputs {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        input_digests.push((name, hex(&file_digest(path)?)));
    }
    Ok(Meta {
        tool_version: TOOL_VERSION.to_string(),
        config_digest: hex(&config.semantic_digest()),
        input_digests,
    })
}
