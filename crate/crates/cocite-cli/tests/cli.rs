//! End-to-end tests of the `cocite` binary: file outputs, determinism,
//! and exit codes (0 ok, 2 validation, 3 data, 4 degenerate statistics).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cocite"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn cocite")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_synth_config(dir: &Path, seed: u64) -> PathBuf {
    let path = dir.join("synth.toml");
    fs::write(
        &path,
        format!(
            r#"
seed = {seed}
journal_count = 12
subject_count = 4
papers_per_year = 40
refs_min = 2
refs_max = 9

[window]
t0_start = 2003
t0_end = 2003
past_len = 3
future_len = 3
"#
        ),
    )
    .unwrap();
    path
}

/// Generate a corpus+catalog under `dir/data` and return common flags.
fn setup_corpus(dir: &Path, seed: u64) -> Vec<String> {
    let synth = write_synth_config(dir, seed);
    let out = run(
        &[
            "synth",
            "--synth-config",
            synth.to_str().unwrap(),
            "--output-dir",
            "data",
        ],
        dir,
    );
    assert_ok(&out);
    [
        "--corpus", "data/corpus.jsonl",
        "--catalog", "data/catalog.csv",
        "--t0-start", "2003",
        "--past-len", "3",
        "--future-len", "3",
        "--field-category", "SC00",
        "--min-field-journals", "2",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn with_flags(base: &[String], extra: &[&str]) -> Vec<String> {
    base.iter()
        .cloned()
        .chain(extra.iter().map(|s| s.to_string()))
        .collect()
}

fn run_strings(subcommand: &str, flags: &[String], cwd: &Path) -> Output {
    let mut args = vec![subcommand.to_string()];
    args.extend(flags.iter().cloned());
    bin()
        .args(&args)
        .current_dir(cwd)
        .output()
        .expect("spawn cocite")
}

#[test]
fn count_is_idempotent_and_shard_independent() {
    let dir = tempfile::tempdir().unwrap();
    let base = setup_corpus(dir.path(), 7);

    let flags1 = with_flags(&base, &["--output-dir", "run1", "--shards", "1"]);
    assert_ok(&run_strings("count", &flags1, dir.path()));
    let first = fs::read(dir.path().join("run1/counts.ccl")).unwrap();

    // rerun in place: byte-identical
    assert_ok(&run_strings("count", &flags1, dir.path()));
    assert_eq!(first, fs::read(dir.path().join("run1/counts.ccl")).unwrap());

    // 8 shards: byte-identical cache
    let flags8 = with_flags(&base, &["--output-dir", "run8", "--shards", "8"]);
    assert_ok(&run_strings("count", &flags8, dir.path()));
    assert_eq!(first, fs::read(dir.path().join("run8/counts.ccl")).unwrap());
}

#[test]
fn pipeline_outputs_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let base = setup_corpus(dir.path(), 11);
    let flags = with_flags(&base, &["--output-dir", "out"]);
    assert_ok(&run_strings("pipeline", &flags, dir.path()));
    let files = ["counts.ccl", "scores.csv", "curves.csv", "fits.json", "journals.gexf", "journal_table.csv"];
    let snapshot: Vec<Vec<u8>> = files
        .iter()
        .map(|f| fs::read(dir.path().join("out").join(f)).unwrap())
        .collect();
    assert_ok(&run_strings("pipeline", &flags, dir.path()));
    for (f, before) in files.iter().zip(&snapshot) {
        let after = fs::read(dir.path().join("out").join(f)).unwrap();
        assert_eq!(before, &after, "{f} changed across reruns");
    }
}

#[test]
fn missing_catalog_is_a_data_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let base = setup_corpus(dir.path(), 3);
    let mut flags = with_flags(&base, &["--output-dir", "out"]);
    // swap the catalog for a missing file
    let idx = flags.iter().position(|f| f == "data/catalog.csv").unwrap();
    flags[idx] = "data/nope.csv".into();
    let out = run_strings("count", &flags, dir.path());
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nope.csv"), "stderr: {stderr}");
}

#[test]
fn missing_required_flags_are_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["count", "--corpus", "x.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupted_cache_magic_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let base = setup_corpus(dir.path(), 5);
    let flags = with_flags(&base, &["--output-dir", "out"]);
    assert_ok(&run_strings("count", &flags, dir.path()));
    let cache = dir.path().join("out/counts.ccl");
    let mut bytes = fs::read(&cache).unwrap();
    bytes[0] = b'Z';
    fs::write(&cache, bytes).unwrap();
    let out = run_strings("score", &flags, dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("magic"));
}

#[test]
fn window_mismatch_between_cache_and_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let base = setup_corpus(dir.path(), 5);
    let flags = with_flags(&base, &["--output-dir", "out"]);
    assert_ok(&run_strings("count", &flags, dir.path()));
    // score under a different future window
    let mut other = flags.clone();
    let idx = other.iter().position(|f| f == "--future-len").unwrap();
    other[idx + 1] = "2".into();
    let out = run_strings("score", &other, dir.path());
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("window"), "stderr: {stderr}");
}

#[test]
fn empty_present_sample_yields_header_only_scores() {
    let dir = tempfile::tempdir().unwrap();
    // corpus with no papers in 2003
    fs::create_dir_all(dir.path().join("data")).unwrap();
    fs::write(
        dir.path().join("data/corpus.jsonl"),
        concat!(
            "{\"id\":\"A\",\"year\":2001,\"journal\":\"J0\",\"refs\":[\"B\"]}\n",
            "{\"id\":\"B\",\"year\":2000,\"journal\":\"J0\",\"refs\":[]}\n",
        ),
    )
    .unwrap();
    fs::write(
        dir.path().join("data/catalog.csv"),
        "journal_id,subject_category_id,journal_name\nJ0,SC00,Journal Zero\n",
    )
    .unwrap();
    let flags: Vec<String> = [
        "--corpus", "data/corpus.jsonl",
        "--catalog", "data/catalog.csv",
        "--t0-start", "2003",
        "--past-len", "3",
        "--future-len", "3",
        "--min-field-journals", "0",
        "--output-dir", "out",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    assert_ok(&run_strings("count", &flags, dir.path()));
    assert_ok(&run_strings("score", &flags, dir.path()));
    let scores = fs::read_to_string(dir.path().join("out/scores.csv")).unwrap();
    let data_lines: Vec<&str> = scores
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(data_lines.len(), 1, "expected only the header: {scores}");
    assert!(data_lines[0].starts_with("paper_id,year,journal,"));
}

#[test]
fn constant_future_citations_fail_analysis_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    // handcrafted score table where every paper has the same future count
    let mut table = String::from(
        "paper_id,year,journal,cit_mean,cit_p90,jr_mean,jr_p90,sc_mean,sc_p90,ncit_pct,acit_mean,ajr_mean,asc_mean,cit_alt_mean,jr_alt_mean,sc_alt_mean,n_pairs_paper,n_pairs_journal,n_pairs_subject,future_citations\n",
    );
    for i in 0..20 {
        table.push_str(&format!(
            "P{i},2003,J0,0.5,0.6,0.4,0.5,0.3,0.4,50,0.1,0.0,0.0,1.0,1.0,1.0,3,3,3,5\n"
        ));
    }
    fs::write(dir.path().join("scores.csv"), table).unwrap();
    let out = run(
        &[
            "analyze",
            "--corpus", "unused.jsonl",
            "--catalog", "unused.csv",
            "--t0-start", "2003",
            "--min-field-journals", "0",
            "--scores", "scores.csv",
            "--output-dir", "out",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn synth_is_deterministic_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let synth = write_synth_config(dir.path(), 99);
    for sub in ["a", "b"] {
        assert_ok(&run(
            &[
                "synth",
                "--synth-config",
                synth.to_str().unwrap(),
                "--output-dir",
                sub,
            ],
            dir.path(),
        ));
    }
    assert_eq!(
        fs::read(dir.path().join("a/corpus.jsonl")).unwrap(),
        fs::read(dir.path().join("b/corpus.jsonl")).unwrap()
    );
    assert_eq!(
        fs::read(dir.path().join("a/catalog.csv")).unwrap(),
        fs::read(dir.path().join("b/catalog.csv")).unwrap()
    );
}

#[test]
fn verify_subcommand_confirms_oracle_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let base = setup_corpus(dir.path(), 23);
    let flags = with_flags(&base, &["--output-dir", "out"]);
    let out = run_strings("verify", &flags, dir.path());
    assert_ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("verified"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let base = setup_corpus(dir.path(), 31);
    drop(base);
    fs::write(
        dir.path().join("run.toml"),
        r#"
corpus = "data/corpus.jsonl"
catalog = "data/catalog.csv"
t0_start = 2003
past_len = 3
future_len = 3
field_category = "SC00"
min_field_journals = 2
output_dir = "from_config"
"#,
    )
    .unwrap();
    // config alone
    assert_ok(&run(&["count", "--config", "run.toml"], dir.path()));
    assert!(dir.path().join("from_config/counts.ccl").exists());
    // flag overrides output_dir
    assert_ok(&run(
        &["count", "--config", "run.toml", "--output-dir", "from_flag"],
        dir.path(),
    ));
    assert!(dir.path().join("from_flag/counts.ccl").exists());
    // caches agree regardless of the knob that moved
    assert_eq!(
        fs::read(dir.path().join("from_config/counts.ccl")).unwrap(),
        fs::read(dir.path().join("from_flag/counts.ccl")).unwrap()
    );
}

#[test]
fn graph_respects_format_and_top_k() {
    let dir = tempfile::tempdir().unwrap();
    let base = setup_corpus(dir.path(), 13);
    let flags = with_flags(
        &base,
        &["--output-dir", "out", "--graph-format", "edgelist_csv", "--top-k-journals", "3"],
    );
    assert_ok(&run_strings("count", &flags, dir.path()));
    assert_ok(&run_strings("score", &flags, dir.path()));
    assert_ok(&run_strings("graph", &flags, dir.path()));
    let edges = fs::read_to_string(dir.path().join("out/journal_edges.csv")).unwrap();
    let mut journals = std::collections::BTreeSet::new();
    for line in edges.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let mut cols = line.split(',');
        journals.insert(cols.next().unwrap().to_string());
        journals.insert(cols.next().unwrap().to_string());
    }
    assert!(journals.len() <= 3, "kept journals: {journals:?}");
    let table = fs::read_to_string(dir.path().join("out/journal_table.csv")).unwrap();
    let rows = table.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert!(rows <= 3);
}
