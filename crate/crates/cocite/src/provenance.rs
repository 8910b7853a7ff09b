//! Metadata embedded in every pipeline output: tool version, a digest of
//! the semantic run configuration, and digests of the input files. Outputs
//! stay byte-stable because none of these change on a rerun.

/// Output provenance header. Digests are lowercase hex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Meta {
    pub tool_version: String,
    pub config_digest: String,
    pub input_digests: Vec<(String, String)>,
}

impl Meta {
    /// `#`-prefixed comment lines for CSV-style outputs.
    pub fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# tool cocite {}", self.tool_version),
            format!("# config {}", self.config_digest),
        ];
        for (name, digest) in &self.input_digests {
            lines.push(format!("# input {name} {digest}"));
        }
        lines
    }

    /// Fixed placeholder provenance for unit tests.
    pub fn for_tests() -> Self {
        Meta {
            tool_version: "0.0.0-test".into(),
            config_digest: "0".repeat(64),
            input_digests: vec![("test".into(), "0".repeat(64))],
        }
    }
}
