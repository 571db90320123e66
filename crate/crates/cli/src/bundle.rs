//! Output directories with a hashed manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub versions: BTreeMap<String, String>,
    /// File name to sha256 of its bytes.
    pub artifacts: BTreeMap<String, String>,
}

/// An output directory being filled.
pub struct Bundle {
    dir: PathBuf,
    artifacts: BTreeMap<String, String>,
}

impl Bundle {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            artifacts: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.artifacts.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_table(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
        let mut buf = Vec::new();
        mreg_core::io::write_table_csv(&mut buf, header, rows)?;
        self.write(name, &buf)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    /// Writes `manifest.json`, which lists every artifact written so far.
    pub fn finish(self, command: &str, config_sha256: String, seed: u64) -> CliResult<()> {
        let versions = BTreeMap::from([
            ("mreg-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("mreg-core".to_string(), mreg_core::VERSION.to_string()),
        ]);
        let m = Manifest {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config_sha256,
            seed,
            versions,
            artifacts: self.artifacts,
        };
        let mut s = serde_json::to_string_pretty(&m).map_err(|e| CliError::Config(e.to_string()))?;
        s.push('\n');
        fs::write(self.dir.join("manifest.json"), s)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_lists_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut b = Bundle::create(dir.path()).unwrap();
        b.write_table("x.csv", &["a", "b"], &[vec![1.0, 2.5]]).unwrap();
        b.finish("test", "00".into(), 7).unwrap();
        let m: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["seed"], 7);
        let bytes = fs::read(dir.path().join("x.csv")).unwrap();
        assert_eq!(m["artifacts"]["x.csv"], sha256_hex(&bytes));
    }
}
