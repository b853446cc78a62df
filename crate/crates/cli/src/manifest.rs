//! Deterministic run manifests: config echo, version, seed, and input
//! digests. Paths are recorded by file name only so reruns in different
//! directories stay byte-identical.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct Manifest {
    pub stage: String,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: BTreeMap<String, String>,
    pub input_digests: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

/// Collects the files one stage writes and finishes with its manifest.
pub struct StageWriter {
    out_dir: PathBuf,
    stage: String,
    outputs: Vec<String>,
}

impl StageWriter {
    pub fn new(out_dir: &Path, stage: &str) -> Result<Self> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("creating output directory {}", out_dir.display()))?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            stage: stage.to_string(),
            outputs: Vec::new(),
        })
    }

    pub fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.out_dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn finish(
        mut self,
        seed: Option<u64>,
        config: BTreeMap<String, String>,
        inputs: &[&Path],
    ) -> Result<()> {
        let mut input_digests = BTreeMap::new();
        for path in inputs {
            input_digests.insert(file_name_of(path), sha256_of(path)?);
        }
        self.outputs.sort();
        let manifest_name = format!("manifest_{}.json", self.stage);
        let manifest = Manifest {
            stage: self.stage.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            input_digests,
            outputs: self.outputs.clone(),
        };
        let path = self.out_dir.join(&manifest_name);
        let mut file =
            File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(&mut file, &manifest)?;
        writeln!(file)?;
        Ok(())
    }
}

pub fn file_name_of(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn sha256_of(path: &Path) -> Result<String> {
    let mut file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 65536];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex_string(&hasher.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
