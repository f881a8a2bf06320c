use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Every report carries the resolved config and the versions that
/// produced it.
#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub subcommand: &'a str,
    pub library_version: &'a str,
    pub cli_version: &'a str,
    pub config: &'a ExperimentConfig,
    pub status: &'a str,
    pub result: T,
}

/// Names files `{subcommand}-{hash}.{ext}` in the output directory, where
/// the hash covers the subcommand and the resolved config.
pub struct Output {
    dir: PathBuf,
    subcommand: &'static str,
    stem: String,
    pub quiet: bool,
    pub written: Vec<PathBuf>,
}

pub fn config_hash(subcommand: &str, cfg: &ExperimentConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let mut h = Sha256::new();
    h.update(subcommand.as_bytes());
    h.update(b"\n");
    h.update(json.as_bytes());
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl Output {
    pub fn new(dir: &Path, subcommand: &'static str, cfg: &ExperimentConfig, quiet: bool) -> Self {
        Output {
            dir: dir.to_path_buf(),
            subcommand,
            stem: format!("{subcommand}-{}", config_hash(subcommand, cfg)),
            quiet,
            written: Vec::new(),
        }
    }

    pub fn path(&self, ext: &str) -> PathBuf {
        self.dir.join(format!("{}.{ext}", self.stem))
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn write(&mut self, ext: &str, contents: &str) -> Result<PathBuf, CliError> {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", self.dir.display()));
        std::fs::create_dir_all(&self.dir).map_err(io)?;
        let path = self.path(ext);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        tmp.write_all(contents.as_bytes()).map_err(io)?;
        tmp.flush().map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn report<T: Serialize>(&mut self, cfg: &ExperimentConfig, status: &str, result: T) -> Result<PathBuf, CliError> {
        let r = Report {
            subcommand: self.subcommand,
            library_version: degen_ma::VERSION,
            cli_version: env!("CARGO_PKG_VERSION"),
            config: cfg,
            status,
            result,
        };
        let mut text = serde_json::to_string_pretty(&r).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write("json", &text)
    }

    pub fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }
}
