//! Output files: CSV, JSON and the run manifest, written after all computation.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::CliError;

/// 17 significant digits, enough to recover every `f64` exactly.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Self::default();
        c.row(header.iter().map(|s| s.to_string()));
        c
    }

    pub fn row(&mut self, cells: impl IntoIterator<Item = String>) {
        let line: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// Flags after merging the config file; rerunning with them reproduces the run.
    pub args: Vec<String>,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
}

/// Files of one run, kept in memory until the computation has finished.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    /// Writes every file and then `manifest.json`, each through a temporary file
    /// and a rename.
    pub fn commit(mut self, command: &str, args: &[String], parameters: serde_json::Value) -> Result<PathBuf, CliError> {
        let mut outputs: Vec<String> = self.files.iter().map(|f| f.0.clone()).collect();
        outputs.push("manifest.json".into());
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            args: args.to_vec(),
            parameters,
            outputs,
        };
        self.files.push(("manifest.json".into(), json(&manifest)));
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::Io { path: self.dir.clone(), source: e })?;
        for (name, contents) in &self.files {
            let path = self.dir.join(name);
            let tmp = self.dir.join(format!(".{name}.tmp"));
            std::fs::write(&tmp, contents).map_err(|e| CliError::Io { path: tmp.clone(), source: e })?;
            std::fs::rename(&tmp, &path).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
        }
        Ok(self.dir)
    }
}
