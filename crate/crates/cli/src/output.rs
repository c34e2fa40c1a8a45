use std::path::{Path, PathBuf};
use std::time::Instant;

use qsurrogate::Result;
use serde::{Deserialize, Serialize};

/// Record of one invocation, written next to its artifacts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name.
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seeds: serde_json::Value,
    pub wall_clock_seconds: f64,
    pub artifacts: Vec<String>,
    pub version: String,
}

pub struct Output {
    dir: PathBuf,
    written: Vec<String>,
    started: Instant,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new(), started: Instant::now() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let path = self.dir.join(name);
        self.written.push(path.display().to_string());
        path
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.path(name);
        std::fs::write(&path, contents)?;
        Ok(path)
    }

    /// Registers a file written by someone else.
    pub fn external(&mut self, name: &str) -> PathBuf {
        self.path(name)
    }

    /// Writes `<command>.manifest.json` listing everything written so far.
    pub fn finish(mut self, command: &str, argv: &[String], config: serde_json::Value, seeds: serde_json::Value) -> Result<()> {
        let manifest_name = format!("{command}.manifest.json");
        let manifest_path = self.dir.join(&manifest_name);
        let manifest = RunManifest {
            command: command.to_string(),
            argv: argv.to_vec(),
            config,
            seeds,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            artifacts: std::mem::take(&mut self.written),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(&manifest_path, text)?;
        println!("{}", manifest_path.display());
        Ok(())
    }
}
