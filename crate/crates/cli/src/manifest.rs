use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Platform {
    pub os: &'static str,
    pub arch: &'static str,
    pub family: &'static str,
    pub threads: usize,
}

impl Platform {
    pub fn current(threads: usize) -> Self {
        Platform {
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            family: std::env::consts::FAMILY,
            threads,
        }
    }
}

/// Everything needed to reproduce one invocation. Written with status
/// `running` before any computation and rewritten on completion.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: &'static str,
    pub platform: Platform,
    pub config: Value,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub status: String,
    pub exit_code: Option<i32>,
    pub message: Option<String>,
    pub wall_seconds: Option<f64>,
    pub steps: Option<u64>,
    #[serde(skip)]
    path: PathBuf,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        out_dir: &Path,
        config: Value,
        seed: u64,
        outputs: &[&str],
        threads: usize,
    ) -> Self {
        RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            platform: Platform::current(threads),
            config,
            seed,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            status: "running".into(),
            exit_code: None,
            message: None,
            wall_seconds: None,
            steps: None,
            path: out_dir.join("manifest.json"),
            started: None,
        }
    }

    pub fn start(&mut self) -> std::io::Result<()> {
        self.started = Some(Instant::now());
        self.write()
    }

    pub fn finish(&mut self, code: i32, message: Option<String>) -> std::io::Result<()> {
        self.status = if code == 0 { "ok" } else { "failed" }.into();
        self.exit_code = Some(code);
        self.message = message;
        self.wall_seconds = self.started.map(|s| s.elapsed().as_secs_f64());
        self.write()
    }

    fn write(&self) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(&self.path, text + "\n")
    }
}
