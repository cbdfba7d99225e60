use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use log::info;
use qfa_core::Tolerances;
use serde_json::{json, Map, Value};

use crate::args::Cli;

/// Flags shared by every command.
pub struct Context {
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tol: Tolerances,
}

impl Context {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let mut tol = Tolerances::default();
        for spec in &cli.tol {
            tol.apply_override(spec)?;
        }
        if let Some(dir) = &cli.out {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(Self {
            out: cli.out.clone(),
            seed: cli.seed,
            tol,
        })
    }

    /// Writes `name` under `--out`; skipped without an output directory.
    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        let Some(dir) = &self.out else {
            info!("no --out directory, skipping {name}");
            return Ok(());
        };
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn write_json(&self, name: &str, value: &Value) -> Result<()> {
        self.write_text(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }

    /// Wraps `body` with the run metadata, prints it and stores it as
    /// `report.json`. Returns `verified` for the exit code.
    pub fn report(&self, command: &str, body: Value, verified: bool) -> Result<bool> {
        let mut doc = Map::new();
        doc.insert("command".into(), json!(command));
        doc.insert("seed".into(), json!(self.seed));
        doc.insert("timestamp".into(), json!(chrono::Utc::now().to_rfc3339()));
        doc.insert(
            "tolerances".into(),
            json!({"herm": self.tol.herm, "psd": self.tol.psd, "eq": self.tol.eq, "rank": self.tol.rank}),
        );
        doc.insert("verified".into(), json!(verified));
        if let Value::Object(fields) = body {
            doc.extend(fields);
        } else {
            doc.insert("result".into(), body);
        }
        let doc = Value::Object(doc);
        let mut stdout = std::io::stdout().lock();
        if let Err(e) = writeln!(stdout, "{}", serde_json::to_string_pretty(&doc)?) {
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                return Err(e.into());
            }
        }
        self.write_json("report.json", &doc)?;
        Ok(verified)
    }
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
