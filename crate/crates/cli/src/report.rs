//! Output files: CSV bodies with a reproducibility header, and JSON
//! summaries. Nothing here writes timestamps, so identical runs produce
//! identical bytes.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

pub struct OutDir {
    dir: PathBuf,
    header: String,
    config_json: String,
    root_seed: u64,
}

impl OutDir {
    /// `config_json` is embedded as a comment at the top of every file.
    pub fn new(dir: &str, config_json: &str, root_seed: u64) -> Result<Self, CliError> {
        let dir = PathBuf::from(dir);
        std::fs::create_dir_all(&dir)?;
        let header = format!("# config: {config_json}\n# root_seed: {root_seed}\n");
        Ok(Self {
            dir,
            header,
            config_json: config_json.to_string(),
            root_seed,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_csv(
        &self,
        name: &str,
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
        file.write_all(self.header.as_bytes())?;
        writeln!(file, "{}", columns.join(","))?;
        for row in rows {
            writeln!(file, "{}", row.join(","))?;
        }
        file.flush()?;
        Ok(path)
    }

    pub fn write_json(&self, name: &str, value: &serde_json::Value) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let config: serde_json::Value =
            serde_json::from_str(&self.config_json).expect("config is valid json");
        let wrapped = serde_json::json!({
            "config": config,
            "root_seed": self.root_seed,
            "result": value,
        });
        let text = format!("{wrapped:#}\n");
        std::fs::write(&path, text)?;
        Ok(path)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// Float formatting for CSV bodies: `{}` on f64 is the shortest
/// representation that round-trips, so identical values print identically.
pub fn fmt_f64(x: f64) -> String {
    let buf = format!("{x}");
    if buf == "-0" {
        "0".into()
    } else {
        buf
    }
}

/// Load every line of a file that is not a comment header.
pub fn csv_body(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n"))
}
