use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::Value;

/// Outputs of one command, held in memory until the command has succeeded.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(PathBuf, String)>,
}

impl Artifacts {
    pub fn add(&mut self, path: PathBuf, contents: String) {
        self.files.push((path, contents));
    }

    pub fn report(&mut self, prefix: &Path, value: &Value) {
        let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
        text.push('\n');
        self.add(with_suffix(prefix, ".report.json"), text);
    }

    pub fn points(&mut self, prefix: &Path, text: String) {
        self.add(with_suffix(prefix, ".points.txt"), text);
    }

    pub fn svg(&mut self, prefix: &Path, text: String) {
        self.add(with_suffix(prefix, ".svg"), text);
    }

    /// Writes every file through a temporary sibling and a rename.
    pub fn write_all(self) -> io::Result<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.files.len());
        for (path, contents) in self.files {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let tmp = with_suffix(&path, ".tmp");
            fs::write(&tmp, contents)?;
            fs::rename(&tmp, &path)?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
