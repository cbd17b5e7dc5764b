use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// The command line as typed, for provenance headers.
pub fn invocation() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

/// `# `-prefixed lines, one per entry.
pub fn comment_block(comments: &[String]) -> String {
    let mut text = String::new();
    for c in comments {
        writeln!(text, "# {c}").expect("write to string");
    }
    text
}

/// A CSV document with `#` comment lines ahead of the header row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(comments: &[String], header: &str) -> Self {
        let mut text = comment_block(comments);
        text.push_str(header);
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| format!("{v:e}")).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// `out` or standard output.
pub fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

/// `path` with its extension replaced, e.g. `batch.csv` to `batch.json`.
pub fn sibling(path: &Path, extension: &str) -> PathBuf {
    path.with_extension(extension)
}
