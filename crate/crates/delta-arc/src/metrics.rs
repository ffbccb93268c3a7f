//! Corpus size metrics.
//!
//! Lines of code are counted per file as the lines that are neither blank
//! nor comment-only; `//` and `/* */` comments are recognised, and comment
//! markers inside string literals do not count as comments. The headline
//! figure is the relative share of delta code: delta LOC divided by the
//! combined LOC of core and delta models.

use std::io;
use std::path::{Path, PathBuf};

use crate::diag::{Code, Diagnostic, Loc};

/// Counts the lines of `text` that contain code: non-blank after stripping
/// `//` and `/* */` comments. A line inside a block comment counts only if
/// code appears on it outside the comment.
pub fn count_loc(text: &str) -> usize {
    let mut loc = 0;
    let mut in_block = false;
    for line in text.lines() {
        let mut has_code = false;
        let mut in_str = false;
        let mut chars = line.chars().peekable();
        while let Some(ch) = chars.next() {
            if in_block {
                if ch == '*' && chars.peek() == Some(&'/') {
                    chars.next();
                    in_block = false;
                }
                continue;
            }
            if in_str {
                has_code = true;
                if ch == '"' {
                    in_str = false;
                }
                continue;
            }
            match ch {
                '"' => {
                    has_code = true;
                    in_str = true;
                }
                '/' if chars.peek() == Some(&'/') => break,
                '/' if chars.peek() == Some(&'*') => {
                    chars.next();
                    in_block = true;
                }
                c if c.is_whitespace() => {}
                _ => has_code = true,
            }
        }
        if has_code {
            loc += 1;
        }
    }
    loc
}

/// Size figures for one set of files.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorpusStats {
    pub files: usize,
    pub loc: usize,
    pub max_loc: usize,
}

impl CorpusStats {
    pub fn avg_loc(&self) -> f64 {
        if self.files == 0 {
            0.0
        } else {
            self.loc as f64 / self.files as f64
        }
    }

    fn add(&mut self, loc: usize) {
        self.files += 1;
        self.loc += loc;
        self.max_loc = self.max_loc.max(loc);
    }

    fn combined(self, other: Self) -> Self {
        CorpusStats {
            files: self.files + other.files,
            loc: self.loc + other.loc,
            max_loc: self.max_loc.max(other.max_loc),
        }
    }
}

/// The metrics report: core-only, delta-only, and combined figures plus the
/// relative share of delta code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub core: CorpusStats,
    pub deltas: CorpusStats,
    pub combined: CorpusStats,
}

impl MetricsReport {
    /// Delta LOC as a percentage of combined LOC (0 when the corpus is empty).
    pub fn rel_vc(&self) -> f64 {
        if self.combined.loc == 0 {
            0.0
        } else {
            self.deltas.loc as f64 / self.combined.loc as f64 * 100.0
        }
    }

    /// Machine-readable `key=value` lines.
    pub fn key_values(&self) -> String {
        let mut out = String::new();
        for (prefix, stats) in [("core", self.core), ("deltas", self.deltas), ("combined", self.combined)] {
            out.push_str(&format!(
                "{prefix}.files={}\n{prefix}.loc={}\n{prefix}.maxLOC={}\n{prefix}.avgLOC={:.1}\n",
                stats.files,
                stats.loc,
                stats.max_loc,
                stats.avg_loc()
            ));
        }
        out.push_str(&format!("relVC={:.2}\n", self.rel_vc()));
        out
    }
}

impl std::fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<10} {:>6} {:>6} {:>8} {:>8}", "", "files", "LOC", "max LOC", "avg LOC")?;
        for (label, stats) in [("core", self.core), ("deltas", self.deltas), ("combined", self.combined)] {
            writeln!(
                f,
                "{:<10} {:>6} {:>6} {:>8} {:>8.1}",
                label,
                stats.files,
                stats.loc,
                stats.max_loc,
                stats.avg_loc()
            )?;
        }
        write!(f, "relative delta share: {:.2}%", self.rel_vc())
    }
}

/// Why measuring failed.
#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    /// Neither directory contained a single model file.
    #[error("{0}")]
    Empty(Diagnostic),
}

fn measure_dir(dir: &Path, ext: &str) -> Result<CorpusStats, MetricsError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|source| MetricsError::Io { path: dir.to_path_buf(), source })?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| MetricsError::Io { path: dir.to_path_buf(), source })?;
        let path = entry.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            files.push(path);
        }
    }
    files.sort();
    let mut stats = CorpusStats::default();
    for path in files {
        let text = std::fs::read_to_string(&path)
            .map_err(|source| MetricsError::Io { path: path.clone(), source })?;
        stats.add(count_loc(&text));
    }
    Ok(stats)
}

/// Measures all `.arc` files under `core_dir` and all `.delta` files under
/// `delta_dir`. An entirely empty corpus is an error.
pub fn measure(core_dir: &Path, delta_dir: &Path) -> Result<MetricsReport, MetricsError> {
    let core = measure_dir(core_dir, "arc")?;
    let deltas = measure_dir(delta_dir, "delta")?;
    if core.files == 0 && deltas.files == 0 {
        return Err(MetricsError::Empty(Diagnostic::error(
            Code::MetricsEmpty,
            Loc::new(core_dir.display().to_string(), 0, 0),
            format!(
                "no `.arc` files under `{}` and no `.delta` files under `{}`",
                core_dir.display(),
                delta_dir.display()
            ),
        )));
    }
    Ok(MetricsReport { core, deltas, combined: core.combined(deltas) })
}
