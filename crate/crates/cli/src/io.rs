//! Reading pair files, tables and label indices; atomic file output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rcc_core::synthgen::CauseEffectSample;

use crate::error::{CliError, Result};

/// A parsed whitespace-column file.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFileRecord {
    pub path: PathBuf,
    /// One vector per column.
    pub columns: Vec<Vec<f64>>,
    pub label: Option<i32>,
}

impl PairFileRecord {
    /// File stem, used to match label rows.
    pub fn name(&self) -> String {
        self.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn to_sample(&self) -> Result<CauseEffectSample> {
        if self.columns.len() != 2 {
            return Err(CliError::Data(format!(
                "{}: expected 2 columns for a cause-effect pair, found {}",
                self.path.display(),
                self.columns.len()
            )));
        }
        let mut s = CauseEffectSample::new(self.columns[0].clone(), self.columns[1].clone())?.with_name(self.name());
        s.label = self.label;
        Ok(s)
    }
}

/// Parses whitespace-separated decimal columns.
pub fn parse_columns(text: &str, path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let values = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::Parse {
                        path: path.to_path_buf(),
                        line: lineno,
                        message: format!("not a finite decimal number: {tok:?}"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        if columns.is_empty() {
            columns = vec![Vec::new(); values.len()];
        } else if values.len() != columns.len() {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("expected {} columns, found {}", columns.len(), values.len()),
            });
        }
        for (c, v) in columns.iter_mut().zip(values) {
            c.push(v);
        }
    }
    let rows = columns.first().map_or(0, Vec::len);
    if rows < 2 {
        return Err(CliError::Data(format!("{}: need at least 2 rows, found {rows}", path.display())));
    }
    Ok(columns)
}

pub fn parse_pair_file(path: &Path) -> Result<PairFileRecord> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(PairFileRecord { path: path.to_path_buf(), columns: parse_columns(&text, path)?, label: None })
}

/// Expands directories into their data files (everything except `*.csv`,
/// `*.json` and hidden files), sorted by name.
pub fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| CliError::io(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_data_file(p))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    if files.is_empty() {
        return Err(CliError::Usage("no input files".into()));
    }
    Ok(files)
}

fn is_data_file(p: &Path) -> bool {
    let hidden = p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with('.'));
    let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("");
    !hidden && ext != "csv" && ext != "json"
}

/// Reads a `name,label` CSV; an initial `name,label` header is skipped.
pub fn read_labels(path: &Path) -> Result<BTreeMap<String, i32>> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(file);
    let mut labels = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 1;
        if record.len() != 2 {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected name,label but found {} fields", record.len()),
            });
        }
        if i == 0 && &record[0] == "name" && &record[1] == "label" {
            continue;
        }
        let label = match &record[1] {
            "1" | "+1" => 1,
            "-1" => -1,
            other => {
                return Err(CliError::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("label must be 1 or -1, found {other:?}"),
                })
            }
        };
        labels.insert(record[0].to_string(), label);
    }
    Ok(labels)
}

/// Writes `bytes` to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Formats columns as whitespace-separated rows.
pub fn format_columns(columns: &[&[f64]]) -> String {
    let n = columns.first().map_or(0, |c| c.len());
    let mut out = String::with_capacity(n * columns.len() * 20);
    for i in 0..n {
        let row: Vec<String> = columns.iter().map(|c| c[i].to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
