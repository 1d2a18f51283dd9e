//! Summary, per-trial records and resolved-config sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Method, OutputFormat, SweepAxis};
use crate::harness::run::{SummaryRow, TrialRecord};

pub const SUMMARY_HEADER: &str =
    "sweep_axis,sweep_value,method,mean_se,stderr_se,trials_ok,trials_failed,mean_outer_iters,mean_wall_time_s";

/// Paths written by [`emit`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub summary: PathBuf,
    pub records: PathBuf,
    pub config: PathBuf,
}

impl OutputPaths {
    /// `out.csv` → `out.csv`, `out.records.csv`, `out.config.toml`.
    pub fn for_summary(summary: &Path, format: OutputFormat) -> Self {
        let stem = summary.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "results".into());
        let dir = summary.parent().unwrap_or_else(|| Path::new(""));
        Self {
            summary: summary.to_path_buf(),
            records: dir.join(format!("{stem}.records.{}", format.extension())),
            config: dir.join(format!("{stem}.config.toml")),
        }
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.sweep_axis.as_str(),
            r.sweep_value,
            r.method.as_str(),
            r.mean_se,
            r.stderr_se,
            r.trials_ok,
            r.trials_failed,
            r.mean_outer_iters,
            r.mean_wall_time_s
        ));
    }
    out
}

fn parse_summary_line(line: &str, lineno: usize, path: &Path) -> Result<SummaryRow> {
    let bad = |what: &str| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {lineno}: {what}"),
    };
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 9 {
        return Err(bad("expected 9 fields"));
    }
    let axis: SweepAxis =
        serde_json::from_value(serde_json::Value::String(fields[0].into())).map_err(|_| bad("unknown sweep_axis"))?;
    let method: Method =
        serde_json::from_value(serde_json::Value::String(fields[2].into())).map_err(|_| bad("unknown method"))?;
    let float = |i: usize| fields[i].parse::<f64>().map_err(|_| bad("bad number"));
    let count = |i: usize| fields[i].parse::<usize>().map_err(|_| bad("bad count"));
    Ok(SummaryRow {
        sweep_axis: axis,
        sweep_value: float(1)?,
        method,
        mean_se: float(3)?,
        stderr_se: float(4)?,
        trials_ok: count(5)?,
        trials_failed: count(6)?,
        mean_outer_iters: float(7)?,
        mean_wall_time_s: float(8)?,
    })
}

/// Reads a summary CSV written by [`emit`].
pub fn read_summary_csv(path: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(SUMMARY_HEADER) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: "missing or unexpected header".into(),
        });
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| parse_summary_line(l, i + 2, path))
        .collect()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn records_csv(records: &[TrialRecord], path: &Path) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    }
    w.into_inner().map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn to_json<S: serde::Serialize>(value: &S, path: &Path) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes the summary, the per-trial records and the resolved config next
/// to `cfg.output_path`.
pub fn emit(summary: &[SummaryRow], records: &[TrialRecord], cfg: &ExperimentConfig) -> Result<OutputPaths> {
    let paths = OutputPaths::for_summary(&cfg.output_path, cfg.output_format);
    match cfg.output_format {
        OutputFormat::Csv => {
            write_file(&paths.summary, summary_csv(summary).as_bytes())?;
            write_file(&paths.records, &records_csv(records, &paths.records)?)?;
        }
        OutputFormat::Json => {
            write_file(&paths.summary, &to_json(&summary, &paths.summary)?)?;
            write_file(&paths.records, &to_json(&records, &paths.records)?)?;
        }
    }
    write_file(&paths.config, cfg.to_toml_string()?.as_bytes())?;
    Ok(paths)
}
