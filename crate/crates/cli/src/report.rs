use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Command, Scenario};

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A CSV file the plotting script should draw: column 1 against `y`.
#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub file: String,
    pub title: String,
    pub x_label: String,
    /// 1-based column indices.
    pub y: Vec<usize>,
    pub log_y: bool,
    /// Distinguishes several plots of one file.
    pub tag: String,
}

impl Series {
    /// Plots every column after the first.
    pub fn all(file: String, title: String, header: &[&str], log_y: bool) -> Self {
        Series {
            file,
            title,
            x_label: header[0].into(),
            y: (2..=header.len()).collect(),
            log_y,
            tag: String::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub command: Command,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    /// Scalar summaries, also the columns of sweep tables.
    #[serde(serialize_with = "finite_map")]
    pub metrics: BTreeMap<String, f64>,
    pub details: serde_json::Value,
    pub files: Vec<String>,
    #[serde(skip)]
    pub series: Vec<Series>,
}

fn finite_map<S: serde::Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        if v.is_finite() {
            map.serialize_entry(k, v)?;
        } else {
            map.serialize_entry(k, &format!("{v}"))?;
        }
    }
    map.end()
}

impl CheckReport {
    pub fn new(command: Command) -> Self {
        CheckReport {
            command,
            passed: true,
            assertions: Vec::new(),
            metrics: BTreeMap::new(),
            details: serde_json::Value::Null,
            files: Vec::new(),
            series: Vec::new(),
        }
    }

    pub fn assert(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    pub fn failed_run(command: Command, err: impl std::fmt::Display) -> Self {
        let mut r = CheckReport::new(command);
        r.assert("run", false, err.to_string());
        r
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub passed: bool,
    /// The scenario with every default filled in.
    pub scenario: Scenario,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub version: &'static str,
    pub command: String,
    pub tolerance_scale: f64,
    pub workers: usize,
    pub passed: bool,
    pub scenarios: Vec<ScenarioReport>,
}

/// Files for one scenario live in `<out>/<scenario>/`.
#[derive(Debug, Clone)]
pub struct OutDir {
    pub root: PathBuf,
    pub dir: PathBuf,
}

impl OutDir {
    pub fn new(root: &Path, scenario: &str) -> std::io::Result<Self> {
        let dir = root.join(scenario);
        fs::create_dir_all(&dir)?;
        Ok(OutDir {
            root: root.to_path_buf(),
            dir,
        })
    }

    /// Path of `name` and its spelling relative to the output root.
    pub fn file(&self, name: &str) -> (PathBuf, String) {
        let path = self.dir.join(name);
        let rel = path
            .strip_prefix(&self.root)
            .unwrap_or(&path)
            .to_string_lossy()
            .replace('\\', "/");
        (path, rel)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Writes a headed CSV of `f64` rows.
pub fn write_series(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v}")))?;
    }
    w.flush()?;
    Ok(())
}

/// A gnuplot script rendering every series to PNG next to its CSV.
pub fn gnuplot_script(series: &[Series]) -> String {
    let mut s = String::new();
    s.push_str("# gnuplot -c plot.gp  (run from the output directory)\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set grid\n");
    for sr in series {
        let mut png = sr.file.trim_end_matches(".csv").to_string();
        if !sr.tag.is_empty() {
            png = format!("{png}.{}", sr.tag);
        }
        png.push_str(".png");
        let _ = writeln!(s, "\nset output '{png}'");
        let _ = writeln!(s, "set title \"{}\"", sr.title.replace('"', "'"));
        let _ = writeln!(s, "set xlabel '{}'", sr.x_label);
        s.push_str(if sr.log_y { "set logscale y\n" } else { "unset logscale y\n" });
        let plots: Vec<String> = sr
            .y
            .iter()
            .map(|i| format!("'{}' using 1:{i} with linespoints", sr.file))
            .collect();
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    }
    s
}
