//! Deterministic CSV and JSON files, written through a temporary file and
//! renamed into place.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::HarnessError;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

/// 17 significant digits, so values read back bit for bit.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

pub fn csv_text(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (k, cell) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            match cell {
                Cell::Float(v) => out.push_str(&format_float(*v)),
                Cell::Int(v) => write!(out, "{v}").unwrap(),
                Cell::Text(s) => out.push_str(s),
                Cell::Missing => {}
            }
        }
        out.push('\n');
    }
    out
}

/// Snapshot time as it appears in dump file names: at most six decimals,
/// trailing zeros dropped.
pub fn time_label(t: f64) -> String {
    let s = format!("{t:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Writes into one directory and remembers what it wrote.
#[derive(Debug)]
pub struct OutputSink {
    pub dir: PathBuf,
    /// Replaces the experiment's main file name when set.
    pub primary: Option<String>,
    pub written: Vec<String>,
}

impl OutputSink {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into(), primary: None, written: Vec::new() }
    }

    /// `--out` may name a directory or, with a `.csv`/`.json` suffix, the
    /// main output file inside its parent.
    pub fn from_target(target: &Path) -> Self {
        let ext = target.extension().and_then(|e| e.to_str());
        match (ext, target.file_name()) {
            (Some("csv" | "json"), Some(name)) => {
                let dir = target.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
                Self { dir: dir.to_path_buf(), primary: Some(name.to_string_lossy().into()), written: Vec::new() }
            }
            _ => Self::new(target),
        }
    }

    /// Name of the main file of an experiment; `--out x.csv` overrides it
    /// for files with the same extension.
    pub fn main_name(&self, default: &str) -> String {
        match &self.primary {
            Some(p) if Path::new(p).extension() == Path::new(default).extension() => p.clone(),
            _ => default.into(),
        }
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf, HarnessError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| HarnessError::io(&self.dir, e))?;
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        std::fs::write(&tmp, text).map_err(|e| HarnessError::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| HarnessError::io(&path, e))?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.into());
        }
        Ok(path)
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<PathBuf, HarnessError> {
        self.write_text(name, &csv_text(header, rows))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, HarnessError> {
        let mut text = serde_json::to_string_pretty(value).expect("summary serialises");
        text.push('\n');
        self.write_text(name, &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_shapes() {
        assert_eq!(csv_text(&["t", "chi"], &[]), "t,chi\n");
        let rows: Vec<Vec<Cell>> = (0..3).map(|k| vec![Cell::from(k as f64), Cell::Missing]).collect();
        let text = csv_text(&["t", "chi"], &rows);
        assert_eq!(text.lines().count(), 4);
        assert!(!text.contains('\r'));
        assert!(text.ends_with(",\n"));
    }

    #[test]
    fn time_labels() {
        assert_eq!(time_label(5.0), "5");
        assert_eq!(time_label(2.5), "2.5");
        assert_eq!(time_label(0.30000000000000004), "0.3");
        assert_eq!(time_label(-0.0), "0");
        assert_eq!(time_label(-12.25), "-12.25");
    }

    #[test]
    fn out_target_forms() {
        let s = OutputSink::from_target(Path::new("runs/traj.csv"));
        assert_eq!(s.dir, Path::new("runs"));
        assert_eq!(s.main_name("traj2d.csv"), "traj.csv");
        assert_eq!(s.main_name("run2d.json"), "run2d.json");
        let s = OutputSink::from_target(Path::new("wave.csv"));
        assert_eq!(s.dir, Path::new("."));
        let s = OutputSink::from_target(Path::new("runs/a"));
        assert_eq!(s.dir, Path::new("runs/a"));
        assert_eq!(s.main_name("wave.csv"), "wave.csv");
    }

    #[test]
    fn writes_are_atomic_and_listed() {
        let dir = tempfile::tempdir().unwrap();
        let mut sink = OutputSink::new(dir.path().join("nested"));
        sink.write_csv("a.csv", &["x"], &[vec![Cell::from(1.0)]]).unwrap();
        sink.write_json("b.json", &serde_json::json!({"k": 1})).unwrap();
        sink.write_csv("a.csv", &["x"], &[]).unwrap();
        assert_eq!(sink.written, vec!["a.csv", "b.json"]);
        let names: Vec<_> = std::fs::read_dir(&sink.dir).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 2);
        assert_eq!(std::fs::read_to_string(sink.dir.join("a.csv")).unwrap(), "x\n");
    }
}
