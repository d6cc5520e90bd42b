//! Append-only checkpoint file for long sweeps.
//!
//! Layout: a magic line, a line holding the serialized sweep spec, a column header, then one
//! row per finished grid point in completion order. Floats use shortest round-trip
//! formatting so a resumed sweep reproduces the stored values exactly.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::engine::{PointStatus, SweepPoint};
use super::spec::SweepSpec;
use crate::error::{Error, Result};

const MAGIC: &str = "# nvdnp sweep checkpoint v1";
pub const COLUMNS: &str = "i,j,axis1,axis2,nuclear_polarization,electron_polarization,residual,status";

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Checkpoint(format!("{}: {e}", path.display()))
}

fn spec_line(spec: &SweepSpec) -> Result<String> {
    let json = serde_json::to_string(spec).map_err(|e| Error::Checkpoint(e.to_string()))?;
    Ok(format!("# spec {json}"))
}

pub(crate) fn format_row(p: &SweepPoint) -> String {
    let a2 = p.axis2.map(|v| format!("{v:?}")).unwrap_or_default();
    format!(
        "{},{},{:?},{},{:?},{:?},{:?},{}",
        p.i,
        p.j,
        p.axis1,
        a2,
        p.nuclear,
        p.electron,
        p.residual,
        p.status.label()
    )
}

fn parse_row(line: &str) -> Option<SweepPoint> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 8 {
        return None;
    }
    let axis2 = if f[3].is_empty() { None } else { Some(f[3].parse().ok()?) };
    Some(SweepPoint {
        i: f[0].parse().ok()?,
        j: f[1].parse().ok()?,
        axis1: f[2].parse().ok()?,
        axis2,
        nuclear: f[4].parse().ok()?,
        electron: f[5].parse().ok()?,
        residual: f[6].parse().ok()?,
        status: PointStatus::from_label(f[7])?,
    })
}

pub struct Checkpoint {
    path: PathBuf,
    header: String,
    out: Mutex<BufWriter<File>>,
}

impl Checkpoint {
    /// Opens `path` for `spec`, returning the points already recorded there.
    ///
    /// A missing file starts a fresh checkpoint. A file written for a different spec is an
    /// error. A truncated final row from an interrupted run is dropped.
    pub fn open(path: &Path, spec: &SweepSpec) -> Result<(Self, Vec<SweepPoint>)> {
        let header = format!("{MAGIC}\n{}\n{COLUMNS}\n", spec_line(spec)?);
        let (n1, n2) = spec.shape();
        let mut done = BTreeMap::new();
        if path.exists() {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            if !text.starts_with(&header) {
                return Err(Error::Checkpoint(format!(
                    "{} belongs to a different sweep configuration",
                    path.display()
                )));
            }
            // Only newline-terminated rows are complete.
            for line in text[header.len()..].split_inclusive('\n') {
                let Some(line) = line.strip_suffix('\n') else { continue };
                if let Some(p) = parse_row(line).filter(|p| p.i < n1 && p.j < n2) {
                    done.insert((p.i, p.j), p);
                }
            }
        }
        let done: Vec<SweepPoint> = done.into_values().collect();
        let cp = Self::create(path, header, &done)?;
        Ok((cp, done))
    }

    fn create(path: &Path, header: String, rows: &[SweepPoint]) -> Result<Self> {
        let mut text = header.clone();
        for p in rows {
            text.push_str(&format_row(p));
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| io_err(path, e))?;
        let f = OpenOptions::new().append(true).open(path).map_err(|e| io_err(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            header,
            out: Mutex::new(BufWriter::new(f)),
        })
    }

    pub fn append(&self, p: &SweepPoint) -> Result<()> {
        let mut out = self.out.lock().expect("checkpoint writer poisoned");
        writeln!(out, "{}", format_row(p))
            .and_then(|_| out.flush())
            .map_err(|e| io_err(&self.path, e))
    }

    /// Rewrites the file with all rows in grid order.
    pub fn finish(self, points: &[SweepPoint]) -> Result<()> {
        drop(self.out);
        Self::create(&self.path, self.header, points).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_round_trip_is_exact() {
        let p = SweepPoint {
            i: 3,
            j: 0,
            axis1: 0.1 + 0.2,
            axis2: None,
            nuclear: 0.862_417_123_456_789_1,
            electron: -1e-300,
            residual: 3.2e-13,
            status: PointStatus::Ok,
        };
        let q = parse_row(&format_row(&p)).unwrap();
        assert_eq!(format_row(&q), format_row(&p));
        assert_eq!(q.nuclear.to_bits(), p.nuclear.to_bits());
        assert_eq!(q.axis1.to_bits(), p.axis1.to_bits());

        let f = SweepPoint {
            axis2: Some(-30.0),
            nuclear: f64::NAN,
            status: PointStatus::Failed("no_stationary_state".into()),
            ..p
        };
        let g = parse_row(&format_row(&f)).unwrap();
        assert!(g.nuclear.is_nan());
        assert_eq!(g.status, f.status);
        assert_eq!(g.axis2, Some(-30.0));
    }

    #[test]
    fn malformed_rows_rejected() {
        assert!(parse_row("1,2,3").is_none());
        assert!(parse_row("a,0,1,,0,0,0,ok").is_none());
        assert!(parse_row("0,0,1,,0,0,0,maybe").is_none());
    }
}
