use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use maxsemi::stats::KSReport;
use maxsemi::IdentityReport;

/// 17 significant digits, `.` decimal point.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One verified relation. KS checks put the statistic in `max_err`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub check: String,
    pub max_err: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<f64>,
}

impl Check {
    pub fn identity(rep: &IdentityReport) -> Self {
        Check {
            check: rep.check.clone(),
            max_err: rep.max_err,
            threshold: rep.tol,
            pass: rep.pass,
            at: None,
        }
    }

    pub fn ks(name: &str, rep: &KSReport, at: Option<f64>) -> Self {
        Check {
            check: name.to_string(),
            max_err: rep.statistic,
            threshold: rep.threshold,
            pass: rep.pass,
            at,
        }
    }

    pub fn boolean(name: &str, pass: bool) -> Self {
        Check {
            check: name.to_string(),
            max_err: if pass { 0.0 } else { 1.0 },
            threshold: 0.0,
            pass,
            at: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl RunReport {
    pub fn new(command: &str, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        RunReport {
            command: command.to_string(),
            checks,
            pass,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()
}

/// Writes `header` (skipped when empty) then one line per row.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> std::io::Result<()>
where
    I: IntoIterator<Item = String>,
{
    let mut w = BufWriter::new(File::create(path)?);
    if !header.is_empty() {
        writeln!(w, "{header}")?;
    }
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()
}
