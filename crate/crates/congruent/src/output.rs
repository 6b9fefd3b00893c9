//! Report serialization.

use std::io::Write;
use std::path::Path;

use crate::harness::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

/// Pretty-printed JSON with a trailing newline. Field order follows the report types.
pub fn report_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn emit_report(report: &RunReport, path: &Path) -> Result<(), OutputError> {
    std::fs::write(path, report_json(report)).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// One row per direction of every directional suite: `suite,xi_index,case,det,residual`.
///
/// Directions whose certification failed carry the error kind in `case` and empty
/// `det` and `residual` fields.
pub fn write_residuals_csv<W: Write>(report: &RunReport, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["suite", "xi_index", "case", "det", "residual"])?;
    for suite in &report.suites {
        for rec in &suite.directions {
            let index = rec.xi_index.to_string();
            match &rec.outcome {
                Ok(cert) => w.write_record([
                    suite.suite.name(),
                    &index,
                    cert.case.name(),
                    &cert.det.to_string(),
                    &format!("{:e}", cert.residual),
                ])?,
                Err(e) => w.write_record([suite.suite.name(), &index, e.kind(), "", ""])?,
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_residuals_csv(report: &RunReport, path: &Path) -> Result<(), OutputError> {
    let file = std::fs::File::create(path).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_residuals_csv(report, std::io::BufWriter::new(file)).map_err(|source| OutputError::Csv {
        path: path.display().to_string(),
        source,
    })
}
