//! CSV serialization of sweep records, one row per `(epsilon, beta)` cell.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::experiment::SweepRecord;
use crate::{Error, Result};

/// Column order of the emitted table. The rms column is the root-mean-square
/// about the mean; flagged trials are counted but excluded from statistics.
pub const CSV_HEADER: &str =
    "epsilon,beta,n_trials,n_flagged,mean_error,rms_error,mean_lambda0_abs,mean_cond_recip,baseline_error";

/// Renders records as CSV text, numbers in shortest round-trip decimal form.
pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{:e},{:e},{},{},{:e},{:e},{:e},{:e},{:e}\n",
            r.epsilon,
            r.beta,
            r.n_trials,
            r.n_flagged,
            r.mean_error,
            r.rms_error,
            r.mean_lambda0_abs,
            r.mean_cond_recip,
            r.baseline_error
        ));
    }
    out
}

/// Writes the CSV table to disk.
pub fn emit_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut f = fs::File::create(path.as_ref())?;
    f.write_all(records_to_csv(records).as_bytes())?;
    Ok(())
}

/// Parses CSV text produced by [`records_to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "missing or unexpected CSV header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let ln = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Parse {
                line: ln,
                message: format!("expected 9 columns, found {}", fields.len()),
            });
        }
        let num = |idx: usize| -> Result<f64> {
            fields[idx].parse::<f64>().map_err(|_| Error::Parse {
                line: ln,
                message: format!("cannot parse number {:?}", fields[idx]),
            })
        };
        let count = |idx: usize| -> Result<usize> {
            fields[idx].parse::<usize>().map_err(|_| Error::Parse {
                line: ln,
                message: format!("cannot parse count {:?}", fields[idx]),
            })
        };
        out.push(SweepRecord {
            epsilon: num(0)?,
            beta: num(1)?,
            n_trials: count(2)?,
            n_flagged: count(3)?,
            mean_error: num(4)?,
            rms_error: num(5)?,
            mean_lambda0_abs: num(6)?,
            mean_cond_recip: num(7)?,
            baseline_error: num(8)?,
        });
    }
    Ok(out)
}
