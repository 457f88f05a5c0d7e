//! CSV record files: one header line, then one row per step.
//! Floats are written in shortest round-trip form, so reading a file back is exact.

use std::fmt::Write as _;
use std::path::Path;

use crate::diagnostics::{EnergyRecord, RECORD_COLUMNS};
use crate::error::{Error, Result};

pub fn format_records(records: &[EnergyRecord]) -> String {
    let mut s = RECORD_COLUMNS.join(",");
    s.push('\n');
    for rec in records {
        let row: Vec<String> = rec.values().iter().map(|x| format!("{x:?}")).collect();
        writeln!(s, "{}", row.join(",")).expect("writing to a String");
    }
    s
}

pub fn parse_records(text: &str) -> Result<Vec<EnergyRecord>> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, h)| h.trim()).unwrap_or("");
    if header != RECORD_COLUMNS.join(",") {
        return Err(Error::Config {
            line: 1,
            message: format!("unexpected records header {header:?}"),
        });
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = |message: String| Error::Config { line: i + 1, message };
            let values: Vec<f64> = l
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| bad(format!("cannot parse {x:?}"))))
                .collect::<Result<_>>()?;
            let arr: [f64; 13] = values
                .try_into()
                .map_err(|v: Vec<f64>| bad(format!("expected {} columns, got {}", RECORD_COLUMNS.len(), v.len())))?;
            Ok(EnergyRecord::from_values(arr))
        })
        .collect()
}

pub fn write_records(records: &[EnergyRecord], path: &Path) -> Result<()> {
    std::fs::write(path, format_records(records))?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<EnergyRecord>> {
    parse_records(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let recs: Vec<EnergyRecord> = (0..5)
            .map(|i| {
                let mut v = [0.0; 13];
                for (j, x) in v.iter_mut().enumerate() {
                    *x = (i as f64 + 0.1).powf(j as f64 * 0.37) / 3.0 - 1e-17 * j as f64;
                }
                EnergyRecord::from_values(v)
            })
            .collect();
        let text = format_records(&recs);
        assert!(text.starts_with("t,E,dissipation"));
        assert_eq!(parse_records(&text).unwrap(), recs);
    }

    #[test]
    fn rejects_malformed_rows() {
        let header = RECORD_COLUMNS.join(",");
        assert!(parse_records("a,b\n").is_err());
        assert!(parse_records(&format!("{header}\n1,2,3\n")).is_err());
        assert!(parse_records(&format!("{header}\n{}\n", ["x"; 13].join(","))).is_err());
        assert_eq!(parse_records(&format!("{header}\n")).unwrap(), vec![]);
    }
}
