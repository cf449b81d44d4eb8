//! CSV tables: a header row, then one record per row, floats with 17
//! significant digits.

use std::io::Write;
use std::path::Path;

use crate::error::BenchResult;

/// A row of one of the CSV tables.
pub trait CsvRow {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_rows<R: CsvRow, W: Write>(rows: &[R], sink: W) -> BenchResult<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(R::header())?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit<R: CsvRow>(rows: &[R], path: Option<&Path>) -> BenchResult<()> {
    match path {
        Some(p) => write_rows(rows, std::fs::File::create(p)?),
        None => write_rows(rows, std::io::stdout().lock()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Row(f64);

    impl CsvRow for Row {
        fn header() -> &'static [&'static str] {
            &["x"]
        }

        fn fields(&self) -> Vec<String> {
            vec![fmt_float(self.0)]
        }
    }

    #[test]
    fn floats_round_trip() {
        let mut buf = Vec::new();
        write_rows(&[Row(0.1), Row(1.0 / 3.0)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x"));
        assert_eq!(lines.next().unwrap().parse::<f64>().unwrap(), 0.1);
        assert_eq!(lines.next().unwrap().parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
    }
}
