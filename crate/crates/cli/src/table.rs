use std::io::Write;

use crate::CliError;

/// A CSV table with a single header line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Float format used everywhere: 13 significant digits, `.` decimal point.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.12e}")
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row arity must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn write_to(&self, out: impl Write) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes to `path`, or to stdout when no path is given.
    pub fn emit(&self, path: Option<&std::path::Path>) -> Result<(), CliError> {
        match path {
            Some(p) => self.write_to(std::fs::File::create(p)?),
            None => self.write_to(std::io::stdout().lock()),
        }
    }
}
