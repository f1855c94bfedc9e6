//! CSV tables with an optional leading `#` metadata comment line.

use std::io::Write;

use crate::error::Result;

/// Rows of already-formatted cells under a header.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Appends the rows of `other`, which must share the header.
    pub fn extend(&mut self, other: Table) {
        debug_assert_eq!(self.header, other.header);
        self.rows.extend(other.rows);
    }

    pub fn write_csv<W: Write>(&self, mut out: W, metadata: Option<&str>) -> Result<()> {
        if let Some(meta) = metadata {
            writeln!(out, "# {}", meta.replace('\n', " "))?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, metadata: Option<&str>) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, metadata)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Shortest round-trip decimal form of a float.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
