//! Rectangular result tables with CSV and fixed-width text rendering.

use std::fmt::Write as _;

/// Run metadata carried alongside a table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableMeta {
    pub replications: usize,
    pub master_seed: u64,
}

/// Row-labelled numeric table; `cells[row][column]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableResult {
    pub title: String,
    pub row_header: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<f64>>,
    /// Decimal places used by [`TableResult::to_text`] for each row.
    pub precision: Vec<usize>,
    pub meta: TableMeta,
}

impl TableResult {
    pub fn new(
        title: impl Into<String>,
        row_header: impl Into<String>,
        columns: Vec<String>,
        meta: TableMeta,
    ) -> Self {
        Self {
            title: title.into(),
            row_header: row_header.into(),
            rows: Vec::new(),
            columns,
            cells: Vec::new(),
            precision: Vec::new(),
            meta,
        }
    }

    pub fn push_row(&mut self, label: impl Into<String>, values: Vec<f64>) {
        self.push_row_with_precision(label, values, 2);
    }

    pub fn push_row_with_precision(
        &mut self,
        label: impl Into<String>,
        values: Vec<f64>,
        precision: usize,
    ) {
        assert_eq!(
            values.len(),
            self.columns.len(),
            "row width must match columns"
        );
        self.rows.push(label.into());
        self.cells.push(values);
        self.precision.push(precision);
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.rows.iter().position(|r| r == label)
    }

    pub fn column_index(&self, label: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == label)
    }

    pub fn cell(&self, row: &str, column: &str) -> Option<f64> {
        Some(self.cells[self.row_index(row)?][self.column_index(column)?])
    }

    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let j = self.column_index(label)?;
        Some(self.cells.iter().map(|r| r[j]).collect())
    }

    /// CSV with full-precision (shortest round-trip) numbers.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&csv_field(&self.row_header));
        for c in &self.columns {
            out.push(',');
            out.push_str(&csv_field(c));
        }
        out.push('\n');
        for (label, row) in self.rows.iter().zip(&self.cells) {
            out.push_str(&csv_field(label));
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Fixed-width text rendering.
    pub fn to_text(&self) -> String {
        let formatted: Vec<Vec<String>> = self
            .cells
            .iter()
            .zip(&self.precision)
            .map(|(row, &prec)| row.iter().map(|v| format!("{v:.prec$}")).collect())
            .collect();
        let label_width = self
            .rows
            .iter()
            .map(String::len)
            .chain(std::iter::once(self.row_header.len()))
            .max()
            .unwrap_or(0);
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| {
                formatted
                    .iter()
                    .map(|r| r[j].len())
                    .chain(std::iter::once(c.len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();

        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} (R = {}, seed = {})",
            self.title, self.meta.replications, self.meta.master_seed
        );
        let _ = write!(out, "{:<label_width$}", self.row_header);
        for (c, w) in self.columns.iter().zip(&widths) {
            let _ = write!(out, "  {c:>w$}");
        }
        out.push('\n');
        for (label, row) in self.rows.iter().zip(&formatted) {
            let _ = write!(out, "{label:<label_width$}");
            for (v, w) in row.iter().zip(&widths) {
                let _ = write!(out, "  {v:>w$}");
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TableResult {
        let mut t = TableResult::new(
            "demo",
            "T",
            vec!["d=0".into(), "d=1".into()],
            TableMeta {
                replications: 3,
                master_seed: 9,
            },
        );
        t.push_row("100", vec![23.4712, 12.0]);
        t.push_row_with_precision("slope", vec![5.28491, 2.85], 4);
        t
    }

    #[test]
    fn csv_is_full_precision() {
        let csv = sample().to_csv();
        assert_eq!(csv, "T,d=0,d=1\n100,23.4712,12\nslope,5.28491,2.85\n");
    }

    #[test]
    fn text_rounds_cells() {
        let text = sample().to_text();
        assert!(text.contains("23.47"));
        assert!(text.contains("5.2849"));
        assert!(text.starts_with("demo (R = 3, seed = 9)"));
    }

    #[test]
    fn lookup_by_label() {
        let t = sample();
        assert_eq!(t.cell("100", "d=1"), Some(12.0));
        assert_eq!(t.column("d=0"), Some(vec![23.4712, 5.28491]));
        assert_eq!(t.cell("200", "d=1"), None);
    }

    #[test]
    fn quotes_awkward_labels() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }
}
