use std::fmt::Write as _;

/// One CSV cell. Undefined values (ω_av at a node) are written as a word so
/// that no plotting tool mistakes them for data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Count(i64),
    Undefined,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.12e}")
}

#[derive(Debug, Default)]
pub struct Table {
    header: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    footer: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Self {
            columns,
            ..Self::default()
        }
    }

    pub fn note(&mut self, key: &str, value: f64) {
        self.header.push(format!("{key} = {}", fmt_num(value)));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn summary(&mut self, key: &str, value: f64) {
        self.footer.push(format!("{key} = {}", fmt_num(value)));
    }

    pub fn summary_text(&mut self, key: &str, value: &str) {
        self.footer.push(format!("{key} = {value}"));
    }

    /// CSV text after the `preamble` comment lines.
    pub fn render(&self, preamble: &[String]) -> String {
        let mut s = String::new();
        for line in preamble.iter().chain(&self.header) {
            let _ = writeln!(s, "# {line}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => fmt_num(*v),
                    Cell::Count(n) => n.to_string(),
                    Cell::Undefined => "undefined".into(),
                })
                .collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        for line in &self.footer {
            let _ = writeln!(s, "# {line}");
        }
        s
    }
}
