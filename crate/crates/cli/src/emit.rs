//! Rendering of command results as CSV or nested key-value text.

use std::fmt::Write;

use shapint::{AxiomReport, Estimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// A command result: provenance plus a rectangular table of records.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub provenance: Vec<(String, String)>,
    /// Block name for one record in text output.
    pub item: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str, item: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            command: command.to_string(),
            provenance: Vec::new(),
            item,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn provenance(&mut self, key: &str, value: impl ToString) {
        self.provenance.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Appends key fields followed by the estimate's value columns.
    pub fn push_estimate(&mut self, mut keys: Vec<String>, e: &Estimate) {
        keys.extend([
            num(e.mean),
            num(e.stderr),
            e.samples.to_string(),
            e.seed.to_string(),
        ]);
        self.push(keys);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }

    /// One comment line per provenance field, for the diagnostic stream.
    pub fn provenance_lines(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn text(&self) -> String {
        let mut out = format!("{} {{\n", self.command);
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "  {k} = {v}");
        }
        for row in &self.rows {
            let _ = writeln!(out, "  {} {{", self.item);
            for (k, v) in self.columns.iter().zip(row) {
                let _ = writeln!(out, "    {k} = {v}");
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
        out
    }
}

fn csv_cell(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

pub fn axiom_report(r: &AxiomReport) -> Report {
    let mut out = Report::new(
        "verify",
        "property",
        vec!["property", "pass", "deviation", "checks", "instance"],
    );
    out.provenance("game", &r.game);
    out.provenance("players", r.players);
    out.provenance("tolerance", num(r.tolerance));
    out.provenance("passed", r.passed());
    for rec in &r.records {
        out.push(vec![
            rec.name.to_string(),
            rec.pass.to_string(),
            num(rec.deviation),
            rec.checks.to_string(),
            rec.instance.clone(),
        ]);
    }
    out
}
