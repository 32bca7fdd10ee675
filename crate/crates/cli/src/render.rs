use std::fmt::Write as _;

use clap::ValueEnum;
use fixlab::{Modulus, Rational};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

pub enum Block {
    Fields { title: String, fields: Vec<(String, String)> },
    Table { title: String, headers: Vec<String>, rows: Vec<Vec<String>> },
    /// Preformatted text, indented in tables and a single cell in CSV.
    Text { title: String, text: String },
}

/// A finished command result. Nothing is printed until the whole report
/// exists, so errors never leave partial output behind.
pub struct Report {
    pub blocks: Vec<Block>,
    pub json: Value,
    pub exit: u8,
}

impl Report {
    pub fn new(json: Value) -> Self {
        Report { blocks: Vec::new(), json, exit: 0 }
    }

    pub fn fields(&mut self, title: &str, fields: Vec<(String, String)>) -> &mut Self {
        self.blocks.push(Block::Fields { title: title.to_string(), fields });
        self
    }

    pub fn table(&mut self, title: &str, headers: &[&str], rows: Vec<Vec<String>>) -> &mut Self {
        self.blocks.push(Block::Table {
            title: title.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows,
        });
        self
    }

    pub fn text(&mut self, title: &str, text: String) -> &mut Self {
        self.blocks.push(Block::Text { title: title.to_string(), text });
        self
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)?;
                s.push('\n');
                s
            }
            Format::Table => self.render_table(),
            Format::Csv => self.render_csv()?,
        })
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        for (k, block) in self.blocks.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            match block {
                Block::Fields { title, fields } => {
                    let _ = writeln!(out, "{title}");
                    let width = fields.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
                    for (key, value) in fields {
                        let _ = writeln!(out, "  {key:<width$}  {value}");
                    }
                }
                Block::Table { title, headers, rows } => {
                    let _ = writeln!(out, "{title}");
                    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
                    for row in rows {
                        for (w, cell) in widths.iter_mut().zip(row) {
                            *w = (*w).max(cell.chars().count());
                        }
                    }
                    let line = |cells: &[String]| {
                        let padded: Vec<String> =
                            cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                        format!("  {}", padded.join("  ").trim_end())
                    };
                    let _ = writeln!(out, "{}", line(headers));
                    for row in rows {
                        let _ = writeln!(out, "{}", line(row));
                    }
                }
                Block::Text { title, text } => {
                    let _ = writeln!(out, "{title}");
                    for l in text.lines() {
                        let _ = writeln!(out, "  {l}");
                    }
                }
            }
        }
        out
    }

    fn render_csv(&self) -> anyhow::Result<String> {
        let mut out = Vec::new();
        for (k, block) in self.blocks.iter().enumerate() {
            if k > 0 {
                out.push(b'\n');
            }
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
            match block {
                Block::Fields { fields, .. } => {
                    w.write_record(["field", "value"])?;
                    for (key, value) in fields {
                        w.write_record([key, value])?;
                    }
                }
                Block::Text { title, text } => {
                    w.write_record([title])?;
                    w.write_record([text])?;
                }
                Block::Table { headers, rows, .. } => {
                    w.write_record(headers)?;
                    for row in rows {
                        w.write_record(row)?;
                    }
                }
            }
            out.extend(w.into_inner()?);
        }
        Ok(String::from_utf8(out)?)
    }
}

/// Renders exact values, with an optional decimal approximation.
#[derive(Clone, Copy)]
pub struct Numbers {
    pub decimal: Option<usize>,
}

impl Numbers {
    pub fn q(&self, r: &Rational) -> String {
        match self.decimal {
            Some(k) => format!("{r} ~{}", r.to_decimal(k)),
            None => r.to_string(),
        }
    }

    pub fn m(&self, m: &Modulus) -> String {
        match (self.decimal, m) {
            (Some(k), Modulus::Finite(r)) => format!("{r} ~{}", r.to_decimal(k)),
            _ => m.to_string(),
        }
    }

    /// The header and cells of the approximation column, if enabled.
    pub fn column(&self, name: &str) -> Option<String> {
        self.decimal.map(|_| format!("{name}~"))
    }

    pub fn approx(&self, r: &Rational) -> Option<String> {
        self.decimal.map(|k| r.to_decimal(k))
    }

    pub fn approx_m(&self, m: &Modulus) -> Option<String> {
        self.decimal.map(|k| m.to_decimal(k))
    }
}
