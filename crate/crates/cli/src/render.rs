//! Plain-text, Markdown and CSV table rendering.

use siskit_core::rounding::{format_fixed, round_half_up};

#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub color: bool,
}

impl Style {
    pub fn bold(&self, text: &str) -> String {
        if self.color {
            format!("\x1b[1m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn level(&self, line: &str) -> String {
        if !self.color {
            return line.to_string();
        }
        if let Some(rest) = line.strip_prefix("ERROR") {
            format!("\x1b[31mERROR\x1b[0m{rest}")
        } else if let Some(rest) = line.strip_prefix("WARNING") {
            format!("\x1b[33mWARNING\x1b[0m{rest}")
        } else {
            line.to_string()
        }
    }
}

/// Fixed-point number with half-up rounding.
pub fn num(value: f64, decimals: u32) -> String {
    format_fixed(value, decimals)
}

/// Like [`num`] with an explicit `+` on positive values.
pub fn signed(value: f64, decimals: u32) -> String {
    let text = format_fixed(value, decimals);
    if round_half_up(value, decimals) > 0.0 {
        format!("+{text}")
    } else {
        text
    }
}

pub fn opt_num(value: Option<f64>, decimals: u32) -> String {
    value.map(|v| num(v, decimals)).unwrap_or_else(|| "-".to_string())
}

/// Aligned text table. Columns from `numeric_from` on are right-aligned.
pub fn text_table(style: Style, headers: &[String], rows: &[Vec<String>], numeric_from: usize) -> String {
    let widths: Vec<usize> = (0..headers.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([headers[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| -> String {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c >= numeric_from {
                    format!("{cell:>w$}", w = widths[c])
                } else {
                    format!("{cell:<w$}", w = widths[c])
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = style.bold(&line(headers));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

pub fn markdown_table(headers: &[String], rows: &[Vec<String>], numeric_from: usize) -> String {
    let escape = |s: &String| s.replace('|', "\\|");
    let mut out = format!("| {} |\n", headers.iter().map(escape).collect::<Vec<_>>().join(" | "));
    let rule: Vec<&str> = (0..headers.len()).map(|c| if c >= numeric_from { "---:" } else { "---" }).collect();
    out.push_str(&format!("| {} |\n", rule.join(" | ")));
    for row in rows {
        out.push_str(&format!("| {} |\n", row.iter().map(escape).collect::<Vec<_>>().join(" | ")));
    }
    out
}

pub fn csv_table(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(headers).expect("in-memory write");
    for row in rows {
        writer.write_record(row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn strings<const N: usize>(items: [&str; N]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}
