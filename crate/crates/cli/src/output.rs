//! Output helpers: deterministic number formatting and sink selection.
//!
//! CSV numbers default to 17 significant digits (round-trip safe); JSON
//! goes through serde_json, whose shortest-round-trip floats are already
//! byte-stable. Identical invocations produce identical bytes.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

pub const DEFAULT_DIGITS: usize = 17;

/// Formats with the requested number of significant digits.
pub fn sig(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.max(1) - 1, x)
}

/// Writes to the path when given, stdout otherwise.
pub fn emit(out: &Option<PathBuf>, content: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}

/// A CSV document with a `# op=...` parameter header.
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(op: &str, params: &[(&str, String)], columns: &[&str]) -> Self {
        let mut header = format!("# op={op}");
        for (key, value) in params {
            header.push_str(&format!(" {key}={value}"));
        }
        Csv {
            lines: vec![header, columns.join(",")],
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    pub fn finish(self) -> String {
        let mut text = self.lines.join("\n");
        text.push('\n');
        text
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_text(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json serialization");
    text.push('\n');
    text
}
