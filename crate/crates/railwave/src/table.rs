//! Plot-ready CSV output: `#` comment lines carrying the effective
//! configuration, one header row, values at six significant digits.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{io_at, Result};

/// Formats `v` with six significant digits, switching to exponent notation
/// outside `[1e-4, 1e6)`.
pub fn sig6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0.00000".into();
    }
    let sci = format!("{v:.5e}");
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, v)
    } else {
        sci
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Table { header: header.into_iter().map(Into::into).collect(), ..Table::default() }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for c in &self.comments {
            for line in c.lines() {
                // writes into a Vec cannot fail
                let _ = writeln!(out, "# {line}");
            }
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let _ = w.write_record(&self.header);
        for r in &self.rows {
            let _ = w.write_record(r);
        }
        w.into_inner().unwrap_or_default()
    }

    /// Writes the table to `path`, or to stdout when `path` is `-`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes();
        if path.as_os_str() == "-" {
            std::io::stdout().write_all(&bytes).map_err(io_at("<stdout>"))?;
            return Ok(());
        }
        write_atomic(path, &bytes)
    }
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_at(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io_at(&tmp))?;
    fs::rename(&tmp, path).map_err(io_at(path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(18.0712345), "18.0712");
        assert_eq!(sig6(-24.41234), "-24.4123");
        assert_eq!(sig6(0.0107068), "0.0107068");
        assert_eq!(sig6(1000.0), "1000.00");
        assert_eq!(sig6(9.9999996), "10.0000");
        assert_eq!(sig6(1e-15), "1.00000e-15");
        assert_eq!(sig6(2.5e7), "2.50000e7");
        assert_eq!(sig6(0.0), "0.00000");
        assert_eq!(sig6(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn comments_precede_header() {
        let mut t = Table::new(["a", "b"]);
        t.comment("config = {}").comment("two\nlines");
        t.push(vec!["1".into(), "2".into()]);
        let text = String::from_utf8(t.to_bytes()).unwrap();
        assert_eq!(text, "# config = {}\n# two\n# lines\na,b\n1,2\n");
    }
}
