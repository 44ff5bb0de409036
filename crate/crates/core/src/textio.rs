//! Sectioned plain-text artifact format shared by all persisted models.
//!
//! Every artifact is UTF-8 text. Lines starting with `#` are comments,
//! `[name]` opens a section, and data rows are tab-separated fields.
//! Floats are written with Rust's shortest round-trip formatting, so a
//! value parsed back compares bit-identical to the one written.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One parsed section: name plus raw data rows (tab-split, comments stripped).
#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    /// (line number in file, fields)
    pub rows: Vec<(u64, Vec<String>)>,
}

/// Parses sectioned text. Rows before any `[section]` header are rejected.
pub fn parse_sections(source: &str, origin: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::format(origin, line_no, "unterminated section header"))?;
            if name.is_empty() {
                return Err(Error::format(origin, line_no, "empty section name"));
            }
            sections.push(Section {
                name: name.to_string(),
                rows: Vec::new(),
            });
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        match sections.last_mut() {
            Some(section) => section.rows.push((line_no, fields)),
            None => {
                return Err(Error::format(
                    origin,
                    line_no,
                    "data row before any [section] header",
                ))
            }
        }
    }
    Ok(sections)
}

/// Looks up a section by name.
pub fn find_section<'a>(sections: &'a [Section], name: &str, origin: &str) -> Result<&'a Section> {
    sections
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::format(origin, 0, format!("missing [{name}] section")))
}

/// Reads a `[params]`-style section of `key\tvalue` rows into a map.
pub fn section_params(section: &Section, origin: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (line, fields) in &section.rows {
        if fields.len() != 2 {
            return Err(Error::format(origin, *line, "expected key\\tvalue row"));
        }
        map.insert(fields[0].clone(), fields[1].clone());
    }
    Ok(map)
}

/// Fetches and parses one required parameter.
pub fn require_param<T: std::str::FromStr>(
    params: &BTreeMap<String, String>,
    key: &str,
    origin: &str,
) -> Result<T> {
    let raw = params
        .get(key)
        .ok_or_else(|| Error::format(origin, 0, format!("missing parameter {key:?}")))?;
    raw.parse::<T>()
        .map_err(|_| Error::format(origin, 0, format!("unparseable parameter {key:?}: {raw:?}")))
}

pub fn parse_f64(field: &str, origin: &str, line: u64) -> Result<f64> {
    let value: f64 = field
        .parse()
        .map_err(|_| Error::format(origin, line, format!("expected float, got {field:?}")))?;
    if !value.is_finite() {
        return Err(Error::format(origin, line, "non-finite float"));
    }
    Ok(value)
}

pub fn parse_usize(field: &str, origin: &str, line: u64) -> Result<usize> {
    field
        .parse()
        .map_err(|_| Error::format(origin, line, format!("expected integer, got {field:?}")))
}

/// Buffered writer that renders the sectioned format.
#[derive(Default)]
pub struct SectionWriter {
    buf: String,
}

impl SectionWriter {
    pub fn new(comment: &str) -> Self {
        let mut w = SectionWriter { buf: String::new() };
        w.buf.push_str("# ");
        w.buf.push_str(comment);
        w.buf.push('\n');
        w
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        self.buf.push('[');
        self.buf.push_str(name);
        self.buf.push_str("]\n");
        self
    }

    pub fn row<I, S>(&mut self, fields: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push('\t');
            }
            self.buf.push_str(f.as_ref());
            first = false;
        }
        self.buf.push('\n');
        self
    }

    pub fn param(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.buf.push_str(key);
        self.buf.push('\t');
        self.buf.push_str(&value.to_string());
        self.buf.push('\n');
        self
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Shortest round-trip decimal rendering for floats in text artifacts.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(Error::from)
}

/// SHA-256 of a byte string, lowercase hex.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
