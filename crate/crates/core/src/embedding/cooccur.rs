//! Sparse symmetric word–word co-occurrence counts from sliding windows.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::preprocess::TokenDoc;
use crate::textio::{self, Section, SectionWriter};

/// Weight contributed by a pair at window distance Δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowWeighting {
    /// 1/Δ, the customary GloVe counting.
    InverseDistance,
    /// 1 regardless of distance.
    Uniform,
}

/// V×V symmetric matrix stored as its upper triangle; `get(i, j)` resolves
/// both orientations. Row sums are maintained alongside the cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceMatrix {
    vocab_size: usize,
    cells: BTreeMap<(u32, u32), f64>,
    row_sums: Vec<f64>,
}

impl CooccurrenceMatrix {
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn nonzero_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, i: u32, j: u32) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.cells.get(&key).copied().unwrap_or(0.0)
    }

    /// X_i = Σ_k X[i][k].
    pub fn row_sum(&self, i: u32) -> f64 {
        self.row_sums[i as usize]
    }

    /// P(j|i) = X[i][j] / X_i.
    pub fn conditional_prob(&self, i: u32, j: u32) -> Result<f64> {
        let xi = self.row_sum(i);
        if xi <= 0.0 {
            return Err(Error::undefined(
                "conditional probability",
                format!("row sum of word {i} is zero"),
            ));
        }
        Ok(self.get(i, j) / xi)
    }

    /// Ordered nonzero entries: off-diagonal cells appear in both
    /// orientations, diagonal cells once. This is the training stream.
    pub fn ordered_entries(&self) -> Vec<(u32, u32, f64)> {
        let mut out = Vec::with_capacity(self.cells.len() * 2);
        for (&(i, j), &x) in &self.cells {
            out.push((i, j, x));
            if i != j {
                out.push((j, i, x));
            }
        }
        out
    }

    pub fn write_section(&self, w: &mut SectionWriter) {
        w.section("cooccurrence_params")
            .param("vocab_size", self.vocab_size);
        w.section("cooccurrence");
        for (&(i, j), &x) in &self.cells {
            w.row([&i.to_string(), &j.to_string(), &textio::fmt_f64(x)]);
        }
    }

    pub fn to_text(&self) -> String {
        let mut w = SectionWriter::new("cooccurrence: i\tj\tweight (upper triangle)");
        self.write_section(&mut w);
        w.finish()
    }

    pub fn from_sections(sections: &[Section], origin: &str) -> Result<CooccurrenceMatrix> {
        let params = textio::section_params(
            textio::find_section(sections, "cooccurrence_params", origin)?,
            origin,
        )?;
        let vocab_size: usize = textio::require_param(&params, "vocab_size", origin)?;
        let section = textio::find_section(sections, "cooccurrence", origin)?;
        let mut cells = BTreeMap::new();
        for (line, fields) in &section.rows {
            if fields.len() != 3 {
                return Err(Error::format(origin, *line, "expected 3 fields"));
            }
            let i = textio::parse_usize(&fields[0], origin, *line)? as u32;
            let j = textio::parse_usize(&fields[1], origin, *line)? as u32;
            if i > j {
                return Err(Error::format(origin, *line, "expected upper-triangular i ≤ j"));
            }
            if j as usize >= vocab_size {
                return Err(Error::format(origin, *line, "index out of range"));
            }
            let x = textio::parse_f64(&fields[2], origin, *line)?;
            if x < 0.0 {
                return Err(Error::format(origin, *line, "negative weight"));
            }
            if cells.insert((i, j), x).is_some() {
                return Err(Error::format(origin, *line, "duplicate cell"));
            }
        }
        Ok(assemble(vocab_size, cells))
    }

    pub fn from_text(text: &str, origin: &str) -> Result<CooccurrenceMatrix> {
        let sections = textio::parse_sections(text, origin)?;
        CooccurrenceMatrix::from_sections(&sections, origin)
    }
}

fn assemble(vocab_size: usize, cells: BTreeMap<(u32, u32), f64>) -> CooccurrenceMatrix {
    let mut row_sums = vec![0.0; vocab_size];
    for (&(i, j), &x) in &cells {
        row_sums[i as usize] += x;
        if i != j {
            row_sums[j as usize] += x;
        }
    }
    CooccurrenceMatrix {
        vocab_size,
        cells,
        row_sums,
    }
}

/// Counts weighted co-occurrences within `window` positions. Each unordered
/// pair occurrence contributes its weight once to the (symmetric) cell;
/// windows never cross document boundaries.
pub fn build_cooccurrence(
    docs: &[TokenDoc],
    vocab_size: usize,
    window: usize,
    weighting: WindowWeighting,
) -> Result<CooccurrenceMatrix> {
    if window < 1 {
        return Err(Error::Parameter("co-occurrence window must be ≥ 1".into()));
    }
    let mut cells: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for doc in docs {
        for (pos, &a) in doc.tokens.iter().enumerate() {
            let limit = (pos + window).min(doc.tokens.len().saturating_sub(1));
            for offset in (pos + 1)..=limit {
                let b = doc.tokens[offset];
                let delta = (offset - pos) as f64;
                let weight = match weighting {
                    WindowWeighting::InverseDistance => 1.0 / delta,
                    WindowWeighting::Uniform => 1.0,
                };
                let key = if a <= b { (a, b) } else { (b, a) };
                *cells.entry(key).or_insert(0.0) += weight;
            }
        }
    }
    Ok(assemble(vocab_size, cells))
}
