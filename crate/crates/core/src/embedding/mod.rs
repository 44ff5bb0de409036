//! Corpus-trained dense embeddings: co-occurrence statistics, the
//! GloVe-style and CBOW trainers, and document-level averaging.

mod cbow;
mod cooccur;
mod glove;

pub use cbow::{center_count, train_pubw, CbowMode, CbowModel, CbowParams};
pub use cooccur::{build_cooccurrence, CooccurrenceMatrix, WindowWeighting};
pub use glove::{train_pubg, GloveGradient, GloveModel, GloveParams};

use crate::error::{Error, Result};
use crate::preprocess::TokenDoc;
use crate::textio;

/// Dense V×d embedding matrix addressed by vocabulary id.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVectors {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl WordVectors {
    pub fn new(dim: usize, rows: Vec<Vec<f64>>) -> WordVectors {
        debug_assert!(rows.iter().all(|r| r.len() == dim));
        WordVectors { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&[f64]> {
        self.rows.get(id as usize).map(Vec::as_slice)
    }

    /// Conventional text vector format: first line `V d`, then one line per
    /// word: the label followed by d decimal components, space-separated.
    /// Labels must not contain whitespace.
    pub fn to_text(&self, labels: &[String]) -> Result<String> {
        if labels.len() != self.rows.len() {
            return Err(Error::Internal(format!(
                "label count {} does not match vector count {}",
                labels.len(),
                self.rows.len()
            )));
        }
        let mut out = String::new();
        out.push_str(&format!("{} {}\n", self.rows.len(), self.dim));
        for (label, row) in labels.iter().zip(&self.rows) {
            if label.chars().any(char::is_whitespace) || label.is_empty() {
                return Err(Error::Internal(format!(
                    "vector label {label:?} is empty or contains whitespace"
                )));
            }
            out.push_str(label);
            for value in row {
                out.push(' ');
                out.push_str(&textio::fmt_f64(*value));
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Parses the text vector format; returns labels alongside the matrix.
    pub fn from_text(text: &str, origin: &str) -> Result<(Vec<String>, WordVectors)> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::format(origin, 1, "empty vector file"))?;
        let mut parts = header.split_whitespace();
        let count: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(origin, 1, "bad header: expected `V d`"))?;
        let dim: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(origin, 1, "bad header: expected `V d`"))?;
        if parts.next().is_some() {
            return Err(Error::format(origin, 1, "bad header: trailing fields"));
        }

        // capacity capped: `count` is untrusted input
        let mut labels = Vec::with_capacity(count.min(1024));
        let mut rows = Vec::with_capacity(count.min(1024));
        for (idx, line) in lines {
            let line_no = idx as u64 + 1;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let label = fields
                .next()
                .ok_or_else(|| Error::format(origin, line_no, "missing label"))?;
            let row: Vec<f64> = fields
                .map(|f| textio::parse_f64(f, origin, line_no))
                .collect::<Result<_>>()?;
            if row.len() != dim {
                return Err(Error::format(
                    origin,
                    line_no,
                    format!("expected {dim} components, got {}", row.len()),
                ));
            }
            labels.push(label.to_string());
            rows.push(row);
        }
        if labels.len() != count {
            return Err(Error::format(
                origin,
                0,
                format!("header declared {count} rows, found {}", labels.len()),
            ));
        }
        Ok((labels, WordVectors { dim, rows }))
    }
}

/// A document embedding plus a flag marking the degenerate (empty or fully
/// out-of-vocabulary) case.
#[derive(Debug, Clone, PartialEq)]
pub struct DocEmbedding {
    pub vector: Vec<f64>,
    pub is_zero: bool,
}

/// Arithmetic mean over all token occurrences (repeats counted). Empty or
/// fully out-of-vocabulary documents embed as a flagged zero vector.
pub fn embed_document(vectors: &WordVectors, doc: &TokenDoc) -> DocEmbedding {
    let mut sum = vec![0.0; vectors.dim()];
    let mut count = 0usize;
    for &id in &doc.tokens {
        if let Some(row) = vectors.get(id) {
            for (s, v) in sum.iter_mut().zip(row) {
                *s += v;
            }
            count += 1;
        }
    }
    if count == 0 {
        return DocEmbedding {
            vector: sum,
            is_zero: true,
        };
    }
    for s in &mut sum {
        *s /= count as f64;
    }
    DocEmbedding {
        vector: sum,
        is_zero: false,
    }
}

fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let norm_a: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm_b: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm_a == 0.0 || norm_b == 0.0 {
        return None;
    }
    Some(dot / (norm_a * norm_b))
}

/// Ranked neighbors by descending cosine similarity; the query itself is
/// excluded, ties break toward the lower id, zero-norm candidates are
/// skipped.
pub fn nearest_neighbors(
    vectors: &WordVectors,
    query: u32,
    k: usize,
) -> Result<Vec<(u32, f64)>> {
    if k >= vectors.len() {
        return Err(Error::Parameter(format!(
            "k = {k} must be smaller than the vocabulary size {}",
            vectors.len()
        )));
    }
    let query_row = vectors
        .get(query)
        .ok_or_else(|| Error::Input(format!("query id {query} out of range")))?;
    if query_row.iter().all(|&x| x == 0.0) {
        return Err(Error::undefined(
            "similarity",
            format!("query vector {query} has zero norm"),
        ));
    }
    let mut scored: Vec<(u32, f64)> = (0..vectors.len() as u32)
        .filter(|&id| id != query)
        .filter_map(|id| cosine(query_row, vectors.get(id).unwrap()).map(|c| (id, c)))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite cosine").then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored)
}
