//! TF-IDF baseline embedding: tf(t,d) = ln(1 + freq(t,d)),
//! idf(t) = ln(N / doc_freq(t)), document vector s_t = tf · idf.
//!
//! Natural log throughout; freq is the raw in-document count; vectors are
//! not normalized.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::preprocess::{TokenDoc, Vocabulary};
use crate::textio::{self, Section, SectionWriter};

/// Fitted idf table over a vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    pub n_docs: usize,
    /// idf per vocabulary id, aligned with ids 0..V.
    idf: Vec<f64>,
    /// doc_freq snapshot used to fit, kept for persistence.
    doc_freq: Vec<u64>,
    tokens: Vec<String>,
}

/// Sparse T-dimensional document vector; absent ids score 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDocVector {
    pub dims: usize,
    pub entries: BTreeMap<u32, f64>,
}

impl SparseDocVector {
    pub fn score(&self, id: u32) -> f64 {
        self.entries.get(&id).copied().unwrap_or(0.0)
    }

    /// Dense copy, for distance computations downstream.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dims];
        for (&id, &score) in &self.entries {
            dense[id as usize] = score;
        }
        dense
    }
}

/// Fits the idf table. `docs` must be the same set that produced `vocab`.
pub fn fit_tfidf(vocab: &Vocabulary, docs: &[TokenDoc]) -> Result<TfidfModel> {
    let n_docs = docs.len();
    let mut idf = Vec::with_capacity(vocab.len());
    let mut doc_freq = Vec::with_capacity(vocab.len());
    let mut tokens = Vec::with_capacity(vocab.len());
    for (id, token) in vocab.iter() {
        let df = vocab.doc_freq(id);
        if df == 0 {
            return Err(Error::Internal(format!(
                "in-vocabulary token {token:?} has doc_freq 0"
            )));
        }
        idf.push((n_docs as f64 / df as f64).ln());
        doc_freq.push(df);
        tokens.push(token.to_string());
    }
    Ok(TfidfModel {
        n_docs,
        idf,
        doc_freq,
        tokens,
    })
}

impl TfidfModel {
    pub fn vocab_size(&self) -> usize {
        self.idf.len()
    }

    pub fn idf(&self, id: u32) -> Option<f64> {
        self.idf.get(id as usize).copied()
    }

    /// Computes the sparse TF-IDF vector of one document.
    pub fn vector(&self, doc: &TokenDoc) -> Result<SparseDocVector> {
        let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
        for &id in &doc.tokens {
            if id as usize >= self.idf.len() {
                return Err(Error::Input(format!(
                    "document {:?} contains id {id} outside the vocabulary (size {})",
                    doc.doc_id,
                    self.idf.len()
                )));
            }
            *counts.entry(id).or_insert(0) += 1;
        }
        let entries = counts
            .into_iter()
            .map(|(id, freq)| {
                let tf = (1.0 + freq as f64).ln();
                (id, tf * self.idf[id as usize])
            })
            .collect();
        Ok(SparseDocVector {
            dims: self.idf.len(),
            entries,
        })
    }

    /// Renders the model: vocabulary key-value rows plus an idf column.
    pub fn write_section(&self, w: &mut SectionWriter) {
        w.section("tfidf_params").param("n_docs", self.n_docs);
        w.section("idf");
        for (id, token) in self.tokens.iter().enumerate() {
            w.row([
                token.as_str(),
                &id.to_string(),
                &self.doc_freq[id].to_string(),
                &textio::fmt_f64(self.idf[id]),
            ]);
        }
    }

    pub fn to_text(&self) -> String {
        let mut w = SectionWriter::new("tfidf model: token\tid\tdoc_freq\tidf");
        self.write_section(&mut w);
        w.finish()
    }

    pub fn from_sections(sections: &[Section], origin: &str) -> Result<TfidfModel> {
        let params = textio::section_params(
            textio::find_section(sections, "tfidf_params", origin)?,
            origin,
        )?;
        let n_docs: usize = textio::require_param(&params, "n_docs", origin)?;
        let section = textio::find_section(sections, "idf", origin)?;
        let mut idf = Vec::new();
        let mut doc_freq = Vec::new();
        let mut tokens = Vec::new();
        for (line, fields) in &section.rows {
            if fields.len() != 4 {
                return Err(Error::format(origin, *line, "expected 4 fields"));
            }
            let id = textio::parse_usize(&fields[1], origin, *line)?;
            if id != tokens.len() {
                return Err(Error::format(origin, *line, "non-contiguous id"));
            }
            tokens.push(fields[0].clone());
            doc_freq.push(textio::parse_usize(&fields[2], origin, *line)? as u64);
            idf.push(textio::parse_f64(&fields[3], origin, *line)?);
        }
        Ok(TfidfModel {
            n_docs,
            idf,
            doc_freq,
            tokens,
        })
    }

    pub fn from_text(text: &str, origin: &str) -> Result<TfidfModel> {
        let sections = textio::parse_sections(text, origin)?;
        TfidfModel::from_sections(&sections, origin)
    }
}

/// Renders document vectors as sparse triplet rows (doc_id, term_id, score).
pub fn write_sparse_vectors(
    w: &mut SectionWriter,
    section: &str,
    vectors: &[(String, SparseDocVector)],
) {
    w.section(section);
    for (doc_id, vector) in vectors {
        for (id, score) in &vector.entries {
            w.row([doc_id.as_str(), &id.to_string(), &textio::fmt_f64(*score)]);
        }
    }
}

/// Parses sparse triplet rows back into per-document vectors (document
/// order is the order of first appearance).
pub fn read_sparse_vectors(
    section: &Section,
    dims: usize,
    origin: &str,
) -> Result<Vec<(String, SparseDocVector)>> {
    let mut order: Vec<String> = Vec::new();
    let mut map: BTreeMap<String, SparseDocVector> = BTreeMap::new();
    for (line, fields) in &section.rows {
        if fields.len() != 3 {
            return Err(Error::format(origin, *line, "expected 3 fields"));
        }
        let id = textio::parse_usize(&fields[1], origin, *line)? as u32;
        if id as usize >= dims {
            return Err(Error::format(origin, *line, "term id out of range"));
        }
        let score = textio::parse_f64(&fields[2], origin, *line)?;
        let entry = map.entry(fields[0].clone()).or_insert_with(|| {
            order.push(fields[0].clone());
            SparseDocVector {
                dims,
                entries: BTreeMap::new(),
            }
        });
        if entry.entries.insert(id, score).is_some() {
            return Err(Error::format(origin, *line, "duplicate (doc, term) entry"));
        }
    }
    Ok(order
        .into_iter()
        .map(|doc_id| {
            let v = map.remove(&doc_id).expect("ordered ids come from map");
            (doc_id, v)
        })
        .collect())
}
