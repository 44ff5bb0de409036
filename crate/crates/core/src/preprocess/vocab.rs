//! Vocabulary construction: token↔id bijection with term and document
//! frequencies, stopword and min-doc-freq filtering.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::textio::{self, Section, SectionWriter};

/// One preprocessed document as vocabulary ids (post n-gram merge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenDoc {
    pub doc_id: String,
    pub tokens: Vec<u32>,
}

/// Token↔id bijection plus corpus term/document frequencies.
///
/// Ids form the contiguous range `0..len()`, assigned by descending term
/// frequency with lexicographic tie-breaks, so construction is
/// deterministic for a fixed corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    term_freq: Vec<u64>,
    doc_freq: Vec<u64>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn term_freq(&self, id: u32) -> u64 {
        self.term_freq[id as usize]
    }

    /// Number of documents containing the token (the D(w) of coherence
    /// scoring and the document count of the idf denominator).
    pub fn doc_freq(&self, id: u32) -> u64 {
        self.doc_freq[id as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.tokens
            .iter()
            .enumerate()
            .map(|(id, tok)| (id as u32, tok.as_str()))
    }

    pub(crate) fn from_parts(
        tokens: Vec<String>,
        term_freq: Vec<u64>,
        doc_freq: Vec<u64>,
    ) -> Result<Vocabulary> {
        if tokens.len() != term_freq.len() || tokens.len() != doc_freq.len() {
            return Err(Error::Internal("vocabulary column length mismatch".into()));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (id, token) in tokens.iter().enumerate() {
            if index.insert(token.clone(), id as u32).is_some() {
                return Err(Error::Internal(format!("duplicate vocabulary token {token:?}")));
            }
        }
        Ok(Vocabulary {
            tokens,
            index,
            term_freq,
            doc_freq,
        })
    }

    /// Renders the `[vocabulary]` section rows (token, id, term_freq, doc_freq).
    pub fn write_section(&self, w: &mut SectionWriter) {
        w.section("vocabulary");
        for (id, token) in self.tokens.iter().enumerate() {
            w.row([
                token.as_str(),
                &id.to_string(),
                &self.term_freq[id].to_string(),
                &self.doc_freq[id].to_string(),
            ]);
        }
    }

    pub fn to_text(&self) -> String {
        let mut w = SectionWriter::new("vocabulary: token\tid\tterm_freq\tdoc_freq");
        self.write_section(&mut w);
        w.finish()
    }

    /// Parses a `[vocabulary]` section. Ids must form 0..V-1 in order.
    pub fn from_section(section: &Section, origin: &str) -> Result<Vocabulary> {
        let mut tokens = Vec::new();
        let mut term_freq = Vec::new();
        let mut doc_freq = Vec::new();
        for (line, fields) in &section.rows {
            if fields.len() != 4 {
                return Err(Error::format(origin, *line, "expected 4 fields"));
            }
            let id = textio::parse_usize(&fields[1], origin, *line)?;
            if id != tokens.len() {
                return Err(Error::format(
                    origin,
                    *line,
                    format!("non-contiguous id {id}, expected {}", tokens.len()),
                ));
            }
            if fields[0].is_empty() {
                return Err(Error::format(origin, *line, "empty token"));
            }
            let tf = textio::parse_usize(&fields[2], origin, *line)? as u64;
            let df = textio::parse_usize(&fields[3], origin, *line)? as u64;
            if df > tf {
                return Err(Error::format(origin, *line, "doc_freq exceeds term_freq"));
            }
            tokens.push(fields[0].clone());
            term_freq.push(tf);
            doc_freq.push(df);
        }
        Vocabulary::from_parts(tokens, term_freq, doc_freq)
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Vocabulary> {
        let sections = textio::parse_sections(text, origin)?;
        let section = textio::find_section(&sections, "vocabulary", origin)?;
        Vocabulary::from_section(section, origin)
    }
}

/// Builds the vocabulary over preprocessed token streams and maps each
/// document into id space. Stopwords and tokens in fewer than
/// `min_doc_freq` documents are excluded.
pub fn build_vocabulary(
    docs: &[(String, Vec<String>)],
    stopwords: &HashSet<String>,
    min_doc_freq: u64,
) -> Result<(Vocabulary, Vec<TokenDoc>)> {
    let mut term_counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut doc_counts: BTreeMap<&str, u64> = BTreeMap::new();
    for (_, tokens) in docs {
        let mut seen: HashSet<&str> = HashSet::new();
        for token in tokens {
            if token.is_empty() || stopwords.contains(token.as_str()) {
                continue;
            }
            *term_counts.entry(token).or_insert(0) += 1;
            if seen.insert(token) {
                *doc_counts.entry(token).or_insert(0) += 1;
            }
        }
    }

    let mut kept: Vec<(&str, u64, u64)> = term_counts
        .iter()
        .filter(|(token, _)| doc_counts[**token] >= min_doc_freq)
        .map(|(token, tf)| (*token, *tf, doc_counts[*token]))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    // Descending term frequency, ties broken lexicographically ascending.
    kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

    let tokens: Vec<String> = kept.iter().map(|(t, _, _)| t.to_string()).collect();
    let term_freq: Vec<u64> = kept.iter().map(|(_, tf, _)| *tf).collect();
    let doc_freq: Vec<u64> = kept.iter().map(|(_, _, df)| *df).collect();
    let vocabulary = Vocabulary::from_parts(tokens, term_freq, doc_freq)?;

    let token_docs = docs
        .iter()
        .map(|(doc_id, tokens)| TokenDoc {
            doc_id: doc_id.clone(),
            tokens: tokens.iter().filter_map(|t| vocabulary.id(t)).collect(),
        })
        .collect();

    Ok((vocabulary, token_docs))
}

/// Parses a stopword list: one token per line, `#` comments allowed.
pub fn stopwords_from_str(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read stopword file {}: {e}", path.display()))
    })?;
    Ok(stopwords_from_str(&text))
}

/// The English stopword list shipped with the crate.
pub fn bundled_stopwords() -> HashSet<String> {
    stopwords_from_str(include_str!("../../resources/stopwords.txt"))
}
