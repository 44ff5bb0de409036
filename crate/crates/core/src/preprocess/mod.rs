//! Abstract normalization: noise removal, tokenization, POS-guided
//! lemmatization, n-gram merging, stopword filtering, and vocabulary
//! construction. All per-document steps are pure functions.

mod clean;
mod lexicon;
mod phrases;
mod vocab;

pub use clean::{clean_text, tokenize};
pub use lexicon::{tag_and_lemmatize, Lexicon, PosTag};
pub use phrases::{apply_phrases, fit_phrases, PhraseModel};
pub use vocab::{
    build_vocabulary, bundled_stopwords, load_stopwords, stopwords_from_str, TokenDoc, Vocabulary,
};

use std::collections::HashSet;

use crate::error::Result;

/// Options for the full text-preparation pipeline.
#[derive(Debug, Clone)]
pub struct PreprocessOptions {
    pub lexicon: Lexicon,
    pub stopwords: HashSet<String>,
    pub pos_filter: bool,
    pub phrase_min_count: u64,
    pub phrase_threshold: f64,
    pub min_doc_freq: u64,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            lexicon: Lexicon::bundled().clone(),
            stopwords: vocab::bundled_stopwords(),
            pos_filter: false,
            phrase_min_count: 5,
            phrase_threshold: 10.0,
            min_doc_freq: 2,
        }
    }
}

/// Output of [`prepare_documents`]: everything downstream stages consume.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub vocabulary: Vocabulary,
    pub docs: Vec<TokenDoc>,
    pub phrases: PhraseModel,
}

/// Runs clean → tokenize → lemmatize → phrase merge → vocabulary over
/// (doc_id, abstract) pairs. Stopwords are filtered after phrase merging
/// and are never phrase candidates.
pub fn prepare_documents(
    documents: &[(String, String)],
    options: &PreprocessOptions,
) -> Result<Prepared> {
    use rayon::prelude::*;

    // Per-document work is pure; the parallel map preserves order, so the
    // result is identical at any thread count.
    let lemmatized: Vec<(String, Vec<String>)> = documents
        .par_iter()
        .map(|(id, text)| {
            let cleaned = clean_text(text);
            let tokens = tokenize(&cleaned);
            let lemmas = tag_and_lemmatize(&tokens, &options.lexicon, options.pos_filter);
            (id.clone(), lemmas)
        })
        .collect();

    let token_streams: Vec<Vec<String>> = lemmatized.iter().map(|(_, t)| t.clone()).collect();
    let phrases = fit_phrases(
        &token_streams,
        options.phrase_min_count,
        options.phrase_threshold,
        &options.stopwords,
    )?;

    let merged: Vec<(String, Vec<String>)> = lemmatized
        .into_iter()
        .map(|(id, tokens)| {
            let merged = apply_phrases(&phrases, &tokens);
            (id, merged)
        })
        .collect();

    let (vocabulary, docs) = build_vocabulary(&merged, &options.stopwords, options.min_doc_freq)?;
    Ok(Prepared {
        vocabulary,
        docs,
        phrases,
    })
}
