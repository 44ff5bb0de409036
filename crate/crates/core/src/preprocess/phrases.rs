//! Collocation detection: bigram scoring with a second pass so trigrams
//! emerge as bigrams of bigrams. Merged tokens join their parts with `_`.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::textio::{self, SectionWriter};

pub const PHRASE_JOINER: char = '_';

/// Scored adjacent-pair table driving greedy phrase merging.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseModel {
    pub min_count: u64,
    pub threshold: f64,
    /// Number of merge passes applied (2: bigrams, then trigrams).
    pub passes: u32,
    /// Only pairs that qualified for merging (score ≥ threshold, and the
    /// pair count strictly above min_count so a zero score never merges).
    pair_scores: BTreeMap<(String, String), f64>,
}

impl PhraseModel {
    pub fn pair_score(&self, left: &str, right: &str) -> Option<f64> {
        self.pair_scores
            .get(&(left.to_string(), right.to_string()))
            .copied()
    }

    pub fn pair_count(&self) -> usize {
        self.pair_scores.len()
    }

    pub fn write_section(&self, w: &mut SectionWriter) {
        w.section("phrase_params")
            .param("min_count", self.min_count)
            .param("threshold", textio::fmt_f64(self.threshold))
            .param("passes", self.passes);
        w.section("phrase_scores");
        for ((a, b), score) in &self.pair_scores {
            w.row([a.as_str(), b.as_str(), &textio::fmt_f64(*score)]);
        }
    }

    pub fn to_text(&self) -> String {
        let mut w = SectionWriter::new("phrase model: left\tright\tscore");
        self.write_section(&mut w);
        w.finish()
    }

    pub fn from_sections(sections: &[textio::Section], origin: &str) -> Result<PhraseModel> {
        let params = textio::section_params(
            textio::find_section(sections, "phrase_params", origin)?,
            origin,
        )?;
        let min_count: u64 = textio::require_param(&params, "min_count", origin)?;
        let threshold: f64 = textio::require_param(&params, "threshold", origin)?;
        let passes: u32 = textio::require_param(&params, "passes", origin)?;
        let scores_section = textio::find_section(sections, "phrase_scores", origin)?;
        let mut pair_scores = BTreeMap::new();
        for (line, fields) in &scores_section.rows {
            if fields.len() != 3 {
                return Err(Error::format(origin, *line, "expected 3 fields"));
            }
            let score = textio::parse_f64(&fields[2], origin, *line)?;
            pair_scores.insert((fields[0].clone(), fields[1].clone()), score);
        }
        Ok(PhraseModel {
            min_count,
            threshold,
            passes,
            pair_scores,
        })
    }

    pub fn from_text(text: &str, origin: &str) -> Result<PhraseModel> {
        let sections = textio::parse_sections(text, origin)?;
        PhraseModel::from_sections(&sections, origin)
    }
}

/// Fits pair scores over the corpus:
/// `score(a,b) = (count(a,b) − min_count) · N_tokens / (count(a) · count(b))`.
///
/// Two passes: pass one scores raw adjacent pairs; pass two re-scores the
/// merged corpus so three-word patterns merge as a bigram of a bigram.
/// Pairs touching a stopword are never candidates.
pub fn fit_phrases(
    docs: &[Vec<String>],
    min_count: u64,
    threshold: f64,
    stopwords: &HashSet<String>,
) -> Result<PhraseModel> {
    if min_count < 1 {
        return Err(Error::Parameter("phrase min_count must be ≥ 1".into()));
    }
    if docs.is_empty() {
        return Err(Error::Parameter("fit_phrases requires non-empty docs".into()));
    }

    let mut model = PhraseModel {
        min_count,
        threshold,
        passes: 2,
        pair_scores: BTreeMap::new(),
    };

    let mut current: Vec<Vec<String>> = docs.to_vec();
    for pass in 0..model.passes {
        let scores = score_pass(&current, min_count, threshold, stopwords);
        for (pair, score) in scores {
            model.pair_scores.entry(pair).or_insert(score);
        }
        if pass + 1 < model.passes {
            current = current
                .iter()
                .map(|doc| apply_phrases(&model, doc))
                .collect();
        }
    }
    Ok(model)
}

fn score_pass(
    docs: &[Vec<String>],
    min_count: u64,
    threshold: f64,
    stopwords: &HashSet<String>,
) -> BTreeMap<(String, String), f64> {
    let mut unigram: HashMap<&str, u64> = HashMap::new();
    let mut pairs: HashMap<(&str, &str), u64> = HashMap::new();
    let mut total_tokens: u64 = 0;
    for doc in docs {
        total_tokens += doc.len() as u64;
        for token in doc {
            *unigram.entry(token).or_insert(0) += 1;
        }
        for window in doc.windows(2) {
            let (a, b) = (window[0].as_str(), window[1].as_str());
            if stopwords.contains(a) || stopwords.contains(b) {
                continue;
            }
            *pairs.entry((a, b)).or_insert(0) += 1;
        }
    }

    let mut scores = BTreeMap::new();
    for ((a, b), pair_count) in pairs {
        if pair_count <= min_count {
            continue; // score would be ≤ 0; never merged
        }
        let score = (pair_count - min_count) as f64 * total_tokens as f64
            / (unigram[a] as f64 * unigram[b] as f64);
        if score >= threshold && score > 0.0 {
            scores.insert((a.to_string(), b.to_string()), score);
        }
    }
    scores
}

/// Greedy left-to-right merge; a token consumed by a merge cannot start
/// another merge in the same sweep. One sweep per fitted pass.
pub fn apply_phrases(model: &PhraseModel, doc: &[String]) -> Vec<String> {
    let mut tokens: Vec<String> = doc.to_vec();
    for _ in 0..model.passes.max(1) {
        tokens = merge_once(model, &tokens);
    }
    tokens
}

fn merge_once(model: &PhraseModel, doc: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(doc.len());
    let mut i = 0;
    while i < doc.len() {
        if i + 1 < doc.len() && model.pair_score(&doc[i], &doc[i + 1]).is_some() {
            out.push(format!("{}{}{}", doc[i], PHRASE_JOINER, doc[i + 1]));
            i += 2;
        } else {
            out.push(doc[i].clone());
            i += 1;
        }
    }
    out
}
