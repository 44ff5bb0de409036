//! Seeded synthetic corpus generator with planted topics, so the full
//! pipeline and its acceptance checks run without any private data.
//!
//! Each document draws most tokens from one planted topic vocabulary plus
//! a shared background vocabulary. Optional "scrambler" words are rare
//! high-idf terms injected into random document pairs; they barely move
//! trained dense embeddings but dominate sparse TF-IDF geometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, PublicationRecord};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub n_docs: usize,
    pub n_topics: usize,
    /// Distinct words per planted topic (disjoint across topics).
    pub topic_vocab: usize,
    /// Shared background vocabulary size (0 for fully disjoint topics).
    pub background_vocab: usize,
    /// Tokens drawn per abstract before noise injection.
    pub doc_len: usize,
    /// Fraction of drawn tokens taken from the planted topic.
    pub topic_word_fraction: f64,
    /// Number of distinct scrambler words (each lands in 2 random docs).
    pub noise_words: usize,
    /// Copies of a scrambler word appended to each chosen doc.
    pub noise_copies: usize,
    pub year_range: (i32, i32),
    pub venue: String,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_docs: 1000,
            n_topics: 5,
            topic_vocab: 60,
            background_vocab: 40,
            doc_len: 40,
            topic_word_fraction: 0.7,
            noise_words: 0,
            noise_copies: 2,
            year_range: (2000, 2020),
            venue: "SYNTH".to_string(),
            seed: 0,
        }
    }
}

/// Generated corpus plus the planted topic of every record.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub corpus: Corpus,
    pub planted_topics: Vec<usize>,
}

/// Generates the corpus. Deterministic for a fixed config.
pub fn generate(config: &SynthConfig) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut abstracts: Vec<Vec<String>> = Vec::with_capacity(config.n_docs);
    let mut planted = Vec::with_capacity(config.n_docs);

    for i in 0..config.n_docs {
        let topic = i % config.n_topics;
        planted.push(topic);
        let mut words = Vec::with_capacity(config.doc_len);
        for _ in 0..config.doc_len {
            if config.background_vocab == 0
                || rng.random::<f64>() < config.topic_word_fraction
            {
                let w = rng.random_range(0..config.topic_vocab);
                words.push(format!("topic{topic}term{w}"));
            } else {
                let w = rng.random_range(0..config.background_vocab);
                words.push(format!("shared{w}"));
            }
        }
        abstracts.push(words);
    }

    // Scrambler words: each appears `noise_copies` times in two random docs.
    for w in 0..config.noise_words {
        let word = format!("scrambler{w}");
        let a = rng.random_range(0..config.n_docs);
        let b = rng.random_range(0..config.n_docs);
        for _ in 0..config.noise_copies {
            abstracts[a].push(word.clone());
            abstracts[b].push(word.clone());
        }
    }

    let (year_lo, year_hi) = config.year_range;
    let records: Vec<PublicationRecord> = abstracts
        .iter()
        .enumerate()
        .map(|(i, words)| {
            let year = rng.random_range(year_lo..=year_hi);
            PublicationRecord {
                id: format!("synth:{i:05}"),
                venue: config.venue.clone(),
                year,
                title: format!("Synthetic abstract {i}"),
                abstract_text: words.join(" "),
                authors: vec![],
                keywords: vec![],
                doi: None,
            }
        })
        .collect();

    SynthCorpus {
        corpus: Corpus {
            records,
            venue_label: config.venue.clone(),
            year_range: config.year_range,
        },
        planted_topics: planted,
    }
}
