//! Lexicon-backed POS tagging and lemmatization with ordered suffix-rule
//! fallback. Deterministic and self-contained; no statistical tagger.

use std::collections::HashMap;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Other,
}

impl PosTag {
    pub fn parse(s: &str) -> Option<PosTag> {
        match s {
            "noun" => Some(PosTag::Noun),
            "verb" => Some(PosTag::Verb),
            "adjective" => Some(PosTag::Adjective),
            "adverb" => Some(PosTag::Adverb),
            "other" => Some(PosTag::Other),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Noun => "noun",
            PosTag::Verb => "verb",
            PosTag::Adjective => "adjective",
            PosTag::Adverb => "adverb",
            PosTag::Other => "other",
        }
    }

    /// Content tags retained by the optional POS filter.
    pub fn is_content(self) -> bool {
        !matches!(self, PosTag::Other)
    }
}

#[derive(Debug, Clone)]
struct SuffixRule {
    suffix: String,
    replacement: String,
    tag: PosTag,
}

/// Surface-form lemma map, most-frequent-tag map, and ordered suffix rules.
#[derive(Debug, Clone)]
pub struct Lexicon {
    lemma_map: HashMap<String, String>,
    tag_map: HashMap<String, PosTag>,
    suffix_rules: Vec<SuffixRule>,
}

/// A suffix rule only fires when the stem keeps at least this many chars.
const MIN_STEM_CHARS: usize = 3;

const BUNDLED: &str = include_str!("../../resources/lexicon.txt");

impl Lexicon {
    /// The lexicon shipped with the crate.
    pub fn bundled() -> &'static Lexicon {
        static CACHE: OnceLock<Lexicon> = OnceLock::new();
        CACHE.get_or_init(|| {
            Lexicon::parse(BUNDLED, "bundled lexicon").expect("bundled lexicon is valid")
        })
    }

    pub fn from_file(path: &Path) -> Result<Lexicon> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read lexicon file {}: {e}", path.display()))
        })?;
        Lexicon::parse(&text, &path.display().to_string())
    }

    /// Parses the plain-text lexicon format: one entry per line, tab fields.
    /// `word\t<surface>\t<lemma>\t<tag>` or `rule\t<suffix>\t<replacement>\t<tag>`.
    pub fn parse(text: &str, origin: &str) -> Result<Lexicon> {
        let mut lemma_map = HashMap::new();
        let mut tag_map = HashMap::new();
        let mut suffix_rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx as u64 + 1;
            let line = raw.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::format(origin, line_no, "expected 4 tab-separated fields"));
            }
            let tag = PosTag::parse(fields[3]).ok_or_else(|| {
                Error::format(origin, line_no, format!("unknown tag {:?}", fields[3]))
            })?;
            match fields[0] {
                "word" => {
                    let surface = fields[1].to_string();
                    let lemma = fields[2].to_string();
                    if surface.is_empty() || lemma.is_empty() {
                        return Err(Error::format(origin, line_no, "empty surface or lemma"));
                    }
                    lemma_map.insert(surface.clone(), lemma);
                    tag_map.insert(surface, tag);
                }
                "rule" => {
                    if fields[1].is_empty() {
                        return Err(Error::format(origin, line_no, "empty suffix"));
                    }
                    suffix_rules.push(SuffixRule {
                        suffix: fields[1].to_string(),
                        replacement: fields[2].to_string(),
                        tag,
                    });
                }
                other => {
                    return Err(Error::format(
                        origin,
                        line_no,
                        format!("unknown entry kind {other:?}"),
                    ))
                }
            }
        }

        let lexicon = Lexicon {
            lemma_map,
            tag_map,
            suffix_rules,
        };
        // Idempotence on lexicon entries: the lemma of a lemma is itself.
        for (surface, lemma) in &lexicon.lemma_map {
            let of_lemma = lexicon.lemma_map.get(lemma).unwrap_or(lemma);
            if of_lemma != lemma {
                return Err(Error::Config(format!(
                    "lexicon {origin}: lemma of {surface:?} is {lemma:?}, but {lemma:?} maps to {of_lemma:?}"
                )));
            }
        }
        Ok(lexicon)
    }

    fn matching_rule(&self, token: &str) -> Option<&SuffixRule> {
        self.suffix_rules.iter().find(|rule| {
            token.ends_with(&rule.suffix)
                && token.chars().count() >= rule.suffix.chars().count() + MIN_STEM_CHARS
        })
    }

    /// Most-frequent tag with suffix-rule fallback; defaults to noun.
    pub fn tag(&self, token: &str) -> PosTag {
        if let Some(tag) = self.tag_map.get(token) {
            return *tag;
        }
        self.matching_rule(token).map_or(PosTag::Noun, |r| r.tag)
    }

    /// Lexicon hit, else suffix-rule lemma, else the token unchanged.
    pub fn lemma(&self, token: &str) -> String {
        if let Some(lemma) = self.lemma_map.get(token) {
            return lemma.clone();
        }
        match self.matching_rule(token) {
            Some(rule) => {
                let stem_len = token.len() - rule.suffix.len();
                let mut lemma = token[..stem_len].to_string();
                lemma.push_str(&rule.replacement);
                lemma
            }
            None => token.to_string(),
        }
    }
}

/// Tags and lemmatizes tokens. With `pos_filter` set, only tokens tagged
/// noun/adjective/verb/adverb are retained.
pub fn tag_and_lemmatize(tokens: &[String], lexicon: &Lexicon, pos_filter: bool) -> Vec<String> {
    tokens
        .iter()
        .filter_map(|token| {
            let tag = lexicon.tag(token);
            if pos_filter && !tag.is_content() {
                return None;
            }
            Some(lexicon.lemma(token))
        })
        .collect()
}
