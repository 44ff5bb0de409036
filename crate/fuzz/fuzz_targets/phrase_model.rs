//! Fuzz the phrase-model text parser and exercise a merge on success.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pubtrends::preprocess::{apply_phrases, PhraseModel};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(model) = PhraseModel::from_text(text, "fuzz") {
            let doc = vec!["alpha".to_string(), "beta".to_string(), "gamma".to_string()];
            let merged = apply_phrases(&model, &doc);
            assert!(merged.len() <= doc.len());
        }
    }
});
