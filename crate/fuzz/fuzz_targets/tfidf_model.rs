//! Fuzz the TF-IDF model text parser.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pubtrends::preprocess::TokenDoc;
use pubtrends::tfidf::TfidfModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(model) = TfidfModel::from_text(text, "fuzz") {
            let doc = TokenDoc {
                doc_id: "fuzz".into(),
                tokens: vec![0, 0, 1],
            };
            let _ = model.vector(&doc);
        }
    }
});
