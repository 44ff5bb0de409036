//! Fuzz the vocabulary key-value text parser; valid parses must satisfy
//! the bijection invariants and re-serialize losslessly.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pubtrends::preprocess::Vocabulary;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(vocab) = Vocabulary::from_text(text, "fuzz") {
            for (id, token) in vocab.iter() {
                assert_eq!(vocab.id(token), Some(id));
                assert!(vocab.doc_freq(id) <= vocab.term_freq(id));
            }
            let reparsed = Vocabulary::from_text(&vocab.to_text(), "fuzz").unwrap();
            assert_eq!(reparsed, vocab);
        }
    }
});
