//! Fuzz the lexicon and stopword list parsers; accepted lexicons must
//! tag and lemmatize without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pubtrends::preprocess::{stopwords_from_str, tag_and_lemmatize, Lexicon};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = stopwords_from_str(text);
        if let Ok(lexicon) = Lexicon::parse(text, "fuzz") {
            let tokens = vec![
                "studies".to_string(),
                "zz".to_string(),
                "designing".to_string(),
            ];
            let out = tag_and_lemmatize(&tokens, &lexicon, false);
            assert_eq!(out.len(), tokens.len());
        }
    }
});
