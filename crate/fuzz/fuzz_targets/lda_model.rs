//! Fuzz the LDA model text parser.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pubtrends::topics::LdaModel;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 20 {
        return;
    }
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = LdaModel::from_text(text, "fuzz");
    }
});
