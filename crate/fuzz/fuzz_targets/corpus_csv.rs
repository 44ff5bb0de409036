//! Fuzz the comma-delimited corpus loader in both load modes.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pubtrends::corpus::{load_corpus_from_reader, CorpusSchema, LoadMode};

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 20 {
        return;
    }
    let schema = CorpusSchema::default();
    for mode in [LoadMode::Strict, LoadMode::Permissive] {
        let _ = load_corpus_from_reader(std::io::Cursor::new(data), &schema, mode, None);
    }
});
