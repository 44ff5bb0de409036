//! Fuzz the conventional `V d` text vector format.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pubtrends::embedding::WordVectors;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 20 {
        return;
    }
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok((labels, vectors)) = WordVectors::from_text(text, "fuzz") {
            assert_eq!(labels.len(), vectors.len());
            let text2 = vectors.to_text(&labels).unwrap();
            let (labels2, vectors2) = WordVectors::from_text(&text2, "fuzz").unwrap();
            assert_eq!(labels, labels2);
            assert_eq!(vectors, vectors2);
        }
    }
});
