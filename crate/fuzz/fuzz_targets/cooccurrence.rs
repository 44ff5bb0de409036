//! Fuzz the sparse triplet co-occurrence parser; valid matrices must be
//! symmetric with consistent row sums.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pubtrends::embedding::CooccurrenceMatrix;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(x) = CooccurrenceMatrix::from_text(text, "fuzz") {
            let v = x.vocab_size().min(64) as u32;
            for i in 0..v {
                for j in 0..v {
                    assert_eq!(x.get(i, j).to_bits(), x.get(j, i).to_bits());
                }
            }
        }
    }
});
