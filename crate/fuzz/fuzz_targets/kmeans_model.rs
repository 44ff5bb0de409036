//! Fuzz the K-means model text parser and assignment on success.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pubtrends::cluster::KMeansModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(model) = KMeansModel::from_text(text, "fuzz") {
            if model.dim > 0 && model.dim <= 64 && model.k > 0 {
                let probe = vec![0.5; model.dim];
                let cluster = model.assign(&probe).unwrap();
                assert!(cluster < model.k);
            }
        }
    }
});
