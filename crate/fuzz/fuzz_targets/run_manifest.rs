//! Fuzz the run-manifest parser; valid manifests must re-serialize to an
//! equivalent artifact list.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pubtrends::pipeline::RunManifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(manifest) = RunManifest::from_text(text, "fuzz") {
            let reparsed = RunManifest::from_text(&manifest.to_text(), "fuzz").unwrap();
            assert_eq!(reparsed.artifacts, manifest.artifacts);
        }
    }
});
