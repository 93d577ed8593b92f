#![no_main]

use libfuzzer_sys::fuzz_target;
use nplattice::config::extract_embedded;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(found) = extract_embedded(text) {
        found.config.validate().expect("embedded configs are valid");
    }
});
