#![no_main]

use libfuzzer_sys::fuzz_target;
use nplattice::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json(text) {
        // accepted configs survive a canonical round trip
        let again = RunConfig::from_json(&cfg.canonical_json()).expect("canonical form parses");
        assert_eq!(again.sha256(), cfg.sha256());
    }
});
