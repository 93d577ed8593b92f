#![no_main]

use libfuzzer_sys::fuzz_target;
use nplattice::codes::Fraction;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = text.parse::<Fraction>() {
        assert!(f.q() > 0);
        let back: Fraction = format!("{}/{}", f.p(), f.q()).parse().expect("reduced form parses");
        assert_eq!(back, f);
    }
});
