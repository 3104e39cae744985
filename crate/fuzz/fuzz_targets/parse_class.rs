#![no_main]

use gcdissect::affine_types::{canonicalize, flip, AffineClass};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if s.len() > 256 {
        return;
    }
    let Ok(c) = s.parse::<AffineClass>() else {
        return;
    };
    // Anything accepted must print back to the same class.
    let again: AffineClass = c.to_string().parse().expect("display output parses");
    if c.is_exact() {
        assert_eq!(again, c);
        if c.is_q() {
            assert_eq!(flip(&flip(&c).unwrap()).unwrap(), c);
        }
    }
    let _ = canonicalize(&c);
});
