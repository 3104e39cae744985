#![no_main]

use gcdissect::treesearch::ExtTree;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if s.len() > 512 {
        return;
    }
    if let Ok(t) = ExtTree::parse(s) {
        let back = ExtTree::parse(&t.to_string()).expect("printed tree parses");
        assert_eq!(back, t);
    }
});
