#![no_main]

use gcdissect::affine_types::{classify_quadrangle_with, parse_points, NearParallel};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if s.len() > 512 {
        return;
    }
    if let Ok(pts) = parse_points(s, 1e-9) {
        let _ = classify_quadrangle_with(&pts, NearParallel::Reject);
        let _ = classify_quadrangle_with(&pts, NearParallel::Accept);
    }
});
