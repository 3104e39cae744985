#![no_main]

use gcdissect::document::plan_from_json;
use gcdissect::verifier::verify_plan;
use gcdissect::Ratio;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Verification is quadratic in the tile count; keep inputs small.
    if data.len() > 64 * 1024 {
        return;
    }
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(plan) = plan_from_json(s) {
        if plan.tiles.len() <= 64 {
            let _ = verify_plan(&plan, &plan.tol);
            let _ = verify_plan(&plan, &Ratio::zero());
        }
    }
});
