#![no_main]

use gcdissect::document::PlanDocument;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 64 * 1024 {
        return;
    }
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = PlanDocument::parse(s) else {
        return;
    };
    let Ok(plan) = doc.to_plan() else {
        return;
    };
    let first = PlanDocument::from_plan(&plan).to_json();
    let again = PlanDocument::parse(&first).expect("emitted document parses");
    assert_eq!(again.to_json(), first);
});
