#![no_main]

use costcurve::export::{from_json, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(results) = from_json(text) {
        let _ = to_json(&results);
    }
});
