#![no_main]

use costcurve::scenario::Scenario;
use costcurve_service::parse_request;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(request) = parse_request(data) else { return };
    if let Some(overrides) = request.overrides {
        let _ = Scenario::default().with_json_overrides(overrides);
    }
});
