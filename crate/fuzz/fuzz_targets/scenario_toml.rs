#![no_main]

use costcurve::scenario::Scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(scenario) = Scenario::from_toml_str(text) {
        // Anything accepted must survive a write/read cycle unchanged.
        let again = Scenario::from_toml_str(&scenario.to_toml_string()).expect("re-parse");
        assert_eq!(again, scenario);
    }
});
