#![no_main]

use libfuzzer_sys::fuzz_target;
use prmt_core::models::SimResult;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(res) = SimResult::parse_csv(text) {
        let again = SimResult::parse_csv(&res.to_csv()).expect("csv output must parse");
        assert_eq!(again, res);
    }
});
