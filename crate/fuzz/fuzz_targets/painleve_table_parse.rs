#![no_main]

use libfuzzer_sys::fuzz_target;
use prmt_core::painleve::PainleveTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = PainleveTable::parse(text) {
        let again = PainleveTable::parse(&table.dump()).expect("dump must parse");
        assert_eq!(again.dump(), table.dump());
    }
});
