#![no_main]

use libfuzzer_sys::fuzz_target;
use opst::codes::PrefCode;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(code) = text.parse::<PrefCode>() {
        let again: PrefCode = code.to_string().parse().unwrap();
        assert_eq!(again, code);
    }
});
