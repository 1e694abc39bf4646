#![no_main]

use libfuzzer_sys::fuzz_target;
use opst::input::{parse_csv, parse_plain, Column};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = parse_plain(text) {
        assert!(!p.series.is_empty());
        assert!(p.series.letters().iter().all(|&c| c < p.series.sigma()));
    }
    for column in [Column::Index(0), Column::Index(1), Column::Name("value".into())] {
        if let Ok(p) = parse_csv(text, &column) {
            assert!(!p.series.is_empty());
        }
    }
});
