#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(t) = opst::io::decode(data) {
        // anything accepted must re-encode to the same bytes
        assert_eq!(opst::io::encode(&t), data);
    }
});
