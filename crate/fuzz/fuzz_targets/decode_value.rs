//! Any accepted document re-encodes to one that decodes to the same value.
#![no_main]

use jets_core::codec::decode_value;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = decode_value(text) {
        let again = decode_value(&v.to_json().to_string()).expect("re-encoded value decodes");
        assert_eq!(again, v);
    }
});
