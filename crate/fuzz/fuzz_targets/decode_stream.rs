#![no_main]

use jets_core::codec::decode_stream;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = decode_stream(text) {
        let rendered: Vec<String> = values.iter().map(|v| v.to_json().to_string()).collect();
        assert_eq!(
            decode_stream(&rendered.join("\n")).expect("re-encoded stream decodes"),
            values
        );
    }
});
