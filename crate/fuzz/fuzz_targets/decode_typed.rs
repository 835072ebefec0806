//! Per-type decoders. The first byte picks the type.
#![no_main]

use jets_core::codec::JsonCodec;
use jets_core::contact::{ContactElement, DoubleContactElement, QuotientVerticalVector};
use jets_core::group::{JetGroupElement, PrincipalJetElement, SecondOrderJetElement};
use jets_core::velocity::{DoubleVelocity, Velocity, VerticalVector};
use libfuzzer_sys::fuzz_target;

fn roundtrip<T: JsonCodec + PartialEq + std::fmt::Debug>(text: &str) {
    if let Ok(v) = T::from_json_str(text) {
        assert_eq!(
            T::from_json_str(&v.to_json_string(false)).expect("re-encoded value decodes"),
            v
        );
    }
}

fuzz_target!(|data: &[u8]| {
    let Some((&which, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    match which % 9 {
        0 => roundtrip::<Velocity>(text),
        1 => roundtrip::<DoubleVelocity>(text),
        2 => roundtrip::<VerticalVector>(text),
        3 => roundtrip::<JetGroupElement>(text),
        4 => roundtrip::<PrincipalJetElement>(text),
        5 => roundtrip::<SecondOrderJetElement>(text),
        6 => roundtrip::<ContactElement>(text),
        7 => roundtrip::<DoubleContactElement>(text),
        _ => roundtrip::<QuotientVerticalVector>(text),
    }
});
