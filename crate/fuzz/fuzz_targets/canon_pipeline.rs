//! Decoded inputs go through canonicalization and decomposition. Errors are
//! fine; panics are not. Large dimensions are skipped to keep runs fast.
#![no_main]

use jets_core::codec::{decode_stream, Value};
use jets_core::contact::{contact_of, decompose_contact, double_contact_of, vertical_quotient};
use jets_core::velocity::split_semiholonomic;
use jets_core::DEFAULT_TOL;
use libfuzzer_sys::fuzz_target;

const MAX_N: usize = 8;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(values) = decode_stream(text) else { return };
    for v in values.iter().take(4) {
        match v {
            Value::Velocity(x) if x.dims().n <= MAX_N => {
                let _ = contact_of(x, DEFAULT_TOL);
            }
            Value::DoubleVelocity(x) if x.dims().n <= MAX_N => {
                if let Ok(d) = double_contact_of(x, DEFAULT_TOL) {
                    let _ = double_contact_of(&d.representative(), DEFAULT_TOL);
                    let _ = decompose_contact(&d, DEFAULT_TOL);
                }
                let _ = split_semiholonomic(x, DEFAULT_TOL);
            }
            Value::Vertical(k) if k.base().dims().n <= MAX_N => {
                let _ = vertical_quotient(&k.to_double_velocity(), DEFAULT_TOL);
            }
            _ => {}
        }
    }
});
