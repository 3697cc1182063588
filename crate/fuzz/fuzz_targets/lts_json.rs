#![no_main]

use isaw_core::format::{from_json, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(lts) = from_json(text) else { return };
    let out = to_json(&lts);
    assert_eq!(to_json(&from_json(&out).expect("output reparses")), out);
});
