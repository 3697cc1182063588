#![no_main]

use isaw_core::format::{from_aut, to_aut};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(lts) = from_aut(text) else { return };
    let out = to_aut(&lts);
    assert_eq!(to_aut(&from_aut(&out).expect("output reparses")), out);
});
