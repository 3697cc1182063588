#![no_main]

use isaw_core::{canonical_form, extract_thread, parse_pga, InstructionSequence};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(term) = parse_pga(text) else { return };
    let s = canonical_form(&term);
    let again: InstructionSequence = s.to_string().parse().expect("canonical form reparses");
    assert_eq!(again, s);
    if s.position_count() <= 4096 {
        let t = extract_thread(&s);
        assert!(t.len() <= s.position_count() + 2);
    }
});
