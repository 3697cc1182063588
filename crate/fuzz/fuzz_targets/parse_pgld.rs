#![no_main]

use isaw_core::{extract_thread, parse_pgld, pgld_to_pga};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse_pgld(text) else { return };
    assert_eq!(parse_pgld(&p.to_string()).expect("program reparses"), p);
    let s = pgld_to_pga(&p);
    if s.position_count() <= 4096 {
        extract_thread(&s);
    }
    let _ = isaw_core::to_single_occurrence(&p);
});
