#![no_main]

use isaw_core::{lts_from_linear_spec, parse_linear_process_spec, synth_binary, synth_multireply};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(e) = parse_linear_process_spec(text) else { return };
    assert_eq!(parse_linear_process_spec(&e.to_string()).expect("spec reparses"), e);
    lts_from_linear_spec(&e, e.root()).expect("validated spec has an LTS");
    let _ = synth_multireply(&e);
    let _ = synth_binary(&e, "tact");
});
