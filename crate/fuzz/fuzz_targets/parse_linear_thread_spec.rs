#![no_main]

use isaw_core::parse_linear_thread_spec;
use isaw_core::thread::from_linear_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(e) = parse_linear_thread_spec(text) else { return };
    assert_eq!(parse_linear_thread_spec(&e.to_string()).expect("spec reparses"), e);
    if let Some(root) = e.root() {
        let _ = from_linear_spec(&e, root);
    }
});
