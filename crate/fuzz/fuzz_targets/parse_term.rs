#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // The term parser must never panic on any input; accepted terms must
    // survive type inference without panicking either.
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(term) = apart_core::kernel::parse_term(text) {
            let _ = apart_core::kernel::infer_type(&term);
        }
    }
});
