#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Full front end on hostile input: parse, compile binders away, infer,
    // then reduce under a step budget (well-typed terms can still be
    // expensive on purpose, so unbudgeted reduction is out of bounds here).
    if data.len() > 2048 {
        return;
    }
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(term) = apart_core::kernel::parse_term(text) {
            if let Ok(compiled) = apart_core::tca::compile(&term) {
                let _ = apart_core::kernel::normalize_budgeted(&compiled, 50_000);
            }
        }
    }
});
