#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(ty) = apart_core::kernel::parse_type(text) {
            // Accepted types print back to something that reparses equal.
            let printed = ty.to_string();
            let back = apart_core::kernel::parse_type(&printed).expect("printed type must reparse");
            assert_eq!(back, ty);
            let _ = apart_core::apartness::translate_type(&ty);
        }
    }
});
