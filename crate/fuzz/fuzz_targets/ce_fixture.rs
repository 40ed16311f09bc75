#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Fixture decoding and the native extraction must never panic and
    // never run unbounded on malformed or adversarial instances.
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(file) = apart_core::fixtures::parse_ce_fixture(text) {
            if let Ok((phi, f, g)) = apart_core::fixtures::to_ce0(&file) {
                let _ = apart_core::ce::ce0_witness(&phi, &f, &g);
            }
            if let Ok((phi, f, g, mf, mg)) = apart_core::fixtures::to_ce1(&file) {
                let f_probes = f.probes.clone();
                let f_program = f.program;
                let modulus = move |h: &apart_core::ce::Fn2, _: &apart_core::ce::Fn1| {
                    if h.probes == f_probes && h.program == f_program {
                        mf
                    } else {
                        mg
                    }
                };
                let _ = apart_core::ce::ce1_witness(&phi, &f, &g, &modulus);
            }
        }
    }
});
