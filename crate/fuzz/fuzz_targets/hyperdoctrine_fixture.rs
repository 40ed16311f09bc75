#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Decode the fixture shape and check every embedded term and type
    // parses without panicking. Resolution evaluates user programs and is
    // deliberately not fuzzed: reduction cost is unbounded by design.
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(file) = apart_core::fixtures::parse_hyperdoctrine_fixture(text) {
            for spec in file.assemblies.values() {
                let _ = apart_core::kernel::parse_type(&spec.realizer_type);
                for terms in spec.realizers.values() {
                    for t in terms {
                        let _ = apart_core::kernel::parse_term(t);
                    }
                }
            }
            for spec in file.morphisms.values() {
                let _ = apart_core::kernel::parse_term(&spec.tracker);
            }
            for spec in file.predicates.values() {
                let _ = apart_core::kernel::parse_type(&spec.pred_type);
                for terms in spec.holds.values() {
                    for t in terms {
                        let _ = apart_core::kernel::parse_term(t);
                    }
                }
                if let Some(s) = &spec.support_witness {
                    let _ = apart_core::kernel::parse_term(s);
                }
            }
        }
    }
});
