#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = nbci::report::parse_counts(text) {
            // accepted input always yields a usable nonempty sample
            let sample = nbci::nb::Sample::new(values).unwrap();
            assert!(sample.n() >= 1);
            assert!(sample.mean() >= 0.0);
        }
    }
});
