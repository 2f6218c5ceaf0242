#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = nbci::report::parse_csv(text) {
            // accepted CSV re-serializes and re-parses to the same rows
            let rewritten = nbci::report::csv_string(&rows);
            let again = nbci::report::parse_csv(&rewritten).unwrap();
            assert_eq!(rows, again);
        }
    }
});
