#![no_main]

use libfuzzer_sys::fuzz_target;
use tfloc::io::{parse_csv, to_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(map) = parse_csv(text) {
        let again = parse_csv(&to_csv(&map)).unwrap();
        assert_eq!(again.size(), map.size());
    }
});
