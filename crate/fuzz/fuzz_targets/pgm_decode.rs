#![no_main]

use libfuzzer_sys::fuzz_target;
use tfloc::io::{decode_pgm, encode_pgm};
use tfloc::ValueRange;

fuzz_target!(|data: &[u8]| {
    if let Ok(map) = decode_pgm(data, ValueRange::UNIT) {
        assert!(map.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        let again = decode_pgm(&encode_pgm(&map, ValueRange::UNIT).unwrap(), ValueRange::UNIT).unwrap();
        assert_eq!(again.size(), map.size());
    }
});
