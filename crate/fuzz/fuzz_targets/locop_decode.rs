#![no_main]

use libfuzzer_sys::fuzz_target;
use tfloc::LocOperator;

fuzz_target!(|data: &[u8]| {
    if let Ok(op) = LocOperator::from_bytes(data) {
        assert_eq!(op.to_bytes().len(), data.len());
    }
});
