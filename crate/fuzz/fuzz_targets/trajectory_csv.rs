#![no_main]

use invobs_core::simulation::TrajectoryRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(record) = TrajectoryRecord::from_csv(text) else {
        return;
    };
    let again = TrajectoryRecord::from_csv(&record.to_csv()).expect("serialized record parses");
    assert_eq!(again.len(), record.len());
    assert_eq!(again.is_noisy(), record.is_noisy());
});
