#![no_main]

use armflow::{load_transactions, partition, PartitionSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(db) = load_transactions(data, None) else {
        return;
    };
    // Loading the same rows against the inferred catalog must agree.
    let again = load_transactions(data, Some(db.catalog())).expect("inferred catalog accepts its own rows");
    assert_eq!(again.transactions(), db.transactions());
    if db.len() >= 2 {
        let parts = partition(&db, &PartitionSpec::EqualCount(2)).unwrap();
        assert_eq!(parts.iter().map(|p| p.len()).sum::<usize>(), db.len());
    }
});
