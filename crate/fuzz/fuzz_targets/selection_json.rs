#![no_main]

use armflow::selector::selection_from_json;
use armflow::FeatureCatalog;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let catalog = FeatureCatalog::new([("A", vec!["a1", "a2"]), ("B", vec!["b1", "b2"]), ("C", vec!["c1"])]).unwrap();
    if let Ok(record) = selection_from_json(data, &catalog) {
        if let Some(f) = &record.fitness {
            assert_eq!(f.len(), record.rules.len());
        }
    }
});
