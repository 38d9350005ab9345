#![no_main]

use armflow::rule::{archive_from_json, archive_to_json};
use armflow::FeatureCatalog;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let catalog = FeatureCatalog::new([("A", vec!["a1", "a2"]), ("B", vec!["b1", "b2"]), ("C", vec!["c1"])]).unwrap();
    if let Ok(rules) = archive_from_json(data, &catalog) {
        let text = archive_to_json(&rules, &catalog);
        assert_eq!(archive_from_json(text.as_bytes(), &catalog).unwrap(), rules);
    }
});
