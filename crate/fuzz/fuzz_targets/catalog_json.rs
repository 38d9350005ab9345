#![no_main]

use armflow::FeatureCatalog;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(catalog) = FeatureCatalog::from_json(data) {
        let text = catalog.to_json();
        assert_eq!(FeatureCatalog::from_json(text.as_bytes()).unwrap(), catalog);
    }
});
