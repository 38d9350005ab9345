#![no_main]

use armflow::{AssociationRule, FeatureCatalog};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let catalog = FeatureCatalog::new([
        ("DURATION", vec!["SHORT", "MEDIUM", "LONG"]),
        ("HR", vec!["MEDIUM", "HIGH"]),
        ("HR_MAX", vec!["LOW", "HIGH"]),
        ("ASCENT", vec!["LOW", "MEDIUM", "HIGH"]),
    ])
    .unwrap();
    if let Ok(rule) = AssociationRule::parse(text, &catalog) {
        let printed = rule.format(&catalog);
        assert_eq!(AssociationRule::parse(&printed, &catalog).unwrap(), rule);
    }
});
