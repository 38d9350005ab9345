#![no_main]

use armflow::{decode, FeatureCatalog, Genotype};
use libfuzzer_sys::fuzz_target;

// First byte picks d (2..=9), the next d bytes the arities (1..=4), the rest
// are read as u16 components scaled onto [0, 1].
fuzz_target!(|data: &[u8]| {
    let Some((&first, rest)) = data.split_first() else {
        return;
    };
    let d = 2 + (first % 8) as usize;
    if rest.len() < d {
        return;
    }
    let (ar, genes) = rest.split_at(d);
    let catalog = FeatureCatalog::new(ar.iter().enumerate().map(|(j, &a)| {
        (format!("F{j}"), (0..1 + a % 4).map(|k| format!("v{k}")).collect::<Vec<_>>())
    }))
    .unwrap();
    let mut values: Vec<f64> = genes.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]]) as f64 / 65535.0).collect();
    values.resize(2 * d + 1, 0.5);
    let g = Genotype::new(values).unwrap();
    if let Some(rule) = decode(&g, &catalog) {
        rule.check_catalog(&catalog).unwrap();
        assert!(!rule.antecedent().is_empty() && !rule.consequent().is_empty());
    }
});
