#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use armflow::{FeatureCatalog, Item, Transaction, TransactionDB};
use proptest::prelude::*;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

/// Features `F0..` with attributes `v0..`.
pub fn catalog(arities: &[usize]) -> FeatureCatalog {
    FeatureCatalog::new(
        arities
            .iter()
            .enumerate()
            .map(|(j, &a)| (format!("F{j}"), (0..a).map(|k| format!("v{k}")).collect::<Vec<_>>())),
    )
    .unwrap()
}

pub fn db(catalog: FeatureCatalog, rows: &[Vec<usize>]) -> TransactionDB {
    let ts = rows.iter().map(|r| Transaction::new(r.clone(), None)).collect();
    TransactionDB::new(Arc::new(catalog), ts, "test").unwrap()
}

/// Arities for `2..=max_d` features with `1..=max_arity` attributes each,
/// plus `min_n..=max_n` rows over them.
pub fn arb_table(max_d: usize, max_arity: usize, min_n: usize, max_n: usize) -> impl Strategy<Value = (Vec<usize>, Vec<Vec<usize>>)> {
    prop::collection::vec(1..=max_arity, 2..=max_d).prop_flat_map(move |arities| {
        let row: Vec<_> = arities.iter().map(|&a| 0..a).collect();
        (Just(arities), prop::collection::vec(row, min_n..=max_n))
    })
}

/// Genotype values for a catalog with `d` features.
pub fn arb_genotype(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![8 => 0.0f64..1.0, 1 => Just(0.0), 1 => Just(1.0)], 2 * d + 1)
}

/// Brute-force `(#antecedent, #joint)` by scanning plain rows.
pub fn brute_counts(rows: &[Vec<usize>], ante: &[Item], cons: &[Item]) -> (usize, usize) {
    let holds = |row: &Vec<usize>, items: &[Item]| items.iter().all(|i| row[i.feature] == i.attribute);
    let a = rows.iter().filter(|r| holds(r, ante)).count();
    let j = rows.iter().filter(|r| holds(r, ante) && holds(r, cons)).count();
    (a, j)
}

pub fn brute_metrics(rows: &[Vec<usize>], ante: &[Item], cons: &[Item]) -> (f64, f64) {
    let (a, j) = brute_counts(rows, ante, cons);
    let supp = j as f64 / rows.len() as f64;
    let conf = if a == 0 { 0.0 } else { j as f64 / a as f64 };
    (supp, conf)
}
