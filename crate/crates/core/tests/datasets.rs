mod common;

use std::fs::File;

use armflow::{load_transactions, partition, FeatureCatalog, PartitionSpec, Timestamp};
use common::*;
use proptest::prelude::*;

fn training_log() -> armflow::TransactionDB {
    load_transactions(File::open(fixture("training_log.csv")).unwrap(), None).unwrap()
}

#[test]
fn training_log_equal_count_quarters() {
    let db = training_log();
    assert_eq!(db.len(), 535);
    let sizes: Vec<usize> = partition(&db, &PartitionSpec::EqualCount(4)).unwrap().iter().map(|p| p.len()).collect();
    assert_eq!(sizes, [134, 134, 134, 133]);
}

#[test]
fn training_log_date_boundaries() {
    let db = training_log();
    let bounds = ["2014-05-15", "2015-07-15", "2016-06-01"].map(|b| b.parse::<Timestamp>().unwrap());
    let parts = partition(&db, &PartitionSpec::Boundaries(bounds.to_vec())).unwrap();
    let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
    assert_eq!(sizes, [126, 134, 139, 136]);
    let labels: Vec<&str> = parts.iter().map(|p| p.label()).collect();
    assert_eq!(labels, ["period-1", "period-2", "period-3", "period-4"]);
}

#[test]
fn catalog_fixture_matches_inferred_domains() {
    let given = FeatureCatalog::from_json(&std::fs::read(fixture("training_log.catalog.json")).unwrap()).unwrap();
    let with_catalog = load_transactions(File::open(fixture("training_log.csv")).unwrap(), Some(&given)).unwrap();
    let inferred = training_log();
    assert_eq!(given.len(), 7);
    for (a, b) in given.features().iter().zip(inferred.catalog().features()) {
        assert_eq!(a.name(), b.name());
        let mut x = a.attributes().to_vec();
        let mut y = b.attributes().to_vec();
        x.sort();
        y.sort();
        assert_eq!(x, y);
    }
    // Same rows, different attribute numbering at most.
    assert_eq!(with_catalog.len(), inferred.len());
}

#[test]
fn toy_fixture() {
    let db = load_transactions(File::open(fixture("toy.csv")).unwrap(), None).unwrap();
    assert_eq!((db.len(), db.catalog().len()), (4, 2));
    assert!(!db.has_timestamps());
}

proptest! {
    #[test]
    fn equal_count_partition_covers_in_order(
        (arities, rows) in arb_table(3, 3, 1, 60),
        k in 1usize..=8,
    ) {
        prop_assume!(k <= rows.len());
        let db = db(catalog(&arities), &rows);
        let parts = partition(&db, &PartitionSpec::EqualCount(k)).unwrap();
        prop_assert_eq!(parts.len(), k);
        let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1] && w[0] - w[1] <= 1));
        let joined: Vec<_> = parts.iter().flat_map(|p| p.transactions().iter().cloned()).collect();
        prop_assert_eq!(joined.as_slice(), db.transactions());
    }

    #[test]
    fn boundary_partition_respects_timestamps(
        stamps in prop::collection::vec(0i64..100, 1..60),
        mut bounds in prop::collection::btree_set(1i64..100, 0..4),
    ) {
        let mut csv = String::from("timestamp,A,B\n");
        for (i, t) in stamps.iter().enumerate() {
            csv.push_str(&format!("{t},a{},b{}\n", i % 2, i % 3));
        }
        let db = load_transactions(csv.as_bytes(), None).unwrap();
        let bounds: Vec<Timestamp> = std::mem::take(&mut bounds).into_iter().map(Timestamp::Seq).collect();
        let k = bounds.len() + 1;
        match partition(&db, &PartitionSpec::Boundaries(bounds.clone())) {
            Ok(parts) => {
                prop_assert_eq!(parts.len(), k);
                prop_assert_eq!(parts.iter().map(|p| p.len()).sum::<usize>(), db.len());
                for (i, p) in parts.iter().enumerate() {
                    for t in p.transactions() {
                        let ts = t.timestamp().unwrap();
                        prop_assert!(i == 0 || ts >= bounds[i - 1]);
                        prop_assert!(i == k - 1 || ts < bounds[i]);
                    }
                }
            }
            Err(_) => prop_assert!(k > db.len()),
        }
    }
}
