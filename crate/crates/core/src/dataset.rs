//! Categorical transaction databases.
//!
//! A [`TransactionDB`] holds fixed-arity transactions: every transaction
//! carries exactly one attribute value per catalog feature, stored as an
//! index into that feature's attribute domain. Databases are immutable once
//! built and share their [`FeatureCatalog`] through an [`Arc`], so splitting
//! a database into time periods never copies the catalog.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Header name that marks the optional leading timestamp column.
pub const TIMESTAMP_COLUMN: &str = "timestamp";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    name: String,
    attributes: Vec<String>,
}

impl Feature {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    /// Size of the attribute domain.
    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn attribute_index(&self, value: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == value)
    }
}

/// Ordered list of features, each with an ordered attribute domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureCatalog {
    features: Vec<Feature>,
}

impl FeatureCatalog {
    pub fn new<S, A>(features: impl IntoIterator<Item = (S, A)>) -> Result<Self>
    where
        S: Into<String>,
        A: IntoIterator,
        A::Item: Into<String>,
    {
        let features: Vec<Feature> = features
            .into_iter()
            .map(|(name, attrs)| Feature {
                name: name.into(),
                attributes: attrs.into_iter().map(Into::into).collect(),
            })
            .collect();
        let catalog = FeatureCatalog { features };
        catalog.validate(true)?;
        Ok(catalog)
    }

    fn validate(&self, require_attributes: bool) -> Result<()> {
        if self.features.len() < 2 {
            return Err(Error::schema(format!(
                "catalog needs at least 2 features, found {}",
                self.features.len()
            )));
        }
        let mut names = HashSet::new();
        for feature in &self.features {
            if feature.name.is_empty() {
                return Err(Error::schema("empty feature name"));
            }
            if !names.insert(feature.name.as_str()) {
                return Err(Error::schema(format!("duplicate feature name {:?}", feature.name)));
            }
            if require_attributes && feature.attributes.is_empty() {
                return Err(Error::schema(format!(
                    "feature {:?} has an empty attribute domain",
                    feature.name
                )));
            }
            let mut seen = HashSet::new();
            for attr in &feature.attributes {
                if attr.is_empty() {
                    return Err(Error::schema(format!(
                        "empty attribute value in feature {:?}",
                        feature.name
                    )));
                }
                if !seen.insert(attr.as_str()) {
                    return Err(Error::schema(format!(
                        "duplicate attribute {:?} in feature {:?}",
                        attr, feature.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of features, `d`.
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature(&self, index: usize) -> &Feature {
        &self.features[index]
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Parses the catalog file format: a JSON object mapping each feature
    /// name to an ordered array of attribute strings. Key order is kept.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let value: Value = serde_json::from_slice(bytes)?;
        let Value::Object(map) = value else {
            return Err(Error::schema("catalog must be a JSON object"));
        };
        let mut features = Vec::with_capacity(map.len());
        for (name, attrs) in map {
            let Value::Array(items) = attrs else {
                return Err(Error::schema(format!("feature {name:?} must map to an array")));
            };
            let attrs = items
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s),
                    other => Err(Error::schema(format!(
                        "attribute of feature {name:?} must be a string, found {other}"
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            features.push((name, attrs));
        }
        FeatureCatalog::new(features)
    }

    pub fn to_json(&self) -> String {
        let map: Map<String, Value> = self
            .features
            .iter()
            .map(|f| {
                let attrs = f.attributes.iter().cloned().map(Value::String).collect();
                (f.name.clone(), Value::Array(attrs))
            })
            .collect();
        serde_json::to_string_pretty(&Value::Object(map)).expect("catalog serializes")
    }
}

/// Chronological key attached to a transaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Timestamp {
    Seq(i64),
    Date(NaiveDate),
}

impl Timestamp {
    fn same_kind(&self, other: &Timestamp) -> bool {
        matches!(
            (self, other),
            (Timestamp::Seq(_), Timestamp::Seq(_)) | (Timestamp::Date(_), Timestamp::Date(_))
        )
    }
}

impl FromStr for Timestamp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Timestamp::Seq(n));
        }
        NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .map(Timestamp::Date)
            .map_err(|_| Error::Data(format!("{s:?} is neither an integer nor a YYYY-MM-DD date")))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timestamp::Seq(n) => write!(f, "{n}"),
            Timestamp::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
        }
    }
}

/// One attribute index per catalog feature, by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transaction {
    values: Vec<usize>,
    timestamp: Option<Timestamp>,
}

impl Transaction {
    pub fn new(values: Vec<usize>, timestamp: Option<Timestamp>) -> Self {
        Transaction { values, timestamp }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, feature: usize) -> usize {
        self.values[feature]
    }

    pub fn timestamp(&self) -> Option<Timestamp> {
        self.timestamp
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionDB {
    catalog: Arc<FeatureCatalog>,
    transactions: Vec<Transaction>,
    label: String,
}

impl TransactionDB {
    /// Builds a database, checking every transaction against the catalog and
    /// the chronological order of timestamps.
    pub fn new(
        catalog: Arc<FeatureCatalog>,
        transactions: Vec<Transaction>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let d = catalog.len();
        for (i, t) in transactions.iter().enumerate() {
            if t.values.len() != d {
                return Err(Error::schema(format!(
                    "transaction {i} has {} values, catalog has {d} features",
                    t.values.len()
                )));
            }
            for (j, &v) in t.values.iter().enumerate() {
                if v >= catalog.feature(j).arity() {
                    return Err(Error::schema(format!(
                        "transaction {i}: attribute index {v} out of range for feature {:?}",
                        catalog.feature(j).name()
                    )));
                }
            }
        }
        check_timestamps(&transactions)?;
        Ok(TransactionDB {
            catalog,
            transactions,
            label: label.into(),
        })
    }

    pub fn catalog(&self) -> &FeatureCatalog {
        &self.catalog
    }

    pub fn shared_catalog(&self) -> Arc<FeatureCatalog> {
        Arc::clone(&self.catalog)
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    /// Transaction count, `N`.
    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_timestamps(&self) -> bool {
        self.transactions.first().is_some_and(|t| t.timestamp.is_some())
    }

    /// Distinct values per feature, ordered by first appearance in the
    /// database's row order.
    pub fn infer_catalog(&self) -> Result<FeatureCatalog> {
        let features = self.catalog.features().iter().enumerate().map(|(j, f)| {
            let mut seen = vec![false; f.arity()];
            let mut attrs = Vec::new();
            for t in &self.transactions {
                let v = t.values[j];
                if !seen[v] {
                    seen[v] = true;
                    attrs.push(f.attributes[v].clone());
                }
            }
            (f.name.clone(), attrs)
        });
        FeatureCatalog::new(features)
    }
}

fn check_timestamps(transactions: &[Transaction]) -> Result<()> {
    let Some(first) = transactions.first() else {
        return Ok(());
    };
    match first.timestamp {
        None => {
            if transactions.iter().any(|t| t.timestamp.is_some()) {
                return Err(Error::schema("timestamps must be present on all transactions or none"));
            }
        }
        Some(ts0) => {
            let mut prev = ts0;
            for t in transactions {
                let ts = t
                    .timestamp
                    .ok_or_else(|| Error::schema("timestamps must be present on all transactions or none"))?;
                if !ts.same_kind(&ts0) {
                    return Err(Error::schema("timestamps mix integers and dates"));
                }
                if ts < prev {
                    return Err(Error::schema("transactions are not sorted by timestamp"));
                }
                prev = ts;
            }
        }
    }
    Ok(())
}

/// Reads a CSV transaction table.
///
/// The header names the features; an optional first column named
/// `timestamp` carries an integer or `YYYY-MM-DD` key. Without `catalog`,
/// one is inferred from the data with attributes in order of first
/// appearance (after chronological sorting). With a catalog, columns are
/// matched to features by name and every cell must belong to its domain.
pub fn load_transactions<R: Read>(source: R, catalog: Option<&FeatureCatalog>) -> Result<TransactionDB> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);

    let headers = reader.headers().map_err(csv_error)?.clone();
    let has_ts = headers.get(0) == Some(TIMESTAMP_COLUMN);
    let names: Vec<&str> = headers.iter().skip(usize::from(has_ts)).collect();

    let mut seen = HashSet::new();
    for name in &names {
        if name.is_empty() {
            return Err(Error::schema("empty column name in header"));
        }
        if !seen.insert(*name) {
            return Err(Error::schema(format!("duplicate column name {name:?}")));
        }
    }
    if names.len() < 2 {
        return Err(Error::schema(format!(
            "need at least 2 feature columns, found {}",
            names.len()
        )));
    }

    // Column position -> catalog feature index.
    let column_map: Vec<usize> = match catalog {
        Some(cat) => {
            if cat.len() != names.len() {
                return Err(Error::schema(format!(
                    "CSV has {} feature columns, catalog has {} features",
                    names.len(),
                    cat.len()
                )));
            }
            names
                .iter()
                .map(|n| {
                    cat.feature_index(n)
                        .ok_or_else(|| Error::schema(format!("column {n:?} is not in the catalog")))
                })
                .collect::<Result<_>>()?
        }
        None => (0..names.len()).collect(),
    };

    let mut rows: Vec<(Option<Timestamp>, Vec<String>)> = Vec::new();
    let mut ts_kind: Option<Timestamp> = None;
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let row = record.position().map_or(rows.len() + 2, |p| p.line() as usize);
        if let Some(i) = record.iter().position(str::is_empty) {
            return Err(Error::Parse {
                row,
                message: format!("empty cell in column {}", i + 1),
            });
        }
        let timestamp = if has_ts {
            let ts: Timestamp = record[0].parse().map_err(|e: Error| Error::Parse {
                row,
                message: e.to_string(),
            })?;
            match ts_kind {
                None => ts_kind = Some(ts),
                Some(k) if !k.same_kind(&ts) => {
                    return Err(Error::Parse {
                        row,
                        message: "timestamp column mixes integers and dates".into(),
                    })
                }
                Some(_) => {}
            }
            Some(ts)
        } else {
            None
        };
        let cells = record.iter().skip(usize::from(has_ts)).map(str::to_owned).collect();
        rows.push((timestamp, cells));
    }

    if has_ts {
        rows.sort_by_key(|(ts, _)| *ts);
    }

    let catalog = match catalog {
        Some(cat) => cat.clone(),
        None => infer_from_rows(&names, &rows),
    };

    let transactions = rows
        .into_iter()
        .map(|(timestamp, cells)| {
            let mut values = vec![0; catalog.len()];
            for (col, cell) in cells.iter().enumerate() {
                let feature = catalog.feature(column_map[col]);
                values[column_map[col]] = feature.attribute_index(cell).ok_or_else(|| Error::Domain {
                    feature: feature.name().to_owned(),
                    value: cell.clone(),
                })?;
            }
            Ok(Transaction { values, timestamp })
        })
        .collect::<Result<Vec<_>>>()?;

    TransactionDB::new(Arc::new(catalog), transactions, "all")
}

fn infer_from_rows(names: &[&str], rows: &[(Option<Timestamp>, Vec<String>)]) -> FeatureCatalog {
    let features = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let mut seen = HashSet::new();
            let attrs = rows
                .iter()
                .filter(|(_, cells)| seen.insert(cells[j].as_str()))
                .map(|(_, cells)| cells[j].clone())
                .collect();
            Feature {
                name: (*name).to_owned(),
                attributes: attrs,
            }
        })
        .collect();
    // Header-only input yields empty domains; such a database has N = 0 and
    // is refused by every mining entry point.
    FeatureCatalog { features }
}

fn csv_error(err: csv::Error) -> Error {
    let row = err.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        row,
        message: err.to_string(),
    }
}

/// How to split a database into chronological periods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionSpec {
    /// `K` parts of as-equal-as-possible size, earlier parts taking the
    /// larger share.
    EqualCount(usize),
    /// `K - 1` strictly increasing boundaries. A transaction belongs to the
    /// first period whose boundary is greater than its timestamp.
    Boundaries(Vec<Timestamp>),
}

impl PartitionSpec {
    pub fn period_count(&self) -> usize {
        match self {
            PartitionSpec::EqualCount(k) => *k,
            PartitionSpec::Boundaries(b) => b.len() + 1,
        }
    }
}

/// Splits `db` into `K` auxiliary databases labelled `period-1` .. `period-K`.
pub fn partition(db: &TransactionDB, spec: &PartitionSpec) -> Result<Vec<TransactionDB>> {
    let k = spec.period_count();
    if k == 0 {
        return Err(Error::argument("period count must be at least 1"));
    }
    if k > db.len() {
        return Err(Error::argument(format!(
            "cannot split {} transactions into {k} periods",
            db.len()
        )));
    }

    let sizes: Vec<usize> = match spec {
        PartitionSpec::EqualCount(_) => {
            let (base, extra) = (db.len() / k, db.len() % k);
            (0..k).map(|i| base + usize::from(i < extra)).collect()
        }
        PartitionSpec::Boundaries(bounds) => {
            if !db.has_timestamps() {
                return Err(Error::schema("boundary partitioning requires a timestamp column"));
            }
            if bounds.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::argument("period boundaries must be strictly increasing"));
            }
            let kind = db.transactions[0].timestamp.expect("checked above");
            if bounds.iter().any(|b| !b.same_kind(&kind)) {
                return Err(Error::schema("boundary type does not match the timestamp column"));
            }
            let mut sizes = vec![0; k];
            for t in &db.transactions {
                let ts = t.timestamp.expect("all transactions carry timestamps");
                let period = bounds.iter().position(|b| *b > ts).unwrap_or(k - 1);
                sizes[period] += 1;
            }
            sizes
        }
    };

    // Transactions are sorted, so each period is a contiguous run.
    let mut parts = Vec::with_capacity(k);
    let mut start = 0;
    for (i, size) in sizes.into_iter().enumerate() {
        let slice = db.transactions[start..start + size].to_vec();
        start += size;
        parts.push(TransactionDB {
            catalog: db.shared_catalog(),
            transactions: slice,
            label: format!("period-{}", i + 1),
        });
    }
    Ok(parts)
}

/// Maps a numeric column onto three ordered labels by nearest-rank terciles.
///
/// A value gets `labels[0]` when it is at most the first-tercile value,
/// `labels[1]` when at most the second, `labels[2]` otherwise. The rank for
/// tercile `k` is `ceil(k * n / 3)`.
pub fn tercile_discretize(column: &[f64], labels: [&str; 3]) -> Result<Vec<String>> {
    if column.is_empty() {
        return Err(Error::argument("cannot discretize an empty column"));
    }
    if labels[0] == labels[1] || labels[1] == labels[2] || labels[0] == labels[2] {
        return Err(Error::argument("tercile labels must be distinct"));
    }
    if let Some(bad) = column.iter().find(|v| !v.is_finite()) {
        return Err(Error::Data(format!("non-finite value {bad} in numeric column")));
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nearest_rank = |k: usize| sorted[(k * n).div_ceil(3).max(1) - 1];
    let (low, mid) = (nearest_rank(1), nearest_rank(2));
    Ok(column
        .iter()
        .map(|&v| {
            let label = if v <= low {
                labels[0]
            } else if v <= mid {
                labels[1]
            } else {
                labels[2]
            };
            label.to_owned()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "A,B\na1,b1\na1,b1\na1,b2\na2,b2\n";

    fn sizes(parts: &[TransactionDB]) -> Vec<usize> {
        parts.iter().map(TransactionDB::len).collect()
    }

    #[test]
    fn loads_toy_csv() {
        let db = load_transactions(TOY.as_bytes(), None).unwrap();
        assert_eq!(db.len(), 4);
        assert_eq!(db.catalog().len(), 2);
        assert_eq!(db.catalog().feature(0).attributes(), ["a1", "a2"]);
        assert_eq!(db.transactions()[3].values(), [1, 1]);
        assert!(!db.has_timestamps());
    }

    #[test]
    fn header_only_csv_is_empty_db() {
        let db = load_transactions("A,B\n".as_bytes(), None).unwrap();
        assert_eq!(db.len(), 0);
    }

    #[test]
    fn rejects_duplicate_headers() {
        let err = load_transactions("A,A\nx,y\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
    }

    #[test]
    fn rejects_empty_cell_with_row_number() {
        let err = load_transactions("A,B\na,b\na,\n".as_bytes(), None).unwrap_err();
        match err {
            Error::Parse { row, .. } => assert_eq!(row, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = load_transactions("A,B\na,b,c\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn domain_error_names_feature_and_value() {
        let cat = FeatureCatalog::new([("A", vec!["a1", "a2"]), ("B", vec!["b1", "b2"])]).unwrap();
        let err = load_transactions("A,B\na1,b9\n".as_bytes(), Some(&cat)).unwrap_err();
        match err {
            Error::Domain { feature, value } => {
                assert_eq!(feature, "B");
                assert_eq!(value, "b9");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn supplied_catalog_matches_columns_by_name() {
        let cat = FeatureCatalog::new([("B", vec!["b1", "b2"]), ("A", vec!["a2", "a1"])]).unwrap();
        let db = load_transactions(TOY.as_bytes(), Some(&cat)).unwrap();
        // Row 4 is (a2, b2): B index 1, A index 0.
        assert_eq!(db.transactions()[3].values(), [1, 0]);
    }

    #[test]
    fn sorts_stably_by_timestamp() {
        let csv = "timestamp,A,B\n3,a1,b1\n1,a2,b1\n3,a2,b2\n2,a1,b2\n";
        let db = load_transactions(csv.as_bytes(), None).unwrap();
        let ts: Vec<_> = db.transactions().iter().map(|t| t.timestamp().unwrap()).collect();
        assert_eq!(ts, [Timestamp::Seq(1), Timestamp::Seq(2), Timestamp::Seq(3), Timestamp::Seq(3)]);
        // Equal keys keep file order: (a1,b1) came before (a2,b2).
        assert_eq!(db.catalog().feature(0).attributes(), ["a2", "a1"]);
        assert_eq!(db.transactions()[2].values(), [1, 0]);
    }

    #[test]
    fn parses_dates() {
        let csv = "timestamp,A,B\n2014-05-02,a,b\n2013-03-01,a,c\n";
        let db = load_transactions(csv.as_bytes(), None).unwrap();
        assert_eq!(db.transactions()[0].timestamp(), Some("2013-03-01".parse().unwrap()));
    }

    #[test]
    fn rejects_mixed_timestamp_kinds() {
        let csv = "timestamp,A,B\n2014-05-02,a,b\n7,a,c\n";
        assert!(load_transactions(csv.as_bytes(), None).is_err());
    }

    #[test]
    fn catalog_json_round_trip_keeps_order() {
        let json = br#"{"Z":["z2","z1"],"A":["a1"]}"#;
        let cat = FeatureCatalog::from_json(json).unwrap();
        assert_eq!(cat.feature(0).name(), "Z");
        assert_eq!(cat.feature(0).attributes(), ["z2", "z1"]);
        assert_eq!(FeatureCatalog::from_json(cat.to_json().as_bytes()).unwrap(), cat);
    }

    #[test]
    fn catalog_invariants() {
        assert!(FeatureCatalog::new([("A", vec!["x"])]).is_err());
        assert!(FeatureCatalog::new([("A", vec!["x"]), ("A", vec!["y"])]).is_err());
        assert!(FeatureCatalog::new([("A", vec!["x", "x"]), ("B", vec!["y"])]).is_err());
        assert!(FeatureCatalog::new([("A", Vec::<&str>::new()), ("B", vec!["y"])]).is_err());
        assert!(FeatureCatalog::new([("", vec!["x"]), ("B", vec!["y"])]).is_err());
    }

    #[test]
    fn equal_count_partition_of_535() {
        let csv: String = std::iter::once("A,B\n".to_owned())
            .chain((0..535).map(|i| format!("a{},b{}\n", i % 3, i % 2)))
            .collect();
        let db = load_transactions(csv.as_bytes(), None).unwrap();
        assert_eq!(db.len(), 535);
        let parts = partition(&db, &PartitionSpec::EqualCount(4)).unwrap();
        assert_eq!(sizes(&parts), [134, 134, 134, 133]);
        assert_eq!(parts[3].label(), "period-4");
    }

    #[test]
    fn single_period_is_identity() {
        let db = load_transactions(TOY.as_bytes(), None).unwrap();
        let parts = partition(&db, &PartitionSpec::EqualCount(1)).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].transactions(), db.transactions());
    }

    #[test]
    fn partition_errors() {
        let db = load_transactions(TOY.as_bytes(), None).unwrap();
        assert!(matches!(partition(&db, &PartitionSpec::EqualCount(5)), Err(Error::Argument(_))));
        assert!(matches!(
            partition(&db, &PartitionSpec::Boundaries(vec![Timestamp::Seq(1)])),
            Err(Error::Schema(_))
        ));
        let csv = "timestamp,A,B\n1,a,b\n2,a,b\n3,a,b\n";
        let db = load_transactions(csv.as_bytes(), None).unwrap();
        let bad = PartitionSpec::Boundaries(vec![Timestamp::Seq(2), Timestamp::Seq(2)]);
        assert!(matches!(partition(&db, &bad), Err(Error::Argument(_))));
    }

    #[test]
    fn boundary_partition_assigns_first_exceeding_boundary() {
        let csv = "timestamp,A,B\n1,a,b\n2,a,b\n3,a,b\n4,a,b\n5,a,b\n";
        let db = load_transactions(csv.as_bytes(), None).unwrap();
        let spec = PartitionSpec::Boundaries(vec![Timestamp::Seq(2), Timestamp::Seq(5)]);
        let parts = partition(&db, &spec).unwrap();
        assert_eq!(sizes(&parts), [1, 3, 1]);
    }

    #[test]
    fn terciles() {
        let labels = ["LOW", "MED", "HIGH"];
        assert_eq!(tercile_discretize(&[1.0, 2.0, 3.0], labels).unwrap(), ["LOW", "MED", "HIGH"]);
        assert_eq!(tercile_discretize(&[5.0, 5.0, 5.0], labels).unwrap(), ["LOW", "LOW", "LOW"]);
        assert_eq!(
            tercile_discretize(&[10.0, 20.0, 30.0, 40.0, 50.0, 60.0], labels).unwrap(),
            ["LOW", "LOW", "MED", "MED", "HIGH", "HIGH"]
        );
        assert!(matches!(tercile_discretize(&[1.0, f64::NAN], labels), Err(Error::Data(_))));
        assert!(tercile_discretize(&[], labels).is_err());
        assert!(tercile_discretize(&[1.0], ["a", "a", "b"]).is_err());
    }
}
