//! Association rules over a feature catalog and their quality measures.

use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureCatalog, Transaction, TransactionDB};
use crate::error::{Error, Result};

const ANTECEDENT_SEP: &str = " & ";
const IMPLIES: &str = " => ";

/// A single `feature = attribute` condition, both as catalog indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    pub feature: usize,
    pub attribute: usize,
}

impl Item {
    pub fn new(feature: usize, attribute: usize) -> Self {
        Item { feature, attribute }
    }

    fn matches(&self, t: &Transaction) -> bool {
        t.value(self.feature) == self.attribute
    }

    pub fn name(&self, catalog: &FeatureCatalog) -> String {
        let f = catalog.feature(self.feature);
        format!("{}_{}", f.name(), f.attributes()[self.attribute])
    }
}

/// `X1 & .. & Xn => Y1 & .. & Ym`.
///
/// Both sides are non-empty and no feature occurs twice across the rule.
/// Item order is meaningful for display (it is the decoded permutation
/// order) but not for identity; see [`AssociationRule::key`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssociationRule {
    antecedent: Vec<Item>,
    consequent: Vec<Item>,
}

/// Order-insensitive identity of a rule: both sides as sorted sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleKey {
    pub antecedent: Vec<Item>,
    pub consequent: Vec<Item>,
}

impl AssociationRule {
    pub fn new(antecedent: Vec<Item>, consequent: Vec<Item>) -> Result<Self> {
        if antecedent.is_empty() || consequent.is_empty() {
            return Err(Error::argument("rule sides must be non-empty"));
        }
        let mut features: Vec<usize> = antecedent.iter().chain(&consequent).map(|i| i.feature).collect();
        features.sort_unstable();
        if features.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::argument("a feature may appear only once per rule"));
        }
        Ok(AssociationRule { antecedent, consequent })
    }

    pub fn antecedent(&self) -> &[Item] {
        &self.antecedent
    }

    pub fn consequent(&self) -> &[Item] {
        &self.consequent
    }

    pub fn items(&self) -> impl Iterator<Item = &Item> {
        self.antecedent.iter().chain(&self.consequent)
    }

    pub fn key(&self) -> RuleKey {
        let mut antecedent = self.antecedent.clone();
        let mut consequent = self.consequent.clone();
        antecedent.sort_unstable();
        consequent.sort_unstable();
        RuleKey { antecedent, consequent }
    }

    pub fn check_catalog(&self, catalog: &FeatureCatalog) -> Result<()> {
        for item in self.items() {
            let valid = item.feature < catalog.len() && item.attribute < catalog.feature(item.feature).arity();
            if !valid {
                return Err(Error::precondition(format!(
                    "item ({}, {}) is not valid for the catalog",
                    item.feature, item.attribute
                )));
            }
        }
        Ok(())
    }

    /// Renders `FEATURE_ATTRIBUTE` tokens joined by ` & `, sides joined by ` => `.
    pub fn format(&self, catalog: &FeatureCatalog) -> String {
        format_sides(&self.antecedent, &self.consequent, catalog)
    }

    /// Rendering of [`AssociationRule::key`]; used for stable tie-breaking.
    pub fn canonical_string(&self, catalog: &FeatureCatalog) -> String {
        let key = self.key();
        format_sides(&key.antecedent, &key.consequent, catalog)
    }

    /// Inverse of [`AssociationRule::format`].
    ///
    /// Each token is resolved by trying catalog features whose name is a
    /// prefix of the token followed by `_`, longest name first; the rest of
    /// the token must be an attribute of that feature.
    pub fn parse(text: &str, catalog: &FeatureCatalog) -> Result<Self> {
        let mut sides = text.split(IMPLIES);
        let (Some(lhs), Some(rhs), None) = (sides.next(), sides.next(), sides.next()) else {
            return Err(Error::RuleParse {
                token: text.to_owned(),
                message: format!("expected exactly one {:?}", IMPLIES.trim()),
            });
        };
        let antecedent = parse_side(lhs, catalog)?;
        let consequent = parse_side(rhs, catalog)?;

        let mut seen = vec![false; catalog.len()];
        for item in antecedent.iter().chain(&consequent) {
            if std::mem::replace(&mut seen[item.feature], true) {
                return Err(Error::RuleParse {
                    token: item.name(catalog),
                    message: "feature appears more than once".into(),
                });
            }
        }
        Ok(AssociationRule { antecedent, consequent })
    }
}

fn format_sides(antecedent: &[Item], consequent: &[Item], catalog: &FeatureCatalog) -> String {
    let join = |items: &[Item]| {
        items
            .iter()
            .map(|i| i.name(catalog))
            .collect::<Vec<_>>()
            .join(ANTECEDENT_SEP)
    };
    format!("{}{IMPLIES}{}", join(antecedent), join(consequent))
}

fn parse_side(side: &str, catalog: &FeatureCatalog) -> Result<Vec<Item>> {
    if side.is_empty() {
        return Err(Error::RuleParse {
            token: side.to_owned(),
            message: "empty rule side".into(),
        });
    }
    side.split(ANTECEDENT_SEP).map(|tok| parse_token(tok, catalog)).collect()
}

fn parse_token(token: &str, catalog: &FeatureCatalog) -> Result<Item> {
    let mut candidates: Vec<usize> = (0..catalog.len())
        .filter(|&j| {
            let name = catalog.feature(j).name();
            token.len() > name.len() + 1 && token.starts_with(name) && token.as_bytes()[name.len()] == b'_'
        })
        .collect();
    candidates.sort_by_key(|&j| std::cmp::Reverse(catalog.feature(j).name().len()));
    candidates
        .into_iter()
        .find_map(|j| {
            let feature = catalog.feature(j);
            feature
                .attribute_index(&token[feature.name().len() + 1..])
                .map(|a| Item::new(j, a))
        })
        .ok_or_else(|| Error::RuleParse {
            token: token.to_owned(),
            message: "unknown attribute".into(),
        })
}

/// Raw occurrence counts of a rule in a database.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleCounts {
    /// Transactions matching every antecedent item, `#(X)`.
    pub antecedent: usize,
    /// Transactions matching every item of both sides, `#(X ∪ Y)`.
    pub joint: usize,
    /// `N`.
    pub total: usize,
}

impl RuleCounts {
    pub fn support(&self) -> f64 {
        self.joint as f64 / self.total as f64
    }

    /// Zero when the antecedent never occurs.
    pub fn confidence(&self) -> f64 {
        if self.antecedent == 0 {
            0.0
        } else {
            self.joint as f64 / self.antecedent as f64
        }
    }
}

pub fn count(rule: &AssociationRule, db: &TransactionDB) -> Result<RuleCounts> {
    if db.is_empty() {
        return Err(Error::precondition("rule metrics need at least one transaction"));
    }
    rule.check_catalog(db.catalog())?;
    let mut counts = RuleCounts {
        antecedent: 0,
        joint: 0,
        total: db.len(),
    };
    for t in db.transactions() {
        if rule.antecedent.iter().all(|i| i.matches(t)) {
            counts.antecedent += 1;
            if rule.consequent.iter().all(|i| i.matches(t)) {
                counts.joint += 1;
            }
        }
    }
    Ok(counts)
}

pub fn support(rule: &AssociationRule, db: &TransactionDB) -> Result<f64> {
    count(rule, db).map(|c| c.support())
}

pub fn confidence(rule: &AssociationRule, db: &TransactionDB) -> Result<f64> {
    count(rule, db).map(|c| c.confidence())
}

/// Weights of the fitness mix `(alpha * conf + beta * supp) / (alpha + beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessWeights {
    alpha: f64,
    beta: f64,
}

impl FitnessWeights {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || alpha < 0.0 || beta < 0.0 {
            return Err(Error::argument(format!(
                "fitness weights must be finite and non-negative, got alpha={alpha} beta={beta}"
            )));
        }
        if alpha + beta <= 0.0 {
            return Err(Error::argument("alpha + beta must be positive"));
        }
        Ok(FitnessWeights { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn combine(&self, support: f64, confidence: f64) -> f64 {
        (self.alpha * confidence + self.beta * support) / (self.alpha + self.beta)
    }
}

impl Default for FitnessWeights {
    fn default() -> Self {
        FitnessWeights { alpha: 1.0, beta: 1.0 }
    }
}

pub fn fitness(rule: &AssociationRule, db: &TransactionDB, weights: FitnessWeights) -> Result<f64> {
    let c = count(rule, db)?;
    Ok(weights.combine(c.support(), c.confidence()))
}

/// A rule together with its measured quality.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRule {
    pub rule: AssociationRule,
    pub support: f64,
    pub confidence: f64,
    pub fitness: f64,
}

impl ScoredRule {
    pub fn evaluate(rule: AssociationRule, db: &TransactionDB, weights: FitnessWeights) -> Result<Self> {
        let c = count(&rule, db)?;
        let (support, confidence) = (c.support(), c.confidence());
        Ok(ScoredRule {
            rule,
            support,
            confidence,
            fitness: weights.combine(support, confidence),
        })
    }
}

/// Keeps rules with `support >= s_min` and `confidence >= c_min`, in order.
pub fn filter_thresholds(rules: Vec<ScoredRule>, s_min: f64, c_min: f64) -> Vec<ScoredRule> {
    rules
        .into_iter()
        .filter(|r| r.support >= s_min && r.confidence >= c_min)
        .collect()
}

fn sorted_overlap(a: &[Item], b: &[Item]) -> usize {
    a.iter().filter(|x| b.contains(x)).count()
}

/// Shared-item ratio of two rules, side by side:
/// `(|A1 ∩ A2| + |C1 ∩ C2|) / (|A1 ∪ A2| + |C1 ∪ C2|)`.
pub fn similarity(r1: &AssociationRule, r2: &AssociationRule) -> f64 {
    let ante = sorted_overlap(&r1.antecedent, &r2.antecedent);
    let cons = sorted_overlap(&r1.consequent, &r2.consequent);
    let union = (r1.antecedent.len() + r2.antecedent.len() - ante) + (r1.consequent.len() + r2.consequent.len() - cons);
    (ante + cons) as f64 / union as f64
}

/// Symmetric matrix of pairwise rule similarities.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_rules<'a>(rules: impl IntoIterator<Item = &'a AssociationRule>) -> Self {
        let rules: Vec<&AssociationRule> = rules.into_iter().collect();
        let n = rules.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
            for j in i + 1..n {
                let s = similarity(rules[i], rules[j]);
                entries[i * n + j] = s;
                entries[j * n + i] = s;
            }
        }
        SimilarityMatrix { order: n, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }
}

/// Similarity matrix over the first `n_tilde` rules, which must already be
/// sorted by descending fitness.
pub fn adjacency(rules: &[ScoredRule], n_tilde: usize) -> Result<SimilarityMatrix> {
    if n_tilde == 0 || n_tilde > rules.len() {
        return Err(Error::argument(format!(
            "n_tilde must be in 1..={}, got {n_tilde}",
            rules.len()
        )));
    }
    if rules.windows(2).any(|w| w[0].fitness < w[1].fitness) {
        return Err(Error::argument("rules must be sorted by descending fitness"));
    }
    Ok(SimilarityMatrix::from_rules(rules[..n_tilde].iter().map(|r| &r.rule)))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArchiveEntry {
    rule: String,
    support: f64,
    confidence: f64,
    fitness: f64,
}

/// Serializes scored rules as a JSON array of
/// `{rule, support, confidence, fitness}` objects, in the given order.
pub fn archive_to_json(rules: &[ScoredRule], catalog: &FeatureCatalog) -> String {
    let entries: Vec<ArchiveEntry> = rules
        .iter()
        .map(|r| ArchiveEntry {
            rule: r.rule.format(catalog),
            support: r.support,
            confidence: r.confidence,
            fitness: r.fitness,
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&entries).expect("archive serializes");
    out.push('\n');
    out
}

pub fn archive_from_json(bytes: &[u8], catalog: &FeatureCatalog) -> Result<Vec<ScoredRule>> {
    let entries: Vec<ArchiveEntry> = serde_json::from_slice(bytes)?;
    entries
        .into_iter()
        .map(|e| {
            for (name, v) in [("support", e.support), ("confidence", e.confidence), ("fitness", e.fitness)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::schema(format!("{name} {v} of rule {:?} is outside [0, 1]", e.rule)));
                }
            }
            Ok(ScoredRule {
                rule: AssociationRule::parse(&e.rule, catalog)?,
                support: e.support,
                confidence: e.confidence,
                fitness: e.fitness,
            })
        })
        .collect()
}
