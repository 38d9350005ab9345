//! Choosing at most `M` mutually similar rules from an archive.
//!
//! The objective for a set `S` is `sum_{i<j in S} sim(R_i, R_j)` under the
//! capacity `sum_{i in S} w_i <= M`. [`select_exact`] optimizes it by
//! enumeration and is the reference; [`select_dp`] is a 0/1-knapsack dynamic
//! program whose per-item profit is the item's adjacency row sum.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::FeatureCatalog;
use crate::de::{rank, RuleArchive};
use crate::error::{Error, Result};
use crate::rule::{AssociationRule, ScoredRule, SimilarityMatrix};

/// Largest candidate count accepted by [`select_exact`].
pub const EXACT_LIMIT: usize = 25;

/// Objective and fitness differences below this are ties.
const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    /// Exact when at most [`EXACT_LIMIT`] candidates remain, otherwise dp
    /// over the best [`EXACT_LIMIT`] by fitness.
    Auto,
    Exact,
    Dp,
}

impl fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionMode::Auto => "auto",
            SelectionMode::Exact => "exact",
            SelectionMode::Dp => "dp",
        })
    }
}

impl std::str::FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SelectionMode::Auto),
            "exact" => Ok(SelectionMode::Exact),
            "dp" => Ok(SelectionMode::Dp),
            other => Err(Error::argument(format!("unknown selection mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionParams {
    /// Capacity `M`.
    pub map_size: usize,
    /// Number of best rules considered, `Ñ`.
    pub n_tilde: usize,
    pub mode: SelectionMode,
    /// Per-rule integer weights aligned with the ranked candidates; unit
    /// weights when absent.
    pub weights: Option<Vec<u32>>,
}

impl Default for SelectionParams {
    fn default() -> Self {
        SelectionParams {
            map_size: 4,
            n_tilde: 100,
            mode: SelectionMode::Auto,
            weights: None,
        }
    }
}

impl SelectionParams {
    pub fn validate(&self) -> Result<()> {
        if self.map_size == 0 {
            return Err(Error::argument("map size M must be at least 1"));
        }
        if self.n_tilde == 0 {
            return Err(Error::argument("number of observed rules must be at least 1"));
        }
        if let Some(w) = &self.weights {
            check_weights(w)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleSelection {
    /// Chosen rules in candidate (ranked) order.
    pub chosen: Vec<ScoredRule>,
    /// Sum of pairwise similarities over `chosen`.
    pub objective: f64,
    pub total_fitness: f64,
    /// Solver that produced the selection, `Exact` or `Dp`.
    pub mode: SelectionMode,
}

impl RuleSelection {
    fn from_indices(rules: &[ScoredRule], indices: &[usize], mode: SelectionMode) -> Self {
        let chosen: Vec<ScoredRule> = indices.iter().map(|&i| rules[i].clone()).collect();
        let objective = pairwise_objective(chosen.iter().map(|r| &r.rule));
        let total_fitness = chosen.iter().map(|r| r.fitness).sum();
        RuleSelection {
            chosen,
            objective,
            total_fitness,
            mode,
        }
    }
}

/// `sum_{i<j} sim(R_i, R_j)`, accumulated row by row.
pub fn pairwise_objective<'a>(rules: impl IntoIterator<Item = &'a AssociationRule>) -> f64 {
    let rules: Vec<&AssociationRule> = rules.into_iter().collect();
    let mut total = 0.0;
    for i in 0..rules.len() {
        for j in i + 1..rules.len() {
            total += crate::rule::similarity(rules[i], rules[j]);
        }
    }
    total
}

/// The best `n_tilde` archive entries, by descending fitness with ties
/// ordered by canonical rule string.
pub fn top_n(archive: &RuleArchive, n_tilde: usize) -> Result<Vec<ScoredRule>> {
    if archive.is_empty() {
        return Err(Error::argument(format!("archive {:?} is empty", archive.label())));
    }
    let mut ranked = archive.ranked();
    ranked.truncate(n_tilde);
    Ok(ranked)
}

fn check_weights(weights: &[u32]) -> Result<()> {
    if weights.contains(&0) {
        return Err(Error::argument("item weights must be positive"));
    }
    Ok(())
}

fn resolve_weights(weights: Option<&[u32]>, n: usize) -> Result<Vec<usize>> {
    match weights {
        None => Ok(vec![1; n]),
        Some(w) => {
            check_weights(w)?;
            if w.len() < n {
                return Err(Error::argument(format!("{} weights given for {n} rules", w.len())));
            }
            Ok(w[..n].iter().map(|&x| x as usize).collect())
        }
    }
}

/// Exhaustive search over all subsets with total weight at most `map_size`.
///
/// Ties on the objective go to the larger total fitness, then to the
/// lexicographically smallest sorted index list (a proper prefix sorts
/// first).
pub fn select_exact(rules: &[ScoredRule], map_size: usize, weights: Option<&[u32]>) -> Result<RuleSelection> {
    if map_size == 0 {
        return Err(Error::argument("map size M must be at least 1"));
    }
    if rules.len() > EXACT_LIMIT {
        return Err(Error::argument(format!(
            "exact selection handles at most {EXACT_LIMIT} rules, got {}; use dp mode",
            rules.len()
        )));
    }
    let weights = resolve_weights(weights, rules.len())?;
    let sim = SimilarityMatrix::from_rules(rules.iter().map(|r| &r.rule));

    let mut search = ExactSearch {
        sim: &sim,
        fitness: rules.iter().map(|r| r.fitness).collect(),
        weights,
        capacity: map_size,
        current: Vec::new(),
        best: Vec::new(),
        best_objective: 0.0,
        best_fitness: 0.0,
    };
    search.descend(0, 0, 0.0, 0.0);
    Ok(RuleSelection::from_indices(rules, &search.best, SelectionMode::Exact))
}

struct ExactSearch<'a> {
    sim: &'a SimilarityMatrix,
    fitness: Vec<f64>,
    weights: Vec<usize>,
    capacity: usize,
    current: Vec<usize>,
    best: Vec<usize>,
    best_objective: f64,
    best_fitness: f64,
}

impl ExactSearch<'_> {
    // Preorder visits subsets in lexicographic order, so keeping the first
    // of equal candidates implements the index tie-break.
    fn descend(&mut self, start: usize, weight: usize, objective: f64, fitness: f64) {
        let better = objective > self.best_objective + TIE_EPS
            || (objective >= self.best_objective - TIE_EPS && fitness > self.best_fitness + TIE_EPS);
        if better {
            self.best.clone_from(&self.current);
            self.best_objective = objective;
            self.best_fitness = fitness;
        }
        for j in start..self.fitness.len() {
            let w = weight + self.weights[j];
            if w > self.capacity {
                continue;
            }
            let gain: f64 = self.current.iter().map(|&i| self.sim.get(i, j)).sum();
            self.current.push(j);
            self.descend(j + 1, w, objective + gain, fitness + self.fitness[j]);
            self.current.pop();
        }
    }
}

/// 0/1 knapsack over capacity `map_size` with profit `p_i = sum_j sim(R_i, R_j)`
/// (diagonal included). Reconstruction prefers lower indices on equal table
/// values; the reported objective is the true pairwise sum of the chosen set.
pub fn select_dp(rules: &[ScoredRule], map_size: usize, weights: Option<&[u32]>) -> Result<RuleSelection> {
    if map_size == 0 {
        return Err(Error::argument("map size M must be at least 1"));
    }
    let weights = resolve_weights(weights, rules.len())?;
    let sim = SimilarityMatrix::from_rules(rules.iter().map(|r| &r.rule));
    let profit: Vec<f64> = (0..rules.len()).map(|i| sim.row(i).iter().sum()).collect();

    let n = rules.len();
    let capacity = map_size.min(weights.iter().sum());
    let width = capacity + 1;
    let mut table = vec![0.0f64; (n + 1) * width];
    for i in 1..=n {
        let (w, p) = (weights[i - 1], profit[i - 1]);
        for c in 0..=capacity {
            let skip = table[(i - 1) * width + c];
            let take = if w <= c { table[(i - 1) * width + c - w] + p } else { f64::NEG_INFINITY };
            table[i * width + c] = skip.max(take);
        }
    }

    let mut chosen = Vec::new();
    let mut c = capacity;
    for i in (1..=n).rev() {
        if table[i * width + c] > table[(i - 1) * width + c] + TIE_EPS {
            chosen.push(i - 1);
            c -= weights[i - 1];
        }
    }
    chosen.reverse();
    Ok(RuleSelection::from_indices(rules, &chosen, SelectionMode::Dp))
}

/// Ranks the archive, keeps the best `n_tilde` rules with positive fitness,
/// and runs the configured solver.
///
/// Zero-fitness rules never occur in the data and cannot be drawn as flows,
/// so they are not candidates.
pub fn select(archive: &RuleArchive, params: &SelectionParams) -> Result<RuleSelection> {
    params.validate()?;
    let mut candidates = top_n(archive, usize::MAX)?;
    candidates.retain(|r| r.fitness > 0.0);
    if candidates.is_empty() {
        return Err(Error::argument(format!(
            "archive {:?} has no rule with positive fitness",
            archive.label()
        )));
    }
    candidates.truncate(params.n_tilde);
    let weights = params.weights.as_deref();
    match params.mode {
        SelectionMode::Exact => select_exact(&candidates, params.map_size, weights),
        SelectionMode::Dp => select_dp(&candidates, params.map_size, weights),
        SelectionMode::Auto if candidates.len() <= EXACT_LIMIT => select_exact(&candidates, params.map_size, weights),
        SelectionMode::Auto => select_dp(&candidates[..EXACT_LIMIT], params.map_size, weights),
    }
}

/// A selection as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRecord {
    pub period: String,
    pub rules: Vec<AssociationRule>,
    /// Per-rule fitness, parallel to `rules`. Older files may lack it.
    pub fitness: Option<Vec<f64>>,
    pub objective: f64,
    pub total_fitness: f64,
    pub mode: SelectionMode,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SelectionFile {
    period: String,
    rules: Vec<String>,
    objective: f64,
    total_fitness: f64,
    mode: SelectionMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fitness: Option<Vec<f64>>,
}

pub fn selection_to_json(period: &str, selection: &RuleSelection, catalog: &FeatureCatalog) -> String {
    let file = SelectionFile {
        period: period.to_owned(),
        rules: selection.chosen.iter().map(|r| r.rule.format(catalog)).collect(),
        objective: selection.objective,
        total_fitness: selection.total_fitness,
        mode: selection.mode,
        fitness: Some(selection.chosen.iter().map(|r| r.fitness).collect()),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("selection serializes");
    out.push('\n');
    out
}

pub fn selection_from_json(bytes: &[u8], catalog: &FeatureCatalog) -> Result<SelectionRecord> {
    let file: SelectionFile = serde_json::from_slice(bytes)?;
    if file.mode == SelectionMode::Auto {
        return Err(Error::schema("selection mode must be \"exact\" or \"dp\""));
    }
    if let Some(f) = &file.fitness {
        if f.len() != file.rules.len() {
            return Err(Error::schema(format!(
                "{} fitness values for {} rules",
                f.len(),
                file.rules.len()
            )));
        }
        if let Some(bad) = f.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::schema(format!("fitness {bad} outside [0, 1]")));
        }
    }
    let rules = file
        .rules
        .iter()
        .map(|text| AssociationRule::parse(text, catalog))
        .collect::<Result<Vec<_>>>()?;
    Ok(SelectionRecord {
        period: file.period,
        rules,
        fitness: file.fitness,
        objective: file.objective,
        total_fitness: file.total_fitness,
        mode: file.mode,
    })
}

/// Re-ranks loose rules the way an archive would (used when rules come
/// from a file rather than a mining run).
pub fn rank_rules(rules: Vec<ScoredRule>, catalog: &FeatureCatalog) -> Vec<ScoredRule> {
    rank(rules, catalog)
}
