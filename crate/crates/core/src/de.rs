//! Differential Evolution (rand/1/bin) over rule genotypes.
//!
//! A genotype for a catalog of `d` features is a vector in `[0, 1]^(2d+1)`.
//! Position `2j` selects the attribute of feature `j` (or leaves the feature
//! out), position `2j+1` ranks feature `j` in the rule, and the last position
//! is the cut point between antecedent and consequent. See [`decode`].
//!
//! All randomness comes from [`DeRng`] (ChaCha8, seeded through
//! `SeedableRng::seed_from_u64`), so a run replays bit-exactly from its seed.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::distr::OpenClosed01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureCatalog, TransactionDB};
use crate::error::{Error, Result};
use crate::rule::{AssociationRule, FitnessWeights, Item, RuleKey, ScoredRule};

pub type DeRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> DeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point of the search space. Every component lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Genotype(Vec<f64>);

impl Genotype {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::argument(format!("genotype component {v} outside [0, 1]")));
        }
        Ok(Genotype(values))
    }

    /// Genotype length for a catalog of `d` features.
    pub fn length_for(d: usize) -> usize {
        2 * d + 1
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    /// Mutation scale factor `F`, in `[0.1, 1.0]`.
    pub scale_factor: f64,
    /// Binomial crossover rate `CR`, in `[0, 1]`.
    pub crossover_rate: f64,
    /// Population size `NP`, at least 4.
    pub population_size: usize,
    /// Total fitness evaluations, including the initial population.
    pub max_evals: usize,
    pub weights: FitnessWeights,
    pub seed: u64,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams {
            scale_factor: 0.5,
            crossover_rate: 0.9,
            population_size: 100,
            max_evals: 10_000,
            weights: FitnessWeights::default(),
            seed: 42,
        }
    }
}

impl DeParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.1..=1.0).contains(&self.scale_factor) {
            return Err(Error::argument(format!("F = {} is outside [0.1, 1.0]", self.scale_factor)));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::argument(format!("CR = {} is outside [0, 1]", self.crossover_rate)));
        }
        if self.population_size < 4 {
            return Err(Error::argument(format!("NP = {} is below 4", self.population_size)));
        }
        if self.max_evals < self.population_size {
            return Err(Error::argument(format!(
                "max_evals = {} is below NP = {}",
                self.max_evals, self.population_size
            )));
        }
        FitnessWeights::new(self.weights.alpha(), self.weights.beta())?;
        Ok(())
    }
}

/// `NP` genotypes drawn uniformly from `[0, 1)`.
pub fn init_population(params: &DeParams, d: usize, rng: &mut DeRng) -> Result<Vec<Genotype>> {
    if params.population_size < 4 {
        return Err(Error::argument(format!("NP = {} is below 4", params.population_size)));
    }
    if d < 2 {
        return Err(Error::argument(format!("need at least 2 features, got {d}")));
    }
    let len = Genotype::length_for(d);
    Ok((0..params.population_size)
        .map(|_| Genotype((0..len).map(|_| rng.random::<f64>()).collect()))
        .collect())
}

/// Three mutually distinct indices, all different from `target`.
fn pick_donors(np: usize, target: usize, rng: &mut DeRng) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        picked[k] = loop {
            let r = rng.random_range(0..np);
            if r != target && !picked[..k].contains(&r) {
                break r;
            }
        };
    }
    picked
}

/// `x_r0 + F * (x_r1 - x_r2)` with random distinct donors, clamped to `[0, 1]`.
pub fn mutate_rand1(population: &[Genotype], target: usize, scale_factor: f64, rng: &mut DeRng) -> Result<Genotype> {
    if population.len() < 4 {
        return Err(Error::precondition(format!(
            "rand/1 mutation needs at least 4 individuals, got {}",
            population.len()
        )));
    }
    let [r0, r1, r2] = pick_donors(population.len(), target, rng);
    Ok(difference_mutant(&population[r0], &population[r1], &population[r2], scale_factor))
}

/// The mutation arithmetic for fixed donors.
pub fn difference_mutant(base: &Genotype, plus: &Genotype, minus: &Genotype, scale_factor: f64) -> Genotype {
    Genotype(
        base.0
            .iter()
            .zip(&plus.0)
            .zip(&minus.0)
            .map(|((b, p), m)| (b + scale_factor * (p - m)).clamp(0.0, 1.0))
            .collect(),
    )
}

/// Binomial crossover. Position `j` comes from the mutant when
/// `rand_j <= CR` (with `rand_j` drawn from `(0, 1]`) or `j == j_rand`.
pub fn crossover_bin(target: &Genotype, mutant: &Genotype, crossover_rate: f64, rng: &mut DeRng) -> Result<Genotype> {
    if target.len() != mutant.len() {
        return Err(Error::argument(format!(
            "crossover of vectors with lengths {} and {}",
            target.len(),
            mutant.len()
        )));
    }
    let j_rand = rng.random_range(0..target.len());
    Ok(Genotype(
        (0..target.len())
            .map(|j| {
                let r: f64 = rng.sample(OpenClosed01);
                if r <= crossover_rate || j == j_rand {
                    mutant.0[j]
                } else {
                    target.0[j]
                }
            })
            .collect(),
    ))
}

/// Maps a genotype onto an association rule, or `None` when fewer than two
/// features are present.
///
/// 1. Feature `j` gets code `floor(g[2j] * (|Feat_j| + 1))`, capped at
///    `|Feat_j|`. Code 0 leaves the feature out; code `k` selects attribute
///    `k - 1`.
/// 2. Features are ordered by ascending `g[2j+1]`, ties by feature index.
/// 3. The cut point `floor(g[2d] * (d - 2)) + 1` is clamped to
///    `[1, p - 1]` for `p` present features; the first `Cp` present
///    features in order form the antecedent.
///
/// # Panics
///
/// If the genotype length is not `2d + 1` for the catalog.
pub fn decode(g: &Genotype, catalog: &FeatureCatalog) -> Option<AssociationRule> {
    let d = catalog.len();
    let x = &g.0;
    assert_eq!(x.len(), Genotype::length_for(d), "genotype length does not match catalog");

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| x[2 * a + 1].total_cmp(&x[2 * b + 1]).then(a.cmp(&b)));

    let present: Vec<Item> = order
        .into_iter()
        .filter_map(|j| {
            let arity = catalog.feature(j).arity();
            let code = ((x[2 * j] * (arity + 1) as f64).floor() as usize).min(arity);
            (code > 0).then(|| Item::new(j, code - 1))
        })
        .collect();

    let p = present.len();
    if p < 2 {
        return None;
    }
    let cut = ((x[2 * d] * (d - 2) as f64).floor() as usize + 1).clamp(1, p - 1);
    let mut antecedent = present;
    let consequent = antecedent.split_off(cut);
    Some(AssociationRule::new(antecedent, consequent).expect("decoded features are distinct"))
}

/// One-to-one survivor selection for a maximized fitness; ties go to the trial.
pub fn select_one_to_one(target_fitness: f64, trial_fitness: f64) -> bool {
    trial_fitness >= target_fitness
}

/// Every distinct valid rule met during a run, keyed by [`RuleKey`].
#[derive(Debug, Clone)]
pub struct RuleArchive {
    label: String,
    catalog: Arc<FeatureCatalog>,
    entries: BTreeMap<RuleKey, ScoredRule>,
}

impl RuleArchive {
    pub fn new(label: impl Into<String>, catalog: Arc<FeatureCatalog>) -> Self {
        RuleArchive {
            label: label.into(),
            catalog,
            entries: BTreeMap::new(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn catalog(&self) -> &FeatureCatalog {
        &self.catalog
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts the rule unless an entry with the same key and at least the
    /// same fitness exists. Returns whether the archive changed.
    pub fn offer(&mut self, scored: ScoredRule) -> bool {
        match self.entries.entry(scored.rule.key()) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(scored);
                true
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                if scored.fitness > o.get().fitness {
                    o.insert(scored);
                    true
                } else {
                    false
                }
            }
        }
    }

    pub fn get(&self, key: &RuleKey) -> Option<&ScoredRule> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ScoredRule> {
        self.entries.values()
    }

    /// Highest entry fitness; 0 for an empty archive.
    pub fn best_fitness(&self) -> f64 {
        self.entries.values().map(|r| r.fitness).fold(0.0, f64::max)
    }

    /// Entries by descending fitness, ties by canonical rule string.
    pub fn ranked(&self) -> Vec<ScoredRule> {
        rank(self.entries.values().cloned().collect(), &self.catalog)
    }
}

pub(crate) fn rank(rules: Vec<ScoredRule>, catalog: &FeatureCatalog) -> Vec<ScoredRule> {
    let mut keyed: Vec<(String, ScoredRule)> = rules
        .into_iter()
        .map(|r| (r.rule.canonical_string(catalog), r))
        .collect();
    keyed.sort_by(|(sa, a), (sb, b)| b.fitness.total_cmp(&a.fitness).then_with(|| sa.cmp(sb)));
    keyed.into_iter().map(|(_, r)| r).collect()
}

/// Decodes and scores `g`, offering any valid rule to `archive`. Invalid
/// genotypes score 0.
pub fn evaluate(g: &Genotype, db: &TransactionDB, weights: FitnessWeights, archive: &mut RuleArchive) -> Result<f64> {
    let Some(rule) = decode(g, db.catalog()) else {
        return Ok(0.0);
    };
    let scored = ScoredRule::evaluate(rule, db, weights)?;
    let fitness = scored.fitness;
    archive.offer(scored);
    Ok(fitness)
}

/// Step-wise DE run. Each [`Miner::step`] performs one synchronous
/// generation: all trials are built from the current population before any
/// replacement happens.
pub struct Miner<'a> {
    db: &'a TransactionDB,
    params: DeParams,
    rng: DeRng,
    population: Vec<Genotype>,
    fitness: Vec<f64>,
    evaluations: usize,
    generation: usize,
    archive: RuleArchive,
}

impl<'a> Miner<'a> {
    /// Creates and evaluates the initial population.
    pub fn new(db: &'a TransactionDB, params: DeParams) -> Result<Self> {
        params.validate()?;
        if db.is_empty() {
            return Err(Error::precondition(format!("period {:?} has no transactions", db.label())));
        }
        let mut rng = rng_from_seed(params.seed);
        let population = init_population(&params, db.catalog().len(), &mut rng)?;
        let mut archive = RuleArchive::new(db.label(), db.shared_catalog());
        let fitness = population
            .iter()
            .map(|g| evaluate(g, db, params.weights, &mut archive))
            .collect::<Result<Vec<_>>>()?;
        Ok(Miner {
            db,
            params,
            rng,
            evaluations: population.len(),
            population,
            fitness,
            generation: 0,
            archive,
        })
    }

    /// Runs one generation. Returns `false` without doing anything once the
    /// evaluation budget is spent. The last generation may be partial.
    pub fn step(&mut self) -> Result<bool> {
        if self.evaluations >= self.params.max_evals {
            return Ok(false);
        }
        let mut next = self.population.clone();
        let mut next_fitness = self.fitness.clone();
        for i in 0..self.population.len() {
            if self.evaluations >= self.params.max_evals {
                break;
            }
            let mutant = mutate_rand1(&self.population, i, self.params.scale_factor, &mut self.rng)?;
            let trial = crossover_bin(&self.population[i], &mutant, self.params.crossover_rate, &mut self.rng)?;
            let f = evaluate(&trial, self.db, self.params.weights, &mut self.archive)?;
            self.evaluations += 1;
            if select_one_to_one(self.fitness[i], f) {
                next[i] = trial;
                next_fitness[i] = f;
            }
        }
        self.population = next;
        self.fitness = next_fitness;
        self.generation += 1;
        Ok(true)
    }

    pub fn run(mut self) -> Result<RuleArchive> {
        while self.step()? {}
        Ok(self.archive)
    }

    pub fn population(&self) -> &[Genotype] {
        &self.population
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn archive(&self) -> &RuleArchive {
        &self.archive
    }
}

/// One DE run on `db` with `params.seed`.
pub fn mine(db: &TransactionDB, params: &DeParams) -> Result<RuleArchive> {
    Miner::new(db, *params)?.run()
}

/// `n_runs` independent runs seeded `base_seed + r`; returns the archive of
/// the run with the highest best fitness (earliest run on ties).
pub fn run_batch(db: &TransactionDB, params: &DeParams, n_runs: usize, base_seed: u64) -> Result<RuleArchive> {
    if n_runs == 0 {
        return Err(Error::argument("n_runs must be at least 1"));
    }
    let archives = (0..n_runs)
        .into_par_iter()
        .map(|r| {
            let params = DeParams {
                seed: base_seed.wrapping_add(r as u64),
                ..*params
            };
            mine(db, &params)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = None::<RuleArchive>;
    for archive in archives {
        if best.as_ref().is_none_or(|b| archive.best_fitness() > b.best_fitness()) {
            best = Some(archive);
        }
    }
    Ok(best.expect("at least one run"))
}
