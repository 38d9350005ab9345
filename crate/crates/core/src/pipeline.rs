//! End-to-end orchestration: load, partition, mine, select, export.
//!
//! The pipeline is also exposed stage by stage. Each stage reads the files
//! written by the previous one, so `mine`, `select` and `sankey` run in
//! sequence produce the same bytes as one `pipeline` run.
//!
//! Period `p` (0-based) and run `r` use seed `seed + p * 10000 + r`.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::dataset::{load_transactions, partition, FeatureCatalog, PartitionSpec, Timestamp, TransactionDB};
use crate::de::{run_batch, DeParams, RuleArchive};
use crate::error::Error;
use crate::rule::{archive_from_json, archive_to_json, filter_thresholds, AssociationRule, FitnessWeights, ScoredRule};
use crate::sankey::{emit_json, emit_report, SankeyGraph};
use crate::selector::{select, selection_from_json, selection_to_json, RuleSelection, SelectionMode, SelectionParams};

/// Seed stride between periods.
pub const PERIOD_SEED_STRIDE: u64 = 10_000;

pub const REPORT_FILE: &str = "report.html";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Partition,
    Mine,
    Select,
    Sankey,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Partition => "partition",
            Stage::Mine => "mine",
            Stage::Select => "select",
            Stage::Sankey => "sankey",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

pub type Result<T> = std::result::Result<T, PipelineError>;

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T>;
}

impl<T, E: Into<Error>> AtStage<T> for std::result::Result<T, E> {
    fn at(self, stage: Stage) -> Result<T> {
        self.map_err(|e| PipelineError {
            stage,
            source: e.into(),
        })
    }
}

/// Every configurable value, all optional. Used for both the key-value
/// config file and command-line flags; [`Settings::overlay`] gives flags
/// precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    pub input: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub periods: Option<usize>,
    pub boundaries: Option<Vec<String>>,
    pub np: Option<usize>,
    pub f: Option<f64>,
    pub cr: Option<f64>,
    pub max_evals: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub smin: Option<f64>,
    pub cmin: Option<f64>,
    pub map_size: Option<usize>,
    pub top_n: Option<usize>,
    pub mode: Option<String>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Settings {
    /// Parses a TOML-style `key = value` file using the flag names as keys.
    pub fn from_toml(text: &str) -> std::result::Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::schema(format!("config file: {e}")))
    }

    /// Values from `top` win over values from `self`.
    pub fn overlay(self, top: Settings) -> Settings {
        Settings {
            input: top.input.or(self.input),
            catalog: top.catalog.or(self.catalog),
            periods: top.periods.or(self.periods),
            boundaries: top.boundaries.or(self.boundaries),
            np: top.np.or(self.np),
            f: top.f.or(self.f),
            cr: top.cr.or(self.cr),
            max_evals: top.max_evals.or(self.max_evals),
            alpha: top.alpha.or(self.alpha),
            beta: top.beta.or(self.beta),
            smin: top.smin.or(self.smin),
            cmin: top.cmin.or(self.cmin),
            map_size: top.map_size.or(self.map_size),
            top_n: top.top_n.or(self.top_n),
            mode: top.mode.or(self.mode),
            runs: top.runs.or(self.runs),
            seed: top.seed.or(self.seed),
            out: top.out.or(self.out),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub catalog: Option<PathBuf>,
    pub partition: PartitionSpec,
    /// DE settings; the seed field is ignored in favour of derived seeds.
    pub de: DeParams,
    pub s_min: f64,
    pub c_min: f64,
    pub selection: SelectionParams,
    pub runs: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl PipelineConfig {
    /// Defaults: K=4, F=0.5, CR=0.9, NP=100, max_evals=10000, alpha=beta=1,
    /// s_min=c_min=0, M=4, n_tilde=100, 25 runs, seed 42.
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            input: input.into(),
            catalog: None,
            partition: PartitionSpec::EqualCount(4),
            de: DeParams::default(),
            s_min: 0.0,
            c_min: 0.0,
            selection: SelectionParams::default(),
            runs: 25,
            seed: 42,
            out: out.into(),
        }
    }

    pub fn from_settings(s: Settings) -> std::result::Result<Self, Error> {
        let input = s.input.ok_or_else(|| Error::argument("missing input CSV (--input)"))?;
        let out = s.out.ok_or_else(|| Error::argument("missing output directory (--out)"))?;
        let mut cfg = PipelineConfig::new(input, out);
        cfg.catalog = s.catalog;
        cfg.partition = match (s.periods, s.boundaries) {
            (Some(_), Some(_)) => return Err(Error::argument("--periods and --boundaries are exclusive")),
            (Some(k), None) => PartitionSpec::EqualCount(k),
            (None, Some(b)) => PartitionSpec::Boundaries(
                b.iter()
                    .map(|t| t.parse::<Timestamp>())
                    .collect::<std::result::Result<_, _>>()?,
            ),
            (None, None) => cfg.partition,
        };
        let d = &mut cfg.de;
        d.population_size = s.np.unwrap_or(d.population_size);
        d.scale_factor = s.f.unwrap_or(d.scale_factor);
        d.crossover_rate = s.cr.unwrap_or(d.crossover_rate);
        d.max_evals = s.max_evals.unwrap_or(d.max_evals);
        d.weights = FitnessWeights::new(
            s.alpha.unwrap_or(d.weights.alpha()),
            s.beta.unwrap_or(d.weights.beta()),
        )?;
        cfg.s_min = s.smin.unwrap_or(cfg.s_min);
        cfg.c_min = s.cmin.unwrap_or(cfg.c_min);
        cfg.selection.map_size = s.map_size.unwrap_or(cfg.selection.map_size);
        cfg.selection.n_tilde = s.top_n.unwrap_or(cfg.selection.n_tilde);
        if let Some(mode) = s.mode {
            cfg.selection.mode = mode.parse()?;
        }
        cfg.runs = s.runs.unwrap_or(cfg.runs);
        cfg.seed = s.seed.unwrap_or(cfg.seed);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> std::result::Result<(), Error> {
        if self.partition.period_count() == 0 {
            return Err(Error::argument("period count must be at least 1"));
        }
        self.de.validate()?;
        for (name, v) in [("smin", self.s_min), ("cmin", self.c_min)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::argument(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        self.selection.validate()?;
        if self.runs == 0 {
            return Err(Error::argument("runs must be at least 1"));
        }
        Ok(())
    }

    pub fn period_seed(&self, period: usize) -> u64 {
        self.seed.wrapping_add((period as u64).wrapping_mul(PERIOD_SEED_STRIDE))
    }
}

pub fn archive_file(label: &str) -> String {
    format!("archive-{label}.json")
}

pub fn selection_file(label: &str) -> String {
    format!("selection-{label}.json")
}

pub fn sankey_file(label: &str) -> String {
    format!("sankey-{label}.json")
}

/// Catalog from a catalog file, or inferred from the CSV when none is given.
pub fn resolve_catalog(input: Option<&Path>, catalog: Option<&Path>) -> Result<FeatureCatalog> {
    match (catalog, input) {
        (Some(path), _) => FeatureCatalog::from_json(&fs::read(path).at(Stage::Load)?).at(Stage::Load),
        (None, Some(path)) => {
            let db = load_transactions(fs::File::open(path).at(Stage::Load)?, None).at(Stage::Load)?;
            Ok(db.catalog().clone())
        }
        (None, None) => Err(Error::argument("need --catalog or --input to resolve attribute names")).at(Stage::Config),
    }
}

pub fn load_input(input: &Path, catalog: Option<&Path>) -> Result<TransactionDB> {
    let catalog = catalog
        .map(|p| fs::read(p).at(Stage::Load).and_then(|b| FeatureCatalog::from_json(&b).at(Stage::Load)))
        .transpose()?;
    load_transactions(fs::File::open(input).at(Stage::Load)?, catalog.as_ref()).at(Stage::Load)
}

/// One period's mining outcome: threshold-filtered rules in rank order.
#[derive(Debug, Clone)]
pub struct MinedPeriod {
    pub label: String,
    pub rules: Vec<ScoredRule>,
    /// Archive size before threshold filtering.
    pub archive_size: usize,
    pub best_fitness: f64,
}

/// Partitions `db` and mines every period with `runs` independent DE runs.
pub fn mine_periods(db: &TransactionDB, cfg: &PipelineConfig) -> Result<Vec<MinedPeriod>> {
    let parts = partition(db, &cfg.partition).at(Stage::Partition)?;
    parts
        .par_iter()
        .enumerate()
        .map(|(p, part)| {
            let archive = run_batch(part, &cfg.de, cfg.runs, cfg.period_seed(p)).at(Stage::Mine)?;
            let ranked = archive.ranked();
            Ok(MinedPeriod {
                label: part.label().to_owned(),
                archive_size: ranked.len(),
                best_fitness: archive.best_fitness(),
                rules: filter_thresholds(ranked, cfg.s_min, cfg.c_min),
            })
        })
        .collect()
}

pub fn select_period(
    label: &str,
    rules: &[ScoredRule],
    catalog: &FeatureCatalog,
    params: &SelectionParams,
) -> Result<RuleSelection> {
    let mut archive = RuleArchive::new(label, std::sync::Arc::new(catalog.clone()));
    for r in rules {
        archive.offer(r.clone());
    }
    select(&archive, params).at(Stage::Select)
}

/// Everything a full run produces, before it is written out.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub catalog: FeatureCatalog,
    pub periods: Vec<MinedPeriod>,
    pub selections: Vec<RuleSelection>,
    pub graphs: Vec<(String, SankeyGraph)>,
}

pub fn compute_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate().at(Stage::Config)?;
    let db = load_input(&cfg.input, cfg.catalog.as_deref())?;
    let catalog = db.catalog().clone();
    let periods = mine_periods(&db, cfg)?;
    let selections = periods
        .iter()
        .map(|p| select_period(&p.label, &p.rules, &catalog, &cfg.selection))
        .collect::<Result<Vec<_>>>()?;
    let graphs = periods
        .iter()
        .zip(&selections)
        .map(|(p, s)| Ok((p.label.clone(), crate::sankey::build_flow(s, &catalog).at(Stage::Sankey)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PipelineOutput {
        catalog,
        periods,
        selections,
        graphs,
    })
}

/// Files in write order: per-period archive, selection and sankey JSON,
/// then the report.
pub fn pipeline_artifacts(output: &PipelineOutput) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for p in &output.periods {
        files.push((archive_file(&p.label), archive_to_json(&p.rules, &output.catalog).into_bytes()));
    }
    for (p, s) in output.periods.iter().zip(&output.selections) {
        files.push((selection_file(&p.label), selection_to_json(&p.label, s, &output.catalog).into_bytes()));
    }
    for (label, g) in &output.graphs {
        files.push((sankey_file(label), emit_json(g)));
    }
    files.push((REPORT_FILE.to_owned(), emit_report(&output.graphs).at(Stage::Sankey)?));
    Ok(files)
}

pub fn write_files(out: &Path, files: &[(String, Vec<u8>)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).at(Stage::Write)?;
    files
        .iter()
        .map(|(name, bytes)| {
            let path = out.join(name);
            fs::write(&path, bytes).at(Stage::Write)?;
            Ok(path)
        })
        .collect()
}

/// Runs every stage and writes all artifacts into `cfg.out`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let output = compute_pipeline(cfg)?;
    write_files(&cfg.out, &pipeline_artifacts(&output)?)?;
    Ok(output)
}

/// `mine` stage: writes `archive-<label>.json` per period.
pub fn run_mine_stage(cfg: &PipelineConfig) -> Result<Vec<MinedPeriod>> {
    cfg.validate().at(Stage::Config)?;
    let db = load_input(&cfg.input, cfg.catalog.as_deref())?;
    let periods = mine_periods(&db, cfg)?;
    let files: Vec<(String, Vec<u8>)> = periods
        .iter()
        .map(|p| (archive_file(&p.label), archive_to_json(&p.rules, db.catalog()).into_bytes()))
        .collect();
    write_files(&cfg.out, &files)?;
    Ok(periods)
}

/// Label encoded in an artifact file name such as `archive-period-2.json`.
pub fn artifact_label(path: &Path, prefix: &str) -> Option<String> {
    let name = path.file_name()?.to_str()?;
    let label = name.strip_prefix(prefix)?.strip_prefix('-')?.strip_suffix(".json")?;
    (!label.is_empty()).then(|| label.to_owned())
}

/// Files `<prefix>-<label>.json` in `dir`, ordered by the number at the end
/// of the label (so `period-10` follows `period-9`), then by name.
pub fn discover_artifacts(dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let mut found: Vec<(Option<u64>, String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).at(Stage::Load)? {
        let path = entry.at(Stage::Load)?.path();
        if let Some(label) = artifact_label(&path, prefix) {
            let digits: String = label.chars().rev().take_while(char::is_ascii_digit).collect();
            let number = digits.chars().rev().collect::<String>().parse().ok();
            found.push((number, label, path));
        }
    }
    found.sort();
    Ok(found.into_iter().map(|(_, _, p)| p).collect())
}

fn read_labelled(path: &Path, prefix: &str) -> Result<(String, Vec<u8>)> {
    let label = artifact_label(path, prefix)
        .ok_or_else(|| Error::schema(format!("{} is not named {prefix}-<label>.json", path.display())))
        .at(Stage::Load)?;
    let bytes = fs::read(path).at(Stage::Load)?;
    Ok((label, bytes))
}

/// `select` stage: reads archive files and writes `selection-<label>.json`.
pub fn run_select_stage(
    catalog: &FeatureCatalog,
    archives: &[PathBuf],
    params: &SelectionParams,
    out: &Path,
) -> Result<Vec<(String, RuleSelection)>> {
    params.validate().at(Stage::Config)?;
    if archives.is_empty() {
        return Err(Error::argument("no archive files to select from")).at(Stage::Load);
    }
    let mut selections = Vec::new();
    for path in archives {
        let (label, bytes) = read_labelled(path, "archive")?;
        let rules = archive_from_json(&bytes, catalog).at(Stage::Load)?;
        let sel = select_period(&label, &rules, catalog, params)?;
        selections.push((label, sel));
    }
    let files: Vec<(String, Vec<u8>)> = selections
        .iter()
        .map(|(label, s)| (selection_file(label), selection_to_json(label, s, catalog).into_bytes()))
        .collect();
    write_files(out, &files)?;
    Ok(selections)
}

/// Looks up rule fitness in the `archive-<label>.json` next to a selection
/// file that carries no fitness values.
fn fitness_from_archive(dir: &Path, label: &str, rules: &[AssociationRule], catalog: &FeatureCatalog) -> Result<Vec<f64>> {
    let path = dir.join(archive_file(label));
    let bytes = fs::read(&path)
        .map_err(|e| Error::schema(format!("selection has no fitness values and {} is unreadable: {e}", path.display())))
        .at(Stage::Load)?;
    let archive = archive_from_json(&bytes, catalog).at(Stage::Load)?;
    rules
        .iter()
        .map(|r| {
            let key = r.key();
            archive
                .iter()
                .find(|a| a.rule.key() == key)
                .map(|a| a.fitness)
                .ok_or_else(|| Error::schema(format!("rule {} not found in {}", r.format(catalog), path.display())))
                .at(Stage::Load)
        })
        .collect()
}

/// `sankey` stage: reads selection files, writes `sankey-<label>.json` for
/// each and one report covering all of them in order.
pub fn run_sankey_stage(catalog: &FeatureCatalog, selections: &[PathBuf], out: &Path) -> Result<Vec<(String, SankeyGraph)>> {
    if selections.is_empty() {
        return Err(Error::argument("no selection files to draw")).at(Stage::Load);
    }
    let mut graphs = Vec::new();
    for path in selections {
        let (label, bytes) = read_labelled(path, "selection")?;
        let record = selection_from_json(&bytes, catalog).at(Stage::Load)?;
        let fitness = match record.fitness {
            Some(f) => f,
            None => {
                let dir = path.parent().unwrap_or(Path::new("."));
                fitness_from_archive(dir, &label, &record.rules, catalog)?
            }
        };
        let graph = SankeyGraph::from_rules(record.rules.iter().zip(fitness), catalog).at(Stage::Sankey)?;
        graphs.push((label, graph));
    }
    let mut files: Vec<(String, Vec<u8>)> = graphs.iter().map(|(l, g)| (sankey_file(l), emit_json(g))).collect();
    files.push((REPORT_FILE.to_owned(), emit_report(&graphs).at(Stage::Sankey)?));
    write_files(out, &files)?;
    Ok(graphs)
}

fn fmt_ratio(v: f64) -> String {
    format!("{v:.4}")
}

/// Per-period overview followed by the selected rules, one row per rule.
pub fn summary_table(periods: &[MinedPeriod], selections: &[RuleSelection], catalog: &FeatureCatalog) -> String {
    let mut out = String::new();
    writeln!(out, "{:<6} {:<12} {:>8} {:>8} {:>6} {:>10}", "Part", "Period", "Archive", "Best", "Mode", "Objective").unwrap();
    for (i, (p, s)) in periods.iter().zip(selections).enumerate() {
        let mode = match s.mode {
            SelectionMode::Dp => "dp",
            _ => "exact",
        };
        writeln!(
            out,
            "{:<6} {:<12} {:>8} {:>8} {:>6} {:>10}",
            i + 1,
            p.label,
            p.archive_size,
            fmt_ratio(p.best_fitness),
            mode,
            fmt_ratio(s.objective)
        )
        .unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "{:<6} {:<9} {:<8} Association rule", "Part", "Rule nr.", "Fitness").unwrap();
    for (i, s) in selections.iter().enumerate() {
        for (j, r) in s.chosen.iter().enumerate() {
            writeln!(out, "{:<6} {:<9} {:<8} {}", i + 1, j + 1, fmt_ratio(r.fitness), r.rule.format(catalog)).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let cfg = PipelineConfig::new("in.csv", "out");
        assert_eq!(cfg.partition, PartitionSpec::EqualCount(4));
        assert_eq!(
            (cfg.de.scale_factor, cfg.de.crossover_rate, cfg.de.population_size, cfg.de.max_evals),
            (0.5, 0.9, 100, 10_000)
        );
        assert_eq!((cfg.de.weights.alpha(), cfg.de.weights.beta()), (1.0, 1.0));
        assert_eq!((cfg.selection.map_size, cfg.selection.n_tilde), (4, 100));
        assert_eq!((cfg.runs, cfg.seed, cfg.s_min, cfg.c_min), (25, 42, 0.0, 0.0));
    }

    #[test]
    fn flags_override_file() {
        let file = Settings::from_toml("input = \"a.csv\"\nout = \"o\"\nnp = 20\nseed = 7\nmode = \"dp\"\n").unwrap();
        let flags = Settings {
            seed: Some(9),
            ..Settings::default()
        };
        let cfg = PipelineConfig::from_settings(file.overlay(flags)).unwrap();
        assert_eq!(cfg.de.population_size, 20);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.selection.mode, SelectionMode::Dp);
    }

    #[test]
    fn rejects_bad_settings() {
        let base = || Settings {
            input: Some("a.csv".into()),
            out: Some("o".into()),
            ..Settings::default()
        };
        assert!(PipelineConfig::from_settings(base()).is_ok());
        for bad in [
            Settings { f: Some(1.5), ..base() },
            Settings { cr: Some(-0.1), ..base() },
            Settings { np: Some(3), ..base() },
            Settings { smin: Some(2.0), ..base() },
            Settings { map_size: Some(0), ..base() },
            Settings { runs: Some(0), ..base() },
            Settings { periods: Some(0), ..base() },
            Settings { alpha: Some(0.0), beta: Some(0.0), ..base() },
            Settings { mode: Some("greedy".into()), ..base() },
            Settings { periods: Some(2), boundaries: Some(vec!["3".into()]), ..base() },
            Settings { boundaries: Some(vec!["yesterday".into()]), ..base() },
            Settings { input: None, ..base() },
        ] {
            assert!(PipelineConfig::from_settings(bad.clone()).is_err(), "{bad:?}");
        }
        assert!(Settings::from_toml("unknown = 1").is_err());
    }

    #[test]
    fn derived_seeds() {
        let cfg = PipelineConfig::new("a", "b");
        assert_eq!(cfg.period_seed(0), 42);
        assert_eq!(cfg.period_seed(3), 30_042);
    }

    #[test]
    fn artifact_labels() {
        assert_eq!(artifact_label(Path::new("x/archive-period-2.json"), "archive").as_deref(), Some("period-2"));
        assert_eq!(artifact_label(Path::new("archive-.json"), "archive"), None);
        assert_eq!(artifact_label(Path::new("selection-p.json"), "archive"), None);
    }

    #[test]
    fn discovery_sorts_numerically() {
        let dir = tempfile::tempdir().unwrap();
        for i in [10, 2, 1] {
            fs::write(dir.path().join(archive_file(&format!("period-{i}"))), "[]").unwrap();
        }
        fs::write(dir.path().join("report.html"), "").unwrap();
        let found = discover_artifacts(dir.path(), "archive").unwrap();
        let names: Vec<_> = found.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_owned()).collect();
        assert_eq!(names, ["archive-period-1.json", "archive-period-2.json", "archive-period-10.json"]);
    }
}
