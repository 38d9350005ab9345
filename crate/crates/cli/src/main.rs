use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use armflow::pipeline::{
    discover_artifacts, resolve_catalog, run_mine_stage, run_pipeline, run_sankey_stage, run_select_stage, summary_table,
    PipelineConfig, PipelineError, Settings, Stage,
};
use armflow::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "armflow", version, about = "Mine, select and visualise association rules per time period")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage and write archives, selections, Sankey JSON and report.html.
    Pipeline(Flags),
    /// Partition the input and write one rule archive per period.
    Mine(Flags),
    /// Pick the most similar rules from each archive.
    Select(StageFlags),
    /// Build Sankey graphs and report.html from selection files.
    Sankey(StageFlags),
}

#[derive(Args, Clone, Default)]
struct Flags {
    /// Transaction CSV (optional leading `timestamp` column).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Feature catalog JSON; inferred from the input when omitted.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Number of equal-count periods.
    #[arg(long)]
    periods: Option<usize>,
    /// Comma-separated period boundaries (integers or YYYY-MM-DD).
    #[arg(long, value_delimiter = ',')]
    boundaries: Option<Vec<String>>,
    #[arg(long)]
    np: Option<usize>,
    #[arg(long)]
    f: Option<f64>,
    #[arg(long)]
    cr: Option<f64>,
    #[arg(long)]
    max_evals: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    smin: Option<f64>,
    #[arg(long)]
    cmin: Option<f64>,
    /// Rules per map (M).
    #[arg(long)]
    map_size: Option<usize>,
    /// Candidate pool size for selection.
    #[arg(long)]
    top_n: Option<usize>,
    /// auto, exact or dp.
    #[arg(long)]
    mode: Option<String>,
    /// Independent DE runs per period.
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Key-value config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct StageFlags {
    #[command(flatten)]
    flags: Flags,
    /// Directory holding the previous stage's files (defaults to --out).
    #[arg(long)]
    from: Option<PathBuf>,
    /// Explicit input files; otherwise every matching file in --from.
    files: Vec<PathBuf>,
}

impl Flags {
    fn settings(self) -> Result<Settings, PipelineError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| at(Stage::Config, e.into()))?;
                Settings::from_toml(&text).map_err(|e| at(Stage::Config, e))?
            }
            None => Settings::default(),
        };
        let flags = Settings {
            input: self.input,
            catalog: self.catalog,
            periods: self.periods,
            boundaries: self.boundaries,
            np: self.np,
            f: self.f,
            cr: self.cr,
            max_evals: self.max_evals,
            alpha: self.alpha,
            beta: self.beta,
            smin: self.smin,
            cmin: self.cmin,
            map_size: self.map_size,
            top_n: self.top_n,
            mode: self.mode,
            runs: self.runs,
            seed: self.seed,
            out: self.out,
        };
        Ok(file.overlay(flags))
    }
}

fn at(stage: Stage, source: Error) -> PipelineError {
    PipelineError { stage, source }
}

fn config(flags: Flags) -> Result<PipelineConfig, PipelineError> {
    PipelineConfig::from_settings(flags.settings()?).map_err(|e| at(Stage::Config, e))
}

/// Settings for the select and sankey stages, which need no input CSV.
fn stage_settings(sf: StageFlags, prefix: &str) -> Result<(Settings, PathBuf, Vec<PathBuf>), PipelineError> {
    let s = sf.flags.settings()?;
    let out = s.out.clone().ok_or_else(|| at(Stage::Config, Error::Argument("missing output directory (--out)".into())))?;
    let files = if sf.files.is_empty() {
        discover_artifacts(sf.from.as_deref().unwrap_or(&out), prefix)?
    } else {
        sf.files
    };
    Ok((s, out, files))
}

fn selection_params(s: &Settings) -> Result<armflow::SelectionParams, PipelineError> {
    let mut p = armflow::SelectionParams::default();
    p.map_size = s.map_size.unwrap_or(p.map_size);
    p.n_tilde = s.top_n.unwrap_or(p.n_tilde);
    if let Some(mode) = &s.mode {
        p.mode = mode.parse().map_err(|e| at(Stage::Config, e))?;
    }
    p.validate().map_err(|e| at(Stage::Config, e))?;
    Ok(p)
}

fn print_written(out: &Path, names: impl IntoIterator<Item = String>) {
    for name in names {
        println!("wrote {}", out.join(name).display());
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Pipeline(flags) => {
            let cfg = config(flags)?;
            let output = run_pipeline(&cfg)?;
            print!("{}", summary_table(&output.periods, &output.selections, &output.catalog));
            println!("\nreport: {}", cfg.out.join(armflow::pipeline::REPORT_FILE).display());
        }
        Command::Mine(flags) => {
            let cfg = config(flags)?;
            let periods = run_mine_stage(&cfg)?;
            for p in &periods {
                println!(
                    "{}: {} rules in archive, {} kept, best fitness {:.4}",
                    p.label,
                    p.archive_size,
                    p.rules.len(),
                    p.best_fitness
                );
            }
            print_written(&cfg.out, periods.iter().map(|p| armflow::pipeline::archive_file(&p.label)));
        }
        Command::Select(sf) => {
            let (s, out, files) = stage_settings(sf, "archive")?;
            let params = selection_params(&s)?;
            let catalog = resolve_catalog(s.input.as_deref(), s.catalog.as_deref())?;
            let selections = run_select_stage(&catalog, &files, &params, &out)?;
            for (label, sel) in &selections {
                println!("{label}: {} rules, objective {:.4}, mode {}", sel.chosen.len(), sel.objective, sel.mode);
                for (i, r) in sel.chosen.iter().enumerate() {
                    println!("  {}. {:.4}  {}", i + 1, r.fitness, r.rule.format(&catalog));
                }
            }
            print_written(&out, selections.iter().map(|(l, _)| armflow::pipeline::selection_file(l)));
        }
        Command::Sankey(sf) => {
            let (s, out, files) = stage_settings(sf, "selection")?;
            let catalog = resolve_catalog(s.input.as_deref(), s.catalog.as_deref())?;
            let graphs = run_sankey_stage(&catalog, &files, &out)?;
            print_written(
                &out,
                graphs
                    .iter()
                    .map(|(l, _)| armflow::pipeline::sankey_file(l))
                    .chain([armflow::pipeline::REPORT_FILE.to_owned()]),
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("armflow: {e}");
            ExitCode::FAILURE
        }
    }
}
