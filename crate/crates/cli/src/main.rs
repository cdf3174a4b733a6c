use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ocsvm_rules::ocsvm::Label;
use ocsvm_rules::rules::BoxMode;
use ocsvm_rules_cli::artifacts::{self, Timings};
use ocsvm_rules_cli::config::{RunConfig, Targets};
use ocsvm_rules_cli::error::{exit, CliError, Result};
use ocsvm_rules_cli::plot::{parse_state, render_svg, PlotInput};
use ocsvm_rules_cli::{pipeline, report};

#[derive(Parser)]
#[command(name = "ocsvm-rules", version, about = "One-class SVM anomaly detection with hypercube rule extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the model and extract rules for the requested classes.
    Extract(ExtractArgs),
    /// Fit an overfit decision tree on the model's labels and count its rules.
    Surrogate(RunArgs),
    /// Collect rule counts of several runs into one table.
    Report(ReportArgs),
    /// Draw data and rules of a two-feature run as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` of the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write wall-clock timings to timings.json.
    #[arg(long)]
    with_timings: bool,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum)]
    target: Option<Targets>,
    #[arg(long)]
    discard_factor: Option<f64>,
    #[arg(long, value_enum)]
    box_mode: Option<BoxModeArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoxModeArg {
    All,
    Farthest,
}

#[derive(Args)]
struct ReportArgs {
    /// One config per dataset; rows follow the order given.
    #[arg(long = "config", required = true)]
    configs: Vec<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Run extract and surrogate for every config first.
    #[arg(long)]
    run: bool,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    config: PathBuf,
    /// Directory holding the run's model and rule files; defaults to the
    /// config's output directory. plot.svg is written there too.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which rules to draw.
    #[arg(long, value_enum, default_value = "na")]
    target: PlotTarget,
    /// Rules file to draw instead of the run's own.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Categorical state to draw, as col=value[,col=value].
    #[arg(long)]
    state: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotTarget {
    Na,
    A,
}

fn load_config(path: &Path) -> Result<RunConfig> {
    RunConfig::load(path)
}

fn out_dir(cfg: &RunConfig, out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| cfg.output_path())
}

fn update_timings(dir: &Path, f: impl FnOnce(&mut Timings)) -> Result<()> {
    let path = dir.join(artifacts::TIMINGS_FILE);
    let mut t = artifacts::read_json(&path).unwrap_or(Timings {
        fit_seconds: 0.0,
        extract_seconds: 0.0,
        surrogate_seconds: None,
    });
    f(&mut t);
    artifacts::write_json(dir, artifacts::TIMINGS_FILE, &t)?;
    Ok(())
}

fn extract(cfg: &RunConfig, targets: Targets, out: &Path, with_timings: bool) -> Result<()> {
    let outcome = pipeline::run_extract(cfg, targets, out)?;
    for r in &outcome.rules {
        let s = r.summary;
        println!(
            "{}: {} rules, {} discarded clusters, coverage {:.2}% of {} rows",
            r.rule_set.label,
            r.rule_set.len(),
            r.rule_set.discarded_clusters.len(),
            s.coverage_percent(),
            s.target_rows
        );
    }
    if with_timings {
        update_timings(out, |t| {
            t.fit_seconds = outcome.timings.fit_seconds;
            t.extract_seconds = outcome.timings.extract_seconds;
        })?;
    }
    Ok(())
}

fn surrogate(cfg: &RunConfig, out: &Path, with_timings: bool) -> Result<()> {
    let outcome = pipeline::run_surrogate(cfg, out)?;
    print!("{}", outcome.summary_text());
    if with_timings {
        update_timings(out, |t| t.surrogate_seconds = Some(outcome.seconds))?;
    }
    Ok(())
}

fn plot(args: &PlotArgs) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let dir = out_dir(&cfg, &args.out);
    let model = artifacts::read_model(&dir.join(artifacts::MODEL_FILE))?;
    let label = match args.target {
        PlotTarget::Na => Label::NonAnomalous,
        PlotTarget::A => Label::Anomalous,
    };
    let rules_path = args
        .rules
        .clone()
        .unwrap_or_else(|| dir.join(artifacts::rules_file(label, false, "json")));
    let rules = artifacts::read_rules(&rules_path)?;
    let data = pipeline::load_dataset(&cfg)?;
    let labels = model.model.predict_all(&model.encoder.encode(&data)?)?;
    let state = args.state.as_deref().map(parse_state).transpose()?;
    let svg = render_svg(&PlotInput {
        data: &data,
        labels: &labels,
        rules: &rules.rule_set,
        state: state.as_ref(),
    })?;
    let path = artifacts::write_text(&dir, artifacts::PLOT_FILE, &svg)?;
    println!("{}", path.display());
    Ok(())
}

fn run_report(args: &ReportArgs) -> Result<()> {
    let configs = args.configs.iter().map(|p| load_config(p)).collect::<Result<Vec<_>>>()?;
    if args.run {
        for cfg in &configs {
            let out = cfg.output_path();
            let result = extract(cfg, cfg.extraction.targets, &out, false).and_then(|_| surrogate(cfg, &out, false));
            match result {
                Ok(()) => clear_error(&out),
                Err(e) => {
                    // A failed run shows up as a failed row.
                    record_error(&e, &out);
                }
            }
        }
    }
    let report = report::build_report(&configs);
    report.write(&args.out)?;
    print!("{}", report.to_text());
    Ok(())
}

fn record_error(e: &CliError, out: &Path) {
    let json = serde_json::to_string_pretty(&e.report()).unwrap_or_else(|_| format!("{{\"message\": {:?}}}", e.to_string()));
    eprintln!("{json}");
    let _ = artifacts::write_text(out, artifacts::ERROR_FILE, &(json + "\n"));
}

fn clear_error(out: &Path) {
    let _ = std::fs::remove_file(out.join(artifacts::ERROR_FILE));
}

fn run(cli: Cli) -> (Result<()>, Option<PathBuf>) {
    match cli.command {
        Command::Extract(args) => {
            let cfg = match load_config(&args.run.config) {
                Ok(c) => c,
                Err(e) => return (Err(e), args.run.out),
            };
            let out = out_dir(&cfg, &args.run.out);
            let result = (|| {
                let mut cfg = cfg.clone();
                if let Some(e) = args.discard_factor {
                    cfg.extraction.discard_factor = e;
                }
                if let Some(m) = args.box_mode {
                    cfg.extraction.box_mode = match m {
                        BoxModeArg::All => BoxMode::All,
                        BoxModeArg::Farthest => BoxMode::Farthest,
                    };
                }
                cfg.validate()?;
                extract(&cfg, args.target.unwrap_or(cfg.extraction.targets), &out, args.run.with_timings)
            })();
            (result, Some(out))
        }
        Command::Surrogate(args) => match load_config(&args.config) {
            Ok(cfg) => {
                let out = out_dir(&cfg, &args.out);
                (surrogate(&cfg, &out, args.with_timings), Some(out))
            }
            Err(e) => (Err(e), args.out),
        },
        Command::Report(args) => (run_report(&args), None),
        Command::Plot(args) => (plot(&args), None),
    }
}

fn main() -> ExitCode {
    let (result, out) = run(Cli::parse());
    match result {
        Ok(()) => {
            if let Some(out) = out {
                clear_error(&out);
            }
            ExitCode::from(exit::OK as u8)
        }
        Err(e) => {
            match out {
                Some(out) => record_error(&e, &out),
                None => eprintln!(
                    "{}",
                    serde_json::to_string_pretty(&e.report()).unwrap_or_else(|_| e.to_string())
                ),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
