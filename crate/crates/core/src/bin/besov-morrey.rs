use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use besov_morrey::harness::config::ExperimentConfig;
use besov_morrey::harness::report::NormReport;
use besov_morrey::harness::run::{run, thread_pool};
use besov_morrey::harness::scan::regularity_scan;
use besov_morrey::harness::suite::{default_config, run_suite};
use besov_morrey::params::Flavor;
use besov_morrey::Error;

#[derive(Parser)]
#[command(name = "besov-morrey", version, about = "Grid quasi-norms of Besov-Morrey and Besov-type spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

/// Kebab-case mirrors of the configuration keys.
#[derive(Args)]
struct Overrides {
    /// Experiment configuration (JSON); the built-in default when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Replaces the configured grid sizes by this one.
    #[arg(long = "grid-size", global = true)]
    grid_size: Option<usize>,
    /// Output directory for JSON and CSV reports; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Ratio bound for comparisons.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Restricts the computed flavors to this one.
    #[arg(long, global = true, value_parser = parse_flavor)]
    flavor: Option<Flavor>,
}

#[derive(Subcommand)]
enum Command {
    /// One function and one parameter set.
    Norm {
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        params: Option<String>,
    },
    /// Norms of every configured cell and the ratio matrices.
    Compare,
    /// Empirical smoothness thresholds over the configured grid sizes.
    Scan {
        #[arg(long)]
        function: Option<String>,
    },
    /// The acceptance criteria.
    Suite {
        /// Runs only these criteria (repeatable).
        #[arg(long = "criterion")]
        criteria: Vec<u32>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Per-level CSV of every computed breakdown.
    Export,
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    Flavor::parse(s).map_err(|e| e.to_string())
}

fn load(o: &Overrides) -> besov_morrey::Result<ExperimentConfig> {
    let mut cfg = match &o.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => default_config(),
    };
    if let Some(n) = o.grid_size {
        cfg.grid_sizes = vec![n];
    }
    if let Some(f) = o.flavor {
        cfg.flavors = vec![f];
        cfg.comparisons.clear();
    }
    if let Some(t) = o.threads {
        cfg.threads = Some(t);
    }
    if let Some(t) = o.tolerance {
        cfg.tolerance.ratio_bound = t;
    }
    if let Some(d) = &o.out {
        cfg.output.dir = Some(d.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn pick<T>(items: &mut Vec<T>, name: Option<&str>, key: impl Fn(&T) -> &str, what: &str) -> besov_morrey::Result<()> {
    let Some(name) = name else {
        items.truncate(1);
        return Ok(());
    };
    let pos = items.iter().position(|x| key(x) == name).ok_or_else(|| Error::Config {
        location: what.to_string(),
        message: format!("no entry named {name:?}"),
    })?;
    let kept = items.swap_remove(pos);
    items.clear();
    items.push(kept);
    Ok(())
}

fn emit(dir: Option<&Path>, file: &str, text: &str) -> besov_morrey::Result<()> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            std::fs::write(d.join(file), text)?;
            eprintln!("wrote {}", d.join(file).display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn finish_report(rep: &NormReport, cfg: &ExperimentConfig) -> besov_morrey::Result<bool> {
    match &cfg.output.dir {
        Some(d) => {
            rep.save(d)?;
            eprintln!("wrote {} and {}", d.join("report.json").display(), d.join("levels.csv").display());
        }
        None => println!("{}", rep.to_json()?),
    }
    for i in &rep.invariants {
        eprintln!("{} {}: {}", if i.passed { "ok  " } else { "FAIL" }, i.name, i.detail);
    }
    for m in &rep.ratios {
        let bad = m.cells.iter().filter(|c| !c.within_bound).count();
        eprintln!("ratio {}/{}: {} cells, {bad} outside [1/{b}, {b}]", m.numerator.name(), m.denominator.name(), m.cells.len(), b = m.bound);
    }
    Ok(rep.passed())
}

fn execute(cli: Cli) -> besov_morrey::Result<bool> {
    let mut cfg = load(&cli.opts)?;
    match cli.command {
        Command::Norm { function, params } => {
            pick(&mut cfg.corpus, function.as_deref(), |f| &f.name, "--function")?;
            pick(&mut cfg.params, params.as_deref(), |p| &p.name, "--params")?;
            cfg.domains.truncate(1);
            cfg.comparisons.clear();
            let rep = run(&cfg)?;
            finish_report(&rep, &cfg)
        }
        Command::Compare => {
            if cfg.comparisons.is_empty() {
                cfg.comparisons = cfg.all_pairs();
            }
            let rep = run(&cfg)?;
            finish_report(&rep, &cfg)
        }
        Command::Scan { function } => {
            if function.is_some() {
                pick(&mut cfg.corpus, function.as_deref(), |f| &f.name, "--function")?;
            }
            let flavor = cli.opts.flavor.unwrap_or(Flavor::Osc);
            let dom = &cfg.domains[0].domain;
            let sp = &cfg.params[0].params;
            let pool = thread_pool(cfg.threads)?;
            let scans = pool.install(|| {
                cfg.corpus.iter().map(|f| regularity_scan(f, sp, dom, &cfg.grid_sizes, flavor)).collect::<besov_morrey::Result<Vec<_>>>()
            })?;
            for s in &scans {
                eprintln!("{}: threshold {:.4}", s.function, s.threshold);
            }
            let text = serde_json::to_string_pretty(&json!({ "schema": 1, "scans": scans }))?;
            emit(cfg.output.dir.as_deref(), "scan.json", &text)?;
            Ok(true)
        }
        Command::Suite { criteria, seed } => {
            let pool = thread_pool(cfg.threads)?;
            let rep = pool.install(|| run_suite(seed, &criteria, |c| eprintln!("{}", c.line())));
            emit(cfg.output.dir.as_deref(), "suite.json", &serde_json::to_string_pretty(&rep)?)?;
            Ok(rep.passed())
        }
        Command::Export => {
            let rep = run(&cfg)?;
            match &cfg.output.dir {
                Some(d) => {
                    std::fs::create_dir_all(d)?;
                    rep.write_levels_csv(std::fs::File::create(d.join("levels.csv"))?)?;
                    eprintln!("wrote {}", d.join("levels.csv").display());
                }
                None => rep.write_levels_csv(std::io::stdout().lock())?,
            }
            Ok(rep.numeric_failures() == 0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config { .. }) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
