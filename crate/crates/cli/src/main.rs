use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optg::config::RunConfig;
use optg::error::{Error, Result};
use optg::{extract, geolife, io, report, store, sweep};
use optg_core::signals::DistanceMetric;
use optg_core::EmbeddingParams;

/// Ordinal-pattern features and transportation mode classification for
/// GeoLife trajectories.
#[derive(Parser, Debug)]
#[command(name = "optg", version)]
struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true, env = "OPTG_CONFIG")]
    config: Option<PathBuf>,
    /// GeoLife root (the directory holding `Data/`, or `Data/` itself).
    #[arg(long, global = true, env = "OPTG_DATA_ROOT")]
    data_root: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "OPTG_OUT")]
    out: Option<PathBuf>,
    /// Seed for fold assignment.
    #[arg(long, global = true, env = "OPTG_SEED")]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "OPTG_JOBS")]
    jobs: Option<usize>,
    /// Step distance: `euclidean` (degrees) or `haversine` (meters).
    #[arg(long, global = true, env = "OPTG_DISTANCE")]
    distance: Option<DistanceMetric>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse PLT and label files into the trajectory store.
    Ingest,
    /// Compute feature matrices for every (D, tau) in the grid.
    Extract,
    /// Run the cross-validated sweep and write results.csv / results.json.
    Evaluate,
    /// Derive plot tables from the results and feature matrices.
    Report {
        /// Results file; defaults to `<out>/results.csv`.
        #[arg(long)]
        results: Option<PathBuf>,
        /// Export the transition-graph edge lists of these trajectories
        /// instead of the result tables. Repeatable.
        #[arg(long = "graph", value_name = "TRAJ_ID")]
        graphs: Vec<String>,
        /// Embedding dimension for `--graph`; defaults to the report dimension.
        #[arg(long, requires = "graphs")]
        graph_dimension: Option<usize>,
        /// Embedding delay for `--graph`.
        #[arg(long, default_value_t = 1, requires = "graphs")]
        graph_delay: usize,
    },
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &cli.data_root {
        cfg.data_root = Some(v.clone());
    }
    if let Some(v) = &cli.out {
        cfg.out = v.clone();
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.jobs {
        cfg.jobs = v;
    }
    if let Some(v) = cli.distance {
        cfg.distance = v;
    }
    Ok(cfg)
}

fn ingest(cfg: &RunConfig) -> Result<()> {
    let root = cfg
        .data_root
        .as_ref()
        .ok_or_else(|| Error::Usage("no dataset root; pass --data-root or set data_root".into()))?;
    if !root.is_dir() {
        return Err(Error::Usage(format!(
            "dataset root {} is not a directory",
            root.display()
        )));
    }
    let ingested = geolife::ingest(root)?;
    store::write_store(&cfg.store_path(), &ingested.trajectories)?;
    io::write_json(&cfg.out.join("ingest_report.json"), &ingested.report)?;
    let r = &ingested.report;
    println!(
        "{} trajectories from {} labeled users ({} failed)",
        r.total,
        r.users_labeled,
        r.users_failed.len()
    );
    for (mode, n) in &r.trajectories {
        println!("  {mode:<9} {n}");
    }
    Ok(())
}

fn extract_cmd(cfg: &RunConfig) -> Result<()> {
    let trajectories = store::read_store(&cfg.store_path())?;
    let grid = cfg.grid.to_grid();
    let summary = extract::run_extract(
        &trajectories,
        &grid.embeddings()?,
        grid.signal_union(),
        cfg.distance,
        &cfg.features_dir(),
    )?;
    for s in summary {
        println!(
            "D={} tau={:<2} kept {:>5} skipped {:>5}",
            s.params.dimension(),
            s.params.delay(),
            s.kept,
            s.skipped
        );
    }
    Ok(())
}

fn evaluate(cfg: &RunConfig) -> Result<()> {
    let outcomes = sweep::run_sweep(cfg)?;
    sweep::write_results(&cfg.out, &outcomes, cfg.seed)?;
    let ok = outcomes.iter().filter(|o| o.result.is_ok()).count();
    print!("{}", sweep::summary_table(&outcomes, 5));
    println!("{ok}/{} cells evaluated", outcomes.len());
    if ok == 0 {
        return Err(Error::Data("no grid cell could be evaluated".into()));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve(cli)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build_global()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    match &cli.command {
        Command::Ingest => ingest(&cfg),
        Command::Extract => extract_cmd(&cfg),
        Command::Evaluate => evaluate(&cfg),
        Command::Report {
            graphs,
            graph_dimension,
            graph_delay,
            ..
        } if !graphs.is_empty() => {
            let params = EmbeddingParams::new(graph_dimension.unwrap_or(cfg.report.fixed_dimension), *graph_delay)
                .map_err(|e| Error::Usage(e.to_string()))?;
            let trajectories = store::read_store(&cfg.store_path())?;
            let written = report::export_graphs(&trajectories, graphs, params, cfg.distance, &cfg.out.join("plots"))?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Report { results, .. } => {
            let results = results.clone().unwrap_or_else(|| cfg.out.join("results.csv"));
            report::run_report(
                &results,
                &cfg.features_dir(),
                &cfg.out.join("plots"),
                cfg.report.fixed_dimension,
            )
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
