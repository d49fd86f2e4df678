//! `rulescore` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or schema errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::{Dataset, TaskKind};
use crate::discretize::{discretize_ruleset, fit_quantile_grid};
use crate::error::Error;
use crate::harness::{
    evaluate, kfold_split, load_csv, write_report, AlgorithmSpec, CsvOptions, EvaluationConfig,
    ImportedRules, REPORT_FILES,
};
use crate::learners::{Cart, CartParams, SirusLite, SirusLiteParams};
use crate::rules::read_rules;
use crate::scores::{dice_sorensen, Weights};

#[derive(Parser, Debug)]
#[command(name = "rulescore", version, about = "Score the interpretability of rule-based models")]
struct Cli {
    /// Base seed of every random choice.
    #[arg(long, global = true, env = "RULESCORE_SEED", default_value_t = 0)]
    seed: u64,
    /// Quantile bins used by the q-stability score.
    #[arg(long, global = true, default_value_t = 10)]
    q: usize,
    /// Number of cross-validation folds.
    #[arg(long, global = true, default_value_t = 10)]
    folds: usize,
    /// Weights of predictivity, stability and simplicity; normalized to sum to 1.
    #[arg(long, global = true, default_value = "1,1,1")]
    weights: String,
    /// Output directory for report artifacts.
    #[arg(long, global = true, default_value = "rulescore-out")]
    out: PathBuf,
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the cross-validated scoring protocol and write the report artifacts.
    Evaluate(EvaluateArgs),
    /// Print the Dice-Sorensen stability of two rule files discretized on a dataset.
    ScoreRules(ScoreRulesArgs),
    /// Check rule-set JSON files against the interchange schema.
    ValidateRules(ValidateArgs),
    /// Print a fold assignment as `row,fold` CSV.
    MakeFolds(MakeFoldsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TaskArg {
    Regression,
    Classification,
}

impl From<TaskArg> for TaskKind {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Regression => TaskKind::Regression,
            TaskArg::Classification => TaskKind::Classification,
        }
    }
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Columns to read as categorical.
    #[arg(long, value_delimiter = ',')]
    categorical: Vec<String>,
    /// Task kind; inferred from the target column when omitted.
    #[arg(long, value_enum)]
    task: Option<TaskArg>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Comma-separated CSV files.
    #[arg(long, value_delimiter = ',', required = true)]
    data: Vec<PathBuf>,
    /// Target column name.
    #[arg(long)]
    target: String,
    /// Comma-separated algorithms: `cart`, `sirus-lite`, `rules:PATH`.
    #[arg(long, value_delimiter = ',', required = true)]
    algos: Vec<String>,
    #[command(flatten)]
    data_args: DataArgs,
    #[arg(long, default_value_t = 20)]
    max_leaf_nodes: usize,
    #[arg(long, default_value_t = 1)]
    min_samples_leaf: usize,
    #[arg(long, default_value_t = 200)]
    sirus_trees: usize,
    #[arg(long, default_value_t = 3)]
    sirus_depth: usize,
    #[arg(long, default_value_t = 0.05)]
    sirus_p0: f64,
    #[arg(long, default_value_t = 10)]
    sirus_max_rules: usize,
}

#[derive(Args, Debug)]
struct ScoreRulesArgs {
    #[arg(long)]
    rules: PathBuf,
    #[arg(long)]
    rules2: PathBuf,
    /// CSV whose feature columns define the quantile grid.
    #[arg(long)]
    data: PathBuf,
    /// Target column to exclude from the features.
    #[arg(long)]
    target: Option<String>,
    #[command(flatten)]
    data_args: DataArgs,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Rule-set JSON files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Also check feature indices and kinds against this CSV.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    target: Option<String>,
    #[command(flatten)]
    data_args: DataArgs,
}

#[derive(Args, Debug)]
struct MakeFoldsArgs {
    /// Number of rows.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    n: Option<usize>,
    /// Take the row count from this CSV.
    #[arg(long)]
    data: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::data(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn parse_weights(s: &str) -> CliResult<Weights> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Failure::usage(format!("--weights '{s}': {e}")))?;
    match parts[..] {
        [a, b, c] => Weights::normalized(a, b, c).map_err(|e| Failure::usage(format!("--weights '{s}': {e}"))),
        _ => Err(Failure::usage(format!("--weights '{s}': expected three comma-separated numbers"))),
    }
}

fn csv_options(target: Option<&str>, args: &DataArgs) -> CsvOptions {
    CsvOptions {
        target: target.unwrap_or_default().to_string(),
        task: args.task.map(Into::into),
        categorical: args.categorical.clone(),
        ..Default::default()
    }
}

fn load(path: &Path, opts: &CsvOptions) -> CliResult<Dataset> {
    Ok(load_csv(path, opts)?)
}

fn algorithm_specs(args: &EvaluateArgs, q: usize) -> CliResult<Vec<AlgorithmSpec>> {
    args.algos
        .iter()
        .map(|a| match a.as_str() {
            "cart" => Ok(AlgorithmSpec::builtin(Cart {
                params: CartParams {
                    max_leaf_nodes: args.max_leaf_nodes,
                    min_samples_leaf: args.min_samples_leaf,
                    ..Default::default()
                },
            })),
            "sirus-lite" => Ok(AlgorithmSpec::builtin(SirusLite {
                params: SirusLiteParams {
                    n_trees: args.sirus_trees,
                    max_depth: args.sirus_depth,
                    p0: args.sirus_p0,
                    q,
                    max_rules: args.sirus_max_rules,
                    seed: 0,
                },
            })),
            other => match other.strip_prefix("rules:") {
                Some(path) if !path.is_empty() => {
                    let path = Path::new(path);
                    let id = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| path.display().to_string());
                    Ok(AlgorithmSpec::imported(id, ImportedRules::load(path)?))
                }
                _ => Err(Failure::usage(format!(
                    "--algos: unknown algorithm '{other}' (expected cart, sirus-lite or rules:PATH)"
                ))),
            },
        })
        .collect()
}

fn cmd_evaluate(cli: &Cli, args: &EvaluateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    if args.algos.len() < 2 {
        return Err(Failure::usage(format!(
            "--algos: at least two algorithms are needed for relative simplicity, got {}",
            args.algos.len()
        )));
    }
    if cli.folds < 2 {
        return Err(Failure::usage(format!("--folds must be >= 2, got {}", cli.folds)));
    }
    let weights = parse_weights(&cli.weights)?;
    let specs = algorithm_specs(args, cli.q)?;
    let opts = csv_options(Some(&args.target), &args.data_args);
    let datasets = args
        .data
        .iter()
        .map(|p| load(p, &opts))
        .collect::<CliResult<Vec<_>>>()?;
    for (p, d) in args.data.iter().zip(&datasets) {
        if d.n() < cli.folds {
            return Err(Failure::usage(format!(
                "--folds {} exceeds the {} rows of {}",
                cli.folds,
                d.n(),
                p.display()
            )));
        }
    }
    let cfg = EvaluationConfig {
        k: cli.folds,
        q: cli.q,
        weights,
        seed: cli.seed,
        algorithms: specs,
    };
    cfg.validate().map_err(|e| Failure::usage(format!("--algos: {e}")))?;
    let report = evaluate(&datasets, &cfg)?;
    write_report(&report, &cli.out)?;
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let _ = writeln!(
        out,
        "wrote {} to {}",
        REPORT_FILES.join(", "),
        cli.out.display()
    );
    Ok(())
}

fn cmd_score_rules(cli: &Cli, args: &ScoreRulesArgs, out: &mut dyn Write) -> CliResult<()> {
    let data = load(&args.data, &csv_options(args.target.as_deref(), &args.data_args))?;
    let schema = data.schema();
    let grid = fit_quantile_grid(&data, cli.q)?;
    let mut sets = Vec::with_capacity(2);
    for path in [&args.rules, &args.rules2] {
        let rs = read_rules(path)?
            .canonicalized_in(&schema)
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        let disc = discretize_ruleset(&grid, &rs).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        sets.push(disc);
    }
    let _ = writeln!(out, "{:?}", dice_sorensen(&sets[0], &sets[1]));
    Ok(())
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> CliResult<()> {
    let schema = match &args.data {
        Some(p) => Some(load(p, &csv_options(args.target.as_deref(), &args.data_args))?.schema()),
        None => None,
    };
    for path in &args.files {
        let mut rs = read_rules(path)?;
        if let Some(s) = &schema {
            rs = rs
                .canonicalized_in(s)
                .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        }
        let _ = writeln!(
            out,
            "ok: {}: {} rules, interpretability index {}",
            path.display(),
            rs.len(),
            rs.interpretability_index()
        );
    }
    Ok(())
}

fn cmd_make_folds(cli: &Cli, args: &MakeFoldsArgs, out: &mut dyn Write) -> CliResult<()> {
    let n = match (&args.n, &args.data) {
        (Some(n), _) => *n,
        (None, Some(p)) => load(p, &CsvOptions::default())?.n(),
        (None, None) => return Err(Failure::usage("make-folds needs --n or --data")),
    };
    let plan = kfold_split(n, cli.folds, cli.seed)
        .map_err(|e| Failure::usage(format!("--folds {}: {e}", cli.folds)))?;
    let _ = out.write_all(plan.to_csv().as_bytes());
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    if cli.q < 2 {
        return Err(Failure::usage(format!("--q must be >= 2, got {}", cli.q)));
    }
    parse_weights(&cli.weights)?;
    match &cli.command {
        Command::Evaluate(a) => cmd_evaluate(cli, a, out, err),
        Command::ScoreRules(a) => cmd_score_rules(cli, a, out),
        Command::ValidateRules(a) => cmd_validate(a, out),
        Command::MakeFolds(a) => cmd_make_folds(cli, a, out),
    }
}

/// Run with explicit output streams; returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(Failure::usage("--jobs must be >= 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => {
                let (mut o, mut e) = (Vec::new(), Vec::new());
                let r = pool.install(|| dispatch(&cli, &mut o, &mut e));
                let _ = out.write_all(&o);
                let _ = err.write_all(&e);
                r
            }
            Err(e) => Err(Failure::usage(format!("--jobs {n}: {e}"))),
        },
        None => dispatch(&cli, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
