//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use rcc_core::causal::decision_rate_curve;
use rcc_core::embedding::{
    lemma1_bound, lemma1_error_estimate, rate_slope_estimate, rff_kernel_estimate, standard_normal_points, KernelSpec,
    PointSet, RffBasis,
};
use rcc_core::forest::{ForestConfig, DEFAULT_TREE_GRID};
use rcc_core::pipeline::{pair_bases_from_data, PairModel, TrainingConfig, TreeCount, TripletModel};
use rcc_core::seed;
use rcc_core::synthgen::{
    fit_theta, sample_pair, sample_theta_grid, sample_triplet, standardize, theta_grid, CauseEffectSample, DagSpec,
    MotherParams,
};

use crate::bundle::{load_model, save_model, LoadedModel, ModelBundle, TrainingRecord};
use crate::error::{CliError, Result};
use crate::io::{expand_inputs, format_columns, parse_pair_file, read_labels, write_atomic};
use crate::report::{bounds_csv, dag_dot, decision_rate_csv, fmt_float, scores_csv, BoundCheck};

const DEFAULT_THETA: &str = "3,2,2,2,5";
const VARIABLE_NAMES: [&str; 3] = ["X", "Y", "Z"];

#[derive(Debug, Parser)]
#[command(name = "rcc", version, about = "Learn and apply cause-effect classifiers over kernel mean embeddings")]
pub struct Cli {
    /// Root seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random features per embedding block.
    #[arg(long, global = true, default_value_t = 1000)]
    pub m: usize,
    /// Observations per synthetic sample.
    #[arg(long, global = true, default_value_t = 1000)]
    pub n: usize,
    /// Number of synthetic training samples.
    #[arg(long = "big-n", global = true, default_value_t = 10000)]
    pub big_n: usize,
    /// Output file or directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Trained model bundle.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// `name,label` CSV of ground-truth directions.
    #[arg(long, global = true)]
    pub labels: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write synthetic cause-effect pair files and a labels CSV into `--out`.
    SynthPairs {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value = DEFAULT_THETA)]
        theta: MotherParams,
    },
    /// Write synthetic three-variable tables and their generating graphs into `--out`.
    SynthTriplets {
        /// Tables per graph (eight graphs).
        #[arg(long, default_value_t = 10)]
        per_dag: usize,
        #[arg(long, default_value = DEFAULT_THETA)]
        theta: MotherParams,
    },
    /// Choose generator parameters whose samples best match the given pairs.
    FitTheta {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Candidates drawn from the grid.
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Search the whole grid instead of a random subset.
        #[arg(long)]
        full_grid: bool,
        /// Synthetic probe samples per candidate.
        #[arg(long, default_value_t = 100)]
        probes: usize,
    },
    /// Train the two-class direction classifier; the bundle is written to `--out`.
    TrainPair(TrainArgs),
    /// Train the three-class edge classifier; the bundle is written to `--out`.
    TrainTriplet(TrainArgs),
    /// Score pair files with a pair model.
    Score {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Decision-rate curve and accuracy of a pair model on labeled pair files.
    Eval {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Reconstruct a causal graph over the columns of a table as DOT.
    Dag {
        input: PathBuf,
        /// Comma-separated variable names (default X1, X2, ...).
        #[arg(long, value_delimiter = ',')]
        names: Option<Vec<String>>,
    },
    /// Monte-Carlo checks of the feature-map error bound and the embedding convergence rate.
    CheckBounds {
        /// Fresh-basis trials for the error bound.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Repetitions per size for the rate check.
        #[arg(long, default_value_t = 20)]
        reps: usize,
        /// Sample sizes for the rate check.
        #[arg(long, value_delimiter = ',', default_value = "32,64,128,256,512,1024,2048,4096")]
        sizes: Vec<usize>,
        /// Gaussian kernel parameter.
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// Test points per error-bound trial.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Random point pairs for the kernel-approximation check.
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        /// Allowed kernel-approximation gap.
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        /// Failure probability of the error bound.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, default_value = DEFAULT_THETA)]
    pub theta: MotherParams,
    /// Fixed ensemble size; cross-validated over the default grid when absent.
    #[arg(long)]
    pub trees: Option<usize>,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Store frequency matrices in the bundle instead of only their seeds.
    #[arg(long)]
    pub full_matrix: bool,
}

/// Runs the command line `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::SynthPairs { count, theta } => synth_pairs(cli, *count, theta),
        Command::SynthTriplets { per_dag, theta } => synth_triplets(cli, *per_dag, theta),
        Command::FitTheta { inputs, budget, full_grid, probes } => {
            fit_theta_cmd(cli, inputs, *budget, *full_grid, *probes)
        }
        Command::TrainPair(args) => train(cli, args, false),
        Command::TrainTriplet(args) => train(cli, args, true),
        Command::Score { inputs } => score(cli, inputs),
        Command::Eval { inputs } => eval(cli, inputs),
        Command::Dag { input, names } => dag(cli, input, names.as_deref()),
        Command::CheckBounds { trials, reps, sizes, gamma, points, pairs, tolerance, delta } => {
            check_bounds(cli, *trials, *reps, sizes, *gamma, *points, *pairs, *tolerance, *delta)
        }
    }
}

fn required<'a>(opt: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    opt.as_deref().ok_or_else(|| CliError::Usage(format!("this command requires {flag}")))
}

/// Writes to `--out` when given, otherwise to stdout.
fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn out_dir(cli: &Cli) -> Result<&Path> {
    let dir = required(&cli.out, "--out <dir>")?;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir)
}

fn synth_pairs(cli: &Cli, count: usize, theta: &MotherParams) -> Result<()> {
    let dir = out_dir(cli)?;
    let root = seed::derive_named(cli.seed, "synth-pairs");
    let mut labels = String::from("name,label\n");
    for i in 0..count {
        let task = seed::derive(root, i as u64);
        let mut s = sample_pair(theta, cli.n, seed::derive(task, 0))?;
        if seed::derive(task, 1) & 1 == 1 {
            s = s.swapped();
        }
        let name = format!("pair{i:04}");
        write_atomic(&dir.join(format!("{name}.txt")), format_columns(&[&s.x, &s.y]).as_bytes())?;
        let _ = writeln!(labels, "{name},{}", s.label.unwrap_or(1));
    }
    write_atomic(&dir.join("labels.csv"), labels.as_bytes())
}

fn synth_triplets(cli: &Cli, per_dag: usize, theta: &MotherParams) -> Result<()> {
    let dir = out_dir(cli)?;
    let root = seed::derive_named(cli.seed, "synth-triplets");
    let mut index = String::from("name,dag,edges\n");
    let mut k = 0;
    for dag in DagSpec::all() {
        for r in 0..per_dag {
            let t = sample_triplet(theta, dag, cli.n, seed::derive(root, (dag.id() * per_dag + r) as u64))?;
            let name = format!("triplet{k:04}");
            let [x, y, z] = &t.columns;
            write_atomic(&dir.join(format!("{name}.txt")), format_columns(&[x, y, z]).as_bytes())?;
            let edges: Vec<String> =
                dag.edges().iter().map(|&(a, b)| format!("{}->{}", VARIABLE_NAMES[a], VARIABLE_NAMES[b])).collect();
            let _ = writeln!(index, "{name},{},{}", dag.id(), edges.join(";"));
            k += 1;
        }
    }
    write_atomic(&dir.join("dags.csv"), index.as_bytes())
}

fn read_pairs(inputs: &[PathBuf]) -> Result<Vec<CauseEffectSample>> {
    expand_inputs(inputs)?
        .iter()
        .map(|p| Ok(parse_pair_file(p)?.to_sample()?.standardized()))
        .collect()
}

fn fit_theta_cmd(cli: &Cli, inputs: &[PathBuf], budget: usize, full_grid: bool, probes: usize) -> Result<()> {
    let samples = read_pairs(inputs)?;
    let bases = pair_bases_from_data(&samples, cli.m, cli.seed)?;
    let features = samples.iter().map(|s| s.featurize(&bases)).collect::<rcc_core::Result<Vec<_>>>()?;
    let candidates =
        if full_grid { theta_grid() } else { sample_theta_grid(budget, seed::derive_named(cli.seed, "theta-grid")) };
    let fit = fit_theta(&features, &candidates, probes, cli.n, &bases, seed::derive_named(cli.seed, "theta-probes"))?;
    emit(cli, &format!("{}\n", fit.theta))
}

fn train(cli: &Cli, args: &TrainArgs, triplet: bool) -> Result<()> {
    let out = required(&cli.out, "--out <model.json>")?;
    let trees = match args.trees {
        Some(0) => return Err(CliError::Usage("--trees must be positive".into())),
        Some(k) => TreeCount::Fixed(k),
        None => TreeCount::CrossValidate { grid: DEFAULT_TREE_GRID.to_vec(), folds: args.folds },
    };
    let config = TrainingConfig {
        theta: args.theta,
        big_n: cli.big_n,
        n: cli.n,
        m: cli.m,
        trees,
        forest: ForestConfig::default(),
        seed: cli.seed,
    };
    let record = |num_trees| TrainingRecord {
        theta: args.theta,
        big_n: cli.big_n,
        n: cli.n,
        m: cli.m,
        trees: num_trees,
        seed: cli.seed,
    };
    let bundle = if triplet {
        let model = TripletModel::train(&config)?;
        ModelBundle::from_triplet(&model, record(model.forest.num_trees()), args.full_matrix)
    } else {
        let model = PairModel::train(&config)?;
        ModelBundle::from_pair(&model, record(model.forest.num_trees()), args.full_matrix)
    };
    save_model(&bundle, out)
}

fn pair_model(cli: &Cli) -> Result<PairModel> {
    match load_model(required(&cli.model, "--model <model.json>")?)?.into_model()? {
        LoadedModel::Pair(m) => Ok(m),
        LoadedModel::Triplet(_) => Err(CliError::Data("expected a pair model, found a triplet model".into())),
    }
}

fn triplet_model(cli: &Cli) -> Result<TripletModel> {
    match load_model(required(&cli.model, "--model <model.json>")?)?.into_model()? {
        LoadedModel::Triplet(m) => Ok(m),
        LoadedModel::Pair(_) => Err(CliError::Data("expected a triplet model, found a pair model".into())),
    }
}

fn score(cli: &Cli, inputs: &[PathBuf]) -> Result<()> {
    let model = pair_model(cli)?;
    let rows = read_pairs(inputs)?
        .iter()
        .map(|s| Ok((s.name.clone().unwrap_or_default(), model.score(s)?.value)))
        .collect::<Result<Vec<_>>>()?;
    emit(cli, &scores_csv(&rows))
}

fn eval(cli: &Cli, inputs: &[PathBuf]) -> Result<()> {
    let labels = read_labels(required(&cli.labels, "--labels <csv>")?)?;
    let model = pair_model(cli)?;
    let samples = read_pairs(inputs)?;
    let mut scores = Vec::with_capacity(samples.len());
    let mut truths = Vec::with_capacity(samples.len());
    for s in &samples {
        let name = s.name.clone().unwrap_or_default();
        let truth = *labels.get(&name).ok_or_else(|| CliError::Data(format!("no label for {name:?}")))?;
        scores.push(model.score(s)?);
        truths.push(truth);
    }
    let curve = decision_rate_curve(&scores, &truths)?;
    match &cli.out {
        Some(path) => write_atomic(path, decision_rate_csv(&curve).as_bytes())?,
        None => print!("{}", decision_rate_csv(&curve)),
    }
    let correct = (curve.overall() * samples.len() as f64).round() as usize;
    let line = format!("accuracy {} ({correct}/{})", fmt_float(curve.overall()), samples.len());
    if cli.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn dag(cli: &Cli, input: &Path, names: Option<&[String]>) -> Result<()> {
    let model = triplet_model(cli)?;
    let mut columns = parse_pair_file(input)?.columns;
    let d = columns.len();
    if d < 3 {
        return Err(CliError::Data(format!("{}: need at least 3 columns, found {d}", input.display())));
    }
    let names: Vec<String> = match names {
        Some(n) if n.len() != d => return Err(CliError::Usage(format!("--names lists {} names for {d} columns", n.len()))),
        Some(n) => n.to_vec(),
        None => (1..=d).map(|i| format!("X{i}")).collect(),
    };
    for c in &mut columns {
        standardize(c);
    }
    let graph = model.infer(&columns, &names)?;
    emit(cli, &dag_dot(&graph))
}

#[allow(clippy::too_many_arguments)]
fn check_bounds(
    cli: &Cli,
    trials: usize,
    reps: usize,
    sizes: &[usize],
    gamma: f64,
    points: usize,
    pairs: usize,
    tolerance: f64,
    delta: f64,
) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CliError::Usage("--delta must lie in (0, 1)".into()));
    }
    let spec = KernelSpec::gaussian(gamma)?;
    let mut rows = Vec::new();

    let basis = RffBasis::draw(&spec, 1, cli.m, seed::derive_named(cli.seed, "check-kernel-basis"))?;
    let pts = standard_normal_points(2 * pairs, 1, seed::derive_named(cli.seed, "check-kernel-points"));
    for i in 0..pairs {
        let (a, b) = (pts.point(2 * i), pts.point(2 * i + 1));
        let gap = (rff_kernel_estimate(a, b, &basis)? - spec.eval(a, b)).abs();
        rows.push(BoundCheck { check: "kernel_gap", index: i, value: gap, lower: None, upper: Some(tolerance) });
    }

    let sample: PointSet = standard_normal_points(cli.n, 1, seed::derive_named(cli.seed, "check-error-sample"));
    let bound = lemma1_bound(spec.normalizer(), cli.m, cli.n, delta);
    let trial_root = seed::derive_named(cli.seed, "check-error-trials");
    for t in 0..trials {
        let task = seed::derive(trial_root, t as u64);
        let basis = RffBasis::draw(&spec, 1, cli.m, seed::derive(task, 0))?;
        let err = lemma1_error_estimate(&sample, &basis, &spec, points, seed::derive(task, 1))?;
        rows.push(BoundCheck { check: "feature_map_error", index: t, value: err, lower: None, upper: Some(bound) });
    }

    let report = rate_slope_estimate(seed::derive_named(cli.seed, "check-rate"), sizes, reps, &spec)?;
    for (i, d) in report.mean_deviations.iter().enumerate() {
        rows.push(BoundCheck { check: "rate_deviation", index: report.sizes[i], value: *d, lower: None, upper: None });
    }
    rows.push(BoundCheck { check: "rate_slope", index: 0, value: report.slope, lower: Some(-0.6), upper: Some(-0.4) });

    emit(cli, &bounds_csv(&rows))
}
