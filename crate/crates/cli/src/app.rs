//! Command-line definitions and the command implementations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hcut::algorithms::{
    agglomerate, average_linkage, expected_f_plus, greedy_cut, projected_random_cut_traced,
    random_cut_traced, AlgorithmTrace, Linkage, Randomized,
};
use hcut::bruteforce::optimal_tree_bruteforce;
use hcut::instances::{jl_project, Graph, InstanceSpec};
use hcut::tree_io::{parse_tree, to_json, to_newick};
use hcut::{Dendrogram, Kernel, Limits, PointSet, Seed, SimilarityView, WeightMatrix};
use rand::Rng;

use crate::bench::{parse_sizes, render_csv, run_bench, BenchConfig};
use crate::error::{CliError, CliResult};
use crate::evaluation::{evaluate, BoundSet, Evaluation};
use crate::ingest::{read_points, read_weights, CsvOptions};

#[derive(Debug, Parser)]
#[command(name = "hcut", version, about = "Hierarchical clustering under a similarity-weighted tree objective")]
pub struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a tree from points or weights.
    Cluster(ClusterArgs),
    /// Score an existing tree.
    Evaluate(EvaluateArgs),
    /// Generate an instance as CSV.
    Gen(GenArgs),
    /// Time projected random cut against one pass over the data.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Projected random cut.
    Prc,
    /// Random cut (one-dimensional data).
    Rc,
    /// Average linkage.
    Al,
    /// Single linkage.
    Sl,
    /// Widest-gap cut (one-dimensional data).
    Greedy,
    /// Exact optimum (at most 10 points).
    Opt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundsArg {
    Max,
    #[value(name = "1d")]
    OneD,
    All,
    None,
}

impl From<BoundsArg> for BoundSet {
    fn from(b: BoundsArg) -> Self {
        match b {
            BoundsArg::Max => BoundSet::Max,
            BoundsArg::OneD => BoundSet::OneD,
            BoundsArg::All => BoundSet::All,
            BoundsArg::None => BoundSet::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeFormat {
    Json,
    Newick,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV of points (one per row), or of an n x n weight matrix with --weights.
    pub input: PathBuf,

    /// The first row is a header.
    #[arg(long)]
    pub header: bool,

    /// Zero-based column holding row labels rather than coordinates.
    #[arg(long)]
    pub label_col: Option<usize>,

    /// The input is a symmetric weight matrix instead of points.
    #[arg(long)]
    pub weights: bool,

    /// Gaussian kernel bandwidth; required for point input.
    #[arg(long)]
    pub sigma: Option<f64>,

    /// Largest n for which O(n^2) work is allowed.
    #[arg(long, default_value_t = Limits::default().materialize)]
    pub materialize_limit: usize,

    /// Largest n for which O(n^3) bounds are computed without --force-cubic.
    #[arg(long, default_value_t = Limits::default().cubic)]
    pub cubic_limit: usize,

    /// Compute O(n^3) bounds regardless of --cubic-limit.
    #[arg(long)]
    pub force_cubic: bool,
}

impl DataArgs {
    fn limits(&self) -> Limits {
        Limits {
            materialize: self.materialize_limit,
            cubic: self.cubic_limit,
            force_cubic: self.force_cubic,
        }
    }

    /// Flag checks that need no I/O.
    fn validate(&self) -> CliResult<()> {
        match (self.weights, self.sigma) {
            (false, None) => Err(CliError::invalid("--sigma is required for point input")),
            (true, Some(_)) => Err(CliError::invalid("--sigma does not apply to --weights input")),
            (false, Some(s)) if !(s.is_finite() && s > 0.0) => {
                Err(CliError::invalid(format!("--sigma must be positive, got {s}")))
            }
            _ => Ok(()),
        }
    }

    fn load(&self) -> CliResult<Data> {
        if self.weights {
            Ok(Data::Weights(read_weights(&self.input, self.header)?))
        } else {
            let opts = CsvOptions {
                header: self.header,
                label_col: self.label_col,
            };
            let kernel = Kernel::gaussian(self.sigma.expect("validated"))?;
            Ok(Data::Points(read_points(&self.input, opts)?.points, kernel))
        }
    }
}

pub enum Data {
    Points(PointSet, Kernel),
    Weights(WeightMatrix),
}

impl Data {
    pub fn n(&self) -> usize {
        match self {
            Data::Points(p, _) => p.len(),
            Data::Weights(w) => w.n(),
        }
    }

    pub fn view(&self, limits: Limits) -> SimilarityView<'_> {
        match self {
            Data::Points(p, k) => SimilarityView::lazy(p, k.clone()).with_limits(limits),
            Data::Weights(w) => SimilarityView::dense(w.clone()).with_limits(limits),
        }
    }

    fn points(&self, algo: Algo) -> CliResult<&PointSet> {
        match self {
            Data::Points(p, _) => Ok(p),
            Data::Weights(_) => Err(CliError::invalid(format!(
                "--algo {} needs point coordinates, not a weight matrix",
                algo_name(algo)
            ))),
        }
    }
}

fn algo_name(a: Algo) -> &'static str {
    match a {
        Algo::Prc => "prc",
        Algo::Rc => "rc",
        Algo::Al => "al",
        Algo::Sl => "sl",
        Algo::Greedy => "greedy",
        Algo::Opt => "opt",
    }
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long, value_enum, default_value_t = Algo::Prc)]
    pub algo: Algo,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// With --evaluate, also average F+ over this many seeded runs of a
    /// randomized algorithm.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,

    /// Print an objective report.
    #[arg(long)]
    pub evaluate: bool,

    /// Bounds to include in the report.
    #[arg(long, value_enum, default_value_t = BoundsArg::All)]
    pub bounds: BoundsArg,

    #[arg(long, value_enum, default_value_t = TreeFormat::Json)]
    pub format: TreeFormat,

    /// Write the tree here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Write the merge or split steps here, one JSON object per line.
    #[arg(long)]
    pub trace: Option<PathBuf>,

    /// Multiply every weight by 1 + eta * u, u uniform on [-1, 1] (seeded),
    /// to break exact ties in linkage and the optimum search.
    #[arg(long, value_name = "ETA")]
    pub perturb: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Tree file, JSON or Newick.
    pub tree: PathBuf,

    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long, value_enum, default_value_t = BoundsArg::All)]
    pub bounds: BoundsArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    FourPoint,
    SpacedLine,
    CliqueEmbed,
    GraphEncode,
    #[value(name = "random-1d")]
    Random1d,
    GaussianCloud,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Instance descriptor: a JSON file or inline JSON.
    #[arg(long, conflicts_with = "family")]
    pub spec: Option<String>,

    #[arg(long, value_enum, required_unless_present = "spec")]
    pub family: Option<Family>,

    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
    /// Four-point family: move both middle points inward by this much.
    #[arg(long, default_value_t = 0.0)]
    pub shift: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Graph edges as `u-v` pairs separated by commas.
    #[arg(long)]
    pub edges: Option<String>,
    /// Random graph: include each pair with this probability.
    #[arg(long)]
    pub edge_prob: Option<f64>,

    /// Project the generated points to this many dimensions.
    #[arg(long)]
    pub jl_dim: Option<usize>,

    /// Print the JSON descriptor instead of the points.
    #[arg(long)]
    pub print_spec: bool,

    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated sizes, e.g. 10k,100k,1m.
    #[arg(long, default_value = "10k,100k")]
    pub sizes: String,

    /// Dimension of the synthetic clouds.
    #[arg(long, default_value_t = 128)]
    pub dim: usize,

    /// Use the first rows of this CSV instead of synthetic clouds.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub header: bool,
    #[arg(long)]
    pub label_col: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 3)]
    pub trials: usize,

    /// Include reading and parsing the input file in every timing.
    #[arg(long)]
    pub include_io: bool,

    /// Write the CSV report here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn render_tree(tree: &Dendrogram, format: TreeFormat) -> String {
    match format {
        TreeFormat::Json => to_json(tree) + "\n",
        TreeFormat::Newick => to_newick(tree) + "\n",
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Cluster(a) => cmd_cluster(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Gen(a) => cmd_gen(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

/// Runs a 1D algorithm on sorted coordinates and maps positions back to
/// the original point indices.
fn on_sorted_line(
    points: &PointSet,
    run: impl FnOnce(&[f64]) -> hcut::Result<(Dendrogram, Option<AlgorithmTrace>)>,
) -> CliResult<(Dendrogram, Option<AlgorithmTrace>)> {
    let xs = points.coords_1d()?;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let (tree, trace) = run(&sorted)?;
    let trace = trace.map(|mut t| {
        t.order = order.clone();
        t
    });
    Ok((tree.relabel(&order)?, trace))
}

fn perturbed(sim: &SimilarityView<'_>, eta: f64, seed: Seed) -> CliResult<SimilarityView<'static>> {
    if !(eta.is_finite() && (0.0..1.0).contains(&eta)) {
        return Err(CliError::invalid(format!("--perturb must lie in [0, 1), got {eta}")));
    }
    sim.require_quadratic("perturb")?;
    let mut rng = seed.split(u64::MAX).rng();
    let m = WeightMatrix::from_fn(sim.n(), |i, j| {
        let u: f64 = rng.random_range(-1.0..=1.0);
        (sim.weight(i, j) * (1.0 + eta * u)).clamp(0.0, 1.0)
    });
    Ok(SimilarityView::dense(m).with_limits(sim.limits()))
}

pub fn cluster(
    data: &Data,
    args: &ClusterArgs,
) -> CliResult<(Dendrogram, Option<AlgorithmTrace>, Option<Evaluation>)> {
    let limits = args.data.limits();
    let base = data.view(limits);
    let seed = Seed(args.seed);
    let jittered;
    let sim = match args.perturb {
        Some(eta) => {
            jittered = perturbed(&base, eta, seed)?;
            &jittered
        }
        None => &base,
    };
    let (tree, trace) = match args.algo {
        Algo::Prc => {
            let (t, tr) = projected_random_cut_traced(data.points(args.algo)?, seed)?;
            (t, Some(tr))
        }
        Algo::Rc => on_sorted_line(data.points(args.algo)?, |xs| {
            random_cut_traced(xs, seed).map(|(t, tr)| (t, Some(tr)))
        })?,
        Algo::Greedy => on_sorted_line(data.points(args.algo)?, |xs| greedy_cut(xs).map(|t| (t, None)))?,
        Algo::Al => {
            let (t, tr) = average_linkage(sim)?;
            (t, Some(tr))
        }
        Algo::Sl => {
            let (t, tr) = agglomerate(sim, Linkage::Single)?;
            (t, Some(tr))
        }
        Algo::Opt => (optimal_tree_bruteforce(sim)?.tree, None),
    };
    let evaluation = if args.evaluate {
        // Scores always refer to the unperturbed weights.
        let mut ev = evaluate(&tree, &base, args.bounds.into())?;
        if args.repeats > 1 {
            let randomized = match args.algo {
                Algo::Prc => Some(Randomized::ProjectedRandomCut),
                Algo::Rc => Some(Randomized::RandomCut),
                _ => None,
            };
            match randomized {
                Some(alg) => {
                    let points = data.points(args.algo)?;
                    ev.estimate = Some(match alg {
                        Randomized::RandomCut => {
                            let xs = points.coords_1d()?;
                            let mut sorted = xs.to_vec();
                            sorted.sort_by(f64::total_cmp);
                            let sorted = PointSet::from_1d(&sorted)?;
                            let kernel = base.kernel().expect("point input").clone();
                            let view = SimilarityView::lazy(&sorted, kernel).with_limits(limits);
                            expected_f_plus(alg, &sorted, &view, args.repeats, seed)?
                        }
                        Randomized::ProjectedRandomCut => expected_f_plus(alg, points, &base, args.repeats, seed)?,
                    });
                }
                None => log::warn!("--repeats ignored: --algo {} is deterministic", algo_name(args.algo)),
            }
        }
        Some(ev)
    } else {
        None
    };
    Ok((tree, trace, evaluation))
}

fn cmd_cluster(args: &ClusterArgs) -> CliResult<()> {
    args.data.validate()?;
    if args.repeats == 0 {
        return Err(CliError::invalid("--repeats must be at least 1"));
    }
    let data = args.data.load()?;
    let (tree, trace, evaluation) = cluster(&data, args)?;
    emit(args.output.as_deref(), &render_tree(&tree, args.format))?;
    if let (Some(path), Some(trace)) = (&args.trace, &trace) {
        emit(Some(path), &trace.to_json_lines())?;
    }
    if let Some(ev) = evaluation {
        emit(args.report.as_deref(), &(ev.to_json() + "\n"))?;
    }
    Ok(())
}

fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<()> {
    args.data.validate()?;
    let text = fs::read_to_string(&args.tree).map_err(|e| CliError::io(&args.tree, e))?;
    let tree = parse_tree(&text)?;
    let data = args.data.load()?;
    if tree.n() != data.n() {
        return Err(CliError::invalid(format!(
            "the tree has {} leaves but the data has {} points",
            tree.n(),
            data.n()
        )));
    }
    let sim = data.view(args.data.limits());
    let ev = evaluate(&tree, &sim, args.bounds.into())?;
    emit(None, &(ev.to_json() + "\n"))
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::invalid(format!("--{flag} is required for the {family} family")))
}

fn parse_edges(text: &str) -> CliResult<Vec<(usize, usize)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (u, v) = pair
                .trim()
                .split_once('-')
                .ok_or_else(|| CliError::invalid(format!("edge '{pair}' is not of the form u-v")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::invalid(format!("bad node '{s}' in edge '{pair}'")))
            };
            Ok((parse(u)?, parse(v)?))
        })
        .collect()
}

/// The descriptor named by `--spec` or assembled from the family flags.
pub fn gen_spec(a: &GenArgs) -> CliResult<InstanceSpec> {
    if let Some(spec) = &a.spec {
        let text = if spec.trim_start().starts_with('{') {
            spec.clone()
        } else {
            fs::read_to_string(spec).map_err(|e| CliError::io(Path::new(spec), e))?
        };
        return serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("bad instance descriptor: {e}")));
    }
    let family = a.family.expect("clap requires --family without --spec");
    let seed = Seed(a.seed);
    Ok(match family {
        Family::FourPoint => InstanceSpec::FourPoint {
            delta: need(a.delta, "delta", "four-point")?,
            sigma: a.sigma.unwrap_or(1.0),
            shift: a.shift,
        },
        Family::SpacedLine => InstanceSpec::SpacedLine {
            n: need(a.n, "n", "spaced-line")?,
            delta: need(a.delta, "delta", "spaced-line")?,
            epsilon: need(a.epsilon, "epsilon", "spaced-line")?,
            sigma: need(a.sigma, "sigma", "spaced-line")?,
        },
        Family::CliqueEmbed => InstanceSpec::CliqueEmbed {
            n: need(a.n, "n", "clique-embed")?,
            tau: need(a.tau, "tau", "clique-embed")?,
            sigma: need(a.sigma, "sigma", "clique-embed")?,
            c: a.c,
        },
        Family::GraphEncode => {
            let n = need(a.n, "n", "graph-encode")?;
            let graph = match (&a.edges, a.edge_prob) {
                (Some(e), None) => Graph::new(n, parse_edges(e)?)?,
                (None, Some(p)) => Graph::random(n, p, seed)?,
                _ => return Err(CliError::invalid("graph-encode needs exactly one of --edges and --edge-prob")),
            };
            InstanceSpec::GraphEncode {
                graph,
                epsilon: need(a.epsilon, "epsilon", "graph-encode")?,
            }
        }
        Family::Random1d => InstanceSpec::Random1D {
            n: need(a.n, "n", "random-1d")?,
            lo: a.lo,
            hi: a.hi,
            seed,
        },
        Family::GaussianCloud => InstanceSpec::RandomGaussianCloud {
            n: need(a.n, "n", "gaussian-cloud")?,
            d: need(a.d, "d", "gaussian-cloud")?,
            seed,
        },
    })
}

pub fn points_csv(points: &PointSet) -> String {
    let mut out = String::with_capacity(points.len() * points.dim() * 12);
    for row in points.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn cmd_gen(a: &GenArgs) -> CliResult<()> {
    let spec = gen_spec(a)?;
    if a.print_spec {
        let text = serde_json::to_string(&spec).expect("descriptors serialize");
        return emit(a.output.as_deref(), &(text + "\n"));
    }
    let instance = spec.generate()?;
    let points = match a.jl_dim {
        Some(k) => jl_project(&instance.points, k, Seed(a.seed))?,
        None => instance.points,
    };
    if let Some(s) = instance.sigma {
        log::info!("instance bandwidth sigma = {s}");
    }
    emit(a.output.as_deref(), &points_csv(&points))
}

fn cmd_bench(a: &BenchArgs) -> CliResult<()> {
    let cfg = BenchConfig {
        sizes: parse_sizes(&a.sizes)?,
        dim: a.dim,
        seed: Seed(a.seed),
        trials: a.trials,
        input: a.input.clone().map(|p| {
            (
                p,
                CsvOptions {
                    header: a.header,
                    label_col: a.label_col,
                },
            )
        }),
        include_io: a.include_io,
        ..Default::default()
    };
    if cfg.include_io && cfg.input.is_none() {
        log::warn!("--include-io has no effect without --input");
    }
    let rows = run_bench(&cfg)?;
    emit(a.output.as_deref(), &render_csv(&rows))
}
