//! `morseph`: analyze graphs, generate model networks and compare diagrams.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use morseph::distance::{self, DistanceOptions, Ensemble, Essentials, Metric, Scope};
use morseph::graph::{self, Graph};
use morseph::models::ModelSpec;
use morseph::par::{self, Execution};
use morseph::persistence::{self, Barcode, PersistenceDiagram};
use morseph::pipeline::{self, FiltrationKind, PipelineConfig};
use morseph::{morse, Error};

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser)]
#[command(name = "morseph", version, about = "Persistent homology of networks via discrete Morse filtrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one graph and write summary, diagram and barcode.
    Analyze(AnalyzeArgs),
    /// Write seeded model samples as edge lists with JSON provenance.
    Generate(GenerateArgs),
    /// Distance matrix between diagram files or generated ensembles.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SeedArg {
    /// Random seed; falls back to MORSEPH_SEED, then to a fresh random seed.
    #[arg(long, env = "MORSEPH_SEED")]
    seed: Option<u64>,
}

impl SeedArg {
    fn resolve(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            let seed = rand::random();
            info!("no seed given, using {seed}");
            seed
        })
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// Highest simplex dimension of the clique complex.
    #[arg(long, default_value_t = pipeline::DEFAULT_CAP)]
    cap: usize,
    #[arg(long, value_enum, default_value_t = FiltrationArg::Morse)]
    filtration: FiltrationArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FiltrationArg {
    Morse,
    Dimension,
}

impl From<FiltrationArg> for FiltrationKind {
    fn from(f: FiltrationArg) -> Self {
        match f {
            FiltrationArg::Morse => FiltrationKind::Morse,
            FiltrationArg::Dimension => FiltrationKind::Dimension,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge-list file.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    input: Option<PathBuf>,
    /// Model specification such as `er:n=1000,p=0.004`.
    #[arg(long)]
    model: Option<String>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[command(flatten)]
    seed: SeedArg,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write a per-simplex Morse dump.
    #[arg(long)]
    dump: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    model: String,
    /// Number of samples; sample i uses seed + i.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Bottleneck,
    Wasserstein,
}

#[derive(Clone, Copy, ValueEnum)]
enum EssentialsArg {
    Normalized,
    Raw,
}

#[derive(Args)]
struct CompareArgs {
    /// Diagram files (CSV, JSON or barcode CSV) forming the first ensemble.
    #[arg(long, num_args = 1..)]
    left: Vec<PathBuf>,
    /// Diagram files forming the second ensemble.
    #[arg(long, num_args = 1..)]
    right: Vec<PathBuf>,
    /// Model ensembles to generate and compare; repeat for several models.
    /// An optional `label=` prefix names the ensemble.
    #[arg(long = "model")]
    models: Vec<String>,
    /// Samples per model ensemble.
    #[arg(long, default_value_t = 10)]
    count: u64,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, value_enum, default_value_t = MetricArg::Bottleneck)]
    metric: MetricArg,
    /// Wasserstein exponent.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, value_enum, default_value_t = EssentialsArg::Normalized)]
    essentials: EssentialsArg,
    /// Restrict to one homology dimension instead of the total diagram.
    #[arg(long)]
    dim: Option<usize>,
    /// Matrix CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-pair distances CSV.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
}

/// An error with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Argument(_) | Error::Unsupported(_) => EXIT_USAGE,
            Error::Io(_) | Error::Parse { .. } | Error::Json(_) => EXIT_IO,
            Error::Structure(_) | Error::Invariant(_) => EXIT_INVARIANT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_context(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Generate(args) => generate(args),
        Command::Compare(args) => compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("morseph: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(io_context(path))
}

fn create_dir(path: &Path) -> Result<(), Failure> {
    fs::create_dir_all(path).map_err(io_context(path))
}

fn parse_model(text: &str) -> Result<ModelSpec, Failure> {
    Ok(text.parse::<ModelSpec>()?)
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let seed = args.seed.resolve();
    let (g, source) = match (&args.input, &args.model) {
        (Some(path), None) => {
            let file = fs::File::open(path).map_err(io_context(path))?;
            let g = graph::load_edge_list(BufReader::new(file))?;
            (g, serde_json::json!({ "file": path.display().to_string() }))
        }
        (None, Some(text)) => {
            let spec = parse_model(text)?;
            let g = spec.generate(seed)?;
            let provenance = spec.provenance(seed, &g);
            (g, serde_json::json!({ "model": provenance }))
        }
        _ => return Err(usage("exactly one of --input and --model is required")),
    };
    let config = PipelineConfig {
        cap: args.pipeline.cap,
        seed,
        filtration: args.pipeline.filtration.into(),
    };
    create_dir(&args.out)?;
    let analysis = match pipeline::analyze(&g, &config) {
        Ok(a) => a,
        Err(e @ Error::Invariant(_)) => {
            let complex = morseph::complex::CliqueComplex::build(&g, config.cap);
            write_file(&args.out.join("complex.dump"), &complex.dump())?;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };

    let mut summary = serde_json::to_value(&analysis.summary).map_err(Error::from)?;
    summary["input"] = source;
    let summary = serde_json::to_string_pretty(&summary).map_err(Error::from)? + "\n";
    write_file(&args.out.join("summary.json"), &summary)?;
    write_file(&args.out.join("diagram.csv"), &analysis.diagram.to_csv())?;
    write_file(&args.out.join("diagram.json"), &(analysis.diagram.to_json()? + "\n"))?;
    let barcode = persistence::normalize(&analysis.diagram, analysis.summary.w_n)?;
    write_file(&args.out.join("barcode.csv"), &barcode.to_csv())?;
    if args.dump {
        let dump = morse::dump(
            &analysis.complex,
            &analysis.morse,
            &analysis.critical,
            &analysis.filtration,
        );
        write_file(&args.out.join("morse.dump"), &dump)?;
    }
    let s = &analysis.summary;
    println!(
        "n={:?} m={:?} beta={:?} mu={} euler={} critical_weights={}",
        s.n,
        s.m,
        s.beta,
        s.mu.map_or("undefined".to_owned(), |mu| format!("{mu:.6}")),
        s.euler.simplices,
        s.critical_weights
    );
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    let spec = parse_model(&args.model)?;
    let seed = args.seed.resolve();
    create_dir(&args.out)?;
    for i in 0..args.count {
        let sample_seed = seed.wrapping_add(i);
        let g = spec.generate(sample_seed)?;
        let stem = format!("{}-{i:03}", spec.family());
        write_file(&args.out.join(format!("{stem}.edges")), &g.to_edge_list())?;
        let mut provenance = spec.provenance(sample_seed, &g);
        provenance["base_seed"] = seed.into();
        provenance["index"] = i.into();
        let text = serde_json::to_string_pretty(&provenance).map_err(Error::from)? + "\n";
        write_file(&args.out.join(format!("{stem}.json")), &text)?;
    }
    Ok(())
}

fn read_diagram(path: &Path) -> Result<PersistenceDiagram, Failure> {
    let text = fs::read_to_string(path).map_err(io_context(path))?;
    let first = text.lines().next().unwrap_or("").trim();
    let with_path = |e: Error| {
        let f = Failure::from(e);
        Failure {
            message: format!("{}: {}", path.display(), f.message),
            ..f
        }
    };
    let d = if first.starts_with('{') {
        PersistenceDiagram::from_json(&text).map_err(with_path)?
    } else if first == "dim,birth,death" {
        Barcode::diagram_from_csv(text.as_bytes(), 0).map_err(with_path)?
    } else {
        let mut d = PersistenceDiagram::from_csv(text.as_bytes(), 0).map_err(with_path)?;
        // a bare CSV carries no normalization constant; use the sibling JSON if present
        let sibling = path.with_extension("json");
        if let Ok(json) = fs::read_to_string(&sibling) {
            if let Ok(meta) = PersistenceDiagram::from_json(&json) {
                d.w_n = meta.w_n;
            }
        }
        d
    };
    Ok(d)
}

fn split_label(text: &str) -> (Option<&str>, &str) {
    match text.split_once('=') {
        Some((label, rest)) if !label.contains(':') && rest.contains(':') => (Some(label), rest),
        _ => (None, text),
    }
}

fn compare(args: CompareArgs) -> Result<(), Failure> {
    let metric = match args.metric {
        MetricArg::Bottleneck => Metric::Bottleneck,
        MetricArg::Wasserstein => Metric::Wasserstein(args.q),
    };
    metric.validate()?;
    let opts = DistanceOptions {
        scope: args.dim.map_or(Scope::Total, Scope::Dimension),
        essentials: match args.essentials {
            EssentialsArg::Normalized => Essentials::Normalized,
            EssentialsArg::Raw => Essentials::Raw,
        },
    };
    let exec = match args.jobs {
        Some(0) => return Err(usage("--jobs must be positive")),
        Some(1) => Execution::Sequential,
        _ => Execution::Parallel,
    };
    let run = || compare_inner(&args, metric, &opts, exec);
    match args.jobs {
        #[cfg(feature = "parallel")]
        Some(n) if n > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| usage(e.to_string()))?
            .install(run),
        _ => run(),
    }
}

fn compare_inner(
    args: &CompareArgs,
    metric: Metric,
    opts: &DistanceOptions,
    exec: Execution,
) -> Result<(), Failure> {
    let from_files = !args.left.is_empty() || !args.right.is_empty();
    let ensembles = if from_files {
        if !args.models.is_empty() {
            return Err(usage("use either diagram files or --model ensembles, not both"));
        }
        if args.left.is_empty() || args.right.is_empty() {
            return Err(usage("both --left and --right need at least one diagram"));
        }
        let load = |paths: &[PathBuf]| paths.iter().map(|p| read_diagram(p)).collect::<Result<Vec<_>, _>>();
        vec![
            Ensemble {
                label: "left".into(),
                diagrams: load(&args.left)?,
            },
            Ensemble {
                label: "right".into(),
                diagrams: load(&args.right)?,
            },
        ]
    } else {
        if args.models.is_empty() {
            return Err(usage("give --left/--right diagram files or at least one --model"));
        }
        if args.count == 0 {
            return Err(usage("--count must be positive"));
        }
        let seed = args.seed.resolve();
        let config = PipelineConfig {
            cap: args.pipeline.cap,
            seed,
            filtration: args.pipeline.filtration.into(),
        };
        let mut ensembles = Vec::new();
        for text in &args.models {
            let (label, spec_text) = split_label(text);
            let spec = parse_model(spec_text)?;
            let label = label.map_or_else(|| spec.to_string(), str::to_owned);
            info!("generating {} samples of {spec}", args.count);
            let diagrams = par::map_range_with(exec, args.count as usize, |i| {
                let sample_seed = seed.wrapping_add(i as u64);
                let g: Graph = spec.generate(sample_seed)?;
                pipeline::diagram(&g, &PipelineConfig { seed: sample_seed, ..config })
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            ensembles.push(Ensemble { label, diagrams });
        }
        ensembles
    };

    let matrix = distance::distance_matrix(&ensembles, metric, opts, exec)?;
    match &args.out {
        Some(path) => write_file(path, &matrix.to_csv())?,
        None => io::stdout().write_all(matrix.to_csv().as_bytes())?,
    }
    if let Some(path) = &args.pairs {
        let mut text = String::from("modelA,i,modelB,j,distance\n");
        for p in &matrix.pairs {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                distance::csv_field(&ensembles[p.a].label),
                p.i,
                distance::csv_field(&ensembles[p.b].label),
                p.j,
                p.distance
            ));
        }
        write_file(path, &text)?;
    }
    Ok(())
}
