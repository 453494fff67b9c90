use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hatcrystal::binf::BinfCrystal;
use hatcrystal::graphs::{bfs_generate, CrystalGraph, ExportFormat};
use hatcrystal::harness::{
    replay, run_check, run_suite, suite, summary_table, CheckResult, Conventions, Params, Profile, Status,
};
use hatcrystal::hat::{h_auto_in, iota_in, Folded};
use hatcrystal::hwcrystal::{HighestWeightCrystal, Multicharge};
use hatcrystal::{Crystal, CrystalError, FoldedIndex, Folding, GraphError, HarnessError, IndexSet, Residue, Weight};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "hatcrystal", version, about = "Folded crystals of affine type A at e = 2l")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a crystal truncation and print per-layer vertex and edge counts.
    Graph(GraphArgs),
    /// Run harness checks and print one JSON line per check.
    Verify(VerifyArgs),
    /// Image of an f-path of B(Lambda_0) of sl_l in B(Lambda_0 + Lambda_l).
    Iota(IotaArgs),
    /// Convert a saved JSON graph to DOT or JSON.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Binf,
    Hw,
    HatBinf,
    HatHw,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

impl Format {
    fn export(self) -> ExportFormat {
        match self {
            Format::Dot => ExportFormat::Dot,
            Format::Json => ExportFormat::Json,
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Format::Dot => "dot",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Quick,
    Full,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Rank of the unfolded models `binf` and `hw`.
    #[arg(long, default_value_t = 6)]
    e: u32,
    /// Rank of the folded models `hat-binf` and `hat-hw`.
    #[arg(long, default_value_t = 3)]
    ell: u32,
    /// Multicharge of the `hw` model, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
    charge: Vec<i64>,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Write the graph in this format; without `--out` the file is
    /// `<model>-d<depth>.<ext>` in the current directory.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    allow_l2: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    profile: ProfileArg,
    /// Run only these checks, with the parameters below.
    #[arg(long)]
    check: Vec<String>,
    #[arg(long, default_value_t = 3)]
    ell: u32,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    allow_l2: bool,
    /// Include wall-clock times in the JSON lines.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct IotaArgs {
    #[arg(long, default_value_t = 3)]
    ell: u32,
    #[arg(long)]
    allow_l2: bool,
    /// Letters of the path in Z/lZ, applied left to right.
    letters: Vec<u32>,
}

#[derive(Args)]
struct ExportArgs {
    /// A graph previously written with `graph --format json`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Config(String),
    Io(String),
}

impl From<CrystalError> for Failure {
    fn from(e: CrystalError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Graph(g) => g.into(),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("HATCRYSTAL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match cli.command {
        Command::Graph(a) => cmd_graph(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Iota(a) => cmd_iota(&a),
        Command::Export(a) => cmd_export(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}

fn folding(ell: u32, allow_l2: bool) -> Result<Folding, CrystalError> {
    Folding::with_small_rank(ell, allow_l2)
}

fn cmd_graph(a: &GraphArgs) -> Result<u8, Failure> {
    let g = match a.model {
        Model::Binf => generate(&BinfCrystal::new(IndexSet::new(a.e)?), a.depth),
        Model::Hw => {
            let idx = IndexSet::new(a.e)?;
            generate(&HighestWeightCrystal::new(idx, Multicharge::new(idx, &a.charge)?), a.depth)
        }
        Model::HatBinf => {
            let f = folding(a.ell, a.allow_l2)?;
            generate(&Folded::new(BinfCrystal::new(f.unfolded()), f, Weight::zero())?, a.depth)
        }
        Model::HatHw => {
            let f = folding(a.ell, a.allow_l2)?;
            let inner = HighestWeightCrystal::level_two(a.ell)?;
            generate(&Folded::new(inner, f, Weight::fundamental(Residue(0)))?, a.depth)
        }
    };
    let edges = g.layer_edge_counts();
    for (n, v) in g.layer_sizes().iter().enumerate() {
        println!("depth {n}: {v} vertices, {} edges to the next layer", edges.get(n).copied().unwrap_or(0));
    }
    let sizes: Vec<String> = g.layer_sizes().iter().map(|s| s.to_string()).collect();
    println!("layer sizes: {}", sizes.join(","));
    if let Some(format) = a.format.or(a.out.as_ref().map(|_| Format::Json)) {
        let path = a.out.clone().unwrap_or_else(|| {
            let name = a.model.to_possible_value().expect("not skipped").get_name().to_string();
            PathBuf::from(format!("{name}-d{}.{}", a.depth, format.extension()))
        });
        g.export(format.export(), &path)?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn generate<C>(model: &C, depth: usize) -> CrystalGraph
where
    C: Crystal + Sync,
    C::Elem: Send + Sync,
{
    bfs_generate(model, depth)
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8, Failure> {
    let results: Vec<(Params, CheckResult)> = if a.check.is_empty() {
        let profile = match a.profile {
            ProfileArg::Quick => Profile::Quick,
            ProfileArg::Full => Profile::Full,
        };
        let params: Vec<Params> = suite(profile, Conventions::default()).into_iter().map(|(_, p)| p).collect();
        params.into_iter().zip(run_suite(profile, Conventions::default())).collect()
    } else {
        let mut p = Params { allow_l2: a.allow_l2, ..Params::default() }.with_ell(a.ell);
        p.depth = a.depth.unwrap_or(p.depth);
        p.samples = a.samples.unwrap_or(p.samples);
        p.seed = a.seed.unwrap_or(p.seed);
        let mut out = Vec::new();
        for name in &a.check {
            out.push((p, run_check(name, &p)?));
        }
        out
    };
    for (_, r) in &results {
        println!("{}", r.to_json_line(a.timing));
    }
    eprint!("{}", summary_table(&results.iter().map(|(_, r)| r.clone()).collect::<Vec<_>>()));
    let mut code = 0;
    for (p, r) in &results {
        match r.status {
            Status::Pass => {}
            Status::Fail => {
                code = code.max(EXIT_FAIL);
                let cx = r.counterexample.as_ref().expect("a failing check has a counterexample");
                eprintln!("FAIL {}: {}", r.name, r.detail);
                eprintln!("  counterexample: {cx}");
                if let Ok(Some(reason)) = replay(&r.name, p, cx) {
                    eprintln!("  replayed: {reason}");
                }
            }
            Status::Error => {
                code = EXIT_CONFIG;
                eprintln!("ERROR {}: {}", r.name, r.detail);
            }
        }
    }
    Ok(code)
}

fn cmd_iota(a: &IotaArgs) -> Result<u8, Failure> {
    let f = folding(a.ell, a.allow_l2)?;
    let level_one = HighestWeightCrystal::level_one(a.ell)?;
    let level_two = HighestWeightCrystal::level_two(a.ell)?;
    let path: Vec<FoldedIndex> = a.letters.iter().map(|&x| FoldedIndex(x)).collect();
    let image = match iota_in(&level_one, &level_two, &f, &path) {
        Ok(b) => b,
        Err(CrystalError::InvalidPath { step, letter }) => {
            return Err(Failure::Config(format!("invalid path: f_{letter} vanishes at step {step}")))
        }
        Err(e) => return Err(e.into()),
    };
    let fixed = h_auto_in(&level_two, &f, &image)? == image;
    assert!(fixed, "the image of a path is fixed by h");
    println!("{image}  h-fixed: {fixed}");
    Ok(0)
}

fn cmd_export(a: &ExportArgs) -> Result<u8, Failure> {
    let g = CrystalGraph::import(&a.input)?;
    g.export(a.format.export(), &a.out)?;
    println!("wrote {} ({} vertices)", a.out.display(), g.vertices.len());
    Ok(0)
}
