use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vineyard_lab::grid::Topology;
use vineyard_lab::heat::HomotopyMode;
use vineyard_lab::io;
use vineyard_lab::matching::{bottleneck, wasserstein};
use vineyard_lab::pipeline::{run_pipeline, FieldSource, PipelineConfig};
use vineyard_lab::synth::{self, Pattern};
use vineyard_lab::Result;

#[derive(Parser)]
#[command(name = "vineyard-lab", version, about = "Heat-flow vineyards of persistence diagrams on gridded surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    Square,
    Torus,
    Klein,
    Sphere,
}

impl From<TopologyArg> for Topology {
    fn from(t: TopologyArg) -> Self {
        match t {
            TopologyArg::Square => Topology::Square,
            TopologyArg::Torus => Topology::Torus,
            TopologyArg::Klein => Topology::KleinBottle,
            TopologyArg::Sphere => Topology::Sphere,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    AddF,
    DifferenceOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Bottleneck,
    Wasserstein,
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternArg {
    PlateauRow,
    Cones,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Run heat flow from f to g and write diagrams, vineyard, statistics and matchings.
    Run {
        /// First field: a PGM/CSV path or synth:<pattern>:<n>.
        #[arg(long)]
        f: String,
        /// Second field: a PGM/CSV path or synth:<pattern>:<n> (generated with seed + 1).
        #[arg(long)]
        g: String,
        #[arg(long, value_enum, default_value = "square")]
        topology: TopologyArg,
        /// Homotopy: the difference field alone, or f plus the difference field.
        #[arg(long, value_enum, default_value = "difference-only")]
        mode: ModeArg,
        /// Stop once no point changes by more than this in one step.
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 500)]
        max_steps: usize,
        /// Degrees for total persistence and Wasserstein distances.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        q: Vec<f64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Seed for synthetic inputs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write SVG plots.
        #[arg(long)]
        svg: bool,
    },
    /// Distance between two diagram CSV files, per dimension.
    Match {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value = "bottleneck")]
        criterion: CriterionArg,
        /// Wasserstein degree.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
    },
    /// Write a synthetic field (PGM for a .pgm path, CSV otherwise).
    Synth {
        #[arg(long, value_enum)]
        pattern: PatternArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            f,
            g,
            topology,
            mode,
            epsilon,
            max_steps,
            q,
            out,
            seed,
            svg,
        } => {
            let cfg = PipelineConfig {
                input_f: f.parse::<FieldSource>()?,
                input_g: g.parse::<FieldSource>()?,
                topology: topology.into(),
                mode: match mode {
                    ModeArg::AddF => HomotopyMode::AddF,
                    ModeArg::DifferenceOnly => HomotopyMode::DifferenceOnly,
                },
                epsilon,
                max_steps,
                q_list: q,
                output_dir: out.clone(),
                seed,
                svg,
            };
            let output = run_pipeline(&cfg)?;
            println!(
                "{} steps, {} vines -> {}",
                output.run.final_step(),
                output.vineyard.vines.len(),
                out.display()
            );
        }
        Command::Match { a, b, criterion, q } => {
            let da = io::import_diagrams(&a)?;
            let db = io::import_diagrams(&b)?;
            if matches!(criterion, CriterionArg::Wasserstein) && !(q >= 1.0 && q.is_finite()) {
                return Err(vineyard_lab::Error::Input(format!("degree q must be finite and >= 1, got {q}")));
            }
            let mut dims: Vec<usize> = da.iter().chain(&db).map(|d| d.dim).collect();
            dims.sort_unstable();
            dims.dedup();
            println!("dim,criterion,q,cost,essential_a,essential_b");
            for dim in dims {
                let pick = |ds: &[vineyard_lab::persistence::PersistenceDiagram]| {
                    ds.iter()
                        .find(|d| d.dim == dim)
                        .cloned()
                        .unwrap_or_else(|| vineyard_lab::persistence::PersistenceDiagram::empty(dim))
                };
                let (x, y) = (pick(&da), pick(&db));
                let (name, qs, m) = match criterion {
                    CriterionArg::Bottleneck => ("bottleneck", String::new(), bottleneck(&x, &y)),
                    CriterionArg::Wasserstein => ("wasserstein", q.to_string(), wasserstein(&x, &y, q)),
                };
                println!(
                    "{dim},{name},{qs},{},{},{}",
                    m.cost, m.essential_counts.0, m.essential_counts.1
                );
            }
        }
        Command::Synth { pattern, n, seed, out } => {
            let pattern = match pattern {
                PatternArg::PlateauRow => Pattern::PlateauRow,
                PatternArg::Cones => Pattern::Cones,
                PatternArg::Random => Pattern::Random,
            };
            io::write_field(&synth::generate(pattern, n, seed)?, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
