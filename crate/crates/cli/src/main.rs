//! `selfsim`: command-line front end. Every verb prints a block of
//! `key: value` lines; exit status is 0 on success, 2 when a scan ends
//! UNKNOWN and 1 on errors.

mod block;
mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "selfsim", version, about = "Experiments on self-similar sets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Arithmetic backend: exact, double, float or float(DIGITS). Defaults to
    /// the backend declared by the specification.
    #[arg(long, global = true)]
    backend: Option<String>,
    /// Series truncation K for the Bandt-Graf parameter (same as --param K=..).
    #[arg(long, global = true)]
    truncation: Option<u32>,
    /// Example parameter override, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", global = true)]
    params: Vec<String>,
    /// Worker threads for parallel stages; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Similarity dimension (Moran root capped at the ambient dimension).
    Simdim { spec: String },
    /// The stopping set I_r.
    Stopping {
        spec: String,
        #[arg(long)]
        r: String,
        /// Words to list.
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Exact overlaps S_a = S_b among words up to a level (exact backend).
    OverlapScan {
        spec: String,
        #[arg(long)]
        depth: usize,
        /// Also report the reduced similarity dimension at this scale.
        #[arg(long)]
        reduced_r: Option<String>,
    },
    /// Weak separation scan over pruned relative maps.
    WspScan {
        spec: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value = "1e-6")]
        epsilon: String,
        /// Prune relative maps whose cube image is farther than this from the
        /// cube. Defaults to 2*sqrt(d).
        #[arg(long)]
        prune_bound: Option<String>,
        /// Witnesses to print.
        #[arg(long, default_value_t = 5)]
        show: usize,
    },
    /// Largest number of points S_a(z), a in I_r, in a closed r-ball.
    Multiplicity {
        spec: String,
        #[arg(long)]
        r: String,
        /// Comma-separated base point; defaults to the fixed point of map 1.
        #[arg(long)]
        z: Option<String>,
    },
    /// Box-counting or Assouad estimate from mesh covering counts.
    Dim {
        spec: String,
        #[arg(long, value_enum)]
        mode: DimMode,
        #[arg(long, default_value_t = 4)]
        min_exp: i32,
        #[arg(long, default_value_t = 12)]
        max_exp: i32,
        /// Least j - i between radius and mesh exponents.
        #[arg(long, default_value_t = 5)]
        min_gap: i32,
        /// Write the covering records here.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Tangent constructions.
    Tangent(TangentArgs),
    /// Rasterize the attractor to a PNG.
    Render {
        spec: String,
        #[arg(long)]
        out: String,
        #[arg(long)]
        resolution: String,
        #[arg(long, default_value_t = 1024)]
        size: u32,
    },
    /// Warnings, orthogonal group and fixed-point span of a system.
    Inspect {
        spec: String,
        /// Scale for the fixed-point span search.
        #[arg(long, default_value = "1/64")]
        r: String,
    },
    /// Bundled example systems.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Args, Debug)]
pub struct TangentArgs {
    /// Specification (not needed for --mode ek).
    spec: Option<String>,
    #[arg(long, value_enum)]
    mode: TangentMode,
    /// pseudo: number of points beyond a.
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// pseudo: Bandt-Graf witness levels, e.g. 1-6. Defaults to 1..K-2.
    #[arg(long)]
    witness_levels: Option<String>,
    /// ek: alpha.
    #[arg(long, default_value = "1/2")]
    alpha: String,
    /// ek: beta.
    #[arg(long, default_value = "1/3")]
    beta: String,
    /// ek: k; zoom: compare against E_k when given.
    #[arg(long)]
    k: Option<u32>,
    /// ek: ambient dimension.
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// zoom: T(x) = scale * x.
    #[arg(long)]
    scale: Option<String>,
    /// zoom: output piece size.
    #[arg(long)]
    resolution: Option<String>,
    /// zoom: lo,hi per axis, e.g. 0,1 or 0,1,0,1. Defaults to the unit cube.
    #[arg(long)]
    window: Option<String>,
}

#[derive(Subcommand, Debug)]
enum ExamplesAction {
    List,
    /// Print the JSON specification.
    Show { name: String },
    /// Similarity dimension and a depth-6 separation scan.
    Run { name: String },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum DimMode {
    Box,
    Assouad,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TangentMode {
    Pseudo,
    Ek,
    Zoom,
}

/// Result of a verb: the printed block and the exit status.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()?;
    }
    let g = &cli.global;
    match cli.command {
        Command::Simdim { spec } => commands::simdim(g, &spec),
        Command::Stopping { spec, r, limit } => commands::stopping(g, &spec, &r, limit),
        Command::OverlapScan {
            spec,
            depth,
            reduced_r,
        } => commands::overlap_scan(g, &spec, depth, reduced_r.as_deref()),
        Command::WspScan {
            spec,
            depth,
            epsilon,
            prune_bound,
            show,
        } => commands::wsp_scan(g, &spec, depth, &epsilon, prune_bound.as_deref(), show),
        Command::Multiplicity { spec, r, z } => commands::multiplicity(g, &spec, &r, z.as_deref()),
        Command::Dim {
            spec,
            mode,
            min_exp,
            max_exp,
            min_gap,
            csv,
        } => commands::dim(g, &spec, mode, min_exp, max_exp, min_gap, csv.as_deref()),
        Command::Tangent(args) => commands::tangent(g, &args),
        Command::Render {
            spec,
            out,
            resolution,
            size,
        } => commands::render(g, &spec, &out, &resolution, size),
        Command::Inspect { spec, r } => commands::inspect(g, &spec, &r),
        Command::Examples { action } => match action {
            ExamplesAction::List => commands::examples_list(),
            ExamplesAction::Show { name } => commands::examples_show(g, &name),
            ExamplesAction::Run { name } => commands::examples_run(g, &name),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(o) => {
            print!("{}", o.text);
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
