use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lsa_cli::run::{
    cmd_eval, cmd_make_deconv, cmd_make_repulsion, cmd_solve, DeconvConfig, InitSpec, Method, RunConfig, ShapeKind,
    SolverSettings,
};
use lsa_core::problems::RepulsionParams;
use lsa_core::TrustRegionParams;

/// Binary pairwise energy minimization with local submodular approximations.
#[derive(Debug, Parser)]
#[command(name = "lsa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimize an energy file with one of the solvers.
    Solve(SolveArgs),
    /// Synthesize a binary deconvolution instance and its energy.
    MakeDeconv(DeconvArgs),
    /// Build a segmentation energy with attraction and repulsion.
    MakeRepulsion(RepulsionArgs),
    /// Print the energy of a labeling.
    Eval {
        #[arg(long)]
        energy: PathBuf,
        #[arg(long)]
        labeling: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Energy file (BPBE text format).
    #[arg(long)]
    energy: PathBuf,
    #[arg(long, value_enum, default_value = "lsa-tr")]
    method: Method,
    /// `all-ones`, `all-zeros`, or a PGM labeling file.
    #[arg(long, default_value = "all-ones")]
    init: InitSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda0: f64,
    #[arg(long, default_value_t = 2.0)]
    lambda_mult: f64,
    #[arg(long, default_value_t = 0.0)]
    tau1: f64,
    #[arg(long, default_value_t = 0.25)]
    tau2: f64,
    #[arg(long, default_value_t = 1e6)]
    lambda_max: f64,
    /// Permutation bounds: draw the coins once instead of every iteration.
    #[arg(long)]
    fixed_permutation: bool,
    /// Row length of the output labeling image.
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    labeling_out: Option<PathBuf>,
    #[arg(long)]
    trace_out: Option<PathBuf>,
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DeconvArgs {
    #[arg(long, default_value_t = 32)]
    width: usize,
    #[arg(long, default_value_t = 32)]
    height: usize,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "disk")]
    shape: ShapeKind,
    /// Writes `<prefix>.observed.pgm`, `<prefix>.truth.pgm` and `<prefix>.bpbe`.
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Debug, Args)]
struct RepulsionArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long, default_value_t = 0.4)]
    mu_fg: f64,
    #[arg(long, default_value_t = 0.6)]
    mu_bg: f64,
    #[arg(long, default_value_t = 0.2)]
    sigma_app: f64,
    #[arg(long, default_value_t = 100.0)]
    lambda_reg: f64,
    #[arg(long, default_value_t = 0.06)]
    c: f64,
    #[arg(long)]
    out: PathBuf,
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Solve(a) => {
            let cfg = RunConfig {
                energy: a.energy,
                init: a.init,
                settings: SolverSettings {
                    method: a.method,
                    trust_region: TrustRegionParams {
                        lambda0: a.lambda0,
                        lambda_mult: a.lambda_mult,
                        accept_ratio: a.tau1,
                        expand_ratio: a.tau2,
                        max_iters: a.max_iters,
                        lambda_max: a.lambda_max,
                    },
                    seed: a.seed,
                    max_iters: a.max_iters,
                    redraw: !a.fixed_permutation,
                },
                labeling_out: a.labeling_out,
                trace_out: a.trace_out,
                summary_out: a.summary_out,
                width: a.width,
            };
            print!("{}", cmd_solve(&cfg)?.render());
        }
        Command::MakeDeconv(a) => {
            let cfg = DeconvConfig {
                width: a.width,
                height: a.height,
                sigma: a.sigma,
                seed: a.seed,
                shape: a.shape,
                out_prefix: a.out_prefix,
            };
            print!("{}", cmd_make_deconv(&cfg)?.render());
        }
        Command::MakeRepulsion(a) => {
            let params = RepulsionParams {
                mu_fg: a.mu_fg,
                mu_bg: a.mu_bg,
                sigma_app: a.sigma_app,
                lambda_reg: a.lambda_reg,
                c: a.c,
            };
            print!("{}", cmd_make_repulsion(&a.image, &params, &a.out)?.render());
        }
        Command::Eval { energy, labeling } => {
            println!("energy={:?}", cmd_eval(&energy, &labeling)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
