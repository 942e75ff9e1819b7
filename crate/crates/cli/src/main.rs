use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use uav_noma::experiment::{self, EngineChoice, PRESETS};
use uav_noma::Error;

#[derive(Parser)]
#[command(name = "uav-noma", version, about = "Sum-rate experiments for UAV-relayed multi-way NOMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config, a preset, or a config merged over a preset.
    Run(RunArgs),
    /// List the built-in presets.
    Presets,
    /// Print a preset as a JSON config document.
    Show { name: String },
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON config file. Keys override the preset when both are given.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(short, long)]
    preset: Option<String>,
    /// CSV destination. Defaults to `experiment.output`, else stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials; 0 disables simulation.
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, env = "UAV_NOMA_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = EngineArg::Both)]
    engine: EngineArg,
    /// Suppress the summary.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Analytical,
    Mc,
    Both,
}

impl From<EngineArg> for EngineChoice {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Analytical => EngineChoice::Analytical,
            EngineArg::Mc => EngineChoice::MonteCarlo,
            EngineArg::Both => EngineChoice::Both,
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err.category() {
        "config" => 3,
        "validation" => 4,
        "numeric" => 5,
        "io" => 6,
        "argument" => 7,
        _ => 1,
    }
}

fn run(args: RunArgs) -> uav_noma::Result<()> {
    let text = match &args.config {
        Some(path) => Some(
            std::fs::read_to_string(path).map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let mut spec = experiment::load(args.preset.as_deref(), text.as_deref())?;
    if let Some(seed) = args.seed {
        spec.trials.seed = seed;
    }
    if let Some(trials) = args.trials {
        spec.trials.trials = trials;
    }
    if let Some(workers) = args.workers {
        spec.trials.workers = workers;
    }
    if spec.trials.workers == 0 {
        return Err(Error::Argument("workers must be >= 1".into()));
    }

    let out = experiment::run(&spec, args.engine.into())?;
    match args.output.or(spec.output) {
        Some(path) => {
            std::fs::write(&path, &out.csv).map_err(|e| Error::Io(format!("writing {}: {e}", path.display())))?;
            if !args.quiet {
                println!("{}", out.summary);
                println!("wrote {}", path.display());
            }
        }
        None => {
            print!("{}", out.csv);
            if !args.quiet {
                eprintln!("{}", out.summary);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Presets => {
            for name in PRESETS {
                println!("{name}");
            }
            Ok(())
        }
        Command::Show { name } => experiment::preset(&name).map(|doc| {
            println!("{}", serde_json::to_string_pretty(&doc).expect("preset documents serialize"));
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error[{}]: {err}", err.category());
            ExitCode::from(exit_code(&err))
        }
    }
}
