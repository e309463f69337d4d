use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use pacverify::driver::{export_model, verify_program, ModelFormat, Verdict, VerifyOptions};
use pacverify::frontend::parse_and_lower;
use pacverify::learner::Algorithm;
use pacverify::teacher::{PacParams, Strategy};
use pacverify::BitWidth;

#[derive(Parser)]
#[command(version, about = "Probabilistic assertion checking by learning feasible decision vectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the assertions of a program.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.9)]
    delta: f64,
    #[arg(long, default_value_t = 10)]
    batch_size: usize,
    #[arg(long, value_enum, default_value_t = LearnerArg::Lstar)]
    learner: LearnerArg,
    #[arg(long, value_enum, default_value_t = StrategyArg::Concolic)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    bit_width: u32,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Write the learned model here on ProbablyCorrect.
    #[arg(long)]
    emit_model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnerArg {
    Lstar,
    Kv,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Random,
    Concolic,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Dot,
    Json,
}

const USAGE_ERROR: u8 = 3;

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Command::Verify(args) = cli.command;
    match run(args) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}

fn run(args: VerifyArgs) -> Result<u8, String> {
    let source = std::fs::read_to_string(&args.file).map_err(|e| format!("{}: {e}", args.file.display()))?;
    let width = BitWidth::new(args.bit_width).map_err(|e| e.to_string())?;
    let mut pac = PacParams::new(args.epsilon, args.delta, args.batch_size).map_err(|e| e.to_string())?;
    pac.seed = args.seed;
    pac.strategy = match args.strategy {
        StrategyArg::Random => Strategy::RandomInput,
        StrategyArg::Concolic => Strategy::Concolic,
    };
    if let Some(t) = args.timeout {
        pac.timeout = Some(Duration::try_from_secs_f64(t).map_err(|e| format!("--timeout: {e}"))?);
    }
    let algorithm = match args.learner {
        LearnerArg::Lstar => Algorithm::LStar,
        LearnerArg::Kv => Algorithm::Kv,
    };
    let program = parse_and_lower(&source, width).map_err(|e| format!("{}: {e}", args.file.display()))?;
    let options = VerifyOptions {
        pac,
        algorithm,
        bit_width: width,
        ..VerifyOptions::default()
    };
    let verdict = verify_program(&program, &options).map_err(|e| e.to_string())?;
    println!("{verdict}");
    if let Verdict::BugFound { valuation, .. } = &verdict {
        for (input, value) in program.inputs().iter().zip(valuation.values()) {
            println!("  {} = {value}", input.name);
        }
    }
    print!("{}", verdict.stats().table());
    if let (Some(path), Some(model)) = (&args.emit_model, verdict.model()) {
        let format = match args.format {
            FormatArg::Dot => ModelFormat::Dot,
            FormatArg::Json => ModelFormat::Json,
        };
        std::fs::write(path, export_model(model, format)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(verdict.exit_code() as u8)
}
