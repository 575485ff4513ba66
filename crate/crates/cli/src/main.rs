use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use levy_stein::task::{emit, parse_spec, run_task, Format, TaskError, TaskSpec};

#[derive(Parser)]
#[command(name = "levy-stein", version, about = "Covariance identities, variance bounds and premiums for infinitely divisible laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task described by a JSON spec file ("-" reads stdin).
    Run {
        spec: PathBuf,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

fn read_spec(path: &PathBuf) -> Result<String, TaskError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| TaskError::Other(format!("reading stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| TaskError::Other(format!("reading {}: {e}", path.display())))
    }
}

fn apply_overrides(spec: &mut TaskSpec, format: Option<OutputFormat>, seed: Option<u64>, samples: Option<u64>) {
    let mut overridden = |field: &str| spec.defaults_applied.retain(|d| d != field);
    if let Some(f) = format {
        overridden("output");
        spec.output = match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        };
    }
    if let Some(s) = seed {
        overridden("mc.seed");
        spec.mc.seed = s;
    }
    if let Some(n) = samples {
        overridden("mc.n_samples");
        spec.mc.n_samples = n;
    }
}

fn execute(cli: Cli) -> Result<Vec<u8>, TaskError> {
    let Command::Run {
        spec,
        format,
        seed,
        samples,
    } = cli.command;
    let text = read_spec(&spec)?;
    let mut task = parse_spec(&text)?;
    apply_overrides(&mut task, format, seed, samples);
    task.validate()?;
    let report = run_task(&task)?;
    Ok(emit(&report, task.output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(bytes) => {
            let mut out = io::stdout().lock();
            if out.write_all(&bytes).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("levy-stein: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
