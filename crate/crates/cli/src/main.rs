use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use coiso_cli::spec::OutputFormat;
use coiso_cli::{run, schema, CliError, ExperimentSpec};

#[derive(Parser)]
#[command(name = "coiso", version, about = "Coisotropic Maslov index and hypersurface geometry experiments")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment spec and write its report.
    Run {
        spec: PathBuf,
        /// Report path; overrides the spec's output path. Without either, the report goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// JSON object of tolerance overrides, applied after the spec's own.
        #[arg(long)]
        tol_file: Option<PathBuf>,
        /// Record wall time in the report (makes reports differ between runs).
        #[arg(long)]
        timing: bool,
    },
    /// Print the JSON schema of experiment specs.
    Schema,
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("COISO_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Schema(format!("COISO_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(CliError::Schema("COISO_THREADS must be positive".into()));
        }
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn execute(spec_path: &PathBuf, out: Option<PathBuf>, seed: Option<u64>, tol_file: Option<PathBuf>, timing: bool) -> Result<i32, CliError> {
    configure_threads()?;
    let mut spec = ExperimentSpec::from_json(&read(spec_path)?)?;
    if let Some(s) = seed {
        spec.set_seed(s);
    }
    if let Some(path) = tol_file {
        let extra: std::collections::BTreeMap<String, f64> =
            serde_json::from_str(&read(&path)?).map_err(|e| CliError::Schema(format!("tolerance file: {e}")))?;
        spec.tolerance_overrides_mut().extend(extra);
        spec.validate()?;
    }
    let start = Instant::now();
    let mut report = run(&spec)?;
    if timing {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    let format = spec.output().map(|o| o.format).unwrap_or_default();
    let text = match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.comparisons_csv(),
    };
    match out.or_else(|| spec.output().map(|o| PathBuf::from(&o.path))) {
        Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => print!("{text}"),
    }
    if let Some(e) = &report.error {
        eprintln!("computation failed: {e}");
        return Ok(3);
    }
    if !report.passed {
        for c in report.comparisons.iter().filter(|c| !c.pass) {
            eprintln!("oracle check failed: {} (value {}, oracle {}, residual {:e})", c.name, c.value, c.oracle, c.residual);
        }
        return Ok(1);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match args.command {
        Command::Schema => {
            println!("{}", serde_json::to_string_pretty(&schema()).expect("schema serializes"));
            0
        }
        Command::Run { spec, out, seed, tol_file, timing } => match execute(&spec, out, seed, tol_file, timing) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        },
    };
    ExitCode::from(code as u8)
}
