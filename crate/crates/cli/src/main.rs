use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use softwg_cli::{dump_matrix, run, CliError, Context, Experiment, Format, RunConfig};

/// Soft waveguide experiments: transverse ground states, variational
/// certificates, 2D spectra and angle sweeps.
#[derive(Debug, Parser)]
#[command(name = "softwg", version)]
struct Args {
    /// JSON run configuration.
    config: PathBuf,
    #[arg(long, value_enum)]
    experiment: Experiment,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads; falls back to SOFTWG_THREADS, then all cores.
    #[arg(long, env = "SOFTWG_THREADS")]
    threads: Option<usize>,
    /// Also write the coarsest-level matrix in coordinate format.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    #[arg(long)]
    verbose: bool,
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let cfg = RunConfig::from_path(&args.config)?;
    let ctx = Context {
        verbose: args.verbose,
    };
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    if let Some(path) = &args.dump_matrix {
        dump_matrix(&cfg, BufWriter::new(File::create(path)?))?;
        ctx.note(&format!("matrix written to {}", path.display()));
    }
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            let code = run(args.experiment, &cfg, args.format, &mut w, &ctx)?;
            w.flush()?;
            Ok(code)
        }
        None => run(args.experiment, &cfg, args.format, io::stdout().lock(), &ctx),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("softwg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
