use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cstar_fixpoint::cli::{
    resolve_seed, run_command, Command, RunOptions, Source, UsageError, DEFAULT_SAMPLES, EXIT_USAGE, SEED_ENV,
};
use cstar_fixpoint::instances::{BROKEN_BUILTINS, VALID_BUILTINS};
use cstar_fixpoint::solver::DEFAULT_MAX_ITER;

#[derive(Parser)]
#[command(name = "cstar", version, about = "Certified fixed points in C*-algebra-valued metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Check the metric axioms and the contraction condition on samples.
    Verify(Flags),
    /// Verify, then run Picard iteration and a three-start uniqueness check.
    Solve(Flags),
    /// Solve every built-in certified instance.
    Demo(Flags),
    /// List built-in instance names.
    List,
}

#[derive(Args)]
struct Flags {
    /// Instance file.
    #[arg(long, value_name = "PATH", conflicts_with = "builtin")]
    instance: Option<PathBuf>,
    /// Built-in instance name (see `cstar list`).
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    /// Sampling seed [default: $CSTAR_SEED or 0].
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Residual target ||d(x, Tx)|| [default: instance conv_tol or 1e-10].
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

fn write_atomically(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map_or("report".into(), |n| n.to_string_lossy())
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

fn run(command: Command, flags: Flags) -> Result<i32, UsageError> {
    let env_seed = std::env::var(SEED_ENV).ok();
    let source = match (flags.instance, flags.builtin) {
        (Some(p), _) => Some(Source::File(p)),
        (None, Some(n)) => Some(Source::Builtin(n)),
        (None, None) => None,
    };
    let opts = RunOptions {
        source,
        seed: resolve_seed(flags.seed, env_seed.as_deref())?,
        samples: flags.samples,
        conv_tol: flags.tol,
        max_iter: flags.max_iter,
    };
    let report = run_command(command, &opts)?;
    let rendered = match flags.format {
        Format::Text => report.to_text(),
        Format::Machine => report.to_machine(),
    };
    match flags.output {
        Some(path) => write_atomically(&path, &rendered)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(rendered.as_bytes());
            let _ = out.flush();
        }
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Sub::Verify(f) => (Command::Verify, f),
        Sub::Solve(f) => (Command::Solve, f),
        Sub::Demo(f) => (Command::Demo, f),
        Sub::List => {
            for name in VALID_BUILTINS {
                println!("{name}");
            }
            for name in BROKEN_BUILTINS {
                println!("{name} (broken)");
            }
            return ExitCode::SUCCESS;
        }
    };
    let code = run(command, flags).unwrap_or_else(|e| {
        eprintln!("cstar: {e}");
        EXIT_USAGE
    });
    ExitCode::from(code as u8)
}
