//! The `cstar` command: instance files in, run reports out.
//!
//! Exit codes: 0 full success, 1 verification failures, 2 usage or parse
//! errors, 3 solver divergence.

pub mod instance_file;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use crate::algebra::ToleranceConfig;
use crate::contraction::verify_contraction;
use crate::error::Error;
use crate::instances::{builtin, Problem, VALID_BUILTINS};
use crate::metric::check_axioms;
use crate::point::{BoundingBox, Point};
use crate::solver::{picard_solve, uniqueness_check, DEFAULT_MAX_ITER};

pub use instance_file::{parse_instance, parse_instance_str, ParseError};
pub use report::{ReportSection, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

pub const DEFAULT_SAMPLES: usize = 1000;
pub const SEED_ENV: &str = "CSTAR_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Solve,
    Demo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Solve => "solve",
            Command::Demo => "demo",
        }
    }
}

/// Where a problem comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Builtin(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub source: Option<Source>,
    pub seed: u64,
    pub samples: usize,
    /// Overrides any `conv_tol` in the instance file.
    pub conv_tol: Option<f64>,
    pub max_iter: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            source: None,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            conv_tol: None,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// A usage or parse failure: exit code 2 with a one-line diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Resolves the default seed from `CSTAR_SEED` when no flag was given.
pub fn resolve_seed(flag: Option<u64>, env_value: Option<&str>) -> Result<u64, UsageError> {
    match (flag, env_value) {
        (Some(seed), _) => Ok(seed),
        (None, Some(raw)) => raw
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("{SEED_ENV} must be a decimal unsigned integer, got `{raw}`"))),
        (None, None) => Ok(0),
    }
}

/// Deterministic uniqueness starts: `x0` and `x0 +/- 10%` of the box width
/// in every coordinate.
pub fn uniqueness_starts(x0: &Point, bounding_box: &BoundingBox) -> Vec<Point> {
    let shift: Vec<f64> = bounding_box.widths().iter().map(|w| 0.1 * w).collect();
    let offset = |sign: f64| {
        Point::unchecked(x0.coords().iter().zip(&shift).map(|(c, s)| c + sign * s).collect())
    };
    vec![x0.clone(), offset(1.0), offset(-1.0)]
}

struct Loaded {
    name: String,
    problem: Problem,
    tol: ToleranceConfig,
}

fn load(source: &Source, conv_tol: Option<f64>) -> Result<Loaded, UsageError> {
    let (name, problem, overrides) = match source {
        Source::File(path) => {
            let spec = parse_instance(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            let problem = spec
                .build()
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            (path.display().to_string(), problem, spec.tolerances)
        }
        Source::Builtin(name) => {
            let problem = builtin(name)
                .ok_or_else(|| UsageError(format!("unknown built-in instance `{name}`")))?
                .map_err(|e| UsageError(format!("{name}: {e}")))?;
            (name.clone(), problem, Default::default())
        }
    };
    let mut tol = overrides
        .apply(ToleranceConfig::default())
        .map_err(|e| UsageError(e.to_string()))?;
    if let Some(c) = conv_tol {
        tol = tol.with_conv_tol(c).map_err(|e| UsageError(e.to_string()))?;
    }
    Ok(Loaded { name, problem, tol })
}

fn run_section(loaded: &Loaded, opts: &RunOptions, solve: bool) -> Result<ReportSection, Error> {
    let Loaded { name, problem: p, tol } = loaded;
    let mut section = ReportSection::new(name.clone(), p.space.description(), p.certificate.norm_a());
    section.axioms = Some(check_axioms(&p.space, opts.seed, opts.samples, tol)?);
    section.contraction = Some(verify_contraction(&p.space, &p.map, &p.certificate, opts.seed, opts.samples, tol)?);
    if solve {
        let outcome = picard_solve(&p.space, &p.map, &p.certificate, &p.x0, tol, opts.max_iter).and_then(|r| {
            section.solve = Some(r);
            let starts = uniqueness_starts(&p.x0, p.space.bounding_box());
            uniqueness_check(&p.space, &p.map, &p.certificate, &starts, tol, opts.max_iter)
        });
        match outcome {
            Ok(u) => section.uniqueness = Some(u),
            Err(e @ Error::Divergence { .. }) => section.error = Some(e.to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(section)
}

fn section_exit_code(s: &ReportSection) -> i32 {
    if s.error.is_some() {
        EXIT_DIVERGENCE
    } else if s.has_failures() {
        EXIT_VERIFICATION_FAILED
    } else {
        EXIT_OK
    }
}

/// Runs one command end to end. `Err` means a usage or parse failure
/// (exit code 2); otherwise the report carries the exit code.
pub fn run_command(command: Command, opts: &RunOptions) -> Result<RunReport, UsageError> {
    let started = Instant::now();
    if opts.samples == 0 {
        return Err(UsageError("--samples must be at least 1".into()));
    }
    if opts.max_iter == 0 {
        return Err(UsageError("--max-iter must be at least 1".into()));
    }
    let loaded: Vec<Loaded> = match (command, &opts.source) {
        (Command::Demo, None) => VALID_BUILTINS
            .iter()
            .map(|name| load(&Source::Builtin(name.to_string()), opts.conv_tol))
            .collect::<Result<_, _>>()?,
        (Command::Demo, Some(_)) => {
            return Err(UsageError("demo runs the built-in catalog and takes no instance".into()))
        }
        (_, Some(source)) => vec![load(source, opts.conv_tol)?],
        (_, None) => return Err(UsageError(format!("{} needs --instance or --builtin", command.name()))),
    };

    let solve = matches!(command, Command::Solve | Command::Demo);
    let sections = loaded
        .iter()
        .map(|l| run_section(l, opts, solve).map_err(|e| UsageError(format!("{}: {e}", l.name))))
        .collect::<Result<Vec<_>, _>>()?;
    let exit_code = sections.iter().map(section_exit_code).max().unwrap_or(EXIT_OK);
    let instance = match (&opts.source, command) {
        (Some(Source::File(p)), _) => p.display().to_string(),
        (Some(Source::Builtin(n)), _) => format!("builtin:{n}"),
        (None, _) => "builtin:*".to_string(),
    };
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.name().to_string(),
        instance,
        seed: opts.seed,
        samples: opts.samples,
        max_iter: opts.max_iter,
        conv_tol: loaded.first().map_or(ToleranceConfig::default().conv_tol(), |l| l.tol.conv_tol()),
        sections,
        exit_code,
        wall_time_us: started.elapsed().as_micros(),
    })
}
