//! `spiralsheet`: solve, verify, sample and integrate logarithmic-spiral
//! vortex-sheet flows from the command line.
//!
//! Exit codes: 0 success, 1 usage or invalid input, 2 solver failure,
//! 3 verification failure.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

use spiral_sheet::{Error, FamilyConfig, PolarPoint, SpiralFamily};

mod verify;

#[derive(Parser)]
#[command(name = "spiralsheet", version, about = "Logarithmic-spiral vortex sheet toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the weak-solution constraint for family parameters.
    Solve {
        #[command(subcommand)]
        mode: SolveMode,
    },
    /// Run verification suites against a family config.
    Verify(VerifyArgs),
    /// Sample velocity, pressure and region on a grid, writing CSV.
    Sample(SampleArgs),
    /// Kinetic energy of the profile in a ball around the origin.
    Energy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        r: f64,
    },
}

#[derive(Subcommand)]
enum SolveMode {
    /// Closed-form symmetric family: g_m = g, theta_m = 2 pi m / M.
    Alexander {
        #[arg(long)]
        a: f64,
        #[arg(long = "M")]
        branches: usize,
    },
    /// Damped Gauss-Newton on the constraint residual from an initial config.
    General {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated free variables: mu, g<k>, theta<k> (theta0 is
        /// the fixed rotation gauge).
        #[arg(long, value_delimiter = ',')]
        free: Vec<String>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "all")]
    suite: String,
    /// Override every check's tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    t: f64,
    /// x0,x1,y0,y1
    #[arg(long)]
    bounds: String,
    #[arg(long)]
    nx: usize,
    #[arg(long)]
    ny: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct SolveReport {
    family: FamilyConfig,
    residual_max: f64,
    iterations: usize,
    compat_holds: bool,
}

#[derive(Serialize)]
struct EnergyReport {
    #[serde(rename = "E")]
    e: f64,
    #[serde(rename = "C")]
    c: f64,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn load_family(path: &PathBuf) -> Result<SpiralFamily, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let cfg: FamilyConfig =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    SpiralFamily::new(cfg).map_err(|e| e.to_string())
}

fn parse_free(tokens: &[String]) -> Result<Vec<spiral_sheet::constraint::FreeVar>, String> {
    use spiral_sheet::constraint::FreeVar;
    let mut out = Vec::new();
    for tok in tokens {
        let tok = tok.trim();
        if tok == "mu" {
            out.push(FreeVar::Mu);
        } else if let Some(idx) = tok.strip_prefix("theta") {
            let i: usize = idx.parse().map_err(|_| format!("bad free variable '{tok}'"))?;
            out.push(FreeVar::Phase(i));
        } else if let Some(idx) = tok.strip_prefix('g') {
            let i: usize = idx.parse().map_err(|_| format!("bad free variable '{tok}'"))?;
            out.push(FreeVar::Circulation(i));
        } else {
            return Err(format!("bad free variable '{tok}'"));
        }
    }
    Ok(out)
}

fn emit_solve_report(family: &SpiralFamily, residual_max: f64, iterations: usize) {
    let compat_holds = spiral_sheet::constraint::compatibility_check(family).0;
    let report = SolveReport {
        family: family.to_config(),
        residual_max,
        iterations,
        compat_holds,
    };
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}

fn run_solve(mode: SolveMode) -> ExitCode {
    use spiral_sheet::constraint;
    match mode {
        SolveMode::Alexander { a, branches } => match constraint::alexander_family(a, branches) {
            Ok(family) => {
                let residual = constraint::constraint_report(&family).max_residual();
                emit_solve_report(&family, residual, 0);
                ExitCode::SUCCESS
            }
            Err(Error::NonPositivePitch(_)) | Err(Error::LengthMismatch) => {
                usage_error("alexander solve needs a > 0 and M >= 1")
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        SolveMode::General { config, free, tol, max_iter } => {
            let family = match load_family(&config) {
                Ok(f) => f,
                Err(msg) => return usage_error(&msg),
            };
            let free = match parse_free(&free) {
                Ok(f) => f,
                Err(msg) => return usage_error(&msg),
            };
            match constraint::general_solve(&family, &free, max_iter, tol) {
                Ok(out) => {
                    emit_solve_report(&out.family, out.residual_max, out.iterations);
                    ExitCode::SUCCESS
                }
                Err(Error::InvalidGauge) | Err(Error::BranchOutOfRange { .. }) => {
                    usage_error(&Error::InvalidGauge.to_string())
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    let family = match load_family(&args.config) {
        Ok(f) => f,
        Err(msg) => return usage_error(&msg),
    };
    let report = match verify::run_suite(&family, &args.suite, args.tol, args.seed) {
        Ok(r) => r,
        Err(msg) => return usage_error(&msg),
    };
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    if report.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn run_sample(args: SampleArgs) -> ExitCode {
    let family = match load_family(&args.config) {
        Ok(f) => f,
        Err(msg) => return usage_error(&msg),
    };
    if !(args.t > 0.0) {
        return usage_error("time must be positive");
    }
    let parts: Vec<f64> = args
        .bounds
        .split(',')
        .filter_map(|s| s.trim().parse().ok())
        .collect();
    if parts.len() != 4 {
        return usage_error("bounds must be x0,x1,y0,y1");
    }
    let (x0, x1, y0, y1) = (parts[0], parts[1], parts[2], parts[3]);
    if !(x0 < x1) || !(y0 < y1) || args.nx == 0 || args.ny == 0 {
        return usage_error("bounds must satisfy x0 < x1, y0 < y1 with nx, ny >= 1");
    }
    let coord = |lo: f64, hi: f64, n: usize, i: usize| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut nodes = Vec::with_capacity(args.nx * args.ny);
    for j in 0..args.ny {
        for i in 0..args.nx {
            nodes.push(Complex64::new(
                coord(x0, x1, args.nx, i),
                coord(y0, y1, args.ny, j),
            ));
        }
    }
    let rows = spiral_sheet::parallel::par_map(&nodes, |z| {
        let located = PolarPoint::from_complex(*z)
            .ok_or(Error::OnSheet)
            .and_then(|p| spiral_sheet::geometry::locate_point(&family, p, args.t));
        match located.and_then(|loc| {
            spiral_sheet::field::spacetime_fields(&family, *z, args.t)
                .map(|(v, p)| (loc.region as i64, v, p))
        }) {
            Ok((region, v, p)) => format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{region}",
                z.re, z.im, v.re, v.im, p
            ),
            Err(_) => format!("{:.16e},{:.16e},NaN,NaN,NaN,-1", z.re, z.im),
        }
    });
    let mut csv = String::from("x,y,u,v,p,region\n");
    for row in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    match std::fs::write(&args.out, csv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => usage_error(&format!("{}: {e}", args.out.display())),
    }
}

fn run_energy(config: PathBuf, r: f64) -> ExitCode {
    let family = match load_family(&config) {
        Ok(f) => f,
        Err(msg) => return usage_error(&msg),
    };
    match spiral_sheet::field::energy_in_ball(&family, r) {
        Ok(e) => {
            let report = EnergyReport { e, c: e / r.powi(4) };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            ExitCode::SUCCESS
        }
        Err(err) => usage_error(&err.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Solve { mode } => run_solve(mode),
        Command::Verify(args) => run_verify(args),
        Command::Sample(args) => run_sample(args),
        Command::Energy { config, r } => run_energy(config, r),
    }
}
