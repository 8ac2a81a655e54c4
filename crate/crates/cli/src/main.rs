mod output;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use genbvp::approx::{self, Theorem};
use genbvp::bvp::{self, BvpProblem};
use genbvp::{corpus, problem_file, registry, Error};

/// Linear boundary-value problems with Stieltjes boundary conditions and their
/// multipoint approximations.
#[derive(Debug, Parser)]
#[command(name = "genbvp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Debug, Args)]
struct Common {
    /// Problem file (JSON) or built-in corpus name (P1, P2, P3).
    problem: String,
    /// Number of grid cells (overrides the file).
    #[arg(long)]
    grid_n: Option<usize>,
    /// Directory for output files; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct Strategies {
    /// Measure discretizer for the boundary operator.
    #[arg(long)]
    discretizer: Option<String>,
    /// Coefficient approximator.
    #[arg(long)]
    coefficients: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the problem and write the solution jet as CSV.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Write the k-th approximating multipoint problem in the problem-file format.
    Approximate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        strategies: Strategies,
    },
    /// Convergence sweep over k.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `start:stop:xF` (geometric), `start:stop:+S` (arithmetic) or `k1,k2,...`.
        #[arg(long, default_value = "4:256:x2")]
        ks: String,
        #[command(flatten)]
        strategies: Strategies,
    },
    /// Print the error-estimate constants.
    Constants {
        #[command(flatten)]
        common: Common,
    },
    /// Verify the error bound for perturbed right-hand sides.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["2", "3"])]
        theorem: String,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = "4:256:x2")]
        ks: String,
        /// Right-hand-side perturbation (default: sawtooth for 3, constant-shift for 2).
        #[arg(long)]
        perturbation: Option<String>,
        #[command(flatten)]
        strategies: Strategies,
    },
    /// List the built-in problems or write them as problem files.
    Corpus {
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the registered approximation strategies.
    Strategies,
}

enum Failure {
    CheckFailed,
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn parse_ks(spec: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Lib(Error::InvalidArgument(format!("cannot parse k list `{spec}`")));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop) = (parse(start)?, parse(stop)?);
            if start == 0 || stop < start {
                return Err(bad());
            }
            let mut ks = Vec::new();
            if let Some(f) = step.strip_prefix('x') {
                let f = parse(f)?;
                if f < 2 {
                    return Err(bad());
                }
                let mut k = start;
                while k <= stop {
                    ks.push(k);
                    k *= f;
                }
            } else if let Some(s) = step.strip_prefix('+') {
                let s = parse(s)?;
                if s == 0 {
                    return Err(bad());
                }
                ks.extend((start..=stop).step_by(s));
            } else {
                return Err(bad());
            }
            Ok(ks)
        }
        [list] => list.split(',').map(parse).collect(),
        _ => Err(bad()),
    }
}

fn load_problem(common: &Common) -> Result<BvpProblem, Failure> {
    let path = Path::new(&common.problem);
    if path.exists() {
        return Ok(problem_file::parse_problem(path, common.grid_n)?);
    }
    if corpus::NAMES.iter().any(|n| n.eq_ignore_ascii_case(&common.problem)) {
        let n = common.grid_n.unwrap_or(genbvp::funcspace::DEFAULT_GRID_N);
        return Ok(corpus::load(&common.problem, n)?.problem);
    }
    Err(Failure::Io(format!("{}: no such file or corpus problem", common.problem)))
}

fn emit(common: &Common, name: &str, contents: &str) -> Result<(), Failure> {
    match &common.out {
        Some(dir) => output::write_atomic(dir, name, contents)?,
        None => std::io::stdout().lock().write_all(contents.as_bytes())?,
    }
    Ok(())
}

fn scheme(s: &Strategies) -> Result<approx::ApproximationScheme, Failure> {
    Ok(registry::scheme(s.discretizer.as_deref(), s.coefficients.as_deref())?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { common } => {
            let p = load_problem(&common)?;
            let s = bvp::solve(&p)?;
            eprintln!(
                "det = {}\ncondition = {}\node_residual = {}\nboundary_residual = {}",
                output::num(s.det.norm()),
                output::num(s.condition),
                output::num(s.ode_residual),
                output::num(s.boundary_residual)
            );
            emit(&common, "solution.csv", &output::jet_csv(&s.y))
        }
        Command::Approximate { common, k, strategies } => {
            let p = load_problem(&common)?;
            let pk = approx::build_multipoint_problem_with(&p, k, &scheme(&strategies)?)?;
            emit(&common, &format!("approx_k{k}.json"), &problem_file::emit(&pk))
        }
        Command::Sweep { common, ks, strategies } => {
            let p = load_problem(&common)?;
            let rep = approx::sweep_with(&p, &parse_ks(&ks)?, &scheme(&strategies)?)?;
            eprint!("{}", output::sweep_summary(&rep));
            emit(&common, "sweep.csv", &output::sweep_csv(&rep))
        }
        Command::Constants { common } => {
            let p = load_problem(&common)?;
            let c = approx::remark3_constants(&p)?;
            emit(&common, "constants.txt", &output::constants_text(&c))
        }
        Command::Check {
            common,
            theorem,
            eps,
            ks,
            perturbation,
            strategies,
        } => {
            let p = load_problem(&common)?;
            let theorem = if theorem == "2" { Theorem::Two } else { Theorem::Three };
            let default = match theorem {
                Theorem::Two => "constant-shift",
                Theorem::Three => "sawtooth",
            };
            let generator = registry::perturbations().get(perturbation.as_deref().unwrap_or(default))?;
            let rep = approx::check_with_generator(
                theorem,
                &p,
                &parse_ks(&ks)?,
                eps,
                generator.as_ref(),
                &scheme(&strategies)?,
            )?;
            eprint!("{}", output::check_summary(&rep));
            emit(&common, &format!("check_theorem{}.csv", theorem.number()), &output::check_csv(&rep))?;
            if rep.passed {
                Ok(())
            } else {
                Err(Failure::CheckFailed)
            }
        }
        Command::Corpus { grid_n, out } => {
            let n = grid_n.unwrap_or(genbvp::funcspace::DEFAULT_GRID_N);
            for entry in corpus::all(n)? {
                match &out {
                    Some(dir) => output::write_atomic(dir, &format!("{}.json", entry.name), &problem_file::emit(&entry.problem))?,
                    None => println!("{}\t{}", entry.name, entry.description),
                }
            }
            Ok(())
        }
        Command::Strategies => {
            let d = registry::discretizers();
            for name in d.names() {
                println!("{}\t{name}\t{}", d.kind(), d.get(name)?.description());
            }
            let c = registry::coefficient_approximators();
            for name in c.names() {
                println!("{}\t{name}\t{}", c.kind(), c.get(name)?.description());
            }
            let p = registry::perturbations();
            for name in p.names() {
                println!("{}\t{name}\t{}", p.kind(), p.get(name)?.description());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::CheckFailed) => {
            eprintln!("check failed");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e @ Error::NotUniquelySolvable { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_lists() {
        assert!(matches!(parse_ks("4:256:x2"), Ok(v) if v == vec![4, 8, 16, 32, 64, 128, 256]));
        assert!(matches!(parse_ks("2:10:+4"), Ok(v) if v == vec![2, 6, 10]));
        assert!(matches!(parse_ks("3,5,9"), Ok(v) if v == vec![3, 5, 9]));
        assert!(parse_ks("4:256:x1").is_err());
        assert!(parse_ks("0:4:x2").is_err());
        assert!(parse_ks("a,b").is_err());
    }
}
