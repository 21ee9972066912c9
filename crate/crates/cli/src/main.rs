mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kleinian::fixtures::{self, CANTOR_DEPTH, CANTOR_TEST, FIXTURE_NAMES};
use kleinian::group::{choose_basepoint, enumerate_orbit, find_loxodromic, GroupPresentation};
use kleinian::groupfile::{parse_group, parse_s_grid, write_group};
use kleinian::limitset::{box_dimension_estimate, render_pgm, sample_limit_set, LimitSample, SampleSource};
use kleinian::poincare::{exponent_estimate, truncated_series, ExponentMethod};
use kleinian::verify::{proof_chain_report, verify_inequality, DEFAULT_TOLERANCE, SEARCH_DEPTH};

use output::{num, write_atomic};

/// Overrides the worker thread count.
const THREADS_VAR: &str = "KLEINIAN_THREADS";

#[derive(Parser)]
#[command(name = "kleinian", version, about = "Orbits, Poincare exponents and limit-set dimensions of Kleinian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Group-definition file (JSON).
    groupfile: PathBuf,
    /// Maximum word length enumerated.
    #[arg(long, default_value_t = 8)]
    depth: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the orbit of the basepoint.
    Orbit {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
    },
    /// Truncated Poincare series over a grid of exponents.
    Poincare {
        #[command(flatten)]
        input: Input,
        /// Exponents as a:b:step.
        #[arg(long)]
        s_grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the Poincare exponent.
    Exponent {
        #[command(flatten)]
        input: Input,
        /// counting_fit or divergence_scan.
        #[arg(long, default_value = "divergence_scan")]
        method: String,
    },
    /// Sample the limit set.
    Limitset {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
        /// Also write a P5 graymap of the sample and its 2^-k neighbourhood.
        #[arg(long)]
        image: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        k: u32,
    },
    /// Box-counting dimension of the limit-set sample.
    Boxdim {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        kmin: u32,
        #[arg(long, default_value_t = 9)]
        kmax: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check delta <= dim_B.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shell-by-shell chain of estimates for exponents s > t.
    Chain {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// List or write the built-in fixtures.
    Fixtures {
        #[arg(long, conflicts_with = "emit", required_unless_present = "emit")]
        list: bool,
        /// Fixture name and output path.
        #[arg(long, num_args = 2, value_names = ["NAME", "PATH"])]
        emit: Option<Vec<String>>,
    },
}

enum Failure {
    /// Usage, parse, resource and numerical errors.
    Error(String),
    /// The check ran and did not hold.
    Verification,
}

impl From<kleinian::Error> for Failure {
    fn from(e: kleinian::Error) -> Self {
        Failure::Error(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(format!("i/o error: {e}"))
    }
}

fn load(input: &Input) -> Result<GroupPresentation, Failure> {
    let text = std::fs::read_to_string(&input.groupfile)
        .map_err(|e| Failure::Error(format!("cannot read {}: {e}", input.groupfile.display())))?;
    Ok(parse_group(&text)?)
}

fn save(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    write_atomic(path, bytes).map_err(|e| Failure::Error(format!("cannot write {}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Orbit { input, out } => {
            let g = load(&input)?;
            let h = find_loxodromic(&g, input.depth.max(SEARCH_DEPTH))?;
            let z = choose_basepoint(&h, &g, SEARCH_DEPTH)?;
            let orbit = enumerate_orbit(&g, &z, input.depth)?;
            save(&out, &output::orbit_table(&orbit).into_bytes())?;
            println!("{} elements, horizon distance {}", orbit.len(), num(orbit.horizon_distance()));
        }
        Command::Poincare { input, s_grid, out } => {
            let grid = parse_s_grid(&s_grid)?;
            let g = load(&input)?;
            let h = find_loxodromic(&g, input.depth.max(SEARCH_DEPTH))?;
            let z = choose_basepoint(&h, &g, SEARCH_DEPTH)?;
            let orbit = enumerate_orbit(&g, &z, input.depth)?;
            let series = grid
                .iter()
                .map(|&s| truncated_series(&orbit, s))
                .collect::<kleinian::Result<Vec<_>>>()?;
            save(&out, &output::series_table(&series).into_bytes())?;
        }
        Command::Exponent { input, method } => {
            let method = ExponentMethod::parse(&method)?;
            let g = load(&input)?;
            let h = find_loxodromic(&g, input.depth.max(SEARCH_DEPTH))?;
            let z = choose_basepoint(&h, &g, SEARCH_DEPTH)?;
            let orbit = enumerate_orbit(&g, &z, input.depth)?;
            let est = exponent_estimate(&orbit, method)?;
            println!("delta_est,method,window_low,window_high,slope_stderr,capped");
            println!(
                "{},{},{},{},{},{}",
                num(est.delta_est),
                est.method.name(),
                num(est.fit_window.0),
                num(est.fit_window.1),
                num(est.slope_stderr),
                est.capped
            );
        }
        Command::Limitset { input, out, image, k } => {
            let g = load(&input)?;
            let h = find_loxodromic(&g, input.depth.max(SEARCH_DEPTH))?;
            let z = choose_basepoint(&h, &g, SEARCH_DEPTH)?;
            let orbit = enumerate_orbit(&g, &z, input.depth)?;
            let sample = sample_limit_set(&orbit, &h)?;
            let pgm = image.as_ref().map(|_| render_pgm(&sample, k)).transpose()?;
            save(&out, &output::points_table(&sample).into_bytes())?;
            if let (Some(path), Some(bytes)) = (image, pgm) {
                save(&path, &bytes)?;
            }
            println!("{} limit points", sample.len());
        }
        Command::Boxdim { input, kmin, kmax, out } => {
            let g = load(&input)?;
            let h = find_loxodromic(&g, input.depth.max(SEARCH_DEPTH))?;
            let z = choose_basepoint(&h, &g, SEARCH_DEPTH)?;
            let orbit = enumerate_orbit(&g, &z, input.depth)?;
            let sample = sample_limit_set(&orbit, &h)?;
            let est = box_dimension_estimate(&sample, (kmin, kmax))?;
            save(&out, &output::scales_table(&est).into_bytes())?;
            println!(
                "dim_est {} (min local slope {})",
                num(est.dim_est),
                num(est.min_local_slope)
            );
        }
        Command::Verify { input, tolerance, out } => {
            let g = load(&input)?;
            let report = verify_inequality(&g, input.depth, tolerance)?;
            save(&out, &output::report_table(&report).into_bytes())?;
            println!(
                "{}: delta_est {} dim_est {} margin {} -> {}",
                report.group,
                num(report.delta_est()),
                num(report.dim_est()),
                num(report.margin),
                if report.pass { "pass" } else { "FAIL" }
            );
            if !report.pass {
                return Err(Failure::Verification);
            }
        }
        Command::Chain { input, s, t, out } => {
            let g = load(&input)?;
            let report = proof_chain_report(&g, input.depth, s, t)?;
            save(&out, &output::chain_table(&report).into_bytes())?;
            println!(
                "C1 {} C2 {} C3 {} c_hat {} tail sum {} (closed form {}, bound {})",
                num(report.c1),
                num(report.c2),
                num(report.c3),
                num(report.c_hat),
                num(report.tail_sum),
                num(report.tail_closed_form),
                num(report.tail_bound + 1.0)
            );
            if !report.holds() {
                return Err(Failure::Verification);
            }
        }
        Command::Fixtures { list, emit } => {
            if list {
                for name in FIXTURE_NAMES {
                    println!("{name}");
                }
            } else if let Some([name, path]) = emit.as_deref() {
                let bytes = if name == CANTOR_TEST {
                    let sample = LimitSample::from_points(fixtures::cantor_points(CANTOR_DEPTH), SampleSource::External)?;
                    output::points_table(&sample).into_bytes()
                } else {
                    write_group(&fixtures::group_fixture(name)?).into_bytes()
                };
                save(Path::new(path), &bytes)?;
            }
        }
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads = value
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Error(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Error(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(2),
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
