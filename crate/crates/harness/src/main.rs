use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use pushmatch::io::{self, MapFile, MeasureFile, SolveRecord};
use pushmatch::{
    solve_phi_closed_form, solve_phi_iterative, solve_wasserstein, GroundMetric, MetricKind, PhiGenerator,
};
use pushmatch_harness::config::Config;
use pushmatch_harness::report::{self, write_output, Format};
use pushmatch_harness::{
    exit_code, generate_scenario, requested_threads, verify_theorems, HarnessError, Result, ScenarioFile,
    ScenarioKind, ScenarioParams,
};

#[derive(Parser)]
#[command(name = "pushmatch", version, about = "Distribution matching through a forward map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    ClosedForm,
    Iterative,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance given as map and measure files.
    Solve {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        /// kl, chi2, tv, hellinger or wasserstein.
        #[arg(long, default_value = "kl")]
        objective: String,
        #[arg(long, value_enum, default_value = "iterative")]
        method: Method,
        /// Ground metric for wasserstein: l2 or l1.
        #[arg(long, default_value = "l2")]
        metric: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// JSON config; only its `solver` section is used.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification battery; exits 1 if any check fails.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated scenario file.
    Gen {
        #[arg(long)]
        kind: String,
        /// JSON file with generation parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render a JSON report; exits 1 if it records a failure or if a
    /// verdict does not follow from its numbers.
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

fn parse_file<D: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<D> {
    io::from_json(&read(path)?).map_err(|e| HarnessError::ConfigParse(format!("{}: {e}", path.display())))
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    match path {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

#[allow(clippy::too_many_arguments)]
fn solve(
    map: &Path,
    measure: &Path,
    objective: &str,
    method: Method,
    metric: &str,
    p: f64,
    config: Option<&Path>,
    out: Option<&Path>,
) -> Result<i32> {
    let cfg = load_config(config)?;
    let opts = cfg.solver.options();
    let map = parse_file::<MapFile>(map)?.to_map::<f64>()?;
    let rho_y = parse_file::<MeasureFile>(measure)?.to_measure::<f64>()?;
    let start = Instant::now();
    let (name, result, used_opts) = if objective == "wasserstein" {
        let kind: MetricKind = metric.parse()?;
        let metric = GroundMetric::new(kind, p)?;
        ("wasserstein".to_string(), solve_wasserstein(&map, &rho_y, &metric)?, None)
    } else {
        let phi: PhiGenerator = objective.parse()?;
        match method {
            Method::ClosedForm => (format!("{phi}-closed-form"), solve_phi_closed_form(&map, &rho_y, phi)?, None),
            Method::Iterative => (
                format!("{phi}-iterative"),
                solve_phi_iterative(&map, &rho_y, phi, &opts)?,
                Some(&opts),
            ),
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let record = SolveRecord::new(&name, used_opts, elapsed, &result);
    write_output(&(io::to_json(&record)? + "\n"), out)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve {
            map,
            measure,
            objective,
            method,
            metric,
            p,
            config,
            out,
        } => solve(&map, &measure, &objective, method, &metric, p, config.as_deref(), out.as_deref()),
        Command::Verify {
            config,
            seed,
            format,
            out,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let report = verify_theorems(&cfg)?;
            report::emit_report(&report, format.into(), out.as_deref())?;
            let t = report.tally();
            eprintln!("{} pass, {} fail, {} n/a", t.pass, t.fail, t.not_applicable);
            Ok(exit_code(&report))
        }
        Command::Gen {
            kind,
            config,
            seed,
            name,
            out,
        } => {
            let kind: ScenarioKind = kind.parse()?;
            let params: ScenarioParams = match config {
                Some(path) => parse_file(&path)?,
                None => ScenarioParams::default(),
            };
            let mut scenario = generate_scenario(kind, &params, seed)?;
            if let Some(name) = name {
                scenario.name = name;
            }
            write_output(&(io::to_json(&ScenarioFile::from_scenario(&scenario))? + "\n"), out.as_deref())?;
            Ok(0)
        }
        Command::Report { input, format, out } => {
            let report = report::load_report(&input)?;
            report::emit_report(&report, format.into(), out.as_deref())?;
            let bad = report.inconsistencies();
            for (scenario, e) in &bad {
                eprintln!("inconsistent verdict: {scenario} {} {}", e.method, e.target);
            }
            Ok(if bad.is_empty() { exit_code(&report) } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match requested_threads() {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
