use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rrs_bench::emit::{read_records, write_profile, write_records, Format};
use rrs_bench::{
    generate_instances, performance_profile, run_on_instances, BenchError, ExperimentConfig, ModelSpec, Status,
};
use rrs_core::heuristics::{run_heuristic, Method, SortingKey};
use rrs_core::{
    adversarial_value, incremental_assignment, incremental_matching, solve_recoverable, BudgetedParams, CoreError,
    Instance, ModelKind, PolyhedralUncertainty, RecoverableConfig, Schedule, UncertaintySpec,
};
use rrs_lp::SolveConfig;

const CONFIG_ERROR: u8 = 2;
const SOLVE_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "rrs", version, about = "Recoverable robust single-machine scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write seeded random instances.
    Generate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Directory for one file per instance; JSON lines on stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Fmt::Json)]
        format: Fmt,
    },
    /// Solve one instance with a compact model.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value = "general")]
        model: String,
        /// Candidate count of the general model.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        /// Seed the search with the min-max schedule.
        #[arg(long)]
        warm_start: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Best recovery of a schedule under a fixed scenario.
    Incremental {
        /// Job order, 1-based, comma separated.
        #[arg(long)]
        schedule: String,
        /// Processing times, comma separated.
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 1)]
        delta: usize,
        /// Use the assignment LP instead of the matching LP.
        #[arg(long)]
        assignment: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Worst-case recovered cost of a schedule.
    Adversarial {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        schedule: String,
        #[command(flatten)]
        output: Output,
    },
    /// Run one or all heuristics.
    Heuristic {
        #[command(flatten)]
        problem: Problem,
        /// sorting, maxmin or minmax; all three when omitted.
        #[arg(long)]
        method: Option<String>,
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep models over seeded or supplied instances.
    Benchmark {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "10,15,20")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
        gamma: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
        delta: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "general,matching,assignment")]
        model: Vec<String>,
        #[arg(long)]
        k: Option<usize>,
        /// Also run every model with the min-max warm start.
        #[arg(long)]
        warm_start: bool,
        #[arg(long)]
        no_heuristics: bool,
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        /// Directory of instance files (`.json` or `.csv`) used instead of generated ones.
        #[arg(long)]
        instances: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Performance profile of a benchmark CSV.
    Profile {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Problem {
    /// Instance file, `.json` or `.csv` (`job,p_hat,p_bar`).
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Uncertainty set file; overrides --gamma.
    #[arg(long)]
    uncertainty: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    delta: usize,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Fmt::Csv)]
    format: Fmt,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Csv,
    Md,
    Json,
}

impl From<Fmt> for Format {
    fn from(f: Fmt) -> Self {
        match f {
            Fmt::Csv => Format::Csv,
            Fmt::Md => Format::Md,
            Fmt::Json => Format::Json,
        }
    }
}

enum Failure {
    Config(String),
    Solve(String),
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Core(e) => Failure::Solve(e.to_string()),
            e => Failure::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn config(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn solve_err(e: CoreError) -> Failure {
    Failure::Solve(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(CONFIG_ERROR)
        }
        Err(Failure::Solve(msg)) => {
            eprintln!("solve failed: {msg}");
            ExitCode::from(SOLVE_FAILURE)
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let inst = if path.extension().is_some_and(|e| e == "csv") {
        Instance::from_csv(id, text.as_bytes())
    } else {
        Instance::from_json(&text)
    };
    inst.map_err(|e| config(format!("{}: {e}", path.display())))
}

fn load_problem(p: &Problem) -> Result<(Instance, PolyhedralUncertainty), Failure> {
    let inst = load_instance(&p.instance)?;
    let spec = match &p.uncertainty {
        Some(path) => UncertaintySpec::from_json(&fs::read_to_string(path)?).map_err(config)?,
        None => UncertaintySpec::Budgeted(BudgetedParams { gamma: p.gamma }),
    };
    let u = spec.resolve(&inst).map_err(config)?;
    u.require_compact().map_err(config)?;
    Ok((inst, u))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',').map(|t| t.trim().parse().map_err(|_| config(format!("bad {what} entry {t:?}")))).collect()
}

fn parse_schedule(s: &str) -> Result<Schedule, Failure> {
    Schedule::from_one_based(&parse_list::<usize>(s, "schedule")?).map_err(config)
}

fn time_limit(secs: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(secs).ok().filter(|d| !d.is_zero()).ok_or_else(|| config("time limit must be positive"))
}

fn model_kind(name: &str, k: Option<usize>) -> Result<ModelKind, Failure> {
    match (name.parse::<ModelKind>().map_err(config)?, k) {
        (ModelKind::General { .. }, Some(0)) => Err(config("--k must be at least 1")),
        (ModelKind::General { .. }, Some(k)) => Ok(ModelKind::General { k }),
        (kind, _) => Ok(kind),
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| config(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes named fields as a one-row CSV, a two-column Markdown table or a JSON object.
fn emit_fields(fields: &[(&str, String)], output: &Output) -> Result<(), Failure> {
    let mut w = sink(&output.out)?;
    match output.format {
        Fmt::Csv => {
            let mut wr = csv::Writer::from_writer(&mut w);
            wr.write_record(fields.iter().map(|f| f.0)).map_err(config)?;
            wr.write_record(fields.iter().map(|f| f.1.as_str())).map_err(config)?;
            wr.flush()?;
        }
        Fmt::Md => {
            writeln!(w, "| field | value |\n|---|---|")?;
            for (k, v) in fields {
                writeln!(w, "| {k} | {v} |")?;
            }
        }
        Fmt::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                fields.iter().map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone()))).collect();
            writeln!(w, "{}", serde_json::Value::Object(map))?;
        }
    }
    Ok(())
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn run(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Generate { seed, n, count, out, format } => {
            let instances = generate_instances(seed, n, count)?;
            match (&out, format) {
                (_, Fmt::Md) => return Err(config("instances are written as json or csv")),
                (Some(dir), _) => {
                    fs::create_dir_all(dir)?;
                    for inst in &instances {
                        let (ext, body) = match format {
                            Fmt::Csv => ("csv", inst.to_csv()),
                            _ => ("json", inst.to_json() + "\n"),
                        };
                        fs::write(dir.join(format!("{}.{ext}", inst.id)), body)?;
                    }
                }
                (None, _) => {
                    let mut w = io::stdout().lock();
                    for inst in &instances {
                        match format {
                            Fmt::Csv => write!(w, "# {}\n{}", inst.id, inst.to_csv())?,
                            _ => writeln!(w, "{}", inst.to_json())?,
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Solve { problem, model, k, time_limit: secs, warm_start, output } => {
            let (inst, u) = load_problem(&problem)?;
            let kind = model_kind(&model, k)?;
            let milp = SolveConfig { time_limit: time_limit(secs)?, ..SolveConfig::default() };
            let ws = if warm_start {
                Some(run_heuristic(Method::MinMax, &inst, &u, 0, SortingKey::default(), &milp).map_err(solve_err)?.schedule)
            } else {
                None
            };
            let cfg = RecoverableConfig { milp, warm_start: ws };
            let sol = solve_recoverable(kind, &inst, &u, problem.delta, &cfg).map_err(solve_err)?;
            let schedule = sol.first_stage.as_ref().map(|s| join(&s.one_based())).unwrap_or_default();
            emit_fields(
                &[
                    ("instance", inst.id.clone()),
                    ("model", kind.tag()),
                    ("status", sol.status.as_str().into()),
                    ("value", sol.value.to_string()),
                    ("bound", sol.bound.to_string()),
                    ("nodes", sol.nodes.to_string()),
                    ("time_s", sol.wall_time.to_string()),
                    ("schedule", schedule),
                ],
                &output,
            )?;
            Ok(0)
        }
        Command::Incremental { schedule, scenario, delta, assignment, output } => {
            let x = parse_schedule(&schedule)?;
            let p: Vec<f64> = parse_list(&scenario, "scenario")?;
            let r = if assignment { incremental_assignment(&x, &p, delta) } else { incremental_matching(&x, &p, delta) }
                .map_err(|e| match e {
                    CoreError::Dimension { .. } => config(e),
                    e => solve_err(e),
                })?;
            let swaps: Vec<String> = r.matching.swaps().iter().map(|(a, b)| format!("{}-{}", a + 1, b + 1)).collect();
            emit_fields(
                &[("value", r.value.to_string()), ("swaps", swaps.join(" ")), ("second_stage", join(&r.second_stage.one_based()))],
                &output,
            )?;
            Ok(0)
        }
        Command::Adversarial { problem, schedule, output } => {
            let (_, u) = load_problem(&problem)?;
            let x = parse_schedule(&schedule)?;
            let r = adversarial_value(&x, &u, problem.delta).map_err(solve_err)?;
            emit_fields(&[("value", r.value.to_string()), ("worst_scenario", join(&r.worst_scenario))], &output)?;
            Ok(0)
        }
        Command::Heuristic { problem, method, time_limit: secs, output } => {
            let (inst, u) = load_problem(&problem)?;
            let methods = match method {
                Some(m) => vec![m.parse::<Method>().map_err(config)?],
                None => Method::ALL.to_vec(),
            };
            let milp = SolveConfig { time_limit: time_limit(secs)?, ..SolveConfig::default() };
            let mut fields = Vec::new();
            for m in methods {
                let h = run_heuristic(m, &inst, &u, problem.delta, SortingKey::default(), &milp).map_err(solve_err)?;
                fields.push((m.as_str(), format!("{} [{}]", h.value, join(&h.schedule.one_based()))));
            }
            emit_fields(&fields, &output)?;
            Ok(0)
        }
        Command::Benchmark {
            seed,
            sizes,
            gamma,
            delta,
            count,
            model,
            k,
            warm_start,
            no_heuristics,
            time_limit: secs,
            instances,
            output,
        } => {
            let mut models = Vec::new();
            for name in &model {
                let kind = model_kind(name, k)?;
                models.push(ModelSpec::new(kind, false));
                if warm_start {
                    models.push(ModelSpec::new(kind, true));
                }
            }
            let cfg = ExperimentConfig {
                seed,
                sizes,
                gammas: gamma,
                deltas: delta,
                instances_per_cell: count,
                models,
                time_limit: time_limit(secs)?,
                heuristics: !no_heuristics,
            };
            cfg.validate()?;
            let insts = match instances {
                Some(dir) => {
                    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
                        .map(|e| e.map(|e| e.path()))
                        .collect::<Result<_, _>>()?;
                    paths.retain(|p| p.extension().is_some_and(|e| e == "json" || e == "csv"));
                    paths.sort();
                    if paths.is_empty() {
                        return Err(config(format!("no instance files in {}", dir.display())));
                    }
                    paths.iter().map(|p| load_instance(p)).collect::<Result<Vec<_>, _>>()?
                }
                None => {
                    let mut all = Vec::new();
                    for &n in &cfg.sizes {
                        all.extend(generate_instances(cfg.seed, n, cfg.instances_per_cell)?);
                    }
                    all
                }
            };
            let records = run_on_instances(&cfg, &insts)?;
            write_records(&records, output.format.into(), sink(&output.out)?)?;
            let failed = records.iter().filter(|r| r.status == Status::Error).count();
            if failed > 0 {
                eprintln!("{failed} runs failed");
                return Ok(SOLVE_FAILURE);
            }
            Ok(0)
        }
        Command::Profile { input, output } => {
            let file = fs::File::open(&input).map_err(|e| config(format!("{}: {e}", input.display())))?;
            let records = read_records(file)?;
            let profile = performance_profile(&records)?;
            write_profile(&profile, output.format.into(), sink(&output.out)?)?;
            Ok(0)
        }
    }
}
