//! The `divkit` command line.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 the input failed
//! validation (or could not be read), 3 a size guard refused the work.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divkit::dispersion::{check_structural_lemma, InnerMode};
use divkit::diversification::{check_div_structural_lemma, DiversificationInstance};
use divkit::dks::MatroidMode;
use divkit::io::{self, Document, Instance};
use divkit::metric::{validate_metric, MetricReport};
use divkit::ranking::build_dcg_lp;
use divkit::{GainFunction, Metric, SetFunction, Submodular};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bench::{run_bench, BenchSpec, CSV_HEADER};
use crate::generators::GenSpec;
use crate::solve::{self, DcgParams, DispersionParams, DksParams, SetAlgorithm};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] divkit::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_guard() => 3,
            CliError::Core(divkit::Error::InvalidParameter(_)) => 1,
            CliError::Core(_) => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "divkit", version, about = "Diversification solvers, exact oracles and instance generators")]
struct Cli {
    /// Seed for generators and randomized solvers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InnerArg {
    Exact,
    Scheme,
}

impl From<InnerArg> for InnerMode {
    fn from(v: InnerArg) -> Self {
        match v {
            InnerArg::Exact => InnerMode::Exact,
            InnerArg::Scheme => InnerMode::Scheme,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    Qptas,
    Greedy,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        generator: GenCommand,
    },
    /// Rank a set system for DCG.
    SolveDcg(DcgArgs),
    /// Max-sum dispersion on a metric.
    SolveDispersion(DispersionArgs),
    /// Max-sum diversification: dispersion plus a submodular bonus.
    SolveDiversification(DiversificationArgs),
    /// Densest k-subgraph with an optional submodular bonus.
    SolveDks(DksArgs),
    /// Exact optimum by exhaustive search.
    Oracle(OracleArgs),
    /// Validate an instance; with --p also check the optimum's lower bound.
    Check(OracleArgs),
    /// Run a bench spec.
    Bench {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Uniform points in the unit cube.
    Euclidean {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Distances uniform in [1, 2].
    RangeMetric {
        #[arg(long)]
        n: usize,
    },
    RandomDks {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        forced: usize,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
    },
    /// Planted unit-weight k-clique.
    PlantedDks {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Metric image (d = 1 + w) of a planted instance, p = k.
    PlantedDispersion {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    Setsystem {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        kmax: usize,
    },
    /// Ranking image of a regular coverage instance.
    CoverageDcg {
        #[arg(long)]
        universe: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        planted: bool,
        #[arg(long, default_value_t = 0)]
        extra: usize,
    },
    /// Weighted coverage function.
    CoverageFunction {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        universe: usize,
    },
    Modular {
        #[arg(long)]
        n: usize,
    },
}

impl GenCommand {
    fn spec(&self, seed: u64) -> GenSpec {
        match *self {
            GenCommand::Euclidean { n, dim } => GenSpec::Euclidean { n, dim, seed },
            GenCommand::RangeMetric { n } => GenSpec::RangeMetric { n, seed },
            GenCommand::RandomDks { n, k, forced, density } => GenSpec::RandomDks { n, k, forced, density, seed },
            GenCommand::PlantedDks { n, k } => GenSpec::PlantedDks { n, k, seed },
            GenCommand::PlantedDispersion { n, k } => GenSpec::PlantedDispersion { n, k, seed },
            GenCommand::Setsystem { n, m, kmax } => GenSpec::Setsystem { n, m, kmax, seed },
            GenCommand::CoverageDcg { universe, k, planted, extra } => GenSpec::CoverageDcg { universe, k, planted, extra, seed },
            GenCommand::CoverageFunction { n, universe } => GenSpec::CoverageFunction { n, universe, seed },
            GenCommand::Modular { n } => GenSpec::Modular { n, seed },
        }
    }
}

#[derive(Debug, Args)]
struct DcgArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    /// Prefix length.
    #[arg(long)]
    u: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long)]
    prefix_cap: Option<u128>,
    /// Write the root relaxation, one constraint per line.
    #[arg(long)]
    lp_dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SetArgs {
    /// Solution size; defaults to `meta.p` of the input.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = InnerArg::Scheme)]
    inner: InnerArg,
    #[arg(long)]
    enum_cap: Option<usize>,
    #[arg(long, value_enum, default_value_t = AlgoArg::Qptas)]
    algorithm: AlgoArg,
}

#[derive(Debug, Args)]
struct DispersionArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    set: SetArgs,
}

#[derive(Debug, Args)]
struct DiversificationArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Submodular function document.
    #[arg(long)]
    f: PathBuf,
    #[command(flatten)]
    set: SetArgs,
}

#[derive(Debug, Args)]
struct DksArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Submodular bonus document.
    #[arg(long)]
    submodular: Option<PathBuf>,
    #[arg(long)]
    gamma: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    enum_cap: Option<usize>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Submodular function: `f` for metrics, `h` for densest subgraph.
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let text = match &cli.command {
        Command::Gen { generator } => {
            if cli.format == Format::Csv {
                return Err(CliError::Usage("gen writes JSON documents only".into()));
            }
            io::to_json(&generator.spec(cli.seed).generate()?)
        }
        Command::SolveDcg(a) => solve_dcg(cli, a)?,
        Command::SolveDispersion(a) => {
            let (metric, p) = load_metric(&a.input, a.set.p)?;
            let params = set_params(&a.set, p);
            let start = Instant::now();
            let r = solve::solve_dispersion(&metric, &params, cli.seed)?;
            emit(cli, &r, &a.input, r.algorithm, Some(params.epsilon), r.disp, start)
        }
        Command::SolveDiversification(a) => {
            let (metric, p) = load_metric(&a.input, a.set.p)?;
            let f = load_function(&a.f)?;
            let params = set_params(&a.set, p);
            let start = Instant::now();
            let r = solve::solve_diversification(&metric, &f, &params, cli.seed)?;
            emit(cli, &r, &a.input, r.algorithm, Some(params.epsilon), r.dive, start)
        }
        Command::SolveDks(a) => {
            let inst = match io::load(&a.input)?.instance {
                Instance::Dks(d) => d,
                other => return Err(wrong_kind(&a.input, "dks", other.kind())),
            };
            let h = a.submodular.as_deref().map(load_function).transpose()?;
            let params = DksParams {
                gamma: a.gamma,
                mode: match a.mode {
                    ModeArg::Exact => MatroidMode::Exact,
                    ModeArg::Greedy => MatroidMode::Greedy,
                },
                s: a.s,
                t: a.t,
                enum_cap: a.enum_cap,
            };
            let start = Instant::now();
            let r = solve::solve_dks(&inst, h.as_ref(), &params, cli.seed)?;
            emit(cli, &r, &a.input, r.algorithm, Some(params.gamma), r.value, start)
        }
        Command::Oracle(a) => oracle(cli, a)?,
        Command::Check(a) => {
            if cli.format == Format::Csv {
                return Err(CliError::Usage("check writes JSON only".into()));
            }
            let (report, ok) = check(a)?;
            write_out(cli, &solve::to_json(&report))?;
            if !ok {
                return Err(CliError::Core(divkit::Error::InvalidInstance("metric axioms violated".into())));
            }
            return Ok(());
        }
        Command::Bench { spec } => {
            let parsed = BenchSpec::load(spec)?;
            let base = spec.parent().unwrap_or(Path::new("."));
            let report = run_bench(&parsed, base)?;
            match cli.format {
                Format::Json => solve::to_json(&report),
                Format::Csv => report.to_csv(),
            }
        }
    };
    write_out(cli, &text)
}

fn write_out(cli: &Cli, text: &str) -> CliResult<()> {
    let res = match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    res.map_err(|e| CliError::Core(divkit::Error::Io(e)))
}

fn wrong_kind(path: &Path, want: &str, got: &str) -> CliError {
    CliError::Core(divkit::Error::Schema(format!("{}: expected a {want} document, found {got}", path.display())))
}

fn meta_p(doc: &Document) -> Option<usize> {
    doc.meta.as_ref()?.get("p")?.as_u64().map(|p| p as usize)
}

fn load_metric(path: &Path, p: Option<usize>) -> CliResult<(Metric, usize)> {
    let doc = io::load(path)?;
    let p = p.or_else(|| meta_p(&doc));
    match doc.instance {
        Instance::Metric(m) => {
            let p = p.ok_or_else(|| CliError::Usage("--p is required for this instance".into()))?;
            Ok((m, p))
        }
        other => Err(wrong_kind(path, "metric", other.kind())),
    }
}

fn load_function(path: &Path) -> CliResult<Submodular> {
    match io::load(path)?.instance {
        Instance::Submodular(f) => Ok(f),
        other => Err(wrong_kind(path, "modular or coverage", other.kind())),
    }
}

fn set_params(a: &SetArgs, p: usize) -> DispersionParams {
    DispersionParams {
        p,
        epsilon: a.epsilon,
        inner: a.inner.into(),
        enum_cap: a.enum_cap,
        algorithm: match a.algorithm {
            AlgoArg::Qptas => SetAlgorithm::Qptas,
            AlgoArg::Greedy => SetAlgorithm::Greedy,
        },
    }
}

/// JSON result, or a one-row CSV in the bench layout.
fn emit<R: Serialize>(cli: &Cli, result: &R, input: &Path, algorithm: &str, epsilon: Option<f64>, value: f64, start: Instant) -> String {
    match cli.format {
        Format::Json => solve::to_json(result),
        Format::Csv => csv_row(input, algorithm, Some(cli.seed), epsilon, Some(value), None, start),
    }
}

fn csv_row(input: &Path, algorithm: &str, seed: Option<u64>, epsilon: Option<f64>, value: Option<f64>, oracle: Option<f64>, start: Instant) -> String {
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    w.write_record([
        input.display().to_string(),
        algorithm.to_string(),
        seed.map(|s| s.to_string()).unwrap_or_default(),
        cell(epsilon),
        cell(value),
        cell(oracle),
        String::new(),
        format!("{:.3}", start.elapsed().as_secs_f64() * 1e3),
    ])
    .expect("in-memory write");
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
}

fn solve_dcg(cli: &Cli, a: &DcgArgs) -> CliResult<String> {
    let inst = match io::load(&a.input)?.instance {
        Instance::SetSystem(s) => s,
        other => return Err(wrong_kind(&a.input, "setsystem", other.kind())),
    };
    if let Some(path) = &a.lp_dump {
        let (lp, _) = build_dcg_lp::<f64>(&inst, GainFunction::DcgStandard);
        std::fs::write(path, lp.to_lp_text()).map_err(|e| divkit::Error::Io(format!("{}: {e}", path.display())))?;
    }
    let params = DcgParams {
        epsilon: a.epsilon,
        u: a.u,
        gamma: a.gamma,
        eta: a.eta,
        trials: a.trials,
        prefix_cap: a.prefix_cap,
    };
    let start = Instant::now();
    let r = solve::solve_dcg(&inst, &params, cli.seed)?;
    Ok(emit(cli, &r, &a.input, r.algorithm, Some(a.epsilon), r.dcg, start))
}

fn oracle(cli: &Cli, a: &OracleArgs) -> CliResult<String> {
    let doc = io::load(&a.input)?;
    let p = a.p.or_else(|| meta_p(&doc));
    let f = a.f.as_deref().map(load_function).transpose()?;
    let start = Instant::now();
    let (name, result) = match &doc.instance {
        Instance::SetSystem(s) => ("brute_force_dcg", solve::oracle_dcg(s)?),
        Instance::Metric(m) => {
            let p = p.ok_or_else(|| CliError::Usage("--p is required for metric instances".into()))?;
            match &f {
                Some(f) => ("brute_force_diversification", solve::oracle_diversification(m, f, p)?),
                None => ("brute_force_dispersion", solve::oracle_dispersion(m, p)?),
            }
        }
        Instance::Dks(d) => ("brute_force_subdks", solve::oracle_dks(d, f.as_ref())?),
        Instance::Submodular(_) => {
            return Err(CliError::Usage("oracle takes a setsystem, metric or dks document".into()));
        }
    };
    Ok(match cli.format {
        Format::Json => solve::to_json(&result),
        Format::Csv => csv_row(&a.input, name, None, None, None, Some(result.value()), start),
    })
}

/// Report and whether the input passed.
fn check(a: &OracleArgs) -> CliResult<(Value, bool)> {
    let doc = io::load(&a.input)?;
    let p = a.p.or_else(|| meta_p(&doc));
    let f = a.f.as_deref().map(load_function).transpose()?;
    Ok(match &doc.instance {
        Instance::Metric(m) => {
            let report = validate_metric(m);
            let mut out = json!({"kind": "metric", "n": m.len(), "metric": report.to_string(), "valid": report.is_ok()});
            if let (Some(p), MetricReport::Ok) = (p, report) {
                out["structural"] = structural(m, f.as_ref(), p)?;
            }
            (out, report.is_ok())
        }
        Instance::SetSystem(s) => (json!({"kind": "setsystem", "n": s.n(), "m": s.m(), "valid": true}), true),
        Instance::Dks(d) => (json!({"kind": "dks", "n": d.n(), "k": d.k(), "forced": d.forced(), "valid": true}), true),
        Instance::Submodular(f) => (json!({"kind": doc.instance.kind(), "n": f.ground_size(), "valid": true}), true),
    })
}

/// Exact optimum and its lower-bound ratio, which is at least 1.
fn structural(m: &Metric, f: Option<&Submodular>, p: usize) -> CliResult<Value> {
    let (set, value, check) = match f {
        Some(f) => {
            let dinst = DiversificationInstance::new(m.clone(), f.clone(), p)?;
            let opt = solve::oracle_diversification(m, f, p)?;
            let set = match &opt {
                solve::OracleResult::Diversification { set, .. } => set.clone(),
                _ => unreachable!("diversification oracle"),
            };
            let check = check_div_structural_lemma(&dinst, &set)?;
            (set, opt.value(), check)
        }
        None => {
            let opt = solve::oracle_dispersion(m, p)?;
            let set = match &opt {
                solve::OracleResult::Dispersion { set, .. } => set.clone(),
                _ => unreachable!("dispersion oracle"),
            };
            let check = check_structural_lemma(m, &set)?;
            (set, opt.value(), check)
        }
    };
    let ratio = if check.ratio.is_finite() { json!(check.ratio) } else { Value::Null };
    Ok(json!({
        "p": p,
        "optimum": set,
        "value": value,
        "u_min": check.u_min,
        "witness": check.witness,
        "ratio": ratio,
        "holds": check.ratio >= 1.0,
    }))
}
