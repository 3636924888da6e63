//! The `genusmaps` command line: table building, constants, samplers and the
//! verification suites. Every command prints JSON (or CSV for `tau`).

mod asymptotics;
mod json;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub use asymptotics::{asymptotics_report, genus_along, halving_ladder, TrendPoint, TrendReport};
pub use json::{format_f64, VERSION};

use crate::brute_oracle::{enumerate_counts, enumerate_gluings, MAX_N};
use crate::error::{Error, Result};
use crate::exact_enum::{persist, CountTable};
use crate::hyper_constants::{
    d_of_h, drift, f_exponent, near_diagonal_bounds, type2_bridge, HyperParams,
    NearDiagonalReport,
};
use crate::markov_props::{complete_monotonicity, hankel_moments, peeling_check, MixtureSpec};
use crate::psht_sim::{
    estimate_drift, estimate_inverse_degree, run_chain_with, stream_rng, PeelingLaw,
    DEFAULT_SEED, DEFAULT_STEP_BUDGET,
};

/// Environment variable naming the table cache directory.
pub const CACHE_ENV: &str = "GENUSMAPS_CACHE";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "genusmaps", version, about = "Triangulations by genus and hyperbolic triangulation constants")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact τ(n,g) table.
    Tau {
        #[arg(long)]
        nmax: usize,
        /// Largest genus kept (default: all).
        #[arg(long)]
        gmax: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// All constants at one parameter point.
    Constants(Point),
    #[command(subcommand)]
    Sample(Sample),
    #[command(subcommand)]
    Oracle(Oracle),
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Exactly one of λ, h, θ.
#[derive(Args, Debug, Clone, Copy)]
#[group(required = true, multiple = false)]
pub struct Point {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
}

impl Point {
    fn params(&self) -> Result<HyperParams> {
        match (self.lambda, self.h, self.theta) {
            (Some(l), None, None) => HyperParams::from_lambda(l),
            (None, Some(h), None) => HyperParams::from_h(h),
            (None, None, Some(t)) => HyperParams::from_theta(t),
            _ => Err(Error::Domain("give exactly one of --lambda, --h, --theta".into())),
        }
    }
}

/// λ or h, for the samplers.
#[derive(Args, Debug, Clone, Copy)]
#[group(required = true, multiple = false)]
pub struct SubcriticalPoint {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
}

impl SubcriticalPoint {
    fn params(&self) -> Result<HyperParams> {
        match (self.lambda, self.h) {
            (Some(l), None) => HyperParams::from_lambda(l),
            (None, Some(h)) => HyperParams::from_h(h),
            _ => Err(Error::Domain("give exactly one of --lambda, --h".into())),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Sample {
    /// Perimeter and volume drift of the peeling chain.
    Chain {
        #[command(flatten)]
        point: SubcriticalPoint,
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        #[arg(long, default_value_t = 1000)]
        reps: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// CSV dump `step,perimeter,volume` of replication 0.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Mean inverse root degree.
    Degree {
        #[command(flatten)]
        point: SubcriticalPoint,
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Peeling steps allowed per replication.
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum Oracle {
    /// Brute-force gluing counts for n ≤ 3.
    Enum {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// Normalized peeling-equation residuals for p = 1..pmax.
    PeelingEq {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 10)]
        pmax: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Complete monotonicity of a^p_v for a finite mixture.
    Monotonic {
        /// `l1:w1,l2:w2,...`
        #[arg(long)]
        atoms: String,
        #[arg(long, default_value_t = 10)]
        kmax: usize,
        #[arg(long, default_value_t = 5)]
        pmax: usize,
        #[arg(long, default_value_t = 30)]
        vmax: usize,
    },
    /// Recurrence against the brute-force oracle for n ≤ 3.
    Oracle,
    /// Trend of (1/n)log(τ(n,g_n)/n^{2g_n}) against f(θ), with g_n = ⌊θn⌋.
    Asymptotics {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 512)]
        nmax: usize,
        /// Comma-separated n ladder (default: nmax/8, nmax/4, nmax/2, nmax).
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Sandwich of τ((2+ε)g,g) for g ≤ gmax.
    NearDiagonal {
        #[arg(long, default_value_t = 6)]
        gmax: usize,
    },
}

/// Outcome of a command: the document to print and whether it passed.
struct Outcome {
    body: String,
    passed: bool,
}

impl Outcome {
    fn json(command: &str, params: Value, result: impl Serialize, passed: bool) -> Result<Self> {
        Ok(Outcome {
            body: json::render(&json::envelope(command, params, result)?),
            passed,
        })
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) | Error::Io(_) => EXIT_USAGE,
                _ => EXIT_FAILED,
            }
        }
    }
}

/// Runs a parsed command line; `Ok(false)` means a verification failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let outcome = match cli.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
            pool.install(|| execute(&cli.command))?
        }
        None => execute(&cli.command)?,
    };
    emit(cli.out.as_deref(), &outcome.body)?;
    Ok(outcome.passed)
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

/// Table from the cache directory in GENUSMAPS_CACHE, or built in memory.
pub fn count_table(n_max: usize, genus_cap: Option<usize>) -> Result<CountTable> {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => persist::load_or_build(Path::new(&dir), n_max, genus_cap),
        _ => CountTable::build(n_max, genus_cap),
    }
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Tau { nmax, gmax, format } => tau(*nmax, *gmax, *format),
        Command::Constants(point) => constants(point),
        Command::Sample(Sample::Chain { point, steps, reps, seed, trajectory }) => {
            sample_chain(point, *steps, *reps, *seed, trajectory.as_deref())
        }
        Command::Sample(Sample::Degree { point, reps, seed, budget }) => {
            sample_degree(point, *reps, *seed, *budget)
        }
        Command::Oracle(Oracle::Enum { n }) => oracle_enum(*n),
        Command::Verify(v) => verify(v),
    }
}

fn tau(nmax: usize, gmax: Option<usize>, format: Format) -> Result<Outcome> {
    let table = count_table(nmax, gmax)?;
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            persist::write_csv(&table, &mut buf)?;
            Ok(Outcome {
                body: String::from_utf8(buf).expect("CSV is ASCII"),
                passed: true,
            })
        }
        Format::Json => {
            let rows: Vec<Value> = (0..=nmax)
                .flat_map(|n| {
                    let row = table.row(n).unwrap_or(&[]);
                    row.iter()
                        .enumerate()
                        .map(move |(g, t)| json!({"n": n, "g": g, "tau": json::big_number(t)}))
                })
                .collect();
            Outcome::json("tau", json!({"nmax": nmax, "gmax": gmax}), rows, true)
        }
    }
}

fn constants(point: &Point) -> Result<Outcome> {
    let hp = point.params()?;
    let echo = json!({"lambda": point.lambda, "h": point.h, "theta": point.theta});
    let mut m = match serde_json::to_value(hp) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    };
    m.insert("critical".into(), json!(hp.is_critical()));
    m.insert("d".into(), json!(d_of_h(hp.h)));
    m.insert("drift".into(), json!(drift(hp.lambda)?));
    m.insert("f_theta".into(), json!(f_exponent(hp.theta, asymptotics::QUAD_TOL)?));
    // The bridge needs α < 1, i.e. h > 0; it holds at λ_c too.
    m.insert("bridge".into(), json!(type2_bridge(hp.lambda)?));
    Outcome::json("constants", echo, Value::Object(m), true)
}

fn sample_chain(
    point: &SubcriticalPoint,
    steps: u64,
    reps: u64,
    seed: u64,
    trajectory: Option<&Path>,
) -> Result<Outcome> {
    if reps < 2 || steps == 0 {
        return Err(Error::Domain("need --reps >= 2 and --steps >= 1".into()));
    }
    let hp = point.params()?;
    let law = PeelingLaw::new(hp.lambda)?;
    if let Some(path) = trajectory {
        let states = run_chain_with(&law, steps, &mut stream_rng(seed, 0))?;
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["step", "perimeter", "volume"])?;
        for s in &states {
            w.serialize((s.step, s.perimeter, s.volume))?;
        }
        w.flush()?;
    }
    let est = estimate_drift(&law, steps, reps, seed)?;
    let echo = json!({"lambda": hp.lambda, "h": hp.h, "steps": steps, "reps": reps, "seed": seed});
    Outcome::json("sample chain", echo, est, true)
}

fn sample_degree(point: &SubcriticalPoint, reps: u64, seed: u64, budget: u64) -> Result<Outcome> {
    if reps < 2 {
        return Err(Error::Domain("need --reps >= 2".into()));
    }
    let hp = point.params()?;
    let law = PeelingLaw::new(hp.lambda)?;
    let est = estimate_inverse_degree(&law, reps, seed, budget)?;
    let echo = json!({"lambda": hp.lambda, "h": hp.h, "reps": reps, "seed": seed, "budget": budget});
    Outcome::json("sample degree", echo, est, true)
}

fn oracle_enum(n: usize) -> Result<Outcome> {
    let tally = enumerate_gluings(n)?;
    let counts: Map<String, Value> = enumerate_counts(n)?
        .iter()
        .map(|(g, t)| (g.to_string(), json::big_number(t)))
        .collect();
    let result = json!({
        "n": n,
        "counts": counts,
        "involutions": tally.involutions,
        "disconnected": tally.disconnected,
        "connected_by_genus": tally.connected,
    });
    Outcome::json("oracle enum", json!({"n": n}), result, true)
}

fn verify(v: &Verify) -> Result<Outcome> {
    match v {
        Verify::PeelingEq { lambda, pmax, tol } => {
            let check = peeling_check(*lambda, *pmax, *tol)?;
            let passed = check.passed;
            let echo = json!({"lambda": lambda, "pmax": pmax, "tol": tol});
            Outcome::json("verify peeling-eq", echo, check, passed)
        }
        Verify::Monotonic { atoms, kmax, pmax, vmax } => {
            let spec: MixtureSpec = atoms.parse()?;
            let report = complete_monotonicity(&spec, *pmax, *kmax, *vmax)?;
            let hankel = (spec.atoms().len() <= 3).then(|| hankel_moments(&spec)).transpose()?;
            let hankel_ok = hankel
                .as_ref()
                .is_none_or(|h| h.positive_semidefinite && h.rank == spec.atoms().len());
            let passed = report.holds && hankel_ok;
            let echo = json!({"atoms": atoms, "kmax": kmax, "pmax": pmax, "vmax": vmax});
            let result = json!({"passed": passed, "monotonicity": report, "hankel": hankel});
            Outcome::json("verify monotonic", echo, result, passed)
        }
        Verify::Oracle => {
            let report = oracle_report()?;
            let passed = report.iter().all(|r| r.agree);
            Outcome::json("verify oracle", json!({"nmax": MAX_N}), json!({"passed": passed, "rows": report}), passed)
        }
        Verify::Asymptotics { theta, nmax, n } => {
            let ladder = n.clone().unwrap_or_else(|| halving_ladder(*nmax));
            let top = *ladder.iter().max().unwrap_or(nmax);
            let table = count_table(top, Some(genus_along(*theta, top)))?;
            let report = asymptotics_report(&table, *theta, &ladder)?;
            let passed = report.dev_nonincreasing;
            let echo = json!({"theta": theta, "nmax": nmax, "n": ladder});
            Outcome::json("verify asymptotics", echo, report, passed)
        }
        Verify::NearDiagonal { gmax } => {
            let reports = near_diagonal_suite(*gmax)?;
            let passed = reports.iter().all(|r| r.sandwich_holds() == Some(true));
            Outcome::json(
                "verify near-diagonal",
                json!({"gmax": gmax}),
                json!({"passed": passed, "rows": reports}),
                passed,
            )
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleRow {
    pub n: usize,
    pub g: usize,
    #[serde(serialize_with = "as_number")]
    pub oracle: num_bigint::BigUint,
    #[serde(serialize_with = "as_number")]
    pub recurrence: num_bigint::BigUint,
    pub agree: bool,
}

fn as_number<S: serde::Serializer>(x: &num_bigint::BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    json::big_number(x).serialize(s)
}

/// τ(n,g) from the oracle and from the recurrence for every n ≤ 3 and every
/// genus 0..=(n+1)/2, zeros included.
pub fn oracle_report() -> Result<Vec<OracleRow>> {
    let table = CountTable::build(MAX_N, None)?;
    let mut rows = Vec::new();
    for n in 1..=MAX_N {
        let brute = enumerate_counts(n)?;
        for g in 0..=crate::exact_enum::max_genus(n) {
            let oracle = brute.get(&g).cloned().unwrap_or_default();
            let recurrence = table.tau(n, g).cloned().unwrap_or_default();
            rows.push(OracleRow { n, g, agree: oracle == recurrence, oracle, recurrence });
        }
    }
    Ok(rows)
}

/// Excess ratios tried at each genus; only those with εg integral are used.
pub const NEAR_DIAGONAL_EPS: [(u64, u64); 7] = [(1, 6), (1, 3), (1, 2), (2, 3), (1, 1), (3, 2), (2, 1)];

pub fn near_diagonal_suite(gmax: usize) -> Result<Vec<NearDiagonalReport>> {
    if gmax == 0 {
        return Err(Error::Domain("--gmax must be >= 1".into()));
    }
    let n_top = 4 * gmax;
    let table = CountTable::build(n_top, None)?;
    let mut out = Vec::new();
    for g in 1..=gmax {
        for &(a, b) in &NEAR_DIAGONAL_EPS {
            let eps = Ratio::new(a, b);
            if (eps * Ratio::from_integer(g as u64)).is_integer() {
                out.push(near_diagonal_bounds(&table, g, eps)?);
            }
        }
    }
    Ok(out)
}
