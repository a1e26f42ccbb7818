use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use apvar_core::arith::exact::format_real;
use apvar_core::arith::{
    cache, ramanujan_sum, sieve_all, DivisorSums, Sequence, SieveConfig, SieveTable,
};
use apvar_core::dirichlet::residue_dk_correlation;
use apvar_core::pipeline::{
    run_theorem1_with, run_theorem2_with, BoundReport, Ending, ExperimentConfig, SCHEMA_VERSION,
};
use apvar_core::variance::variance_mod_q;
use apvar_core::verify::{run_suite, Suite, VerifyOptions};
use apvar_core::windows::{build_weights, WeightKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const MANIFEST_SCHEMA: u32 = 1;
const MAX_TABLE_CELLS: u64 = 10_000_000;
const MAX_VARIANCE_WORK: u64 = 2_000_000_000;

#[derive(Parser)]
#[command(
    name = "apvar",
    version,
    about = "Variance of arithmetic sequences in progressions"
)]
struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for reports, plot data and the run manifest
    #[arg(long = "out-dir", global = true, default_value = "apvar-out")]
    out_dir: PathBuf,
    /// Format of the summary printed to stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sieve Λ, μ, φ and d_j up to N and print their summatory values
    Sieve(SieveArgs),
    /// Run the self-check suites; exits nonzero if any check fails
    Verify(VerifyArgs),
    /// Run a full lower-bound chain and write its report
    Experiment(ExperimentArgs),
    /// Dump a table as CSV
    Table(TableArgs),
}

#[derive(Args)]
struct SieveArgs {
    #[arg(long = "N", value_parser = parse_count)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Euler,
    Windows,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long = "inject-fault", hide = true)]
    inject_fault: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Theorem1,
    Theorem2,
}

#[derive(Clone, Copy, ValueEnum)]
enum EndingArg {
    First,
    Second,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    kind: ExperimentKind,
    #[arg(long = "N", value_parser = parse_count, default_value = "100000")]
    n: usize,
    /// Q = N^{Q-exp}; defaults to 0.75 for theorem1 and 0.8 for theorem2
    #[arg(long = "Q-exp")]
    q_exp: Option<f64>,
    /// Divisor-function order for theorem2
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// K = (log N)^{K-exp} before clipping
    #[arg(long = "K-exp")]
    k_exp: Option<f64>,
    /// Sieve length for theorem1 (theorem2 sets R from the ending)
    #[arg(long = "R")]
    r: Option<f64>,
    /// FFT grid size, a power of two ≥ 2N
    #[arg(long = "T", value_parser = parse_count)]
    t: Option<usize>,
    #[arg(long, value_enum, default_value = "second")]
    ending: EndingArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    Ramanujan,
    Variance,
    Weights,
    Residues,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Prime,
    Divisor,
}

#[derive(Args)]
struct TableArgs {
    #[arg(value_enum)]
    what: TableKind,
    #[arg(long = "q-max", default_value_t = 12)]
    q_max: u64,
    #[arg(long = "n-max", default_value_t = 12)]
    n_max: i64,
    /// lambda, d2, d3, d4 or file:<path> with rows n,a_n
    #[arg(long, default_value = "d2")]
    seq: String,
    #[arg(long = "N", value_parser = parse_count, default_value = "1000")]
    n: usize,
    #[arg(long, value_enum, default_value = "prime")]
    kind: WeightArg,
    #[arg(long = "R", default_value_t = 100.0)]
    r: f64,
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Accepts integers written as "100000" or "1e5".
fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a number"))?;
    if !v.is_finite() || v < 0.0 || v.fract() != 0.0 || v > 1e15 {
        return Err(format!("'{s}' is not a non-negative integer"));
    }
    Ok(v as usize)
}

#[derive(Serialize)]
struct Versions {
    apvar: &'static str,
    apvar_core: &'static str,
    report_schema: u32,
}

#[derive(Serialize)]
struct RunManifest {
    schema_version: u32,
    command: String,
    args: Vec<String>,
    config: serde_json::Value,
    versions: Versions,
    threads: usize,
    wall_time_seconds: f64,
    outputs: Vec<String>,
    status: String,
    message: Option<String>,
}

struct Outcome {
    config: serde_json::Value,
    outputs: Vec<String>,
    passed: bool,
}

fn table_for(n: usize, k: u32) -> Result<SieveTable> {
    match std::env::var_os("APVAR_CACHE_DIR") {
        Some(dir) => Ok(cache::load_or_build(
            Path::new(&dir),
            n,
            k,
            &SieveConfig::default(),
        )?),
        None => Ok(sieve_all(n, k)?),
    }
}

fn load_sequence(name: &str, n: usize) -> Result<Sequence> {
    if let Some(path) = name.strip_prefix("file:") {
        let seq = Sequence::from_csv(Path::new(path)).with_context(|| format!("reading {path}"))?;
        return Ok(if n > 0 && n < seq.len() {
            seq.truncate(n)?
        } else {
            seq
        });
    }
    let seq = match name {
        "lambda" => table_for(n, 2)?.lambda_sequence(),
        "d2" | "d3" | "d4" => {
            let k = name[1..].parse().expect("digit");
            table_for(n, k)?.dk_sequence(k)
        }
        _ => bail!("unknown sequence '{name}' (lambda, d2, d3, d4, file:<path>)"),
    };
    Ok(seq)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str, outputs: &mut Vec<String>) -> Result<()> {
    match out {
        Some(p) => {
            write_text(p, text)?;
            outputs.push(p.display().to_string());
        }
        None => {
            print!("{text}");
            outputs.push("stdout".into());
        }
    }
    Ok(())
}

fn cmd_sieve(a: &SieveArgs, out_dir: &Path) -> Result<Outcome> {
    if a.k < 2 {
        bail!("--k must be at least 2");
    }
    let t = table_for(a.n, a.k)?;
    let mut csv = String::from("quantity,value\n");
    writeln!(csv, "psi,{}", format_real(t.psi()))?;
    writeln!(
        csv,
        "mertens,{}",
        t.mu_slice().iter().map(|&m| i64::from(m)).sum::<i64>()
    )?;
    writeln!(
        csv,
        "phi_sum,{}",
        t.phi_slice().iter().map(|&p| u64::from(p)).sum::<u64>()
    )?;
    for j in 2..=a.k {
        writeln!(
            csv,
            "d{j}_sum,{}",
            t.d_slice(j).iter().map(|&d| u64::from(d)).sum::<u64>()
        )?;
    }
    let path = out_dir.join(format!("sieve-N{}-k{}.csv", a.n, a.k));
    write_text(&path, &csv)?;
    print!("{csv}");
    Ok(Outcome {
        config: serde_json::json!({ "N": a.n, "k": a.k }),
        outputs: vec![path.display().to_string()],
        passed: true,
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let suite = match a.suite {
        SuiteArg::Identities => Suite::Identities,
        SuiteArg::Euler => Suite::Euler,
        SuiteArg::Windows => Suite::Windows,
        SuiteArg::All => Suite::All,
    };
    let opts = VerifyOptions {
        inject_fault: a.inject_fault,
    };
    let results = run_suite(suite, &opts)?;
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        println!("{} checks passed", results.len());
    } else {
        println!("{failed} of {} checks failed", results.len());
    }
    Ok(Outcome {
        config: serde_json::json!({ "suite": suite, "inject_fault": a.inject_fault }),
        outputs: vec!["stdout".into()],
        passed: failed == 0,
    })
}

fn plot_csv<A: ToString>(header: &str, rows: impl Iterator<Item = (A, f64)>) -> String {
    let mut s = format!("{header}\n");
    for (x, y) in rows {
        s.push_str(&x.to_string());
        s.push(',');
        s.push_str(&format_real(y));
        s.push('\n');
    }
    s
}

fn json_text<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn cmd_experiment(a: &ExperimentArgs, out_dir: &Path, format: Format) -> Result<Outcome> {
    let nf = a.n as f64;
    if let Some(x) = a.q_exp {
        if !(x > 0.0 && x <= 1.0) {
            bail!("--Q-exp {x} puts Q = N^{x} outside [2, N]; choose --Q-exp in (0, 1]");
        }
    }
    let (report, details, plot, stem): (BoundReport, String, String, &str) = match a.kind {
        ExperimentKind::Theorem1 => {
            let q = nf.powf(a.q_exp.unwrap_or(0.75));
            let mut cfg = ExperimentConfig::theorem1(a.n, q, a.k_exp, a.epsilon)?;
            if let Some(d) = a.delta {
                cfg.delta = d;
            }
            if let Some(r) = a.r {
                cfg = cfg.with_r(r)?;
            }
            if let Some(t) = a.t {
                cfg = cfg.with_grid(t)?;
            }
            let cfg = cfg.with_seed(a.seed);
            let run = run_theorem1_with(&cfg, &table_for(a.n, 2)?)?;
            let plot = plot_csv("q,restricted_variance", run.profile.iter().copied());
            (run.report, json_text(&run.summary)?, plot, "theorem1")
        }
        ExperimentKind::Theorem2 => {
            if a.r.is_some() {
                bail!("--R is not used by theorem2: the ending sets R (Chebyshev choice or N^(1/2 − δ/2))");
            }
            let q = nf.powf(a.q_exp.unwrap_or(0.8));
            let mut cfg = ExperimentConfig::theorem2(a.n, q, a.k, a.delta, a.k_exp, a.epsilon)?;
            if let Some(t) = a.t {
                cfg = cfg.with_grid(t)?;
            }
            let cfg = cfg.with_seed(a.seed);
            let ending = match a.ending {
                EndingArg::First => Ending::First,
                EndingArg::Second => Ending::Second,
            };
            let run = run_theorem2_with(&cfg, ending, &table_for(a.n, a.k)?)?;
            let plot = match ending {
                Ending::First => plot_csv(
                    "alpha,polynomial",
                    run.plot.iter().map(|&(x, y)| (format_real(x), y)),
                ),
                Ending::Second => {
                    plot_csv("q,variance", run.plot.iter().map(|&(x, y)| (x as u64, y)))
                }
            };
            let stem = match ending {
                Ending::First => "theorem2-first",
                Ending::Second => "theorem2-second",
            };
            (run.report, json_text(&run.summary)?, plot, stem)
        }
    };
    let report_json = json_text(&report)?;
    let csv = format!("{}\n{}\n", BoundReport::csv_header(), report.csv_row());
    let files = [
        (format!("{stem}-report.json"), &report_json),
        (format!("{stem}-summary.csv"), &csv),
        (format!("{stem}-details.json"), &details),
        (format!("{stem}-plot.csv"), &plot),
    ];
    let mut outputs = Vec::new();
    for (name, text) in files {
        let path = out_dir.join(name);
        write_text(&path, text)?;
        outputs.push(path.display().to_string());
    }
    match format {
        Format::Json => print!("{report_json}"),
        Format::Csv => print!("{csv}"),
    }
    Ok(Outcome {
        config: serde_json::to_value(&report.config)?,
        outputs,
        passed: true,
    })
}

fn cmd_table(a: &TableArgs) -> Result<Outcome> {
    let mut s = String::new();
    let config;
    match a.what {
        TableKind::Ramanujan => {
            if a.q_max < 1
                || a.n_max < 1
                || a.q_max.saturating_mul(a.n_max as u64) > MAX_TABLE_CELLS
            {
                bail!("need 1 ≤ q-max, 1 ≤ n-max and q-max·n-max ≤ {MAX_TABLE_CELLS}");
            }
            s.push_str("q,n,c_q(n)\n");
            for q in 1..=a.q_max {
                for n in 1..=a.n_max {
                    writeln!(s, "{q},{n},{}", ramanujan_sum(q, n))?;
                }
            }
            config =
                serde_json::json!({ "table": "ramanujan", "q_max": a.q_max, "n_max": a.n_max });
        }
        TableKind::Variance => {
            let seq = load_sequence(&a.seq, a.n)?;
            if a.q_max < 1 || a.q_max.saturating_mul(seq.len() as u64) > MAX_VARIANCE_WORK {
                bail!("need 1 ≤ q-max and q-max·N ≤ {MAX_VARIANCE_WORK}");
            }
            s.push_str("q,V\n");
            for q in 1..=a.q_max {
                writeln!(s, "{q},{}", variance_mod_q(&seq, q).v)?;
            }
            config = serde_json::json!({ "table": "variance", "seq": a.seq, "N": seq.len(), "q_max": a.q_max });
        }
        TableKind::Weights => {
            if !(a.r >= 2.0) || a.r > MAX_TABLE_CELLS as f64 {
                bail!("need 2 ≤ R ≤ {MAX_TABLE_CELLS}");
            }
            let kind = match a.kind {
                WeightArg::Prime => WeightKind::PrimeSieve,
                WeightArg::Divisor => WeightKind::DivisorK { k: a.k },
            };
            let w = build_weights(kind, a.r)?;
            s.push_str("r,b_r\n");
            for (i, b) in w.values().iter().enumerate() {
                writeln!(s, "{},{}", i + 1, format_real(*b))?;
            }
            config = serde_json::json!({ "table": "weights", "kind": kind, "R": a.r });
        }
        TableKind::Residues => {
            if a.k < 2 || a.q_max < 1 || a.q_max > 10_000 || a.q_max as usize > a.n {
                bail!("need k ≥ 2 and 1 ≤ q-max ≤ min(N, 10000)");
            }
            let seq = table_for(a.n, a.k)?.dk_sequence(a.k);
            let sums = DivisorSums::new(&seq, a.q_max as usize, None);
            s.push_str("q,k,N,residue,error,direct,relative_difference\n");
            for q in 1..=a.q_max {
                let r = residue_dk_correlation(q, a.k, a.n as f64)?;
                let direct = sums.correlation(q);
                let rel = if direct != 0.0 {
                    (r.value - direct).abs() / direct.abs()
                } else {
                    f64::NAN
                };
                writeln!(
                    s,
                    "{q},{},{},{},{},{},{}",
                    a.k,
                    a.n,
                    format_real(r.value),
                    format_real(r.error),
                    format_real(direct),
                    format_real(rel)
                )?;
            }
            config =
                serde_json::json!({ "table": "residues", "k": a.k, "N": a.n, "q_max": a.q_max });
        }
    }
    let mut outputs = Vec::new();
    emit(&a.out, &s, &mut outputs)?;
    Ok(Outcome {
        config,
        outputs,
        passed: true,
    })
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Sieve(_) => "sieve".into(),
        Command::Verify(_) => "verify".into(),
        Command::Experiment(a) => match a.kind {
            ExperimentKind::Theorem1 => "experiment-theorem1".into(),
            ExperimentKind::Theorem2 => match a.ending {
                EndingArg::First => "experiment-theorem2-first".into(),
                EndingArg::Second => "experiment-theorem2-second".into(),
            },
        },
        Command::Table(a) => format!(
            "table-{}",
            match a.what {
                TableKind::Ramanujan => "ramanujan",
                TableKind::Variance => "variance",
                TableKind::Weights => "weights",
                TableKind::Residues => "residues",
            }
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: could not configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let name = command_name(&cli.command);
    let result = fs::create_dir_all(&cli.out_dir)
        .with_context(|| format!("creating {}", cli.out_dir.display()))
        .and_then(|_| match &cli.command {
            Command::Sieve(a) => cmd_sieve(a, &cli.out_dir),
            Command::Verify(a) => cmd_verify(a),
            Command::Experiment(a) => cmd_experiment(a, &cli.out_dir, cli.format),
            Command::Table(a) => cmd_table(a),
        });
    let (status, message, outcome) = match result {
        Ok(o) if o.passed => ("ok", None, Some(o)),
        Ok(o) => (
            "failed",
            Some("one or more checks failed".to_string()),
            Some(o),
        ),
        Err(e) => ("error", Some(format!("{e:#}")), None),
    };
    let manifest = RunManifest {
        schema_version: MANIFEST_SCHEMA,
        command: name.clone(),
        args: std::env::args().skip(1).collect(),
        config: outcome
            .as_ref()
            .map(|o| o.config.clone())
            .unwrap_or(serde_json::Value::Null),
        versions: Versions {
            apvar: env!("CARGO_PKG_VERSION"),
            apvar_core: apvar_core::VERSION,
            report_schema: SCHEMA_VERSION,
        },
        threads: rayon::current_num_threads(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        outputs: outcome
            .as_ref()
            .map(|o| o.outputs.clone())
            .unwrap_or_default(),
        status: status.into(),
        message: message.clone(),
    };
    let path = cli.out_dir.join(format!("manifest-{name}.json"));
    let written = json_text(&manifest).and_then(|text| write_text(&path, &text));
    if let Err(e) = written {
        eprintln!("error: could not write manifest: {e:#}");
    }
    match status {
        "ok" => ExitCode::SUCCESS,
        "failed" => ExitCode::from(1),
        _ => {
            eprintln!("error: {}", message.unwrap_or_default());
            ExitCode::from(2)
        }
    }
}
