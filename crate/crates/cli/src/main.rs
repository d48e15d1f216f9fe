use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use strata_core::bifurcation3::{classify_k3, sample_diagram, SampleSpec};
use strata_core::combinatorics::{
    catalan, count_d, count_dkm, dispersed_count, enumerate_strata, involution_to_dispersed, stratum_id, Step,
};
use strata_core::portrait::{render_portrait, PortraitSpec};
use strata_core::realization::{random_seed_for_stratum, realize, RealizationProblem};
use strata_core::selfcheck::{self, SelfcheckConfig};
use strata_core::{extract_modulus, Field, Modulus, StrataError, Tolerances};

const MAX_K: usize = 12;

#[derive(Parser)]
#[command(name = "strata-kit", version, about = "Moduli of generic real polynomial vector fields")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Residual accepted by the realization solver.
    #[arg(long, global = true, value_name = "TOL")]
    tol: Option<f64>,
    /// Seed for randomized choices.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the result to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stratum counts at codimension k.
    Count { k: usize },
    /// Canonical list of strata at codimension k.
    Enumerate { k: usize },
    /// Modulus of a field given as JSON `{"k":..,"coeffs":[..]}`.
    Invariant {
        /// JSON text, a file path, or `-` for stdin.
        input: String,
    },
    /// Field realizing a modulus given as JSON.
    Realize {
        /// JSON text, a file path, or `-` for stdin.
        input: String,
    },
    /// Label points of the k = 3 parameter space.
    #[command(allow_negative_numbers = true)]
    Classify3 {
        /// `e2 e1 e0` of a single point.
        #[arg(num_args = 3, value_names = ["E2", "E1", "E0"])]
        eps: Vec<f64>,
        /// Label an n^3 grid instead, one JSON line per point.
        #[arg(long, conflicts_with_all = ["eps", "random"])]
        grid: Option<usize>,
        /// Label n uniform random points instead.
        #[arg(long, conflicts_with = "eps")]
        random: Option<usize>,
        #[arg(long, default_value_t = -2.0)]
        lo: f64,
        #[arg(long, default_value_t = 2.0)]
        hi: f64,
    },
    /// SVG phase portrait of a field or portrait spec given as JSON.
    Portrait {
        /// JSON text, a file path, or `-` for stdin.
        input: String,
    },
    /// Run the acceptance checks.
    Selfcheck {
        /// Comma-separated check ids, names or groups.
        #[arg(long)]
        filter: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Core(StrataError),
    Check,
}

impl From<StrataError> for Failure {
    fn from(e: StrataError) -> Self {
        match e {
            StrataError::InvalidInput(m) => Failure::Usage(m),
            e => Failure::Core(e),
        }
    }
}

fn read_input(arg: &str) -> Result<Value, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed JSON: {e}")))
}

fn parse<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::Usage(format!("not a valid {what}: {e}")))
}

/// Accepts a bare field or any object carrying one under `poly`.
fn field_input(v: Value) -> Result<Field, Failure> {
    match v.get("poly") {
        Some(p) => parse(p.clone(), "field"),
        None => parse(v, "field"),
    }
}

fn check_k(k: usize) -> Result<(), Failure> {
    if (1..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("k must lie in 1..={MAX_K}")))
    }
}

fn path_string(steps: &[Step]) -> String {
    steps
        .iter()
        .map(|s| match s {
            Step::Up => 'U',
            Step::Flat => 'F',
            Step::Down => 'D',
        })
        .collect()
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn count(k: usize, as_json: bool) -> Result<String, Failure> {
    check_k(k)?;
    let k64 = k as u64;
    let d = count_d(k64)?;
    let mut table = Vec::new();
    for m in (0..=k64 + 1).filter(|m| (m + k64 + 1) % 2 == 0) {
        let n = count_dkm(k64, m)?;
        if n > 0 {
            table.push((m, n));
        }
    }
    let (c, dd) = (catalan(k64), dispersed_count(k64));
    if as_json {
        let rows: Vec<Value> = table.iter().map(|(m, n)| json!({ "m": m, "count": n.to_string() })).collect();
        return Ok(pretty(&json!({
            "k": k,
            "D": d.to_string(),
            "D_km": rows,
            "catalan": c.to_string(),
            "dispersed": dd.to_string(),
        })));
    }
    let mut out = format!("D({k}) = {d}\n");
    for (m, n) in table {
        out += &format!("D({k},{m}) = {n}\n");
    }
    out += &format!("C({k}) = {c}\ndispersed({k}) = {dd}");
    Ok(out)
}

fn enumerate(k: usize, as_json: bool) -> Result<String, Failure> {
    check_k(k)?;
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for (i, tau) in enumerate_strata(k).iter().enumerate() {
        let path = if tau.ell() == 0 {
            Some(path_string(involution_to_dispersed(tau)?.steps()))
        } else {
            None
        };
        lines.push(format!(
            "{:<7} m={} ell={} {}{}",
            stratum_id(tau),
            tau.m(),
            tau.ell(),
            tau,
            path.as_deref().map(|p| format!("  path {p}")).unwrap_or_default()
        ));
        records.push(json!({
            "id": stratum_id(tau),
            "index": i,
            "m": tau.m(),
            "ell": tau.ell(),
            "tau": tau,
            "path": path,
        }));
    }
    Ok(if as_json { pretty(&Value::Array(records)) } else { lines.join("\n") })
}

fn invariant(input: &str, tol: &Tolerances) -> Result<String, Failure> {
    let p = field_input(read_input(input)?)?;
    let m = extract_modulus(&p, tol)?;
    Ok(pretty(&serde_json::to_value(&m).expect("modulus serializes")))
}

fn realize_cmd(input: &str, tol: &Tolerances, seed: Option<u64>) -> Result<String, Failure> {
    let target: Modulus = parse(read_input(input)?, "modulus")?;
    let problem = match seed {
        Some(s) => {
            let start = random_seed_for_stratum(&target.tau, s, tol)?;
            RealizationProblem::new(target, start, *tol)?
        }
        None => RealizationProblem::with_default_seed(target, *tol)?,
    };
    let r = realize(&problem)?;
    Ok(pretty(&serde_json::to_value(&r).expect("result serializes")))
}

fn classify3(
    eps: &[f64],
    grid: Option<usize>,
    random: Option<usize>,
    (lo, hi): (f64, f64),
    seed: u64,
    tol: &Tolerances,
    as_json: bool,
) -> Result<String, Failure> {
    let spec = match (grid, random) {
        (Some(n), _) => Some(SampleSpec::Grid { lo, hi, n }),
        (_, Some(n)) => Some(SampleSpec::Random { lo, hi, n, seed }),
        _ => None,
    };
    if let Some(spec) = spec {
        if !(lo < hi) {
            return Err(Failure::Usage("--lo must be below --hi".into()));
        }
        let pts = sample_diagram(&spec, tol)?;
        let lines: Vec<String> = pts
            .iter()
            .map(|p| serde_json::to_string(p).expect("label serializes"))
            .collect();
        return Ok(lines.join("\n"));
    }
    let [e2, e1, e0] = eps else {
        return Err(Failure::Usage("classify3 needs E2 E1 E0, --grid or --random".into()));
    };
    let label = classify_k3(*e2, *e1, *e0, tol)?;
    if as_json {
        let mut v = serde_json::to_value(&label).expect("label serializes");
        v["label"] = Value::String(label.tag());
        return Ok(pretty(&v));
    }
    Ok(format!("{}\nm = {}\ndelta = {:e}", label.tag(), label.m, label.delta))
}

fn portrait(input: &str, tol: &Tolerances) -> Result<String, Failure> {
    let v = read_input(input)?;
    let spec: PortraitSpec = if v.get("window").is_some() || v.get("density").is_some() {
        parse(v, "portrait spec")?
    } else {
        let poly = field_input(v)?;
        PortraitSpec::new(poly, [-2.5, 2.5, -2.5, 2.5])
    };
    let svg = render_portrait(&spec, tol)?;
    Ok(svg.trim_end().to_string())
}

fn selfcheck_cmd(filter: Option<&str>, tol: Tolerances, seed: Option<u64>, as_json: bool) -> (String, bool) {
    let mut cfg = SelfcheckConfig {
        tol,
        ..SelfcheckConfig::default()
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = selfcheck::run(&cfg, filter);
    if as_json {
        return (
            serde_json::to_string_pretty(&report).expect("report serializes"),
            report.passed,
        );
    }
    let mut lines = Vec::new();
    for c in &report.checks {
        lines.push(format!(
            "[{}] {:>2} {:<24} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.measured
        ));
        for f in &c.failures {
            lines.push(format!("       {f}"));
        }
    }
    if report.checks.is_empty() {
        lines.push("no check matches the filter".into());
    }
    (lines.join("\n"), report.passed && !report.checks.is_empty())
}

fn tolerances(g: &Global) -> Result<Tolerances, Failure> {
    match g.tol {
        None => Ok(Tolerances::default()),
        Some(t) if t.is_finite() && t > 0.0 => Ok(Tolerances::with_solver_tol(t)),
        Some(t) => Err(Failure::Usage(format!("--tol must be positive, got {t}"))),
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let g = &cli.global;
    let tol = tolerances(g)?;
    match &cli.cmd {
        Cmd::Count { k } => count(*k, g.json),
        Cmd::Enumerate { k } => enumerate(*k, g.json),
        Cmd::Invariant { input } => invariant(input, &tol),
        Cmd::Realize { input } => realize_cmd(input, &tol, g.seed),
        Cmd::Classify3 {
            eps,
            grid,
            random,
            lo,
            hi,
        } => classify3(eps, *grid, *random, (*lo, *hi), g.seed.unwrap_or(0), &tol, g.json),
        Cmd::Portrait { input } => portrait(input, &tol),
        Cmd::Selfcheck { filter } => {
            let (text, ok) = selfcheck_cmd(filter.as_deref(), tol, g.seed, g.json);
            emit(g, &text)?;
            if ok {
                Ok(String::new())
            } else {
                Err(Failure::Check)
            }
        }
    }
}

fn emit(g: &Global, text: &str) -> Result<(), Failure> {
    match &g.out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{text}");
            Ok(())
        }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("STRATA_KIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let is_selfcheck = matches!(cli.cmd, Cmd::Selfcheck { .. });
    let global = Global {
        json: cli.global.json,
        tol: cli.global.tol,
        seed: cli.global.seed,
        out: cli.global.out.clone(),
    };
    let result = run(cli).and_then(|text| if is_selfcheck { Ok(()) } else { emit(&global, &text) });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                StrataError::NotGeneric(_) => ExitCode::from(3),
                _ => ExitCode::from(4),
            }
        }
    }
}
