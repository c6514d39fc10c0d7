//! `omega`: exact bounds, functional evaluation, verification suites and
//! searches, each emitted as a report carrying the manifest that reproduces it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use omega_core::bounds::{
    ekr_bound, omega_cross_bound, omega_intersecting_bound, omega_strict_bound, pm_star_bound, BoundValue,
};
use omega_core::search::{
    uniqueness_report, with_workers, HeuristicConfig, MaximizerRegistry, SearchOptions, SearchResult,
};
use omega_core::verify::{SuiteParams, SuiteRegistry};
use omega_core::weights::{intersection_profile, omega_cross, omega_cross_strict, omega_family, omega_generic, WeightRegistry};
use omega_core::{Error, Family, FamilyJson};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "omega", version, about = "Summed intersection sizes of intersecting set families")]
struct Cli {
    /// Emit the machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for searches and sweeps (0 = all cores). Never changes the output.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Seed for sampled sweeps and annealing.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum BoundArg {
    Family,
    Cross,
    Strict,
    Ekr,
    Pm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OmegaMode {
    Family,
    Cross,
    Strict,
}

#[derive(Debug, Clone, Args)]
struct Shape {
    n: u32,
    k: u32,
    l: Option<u32>,
}

#[derive(Debug, Clone, Subcommand)]
enum Command {
    /// Exact closed-form bound: family|strict|ekr N K, cross N K L, pm N K L M.
    Bound { kind: BoundArg, n: u32, k: u32, l: Option<u32>, m: Option<u32> },
    /// Evaluate ω on family files.
    Omega {
        mode: OmegaMode,
        #[arg(required = true, num_args = 1..=2)]
        files: Vec<PathBuf>,
        #[arg(long, default_value = "meet")]
        weight: String,
        /// Include the count of pairs meeting in exactly m elements, for each m.
        #[arg(long)]
        profile: bool,
    },
    /// Run a verification suite: katona|doublecount|identity|extremal.
    Verify {
        suite: String,
        n: Option<u32>,
        k: Option<u32>,
        l: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
        /// Sweep every cyclic order (sampled above 8 points).
        #[arg(long)]
        all_perms: bool,
        /// Family files for `doublecount` instead of stars.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        families: Option<Vec<PathBuf>>,
    },
    /// Exhaustive maximization over intersecting families (or cross pairs with L).
    SearchExact {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value = "branch-and-bound")]
        strategy: String,
    },
    /// Simulated annealing; never trusted for optimality.
    SearchHeuristic {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long)]
        restarts: Option<u32>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        decay: Option<f64>,
    },
    /// Re-run the command recorded in a JSON report's manifest.
    Replay { report: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Outcome {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    command: String,
    /// Normalized argument vector; `omega <args>` reproduces the report.
    args: Vec<String>,
    params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    version: String,
    runtime_ms: u64,
    outcome: Outcome,
}

#[derive(Debug, Serialize)]
struct Report {
    manifest: Manifest,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorBody>,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
}

/// A failure, with the exit code it maps to.
#[derive(Debug)]
enum Failure {
    Core(Error),
    Input { path: PathBuf, message: String },
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Core(Error::TooLarge { .. }) => "too-large",
            Failure::Core(Error::Overflow(_)) => "overflow",
            Failure::Core(Error::Counterexample(_)) => "counterexample",
            Failure::Core(Error::Hypothesis(_)) => "hypothesis",
            Failure::Core(Error::Parse(_)) | Failure::Input { .. } => "parse",
            Failure::Core(_) => "usage",
            Failure::Io(_) => "io",
        }
    }

    fn exit_code(&self) -> u8 {
        match self.kind() {
            "counterexample" => 1,
            "too-large" | "overflow" => 3,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Input { path, message } => format!("{}: {message}", path.display()),
            Failure::Io(m) => m.clone(),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

/// The command's result, its text rendering, and pass/fail.
struct Output {
    result: Value,
    text: String,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (cli, json) = match cli.command {
        Command::Replay { ref report } => match replay_target(report, cli.workers, cli.out.clone()) {
            Ok(inner) => (inner, cli.json),
            Err(f) => return finish(&cli, Err(f), 0),
        },
        _ => {
            let json = cli.json;
            (cli, json)
        }
    };
    let t = Instant::now();
    let out = execute(&cli);
    let elapsed = t.elapsed().as_millis() as u64;
    finish(&Cli { json, ..cli }, out, elapsed)
}

fn finish(cli: &Cli, out: Run<Output>, runtime_ms: u64) -> ExitCode {
    let (outcome, code) = match &out {
        Ok(o) if o.passed => (Outcome::Pass, 0),
        Ok(_) => (Outcome::Fail, 1),
        Err(f) if f.exit_code() == 1 => (Outcome::Fail, 1),
        Err(f) => (Outcome::Error, f.exit_code()),
    };
    let manifest = Manifest {
        command: command_name(&cli.command).to_string(),
        args: canonical_args(cli),
        params: params(cli),
        seed: seed_used(cli),
        version: VERSION.to_string(),
        runtime_ms,
        outcome,
    };
    let (body, to_stderr) = match (&out, cli.json) {
        (Ok(o), true) => (pretty(&Report { manifest, result: Some(o.result.clone()), error: None }), false),
        (Ok(o), false) => (o.text.clone(), false),
        (Err(f), true) => {
            let error = ErrorBody { kind: f.kind(), message: f.message() };
            eprintln!("error: {}", error.message);
            (pretty(&Report { manifest, result: None, error: Some(error) }), false)
        }
        (Err(f), false) => (format!("error: {}\n", f.message()), true),
    };
    if to_stderr {
        eprint!("{body}");
    } else if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &body) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else {
        print!("{body}");
    }
    ExitCode::from(code)
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn replay_target(path: &Path, workers: usize, out: Option<PathBuf>) -> Run<Cli> {
    let text = read(path)?;
    #[derive(Deserialize)]
    struct Stored {
        manifest: Manifest,
    }
    let stored: Stored = serde_json::from_str(&text).map_err(|e| json_error(path, &text, &e))?;
    if stored.manifest.version != VERSION {
        eprintln!("warning: report written by version {}, replaying with {VERSION}", stored.manifest.version);
    }
    let argv = std::iter::once("omega".to_string()).chain(stored.manifest.args);
    let mut cli = Cli::try_parse_from(argv).map_err(|e| Failure::Input { path: path.to_path_buf(), message: e.to_string() })?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(Failure::Input { path: path.to_path_buf(), message: "manifest records a replay".into() });
    }
    cli.workers = workers;
    cli.out = out;
    Ok(cli)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Bound { .. } => "bound",
        Command::Omega { .. } => "omega",
        Command::Verify { .. } => "verify",
        Command::SearchExact { .. } => "search-exact",
        Command::SearchHeuristic { .. } => "search-heuristic",
        Command::Replay { .. } => "replay",
    }
}

fn heuristic_config(cli: &Cli) -> Option<HeuristicConfig> {
    match &cli.command {
        Command::SearchHeuristic { iterations, restarts, t0, decay, .. } => {
            let d = HeuristicConfig::default();
            Some(HeuristicConfig {
                seed: cli.seed.unwrap_or(d.seed),
                iterations: iterations.unwrap_or(d.iterations),
                restarts: restarts.unwrap_or(d.restarts),
                initial_temperature: t0.unwrap_or(d.initial_temperature),
                decay: decay.unwrap_or(d.decay),
            })
        }
        _ => None,
    }
}

fn seed_used(cli: &Cli) -> Option<u64> {
    match &cli.command {
        Command::SearchHeuristic { .. } => heuristic_config(cli).map(|c| c.seed),
        Command::Verify { .. } => Some(cli.seed.unwrap_or(0)),
        _ => None,
    }
}

/// Every parameter that affects the report, defaults filled in. Workers and
/// the output path are excluded: they never change the content.
fn params(cli: &Cli) -> Value {
    match &cli.command {
        Command::Bound { kind, n, k, l, m } => json!({ "kind": kind, "n": n, "k": k, "l": l, "m": m }),
        Command::Omega { mode, files, weight, profile } => json!({
            "mode": mode,
            "files": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
            "weight": weight,
            "profile": profile,
        }),
        Command::Verify { suite, n, k, l, n_max, all_perms, families } => json!({
            "suite": suite, "n": n, "k": k, "l": l, "n_max": n_max, "all_perms": all_perms,
            "families": families.as_ref().map(|v| v.iter().map(|f| f.display().to_string()).collect::<Vec<_>>()),
        }),
        Command::SearchExact { shape, strategy } => {
            json!({ "n": shape.n, "k": shape.k, "l": shape.l, "strategy": strategy })
        }
        Command::SearchHeuristic { shape, .. } => {
            json!({ "n": shape.n, "k": shape.k, "l": shape.l, "heuristic": heuristic_config(cli) })
        }
        Command::Replay { report } => json!({ "report": report.display().to_string() }),
    }
}

fn canonical_args(cli: &Cli) -> Vec<String> {
    let mut a: Vec<String> = vec![command_name(&cli.command).to_string()];
    let push_opt = |a: &mut Vec<String>, v: Option<u32>| {
        if let Some(v) = v {
            a.push(v.to_string());
        }
    };
    match &cli.command {
        Command::Bound { kind, n, k, l, m } => {
            a.push(kind.to_possible_value().expect("named").get_name().to_string());
            a.extend([n.to_string(), k.to_string()]);
            push_opt(&mut a, *l);
            push_opt(&mut a, *m);
        }
        Command::Omega { mode, files, weight, profile } => {
            a.push(mode.to_possible_value().expect("named").get_name().to_string());
            a.extend(files.iter().map(|f| f.display().to_string()));
            a.extend(["--weight".to_string(), weight.clone()]);
            if *profile {
                a.push("--profile".into());
            }
        }
        Command::Verify { suite, n, k, l, n_max, all_perms, families } => {
            a.push(suite.clone());
            push_opt(&mut a, *n);
            push_opt(&mut a, *k);
            push_opt(&mut a, *l);
            if let Some(v) = n_max {
                a.extend(["--n-max".to_string(), v.to_string()]);
            }
            if *all_perms {
                a.push("--all-perms".into());
            }
            if let Some(fs) = families {
                a.push("--families".into());
                a.extend(fs.iter().map(|f| f.display().to_string()));
            }
        }
        Command::SearchExact { shape, strategy } => {
            a.extend([shape.n.to_string(), shape.k.to_string()]);
            push_opt(&mut a, shape.l);
            a.extend(["--strategy".to_string(), strategy.clone()]);
        }
        Command::SearchHeuristic { shape, .. } => {
            let c = heuristic_config(cli).expect("heuristic command");
            a.extend([shape.n.to_string(), shape.k.to_string()]);
            push_opt(&mut a, shape.l);
            a.extend([
                "--iterations".to_string(),
                c.iterations.to_string(),
                "--restarts".to_string(),
                c.restarts.to_string(),
                "--t0".to_string(),
                c.initial_temperature.to_string(),
                "--decay".to_string(),
                c.decay.to_string(),
            ]);
        }
        Command::Replay { report } => a.push(report.display().to_string()),
    }
    if let Some(seed) = seed_used(cli) {
        a.extend(["--seed".to_string(), seed.to_string()]);
    }
    if cli.json {
        a.push("--json".into());
    }
    a
}

fn execute(cli: &Cli) -> Run<Output> {
    match &cli.command {
        Command::Bound { kind, n, k, l, m } => cmd_bound(*kind, *n, *k, *l, *m),
        Command::Omega { mode, files, weight, profile } => cmd_omega(*mode, files, weight, *profile),
        Command::Verify { suite, n, k, l, n_max, all_perms, families } => {
            let families = match families {
                Some(fs) => Some((load_family(&fs[0])?, load_family(&fs[1])?)),
                None => None,
            };
            let p = SuiteParams {
                n: *n,
                k: *k,
                l: *l,
                n_max: *n_max,
                all_perms: *all_perms,
                seed: cli.seed.unwrap_or(0),
                workers: cli.workers,
                families,
            };
            cmd_verify(suite, &p)
        }
        Command::SearchExact { shape, strategy } => {
            let m = MaximizerRegistry::default().get(strategy, &HeuristicConfig::default())?;
            let opts = SearchOptions { workers: cli.workers, ..Default::default() };
            let r = match shape.l {
                None => m.intersecting(shape.n, shape.k, &opts)?,
                Some(l) => m.cross(shape.n, shape.k, l, &opts)?,
            };
            search_output(r, cli.workers)
        }
        Command::SearchHeuristic { shape, .. } => {
            let cfg = heuristic_config(cli).expect("heuristic command");
            let m = MaximizerRegistry::default().get("anneal", &cfg)?;
            let opts = SearchOptions { workers: cli.workers, ..Default::default() };
            let r = with_workers(cli.workers, || match shape.l {
                None => m.intersecting(shape.n, shape.k, &opts),
                Some(l) => m.cross(shape.n, shape.k, l, &opts),
            })?;
            search_output(r, cli.workers)
        }
        Command::Replay { .. } => unreachable!("replay is resolved before execution"),
    }
}

fn cmd_bound(kind: BoundArg, n: u32, k: u32, l: Option<u32>, m: Option<u32>) -> Run<Output> {
    let need = |v: Option<u32>, name: &str| {
        v.ok_or_else(|| Failure::Core(Error::Hypothesis(format!("bound {kind:?} needs {name}").to_lowercase())))
    };
    let extra = |v: Option<u32>, name: &str| match v {
        Some(_) => Err(Failure::Core(Error::Hypothesis(format!("unexpected argument {name} for this bound")))),
        None => Ok(()),
    };
    let b: BoundValue = match kind {
        BoundArg::Family | BoundArg::Strict | BoundArg::Ekr => {
            extra(l, "l")?;
            extra(m, "m")?;
            match kind {
                BoundArg::Family => omega_intersecting_bound(n, k)?,
                BoundArg::Strict => omega_strict_bound(n, k)?,
                _ => ekr_bound(n, k)?,
            }
        }
        BoundArg::Cross => {
            extra(m, "m")?;
            omega_cross_bound(n, k, need(l, "l")?)?
        }
        BoundArg::Pm => pm_star_bound(n, k, need(l, "l")?, need(m, "m")?)?,
    };
    let text = format!("{}\n", b.value);
    Ok(Output { result: serde_json::to_value(&b).expect("bound serializes"), text, passed: true })
}

fn read(path: &Path) -> Run<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn json_error(path: &Path, text: &str, e: &serde_json::Error) -> Failure {
    let (line, col) = (e.line(), e.column());
    let full = e.to_string();
    let what = full.split(" at line ").next().unwrap_or(&full);
    let mut message = format!("line {line}, column {col}: {what}");
    if let Some(src) = text.lines().nth(line.saturating_sub(1)) {
        let _ = write!(message, "\n  {line} | {src}\n  {} | {}^", " ".repeat(line.to_string().len()), " ".repeat(col.saturating_sub(1)));
    }
    Failure::Input { path: path.to_path_buf(), message }
}

fn load_family(path: &Path) -> Run<Family> {
    let text = read(path)?;
    let doc: FamilyJson = serde_json::from_str(&text).map_err(|e| json_error(path, &text, &e))?;
    Family::from_json(&doc).map_err(|e| Failure::Input { path: path.to_path_buf(), message: e.to_string() })
}

fn cmd_omega(mode: OmegaMode, files: &[PathBuf], weight: &str, profile: bool) -> Run<Output> {
    let w = WeightRegistry::default().get(weight)?;
    let (a, b) = match (mode, files) {
        (OmegaMode::Family, [f]) => {
            let a = load_family(f)?;
            (a.clone(), a)
        }
        (OmegaMode::Family, _) => return Err(Error::Hypothesis("omega family takes one file".into()).into()),
        (_, [x, y]) => (load_family(x)?, load_family(y)?),
        (_, [x]) => {
            let a = load_family(x)?;
            (a.clone(), a)
        }
        _ => unreachable!("clap bounds the file count"),
    };
    let value: i128 = match (mode, weight) {
        (OmegaMode::Family, "meet") => omega_family(&a) as i128,
        (OmegaMode::Cross, "meet") => omega_cross(&a, &b)? as i128,
        (OmegaMode::Strict, "meet") => omega_cross_strict(&a, &b)? as i128,
        // unordered distinct pairs: half the strict sum, exact since w is symmetric
        (OmegaMode::Family, _) => omega_generic(&a, &a, w.as_ref(), true)? / 2,
        (OmegaMode::Cross, _) => omega_generic(&a, &b, w.as_ref(), false)?,
        (OmegaMode::Strict, _) => omega_generic(&a, &b, w.as_ref(), true)?,
    };
    let mut result = json!({
        "mode": mode,
        "weight": weight,
        "value": value.to_string(),
        "n": a.n(),
        "sizes": if mode == OmegaMode::Family { vec![a.len()] } else { vec![a.len(), b.len()] },
    });
    let mut text = format!("{value}\n");
    if profile {
        let p = intersection_profile(&a, &b)?;
        let counts: Vec<String> = p.counts.iter().map(|c| c.to_string()).collect();
        for (m, c) in counts.iter().enumerate() {
            let _ = writeln!(text, "m={m}\t{c}");
        }
        result["profile"] = json!(counts);
    }
    Ok(Output { result, text, passed: true })
}

fn cmd_verify(suite: &str, p: &SuiteParams) -> Run<Output> {
    let registry = SuiteRegistry::default();
    let r = registry.get(suite)?.run(p)?;
    let mut text = String::new();
    for c in &r.checks {
        let _ = writeln!(text, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
        if let Some(ce) = &c.counterexample {
            let _ = writeln!(text, "  counterexample: {ce}");
        }
    }
    let sampled = if r.sampled { " (sampled orders)" } else { "" };
    let _ = writeln!(text, "verify {}: {}{sampled}", r.suite, if r.passed { "PASS" } else { "FAIL" });
    Ok(Output { result: serde_json::to_value(&r).expect("report serializes"), passed: r.passed, text })
}

fn search_output(r: SearchResult, workers: usize) -> Run<Output> {
    r.validate()?;
    let mut result = serde_json::to_value(&r).expect("result serializes");
    if r.exhaustive {
        let u = with_workers(workers, || uniqueness_report(&r))?;
        result["uniqueness"] = serde_json::to_value(&u).expect("report serializes");
    }
    let passed = r.best_value <= r.bound;
    let mut text = format!(
        "{} ({}): best {} bound {} tight {} witnesses {}\n",
        r.strategy,
        if r.exhaustive { "exhaustive" } else { "heuristic" },
        r.best_value,
        r.bound,
        r.tight,
        r.witnesses.len()
    );
    for w in &r.witnesses {
        let _ = writeln!(text, "  {}", serde_json::to_string(w).expect("witness serializes"));
    }
    Ok(Output { result, text, passed })
}
