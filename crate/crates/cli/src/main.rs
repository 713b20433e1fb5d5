use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kfib_balance::expr;
use kfib_balance::linforms::derive_n_bound;
use kfib_balance::numerics::cache::PhiCache;
use kfib_balance::numerics::f_k_at_root;
use kfib_balance::reduction::campaign::{campaign_large_k, campaign_small_k, small_k_params};
use kfib_balance::reduction::{
    cf_expand, dujella_petho_reduce, reduce_with_fallback, CfStop, ReductionInstance,
};
use kfib_balance::search::{brute_force_box, expected_solutions, SolutionRecord};
use kfib_balance::sequences::{kfib, six_table, SequenceKind};
use kfib_balance::Equation;
use kfib_balance_cli::config::{parse_equation, resolve_cache_dir};
use kfib_balance_cli::error::{EXIT_IO, EXIT_MISMATCH};
use kfib_balance_cli::verify::search_box;
use kfib_balance_cli::{
    report, verify_all, CliError, CliResult, KRange, Manifest, OutputFormat, RunConfig,
};
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "kfib-balance",
    version,
    about = "Balancing numbers as products of two k-Fibonacci numbers"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Cache directory (overrides $KFIB_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Initial working precision in bits.
    #[arg(long, global = true)]
    bits: Option<u32>,
    /// Precision ceiling in bits.
    #[arg(long, global = true)]
    max_bits: Option<u32>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Small,
    Large,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeqKind {
    Balancing,
    Lucas,
    Kfib,
}

#[derive(Subcommand)]
enum Command {
    /// Dominant roots φ(k) and f_k(φ).
    Phi {
        #[arg(long, default_value = "2..10")]
        k: KRange,
        #[arg(long, default_value_t = 30)]
        digits: usize,
    },
    /// Sequence terms.
    Seq {
        #[arg(long, value_enum)]
        kind: SeqKind,
        /// Order of the k-Fibonacci sequence.
        #[arg(long)]
        k: Option<u32>,
        /// Indices, e.g. `0..20`.
        #[arg(long, default_value = "0..10")]
        range: String,
    },
    /// Continued fraction of an expression such as `log(2)/log(gamma)`.
    Cf {
        expr: String,
        #[arg(long, conflicts_with = "min_denominator")]
        count: Option<usize>,
        #[arg(long)]
        min_denominator: Option<String>,
    },
    /// Reduce instances `{tau_spec, mu_spec, A, B, M}` read as JSON.
    Reduce {
        /// File with one instance per line; stdin when absent or `-`.
        input: Option<PathBuf>,
        /// Report ε ≤ 0 instead of falling back to the Legendre bound.
        #[arg(long)]
        no_fallback: bool,
    },
    /// n-bound M_k and the implied l bound.
    Bounds {
        #[arg(long)]
        theorem: String,
        #[arg(long = "k-range", alias = "k")]
        k_range: KRange,
    },
    /// Small- or large-k reduction campaign.
    Campaign {
        #[arg(long)]
        theorem: String,
        #[arg(long, value_enum)]
        stage: StageArg,
        #[arg(long = "k-range")]
        k_range: Option<KRange>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search of a box.
    Search {
        #[arg(long)]
        equation: String,
        #[arg(long)]
        k: KRange,
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        l_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Allow k = 2 for the balancing equation; such hits are labelled.
        #[arg(long)]
        out_of_range: bool,
        /// Exit 1 unless the hits are exactly the expected list.
        #[arg(long)]
        check: bool,
    },
    /// Run every stage and write a manifest.
    VerifyAll {
        #[arg(long)]
        smoke: bool,
        #[arg(long = "k-range")]
        k_range: Option<KRange>,
        /// Restrict to one equation (B or C); repeatable.
        #[arg(long)]
        theorem: Vec<String>,
        #[arg(long, default_value = "manifest.json")]
        manifest: PathBuf,
        /// Directory for per-instance campaign files (default: next to the manifest).
        #[arg(long)]
        audit_dir: Option<PathBuf>,
    },
    /// Published-vs-computed table of a manifest.
    Report { manifest: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        // downstream closed early (`| head`)
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn config(g: &GlobalOpts) -> CliResult<RunConfig> {
    let mut cfg = RunConfig {
        jobs: g.jobs,
        cache_dir: resolve_cache_dir(g.cache_dir.as_deref()),
        format: g.format.unwrap_or_default(),
        ..RunConfig::default()
    };
    if let Some(b) = g.bits {
        cfg.working_bits = b;
    }
    if let Some(b) = g.max_bits {
        cfg.max_bits = b;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            if let Some(d) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(d).map_err(|e| CliError::file(d, e))?;
            }
            Box::new(io::BufWriter::new(
                fs::File::create(p).map_err(|e| CliError::file(p, e))?,
            ))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> CliResult<i32> {
    let cfg = config(&cli.global)?;
    let fmt = cli.global.format;
    match cli.command {
        Command::Phi { k, digits } => cmd_phi(&cfg, &k, digits, fmt),
        Command::Seq { kind, k, range } => cmd_seq(kind, k, &range, fmt),
        Command::Cf {
            expr,
            count,
            min_denominator,
        } => cmd_cf(&cfg, &expr, count, min_denominator.as_deref(), fmt),
        Command::Reduce { input, no_fallback } => cmd_reduce(&cfg, input.as_deref(), no_fallback),
        Command::Bounds { theorem, k_range } => cmd_bounds(&cfg, &theorem, &k_range, fmt),
        Command::Campaign {
            theorem,
            stage,
            k_range,
            out,
        } => cmd_campaign(&cfg, &theorem, stage, k_range.as_ref(), out.as_deref()),
        Command::Search {
            equation,
            k,
            n_max,
            l_max,
            out,
            out_of_range,
            check,
        } => {
            let eq = parse_equation(&equation)?;
            cmd_search(
                &cfg,
                eq,
                &k,
                n_max,
                l_max,
                out.as_deref(),
                out_of_range,
                check,
                fmt,
            )
        }
        Command::VerifyAll {
            smoke,
            k_range,
            theorem,
            manifest,
            audit_dir,
        } => {
            let mut cfg = cfg;
            cfg.smoke = smoke;
            cfg.k_range = k_range;
            if !theorem.is_empty() {
                cfg.equations = theorem
                    .iter()
                    .map(|t| parse_equation(t))
                    .collect::<CliResult<_>>()?;
                cfg.equations.sort();
                cfg.equations.dedup();
            }
            cmd_verify_all(&cfg, &manifest, audit_dir.as_deref())
        }
        Command::Report { manifest } => {
            let m = Manifest::load(&manifest)?;
            print!(
                "{}",
                report::render(&m, fmt.unwrap_or(OutputFormat::Table))?
            );
            Ok(0)
        }
    }
}

fn cmd_phi(
    cfg: &RunConfig,
    ks: &KRange,
    digits: usize,
    fmt: Option<OutputFormat>,
) -> CliResult<i32> {
    let ctx = cfg.precision()?;
    let mut cache = PhiCache::open(&cfg.cache_dir)?;
    let mut rows = Vec::new();
    for &k in ks.values() {
        if k < 2 {
            return Err(CliError::Config(format!("φ(k) needs k >= 2, got {k}")));
        }
        let phi = cache.get_or_compute(k, &ctx)?;
        let f = f_k_at_root(k, &phi)?;
        rows.push((
            k,
            phi.to_decimal(digits),
            phi.radius_sci(3),
            f.to_decimal(digits),
        ));
    }
    cache.save()?;
    let mut out = io::stdout().lock();
    for (k, phi, err, f) in rows {
        match fmt.unwrap_or(OutputFormat::Table) {
            OutputFormat::Jsonl => {
                writeln!(out, "{}", json!({"k": k, "phi": phi, "err": err, "f_k": f}))?
            }
            OutputFormat::Csv => writeln!(out, "{k},{phi},{err},{f}")?,
            OutputFormat::Table => writeln!(out, "{k:>4}  {phi}  ±{err}  f_k = {f}")?,
        }
    }
    Ok(0)
}

fn parse_index_range(s: &str) -> CliResult<(i64, i64)> {
    let bad = || CliError::Config(format!("bad index range {s:?} (use a..b)"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok((
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ))
        }
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            Ok((v, v))
        }
    }
}

fn cmd_seq(
    kind: SeqKind,
    k: Option<u32>,
    range: &str,
    fmt: Option<OutputFormat>,
) -> CliResult<i32> {
    let (lo, hi) = parse_index_range(range)?;
    let (name, values): (&str, Vec<(i64, BigInt)>) = match kind {
        SeqKind::Balancing | SeqKind::Lucas => {
            if lo < 0 {
                return Err(CliError::Config("balancing indices start at 0".into()));
            }
            let (name, sk) = match kind {
                SeqKind::Balancing => ("balancing", SequenceKind::Balancing),
                _ => ("lucas_balancing", SequenceKind::LucasBalancing),
            };
            let t = if hi >= 0 {
                six_table(sk, hi as u64)
            } else {
                Vec::new()
            };
            (
                name,
                (lo..=hi).map(|i| (i, t[i as usize].clone())).collect(),
            )
        }
        SeqKind::Kfib => {
            let k = k.ok_or_else(|| CliError::Config("--k is required for kfib".into()))?;
            let v = (lo..=hi)
                .map(|i| kfib(k, i).map(|x| (i, x)))
                .collect::<Result<_, _>>()?;
            ("kfib", v)
        }
    };
    let mut out = io::stdout().lock();
    for (i, v) in values {
        match fmt {
            Some(OutputFormat::Jsonl) => writeln!(
                out,
                "{}",
                json!({"kind": name, "k": k, "index": i, "value": v.to_string()})
            )?,
            Some(OutputFormat::Csv) => writeln!(out, "{i},{v}")?,
            _ => writeln!(out, "{v}")?,
        }
    }
    Ok(0)
}

fn cmd_cf(
    cfg: &RunConfig,
    text: &str,
    count: Option<usize>,
    min_den: Option<&str>,
    fmt: Option<OutputFormat>,
) -> CliResult<i32> {
    let x = expr::parse(text)?;
    let stop = match (count, min_den) {
        (_, Some(d)) => CfStop::min_denominator(expr::parse_integer(d)?),
        (Some(n), None) => CfStop::Count(n),
        (None, None) => CfStop::Count(20),
    };
    let cf = cf_expand(&x, &stop, &cfg.precision()?)?;
    let mut out = io::stdout().lock();
    for (i, (a, (p, q))) in cf.partial_quotients.iter().zip(&cf.convergents).enumerate() {
        match fmt {
            Some(OutputFormat::Jsonl) => writeln!(
                out,
                "{}",
                json!({"i": i, "a": a.to_string(), "p": p.to_string(), "q": q.to_string()})
            )?,
            Some(OutputFormat::Csv) => writeln!(out, "{i},{a},{p},{q}")?,
            _ => writeln!(out, "{i} {a} {p} {q}")?,
        }
    }
    Ok(0)
}

#[derive(Deserialize)]
struct InstanceSpec {
    tau_spec: String,
    mu_spec: String,
    #[serde(rename = "A")]
    a: serde_json::Value,
    #[serde(rename = "B")]
    b: serde_json::Value,
    #[serde(rename = "M")]
    m: serde_json::Value,
}

fn spec_text(v: &serde_json::Value, name: &str) -> CliResult<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        _ => Err(CliError::Config(format!(
            "{name} must be a string or number"
        ))),
    }
}

fn cmd_reduce(cfg: &RunConfig, input: Option<&Path>, no_fallback: bool) -> CliResult<i32> {
    let text = match input {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|e| CliError::file(p, e))?
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let ctx = cfg.precision()?;
    let specs: Vec<InstanceSpec> = match serde_json::from_str::<serde_json::Value>(&text) {
        Ok(serde_json::Value::Array(items)) => items
            .into_iter()
            .map(serde_json::from_value)
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("bad instance: {e}")))?,
        _ => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("bad instance: {e}")))?,
    };
    let mut code = 0;
    let mut out = io::stdout().lock();
    for spec in specs {
        let inst = ReductionInstance {
            tau: expr::parse(&spec.tau_spec)?,
            mu: expr::parse(&spec.mu_spec)?,
            a: expr::parse(&spec_text(&spec.a, "A")?)?,
            b: expr::parse(&spec_text(&spec.b, "B")?)?,
            m: expr::parse_integer(&spec_text(&spec.m, "M")?)?,
        };
        let outcome = if no_fallback {
            dujella_petho_reduce(&inst, &ctx)?
        } else {
            reduce_with_fallback(&inst, &ctx)?
        };
        if !outcome.is_reduced() {
            code = EXIT_MISMATCH;
        }
        writeln!(out, "{}", serde_json::to_string(&outcome.record())?)?;
    }
    Ok(code)
}

/// `⌊0.8 n + 0.2⌋` or `⌊0.8 n − 0.4⌋` for a big `n`.
fn l_bound_big(eq: Equation, n: &BigInt) -> BigInt {
    match eq {
        Equation::Balancing => (n * 4u32 + 1u32) / 5u32,
        Equation::Lucas => (n * 4u32 - 2u32) / 5u32,
    }
}

fn theorem_number(eq: Equation) -> u32 {
    match eq {
        Equation::Balancing => 1,
        Equation::Lucas => 2,
    }
}

fn cmd_bounds(
    cfg: &RunConfig,
    theorem: &str,
    ks: &KRange,
    fmt: Option<OutputFormat>,
) -> CliResult<i32> {
    let eq = parse_equation(theorem)?;
    let ctx = cfg.precision()?;
    let mut out = io::stdout().lock();
    for &k in ks.values() {
        let m = derive_n_bound(eq, k, &ctx)?;
        let l = l_bound_big(eq, &m);
        match fmt {
            Some(OutputFormat::Csv) => writeln!(out, "{},{k},{m},{l}", theorem_number(eq))?,
            Some(OutputFormat::Table) => writeln!(out, "k = {k:>4}  M_k = {m}  l ≤ {l}")?,
            _ => writeln!(
                out,
                "{}",
                json!({"theorem": theorem_number(eq), "k": k, "M_k": m.to_string(), "l_max": l.to_string()})
            )?,
        }
    }
    Ok(0)
}

fn cmd_campaign(
    cfg: &RunConfig,
    theorem: &str,
    stage: StageArg,
    ks: Option<&KRange>,
    out: Option<&Path>,
) -> CliResult<i32> {
    let eq = parse_equation(theorem)?;
    let ctx = cfg.precision()?;
    let report = match stage {
        StageArg::Small => {
            let ks: Vec<u32> = match ks {
                Some(r) => r.values().to_vec(),
                None => (eq.min_k()..=small_k_params(eq).k_hi).collect(),
            };
            cfg.install(|| campaign_small_k(eq, &ks, &ctx))??
        }
        StageArg::Large => {
            if ks.is_some() {
                return Err(CliError::Config(
                    "--k-range applies to the small stage only".into(),
                ));
            }
            campaign_large_k(eq, &ctx)?
        }
    };
    let mut w = sink(out)?;
    w.write_all(report.to_jsonl().as_bytes())?;
    w.flush()?;
    drop(w);
    let mut summary: Box<dyn Write> = if out.is_some() {
        Box::new(io::stdout().lock())
    } else {
        Box::new(io::stderr().lock())
    };
    for s in &report.summaries {
        writeln!(summary, "{}", serde_json::to_string(s)?)?;
    }
    Ok(if report.passed { 0 } else { EXIT_MISMATCH })
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    cfg: &RunConfig,
    eq: Equation,
    ks: &KRange,
    n_max: u32,
    l_max: u64,
    out: Option<&Path>,
    out_of_range: bool,
    check: bool,
    fmt: Option<OutputFormat>,
) -> CliResult<i32> {
    if ks.lo().is_some_and(|k| k < 2) {
        return Err(CliError::Config("k must be at least 2".into()));
    }
    let outside = |k: u32| k < eq.min_k();
    if !out_of_range && ks.values().iter().any(|&k| outside(k)) {
        return Err(CliError::Config(format!(
            "k = 2 is outside the classified range for {eq}; pass --out-of-range to search it anyway"
        )));
    }
    let ks_vec = ks.values().to_vec();
    let found: Vec<SolutionRecord> = cfg.install(|| {
        let mut v = Vec::new();
        for k in ks_vec {
            v.extend(brute_force_box(eq, k, k, n_max, l_max));
        }
        v
    })?;
    let mut w = sink(out)?;
    match fmt {
        Some(OutputFormat::Table) => {
            for r in &found {
                let tag = if outside(r.k) {
                    "  (out of theorem)"
                } else {
                    ""
                };
                writeln!(w, "{} = {}{tag}", r.display(), r.value)?;
            }
        }
        Some(OutputFormat::Csv) => {
            writeln!(w, "equation,l,k,n,m,value,scope")?;
            for r in &found {
                let scope = if outside(r.k) {
                    "out_of_range"
                } else {
                    "classified"
                };
                writeln!(
                    w,
                    "{},{},{},{},{},{},{scope}",
                    r.equation, r.l, r.k, r.n, r.m, r.value
                )?;
            }
        }
        _ => {
            for r in &found {
                let mut v = serde_json::to_value(r)?;
                if outside(r.k) {
                    v["scope"] = json!("out_of_range");
                }
                writeln!(w, "{}", serde_json::to_string(&v)?)?;
            }
        }
    }
    w.flush()?;
    if check {
        let (box_k, box_n, box_l) = search_box(eq);
        let expected: Vec<SolutionRecord> = ks
            .values()
            .iter()
            .filter(|&&k| k <= box_k)
            .flat_map(|&k| expected_solutions(eq, k, k))
            .collect();
        if n_max < box_n || l_max < box_l || ks.hi().is_some_and(|k| k > box_k) {
            eprintln!("note: --check compares against the theorem list on a non-standard box");
        }
        if found != expected {
            eprintln!(
                "{}",
                json!({"stage": "search", "instance": eq.to_string(), "kind": "Mismatch",
                       "found": found.len(), "expected": expected.len()})
            );
            return Ok(EXIT_MISMATCH);
        }
    }
    Ok(0)
}

fn cmd_verify_all(cfg: &RunConfig, manifest: &Path, audit_dir: Option<&Path>) -> CliResult<i32> {
    let audit = audit_dir.map(Path::to_path_buf).unwrap_or_else(|| {
        manifest
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    });
    let outcome = verify_all(cfg, Some(&audit));
    if let Err(e) = outcome.manifest.write(manifest) {
        eprintln!("error: {e}");
        return Ok(EXIT_IO);
    }
    print!("{}", report::render_table(&outcome.manifest));
    for f in outcome.manifest.failures() {
        eprintln!("{}", serde_json::to_string(f)?);
    }
    Ok(outcome.exit_code)
}
