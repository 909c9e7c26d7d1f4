use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use etaquot::etaq::{
    cusp_context, expansion_at_cusp, expansion_step, f_level, f_s_expansion, ord_t_at_cusp,
    parse_list, sieved_level, PartitionSpec,
};
use etaquot::exact::Rational;
use etaquot::identities::{
    alt_identity_check, check_suited_with, cusp_count_formula, cusp_representatives,
    find_counterexample, gamma_level, persist_certificate, results_dir, shift,
    verify_identity_sturm_with, Certificate, CheckpointSpec, ProblemConfig, Progression,
    SturmConfig, DEFAULT_SEARCH_BOUND,
};
use etaquot::partitions::{count_ps, w_series};
use serde_json::{json, Value};

/// Exact q-expansions of eta-quotients at cusps and shifted partition
/// identities. Records are printed as one JSON object per invocation.
#[derive(Parser)]
#[command(name = "etaquot", version)]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the record to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    delta: u64,
    /// Comma-separated residues `g` with `0 < g < δ/2`.
    #[arg(long)]
    parts: String,
}

impl SpecArgs {
    fn spec(&self) -> Result<PartitionSpec> {
        Ok(PartitionSpec::new(self.delta, parse_list(&self.parts)?)?)
    }
}

#[derive(Args)]
struct CuspArgs {
    /// Cusp numerator; with `--c` selects the cusp `a/c`.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<i64>,
    /// Cusp denominator; omitted means infinity.
    #[arg(long)]
    c: Option<i64>,
    /// Translate `t` in `F_S(τ + t/δ)`.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    t: i64,
}

impl CuspArgs {
    fn cusp(&self) -> Result<(i64, i64)> {
        match (self.a, self.c) {
            (None, None) => Ok((1, 0)),
            (Some(a), Some(c)) => Ok((a, c)),
            _ => bail!("--a and --c must be given together"),
        }
    }
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem config file `delta=.. s1=.. s2=.. r=.. mod=..`.
    #[arg(long, conflicts_with_all = ["delta", "s1", "s2", "r", "modulus"])]
    config: Option<PathBuf>,
    #[arg(long)]
    delta: Option<u64>,
    #[arg(long)]
    s1: Option<String>,
    #[arg(long)]
    s2: Option<String>,
    /// Residues modulo `--mod`.
    #[arg(long)]
    r: Option<String>,
    #[arg(long = "mod")]
    modulus: Option<u64>,
}

impl ProblemArgs {
    fn config(&self) -> Result<ProblemConfig> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(text.parse()?);
        }
        let (Some(delta), Some(s1), Some(s2), Some(r)) = (self.delta, &self.s1, &self.s2, &self.r) else {
            bail!("either --config or all of --delta, --s1, --s2, --r are required");
        };
        let modulus = self.modulus.unwrap_or(delta);
        Ok(format!("delta={delta} s1={s1} s2={s2} r={r} mod={modulus}").parse()?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// q-expansion of `F_S^{(t)}` at infinity or at a finite cusp.
    Expand {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        cusp: CuspArgs,
        /// Number of terms `W(0), …, W(terms−1)` at a finite cusp, or the
        /// exponent bound at infinity.
        #[arg(long, default_value_t = 20)]
        terms: usize,
    },
    /// `p_S(n)`.
    Count {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        n: u64,
    },
    /// `ord_S`, or the order of `F_S^{(t)}` at a cusp.
    Order {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        cusp: CuspArgs,
    },
    /// Levels of `F_S` and of its sieved form.
    Level {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Cusp representatives of `Γ₁(N)`.
    Cusps {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        count_only: bool,
    },
    /// Cusp context `A`, `D`, `b0`, `d0`, `ε` of `a/c` for modulus `δ`.
    Context {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long)]
        c: i64,
        #[arg(long)]
        delta: u64,
    },
    /// Twisted special partition numbers `W(0..=n)`.
    Twisted {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        cusp: CuspArgs,
        #[arg(long)]
        n: usize,
    },
    /// Suitedness of a shifted identity at all cusps.
    Suited {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Sturm-bound verification of two sieved eta-quotients.
    Sturm {
        #[arg(long)]
        config: PathBuf,
    },
    /// Least `n` on a progression where a shifted identity fails.
    Counterexample {
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        s1: String,
        #[arg(long)]
        s2: String,
        #[arg(long = "mod", default_value_t = 6)]
        modulus: u64,
        #[arg(long)]
        r: String,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
        bound: u64,
    },
    /// Product-side check of the alternate identity.
    Altcheck {
        #[arg(long, default_value_t = 10_000)]
        precision: u64,
    },
}

/// A record and the exit status it implies.
struct Outcome {
    record: Value,
    status: u8,
}

impl Outcome {
    fn ok(record: Value) -> Self {
        Outcome { record, status: 0 }
    }

    fn verdict(cert: &Certificate) -> Self {
        Outcome {
            record: serde_json::to_value(cert.without_runtime()).expect("certificate serializes"),
            status: if cert.verdict.is_positive() { 0 } else { 1 },
        }
    }
}

fn persist(config_text: &str, mut cert: Certificate, started: Instant) -> Result<Outcome> {
    let out = Outcome::verdict(&cert);
    cert.runtime_ms = Some(started.elapsed().as_millis() as u64);
    let path = persist_certificate(&results_dir(), config_text, &cert)?;
    eprintln!("certificate: {}", path.display());
    Ok(out)
}

fn checkpoint(config_text: &str) -> CheckpointSpec {
    CheckpointSpec {
        dir: results_dir(),
        config_text: config_text.to_string(),
    }
}

fn run(command: Command) -> Result<Outcome> {
    let started = Instant::now();
    Ok(match command {
        Command::Expand { spec, cusp, terms } => {
            let s = spec.spec()?;
            let (a, c) = cusp.cusp()?;
            if c == 0 {
                if cusp.t != 0 {
                    bail!("--t is only supported at finite cusps");
                }
                let f = f_s_expansion(&s, 1, &Rational::from(terms as u64));
                Outcome::ok(json!({ "spec": s, "cusp": [a, c], "series": f.to_text() }))
            } else {
                let ctx = cusp_context(a, c, s.delta())?;
                let e = expansion_at_cusp(&s, &ctx, cusp.t, terms)?;
                Outcome::ok(json!({
                    "spec": s,
                    "context": e.context,
                    "t": e.t,
                    "order": e.order,
                    "step": e.step,
                    "leading": e.leading,
                    "w": e.w,
                    "series": e.series().to_text(),
                }))
            }
        }
        Command::Count { spec, n } => {
            let s = spec.spec()?;
            Outcome::ok(json!({ "n": n, "count": count_ps(&s, n).to_string() }))
        }
        Command::Order { spec, cusp } => {
            let s = spec.spec()?;
            let (a, c) = cusp.cusp()?;
            let ctx = cusp_context(a, c, s.delta())?;
            Outcome::ok(json!({
                "spec": s,
                "cusp": [a, c],
                "t": cusp.t,
                "order": ord_t_at_cusp(&s, &ctx, cusp.t),
                "step": expansion_step(&ctx),
            }))
        }
        Command::Level { spec } => {
            let s = spec.spec()?;
            let sieved = sieved_level(&s).ok();
            Outcome::ok(json!({
                "spec": s,
                "ord": s.ord(),
                "level": f_level(&s),
                "sieved_level": sieved,
            }))
        }
        Command::Cusps { level, count_only } => {
            if level == 0 {
                bail!("--level must be positive");
            }
            if count_only {
                Outcome::ok(json!({ "level": level, "cusps": cusp_count_formula(level) }))
            } else {
                let reps = cusp_representatives(level);
                Outcome::ok(json!({ "level": level, "cusps": reps.len(), "representatives": reps }))
            }
        }
        Command::Context { a, c, delta } => {
            let ctx = cusp_context(a, c, delta)?;
            Outcome::ok(json!({ "context": ctx, "step": expansion_step(&ctx) }))
        }
        Command::Twisted { spec, cusp, n } => {
            let s = spec.spec()?;
            let (a, c) = cusp.cusp()?;
            let ctx = cusp_context(a, c, s.delta())?;
            let w = w_series(&s, &ctx, cusp.t, n)?;
            Outcome::ok(json!({ "spec": s, "cusp": [a, c], "t": cusp.t, "w": w }))
        }
        Command::Suited { problem } => {
            let cfg = problem.config()?;
            let p = cfg.problem()?;
            let text = cfg.to_string();
            eprintln!("level {} with {} cusps", gamma_level(&p), cusp_count_formula(gamma_level(&p)));
            let cert = check_suited_with(&p, None, Some(&checkpoint(&text)))?;
            persist(&text, cert, started)?
        }
        Command::Sturm { config } => {
            let raw = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg: SturmConfig = raw.parse()?;
            let text = cfg.to_string();
            let cert = verify_identity_sturm_with(&cfg, Some(&checkpoint(&text)))?;
            persist(&text, cert, started)?
        }
        Command::Counterexample {
            delta,
            s1,
            s2,
            modulus,
            r,
            bound,
        } => {
            let a = PartitionSpec::new(delta, parse_list(&s1)?)?;
            let b = PartitionSpec::new(delta, parse_list(&s2)?)?;
            let prog = Progression::new(modulus, parse_list(&r)?)?;
            let h = shift(&a, &b)?;
            match find_counterexample(&a, &b, &prog, bound)? {
                Some(ce) => Outcome {
                    record: json!({
                        "found": true, "H": h, "bound": bound,
                        "n": ce.n, "left": ce.left.to_string(), "right": ce.right.to_string(),
                    }),
                    status: 1,
                },
                None => Outcome::ok(json!({ "found": false, "H": h, "bound": bound })),
            }
        }
        Command::Altcheck { precision } => Outcome::verdict(&alt_identity_check(precision)?),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    let started = Instant::now();
    let outcome = match run(cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let line = serde_json::to_string(&outcome.record).expect("record serializes");
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, format!("{line}\n")) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{line}"),
    }
    eprintln!("runtime_ms={}", started.elapsed().as_millis());
    ExitCode::from(outcome.status)
}

