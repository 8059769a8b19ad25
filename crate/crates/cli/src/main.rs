use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use starpir::audit::{self, AuditReport, ServerPrivacyMode, Verdict, DEFAULT_ENUM_CAP};
use starpir::capacity::{self, fraction_string};
use starpir::field::Field;
use starpir::fixtures;
use starpir::netsim::{self, ServerBehavior};
use starpir::rng;
use starpir::scheme::{check_full_support_rank, MaskingCode, SchemeParams, StarProductScheme, Variant};

#[derive(Parser)]
#[command(name = "starpir", version, about = "Star-product PIR over MDS-coded storage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one retrieval and print a summary.
    Demo(DemoArgs),
    #[command(subcommand)]
    Audit(AuditCommand),
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Evaluate a capacity formula exactly.
    Capacity(CapacityArgs),
    /// Replay the worked support-rank counterexamples.
    Fixtures(FixturesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    MultiIter,
    OneShot,
}

#[derive(Clone, Copy, ValueEnum)]
enum MaskingArg {
    StarProduct,
    Storage,
}

#[derive(Args, Clone)]
struct SchemeArgs {
    #[arg(long, value_enum, default_value = "multi-iter")]
    variant: VariantArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    t: usize,
    /// Byzantine budget.
    #[arg(long, default_value_t = 0)]
    b: usize,
    /// Nonresponsive budget.
    #[arg(long, default_value_t = 0)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Field size; defaults to the smallest prime >= n.
    #[arg(long)]
    q: Option<u64>,
    /// Multiply the minimal subpacketization (α, β) by this factor.
    #[arg(long, default_value_t = 1)]
    lift: usize,
    /// Add shared server randomness (SPIR).
    #[arg(long)]
    symmetric: bool,
    #[arg(long, value_enum, default_value = "star-product")]
    masking: MaskingArg,
}

impl SchemeArgs {
    fn params(&self) -> Result<SchemeParams> {
        let p = match self.q {
            Some(q) => q,
            None => Field::smallest_prime_at_least(self.n as u64)?.modulus(),
        };
        let variant = match self.variant {
            VariantArg::MultiIter => Variant::MultiIter,
            VariantArg::OneShot => Variant::OneShot,
        };
        let params = SchemeParams::new(variant, self.n, self.k, self.t, self.b, self.r, self.m, p)?;
        let params = if self.lift == 1 { params } else { params.lifted(self.lift)? };
        Ok(params.symmetric(self.symmetric))
    }

    fn scheme(&self) -> Result<StarProductScheme> {
        let masking = match self.masking {
            MaskingArg::StarProduct => MaskingCode::StarProduct,
            MaskingArg::Storage => MaskingCode::Storage,
        };
        Ok(StarProductScheme::new(self.params()?)?.with_masking(masking))
    }
}

#[derive(Args)]
struct DemoArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Desired file, 1-based.
    #[arg(long, default_value_t = 1)]
    file: usize,
    #[arg(long)]
    seed: u64,
    /// Byzantine servers (1-based, comma separated) sending random answers.
    #[arg(long, value_delimiter = ',')]
    byzantine: Vec<usize>,
    /// Nonresponsive servers (1-based, comma separated).
    #[arg(long, value_delimiter = ',')]
    nonresponsive: Vec<usize>,
    /// Write the full transcript JSON here.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum AuditCommand {
    /// t-privacy of the query: structural certificate plus chi-square test.
    Privacy {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Colluding servers (1-based); all t-subsets when omitted.
        #[arg(long, value_delimiter = ',')]
        servers: Vec<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Answers reveal nothing about undesired files.
    ServerPrivacy {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Random retrievals with a full adversary budget all decode exactly.
    Correctness {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 200)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampling,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// rank((G⊗1_β)⊙q) = |colsupp(q)| on rejection-sampled instances.
    Khatri {
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive uniformity of the answer sums on random instances.
    Entropy {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Expected support size of the query does not depend on the file.
    Support {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Files whose rows are restricted to (1-based).
        #[arg(long, value_delimiter = ',', default_value = "1")]
        files: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    TpirFsr,
    Asymptotic,
    Tbspir,
    Secrecy,
    TbUpper,
    Download,
    Regime,
}

#[derive(Args)]
struct CapacityArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    t: u64,
    #[arg(long, default_value_t = 0)]
    b: u64,
    #[arg(long, default_value_t = 0)]
    r: u64,
    /// Number of files; the m → ∞ limit when omitted.
    #[arg(long)]
    m: Option<u32>,
    /// File size in symbols (download model).
    #[arg(long)]
    l: Option<u64>,
    /// Stripe count β (regime model).
    #[arg(long)]
    beta: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FixturesArgs {
    #[arg(long)]
    json: bool,
}

fn enum_cap() -> Result<u128> {
    match std::env::var("PIR_ENUM_CAP") {
        Ok(v) => v.trim().parse().with_context(|| format!("PIR_ENUM_CAP={v} is not an integer")),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

fn zero_based(list: &[usize], bound: usize, what: &str) -> Result<Vec<usize>> {
    list.iter()
        .map(|&x| {
            if x == 0 || x > bound {
                bail!("{what} {x} out of range 1..={bound}");
            }
            Ok(x - 1)
        })
        .collect()
}

fn verdict_code(v: Verdict) -> ExitCode {
    match v {
        Verdict::Pass => ExitCode::SUCCESS,
        _ => ExitCode::from(1),
    }
}

fn emit(report: &AuditReport, json: bool) -> Result<ExitCode> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        let tag = match report.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        println!(
            "{tag} {} statistic={} threshold={} samples={}",
            report.check, report.statistic, report.threshold, report.samples
        );
        for n in &report.notes {
            println!("  {n}");
        }
        if let Some(w) = &report.witness {
            if report.verdict != Verdict::Pass {
                println!("  witness: {w}");
            }
        }
    }
    Ok(verdict_code(report.verdict))
}

fn demo(a: DemoArgs) -> Result<ExitCode> {
    let scheme = a.scheme.scheme()?;
    let params = scheme.params().clone();
    let file = zero_based(&[a.file], params.m, "file")?[0];
    let mut behaviors = netsim::all_honest(params.n);
    for j in zero_based(&a.byzantine, params.n, "server")? {
        behaviors[j] = ServerBehavior::byzantine_random(rng::derive_seed(a.seed, j as u64));
    }
    for j in zero_based(&a.nonresponsive, params.n, "server")? {
        behaviors[j] = ServerBehavior::Nonresponsive;
    }
    netsim::check_budget(&params, &behaviors)?;
    let files = starpir::storage::FileSet::random(a.seed, params.m, params.alpha, params.k, scheme.field());
    let t = netsim::simulate(&scheme, &files, &behaviors, file, a.seed)?;
    if let Some(path) = &a.transcript {
        std::fs::write(path, t.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    let rate = audit::measure_rate(&t).ok().map(|r| fraction_string(&r));
    if a.json {
        let summary = json!({
            "params": params,
            "file": a.file,
            "seed": a.seed,
            "correct": t.correct,
            "outcome": t.outcome,
            "download_symbols": t.download_symbols,
            "rate": rate,
        });
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!(
            "n={} k={} t={} b={} r={} m={} p={} alpha={} beta={} symmetric={}",
            params.n, params.k, params.t, params.b, params.r, params.m, params.p, params.alpha, params.beta, params.symmetric
        );
        println!("file {} seed {}", a.file, a.seed);
        println!("download {} symbols", t.download_symbols);
        match &rate {
            Some(r) => println!("decoded: correct, rate {r}"),
            None if t.decoded().is_some() => println!("decoded: WRONG FILE"),
            None => println!("decode failed"),
        }
    }
    Ok(if t.correct { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_audit(cmd: AuditCommand) -> Result<ExitCode> {
    match cmd {
        AuditCommand::Privacy { scheme, samples, seed, servers, json } => {
            let s = scheme.scheme()?;
            let report = if servers.is_empty() {
                audit::audit_user_privacy_all(&s, samples, seed)?
            } else {
                let set = zero_based(&servers, s.params().n, "server")?;
                audit::audit_user_privacy(&s, &set, samples, seed)?
            };
            emit(&report, json)
        }
        AuditCommand::ServerPrivacy { scheme, mode, samples, seed, json } => {
            let mut args = scheme;
            args.symmetric = true;
            let s = args.scheme()?;
            let mode = match mode {
                ModeArg::Exhaustive => ServerPrivacyMode::Exhaustive,
                ModeArg::Sampling => ServerPrivacyMode::Sampling,
            };
            emit(&audit::audit_server_privacy(&s, mode, samples, seed, enum_cap()?)?, json)
        }
        AuditCommand::Correctness { scheme, samples, seed, json } => {
            emit(&audit::audit_correctness(&scheme.params()?, samples, seed)?, json)
        }
    }
}

fn run_oracle(cmd: OracleCommand) -> Result<ExitCode> {
    match cmd {
        OracleCommand::Khatri { trials, seed, json } => {
            emit(&audit::oracle_khatri_rank(trials, seed, &audit::KhatriConfig::default())?, json)
        }
        OracleCommand::Entropy { trials, seed, json } => {
            emit(&audit::oracle_answer_entropy_sweep(trials, seed, enum_cap()?)?, json)
        }
        OracleCommand::Support { scheme, files, samples, seed, json } => {
            let s = scheme.scheme()?;
            let files = zero_based(&files, s.params().m, "file")?;
            emit(&audit::oracle_support_expectation_scheme(&s, &files, samples, seed)?, json)
        }
    }
}

fn run_capacity(a: CapacityArgs) -> Result<ExitCode> {
    let (n, k, t, b, r) = (a.n, a.k, a.t, a.b, a.r);
    let value = match a.model {
        Model::TpirFsr => match a.m {
            Some(m) => json!(fraction_string(&capacity::cap_tpir_fsr(n, k, t, m)?)),
            None => json!(fraction_string(&capacity::cap_tpir_fsr_limit(n, k, t)?)),
        },
        Model::Asymptotic => json!(fraction_string(&capacity::cap_asymptotic(n, k, t, b, r)?)),
        Model::Tbspir => json!(fraction_string(&capacity::cap_tbspir(n, k, t, b, r)?)),
        Model::Secrecy => json!(fraction_string(&capacity::secrecy_bound(n, k, t, b, r)?)),
        Model::TbUpper => match a.m {
            Some(m) => json!(fraction_string(&capacity::cap_tbpir_upper(n, k, t, b, r, m)?)),
            None => json!(fraction_string(&capacity::cap_tbpir_upper_limit(n, k, t, b, r)?)),
        },
        Model::Download => {
            let l = a.l.context("--l is required for the download model")?;
            let m = a.m.context("--m is required for the download model")?;
            json!(capacity::optimal_download(l, n, k, t, m)?.to_string())
        }
        Model::Regime => {
            let beta = a.beta.context("--beta is required for the regime model")?;
            serde_json::to_value(capacity::asymptotic_regime(n, k, t, beta)?)?
        }
    };
    if a.json {
        let model = a.model.to_possible_value().expect("no skipped variants");
        println!("{}", serde_json::to_string_pretty(&json!({ "model": model.get_name(), "value": value }))?);
    } else {
        match &value {
            serde_json::Value::String(s) => println!("{s}"),
            other => println!("{other}"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

const FIXTURE_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

fn run_fixtures(a: FixturesArgs) -> Result<ExitCode> {
    let mut ok = true;
    let mut entries = Vec::new();

    let b = fixtures::lifted_counterexample();
    let rep = b.check();
    let expected = rep.find(&[b.witness.0], &b.witness.1);
    let flagged = matches!(expected, Some(v) if v.rank == 1 && v.colsupp == 2);
    ok &= flagged;
    entries.push(json!({
        "fixture": b.name,
        "flagged": flagged,
        "violation": expected.map(|v| v.to_string()),
        "violations": rep.violations.len(),
    }));

    for seed in FIXTURE_SEEDS {
        let c = fixtures::rate_three_fifths_counterexample(seed);
        let rep = c.check();
        let v = rep.find(&[c.witness.0], &c.witness.1);
        let flagged = matches!(v, Some(v) if v.rank <= 5 && v.colsupp == 6);
        ok &= flagged;
        entries.push(json!({
            "fixture": c.name,
            "seed": seed,
            "flagged": flagged,
            "violation": v.map(|v| v.to_string()),
        }));
    }

    // informational: generated queries are not expected to affect the exit code
    let gen = SchemeParams::multi_iter(5, 2, 2, 2, 5)?;
    let scheme = StarProductScheme::new(gen.clone())?;
    let q = scheme.generate_query_seeded(0, 1)?;
    let rep = check_full_support_rank(&q.query, gen.alpha, gen.beta, gen.t);
    entries.push(json!({
        "fixture": "generated-5-2-2",
        "flagged": !rep.holds,
        "violation": rep.first_violation().map(|v| v.to_string()),
        "violations": rep.violations.len(),
    }));

    if a.json {
        println!("{}", serde_json::to_string_pretty(&json!({ "pass": ok, "fixtures": entries }))?);
    } else {
        for e in &entries {
            let name = e["fixture"].as_str().unwrap_or_default();
            let seed = e.get("seed").map(|s| format!(" seed {s}")).unwrap_or_default();
            let verdict = if e["flagged"].as_bool() == Some(true) { "violation" } else { "no violation" };
            let detail = e["violation"].as_str().map(|s| format!(": {s}")).unwrap_or_default();
            println!("{name}{seed}: {verdict}{detail}");
        }
        println!("{}", if ok { "PASS fixtures" } else { "FAIL fixtures" });
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Demo(a) => demo(a),
        Command::Audit(c) => run_audit(c),
        Command::Oracle(c) => run_oracle(c),
        Command::Capacity(a) => run_capacity(a),
        Command::Fixtures(a) => run_fixtures(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
