use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use tracenorm::counting::{count_toric, count_toric_ext, count_trace_norm, CountError, CountOptions, CountRecord};
use tracenorm::field::{build_extension, build_field, embed, Elem, Field, FieldSpec};
use tracenorm::harness::{
    parse_checks, resolve_workers, run_sweep_timed, FieldSelection, HarnessError, ReportFormat, SweepConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "tracenorm",
    version,
    about = "Point counts and character-sum bound checks over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Field construction details.
    #[command(subcommand)]
    Field(FieldCommand),
    /// Single point counts.
    #[command(subcommand)]
    Count(CountCommand),
    /// Run one family of checks over a single (field, n).
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Run a full verification sweep.
    Sweep(SweepArgs),
}

#[derive(Debug, Subcommand)]
enum FieldCommand {
    Info {
        #[command(flatten)]
        field: FieldArgs,
        /// Print every element with its coefficients and discrete log.
        #[arg(long)]
        list_elements: bool,
    },
}

#[derive(Debug, Args)]
struct FieldArgs {
    /// Field as `p^k` (or any prime power, e.g. `4^1`, `9`).
    #[arg(long)]
    field: FieldSpec,
    /// Seed for the modulus and generator search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = tracenorm::counting::DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads; falls back to TRACENORM_WORKERS, then machine parallelism.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum CountCommand {
    /// N_m(a, b): elements of GF(q^m) with relative trace a and norm b.
    TraceNorm {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[command(flatten)]
        run: RunArgs,
        /// Also print the count record as JSON.
        #[arg(long)]
        record: bool,
    },
    /// N(u): points of x_1 + ... + x_n + u/(x_1...x_n) = 1 in (GF(q)*)^n.
    Toric {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        u: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// The same count over GF(q^r), with u embedded.
    ToricExt {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        u: u64,
        #[arg(long)]
        r: u32,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Toric dimension; the extension degree is n + 1.
    #[arg(long, conflicts_with = "m")]
    n: Option<u32>,
    /// Extension degree, as an alternative to --n.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, requires = "b", conflicts_with = "all")]
    a: Option<u32>,
    #[arg(long, requires = "a", conflicts_with = "all")]
    b: Option<u32>,
    /// Every (a, b); the default when no pair is given.
    #[arg(long)]
    all: bool,
    /// Comma-separated checks, overriding the subcommand's default set.
    #[arg(long)]
    check: Option<String>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// N_{n+1}(a, b) against N(u) by separate enumerations
    Lemma21(VerifyArgs),
    /// Deviation bounds on the fiber and toric counts
    Bounds(VerifyArgs),
    /// Gauss-sum closed forms against the enumerated counts
    Gauss(VerifyArgs),
    /// Lifting of Gauss sums from GF(q) to GF(q^m), every character
    DavenportHasse(VerifyArgs),
    /// N_l(a, b) mod l and the prime-degree interval
    Divisibility(VerifyArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated fields; defaults to the desk set.
    #[arg(long, value_delimiter = ',', conflicts_with = "max_q")]
    field: Vec<FieldSpec>,
    /// Every prime power up to this order.
    #[arg(long)]
    max_q: Option<u64>,
    /// A single n, overriding --n-min/--n-max.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 1)]
    n_min: u32,
    #[arg(long, default_value_t = 4)]
    n_max: u32,
    /// Comma-separated checks (`all` for every check).
    #[arg(long, default_value = "all")]
    check: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Budget(m) => f.write_str(m),
        }
    }
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Self {
        match e {
            CountError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Count(c) => c.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<tracenorm::field::FieldError> for Failure {
    fn from(e: tracenorm::field::FieldError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn init_pool(workers: Option<usize>) {
    // a second initialization only happens in-process, never from main
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_workers(workers))
        .build_global();
}

fn element(field: &Field, v: u64, name: &str) -> Result<Elem, Failure> {
    field
        .element(v)
        .map_err(|_| Failure::Usage(format!("--{name} {v} is not an element of GF({})", field.order())))
}

fn opts(run: &RunArgs) -> Result<CountOptions, Failure> {
    if run.budget == 0 {
        return Err(Failure::Usage("budget must be positive".into()));
    }
    Ok(CountOptions {
        budget: run.budget,
        parallel: true,
    })
}

fn field_info(args: &FieldArgs, list: bool) -> Result<i32, Failure> {
    let field = build_field(args.field, args.seed)?;
    println!("field      GF({}) = {}", field.order(), field.spec());
    println!("modulus    {:?}", field.modulus());
    println!("generator  {}", field.generator().value());
    println!("seed       {}", field.seed());
    if list {
        println!("value\tcoefficients\tlog");
        for x in field.elements() {
            let log = field.log(x).map_or_else(|| "-".to_string(), |l| l.to_string());
            println!("{}\t{:?}\t{}", x.value(), field.coefficients(x), log);
        }
    }
    Ok(0)
}

fn count(cmd: &CountCommand) -> Result<i32, Failure> {
    match cmd {
        CountCommand::TraceNorm {
            field,
            m,
            a,
            b,
            run,
            record,
        } => {
            init_pool(run.workers);
            if *m == 0 {
                return Err(Failure::Usage("--m must be at least 1".into()));
            }
            let opts = opts(run)?;
            let sub = Arc::new(build_field(field.field, field.seed)?);
            let (a, b) = (element(&sub, *a, "a")?, element(&sub, *b, "b")?);
            let needed = (sub.order() as u64).saturating_pow(*m);
            if needed > opts.budget {
                return Err(CountError::BudgetExceeded {
                    needed,
                    budget: opts.budget,
                }
                .into());
            }
            let big = Arc::new(build_extension(&sub, *m, field.seed)?);
            let tower = embed(sub.clone(), big)?;
            let n_tn = count_trace_norm(&tower, a, b, opts)?;
            println!("{n_tn}");
            if *record {
                let mut rec = CountRecord::new(&sub, m.saturating_sub(1), a, b);
                rec.trace_norm = Some(n_tn);
                println!("{}", serde_json::to_string(&rec).expect("serializable"));
            }
        }
        CountCommand::Toric { field, n, u, run } => {
            init_pool(run.workers);
            let f = Arc::new(build_field(field.field, field.seed)?);
            let u = element(&f, *u, "u")?;
            println!("{}", count_toric(&f, u, *n, opts(run)?)?);
        }
        CountCommand::ToricExt { field, n, u, r, run } => {
            init_pool(run.workers);
            if *r == 0 {
                return Err(Failure::Usage("--r must be at least 1".into()));
            }
            let f = Arc::new(build_field(field.field, field.seed)?);
            let u = element(&f, *u, "u")?;
            println!("{}", count_toric_ext(&f, u, *n, *r, field.seed, opts(run)?)?);
        }
    }
    Ok(0)
}

fn write_report(config: &SweepConfig) -> Result<i32, Failure> {
    let (report, run) = run_sweep_timed(config)?;
    let text = match config.format {
        ReportFormat::Csv => report.to_csv(&run)?,
        ReportFormat::Structured => report.to_structured(&run)?,
    };
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    eprint!("{}", report.summary());
    eprintln!("wall_ms={}", run.wall_ms);
    Ok(report.exit_code())
}

fn verify(cmd: &VerifyCommand) -> Result<i32, Failure> {
    let (args, default_checks) = match cmd {
        VerifyCommand::Lemma21(a) => (a, "lemma21"),
        VerifyCommand::Bounds(a) => (a, "katz,improved,zero-trace,toric,frobenius,special-u"),
        VerifyCommand::Gauss(a) => (a, "gauss"),
        VerifyCommand::DavenportHasse(a) => (a, "davenport-hasse"),
        VerifyCommand::Divisibility(a) => (a, "divisibility,prime-degree"),
    };
    let n = match (args.n, args.m) {
        (Some(n), _) => n,
        (None, Some(m)) if m >= 2 => m - 1,
        (None, Some(m)) => return Err(Failure::Usage(format!("--m {m} must be at least 2"))),
        (None, None) => return Err(Failure::Usage("one of --n or --m is required".into())),
    };
    let checks = parse_checks(args.check.as_deref().unwrap_or(default_checks))?;
    let config = SweepConfig {
        budget: args.run.budget,
        workers: args.run.workers,
        seed: args.field.seed,
        out: args.output.out.clone(),
        format: args.output.format,
        tuple: args.a.zip(args.b),
        ..SweepConfig::single(args.field.field, n, checks)
    };
    write_report(&config)
}

fn sweep(args: &SweepArgs) -> Result<i32, Failure> {
    let desk = SweepConfig::desk();
    let fields = match (args.max_q, args.field.is_empty()) {
        (Some(max), _) => FieldSelection::MaxQ(max),
        (None, false) => FieldSelection::List(args.field.clone()),
        (None, true) => desk.fields.clone(),
    };
    let (n_min, n_max) = args.n.map_or((args.n_min, args.n_max), |n| (n, n));
    let config = SweepConfig {
        fields,
        n_min,
        n_max,
        checks: parse_checks(&args.check)?,
        budget: args.run.budget,
        workers: args.run.workers,
        seed: args.seed,
        out: args.output.out.clone(),
        format: args.output.format,
        tuple: None,
    };
    write_report(&config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Field(FieldCommand::Info { field, list_elements }) => field_info(field, *list_elements),
        Command::Count(cmd) => count(cmd),
        Command::Verify(cmd) => verify(cmd),
        Command::Sweep(args) => sweep(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
