mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

use config::RunConfig;
use g2hyp::group::GroupModel;
use g2hyp::hyp::Method;

const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "g2hyp", version, about = "Hypergeometric sums with G2 monodromy over finite fields")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// directory for cached field and Gauss tables
    #[arg(long, global = true, env = "G2HYP_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// largest field order that may be tabulated
    #[arg(long, global = true, default_value_t = g2hyp::ff::DEFAULT_TABLE_LIMIT)]
    table_limit: u64,
    /// transforms shorter than this use the direct DFT
    #[arg(long, global = true, default_value_t = g2hyp::dft::DEFAULT_DIRECT_THRESHOLD)]
    dft_threshold: usize,
    /// worker threads
    #[arg(long, global = true, env = "G2HYP_WORKERS")]
    workers: Option<usize>,
    /// tolerance of the fourth-moment classification
    #[arg(long, global = true, default_value_t = 0.5)]
    classify_tol: f64,
    /// method agreement tolerance, relative to q^3.5
    #[arg(long, global = true, default_value_t = 1e-7)]
    cross_check_tol: f64,
    /// JSON-lines ledger for moment runs
    #[arg(long, global = true, env = "G2HYP_LEDGER", default_value = "g2hyp-ledger.jsonl")]
    ledger: PathBuf,
    /// do not append to the ledger
    #[arg(long, global = true)]
    no_ledger: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// field order, modulus and generator
    FieldInfo {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Gauss sums of every character as CSV
    Gauss {
        #[command(flatten)]
        field: FieldArgs,
        /// additive character scale, as a generator exponent
        #[arg(long, default_value_t = 0)]
        lambda: u32,
        #[arg(long)]
        #[serde(skip)]
        out: Option<PathBuf>,
    },
    /// one hypergeometric value, checked against a second method
    Hyp {
        #[command(flatten)]
        field: FieldArgs,
        /// exponent of a
        #[arg(long)]
        a: u32,
        #[arg(long)]
        chi: u32,
        #[arg(long, default_value_t = Method::Mellin)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        lambda: u32,
    },
    /// normalized family F(a, chi) for every a and chi as CSV
    HypMatrix {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = Method::Mellin)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        lambda: u32,
        #[arg(long)]
        #[serde(skip)]
        out: Option<PathBuf>,
    },
    /// empirical moment over the character family
    Moment {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        a: u32,
        #[arg(long, default_value_t = 4)]
        order: u32,
        #[arg(long, default_value_t = 0)]
        lambda: u32,
    },
    /// moments along the tower GF(p^(d n)), n = 1..n-max, with a limit estimate
    MomentSeq {
        #[arg(long)]
        p: u32,
        /// exponent of a in the base field GF(p^d)
        #[arg(long)]
        a: u32,
        #[arg(long, default_value_t = 4)]
        order: u32,
        #[arg(long)]
        n_max: u32,
        #[arg(long, default_value_t = 1)]
        base_degree: u32,
    },
    /// the direct 28-variable sum over GF(3^n)
    FDirect {
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        a: u32,
    },
    /// residual of the orthogonality identity
    IdentityCheck {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        a: u32,
    },
    /// Haar moment of the trace
    GroupMoment {
        #[arg(long, value_parser = parse_group)]
        #[serde(serialize_with = "ser_display")]
        group: GroupModel,
        #[arg(long)]
        order: u32,
    },
    /// trace histogram, against an empirical family when --p is given
    Satotate {
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        a: u32,
        #[arg(long, value_parser = parse_group, default_value = "g2")]
        #[serde(serialize_with = "ser_display")]
        group: GroupModel,
        #[arg(long, default_value_t = 28)]
        bins: usize,
        #[arg(long)]
        #[serde(skip)]
        out: Option<PathBuf>,
    },
    /// fourth moments for every sixth-power coset over a list of primes
    Scan {
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,11,13,17,19")]
        p_list: Vec<u32>,
        #[arg(long, default_value_t = 2)]
        n_max: u32,
        #[arg(long, default_value_t = 4)]
        order: u32,
        #[arg(long)]
        #[serde(skip)]
        out: Option<PathBuf>,
    },
    /// G2 / SL2 verdict from the fourth moment
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        a: u32,
    },
}

fn parse_group(s: &str) -> Result<GroupModel, String> {
    s.parse::<GroupModel>().map_err(|e| e.to_string())
}

fn ser_display<S: serde::Serializer>(v: &impl std::fmt::Display, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn error_json(kind: &str, message: &str, code: u8) {
    let v = serde_json::json!({ "error": kind, "message": message, "exit_code": code });
    eprintln!("{v}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            error_json("Usage", msg.trim(), EXIT_USAGE);
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let g = cli.global;
    let config = RunConfig {
        cache_dir: g.cache_dir,
        table_limit: g.table_limit,
        dft_threshold: g.dft_threshold,
        worker_count: g
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        classify_tol: g.classify_tol,
        cross_check_tol: g.cross_check_tol,
        ledger: (!g.no_ledger).then_some(g.ledger),
    };
    if let Err(e) = config.validate() {
        error_json(e.kind(), &e.to_string(), EXIT_USAGE);
        return ExitCode::from(EXIT_USAGE);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(config.worker_count)
        .build_global()
    {
        error_json("Runtime", &e.to_string(), EXIT_DOMAIN);
        return ExitCode::from(EXIT_DOMAIN);
    }
    match commands::run(&config, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = if e.is_resource_limit() { EXIT_RESOURCE } else { EXIT_DOMAIN };
            error_json(e.kind(), &e.to_string(), code);
            ExitCode::from(code)
        }
    }
}
