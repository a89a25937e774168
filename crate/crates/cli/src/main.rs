//! Command-line front end for the blockpow toolkit.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use blockpow::certificate::Certificate;
use blockpow::decompose::{self, Decomposer};
use blockpow::density;
use blockpow::frobenius::{self, SemigroupTable};
use blockpow::gcd;
use blockpow::search;
use blockpow::selftest;
use blockpow::vander::VanderSystem;
use blockpow::{enumerate, Error};

/// Env var holding the memory budget in bytes for the census bitmaps.
const MEMORY_BUDGET_ENV: &str = "BLOCKPOW_MEMORY_BUDGET";

#[derive(Parser)]
#[command(
    name = "blockpow",
    version,
    about = "Digit-block powers: enumeration, gcd structure, Frobenius numbers, \
             certified decompositions, and exhaustive verification"
)]
struct Cli {
    /// Worker threads for data-parallel commands (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SelftestLevel {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// List all base-b k'th powers up to a limit, one per line.
    Enumerate {
        #[arg(long, default_value_t = 2)]
        base: u64,
        #[arg(long)]
        k: u32,
        /// Inclusive upper bound (decimal, any size).
        #[arg(long)]
        limit: String,
        /// Emit a JSON array instead of plain lines.
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Emit CSV with a header row.
        #[arg(long)]
        csv: bool,
    },

    /// Print E_k, the gcd of the base-b k'th powers.
    Gcd {
        #[arg(long, default_value_t = 2)]
        base: u64,
        #[arg(long)]
        k: u32,
        /// Print the full five-way gcd chain as JSON.
        #[arg(long)]
        chain: bool,
        /// Sample depth for the chain (default 2k).
        #[arg(long)]
        depth: Option<u64>,
    },

    /// Exact change-of-basis system: determinant, inverse-entry bound, and
    /// bound checks.
    Vander {
        #[arg(long)]
        k: u32,
    },

    /// Decompose N into a certified sum of binary k'th powers (JSON
    /// certificate on stdout).
    Decompose {
        #[arg(long)]
        k: u32,
        /// Target (decimal, any size); must be a multiple of E_k.
        n: String,
        /// Also write the certificate to a file.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Re-check a certificate produced by `decompose`.
    Verify {
        file: PathBuf,
    },

    /// Frobenius number of the k'th powers scaled by their gcd.
    Frobenius {
        #[arg(long)]
        k: u32,
        /// Also print a representation of this value (decimal).
        #[arg(long)]
        witness: Option<String>,
        /// Raise the supported k ceiling.
        #[arg(long, default_value_t = frobenius::DEFAULT_MAX_K)]
        max_k: u32,
    },

    /// Exact census of n <= limit that are not sums of at most cap powers.
    Census {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        cap: u32,
        #[arg(long)]
        limit: u64,
        /// Write all exceptions to a CSV file.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },

    /// Sumset uniqueness report for C_n + ... + C_{n+k-1}.
    Sumset {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u64,
    },

    /// Density of {k : gcd of base-b k'th powers = g}: partial series and
    /// optional empirical comparison.
    Density {
        #[arg(long, default_value_t = 2)]
        base: u64,
        #[arg(long)]
        g: u64,
        #[arg(long, default_value_t = 1000)]
        depth: u64,
        /// Also count gcd values over k <= this bound.
        #[arg(long)]
        empirical_k: Option<u64>,
        #[arg(long)]
        json: bool,
    },

    /// Run the built-in acceptance checks.
    Selftest {
        #[arg(long, value_enum, default_value_t = SelftestLevel::Quick)]
        level: SelftestLevel,
        #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: could not configure {workers} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Enumerate { base, k, limit, json, csv } => {
            if base < 2 || k == 0 {
                return Err(Error::domain("enumerate requires base >= 2 and k >= 1"));
            }
            let limit = parse_big(&limit)?;
            let values = enumerate(base, k, limit);
            if json {
                let all: Vec<String> = values.map(|v| v.to_string()).collect();
                println!("{}", serde_json::to_string(&all).expect("serializable"));
            } else {
                if csv {
                    println!("value");
                }
                for v in values {
                    println!("{v}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Gcd { base, k, chain, depth } => {
            if chain {
                let depth = depth.unwrap_or(2 * k as u64).max(k as u64);
                let chain = gcd::verify_gcd_chain(base, k, depth)?;
                println!("{}", serde_json::to_string_pretty(&chain).expect("serializable"));
            } else {
                println!("{}", gcd::e_k(base, k)?);
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Vander { k } => {
            if k == 0 {
                return Err(Error::domain("vander requires k >= 1"));
            }
            let sys = VanderSystem::build(k);
            println!("k: {k}");
            println!("determinant: {}", sys.det());
            println!(
                "largest inverse entry: {}/{} = {:.9}",
                sys.max_abs_adjugate(),
                sys.det(),
                sys.inverse_entry_bound_f64()
            );
            println!(
                "determinant below 2^(k^3/3): {}",
                if sys.det_within_cubic_bound() { "yes" } else { "NO" }
            );
            println!(
                "inverse entries below 34: {}",
                if sys.inverse_entries_below(34) { "yes" } else { "NO" }
            );
            println!(
                "matrix * adjugate = det * identity: {}",
                if sys.identity_holds() { "yes" } else { "NO" }
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Decompose { k, n, out } => {
            let target = parse_big(&n)?;
            let decomposition = Decomposer::new(k)?.decompose(&target)?;
            decompose::verify(&decomposition)?;
            let cert = Certificate::from_decomposition(&decomposition);
            let rendered = serde_json::to_string_pretty(&cert).expect("serializable");
            if let Some(path) = out.as_ref() {
                fs::write(path, &rendered)
                    .map_err(|e| Error::domain(format!("cannot write {}: {e}", path.display())))?;
            }
            println!("{rendered}");
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify { file } => {
            let raw = fs::read_to_string(&file)
                .map_err(|e| Error::domain(format!("cannot read {}: {e}", file.display())))?;
            let cert: Certificate = serde_json::from_str(&raw)
                .map_err(|e| Error::domain(format!("bad certificate: {e}")))?;
            let decomposition = cert.to_decomposition()?;
            decompose::verify(&decomposition)?;
            println!(
                "certificate OK: {} = sum of {} base-{} {}'th powers ({} distinct)",
                decomposition.target,
                decomposition.term_count(),
                decomposition.base,
                decomposition.k,
                decomposition.terms.len()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Frobenius { k, witness, max_k } => {
            let f = frobenius::frobenius_number_with_max(k, max_k)?;
            println!("{f}");
            if let Some(w) = witness {
                let value = parse_big(&w)?;
                let table = SemigroupTable::build(k)?;
                let terms = table.represent(&value)?;
                for (power, count) in terms {
                    println!("{} x {} (block {}, length {})", count, power.value(), power.block(), power.block_len());
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Census { k, cap, limit, dump, json } => {
            let budget = memory_budget_bits();
            let keep = dump.is_some();
            let census = search::census_with_budget(k, cap, limit, keep, budget)?;
            if let Some(path) = dump.as_ref() {
                let mut body = String::from("exception\n");
                for v in census.exceptions.as_deref().unwrap_or_default() {
                    body.push_str(&v.to_string());
                    body.push('\n');
                }
                fs::write(path, body)
                    .map_err(|e| Error::domain(format!("cannot write {}: {e}", path.display())))?;
            }
            if json {
                let mut summary = census.clone();
                summary.exceptions = None; // the dump file carries the list
                println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
            } else {
                println!(
                    "k = {k}, cap = {cap}, limit = {limit}: {} exceptions, max {}",
                    census.count,
                    census
                        .max_exception
                        .map_or_else(|| "none".to_string(), |m| m.to_string())
                );
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Sumset { k, n } => {
            let report = search::sumset_unique(k, n)?;
            println!(
                "k = {k}, n = {n}: observed {} of expected {} sums -> {}",
                report.observed,
                report.expected,
                if report.is_unique() { "all unique" } else { "COLLISIONS" }
            );
            for c in &report.collisions {
                println!("  collision at {}: {:?} vs {:?}", c.sum, c.first, c.second);
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Density { base, g, depth, empirical_k, json } => {
            let mut report = density::density_partial(g, base, depth)?;
            if let Some(limit) = empirical_k {
                report = density::with_empirical(report, limit);
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                println!("base {base}, g = {g}: class nonempty = {}", report.nonempty);
                for (d, exact, approx) in &report.partial_sums {
                    println!("  partial sum to depth {d}: {exact} = {approx:.9}");
                }
                if let Some(e) = &report.empirical {
                    println!(
                        "  empirical over k <= {}: {} matches = {:.9}",
                        e.sample_limit, e.matching, e.density
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Selftest { level, seed } => {
            let level = match level {
                SelftestLevel::Quick => selftest::Level::Quick,
                SelftestLevel::Full => selftest::Level::Full,
            };
            let outcomes = selftest::run(level, seed);
            let mut failed = 0;
            for c in &outcomes {
                println!(
                    "{} {:<26} {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
                if !c.passed {
                    failed += 1;
                }
            }
            if failed > 0 {
                eprintln!("{failed} of {} checks failed", outcomes.len());
                Ok(ExitCode::FAILURE)
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}

fn parse_big(s: &str) -> Result<BigUint, Error> {
    BigUint::from_str(s.trim())
        .map_err(|_| Error::domain(format!("not a decimal natural number: {s:?}")))
}

fn memory_budget_bits() -> u64 {
    std::env::var(MEMORY_BUDGET_ENV)
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .map(|bytes| bytes.saturating_mul(8))
        .unwrap_or(search::DEFAULT_CENSUS_BUDGET_BITS)
}
