//! `slgen`: command-line front end for the construction and verification
//! pipeline.
//!
//! Exit codes: 0 success; 1 hypothesis not satisfied, usage or I/O error;
//! 2 construction budget exhausted; 3 certificate rejected; 4 finite
//! closure cap exceeded. Log verbosity follows `RUST_LOG`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use slgen::certify::{self, finite, Certificate, VerifyOptions};
use slgen::sample::random_sl;
use slgen::{check_hypothesis, construct, Budget, Error, IntMatrix};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_REJECTED: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "slgen",
    version,
    about = "Certified generating pairs for finite-index subgroups of SL(n, Z)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test whether the matrix is regular (minimal polynomial = characteristic polynomial).
    Check { matrix: PathBuf },
    /// Build h and a certificate for Gamma(N) <= <g, h>.
    Construct {
        matrix: PathBuf,
        #[arg(long, default_value = "1")]
        m: BigInt,
        /// Harvest sweeps (default 4n).
        #[arg(long)]
        harvest_rounds: Option<usize>,
        /// Commutator-closure passes (default 2n^2).
        #[arg(long)]
        closure_passes: Option<usize>,
        /// Output path; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-check every claim in a certificate.
    Verify {
        certificate: PathBuf,
        /// Check witnesses on several threads.
        #[arg(long)]
        parallel: bool,
        /// Primes for the mod-p surjectivity check, comma separated.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
    },
    /// Index of the image of <g, h> in SL(n, Z/N) for a verified certificate.
    Index {
        certificate: PathBuf,
        #[arg(long, default_value_t = finite::DEFAULT_CAP)]
        cap: usize,
    },
    /// Random product of elementary matrices (ChaCha8, see the README).
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// On-disk matrix format: `{"n": 3, "rows": [["0", "0", "1"], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    rows: IntMatrix,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type CliResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_FAIL, format!("cannot read {}: {e}", path.display())))
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, format!("{text}\n"))
            .map_err(|e| Failure::new(EXIT_FAIL, format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_matrix(path: &Path) -> Result<IntMatrix, Failure> {
    let f: MatrixFile = serde_json::from_str(&read(path)?).map_err(|e| {
        Failure::new(
            EXIT_FAIL,
            format!("bad matrix file {}: {e}", path.display()),
        )
    })?;
    if f.rows.dim() != f.n {
        return Err(Failure::new(
            EXIT_FAIL,
            format!("n = {} but the matrix has {} rows", f.n, f.rows.dim()),
        ));
    }
    Ok(f.rows)
}

fn load_certificate(path: &Path) -> Result<Certificate, Failure> {
    Certificate::from_json(&read(path)?).map_err(|e| {
        Failure::new(
            EXIT_REJECTED,
            format!("malformed certificate {}: {e}", path.display()),
        )
    })
}

fn to_json<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("serialisable")
}

fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Check { matrix } => {
            let g = load_matrix(&matrix)?;
            let report =
                check_hypothesis(&g).map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
            println!("{}", to_json(&report));
            Ok(if report.regular { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Construct {
            matrix,
            m,
            harvest_rounds,
            closure_passes,
            output,
        } => {
            let g = load_matrix(&matrix)?;
            let mut budget = Budget::for_dim(g.dim());
            if let Some(r) = harvest_rounds {
                budget.harvest_rounds = r;
            }
            if let Some(p) = closure_passes {
                budget.closure_passes = p;
            }
            let cert = construct(&g, &m, Some(budget)).map_err(|e| {
                let code = match e {
                    Error::BudgetExceeded { .. }
                    | Error::InsufficientRank { .. }
                    | Error::SearchBudget(_) => EXIT_BUDGET,
                    _ => EXIT_FAIL,
                };
                Failure::new(code, e.to_string())
            })?;
            write_out(output.as_deref(), &cert.to_json())?;
            log::info!("certificate level N = {}", cert.levels.n);
            Ok(EXIT_OK)
        }
        Command::Verify {
            certificate,
            parallel,
            primes,
        } => {
            let cert = load_certificate(&certificate)?;
            let report = certify::verify(&cert, &VerifyOptions { parallel, primes });
            println!("{}", to_json(&report));
            Ok(if report.passed {
                EXIT_OK
            } else {
                EXIT_REJECTED
            })
        }
        Command::Index { certificate, cap } => {
            let cert = load_certificate(&certificate)?;
            let report = certify::verify(&cert, &VerifyOptions::default());
            if !report.passed {
                return Err(Failure::new(EXIT_REJECTED, report.verdict));
            }
            let modulus: u64 = (&cert.levels.n).try_into().map_err(|_| {
                Failure::new(
                    EXIT_CAP,
                    format!("level {} is beyond the closure range", cert.levels.n),
                )
            })?;
            let index =
                finite::index_mod_n(&cert.g, &cert.h, modulus, cap).map_err(|e| match e {
                    Error::CapExceeded(_) => Failure::new(EXIT_CAP, e.to_string()),
                    _ => Failure::new(EXIT_FAIL, e.to_string()),
                })?;
            println!(
                "{}",
                serde_json::json!({ "level": cert.levels.n.to_string(), "index": index.to_string() })
            );
            Ok(EXIT_OK)
        }
        Command::Random {
            n,
            steps,
            seed,
            output,
        } => {
            let g =
                random_sl(n, steps, seed).map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
            write_out(output.as_deref(), &to_json(&MatrixFile { n, rows: g }))?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAIL } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("slgen: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
