//! Command-line surface: one verb per library object, JSON on stdout (CSV as
//! a projection for tables), deterministic output independent of the worker
//! count.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 budget or size cap,
//! 1 internal invariant violation.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::analytic::{
    bias_counts, gowers_norm, gowers_recursive, gowers_top_exact, DEFAULT_TUPLE_BUDGET,
};
use crate::calculus::multilinearize;
use crate::error::Error;
use crate::experiments::{
    empirical_c, records_from_csv, records_to_csv, scan, table_to_csv, verify_identities,
    ScanMode, ScanRecordJson, RNG_NAME,
};
use crate::field::Field;
use crate::poly::{declared_degree_from_json, parse, poly_from_json, Polynomial, VectorPoint};
use crate::rank::{derivative_rank_profile, rank, rank_over_extension};

#[derive(Parser, Debug)]
#[command(
    name = "strengthlab",
    about = "Rank, bias, and Gowers uniformity norms of polynomials over small finite fields",
    version
)]
struct Cli {
    /// Worker threads (default: all cores; env STRENGTHLAB_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct PolyInput {
    /// Inline polynomial text, e.g. "2*x1^2*x2 + x3"
    #[arg(long)]
    poly: Option<String>,
    /// Read the polynomial (text or JSON) from a file
    #[arg(long)]
    file: Option<PathBuf>,
    /// Read the polynomial (text or JSON) from standard input
    #[arg(long)]
    stdin: bool,
    /// Prime characteristic (required for text input)
    #[arg(short = 'p')]
    p: Option<u64>,
    /// Extension degree of the coefficient field
    #[arg(short = 's', default_value_t = 1)]
    s: u32,
    /// Number of variables (required for text input)
    #[arg(short = 'n')]
    n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate the polynomial at a point
    Eval {
        #[command(flatten)]
        input: PolyInput,
        /// Comma-separated point coordinates (element encodings below q)
        #[arg(long)]
        at: String,
    },
    /// The difference P(x+t) - P(x) as a polynomial
    Delta {
        #[command(flatten)]
        input: PolyInput,
        /// Comma-separated direction coordinates
        #[arg(long)]
        t: String,
    },
    /// The directional derivative along t
    Deriv {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long)]
        t: String,
    },
    /// The homogeneous part of a given degree
    Homog {
        #[command(flatten)]
        input: PolyInput,
        #[arg(short = 'd')]
        d: u32,
    },
    /// The multilinearization of a homogeneous polynomial
    Multilin {
        #[command(flatten)]
        input: PolyInput,
    },
    /// Exact character-count vector and bias magnitude of the value table
    Bias {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
        budget: u64,
    },
    /// The m-th Gowers norm as an exact count vector (direct enumeration)
    Gowers {
        #[command(flatten)]
        input: PolyInput,
        #[arg(short = 'm')]
        m: u32,
        /// Group the defining sum by the outer direction instead
        #[arg(long)]
        recursive: bool,
        #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
        budget: u64,
    },
    /// Exact rational top-degree Gowers power (via the multilinear bias)
    #[command(name = "gowers-exact")]
    GowersExact {
        #[command(flatten)]
        input: PolyInput,
        /// Declared degree (defaults to the actual degree)
        #[arg(short = 'd')]
        d: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
        budget: u64,
    },
    /// Rank of the declared top homogeneous part, with a certificate
    Rank {
        #[command(flatten)]
        input: PolyInput,
        /// Declared degree (defaults to the JSON "d" field, then the actual degree)
        #[arg(short = 'd')]
        d: Option<u32>,
        #[arg(long, default_value_t = crate::rank::DEFAULT_RANK_BUDGET)]
        budget: u64,
    },
    /// Exhaustive rank over F_{p^s} only (-s is the search field here)
    #[command(name = "rank-ext")]
    RankExt {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long, default_value_t = crate::rank::DEFAULT_RANK_BUDGET)]
        budget: u64,
    },
    /// Rank of every directional derivative over projective directions
    Profile {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long, default_value_t = crate::rank::DEFAULT_RANK_BUDGET)]
        budget: u64,
    },
    /// Enumerate or sample homogeneous polynomials and record rank data
    Scan {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'd')]
        d: u32,
        /// exhaustive | sample
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// Number of samples (sample mode)
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
        budget: u64,
        /// Emit the CSV projection instead of JSON
        #[arg(long)]
        csv: bool,
    },
    /// Verify the exact identities on seeded random polynomials
    Verify {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'd')]
        d: u32,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        /// Required: sampling has no hidden entropy
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
        budget: u64,
    },
    /// Aggregate scan records (CSV) into the empirical rank table
    Table {
        /// CSV file of scan records
        #[arg(long)]
        file: Option<PathBuf>,
        /// Read the CSV from standard input
        #[arg(long)]
        stdin: bool,
        /// Emit the CSV projection instead of JSON
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Serialize)]
struct ValueJson {
    value: Value,
}

#[derive(Serialize)]
struct BiasJson {
    p: u64,
    counts: Vec<u64>,
    total: u64,
    bias: f64,
    error_bound: f64,
}

#[derive(Serialize)]
struct ScanOutput {
    p: u64,
    n: usize,
    d: u32,
    mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rng: Option<String>,
    records: Vec<ScanRecordJson>,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } | Error::SizeCap { .. } => 3,
        _ => 2,
    }
}

fn usage(msg: &str) -> Error {
    Error::InvalidInput(msg.to_string())
}

/// Load a polynomial from exactly one input source. Text input needs -p and
/// -n; JSON input carries its own field data, cross-checked against any
/// flags. Returns the polynomial and the JSON-declared degree when present.
fn load_poly(input: &PolyInput) -> crate::Result<(Polynomial, Option<u32>)> {
    let sources = [
        input.poly.is_some(),
        input.file.is_some(),
        input.stdin,
    ];
    if sources.iter().filter(|&&b| b).count() != 1 {
        return Err(usage(
            "provide exactly one input source: --poly, --file, or --stdin",
        ));
    }
    let text = if let Some(ref inline) = input.poly {
        inline.clone()
    } else if let Some(ref path) = input.file {
        std::fs::read_to_string(path)
            .map_err(|e| usage(&format!("cannot read {}: {e}", path.display())))?
    } else {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| usage(&format!("cannot read stdin: {e}")))?;
        buf
    };
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let value: Value = serde_json::from_str(trimmed)
            .map_err(|e| usage(&format!("invalid JSON: {e}")))?;
        let poly = poly_from_json(&value)?;
        if let Some(p) = input.p {
            if p != poly.field().p() {
                return Err(usage("-p disagrees with the JSON \"p\" field"));
            }
        }
        if let Some(n) = input.n {
            if n != poly.n() {
                return Err(usage("-n disagrees with the JSON \"n\" field"));
            }
        }
        let declared = declared_degree_from_json(&value)?;
        Ok((poly, declared))
    } else {
        let p = input
            .p
            .ok_or_else(|| usage("text input requires -p"))?;
        let n = input
            .n
            .ok_or_else(|| usage("text input requires -n"))?;
        let field = Field::extension(p, input.s)?;
        Ok((parse(trimmed, &field, n)?, None))
    }
}

fn parse_point(text: &str, n: usize, q: u64) -> crate::Result<VectorPoint> {
    let coords: Vec<u64> = text
        .split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<u64>()
                .map_err(|_| usage(&format!("bad coordinate {piece:?}")))
        })
        .collect::<crate::Result<_>>()?;
    if coords.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: coords.len(),
        });
    }
    if let Some(&bad) = coords.iter().find(|&&c| c >= q) {
        return Err(usage(&format!(
            "coordinate {bad} is not an element encoding below q = {q}"
        )));
    }
    Ok(VectorPoint::new(coords))
}

fn emit<T: Serialize, W: Write>(out: &mut W, value: &T) -> crate::Result<()> {
    let json = serde_json::to_string(value).expect("output types serialize");
    writeln!(out, "{json}").map_err(|e| usage(&format!("cannot write output: {e}")))?;
    Ok(())
}

fn element_json(field: &Field, v: u64) -> Value {
    match field {
        Field::Prime(_) => serde_json::json!(v),
        Field::Extension(f) => serde_json::json!(f.decode(v).coeffs),
    }
}

fn dispatch<W: Write>(cmd: Cmd, out: &mut W) -> crate::Result<()> {
    match cmd {
        Cmd::Eval { input, at } => {
            let (poly, _) = load_poly(&input)?;
            let point = parse_point(&at, poly.n(), poly.field().q())?;
            let v = poly.evaluate(&point)?;
            emit(
                out,
                &ValueJson {
                    value: element_json(poly.field(), v),
                },
            )
        }
        Cmd::Delta { input, t } => {
            let (poly, _) = load_poly(&input)?;
            let t = parse_point(&t, poly.n(), poly.field().q())?;
            emit(out, &poly.delta(&t)?.to_json_repr())
        }
        Cmd::Deriv { input, t } => {
            let (poly, _) = load_poly(&input)?;
            let t = parse_point(&t, poly.n(), poly.field().q())?;
            emit(out, &poly.directional_derivative(&t)?.to_json_repr())
        }
        Cmd::Homog { input, d } => {
            let (poly, _) = load_poly(&input)?;
            emit(out, &poly.homogeneous_part(d).to_json_repr())
        }
        Cmd::Multilin { input } => {
            let (poly, _) = load_poly(&input)?;
            emit(out, &multilinearize(&poly)?.to_json_repr())
        }
        Cmd::Bias { input, budget } => {
            let (poly, _) = load_poly(&input)?;
            let table = poly.value_table_capped(budget.min(crate::poly::DEFAULT_TABLE_CAP))?;
            let counts = bias_counts(&table);
            let (bias, error_bound) = counts.magnitude();
            emit(
                out,
                &BiasJson {
                    p: counts.p(),
                    counts: counts.counts().to_vec(),
                    total: counts.total(),
                    bias,
                    error_bound,
                },
            )
        }
        Cmd::Gowers {
            input,
            m,
            recursive,
            budget,
        } => {
            let (poly, _) = load_poly(&input)?;
            let norm = if recursive {
                gowers_recursive(&poly, m, budget)?
            } else {
                gowers_norm(&poly.value_table()?, m, budget)?
            };
            emit(out, &norm.to_json_repr())
        }
        Cmd::GowersExact { input, d, budget } => {
            let (poly, declared) = load_poly(&input)?;
            emit(out, &gowers_top_exact(&poly, d.or(declared), budget)?)
        }
        Cmd::Rank { input, d, budget } => {
            let (poly, declared) = load_poly(&input)?;
            let d = d
                .or(declared)
                .or_else(|| poly.degree())
                .ok_or_else(|| usage("the zero polynomial needs a declared degree -d"))?;
            emit(out, &rank(&poly, d, budget)?.to_json_repr())
        }
        Cmd::RankExt { input, budget } => {
            let s = input.s;
            let base = PolyInput { s: 1, ..input };
            let (poly, _) = load_poly(&base)?;
            emit(out, &rank_over_extension(&poly, s, budget)?.to_json_repr())
        }
        Cmd::Profile { input, budget } => {
            let (poly, _) = load_poly(&input)?;
            emit(out, &derivative_rank_profile(&poly, budget)?.to_json_repr())
        }
        Cmd::Scan {
            p,
            n,
            d,
            mode,
            samples,
            seed,
            budget,
            csv,
        } => {
            let scan_mode = match mode.as_str() {
                "exhaustive" => ScanMode::Exhaustive,
                "sample" => {
                    if seed.is_none() {
                        return Err(usage("sample mode requires --seed (no hidden entropy)"));
                    }
                    ScanMode::Sample { count: samples }
                }
                other => return Err(usage(&format!("unknown mode {other:?}"))),
            };
            let records = scan(p, n, d, scan_mode, budget, seed)?;
            if csv {
                let mut buf = Vec::new();
                records_to_csv(&records, &mut buf)?;
                out.write_all(&buf)
                    .map_err(|e| usage(&format!("cannot write output: {e}")))?;
                Ok(())
            } else {
                emit(
                    out,
                    &ScanOutput {
                        p,
                        n,
                        d,
                        mode,
                        seed,
                        rng: seed.map(|_| RNG_NAME.to_string()),
                        records: records.iter().map(|r| r.to_json_repr()).collect(),
                    },
                )
            }
        }
        Cmd::Verify {
            p,
            n,
            d,
            trials,
            seed,
            budget,
        } => {
            let seed = seed.ok_or_else(|| usage("verify requires --seed (no hidden entropy)"))?;
            emit(out, &verify_identities(p, n, d, trials, seed, budget)?)
        }
        Cmd::Table { file, stdin, csv } => {
            if file.is_some() == stdin {
                return Err(usage("provide exactly one input source: --file or --stdin"));
            }
            let records = if let Some(path) = file {
                let reader = std::fs::File::open(&path)
                    .map_err(|e| usage(&format!("cannot read {}: {e}", path.display())))?;
                records_from_csv(reader)?
            } else {
                records_from_csv(std::io::stdin())?
            };
            let table = empirical_c(&records)?;
            if csv {
                let mut buf = Vec::new();
                table_to_csv(&table, &mut buf)?;
                out.write_all(&buf)
                    .map_err(|e| usage(&format!("cannot write output: {e}")))?;
                Ok(())
            } else {
                emit(out, &table)
            }
        }
    }
}

/// Parse argv and run one subcommand; results go to `out`, diagnostics to
/// `err`. Returns the process exit code.
pub fn run<W: Write + Send, E: Write + Send>(args: &[String], out: &mut W, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    2
                }
            };
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var("STRENGTHLAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let body = |out: &mut W, err: &mut E| match dispatch(cli.cmd, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    };
    match threads {
        Some(k) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool,
                Err(e) => {
                    let _ = writeln!(err, "error: cannot build thread pool: {e}");
                    return 2;
                }
            };
            pool.install(|| body(out, err))
        }
        None => body(out, err),
    }
}
