//! Scans and samples of homogeneous polynomial families, end-to-end
//! verification of the exact identities, and the empirical table of how the
//! derivative-rank profile bounds the rank.
//!
//! Everything is a pure function of (parameters, seed): sampling uses a
//! ChaCha12 stream seeded via SplitMix64 expansion, with residues drawn by
//! rejection sampling on 32-bit words, and parallel record computation merges
//! by enumeration index.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{gowers_norm, gowers_recursive, gowers_top_exact, Rational};
use crate::calculus::{diagonal_reconstruct, multilinearize};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{poly_from_json, projective_points, MultiIndex, PolyJson, Polynomial};
use crate::rank::{derivative_rank_profile, quadratic_rank, rank};

/// Identifier of the sampling stream, reported in every header.
pub const RNG_NAME: &str = "chacha12/splitmix64-seed/u32-rejection";

// ---------------------------------------------------------------------------
// Seeded sampling
// ---------------------------------------------------------------------------

/// Uniform residue in [0, p) by rejection sampling on 32-bit words.
fn draw_mod(rng: &mut ChaCha12Rng, p: u64) -> u64 {
    let zone = u32::MAX - (u32::MAX % p as u32);
    loop {
        let v = rng.next_u32();
        if v < zone {
            return (v % p as u32) as u64;
        }
    }
}

fn monomials_desc(n: usize, e: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, e: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == n - 1 {
            prefix.push(e);
            out.push(MultiIndex::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for v in 0..=e {
            prefix.push(v);
            rec(n, e - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, e, &mut Vec::new(), &mut out);
    out.sort();
    out.reverse();
    out
}

fn poly_from_coeffs(field: &Field, n: usize, monos: &[MultiIndex], coeffs: &[u64]) -> Polynomial {
    let mut poly = Polynomial::zero(field.clone(), n);
    for (m, &c) in monos.iter().zip(coeffs) {
        if c != 0 {
            poly = poly
                .add(&Polynomial::monomial(
                    field.clone(),
                    n,
                    m.exps().to_vec(),
                    c,
                ))
                .unwrap();
        }
    }
    poly
}

/// Draw a uniformly random nonzero homogeneous degree-d polynomial
/// (coefficients drawn in graded-lex order, all-zero vectors redrawn).
fn draw_homogeneous(
    rng: &mut ChaCha12Rng,
    field: &Field,
    n: usize,
    monos: &[MultiIndex],
) -> Polynomial {
    loop {
        let coeffs: Vec<u64> = monos.iter().map(|_| draw_mod(rng, field.p())).collect();
        if coeffs.iter().any(|&c| c != 0) {
            return poly_from_coeffs(field, n, monos, &coeffs);
        }
    }
}

/// Draw a uniformly random polynomial of degree at most `max_deg`.
fn draw_low_degree(
    rng: &mut ChaCha12Rng,
    field: &Field,
    n: usize,
    max_deg: u32,
) -> Polynomial {
    let mut poly = Polynomial::zero(field.clone(), n);
    for e in (0..=max_deg).rev() {
        let monos = monomials_desc(n, e);
        let coeffs: Vec<u64> = monos.iter().map(|_| draw_mod(rng, field.p())).collect();
        poly = poly.add(&poly_from_coeffs(field, n, &monos, &coeffs)).unwrap();
    }
    poly
}

/// Seeded sample of uniformly random nonzero homogeneous degree-d
/// polynomials; the stream is the one every other sampling entry point uses.
pub fn sample_homogeneous(
    p: u64,
    n: usize,
    d: u32,
    count: u64,
    seed: u64,
) -> Result<Vec<Polynomial>> {
    let field = Field::prime(p)?;
    let monos = monomials_desc(n, d);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| draw_homogeneous(&mut rng, &field, n, &monos))
        .collect())
}

// ---------------------------------------------------------------------------
// Scan records
// ---------------------------------------------------------------------------

/// One scanned polynomial: its derivative-rank profile maximum, its rank
/// (with the searched field), and its exact top-degree Gowers power.
#[derive(Debug, Clone)]
pub struct ScanRecord {
    pub p: u64,
    pub n: usize,
    pub d: u32,
    /// Enumeration index for exhaustive scans, "seed:index" for samples.
    pub provenance: String,
    pub poly: Polynomial,
    pub max_deriv_rank: u32,
    pub rank: u32,
    pub rank_field_s: u32,
    pub gowers_top: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRecordJson {
    pub p: u64,
    pub n: usize,
    pub d: u32,
    pub index_or_seed: String,
    pub poly: PolyJson,
    pub max_deriv_rank: u32,
    pub rank: u32,
    pub rank_field_s: u32,
    pub gowers_top: Rational,
}

impl ScanRecord {
    pub fn to_json_repr(&self) -> ScanRecordJson {
        ScanRecordJson {
            p: self.p,
            n: self.n,
            d: self.d,
            index_or_seed: self.provenance.clone(),
            poly: self.poly.to_json_repr(),
            max_deriv_rank: self.max_deriv_rank,
            rank: self.rank,
            rank_field_s: self.rank_field_s,
            gowers_top: self.gowers_top,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    Sample { count: u64 },
}

/// Enumerate or sample nonzero homogeneous degree-d polynomials and compute
/// one record each. Exhaustive scans walk coefficient vectors in graded-lex
/// order (most significant digit on the graded-lex-largest monomial),
/// skipping the zero vector.
pub fn scan(
    p: u64,
    n: usize,
    d: u32,
    mode: ScanMode,
    budget: u64,
    seed: Option<u64>,
) -> Result<Vec<ScanRecord>> {
    if d < 3 {
        return Err(Error::DegreeTooSmall);
    }
    if p <= d as u64 {
        return Err(Error::CharTooSmall { p, degree: d });
    }
    let field = Field::prime(p)?;
    let monos = monomials_desc(n, d);
    let inputs: Vec<(String, Polynomial)> = match mode {
        ScanMode::Exhaustive => {
            let space = (p as u128).pow(monos.len() as u32);
            if space > budget as u128 {
                return Err(Error::BudgetExceeded {
                    required: space,
                    budget,
                });
            }
            (1..space as u64)
                .map(|code| {
                    // digits of `code`, most significant on monos[0]
                    let mut coeffs = vec![0u64; monos.len()];
                    let mut rest = code;
                    for k in (0..monos.len()).rev() {
                        coeffs[k] = rest % p;
                        rest /= p;
                    }
                    (code.to_string(), poly_from_coeffs(&field, n, &monos, &coeffs))
                })
                .collect()
        }
        ScanMode::Sample { count } => {
            let seed = seed.ok_or_else(|| {
                Error::InvalidInput("sample mode requires a seed".into())
            })?;
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            (0..count)
                .map(|i| {
                    (
                        format!("{seed}:{i}"),
                        draw_homogeneous(&mut rng, &field, n, &monos),
                    )
                })
                .collect()
        }
    };
    inputs
        .into_par_iter()
        .map(|(provenance, poly)| {
            let profile = derivative_rank_profile(&poly, budget)?;
            let rank_result = rank(&poly, d, budget)?;
            let gowers_top = gowers_top_exact(&poly, Some(d), budget)?;
            Ok(ScanRecord {
                p,
                n,
                d,
                provenance,
                max_deriv_rank: profile.max,
                rank: rank_result
                    .rank()
                    .expect("r_max = n always yields an exact rank"),
                rank_field_s: rank_result.field.s(),
                gowers_top,
                poly,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// CSV projection
// ---------------------------------------------------------------------------

pub const CSV_HEADER: [&str; 9] = [
    "p",
    "n",
    "d",
    "index_or_seed",
    "poly_json",
    "max_deriv_rank",
    "rank",
    "gowers_top_num",
    "gowers_top_den",
];

pub fn records_to_csv<W: std::io::Write>(records: &[ScanRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    for r in records {
        let poly_json = serde_json::to_string(&r.poly.to_json_repr()).unwrap();
        w.write_record([
            r.p.to_string(),
            r.n.to_string(),
            r.d.to_string(),
            r.provenance.clone(),
            poly_json,
            r.max_deriv_rank.to_string(),
            r.rank.to_string(),
            r.gowers_top.num.to_string(),
            r.gowers_top.den.to_string(),
        ])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(())
}

pub fn records_from_csv<R: std::io::Read>(input: R) -> Result<Vec<ScanRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::InvalidInput(e.to_string()))?;
        if row.len() != CSV_HEADER.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} CSV fields, got {}",
                CSV_HEADER.len(),
                row.len()
            )));
        }
        let field = |i: usize| row.get(i).unwrap();
        let parse_u64 = |i: usize| -> Result<u64> {
            field(i)
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad integer in column {}", CSV_HEADER[i])))
        };
        let poly_value: serde_json::Value = serde_json::from_str(field(4))
            .map_err(|e| Error::InvalidInput(format!("bad poly_json: {e}")))?;
        let poly = poly_from_json(&poly_value)?;
        out.push(ScanRecord {
            p: parse_u64(0)?,
            n: parse_u64(1)? as usize,
            d: parse_u64(2)? as u32,
            provenance: field(3).to_string(),
            rank_field_s: 1,
            max_deriv_rank: parse_u64(5)? as u32,
            rank: parse_u64(6)? as u32,
            gowers_top: Rational::new(parse_u64(7)?, parse_u64(8)?),
            poly,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The empirical table
// ---------------------------------------------------------------------------

/// Row r: the largest rank among records whose profile maximum is at most r
/// (buckets nest, so the rows are monotone), with a witness.
#[derive(Debug, Clone, Serialize)]
pub struct CTableRow {
    pub r: u32,
    pub count: u64,
    pub max_rank: u32,
    pub witness: PolyJson,
}

/// Per rank bucket: the minimum observed top-degree Gowers power, an
/// empirical (never asserted) stand-in for the non-explicit lower-bound
/// constants.
#[derive(Debug, Clone, Serialize)]
pub struct BiasMinimumRow {
    pub rank: u32,
    pub count: u64,
    pub min_gowers_top: Rational,
    pub witness: PolyJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalCTable {
    pub p: u64,
    pub n: usize,
    pub d: u32,
    pub records: u64,
    pub rows: Vec<CTableRow>,
    pub bias_minima: Vec<BiasMinimumRow>,
}

pub fn empirical_c(records: &[ScanRecord]) -> Result<EmpiricalCTable> {
    let Some(first) = records.first() else {
        return Ok(EmpiricalCTable {
            p: 0,
            n: 0,
            d: 0,
            records: 0,
            rows: vec![],
            bias_minima: vec![],
        });
    };
    let (p, n, d) = (first.p, first.n, first.d);
    if records
        .iter()
        .any(|r| (r.p, r.n, r.d) != (p, n, d))
    {
        return Err(Error::MixedParameters(format!(
            "all records must share (p, n, d) = ({p}, {n}, {d})"
        )));
    }
    let min_profile = records.iter().map(|r| r.max_deriv_rank).min().unwrap();
    let max_profile = records.iter().map(|r| r.max_deriv_rank).max().unwrap();
    let mut rows = Vec::new();
    for r in min_profile..=max_profile {
        let bucket: Vec<&ScanRecord> = records
            .iter()
            .filter(|rec| rec.max_deriv_rank <= r)
            .collect();
        let max_rank = bucket.iter().map(|rec| rec.rank).max().unwrap();
        let witness = bucket
            .iter()
            .find(|rec| rec.rank == max_rank)
            .unwrap()
            .poly
            .to_json_repr();
        rows.push(CTableRow {
            r,
            count: bucket.len() as u64,
            max_rank,
            witness,
        });
    }
    let max_rank_seen = records.iter().map(|r| r.rank).max().unwrap();
    let mut bias_minima = Vec::new();
    for rank_value in 0..=max_rank_seen {
        let bucket: Vec<&ScanRecord> = records
            .iter()
            .filter(|rec| rec.rank == rank_value)
            .collect();
        if bucket.is_empty() {
            continue;
        }
        let min_gowers_top = *bucket.iter().map(|rec| &rec.gowers_top).min().unwrap();
        let witness = bucket
            .iter()
            .find(|rec| rec.gowers_top == min_gowers_top)
            .unwrap()
            .poly
            .to_json_repr();
        bias_minima.push(BiasMinimumRow {
            rank: rank_value,
            count: bucket.len() as u64,
            min_gowers_top,
            witness,
        });
    }
    Ok(EmpiricalCTable {
        p,
        n,
        d,
        records: records.len() as u64,
        rows,
        bias_minima,
    })
}

pub fn table_to_csv<W: std::io::Write>(table: &EmpiricalCTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "count", "max_rank"])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    for row in &table.rows {
        w.write_record([
            row.r.to_string(),
            row.count.to_string(),
            row.max_rank.to_string(),
        ])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Identity verification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CheckCounts {
    pub pass: u64,
    pub fail: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationChecks {
    pub diagonal_reconstruct: CheckCounts,
    pub gowers_count_vectors: CheckCounts,
    pub top_exact_vs_float: CheckCounts,
    pub remark_rank_equality: CheckCounts,
    pub phase_invariance: CheckCounts,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationFailure {
    pub trial: u64,
    pub check: String,
    pub poly: PolyJson,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub p: u64,
    pub n: usize,
    pub d: u32,
    pub trials: u64,
    pub seed: u64,
    pub rng: String,
    /// Directions with a vanishing derivative, skipped by the rank-equality
    /// check and tallied here instead.
    pub exceptional_directions: u64,
    pub checks: VerificationChecks,
    pub first_failure: Option<VerificationFailure>,
}

struct TrialOutcome {
    trial: u64,
    poly: Polynomial,
    results: [(&'static str, bool, String); 5],
    exceptional: u64,
}

/// Per sampled polynomial: (i) the diagonal identity round-trip, (ii) exact
/// count-vector equality of the direct and recursive Gowers enumerations,
/// (iii) the exact top-degree value against the float norm, (iv) rank
/// equality of the difference top part and the directional derivative over
/// all projective directions, (v) count-vector invariance under adding a
/// low-degree phase.
pub fn verify_identities(
    p: u64,
    n: usize,
    d: u32,
    trials: u64,
    seed: u64,
    budget: u64,
) -> Result<VerificationReport> {
    if p <= d as u64 {
        return Err(Error::CharTooSmall { p, degree: d });
    }
    let field = Field::prime(p)?;
    let monos = monomials_desc(n, d);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let inputs: Vec<(Polynomial, Polynomial)> = (0..trials)
        .map(|_| {
            let poly = draw_homogeneous(&mut rng, &field, n, &monos);
            let shift = draw_low_degree(&mut rng, &field, n, d - 1);
            (poly, shift)
        })
        .collect();

    let outcomes: Vec<TrialOutcome> = inputs
        .into_par_iter()
        .enumerate()
        .map(|(trial, (poly, shift))| run_trial(trial as u64, &poly, &shift, d, budget))
        .collect::<Result<Vec<_>>>()?;

    let mut checks = VerificationChecks::default();
    let mut first_failure: Option<VerificationFailure> = None;
    let mut exceptional = 0u64;
    for outcome in &outcomes {
        exceptional += outcome.exceptional;
        for (name, ok, detail) in &outcome.results {
            let counts = match *name {
                "diagonal_reconstruct" => &mut checks.diagonal_reconstruct,
                "gowers_count_vectors" => &mut checks.gowers_count_vectors,
                "top_exact_vs_float" => &mut checks.top_exact_vs_float,
                "remark_rank_equality" => &mut checks.remark_rank_equality,
                "phase_invariance" => &mut checks.phase_invariance,
                _ => unreachable!(),
            };
            if *ok {
                counts.pass += 1;
            } else {
                counts.fail += 1;
                if first_failure.is_none() {
                    first_failure = Some(VerificationFailure {
                        trial: outcome.trial,
                        check: name.to_string(),
                        poly: outcome.poly.to_json_repr(),
                        detail: detail.clone(),
                    });
                }
            }
        }
    }
    Ok(VerificationReport {
        p,
        n,
        d,
        trials,
        seed,
        rng: RNG_NAME.to_string(),
        exceptional_directions: exceptional,
        checks,
        first_failure,
    })
}

fn run_trial(
    trial: u64,
    poly: &Polynomial,
    shift: &Polynomial,
    d: u32,
    budget: u64,
) -> Result<TrialOutcome> {
    let field = poly.field().clone();
    let n = poly.n();

    // (i) diagonal identity round-trip
    let diag_ok = diagonal_reconstruct(&multilinearize(poly)?)? == *poly;

    // (ii) direct vs recursive count vectors at m = d
    let table = poly.value_table()?;
    let direct = gowers_norm(&table, d, budget)?;
    let recursive = gowers_recursive(poly, d, budget)?;
    let counts_ok = direct.counts == recursive.counts;

    // (iii) exact top value against the float norm
    let exact = gowers_top_exact(poly, Some(d), budget)?;
    let top_ok = (exact.as_f64() - direct.value).abs() <= direct.error_bound + 1e-9;

    // (iv) rank of the difference top part equals the derivative rank, over
    // every projective direction with a nonvanishing derivative
    let mut remark_ok = true;
    let mut remark_detail = String::new();
    let mut exceptional = 0u64;
    for t in projective_points(&field, n) {
        let pt = poly.directional_derivative(&t)?;
        if pt.is_zero() {
            exceptional += 1;
            continue;
        }
        let delta_top = poly.delta(&t)?.homogeneous_part(d - 1);
        let rank_of = |q: &Polynomial| -> Result<u32> {
            if q.is_zero() {
                return Ok(0);
            }
            if d - 1 == 2 {
                Ok(quadratic_rank(q)?.rank().unwrap())
            } else {
                Ok(crate::rank::exhaustive_rank(q, n as u32, budget)?
                    .rank()
                    .unwrap())
            }
        };
        let r_delta = rank_of(&delta_top)?;
        let r_deriv = rank_of(&pt)?;
        if r_delta != r_deriv {
            remark_ok = false;
            remark_detail = format!(
                "t = {:?}: delta-top rank {r_delta} != derivative rank {r_deriv}",
                t.coords()
            );
            break;
        }
    }

    // (v) adding a phase of degree <= d-1 leaves the count vector unchanged
    let shifted = poly.add(shift)?;
    let shifted_norm = gowers_norm(&shifted.value_table()?, d, budget)?;
    let phase_ok = shifted_norm.counts == direct.counts;

    Ok(TrialOutcome {
        trial,
        poly: poly.clone(),
        results: [
            ("diagonal_reconstruct", diag_ok, String::new()),
            ("gowers_count_vectors", counts_ok, String::new()),
            ("top_exact_vs_float", top_ok, String::new()),
            ("remark_rank_equality", remark_ok, remark_detail),
            ("phase_invariance", phase_ok, String::new()),
        ],
        exceptional,
    })
}
